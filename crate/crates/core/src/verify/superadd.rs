use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::report::{CheckReport, MarginKind};
use super::stats::{mean_se, par_trials, proportion, std_dev, three_sigma};
use crate::error::{invalid, Error, Result};
use crate::exact::{max_value, same_value, SEARCH_NODE_LIMIT};
use crate::hypergraph::{sample_config_partial, project, sample_er, Hyperedge};
use crate::interpolate::{check_chain_params, check_regular_split, CoupledChain};
use crate::models::{build_instance_with, edge_symmetric_difference, Instance, ModelKind, ModelSpec};
use crate::rng::Rng;

fn solve(inst: &Instance) -> f64 {
    max_value(inst).expect("size checked by caller").as_f64()
}

fn check_search_size(n: usize) -> Result<()> {
    if n > SEARCH_NODE_LIMIT {
        return Err(Error::SizeCap { what: "search solver nodes", limit: SEARCH_NODE_LIMIT, requested: n });
    }
    Ok(())
}

/// Compares `E[H(G(N, floor(cN)))]` with `E[H(G(N1, M1)) + H(G(N2, M2))]`,
/// `M1 ~ Binomial(floor(cN), N1/N)`, on paired draws of the interpolation
/// chain endpoints. With `satisfiability` set, compares `P(H = M)` instead.
/// Passes when the mean paired difference is at least `-3` standard errors.
pub fn check_superadditivity_er(
    n: usize,
    n1: usize,
    c: f64,
    spec: &ModelSpec,
    samples: u64,
    seed: u64,
    satisfiability: bool,
) -> Result<CheckReport> {
    spec.validate()?;
    let m = check_chain_params(n, n1, c)?;
    check_search_size(n)?;
    if satisfiability && !spec.kind.is_csp() {
        return Err(invalid("the satisfiability variant needs coloring, K-SAT or NAE-K-SAT"));
    }
    if samples < 2 {
        return Err(invalid("need at least 2 samples"));
    }
    let rows: Vec<(f64, f64)> = par_trials(samples, seed, |_, rng| {
        let chain = CoupledChain::sample(n, m, n1, spec, rng);
        let whole = chain.at(m);
        let (p1, p2) = chain.parts(n1);
        if satisfiability {
            let sat = |inst: &Instance| crate::exact::is_satisfiable(inst).expect("csp checked");
            (f64::from(u8::from(sat(&whole))), f64::from(u8::from(sat(&p1) && sat(&p2))))
        } else {
            (solve(&whole), solve(&p1) + solve(&p2))
        }
    });
    let name = if satisfiability { "superadditivity-er-sat" } else { "superadditivity-er" };
    let mut report = CheckReport::new(name, Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("n1", n1)
        .param("c", c)
        .param("m", m)
        .param("samples", samples)
        .param("ensemble", "directed, with replacement");
    let lhs: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let rhs: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let diff: Vec<f64> = rows.iter().map(|r| r.0 - r.1).collect();
    let (label_l, label_r) = if satisfiability { ("P(whole satisfiable)", "P(both parts satisfiable)") } else { ("E[H(whole)]", "E[H(part 1) + H(part 2)]") };
    let est = |xs: &[f64]| if satisfiability { proportion(xs.iter().filter(|&&v| v > 0.5).count() as u64, samples) } else { mean_se(xs) };
    let (l, lse) = est(&lhs);
    let (r, rse) = est(&rhs);
    report.estimate(label_l, l, lse, samples);
    report.estimate(label_r, r, rse, samples);
    let (d, dse) = mean_se(&diff);
    report.estimate("paired difference", d, dse, samples);
    report.margin("whole - split", d, three_sigma(dse), MarginKind::Statistical);
    Ok(report)
}

fn sample_regular_instance(n: usize, r: usize, spec: &ModelSpec, rng: &mut Rng) -> Instance {
    let state = sample_config_partial(n, r, spec.k, n * r / spec.k, rng).expect("integrality checked");
    build_instance_with(project(&state), *spec, rng).expect("valid regular instance")
}

/// Compares `E[H(G(N, r))]` with `E[H(G(N1, r))] + E[H(G(N2, r))]` for
/// configuration-model regular graphs, from independent draws. Asserts
/// `lhs >= rhs - C N^(5/6) - 3 sigma` and reports the raw margin against `3 sigma`.
pub fn check_superadditivity_reg(
    n: usize,
    n1: usize,
    r: usize,
    spec: &ModelSpec,
    samples: u64,
    seed: u64,
    constant: f64,
) -> Result<CheckReport> {
    spec.validate()?;
    check_regular_split(n, n1, r, spec.k)?;
    check_search_size(n)?;
    if samples < 2 {
        return Err(invalid("need at least 2 samples"));
    }
    let n2 = n - n1;
    let rows: Vec<(f64, f64)> = par_trials(samples, seed, |_, rng| {
        let whole = sample_regular_instance(n, r, spec, rng);
        let a = sample_regular_instance(n1, r, spec, rng);
        let b = sample_regular_instance(n2, r, spec, rng);
        (solve(&whole), solve(&a) + solve(&b))
    });
    let lhs: Vec<f64> = rows.iter().map(|x| x.0).collect();
    let rhs: Vec<f64> = rows.iter().map(|x| x.1).collect();
    let (l, lse) = mean_se(&lhs);
    let (rr, rse) = mean_se(&rhs);
    let se = (lse * lse + rse * rse).sqrt();
    let correction = constant * (n as f64).powf(5.0 / 6.0);
    let mut report = CheckReport::new("superadditivity-regular", Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("n1", n1)
        .param("r", r)
        .param("k", spec.k)
        .param("samples", samples)
        .param("constant", constant)
        .param("ensemble", "configuration model, projected");
    report.estimate("E[H(G(N, r))]", l, lse, samples);
    report.estimate("E[H(G(N1, r))] + E[H(G(N2, r))]", rr, rse, samples);
    report.margin("whole - split + C N^(5/6)", l - rr + correction, three_sigma(se), MarginKind::Statistical);
    report.margin("raw whole - split", l - rr, three_sigma(se), MarginKind::Statistical);
    Ok(report)
}

/// Which ensemble a size ladder samples from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LadderEnsemble {
    /// `G(N, floor(cN))`.
    ErdosRenyi { c: f64 },
    /// Configuration-model `r`-regular graphs.
    Regular { r: usize },
}

/// Standard deviation of `H(G)/N` over a ladder of sizes. The decay across
/// the ladder is recorded as a diagnostic; the verdict only fails on invalid input.
pub fn concentration_report(
    sizes: &[usize],
    ensemble: LadderEnsemble,
    spec: &ModelSpec,
    samples: u64,
    seed: u64,
) -> Result<CheckReport> {
    spec.validate()?;
    if sizes.is_empty() || samples < 2 {
        return Err(invalid("need a non-empty size ladder and at least 2 samples"));
    }
    for &n in sizes {
        check_search_size(n)?;
        match ensemble {
            LadderEnsemble::ErdosRenyi { c } => {
                check_chain_params(n.max(2), 1, c)?;
            }
            LadderEnsemble::Regular { r } => {
                if (n * r) % spec.k != 0 {
                    return Err(Error::Integrality(format!("N r / K = {n}*{r}/{} is not an integer", spec.k)));
                }
            }
        }
    }
    let mut report = CheckReport::new("concentration", Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("sizes", sizes)
        .param("ensemble", ensemble)
        .param("samples", samples);
    let mut sds = Vec::new();
    for (i, &n) in sizes.iter().enumerate() {
        let stream_seed = crate::rng::derive_seed(seed, i as u64);
        let vals: Vec<f64> = par_trials(samples, stream_seed, |_, rng| {
            let inst = match ensemble {
                LadderEnsemble::ErdosRenyi { c } => {
                    let m = (c * n as f64).floor() as usize;
                    build_instance_with(sample_er(n, m, spec.k, rng), *spec, rng).expect("valid instance")
                }
                LadderEnsemble::Regular { r } => sample_regular_instance(n, r, spec, rng),
            };
            solve(&inst) / n as f64
        });
        let sd = std_dev(&vals);
        let (mean, se) = mean_se(&vals);
        report.estimate(format!("E[H/N], N={n}"), mean, se, samples);
        report.estimate(format!("sd(H/N), N={n}"), sd, sd / (2.0 * (samples as f64 - 1.0)).sqrt(), samples);
        report.point("sd(H/N)", n as f64, sd, sd / (2.0 * (samples as f64 - 1.0)).sqrt());
        sds.push(sd);
    }
    for (w, s) in sizes.windows(2).zip(sds.windows(2)) {
        report.margin(format!("sd(N={}) - sd(N={})", w[0], w[1]), s[0] - s[1], 0.0, MarginKind::Diagnostic);
    }
    Ok(report)
}

/// Pathwise checks on nested edge sets `E_1 ⊂ E_2 ⊂ ...` of sizes `m_ladder`:
/// `H` is nonincreasing in the edges for independent set, nondecreasing for
/// MAX-CUT, coloring, K-SAT and NAE-K-SAT, and for every model
/// `|H(M') - H(M)| <= L (M' - M)`.
pub fn monotone_in_edges(spec: &ModelSpec, n: usize, m_ladder: &[usize], samples: u64, seed: u64) -> Result<CheckReport> {
    spec.validate()?;
    check_search_size(n)?;
    let mut ladder = m_ladder.to_vec();
    ladder.sort_unstable();
    ladder.dedup();
    if ladder.len() < 2 || samples == 0 {
        return Err(invalid("need at least two edge counts and one sample"));
    }
    let top = *ladder.last().unwrap();
    let paths: Vec<Vec<f64>> = par_trials(samples, seed, |_, rng| {
        let full = build_instance_with(sample_er(n, top, spec.k, rng), *spec, rng).expect("valid instance");
        ladder.iter().map(|&m| solve(&full.truncated(m))).collect()
    });
    let sign = match spec.kind {
        ModelKind::IndependentSet => Some(-1.0),
        ModelKind::Ising => None,
        _ => Some(1.0),
    };
    let mut worst_dir = f64::INFINITY;
    let mut worst_lip = f64::INFINITY;
    for path in &paths {
        for (i, w) in path.windows(2).enumerate() {
            let dm = (ladder[i + 1] - ladder[i]) as f64;
            let dh = w[1] - w[0];
            if let Some(s) = sign {
                worst_dir = worst_dir.min(s * dh);
            }
            worst_lip = worst_lip.min(spec.lipschitz() * dm - dh.abs());
        }
    }
    let mut report = CheckReport::new("monotone-in-edges", Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("m_ladder", &ladder)
        .param("samples", samples);
    for (i, &m) in ladder.iter().enumerate() {
        let col: Vec<f64> = paths.iter().map(|p| p[i]).collect();
        let (mean, se) = mean_se(&col);
        report.estimate(format!("E[H], M={m}"), mean, se, samples);
        report.point("E[H]", m as f64, mean, se);
    }
    let tol = crate::exact::VALUE_TOL * (1.0 + top as f64 * spec.lipschitz());
    if sign.is_some() {
        let label = if sign == Some(-1.0) { "min over paths of H(M) - H(M')" } else { "min over paths of H(M') - H(M)" };
        report.margin(label, worst_dir, tol, MarginKind::Exact);
    } else {
        report.note("Ising: no monotonicity in edges is asserted");
    }
    report.margin("min over paths of L (M' - M) - |H(M') - H(M)|", worst_lip, tol, MarginKind::Exact);
    Ok(report)
}

/// Checks `|H(G1) - H(G2)| <= L |E1 Δ E2|` on random pairs obtained by
/// deleting and adding up to `edits` edges.
pub fn edit_distance_bound(spec: &ModelSpec, n: usize, m: usize, edits: usize, samples: u64, seed: u64) -> Result<CheckReport> {
    spec.validate()?;
    check_search_size(n)?;
    let rows: Vec<(f64, f64)> = par_trials(samples, seed, |_, rng| {
        let g1 = build_instance_with(sample_er(n, m, spec.k, rng), *spec, rng).expect("valid instance");
        let removed = rng.gen_range(0..=edits.min(m));
        let mut g2 = g1.truncated(m - removed);
        for _ in 0..rng.gen_range(0..=edits) {
            let e = Hyperedge::new((0..spec.k).map(|_| rng.gen_range(0..n as u32)).collect());
            g2 = g2.with_edge(e, spec.random_sign(rng)).expect("valid edit");
        }
        let d = edge_symmetric_difference(&g1, &g2) as f64;
        let dh = (solve(&g1) - solve(&g2)).abs();
        (spec.lipschitz() * d - dh, dh)
    });
    let worst = rows.iter().map(|r| r.0).fold(f64::INFINITY, f64::min);
    let tight = rows.iter().filter(|r| same_value(r.0, 0.0) && r.1 > 0.0).count();
    let mut report = CheckReport::new("edit-distance-bound", Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("m", m)
        .param("edits", edits)
        .param("samples", samples);
    report.margin("min of L |E1 Δ E2| - |H(G1) - H(G2)|", worst, crate::exact::VALUE_TOL * (1.0 + m as f64), MarginKind::Exact);
    report.note(format!("{tight} of {samples} pairs attain the bound with equality"));
    Ok(report)
}
