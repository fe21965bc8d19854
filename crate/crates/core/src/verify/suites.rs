//! Batch runs of the exact one-step and chain checks over random small instances.

use rand::Rng as _;

use super::report::{CheckReport, MarginKind};
use super::stats::par_trials;
use crate::error::{invalid, Error, Result};
use crate::exact::{edge_addition_value, log_partition, SizeCaps};
use crate::hypergraph::{project, sample_config_partial, sample_er, Hyperedge};
use crate::interpolate::{check_regular_split, er_onestep_exact, reg_chain_run, reg_onestep_exact, StepMode};
use crate::models::{build_instance_with, ModelKind, ModelSpec};
use crate::rng::{derive_seed, Rng};

/// Smallest value and the trial that produced it.
#[derive(Clone, Copy)]
struct Worst {
    value: f64,
    trial: u64,
}

impl Worst {
    fn new() -> Self {
        Worst { value: f64::INFINITY, trial: 0 }
    }

    fn push(&mut self, value: f64, trial: u64) {
        if value < self.value || value.is_nan() {
            self.value = value;
            self.trial = trial;
        }
    }
}

fn first_error<T>(results: Vec<Result<T>>) -> Result<Vec<T>> {
    results.into_iter().collect()
}

fn check_sizes(n_max: usize, m_max: usize) -> Result<()> {
    if n_max < 2 {
        return Err(invalid("need n_max >= 2"));
    }
    if m_max > 64 {
        return Err(invalid("m_max above 64 is outside the small-instance regime"));
    }
    Ok(())
}

/// Runs [`er_onestep_exact`] on `instances` random `G0` with `2 <= N <= n_max`,
/// `0 <= M <= m_max` and a uniform split. Trial `i` uses stream `i` of `seed`.
/// Asserts the enumerated step matches the closed form to `1e-12`, the margin is
/// `>= -1e-12`, and (log-partition mode) the series agrees with the closed form
/// to `1e-9`.
pub fn onestep_er_suite(spec: &ModelSpec, instances: u64, n_max: usize, m_max: usize, mode: StepMode, seed: u64) -> Result<CheckReport> {
    spec.validate()?;
    check_sizes(n_max, m_max)?;
    let caps = SizeCaps::default();
    let runs = first_error(par_trials(instances, seed, |_, rng| {
        let n = rng.gen_range(2..=n_max);
        let m = rng.gen_range(0..=m_max);
        let n1 = rng.gen_range(1..n);
        let g0 = build_instance_with(sample_er(n, m, spec.k, rng), *spec, rng)?;
        er_onestep_exact(&g0, n1, mode, &caps)
    }))?;
    let mut report = CheckReport::new("onestep-er-suite", Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("mode", mode)
        .param("instances", instances)
        .param("n_max", n_max)
        .param("m_max", m_max);
    let (mut formula, mut margin, mut series, mut sat) = (Worst::new(), Worst::new(), Worst::new(), Worst::new());
    let mut sat_count = 0u64;
    for (i, r) in runs.iter().enumerate() {
        let i = i as u64;
        match &r.formula {
            Some(f) => formula.push(-f.error, i),
            None => formula.push(f64::NEG_INFINITY, i),
        }
        margin.push(r.margin, i);
        if let Some(s) = &r.log_series {
            series.push(-s.error, i);
        }
        if let Some(s) = &r.sat {
            sat.push(s.margin, i);
            sat_count += 1;
        }
    }
    if instances > 0 {
        report.margin("-(closed form error)", formula.value, 1e-12, MarginKind::Exact);
        report.note(format!("largest closed-form error at trial {}", formula.trial));
        report.margin("min lhs - rhs", margin.value, 1e-12, MarginKind::Exact);
        report.note(format!("smallest margin at trial {}", margin.trial));
        if matches!(mode, StepMode::LogPartition { .. }) {
            report.margin("-(series error)", series.value, 1e-9, MarginKind::Exact);
        }
        if sat_count > 0 {
            report.margin("min satisfiable-step margin", sat.value, 1e-12, MarginKind::Exact);
            report.note(format!("{sat_count} satisfiable base instances"));
        }
    }
    Ok(report)
}

/// Compares the brute-force `H(G + e)` with the three-case level rule for
/// every one of the `N^2` candidate edges of `instances` random Ising
/// instances; `beta` and `B` are drawn from the given lists.
pub fn ising_lemma_suite(instances: u64, n_max: usize, betas: &[f64], fields: &[f64], seed: u64) -> Result<CheckReport> {
    check_sizes(n_max, 0)?;
    if betas.is_empty() || fields.is_empty() {
        return Err(invalid("need at least one beta and one field value"));
    }
    let caps = SizeCaps::default();
    let rows = first_error(par_trials(instances, seed, |_, rng| {
        let n = rng.gen_range(2..=n_max);
        let m = rng.gen_range(0..=2 * n);
        let spec = ModelSpec::ising(betas[rng.gen_range(0..betas.len())], fields[rng.gen_range(0..fields.len())]);
        let inst = build_instance_with(sample_er(n, m, 2, rng), spec, rng)?;
        let mut mismatches = 0u64;
        let mut cases = std::collections::BTreeMap::<&'static str, u64>::new();
        for i in 0..n as u32 {
            for k in 0..n as u32 {
                let add = edge_addition_value(&inst, &Hyperedge::new(vec![i, k]), 0, &caps)?;
                mismatches += u64::from(!add.agrees());
                *cases.entry(add.case).or_default() += 1;
            }
        }
        Ok((mismatches, (n * n) as u64, cases))
    }))?;
    let mut report = CheckReport::new("ising-lemma-suite", Some(seed))
        .param("instances", instances)
        .param("n_max", n_max)
        .param("betas", betas)
        .param("fields", fields);
    let mut total = 0u64;
    let mut mismatches = 0u64;
    let mut cases = std::collections::BTreeMap::<&'static str, u64>::new();
    for (i, (mm, count, c)) in rows.iter().enumerate() {
        total += count;
        mismatches += mm;
        if *mm > 0 {
            report.note(format!("trial {i}: {mm} mismatches"));
        }
        for (k, v) in c {
            *cases.entry(k).or_default() += v;
        }
    }
    report.estimate("candidate edges", total as f64, 0.0, total);
    for (case, count) in cases {
        report.estimate(format!("case: {case}"), count as f64, 0.0, count);
    }
    report.margin("-mismatches", -(mismatches as f64), 0.0, MarginKind::Exact);
    Ok(report)
}

/// Checks `Z(G) >= Z(G + e) >= Z(G) / (1 + lambda)` for every candidate edge
/// of `instances` random independent-set instances and every `lambda`.
pub fn logz_sandwich_suite(instances: u64, n_max: usize, m_max: usize, lambdas: &[f64], seed: u64) -> Result<CheckReport> {
    check_sizes(n_max, m_max)?;
    if lambdas.is_empty() || lambdas.iter().any(|&l| !(l > 0.0 && l.is_finite())) {
        return Err(invalid("lambdas must be positive and finite"));
    }
    let caps = SizeCaps::default();
    let spec = ModelSpec::independent_set();
    let rows = first_error(par_trials(instances, seed, |_, rng| {
        let n = rng.gen_range(2..=n_max);
        let m = rng.gen_range(0..=m_max);
        let inst = build_instance_with(sample_er(n, m, 2, rng), spec, rng)?;
        let mut upper = f64::INFINITY;
        let mut lower = f64::INFINITY;
        for &lambda in lambdas {
            let z = log_partition(&inst, lambda, &caps)?;
            for i in 0..n as u32 {
                for k in 0..n as u32 {
                    let plus = inst.with_edge(Hyperedge::new(vec![i, k]), 0)?;
                    let zp = log_partition(&plus, lambda, &caps)?;
                    upper = upper.min(z - zp);
                    lower = lower.min(zp - z + lambda.ln_1p());
                }
            }
        }
        Ok((upper, lower))
    }))?;
    let mut report = CheckReport::new("logz-sandwich-suite", Some(seed))
        .param("instances", instances)
        .param("n_max", n_max)
        .param("m_max", m_max)
        .param("lambdas", lambdas);
    let (mut up, mut lo) = (Worst::new(), Worst::new());
    for (i, &(u, l)) in rows.iter().enumerate() {
        up.push(u, i as u64);
        lo.push(l, i as u64);
    }
    if instances > 0 {
        report.margin("min ln Z(G) - ln Z(G+e)", up.value, 1e-12, MarginKind::Exact);
        report.margin("min ln Z(G+e) - ln Z(G) + ln(1 + lambda)", lo.value, 1e-12, MarginKind::Exact);
    }
    Ok(report)
}

/// Runs the regular-graph chain `runs` times (run `i` seeded with
/// `derive_seed(seed, i)`) and checks the isolated-clone bookkeeping, the
/// freeze after a failure, and, by a chi-square test per phase, that the
/// insertion lands in part 1 with probability `K1 / K`.
pub fn reg_chain_suite(runs: u64, n: usize, n1: usize, r: usize, k: usize, t_override: Option<usize>, seed: u64) -> Result<CheckReport> {
    check_regular_split(n, n1, r, k)?;
    let traces = first_error(par_trials(runs, seed, |i, _| reg_chain_run(n, n1, r, k, t_override, derive_seed(seed, i))))?;
    let mut report = CheckReport::new("reg-chain-suite", Some(seed))
        .param("runs", runs)
        .param("n", n)
        .param("n1", n1)
        .param("r", r)
        .param("k", k)
        .param("t_override", t_override);
    let mut bookkeeping = 0u64;
    let mut freeze = 0u64;
    let mut failures = 0u64;
    let mut repeated = 0u64;
    // (successful steps, part-1 insertions) per phase k1
    let mut counts = vec![(0u64, 0u64); k];
    for (i, tr) in traces.iter().enumerate() {
        if let Err(msg) = tr.verify_bookkeeping() {
            bookkeeping += 1;
            report.note(format!("run {i}: {msg}"));
        }
        let replayed = tr.state_at(usize::MAX);
        let frozen = match tr.failed_at {
            Some(t) => {
                failures += 1;
                tr.steps.last().map(|s| s.t) == Some(t)
                    && tr.steps.last().map(|s| s.side.is_none()) == Some(true)
                    && tr.state_at(t) == replayed
                    && tr.state_at(t.saturating_sub(1)) == replayed
            }
            None => tr.steps.len() == tr.t0(),
        };
        if !frozen || replayed != tr.final_state {
            freeze += 1;
            report.note(format!("run {i}: final state does not match the replayed chain"));
        }
        for st in &tr.steps {
            repeated += u64::from(st.repeated_node);
            if let Some(side) = st.side {
                let c = &mut counts[st.phase.0];
                c.0 += 1;
                c.1 += u64::from(side == 1);
            }
        }
    }
    let mut chi2 = 0.0;
    let mut df = 0usize;
    for (k1, &(total, part1)) in counts.iter().enumerate().skip(1) {
        if total == 0 {
            continue;
        }
        let p = k1 as f64 / k as f64;
        let expected = total as f64 * p;
        chi2 += (part1 as f64 - expected).powi(2) / (expected * (1.0 - p));
        df += 1;
        report.estimate(format!("P(part 1 | phase ({k1}, {}))", k - k1), part1 as f64 / total as f64, (p * (1.0 - p) / total as f64).sqrt(), total);
    }
    report.estimate("failed runs", failures as f64, 0.0, runs);
    report.estimate("same-node insertions", repeated as f64, 0.0, 0);
    report.margin("-(bookkeeping violations)", -(bookkeeping as f64), 0.0, MarginKind::Exact);
    report.margin("-(freeze violations)", -(freeze as f64), 0.0, MarginKind::Exact);
    if df > 0 {
        report.estimate("chi-square", chi2, 0.0, df as u64);
        report.margin("df - chi-square", df as f64 - chi2, 3.0 * (2.0 * df as f64).sqrt(), MarginKind::Statistical);
    }
    Ok(report)
}

/// One random small configuration for the regular one-step check.
fn regular_config(rng: &mut Rng) -> (ModelSpec, usize, usize, usize) {
    loop {
        let kinds = [ModelKind::IndependentSet, ModelKind::MaxCut, ModelKind::Ising, ModelKind::Coloring, ModelKind::Ksat, ModelKind::NaeKsat];
        let mut spec = ModelSpec::default_for(kinds[rng.gen_range(0..kinds.len())]);
        match spec.kind {
            ModelKind::Ising => spec.field = [0.0, 0.3][rng.gen_range(0..2)],
            ModelKind::Coloring => spec.q = 3,
            ModelKind::Ksat | ModelKind::NaeKsat => spec.k = rng.gen_range(2..=3),
            _ => {}
        }
        let n = rng.gen_range(4..=8);
        let r = rng.gen_range(2..=3);
        let n1 = rng.gen_range(1..n);
        if check_regular_split(n, n1, r, spec.k).is_ok() {
            return (spec, n, n1, r);
        }
    }
}

/// Runs [`reg_onestep_exact`] on `configs` random partial matchings and
/// asserts `lhs - rhs >= -computed_correction` in each.
pub fn reg_onestep_suite(configs: u64, seed: u64) -> Result<CheckReport> {
    let caps = SizeCaps::default();
    let rows = first_error(par_trials(configs, seed, |_, rng| {
        loop {
            let (spec, n, n1, r) = regular_config(rng);
            let k = spec.k;
            let t = rng.gen_range(0..=n * r / k);
            let state = sample_config_partial(n, r, k, t, rng)?;
            let g0 = build_instance_with(project(&state), spec, rng)?;
            let k1 = rng.gen_range(1..k);
            match reg_onestep_exact(&state, &g0, n1, (k1, k - k1), StepMode::GroundState, &caps) {
                Err(Error::PremiseViolation(_)) => continue,
                other => return other.map(|res| (spec, n, n1, r, t, res)),
            }
        }
    }))?;
    let mut report = CheckReport::new("reg-onestep-suite", Some(seed)).param("configs", configs);
    let mut worst = Worst::new();
    let mut analytic = Worst::new();
    let mut negative_raw = 0u64;
    for (i, (_, _, _, _, _, res)) in rows.iter().enumerate() {
        let reg = res.regular.as_ref().expect("regular step data");
        worst.push(res.margin + reg.computed_correction, i as u64);
        analytic.push(reg.analytic_correction - reg.computed_correction, i as u64);
        negative_raw += u64::from(res.margin < -1e-12);
    }
    if let Some((spec, n, n1, r, t, _)) = rows.get(worst.trial as usize) {
        report.note(format!("tightest: trial {} {} N={n} N1={n1} r={r} T={t}", worst.trial, spec.kind.name()));
    }
    report.estimate("configurations with negative raw margin", negative_raw as f64, 0.0, configs);
    if configs > 0 {
        report.margin("min lhs - rhs + computed correction", worst.value, 1e-12, MarginKind::Exact);
        report.margin("min analytic - computed correction", analytic.value, 1e-12, MarginKind::Exact);
    }
    Ok(report)
}
