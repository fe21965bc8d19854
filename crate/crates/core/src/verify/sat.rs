use std::collections::HashMap;

use num::{BigInt, BigRational, BigUint, One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::report::{CheckReport, MarginKind};
use super::stats::{par_trials, proportion};
use crate::error::{invalid, Error, Result};
use crate::exact::{for_each_assignment, is_satisfiable, SizeCaps};
use crate::hypergraph::{sample_er, sample_er_simple, simple_edge_count, Hypergraph};
use crate::models::{build_instance_with, ModelKind, ModelSpec};

/// Which random-graph ensemble a satisfiability probability refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SatEnsemble {
    /// Ordered K-tuples drawn with replacement from `[N]^K`.
    Directed,
    /// Distinct K-sets of distinct nodes, drawn without replacement.
    Simple,
}

impl SatEnsemble {
    /// Coloring defaults to the simple ensemble, the SAT models to the directed one.
    pub fn default_for(kind: ModelKind) -> Self {
        if kind == ModelKind::Coloring {
            SatEnsemble::Simple
        } else {
            SatEnsemble::Directed
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SatEnsemble::Directed => "directed",
            SatEnsemble::Simple => "simple",
        }
    }
}

/// Largest `q^N` handled by the exact satisfiability enumeration.
pub const TINY_ASSIGNMENT_LIMIT: usize = 128;
const TINY_CANDIDATE_LIMIT: usize = 100_000;
/// Largest `(reachable masks) x (candidate groups)` product in one step of the
/// dynamic programme.
pub const TINY_WORK_LIMIT: usize = 20_000_000;

fn work_check(states: usize, cands: usize) -> Result<()> {
    let work = states.saturating_mul(cands);
    if work > TINY_WORK_LIMIT {
        return Err(Error::SizeCap { what: "dynamic-programme work per step for exact satisfiability", limit: TINY_WORK_LIMIT, requested: work });
    }
    Ok(())
}

fn check_csp(spec: &ModelSpec) -> Result<()> {
    spec.validate()?;
    if !spec.kind.is_csp() {
        return Err(invalid("satisfiability is defined for coloring, K-SAT and NAE-K-SAT"));
    }
    Ok(())
}

/// Candidate edges of one insertion, grouped by the set of assignments they
/// leave satisfied: `(mask, multiplicity)`, plus the total number of candidates.
fn candidate_masks(n: usize, spec: &ModelSpec, tuples: &[Vec<u32>]) -> Vec<(u128, u64)> {
    let mut groups: HashMap<u128, u64> = HashMap::new();
    let mut buf = vec![0u8; spec.k];
    for t in tuples {
        for sign in 0..spec.sign_count() {
            let mut mask = 0u128;
            for_each_assignment(n, spec.q, |code, x| {
                for (p, &v) in t.iter().enumerate() {
                    buf[p] = x[v as usize];
                }
                if spec.edge_value(sign, &buf) > 0.0 {
                    mask |= 1u128 << code;
                }
            });
            *groups.entry(mask).or_default() += 1;
        }
    }
    let mut out: Vec<(u128, u64)> = groups.into_iter().collect();
    out.sort_unstable();
    out
}

fn tiny_size_check(n: usize, spec: &ModelSpec) -> Result<usize> {
    let states = (spec.q as f64).powi(n as i32);
    if states > TINY_ASSIGNMENT_LIMIT as f64 {
        return Err(Error::SizeCap { what: "q^N assignments for exact satisfiability", limit: TINY_ASSIGNMENT_LIMIT, requested: states as usize });
    }
    Ok(states as usize)
}

fn directed_tuples(n: usize, k: usize) -> Vec<Vec<u32>> {
    let total = n.pow(k as u32);
    (0..total)
        .map(|mut c| {
            (0..k)
                .map(|_| {
                    let v = (c % n) as u32;
                    c /= n;
                    v
                })
                .collect()
        })
        .collect()
}

fn simple_tuples(n: usize, k: usize) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = Vec::new();
    fn rec(start: u32, n: u32, k: usize, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for v in start..n {
            cur.push(v);
            rec(v + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n as u32, k, &mut cur, &mut out);
    out
}

/// Exact `p(N, M) = P(H(G(N, M)) = M)` as a rational, by dynamic programming
/// over the set of assignments that satisfy every edge drawn so far.
pub fn exact_sat_prob_tiny(n: usize, m: usize, spec: &ModelSpec, ensemble: SatEnsemble) -> Result<BigRational> {
    check_csp(spec)?;
    if n < 1 {
        return Err(invalid("N must be at least 1"));
    }
    let states = tiny_size_check(n, spec)?;
    let full: u128 = if states == 128 { u128::MAX } else { (1u128 << states) - 1 };
    let tuples = match ensemble {
        SatEnsemble::Directed => {
            if (n as f64).powi(spec.k as i32) * spec.sign_count() as f64 > TINY_CANDIDATE_LIMIT as f64 {
                return Err(Error::SizeCap { what: "candidate edges for exact satisfiability", limit: TINY_CANDIDATE_LIMIT, requested: n.pow(spec.k as u32) });
            }
            directed_tuples(n, spec.k)
        }
        SatEnsemble::Simple => {
            let available = simple_edge_count(n, spec.k);
            if m as u64 > available {
                return Err(Error::InfeasibleCount { requested: m as u64, available });
            }
            simple_tuples(n, spec.k)
        }
    };
    if m == 0 {
        return Ok(BigRational::one());
    }
    match ensemble {
        SatEnsemble::Directed => {
            let cands = candidate_masks(n, spec, &tuples);
            let per_step: u64 = cands.iter().map(|c| c.1).sum();
            let mut dist: HashMap<u128, BigUint> = HashMap::from([(full, BigUint::one())]);
            for _ in 0..m {
                work_check(dist.len(), cands.len())?;
                let mut next: HashMap<u128, BigUint> = HashMap::new();
                for (mask, count) in &dist {
                    for &(cm, mult) in &cands {
                        let nm = mask & cm;
                        if nm != 0 {
                            *next.entry(nm).or_default() += count * mult;
                        }
                    }
                }
                dist = next;
            }
            let sat: BigUint = dist.values().sum();
            let total = BigUint::from(per_step).pow(m as u32);
            Ok(BigRational::new(BigInt::from(sat), BigInt::from(total)))
        }
        SatEnsemble::Simple => {
            // edges in a fixed order, each skipped or taken with one of its signs
            let per_edge: Vec<Vec<(u128, u64)>> =
                tuples.iter().map(|t| candidate_masks(n, spec, std::slice::from_ref(t))).collect();
            let mut dist: HashMap<(u128, usize), BigUint> = HashMap::from([((full, 0usize), BigUint::one())]);
            for (i, cands) in per_edge.iter().enumerate() {
                let remaining = per_edge.len() - i - 1;
                work_check(dist.len(), cands.len())?;
                let mut next: HashMap<(u128, usize), BigUint> = HashMap::new();
                for (&(mask, taken), count) in &dist {
                    if taken + remaining >= m {
                        *next.entry((mask, taken)).or_default() += count;
                    }
                    if taken < m {
                        for &(cm, mult) in cands {
                            let nm = mask & cm;
                            if nm != 0 {
                                *next.entry((nm, taken + 1)).or_default() += count * mult;
                            }
                        }
                    }
                }
                dist = next;
            }
            let sat: BigUint = dist.iter().filter(|((_, t), _)| *t == m).map(|(_, c)| c).sum();
            let subsets = binomial_big(tuples.len() as u64, m as u64);
            let total = subsets * BigUint::from(spec.sign_count()).pow(m as u32);
            Ok(BigRational::new(BigInt::from(sat), BigInt::from(total)))
        }
    }
}

fn binomial_big(n: u64, k: u64) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn sample_graph(n: usize, m: usize, k: usize, ensemble: SatEnsemble, rng: &mut crate::rng::Rng) -> Hypergraph {
    match ensemble {
        SatEnsemble::Directed => sample_er(n, m, k, rng),
        SatEnsemble::Simple => sample_er_simple(n, m, k, rng),
    }
}

/// Monte Carlo estimate of `p(N, M)` with its binomial standard error; when
/// the exact value is computable it is reported and compared at `3 sigma`.
pub fn estimate_sat_prob(
    n: usize,
    m: usize,
    spec: &ModelSpec,
    samples: u64,
    seed: u64,
    ensemble: SatEnsemble,
) -> Result<CheckReport> {
    check_csp(spec)?;
    if n > crate::exact::SEARCH_NODE_LIMIT {
        return Err(Error::SizeCap { what: "search solver nodes", limit: crate::exact::SEARCH_NODE_LIMIT, requested: n });
    }
    if samples == 0 {
        return Err(invalid("need at least one sample"));
    }
    if ensemble == SatEnsemble::Simple && m as u64 > simple_edge_count(n, spec.k) {
        return Err(Error::InfeasibleCount { requested: m as u64, available: simple_edge_count(n, spec.k) });
    }
    let hits: Vec<bool> = par_trials(samples, seed, |_, rng| {
        let g = sample_graph(n, m, spec.k, ensemble, rng);
        let inst = build_instance_with(g, *spec, rng).expect("valid instance");
        is_satisfiable(&inst).expect("csp checked")
    });
    let successes = hits.iter().filter(|&&h| h).count() as u64;
    let (p, se) = proportion(successes, samples);
    let mut report = CheckReport::new("sat-probability", Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("m", m)
        .param("samples", samples)
        .param("ensemble", ensemble.name());
    report.estimate("p(N, M)", p, se, samples);
    match exact_sat_prob_tiny(n, m, spec, ensemble) {
        Ok(exact) => {
            let pe = exact.to_f64().unwrap_or(f64::NAN);
            report.estimate("exact p(N, M)", pe, 0.0, 0);
            report.note(format!("exact p(N, M) = {exact}"));
            let sigma = (pe * (1.0 - pe) / samples as f64).sqrt();
            report.margin("-|estimate - exact|", -(p - pe).abs(), three_sigma_or_zero(sigma), MarginKind::Statistical);
        }
        Err(Error::SizeCap { .. }) => report.note("exact value not computed: instance space above the enumeration cap"),
        Err(e) => return Err(e),
    }
    Ok(report)
}

fn three_sigma_or_zero(sigma: f64) -> f64 {
    3.0 * sigma + 1e-12
}

fn ratio_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// One-edge factor `omega` with `p(N, M+1) >= omega p(N, M)`:
/// `1 - 2^-K` (K-SAT), `1 - 2^(1-K)` (NAE-K-SAT), `(1 - 1/N) 2(N-1)/N^2` (coloring).
pub fn sat_chain_factor(n: usize, spec: &ModelSpec) -> BigRational {
    let int = |v: u64| BigRational::from_integer(BigInt::from(v));
    match spec.kind {
        ModelKind::Ksat => BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(1u64 << spec.k)),
        ModelKind::NaeKsat => BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(1u64 << (spec.k - 1))),
        _ => {
            let nn = n as u64;
            (BigRational::one() - BigRational::new(BigInt::one(), BigInt::from(nn))) * int(2 * (nn - 1))
                / int(nn * nn)
        }
    }
}

/// Exact check of `p(N, M+1) >= omega p(N, M)` for `M = 0..m_max`.
pub fn check_sat_chain(n: usize, m_max: usize, spec: &ModelSpec, ensemble: SatEnsemble) -> Result<CheckReport> {
    check_csp(spec)?;
    if spec.kind == ModelKind::Coloring && ensemble == SatEnsemble::Simple {
        return Err(invalid("the coloring chain factor is stated for the directed ensemble"));
    }
    let factor = sat_chain_factor(n, spec);
    let mut report = CheckReport::new("sat-chain", None)
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("m_max", m_max)
        .param("ensemble", ensemble.name());
    report.note(format!("factor = {factor}"));
    let mut prev = exact_sat_prob_tiny(n, 0, spec, ensemble)?;
    report.point("p(N, M)", 0.0, 1.0, 0.0);
    for m in 0..m_max {
        let next = exact_sat_prob_tiny(n, m + 1, spec, ensemble)?;
        let diff = &next - &factor * &prev;
        let value = if diff.is_zero() { 0.0 } else { ratio_f64(&diff) };
        let exact_ok = diff >= BigRational::zero();
        report.estimate(format!("p(N, {})", m + 1), ratio_f64(&next), 0.0, 0);
        report.point("p(N, M)", (m + 1) as f64, ratio_f64(&next), 0.0);
        // value is the rounded rational; the exact sign decides
        report.margin(format!("p(N, {}) - factor p(N, {m})", m + 1), if exact_ok { value.max(0.0) } else { value.min(-f64::MIN_POSITIVE) }, 0.0, MarginKind::Exact);
        prev = next;
    }
    Ok(report)
}

/// Whether `graph` is properly `q`-colorable and every proper coloring has a
/// color class of size at least `(1 - delta) N`.
pub fn delta_unusual(graph: &Hypergraph, q: usize, delta: f64, caps: &SizeCaps) -> Result<bool> {
    if graph.arity() != 2 {
        return Err(invalid("colorings are defined for graphs (K = 2)"));
    }
    if q < 2 {
        return Err(invalid("need q >= 2"));
    }
    if !(0.0..1.0).contains(&delta) {
        return Err(invalid(format!("delta must lie in [0, 1), got {delta}")));
    }
    let n = graph.n_nodes();
    caps.check(n, q, false)?;
    let threshold = (1.0 - delta) * n as f64 - 1e-9;
    let mut colorable = false;
    let mut all_large = true;
    let mut sizes = vec![0usize; q];
    for_each_assignment(n, q, |_, x| {
        if !all_large {
            return;
        }
        if graph.edges().iter().any(|e| x[e.nodes()[0] as usize] == x[e.nodes()[1] as usize]) {
            return;
        }
        colorable = true;
        sizes.iter_mut().for_each(|s| *s = 0);
        for &v in x {
            sizes[v as usize] += 1;
        }
        if (*sizes.iter().max().unwrap() as f64) < threshold {
            all_large = false;
        }
    });
    Ok(colorable && all_large)
}

/// `H(delta) = -delta ln delta - (1 - delta) ln(1 - delta)`.
pub fn entropy(delta: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.ln() } else { 0.0 };
    term(delta) + term(1.0 - delta)
}

/// Exact probability that a directed `G(N, M)` is `delta`-unusual, by
/// enumerating all `N^(2M)` graphs, against the first-moment bound
/// `(2 delta)^M e^(H(delta) N)` (lower-order term taken as 0) and the union
/// bound `sum_{|C| >= (1-delta)N} (1 - (|C|/N)^2)^M`.
pub fn unusual_probability_report(n: usize, m: usize, q: usize, delta: f64) -> Result<CheckReport> {
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let graphs = (n as f64).powi(2 * m as i32);
    if graphs > 1e6 {
        return Err(Error::SizeCap { what: "graphs enumerated for the unusual probability", limit: 1_000_000, requested: graphs as usize });
    }
    let caps = SizeCaps::default();
    let pairs: Vec<[u32; 2]> = (0..n * n).map(|c| [(c % n) as u32, (c / n) as u32]).collect();
    let total = graphs as u64;
    let mut unusual = 0u64;
    let mut idx = vec![0usize; m];
    for _ in 0..total {
        let edges = idx.iter().map(|&i| crate::hypergraph::Hyperedge::new(pairs[i].to_vec())).collect();
        let g = Hypergraph::new(n, 2, edges)?;
        if delta_unusual(&g, q, delta, &caps)? {
            unusual += 1;
        }
        for d in idx.iter_mut() {
            *d += 1;
            if *d < pairs.len() {
                break;
            }
            *d = 0;
        }
    }
    let freq = unusual as f64 / total as f64;
    let first_moment = (2.0 * delta).powi(m as i32) * (entropy(delta) * n as f64).exp();
    let smallest = ((1.0 - delta) * n as f64 - 1e-9).ceil() as usize;
    let union: f64 = (smallest..=n)
        .map(|s| binomial_big(n as u64, s as u64).to_f64().unwrap() * (1.0 - (s as f64 / n as f64).powi(2)).powi(m as i32))
        .sum();
    let c = m as f64 / n as f64;
    let beta = (2.0 * delta * (1.0 - 1.0 / q as f64)).powf(-c) * entropy(delta).exp();
    let mut report = CheckReport::new("delta-unusual", None)
        .param("n", n)
        .param("m", m)
        .param("q", q)
        .param("delta", delta)
        .param("ensemble", "directed");
    report.estimate("P(delta-unusual)", freq, 0.0, total);
    report.estimate("first-moment bound", first_moment, 0.0, 0);
    report.estimate("union bound", union, 0.0, 0);
    report.estimate("beta(delta)", beta, 0.0, 0);
    report.margin("union bound - P", union - freq, 1e-12, MarginKind::Exact);
    report.margin("first-moment bound - P (o(N) = 0)", first_moment - freq, 1e-12, MarginKind::Unquantified);
    Ok(report)
}

/// Exact check of `p(N, M+m) >= delta^m p(N, M) - (2 delta)^(M+1) e^(H(delta) N)`
/// with the lower-order term in the exponent taken as 0. For K-SAT and
/// NAE-K-SAT the stronger `p(N, M+m) >= omega^m p(N, M)` is checked as well.
pub fn check_lemma_a1(n: usize, m_base: usize, m_extra: usize, delta: f64, spec: &ModelSpec, ensemble: SatEnsemble) -> Result<CheckReport> {
    check_csp(spec)?;
    if !(delta > 0.0 && delta < 0.5) {
        return Err(invalid(format!("delta must lie in (0, 1/2), got {delta}")));
    }
    let p0 = exact_sat_prob_tiny(n, m_base, spec, ensemble)?;
    let p1 = exact_sat_prob_tiny(n, m_base + m_extra, spec, ensemble)?;
    let d = BigRational::from_float(delta).ok_or_else(|| invalid("delta is not finite"))?;
    let scaled = num::pow::pow(d, m_extra) * &p0;
    let exact_part = &p1 - &scaled;
    let bound = (2.0 * delta).powi(m_base as i32 + 1) * (entropy(delta) * n as f64).exp();
    let mut report = CheckReport::new("lemma-a1", None)
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("m_base", m_base)
        .param("m_extra", m_extra)
        .param("delta", delta)
        .param("ensemble", ensemble.name());
    report.estimate("p(N, M)", ratio_f64(&p0), 0.0, 0);
    report.estimate("p(N, M + m)", ratio_f64(&p1), 0.0, 0);
    report.estimate("(2 delta)^(M+1) e^(H(delta) N)", bound, 0.0, 0);
    report.note("lower-order term in the exponent taken as 0");
    let value = ratio_f64(&exact_part) + bound;
    let kind = if spec.kind == ModelKind::Coloring { MarginKind::Unquantified } else { MarginKind::Exact };
    report.margin("p(N, M+m) - delta^m p(N, M) + (2 delta)^(M+1) e^(H N)", value, 1e-12, kind);
    if spec.kind != ModelKind::Coloring {
        let omega = sat_chain_factor(n, spec);
        let strong = &p1 - num::pow::pow(omega, m_extra) * &p0;
        let ok = strong >= BigRational::zero();
        let v = ratio_f64(&strong);
        report.margin("p(N, M+m) - omega^m p(N, M)", if ok { v.max(0.0) } else { v.min(-f64::MIN_POSITIVE) }, 0.0, MarginKind::Exact);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::Hyperedge;

    fn rat(a: i64, b: i64) -> BigRational {
        BigRational::new(BigInt::from(a), BigInt::from(b))
    }

    #[test]
    fn no_edges_is_certain() {
        for spec in [ModelSpec::ksat(3), ModelSpec::nae_ksat(3), ModelSpec::coloring(3)] {
            assert_eq!(exact_sat_prob_tiny(3, 0, &spec, SatEnsemble::Directed).unwrap(), BigRational::one());
        }
    }

    #[test]
    fn two_sat_single_clause() {
        // any single clause is satisfiable: some assignment differs from the sign tuple
        let p = exact_sat_prob_tiny(2, 1, &ModelSpec::ksat(2), SatEnsemble::Directed).unwrap();
        assert_eq!(p, BigRational::one());
        // two clauses on (i, i) with opposite diagonal signs kill x_i = 0 and x_i = 1
        let p2 = exact_sat_prob_tiny(2, 2, &ModelSpec::ksat(2), SatEnsemble::Directed).unwrap();
        assert!(p2 < BigRational::one());
    }

    #[test]
    fn two_coloring_single_edge() {
        let simple = exact_sat_prob_tiny(2, 1, &ModelSpec::coloring(2), SatEnsemble::Simple).unwrap();
        assert_eq!(simple, BigRational::one());
        // directed: the two loops out of four tuples are not colorable
        let directed = exact_sat_prob_tiny(2, 1, &ModelSpec::coloring(2), SatEnsemble::Directed).unwrap();
        assert_eq!(directed, rat(1, 2));
    }

    #[test]
    fn unusual_examples() {
        let caps = SizeCaps::default();
        let edgeless = Hypergraph::edgeless(4, 2).unwrap();
        assert!(!delta_unusual(&edgeless, 2, 0.25, &caps).unwrap());
        let single = Hypergraph::new(2, 2, vec![Hyperedge::new(vec![0, 1])]).unwrap();
        assert!(!delta_unusual(&single, 2, 0.4, &caps).unwrap());
        // star K_{1,3}: colorings split 1 + 3, so the big class has 3 >= 0.75 * 4
        let star = Hypergraph::new(4, 2, (1..4).map(|v| Hyperedge::new(vec![0, v])).collect()).unwrap();
        assert!(delta_unusual(&star, 2, 0.25, &caps).unwrap());
    }

    /// Satisfiability of an explicit clause list by trying every assignment.
    fn brute_sat(n: usize, spec: &ModelSpec, clauses: &[(Vec<u32>, u32)]) -> bool {
        let mut found = false;
        for_each_assignment(n, spec.q, |_, x| {
            let ok = clauses.iter().all(|(t, s)| {
                let vals: Vec<u8> = t.iter().map(|&v| x[v as usize]).collect();
                spec.edge_value(*s, &vals) > 0.0
            });
            found |= ok;
        });
        found
    }

    /// Counts satisfiable sequences among all `(tuple, sign)^M` sequences.
    fn brute_directed(n: usize, m: usize, spec: &ModelSpec) -> BigRational {
        let cands: Vec<(Vec<u32>, u32)> = directed_tuples(n, spec.k)
            .into_iter()
            .flat_map(|t| (0..spec.sign_count()).map(move |s| (t.clone(), s)))
            .collect();
        let total = cands.len().pow(m as u32);
        let mut sat = 0i64;
        for mut code in 0..total {
            let seq: Vec<(Vec<u32>, u32)> = (0..m)
                .map(|_| {
                    let c = cands[code % cands.len()].clone();
                    code /= cands.len();
                    c
                })
                .collect();
            sat += i64::from(brute_sat(n, spec, &seq));
        }
        rat(sat, total as i64)
    }

    /// Same over unordered sets of `M` distinct simple edges, each with a sign.
    fn brute_simple(n: usize, m: usize, spec: &ModelSpec) -> BigRational {
        let edges = simple_tuples(n, spec.k);
        let s = spec.sign_count() as usize;
        let (mut sat, mut total) = (0i64, 0i64);
        for subset in 0u32..(1 << edges.len()) {
            if subset.count_ones() as usize != m {
                continue;
            }
            let chosen: Vec<&Vec<u32>> = edges.iter().enumerate().filter(|(i, _)| subset >> i & 1 == 1).map(|(_, e)| e).collect();
            for mut signs in 0..s.pow(m as u32) {
                let seq: Vec<(Vec<u32>, u32)> = chosen
                    .iter()
                    .map(|e| {
                        let sg = (signs % s) as u32;
                        signs /= s;
                        ((*e).clone(), sg)
                    })
                    .collect();
                sat += i64::from(brute_sat(n, spec, &seq));
                total += 1;
            }
        }
        rat(sat, total)
    }

    #[test]
    fn dynamic_programme_matches_brute_force() {
        let cases = [
            (2, 2, ModelSpec::ksat(2)),
            (3, 2, ModelSpec::ksat(2)),
            (2, 3, ModelSpec::ksat(2)),
            (3, 2, ModelSpec::nae_ksat(2)),
            (3, 1, ModelSpec::ksat(3)),
            (3, 3, ModelSpec::coloring(2)),
            (3, 2, ModelSpec::coloring(3)),
        ];
        for (n, m, spec) in cases {
            assert_eq!(exact_sat_prob_tiny(n, m, &spec, SatEnsemble::Directed).unwrap(), brute_directed(n, m, &spec), "{spec:?} n={n} m={m}");
        }
        let simple = [(3, 2, ModelSpec::ksat(2)), (4, 3, ModelSpec::coloring(2)), (4, 2, ModelSpec::nae_ksat(3)), (3, 3, ModelSpec::coloring(2))];
        for (n, m, spec) in simple {
            assert_eq!(exact_sat_prob_tiny(n, m, &spec, SatEnsemble::Simple).unwrap(), brute_simple(n, m, &spec), "{spec:?} n={n} m={m}");
        }
        // a triangle is the only 3-edge simple graph on 3 nodes and it is not 2-colorable
        assert!(exact_sat_prob_tiny(3, 3, &ModelSpec::coloring(2), SatEnsemble::Simple).unwrap().is_zero());
    }

    #[test]
    fn chain_and_lemma_on_tiny_grid() {
        for spec in [ModelSpec::ksat(2), ModelSpec::nae_ksat(3)] {
            assert!(check_sat_chain(3, 3, &spec, SatEnsemble::Directed).unwrap().passed());
        }
        assert!(check_sat_chain(3, 2, &ModelSpec::coloring(2), SatEnsemble::Directed).unwrap().passed());
        assert!(check_sat_chain(3, 2, &ModelSpec::coloring(2), SatEnsemble::Simple).is_err());
        let r = check_lemma_a1(3, 1, 0, 0.25, &ModelSpec::ksat(2), SatEnsemble::Directed).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn entropy_values() {
        assert!((entropy(0.5) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(entropy(0.0), 0.0);
    }
}
