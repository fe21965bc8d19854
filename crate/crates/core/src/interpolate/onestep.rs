use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::exact::{for_each_assignment, levels_from_table, summary_from_table, value_table, GroundStateSummary, IsingLevels, SizeCaps, WeightTable};
use crate::hypergraph::{project, ConfigurationState};
use crate::models::{Instance, ModelKind, ModelSpec};

/// Which functional a one-step comparison averages.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum StepMode {
    /// `H(G)`.
    GroundState,
    /// `ln Z(G)` at fugacity `lambda`.
    LogPartition { lambda: f64 },
}

/// Closed-form predictions next to the enumerated values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FormulaCheck {
    pub lhs: f64,
    pub rhs: f64,
    /// `max(|lhs_direct - lhs|, |rhs_direct - rhs|)`.
    pub error: f64,
}

/// Probability of staying satisfiable after one insertion, for a satisfied `G0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatStep {
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// The log-partition step evaluated as `-sum_k theta^k / k * E[mu^k]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogSeries {
    pub theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub terms: usize,
    /// Bound on the truncated tail.
    pub tail_bound: f64,
    /// Largest deviation from the closed form `ln(1 - theta mu)`.
    pub error: f64,
}

/// Extra quantities of the clone-weighted (regular-graph) step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularStep {
    pub phase: (usize, usize),
    pub isolated: (usize, usize),
    pub lhs_with_replacement: f64,
    pub rhs_with_replacement: f64,
    pub margin_with_replacement: f64,
    /// `2 L`-style bound: total variation between drawing clones with and
    /// without replacement, times the range of the functional.
    pub analytic_correction: f64,
    /// `|lhs - lhs_wr| + |rhs - rhs_wr|`.
    pub computed_correction: f64,
}

/// One conditional step: exact expectations of the functional after inserting
/// one random edge into `G0`, over the whole node set (`lhs`) and over the
/// split (`rhs`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErStepResult {
    pub model: ModelKind,
    pub n: usize,
    pub n1: usize,
    pub mode: StepMode,
    pub base_instance: Instance,
    /// `H(G0)` or `ln Z(G0)`.
    pub base_value: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub candidates: usize,
    pub formula: Option<FormulaCheck>,
    pub sat: Option<SatStep>,
    pub log_series: Option<LogSeries>,
    pub regular: Option<RegularStep>,
    /// Classes used by the closed forms, as 1-based labels.
    pub classes: Vec<Vec<usize>>,
}

/// Value of the functional after inserting each candidate node tuple,
/// averaged over the inserted edge's sign tuple.
pub(crate) struct TupleTable {
    pub n: usize,
    pub k: usize,
    /// `E_sign f(G0 + e)` by tuple code (node at position `p` is digit `p` in base N).
    pub values: Vec<f64>,
    /// `P_sign(H(G0 + e) > H(G0))` (ground-state mode).
    pub increase: Vec<f64>,
    /// `mu_0(bad_e)` per tuple and sign (log-partition mode).
    pub bad_mass: Vec<Vec<f64>>,
    pub base_value: f64,
    pub summary: GroundStateSummary,
    pub levels: Option<IsingLevels>,
}

impl TupleTable {
    pub fn nodes(&self, code: usize) -> Vec<usize> {
        let mut c = code;
        (0..self.k)
            .map(|_| {
                let v = c % self.n;
                c /= self.n;
                v
            })
            .collect()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }
}

pub(crate) fn check_mode(spec: &ModelSpec, mode: StepMode) -> Result<()> {
    if let StepMode::LogPartition { lambda } = mode {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(invalid(format!("lambda must be positive and finite, got {lambda}")));
        }
        if spec.kind != ModelKind::IndependentSet && lambda <= 1.0 {
            return Err(invalid(format!("the log-partition step for {} needs lambda > 1, got {lambda}", spec.kind)));
        }
    }
    Ok(())
}

fn tuple_count(n: usize, k: usize) -> Result<usize> {
    let total = (n as f64).powi(k as i32);
    if total > 1e6 {
        return Err(Error::SizeCap { what: "candidate tuples N^K", limit: 1_000_000, requested: total as usize });
    }
    Ok(n.pow(k as u32))
}

pub(crate) fn tuple_table(inst: &Instance, mode: StepMode, caps: &SizeCaps) -> Result<TupleTable> {
    let spec = *inst.spec();
    check_mode(&spec, mode)?;
    let (n, q, k) = (inst.n_nodes(), spec.q, spec.k);
    let count = tuple_count(n, k)?;
    let table = value_table(inst, caps)?;
    let summary = summary_from_table(inst, &table);
    let levels = (spec.kind == ModelKind::Ising).then(|| levels_from_table(inst, &table));
    let weights = match mode {
        StepMode::LogPartition { lambda } => Some(WeightTable::from_values(n, q, &table, lambda.ln())),
        StepMode::GroundState => None,
    };
    let h0 = summary.value.as_f64();
    let n_patterns = q.pow(k as u32);
    let n_signs = spec.sign_count();

    // edge potential and badness by (sign, pattern)
    let mut psi = vec![vec![0.0; n_patterns]; n_signs as usize];
    let mut bad = vec![vec![false; n_patterns]; n_signs as usize];
    let mut buf = vec![0u8; k];
    for s in 0..n_signs {
        for p in 0..n_patterns {
            let mut c = p;
            for b in buf.iter_mut() {
                *b = (c % q) as u8;
                c /= q;
            }
            let v = spec.edge_value(s, &buf);
            psi[s as usize][p] = v;
            bad[s as usize][p] = v == spec.edge_value_min();
        }
    }

    let mut values = Vec::with_capacity(count);
    let mut increase = Vec::with_capacity(count);
    let mut bad_mass = Vec::with_capacity(if weights.is_some() { count } else { 0 });
    let mut best = vec![f64::NEG_INFINITY; n_patterns];
    let mut mass = vec![0.0; n_patterns];
    let mut nodes = vec![0usize; k];
    for code in 0..count {
        let mut c = code;
        for v in nodes.iter_mut() {
            *v = c % n;
            c /= n;
        }
        best.iter_mut().for_each(|b| *b = f64::NEG_INFINITY);
        mass.iter_mut().for_each(|m| *m = 0.0);
        for_each_assignment(n, q, |xc, x| {
            let mut p = 0;
            for &v in nodes.iter().rev() {
                p = p * q + x[v] as usize;
            }
            if table[xc] > best[p] {
                best[p] = table[xc];
            }
            if let Some(w) = &weights {
                mass[p] += w.probs[xc];
            }
        });
        let mut acc = 0.0;
        let mut inc = 0.0;
        let mut bads = Vec::new();
        for s in 0..n_signs as usize {
            match (mode, &weights) {
                (StepMode::LogPartition { lambda }, Some(w)) => {
                    let ln_l = lambda.ln();
                    let mut z = 0.0;
                    let mut b = 0.0;
                    for p in 0..n_patterns {
                        if mass[p] > 0.0 && psi[s][p] > f64::NEG_INFINITY {
                            z += mass[p] * (psi[s][p] * ln_l).exp();
                        }
                        if bad[s][p] {
                            b += mass[p];
                        }
                    }
                    acc += w.log_z + z.ln();
                    bads.push(b);
                }
                _ => {
                    let h = (0..n_patterns).map(|p| best[p] + psi[s][p]).fold(f64::NEG_INFINITY, f64::max);
                    acc += h;
                    if h > h0 && !crate::exact::same_value(h, h0) {
                        inc += 1.0;
                    }
                }
            }
        }
        values.push(acc / n_signs as f64);
        increase.push(inc / n_signs as f64);
        if weights.is_some() {
            bad_mass.push(bads);
        }
    }
    let base_value = match &weights {
        Some(w) => w.log_z,
        None => h0,
    };
    Ok(TupleTable { n, k, values, increase, bad_mass, base_value, summary, levels })
}

/// Fractions `|class ∩ block| / |block|` of each class.
fn fractions(classes: &[Vec<usize>], lo: usize, size: usize) -> Vec<f64> {
    classes
        .iter()
        .map(|c| c.iter().filter(|&&v| v >= lo && v < lo + size).count() as f64 / size as f64)
        .collect()
}

/// Closed-form expected change `E[H(G0 + e)] - H(G0)` for an edge uniform on `block^K`.
fn delta_formula(spec: &ModelSpec, t: &TupleTable, lo: usize, size: usize) -> f64 {
    let k = spec.k as i32;
    let s = &t.summary;
    match spec.kind {
        ModelKind::IndependentSet => {
            let f = fractions(&[s.frozen_set.clone()], lo, size)[0];
            -f * f
        }
        ModelKind::MaxCut | ModelKind::Coloring => 1.0 - fractions(&s.classes, lo, size).iter().map(|f| f * f).sum::<f64>(),
        ModelKind::Ksat => {
            let f = fractions(&[s.frozen_set.clone()], lo, size)[0];
            1.0 - f.powi(k) / 2f64.powi(k)
        }
        ModelKind::NaeKsat => {
            1.0 - 2.0 / 2f64.powi(k) * fractions(&s.classes, lo, size).iter().map(|f| f.powi(k)).sum::<f64>()
        }
        ModelKind::Ising => {
            let lv = t.levels.as_ref().expect("Ising levels");
            let beta = spec.beta;
            let h0 = lv.levels[0];
            let sm: Vec<f64> =
                lv.partitions.iter().map(|p| fractions(p, lo, size).iter().map(|f| f * f).sum::<f64>()).collect();
            let m = lv.cutoff;
            let mut e = (h0 + beta) * (1.0 - sm[0]);
            for j in 0..m {
                e += (lv.levels[j + 1] + beta) * (sm[j] - sm[j + 1]);
            }
            e += (h0 - beta) * sm[m];
            e - h0
        }
    }
}

fn in_block(nodes: &[usize], lo: usize, size: usize) -> bool {
    nodes.iter().all(|&v| v >= lo && v < lo + size)
}

/// Averages of a per-tuple quantity: over all tuples, and the split mixture.
fn whole_and_split(t: &TupleTable, n1: usize, f: impl Fn(usize) -> f64) -> (f64, f64) {
    let n = t.n;
    let mut all = 0.0;
    let (mut s1, mut c1, mut s2, mut c2) = (0.0, 0usize, 0.0, 0usize);
    for code in 0..t.len() {
        let v = f(code);
        all += v;
        let nodes = t.nodes(code);
        if in_block(&nodes, 0, n1) {
            s1 += v;
            c1 += 1;
        } else if in_block(&nodes, n1, n - n1) {
            s2 += v;
            c2 += 1;
        }
    }
    let w1 = n1 as f64 / n as f64;
    (all / t.len() as f64, w1 * s1 / c1 as f64 + (1.0 - w1) * s2 / c2 as f64)
}

fn log_constants(spec: &ModelSpec, lambda: f64) -> (f64, f64) {
    // (H_max ln lambda, theta)
    match spec.kind {
        ModelKind::IndependentSet => (0.0, 1.0),
        _ => {
            let gap = spec.edge_value_max() - spec.edge_value_min();
            (spec.edge_value_max() * lambda.ln(), 1.0 - lambda.powf(-gap))
        }
    }
}

/// `-sum_{k>=1} theta^k/k * mean(mu^k)`, summed until the tail bound drops below `1e-13`.
fn log_series(theta: f64, mus: &[f64]) -> (f64, usize, f64) {
    let mu_max = mus.iter().copied().fold(0.0, f64::max);
    let rho = theta.abs() * mu_max;
    if rho == 0.0 {
        return (0.0, 0, 0.0);
    }
    let mut powers: Vec<f64> = mus.to_vec();
    let mut sum = 0.0;
    let mut tp = 1.0;
    let mut terms = 0;
    let mut tail = f64::INFINITY;
    while terms < 200_000 {
        terms += 1;
        tp *= theta;
        let moment = powers.iter().sum::<f64>() / powers.len() as f64;
        sum -= tp / terms as f64 * moment;
        for (p, &m) in powers.iter_mut().zip(mus) {
            *p *= m;
        }
        tail = rho.powi(terms as i32 + 1) / ((terms + 1) as f64 * (1.0 - rho));
        if tail < 1e-13 {
            break;
        }
    }
    (sum, terms, tail)
}

/// Exact one-step comparison on the Erdős–Rényi chain, conditional on `G0`:
/// the inserted edge is uniform on `[N]^K` (lhs) or, with probability `N_l/N`,
/// uniform inside block `l` (rhs). Sign tuples are averaged exactly.
pub fn er_onestep_exact(g0: &Instance, n1: usize, mode: StepMode, caps: &SizeCaps) -> Result<ErStepResult> {
    let n = g0.n_nodes();
    if n1 < 1 || n1 >= n {
        return Err(invalid(format!("N1 = {n1} must lie in 1..={}", n.saturating_sub(1))));
    }
    let spec = *g0.spec();
    let t = tuple_table(g0, mode, caps)?;
    let (lhs, rhs) = whole_and_split(&t, n1, |c| t.values[c]);
    let mut result = ErStepResult {
        model: spec.kind,
        n,
        n1,
        mode,
        base_instance: g0.clone(),
        base_value: t.base_value,
        lhs,
        rhs,
        margin: lhs - rhs,
        candidates: t.len() * spec.sign_count() as usize,
        formula: None,
        sat: None,
        log_series: None,
        regular: None,
        classes: crate::exact::to_labels(&t.summary.classes),
    };
    match mode {
        StepMode::GroundState => {
            let h0 = t.base_value;
            let fl = h0 + delta_formula(&spec, &t, 0, n);
            let w1 = n1 as f64 / n as f64;
            let fr = h0 + w1 * delta_formula(&spec, &t, 0, n1) + (1.0 - w1) * delta_formula(&spec, &t, n1, n - n1);
            result.formula = Some(FormulaCheck { lhs: fl, rhs: fr, error: (lhs - fl).abs().max((rhs - fr).abs()) });
            let m0 = g0.graph().n_edges() as f64;
            if spec.kind.is_csp() && crate::exact::same_value(h0, m0) {
                let (sl, sr) = whole_and_split(&t, n1, |c| t.increase[c]);
                result.sat = Some(SatStep { lhs: sl, rhs: sr, margin: sl - sr });
            }
        }
        StepMode::LogPartition { lambda } => {
            let (shift, theta) = log_constants(&spec, lambda);
            let base = t.base_value + shift;
            let closed = |c: usize| {
                let b = &t.bad_mass[c];
                b.iter().map(|&mu| base + (1.0 - theta * mu).ln()).sum::<f64>() / b.len() as f64
            };
            let (fl, fr) = whole_and_split(&t, n1, closed);
            result.formula = Some(FormulaCheck { lhs: fl, rhs: fr, error: (lhs - fl).abs().max((rhs - fr).abs()) });
            result.log_series = Some(series_check(&t, n1, theta, base, fl, fr));
        }
    }
    Ok(result)
}

fn series_check(t: &TupleTable, n1: usize, theta: f64, base: f64, fl: f64, fr: f64) -> LogSeries {
    let n = t.n;
    let mut all = Vec::new();
    let (mut b1, mut b2) = (Vec::new(), Vec::new());
    for code in 0..t.len() {
        let nodes = t.nodes(code);
        for &mu in &t.bad_mass[code] {
            all.push(mu);
            if in_block(&nodes, 0, n1) {
                b1.push(mu);
            } else if in_block(&nodes, n1, n - n1) {
                b2.push(mu);
            }
        }
    }
    let (sa, ta, tail_a) = log_series(theta, &all);
    let (s1, t1, tail_1) = log_series(theta, &b1);
    let (s2, t2, tail_2) = log_series(theta, &b2);
    let w1 = n1 as f64 / n as f64;
    let lhs = base + sa;
    let rhs = base + w1 * s1 + (1.0 - w1) * s2;
    LogSeries {
        theta,
        lhs,
        rhs,
        terms: ta.max(t1).max(t2),
        tail_bound: tail_a.max(tail_1).max(tail_2),
        error: (lhs - fl).abs().max((rhs - fr).abs()),
    }
}

fn falling(z: usize, m: usize) -> f64 {
    (0..m).map(|i| z.saturating_sub(i) as f64).product()
}

/// Probability of drawing the node tuple `nodes` (in order) as clones from
/// the isolated clones `z`, without and with replacement.
fn clone_weights(nodes: &[usize], z: &[usize], total: usize) -> (f64, f64) {
    let k = nodes.len();
    let mut counts: Vec<(usize, usize)> = Vec::new();
    for &v in nodes {
        match counts.iter_mut().find(|(u, _)| *u == v) {
            Some((_, m)) => *m += 1,
            None => counts.push((v, 1)),
        }
    }
    let without = counts.iter().map(|&(v, m)| falling(z[v], m)).product::<f64>() / falling(total, k);
    let with = nodes.iter().map(|&v| z[v] as f64).product::<f64>() / (total as f64).powi(k as i32);
    (without, with)
}

/// Exact one-step comparison of the regular-graph interpolation, conditional
/// on the partial matching `state` (after the deletion). The lhs reinserts a
/// phase-`(K1, K2)` cross edge from isolated clones; the rhs inserts, with
/// probability `K_j / K`, an edge of `K` isolated clones inside part `j`.
/// Node tuples are weighted by their isolated-clone counts `r - Delta_i`.
pub fn reg_onestep_exact(
    state: &ConfigurationState,
    g0: &Instance,
    n1: usize,
    phase: (usize, usize),
    mode: StepMode,
    caps: &SizeCaps,
) -> Result<ErStepResult> {
    let n = state.n_nodes();
    let k = state.arity();
    let (k1, k2) = phase;
    if n1 < 1 || n1 >= n {
        return Err(invalid(format!("N1 = {n1} must lie in 1..={}", n.saturating_sub(1))));
    }
    if k1 < 1 || k2 < 1 || k1 + k2 != k {
        return Err(invalid(format!("phase ({k1}, {k2}) is not a split of K = {k}")));
    }
    if g0.graph() != &project(state) {
        return Err(invalid("instance graph is not the projection of the configuration state"));
    }
    let z = state.free_slots();
    let z1: usize = z[..n1].iter().sum();
    let z2: usize = z[n1..].iter().sum();
    if z1 < k || z2 < k {
        return Err(Error::PremiseViolation(format!(
            "failure state: isolated clones (Z1, Z2) = ({z1}, {z2}), need at least K = {k} in each part"
        )));
    }
    let spec = *g0.spec();
    let t = tuple_table(g0, mode, caps)?;
    let (mut lhs, mut lhs_wr, mut rhs, mut rhs_wr) = (0.0, 0.0, 0.0, 0.0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    let parts = [(0usize, n1, z1, k1), (n1, n - n1, z2, k2)];
    for code in 0..t.len() {
        let nodes = t.nodes(code);
        let v = t.values[code];
        let mut touched = false;
        if in_block(&nodes[..k1], 0, n1) && in_block(&nodes[k1..], n1, n - n1) {
            let (a, aw) = clone_weights(&nodes[..k1], &z, z1);
            let (b, bw) = clone_weights(&nodes[k1..], &z, z2);
            lhs += a * b * v;
            lhs_wr += aw * bw * v;
            touched = a * b > 0.0 || aw * bw > 0.0;
        }
        for &(lo_j, size, zj, kj) in &parts {
            if in_block(&nodes, lo_j, size) {
                let (w, ww) = clone_weights(&nodes, &z, zj);
                let share = kj as f64 / k as f64;
                rhs += share * w * v;
                rhs_wr += share * ww * v;
                touched |= w > 0.0 || ww > 0.0;
            }
        }
        if touched {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    let collide = |m: usize, zz: usize| (m * m.saturating_sub(1)) as f64 / (2.0 * zz as f64);
    let tv_lhs = collide(k1, z1) + collide(k2, z2);
    let tv_rhs = k1 as f64 / k as f64 * collide(k, z1) + k2 as f64 / k as f64 * collide(k, z2);
    let regular = RegularStep {
        phase,
        isolated: (z1, z2),
        lhs_with_replacement: lhs_wr,
        rhs_with_replacement: rhs_wr,
        margin_with_replacement: lhs_wr - rhs_wr,
        analytic_correction: (tv_lhs + tv_rhs) * (hi - lo).max(0.0),
        computed_correction: (lhs - lhs_wr).abs() + (rhs - rhs_wr).abs(),
    };
    Ok(ErStepResult {
        model: spec.kind,
        n,
        n1,
        mode,
        base_instance: g0.clone(),
        base_value: t.base_value,
        lhs,
        rhs,
        margin: lhs - rhs,
        candidates: t.len() * spec.sign_count() as usize,
        formula: None,
        sat: None,
        log_series: None,
        regular: Some(regular),
        classes: crate::exact::to_labels(&t.summary.classes),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{generate_config_partial, generate_er, Hyperedge, Hypergraph};
    use crate::models::{build_instance, PotentialAssignment};

    fn graph_instance(n: usize, edges: &[[u32; 2]], spec: ModelSpec) -> Instance {
        let edges = edges.iter().map(|e| Hyperedge::new(e.to_vec())).collect();
        Instance::new(Hypergraph::new(n, 2, edges).unwrap(), spec, PotentialAssignment::none()).unwrap()
    }

    #[test]
    fn independent_set_on_path() {
        // O* = {1, 3}: 4 of the 9 ordered pairs lie in O* x O*
        let g0 = graph_instance(3, &[[0, 1], [1, 2]], ModelSpec::independent_set());
        let res = er_onestep_exact(&g0, 1, StepMode::GroundState, &SizeCaps::default()).unwrap();
        assert!((res.lhs - res.base_value + 4.0 / 9.0).abs() < 1e-12);
        assert!(res.formula.unwrap().error < 1e-12);
    }

    #[test]
    fn max_cut_single_edge() {
        let g0 = graph_instance(2, &[[0, 1]], ModelSpec::max_cut());
        let res = er_onestep_exact(&g0, 1, StepMode::GroundState, &SizeCaps::default()).unwrap();
        assert!((res.lhs - res.base_value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn degenerate_split_and_small_lambda_rejected() {
        let g0 = graph_instance(3, &[[0, 1]], ModelSpec::max_cut());
        assert!(er_onestep_exact(&g0, 3, StepMode::GroundState, &SizeCaps::default()).is_err());
        assert!(er_onestep_exact(&g0, 0, StepMode::GroundState, &SizeCaps::default()).is_err());
        let low = StepMode::LogPartition { lambda: 0.5 };
        assert!(er_onestep_exact(&g0, 1, low, &SizeCaps::default()).is_err());
        let is = graph_instance(3, &[[0, 1]], ModelSpec::independent_set());
        assert!(er_onestep_exact(&is, 1, low, &SizeCaps::default()).is_ok());
    }

    #[test]
    fn formulas_match_enumeration() {
        let specs = [
            ModelSpec::independent_set(),
            ModelSpec::max_cut(),
            ModelSpec::ising(1.0, 0.3),
            ModelSpec::coloring(3),
            ModelSpec::ksat(3),
            ModelSpec::nae_ksat(3),
        ];
        for spec in specs {
            for seed in 0..6u64 {
                let n = if spec.q > 2 { 6 } else { 7 };
                let g = generate_er(n, 4 + seed as usize, spec.k, seed).unwrap();
                let inst = build_instance(g, spec, seed).unwrap();
                let res = er_onestep_exact(&inst, 3, StepMode::GroundState, &SizeCaps::default()).unwrap();
                let f = res.formula.unwrap();
                assert!(f.error < 1e-12, "{} seed {seed}: {f:?}", spec.kind);
                assert!(res.margin >= -1e-12);
                if spec.kind != ModelKind::IndependentSet || seed < 2 {
                    let mode = StepMode::LogPartition { lambda: 2.0 };
                    let lr = er_onestep_exact(&inst, 3, mode, &SizeCaps::default()).unwrap();
                    assert!(lr.formula.as_ref().unwrap().error < 1e-9, "{} log", spec.kind);
                    assert!(lr.log_series.as_ref().unwrap().error < 1e-9);
                    assert!(lr.margin >= -1e-12);
                }
            }
        }
    }

    #[test]
    fn regular_step_reduces_to_uniform_without_edges() {
        // all clones isolated, K = 2, N1 = N/2: rhs with replacement equals the ER rhs
        let state = generate_config_partial(6, 2, 2, 0, 1).unwrap();
        let g0 = Instance::new(project(&state), ModelSpec::max_cut(), PotentialAssignment::none()).unwrap();
        let reg = reg_onestep_exact(&state, &g0, 3, (1, 1), StepMode::GroundState, &SizeCaps::default()).unwrap();
        let er = er_onestep_exact(&g0, 3, StepMode::GroundState, &SizeCaps::default()).unwrap();
        let extra = reg.regular.unwrap();
        assert!((extra.rhs_with_replacement - er.rhs).abs() < 1e-12);
        assert!(extra.margin_with_replacement >= -1e-12);
        assert!(reg.margin >= -extra.analytic_correction - 1e-12);
    }

    #[test]
    fn regular_step_independent_set_without_frozen_nodes() {
        // two disjoint edges: each maximum independent set picks one end of each, O* is empty
        let state = ConfigurationState::new(4, 2, 2, vec![vec![0, 2], vec![4, 6]]).unwrap();
        let g0 = Instance::new(project(&state), ModelSpec::independent_set(), PotentialAssignment::none()).unwrap();
        let reg = reg_onestep_exact(&state, &g0, 2, (1, 1), StepMode::GroundState, &SizeCaps::default()).unwrap();
        assert_eq!(reg.lhs, reg.base_value);
        assert_eq!(reg.rhs, reg.base_value);
    }
}
