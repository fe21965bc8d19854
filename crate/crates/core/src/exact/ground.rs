use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{decode, for_each_assignment, same_value, to_labels, value_table, SizeCaps, VALUE_TOL};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::Hyperedge;
use crate::models::{pack_bits, Assignment, Instance, ModelKind, Value};

/// Which structure of the optimal set a model's one-step analysis uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassRelation {
    /// Nodes with the same value in every optimum form `O*` (independent set:
    /// nodes equal to 1 in every optimum; K-SAT: nodes constant across optima).
    FrozenSet,
    /// `i ~ k` iff `x_i = x_k` in every optimum (MAX-CUT, coloring, Ising).
    Equality,
    /// `i ~ k` iff `x_i xor x_k` is constant over the optima (NAE-K-SAT).
    NaeEquivalence,
}

impl ClassRelation {
    pub fn for_model(kind: ModelKind) -> Self {
        match kind {
            ModelKind::IndependentSet | ModelKind::Ksat => ClassRelation::FrozenSet,
            ModelKind::NaeKsat => ClassRelation::NaeEquivalence,
            _ => ClassRelation::Equality,
        }
    }
}

/// Exact description of the optimal set of an instance.
#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateSummary {
    pub value: Value,
    pub optimal_count: u64,
    pub relation: ClassRelation,
    /// Sorted 0-based nodes of `O*`.
    pub frozen_set: Vec<usize>,
    /// `Some(v)` when node `i` takes value `v` in every optimum.
    pub frozen_values: Vec<Option<u8>>,
    /// Partition of the nodes; each class sorted, classes sorted by first node.
    pub classes: Vec<Vec<usize>>,
    pub class_frozen: Vec<bool>,
    /// One optimal assignment (the first in enumeration order).
    pub witness: Vec<u8>,
}

impl GroundStateSummary {
    /// Class index of every node.
    pub fn class_of(&self) -> Vec<usize> {
        let n: usize = self.classes.iter().map(Vec::len).sum();
        let mut id = vec![0; n];
        for (j, c) in self.classes.iter().enumerate() {
            for &v in c {
                id[v] = j;
            }
        }
        id
    }

    pub fn in_frozen_set(&self, node: usize) -> bool {
        self.frozen_set.binary_search(&node).is_ok()
    }

    /// Structured record with 1-based labels.
    pub fn to_json(&self) -> serde_json::Value {
        let mut frozen_classes: Vec<(Vec<usize>, bool)> = self
            .classes
            .iter()
            .zip(&self.class_frozen)
            .map(|(c, &f)| (c.iter().map(|v| v + 1).collect(), f))
            .collect();
        frozen_classes.sort();
        json!({
            "format": "ground-state-summary v1",
            "value": self.value,
            "optimal_count": self.optimal_count,
            "relation": self.relation,
            "frozen_set": self.frozen_set.iter().map(|v| v + 1).collect::<Vec<_>>(),
            "classes": to_labels(&self.classes),
            "class_frozen": frozen_classes.iter().map(|(_, f)| *f).collect::<Vec<_>>(),
            "witness": self.witness,
        })
    }
}

/// Streaming statistics over the optimal assignments.
struct OptimaStats {
    n: usize,
    full: u64,
    best: f64,
    count: u64,
    witness: Vec<u8>,
    seen: Vec<u32>,
    diff_eq: Vec<u64>,
    diff_nae: Vec<u64>,
    colmask: Vec<u64>,
}

impl OptimaStats {
    fn new(n: usize, q: usize) -> Self {
        OptimaStats {
            n,
            full: if n == 64 { u64::MAX } else { (1u64 << n) - 1 },
            best: f64::NEG_INFINITY,
            count: 0,
            witness: Vec::new(),
            seen: vec![0; n],
            diff_eq: vec![0; n],
            diff_nae: vec![0; n],
            colmask: vec![0; q],
        }
    }

    fn offer(&mut self, x: &[u8], h: f64) {
        if self.count == 0 || (h > self.best && !same_value(h, self.best)) {
            self.best = h;
            self.count = 0;
            self.witness = x.to_vec();
            self.seen.iter_mut().for_each(|s| *s = 0);
            self.diff_eq.iter_mut().for_each(|s| *s = 0);
            self.diff_nae.iter_mut().for_each(|s| *s = 0);
            self.add(x);
        } else if same_value(h, self.best) {
            self.add(x);
        }
    }

    fn add(&mut self, x: &[u8]) {
        self.count += 1;
        self.colmask.iter_mut().for_each(|m| *m = 0);
        let mut dmask = 0u64;
        for (i, &v) in x.iter().enumerate() {
            self.colmask[v as usize] |= 1 << i;
            if v != self.witness[i] {
                dmask |= 1 << i;
            }
        }
        for i in 0..self.n {
            let v = x[i] as usize;
            self.seen[i] |= 1 << v;
            self.diff_eq[i] |= self.full & !self.colmask[v];
            let di = (dmask >> i) & 1 == 1;
            self.diff_nae[i] |= if di { self.full & !dmask } else { dmask };
        }
    }
}

fn classes_from_diff(diff: &[u64]) -> Vec<Vec<usize>> {
    let n = diff.len();
    let mut assigned = vec![false; n];
    let mut out = Vec::new();
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let class: Vec<usize> = (i..n).filter(|&k| !assigned[k] && (diff[i] >> k) & 1 == 0).collect();
        for &k in &class {
            assigned[k] = true;
        }
        out.push(class);
    }
    out
}

fn frozen_values(seen: &[u32]) -> Vec<Option<u8>> {
    seen.iter().map(|&s| if s.count_ones() == 1 { Some(s.trailing_zeros() as u8) } else { None }).collect()
}

fn summarize(inst: &Instance, stats: OptimaStats) -> GroundStateSummary {
    let kind = inst.spec().kind;
    let relation = ClassRelation::for_model(kind);
    let fv = frozen_values(&stats.seen);
    let n = stats.n;
    let (frozen_set, classes, class_frozen) = match relation {
        ClassRelation::FrozenSet => {
            let in_set = |i: usize| match kind {
                ModelKind::IndependentSet => fv[i] == Some(1),
                _ => fv[i].is_some(),
            };
            let set: Vec<usize> = (0..n).filter(|&i| in_set(i)).collect();
            let mut classes = Vec::new();
            let mut flags = Vec::new();
            if !set.is_empty() {
                classes.push(set.clone());
                flags.push(true);
            }
            for i in (0..n).filter(|&i| !in_set(i)) {
                classes.push(vec![i]);
                flags.push(false);
            }
            classes_sorted(set, classes, flags)
        }
        ClassRelation::Equality | ClassRelation::NaeEquivalence => {
            let diff = if relation == ClassRelation::Equality { &stats.diff_eq } else { &stats.diff_nae };
            let classes = classes_from_diff(diff);
            let flags: Vec<bool> = classes.iter().map(|c| c.iter().all(|&i| fv[i].is_some())).collect();
            let mut set: Vec<usize> = classes.iter().zip(&flags).filter(|(_, &f)| f).flat_map(|(c, _)| c.clone()).collect();
            set.sort_unstable();
            (set, classes, flags)
        }
    };
    GroundStateSummary {
        value: Value::from_f64(stats.best),
        optimal_count: stats.count,
        relation,
        frozen_set,
        frozen_values: fv,
        classes,
        class_frozen,
        witness: stats.witness,
    }
}

fn classes_sorted(set: Vec<usize>, classes: Vec<Vec<usize>>, flags: Vec<bool>) -> (Vec<usize>, Vec<Vec<usize>>, Vec<bool>) {
    let mut pairs: Vec<(Vec<usize>, bool)> = classes.into_iter().zip(flags).collect();
    pairs.sort();
    let (c, f) = pairs.into_iter().unzip();
    (set, c, f)
}

/// Exact ground state with the optimal-set structure the model's analysis uses.
pub fn ground_state(inst: &Instance, caps: &SizeCaps) -> Result<GroundStateSummary> {
    let (n, q) = (inst.n_nodes(), inst.spec().q);
    caps.check(n, q, false)?;
    check_mask_width(n)?;
    let mut stats = OptimaStats::new(n, q);
    for_each_assignment(n, q, |_, x| stats.offer(x, inst.eval_raw(x)));
    Ok(summarize(inst, stats))
}

fn check_mask_width(n: usize) -> Result<()> {
    if n > 63 {
        return Err(Error::SizeCap { what: "node mask width", limit: 63, requested: n });
    }
    Ok(())
}

/// Same as [`ground_state`] from a precomputed value table.
pub(crate) fn summary_from_table(inst: &Instance, table: &[f64]) -> GroundStateSummary {
    let (n, q) = (inst.n_nodes(), inst.spec().q);
    let mut stats = OptimaStats::new(n, q);
    for_each_assignment(n, q, |code, x| stats.offer(x, table[code]));
    summarize(inst, stats)
}

/// Classes of the NAE relation (`x_i xor x_k` constant over the optima) for a binary instance.
pub fn nae_equivalence(inst: &Instance, caps: &SizeCaps) -> Result<Vec<Vec<usize>>> {
    let (n, q) = (inst.n_nodes(), inst.spec().q);
    if q != 2 {
        return Err(invalid("the NAE relation is defined for binary alphabets"));
    }
    caps.check(n, q, false)?;
    check_mask_width(n)?;
    let mut stats = OptimaStats::new(n, q);
    for_each_assignment(n, q, |_, x| stats.offer(x, inst.eval_raw(x)));
    Ok(classes_from_diff(&stats.diff_nae))
}

/// Every optimal assignment, in enumeration order.
pub fn optimal_assignments(inst: &Instance, caps: &SizeCaps) -> Result<Vec<Assignment>> {
    let table = value_table(inst, caps)?;
    let best = table.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (n, q) = (inst.n_nodes(), inst.spec().q);
    Ok(table
        .iter()
        .enumerate()
        .filter(|(_, &h)| same_value(h, best))
        .map(|(c, _)| Assignment(decode(c, n, q)))
        .collect())
}

/// Descending sequence of achieved values down to the `H0 - 2L` cutoff, with
/// the cumulative equality partitions of the assignments at or above each level.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsingLevels {
    /// `H_0 > H_1 > ... > H_M`.
    pub levels: Vec<f64>,
    /// Index `M` of the last level kept.
    pub cutoff: usize,
    /// `partitions[m]` are the classes of `~m` (0-based nodes).
    pub partitions: Vec<Vec<Vec<usize>>>,
    /// True when every achieved value is above the cutoff.
    pub exhausted: bool,
}

impl IsingLevels {
    /// `class_ids[m][i]` is the class of node `i` under `~m`.
    pub fn class_ids(&self, n: usize) -> Vec<Vec<usize>> {
        self.partitions
            .iter()
            .map(|p| {
                let mut id = vec![0; n];
                for (j, c) in p.iter().enumerate() {
                    for &v in c {
                        id[v] = j;
                    }
                }
                id
            })
            .collect()
    }

    /// Refinement check: each class at level `m + 1` lies inside one class at level `m`.
    pub fn is_refining(&self, n: usize) -> bool {
        let ids = self.class_ids(n);
        self.partitions.windows(2).enumerate().all(|(m, w)| {
            w[1].iter().all(|class| class.iter().all(|&v| ids[m][v] == ids[m][class[0]]))
        })
    }
}

/// Level sequence with the cutoff `H_m >= H_0 - 2 L` (`L = beta` for Ising).
pub fn ising_levels(inst: &Instance, caps: &SizeCaps) -> Result<IsingLevels> {
    check_mask_width(inst.n_nodes())?;
    let table = value_table(inst, caps)?;
    Ok(levels_from_table(inst, &table))
}

pub(crate) fn levels_from_table(inst: &Instance, table: &[f64]) -> IsingLevels {
    let (n, q) = (inst.n_nodes(), inst.spec().q);
    let mut order: Vec<usize> = (0..table.len()).filter(|&c| table[c].is_finite()).collect();
    order.sort_by(|&a, &b| table[b].partial_cmp(&table[a]).unwrap().then(a.cmp(&b)));
    let mut levels: Vec<f64> = Vec::new();
    let mut level_of = vec![usize::MAX; table.len()];
    for &c in &order {
        let h = table[c];
        if levels.last().map_or(true, |&last| !same_value(last, h)) {
            levels.push(h);
        }
        level_of[c] = levels.len() - 1;
    }
    let h0 = levels[0];
    let threshold = h0 - 2.0 * inst.spec().lipschitz() - VALUE_TOL * h0.abs().max(1.0);
    let kept = levels.iter().take_while(|&&h| h >= threshold).count();
    let cutoff = kept - 1;
    let exhausted = kept == levels.len();

    let full: u64 = (1u64 << n) - 1;
    let mut diff = vec![0u64; n];
    let mut partitions = Vec::with_capacity(kept);
    let mut colmask = vec![0u64; q];
    let mut idx = 0;
    for m in 0..kept {
        while idx < order.len() && level_of[order[idx]] == m {
            let x = decode(order[idx], n, q);
            colmask.iter_mut().for_each(|c| *c = 0);
            for (i, &v) in x.iter().enumerate() {
                colmask[v as usize] |= 1 << i;
            }
            for i in 0..n {
                diff[i] |= full & !colmask[x[i] as usize];
            }
            idx += 1;
        }
        partitions.push(classes_from_diff(&diff));
    }
    IsingLevels { levels: levels[..kept].to_vec(), cutoff, partitions, exhausted }
}

/// Result of adding one edge: the brute-force ground state of `G + e` next to
/// the value predicted from the optimal-set structure of `G`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EdgeAddition {
    pub base: Value,
    pub brute_force: Value,
    pub predicted: Value,
    /// Which case of the model's rule fired.
    pub case: &'static str,
}

impl EdgeAddition {
    pub fn agrees(&self) -> bool {
        same_value(self.brute_force.as_f64(), self.predicted.as_f64())
    }
}

/// `H(G + e)` by full enumeration, cross-checked against the class/frozen-set
/// rule of the model (and for Ising, the three-case level rule).
pub fn edge_addition_value(inst: &Instance, edge: &Hyperedge, sign: u32, caps: &SizeCaps) -> Result<EdgeAddition> {
    check_mask_width(inst.n_nodes())?;
    let table = value_table(inst, caps)?;
    let summary = summary_from_table(inst, &table);
    let plus = inst.with_edge(edge.clone(), sign)?;
    let brute = ground_state(&plus, caps)?.value;
    let (predicted, case) = if inst.spec().kind == ModelKind::Ising {
        let levels = levels_from_table(inst, &table);
        ising_rule(inst, &levels, edge.nodes()[0] as usize, edge.nodes()[1] as usize)
    } else {
        predict_from_summary(inst, &summary, edge.nodes(), sign)
    };
    Ok(EdgeAddition { base: summary.value, brute_force: brute, predicted: Value::from_f64(predicted), case })
}

/// Predicted `H(G + e)` for the non-Ising models.
pub(crate) fn predict_from_summary(inst: &Instance, s: &GroundStateSummary, nodes: &[u32], sign: u32) -> (f64, &'static str) {
    let h = s.value.as_f64();
    match inst.spec().kind {
        ModelKind::IndependentSet => {
            if nodes.iter().all(|&v| s.in_frozen_set(v as usize)) {
                (h - 1.0, "all endpoints in O*")
            } else {
                (h, "some endpoint outside O*")
            }
        }
        ModelKind::MaxCut | ModelKind::Coloring => {
            let id = s.class_of();
            if nodes.iter().all(|&v| id[v as usize] == id[nodes[0] as usize]) {
                (h, "endpoints equivalent")
            } else {
                (h + 1.0, "endpoints not equivalent")
            }
        }
        ModelKind::Ksat => {
            if nodes.iter().any(|&v| s.frozen_values[v as usize].is_none()) {
                return (h + 1.0, "edge meets a non-frozen node");
            }
            let vals: Vec<u8> = nodes.iter().map(|&v| s.frozen_values[v as usize].unwrap()).collect();
            if pack_bits(&vals) == sign {
                (h, "frozen values match the forbidden pattern")
            } else {
                (h + 1.0, "frozen values satisfy the clause")
            }
        }
        ModelKind::NaeKsat => {
            let id = s.class_of();
            if !nodes.iter().all(|&v| id[v as usize] == id[nodes[0] as usize]) {
                return (h + 1.0, "nodes not all equivalent");
            }
            let vals: Vec<u8> = nodes.iter().map(|&v| s.witness[v as usize]).collect();
            if inst.spec().pattern_violates(sign, pack_bits(&vals)) {
                (h, "one class, both patterns violate")
            } else {
                (h + 1.0, "one class, pattern satisfies")
            }
        }
        ModelKind::Ising => unreachable!("Ising uses the level rule"),
    }
}

/// Three-case level rule for adding Ising edge `(i, k)`.
pub(crate) fn ising_rule(inst: &Instance, levels: &IsingLevels, i: usize, k: usize) -> (f64, &'static str) {
    let beta = inst.spec().beta;
    let h0 = levels.levels[0];
    let same = |m: usize| {
        let p = &levels.partitions[m];
        p.iter().any(|c| c.contains(&i) && c.contains(&k))
    };
    if !same(0) {
        return (h0 + beta, "i and k not 0-equivalent");
    }
    for m in 0..levels.cutoff {
        if !same(m + 1) {
            return (levels.levels[m + 1] + beta, "equivalent up to level m, split at m+1");
        }
    }
    (h0 - beta, "equivalent at every level up to the cutoff")
}
