//! Exact maximization by search instead of enumeration.
//!
//! Independent set on (reduced) graphs uses a bitmask maximum-independent-set
//! search; every other case uses branch and bound over nodes in decreasing
//! degree order, scoring each edge once its last node is assigned.

use crate::error::{Error, Result};
use crate::models::{Instance, ModelKind, Value};

/// Largest N accepted by the search solvers.
pub const SEARCH_NODE_LIMIT: usize = 64;

/// Exact ground-state value `H(G)`.
pub fn max_value(inst: &Instance) -> Result<Value> {
    check(inst)?;
    if inst.spec().kind == ModelKind::IndependentSet {
        if let Some(adj) = reduced_graph(inst) {
            return Ok(Value::Finite(mis_size(&adj) as f64));
        }
    }
    let best = Search::new(inst, None).run();
    Ok(Value::from_f64(best))
}

/// Whether every constraint of a satisfiability-type instance (coloring,
/// K-SAT, NAE-K-SAT) can be satisfied at once.
pub fn is_satisfiable(inst: &Instance) -> Result<bool> {
    check(inst)?;
    if !inst.spec().kind.is_csp() {
        return Err(crate::error::invalid("satisfiability is defined for coloring, K-SAT and NAE-K-SAT"));
    }
    let target = inst.graph().n_edges() as f64;
    let best = Search::new(inst, Some(target)).run();
    Ok(best >= target)
}

fn check(inst: &Instance) -> Result<()> {
    if inst.n_nodes() > SEARCH_NODE_LIMIT {
        return Err(Error::SizeCap { what: "search solver nodes", limit: SEARCH_NODE_LIMIT, requested: inst.n_nodes() });
    }
    Ok(())
}

/// Independent-set constraints as a graph, when every edge touches at most
/// two distinct nodes. Bit `i` of `adj[i]` marks a node that can never be 1.
fn reduced_graph(inst: &Instance) -> Option<Vec<u64>> {
    let mut adj = vec![0u64; inst.n_nodes()];
    for e in inst.graph().edges() {
        let mut nodes: Vec<u32> = e.nodes().to_vec();
        nodes.sort_unstable();
        nodes.dedup();
        match nodes.as_slice() {
            [v] => adj[*v as usize] |= 1 << v,
            [a, b] => {
                adj[*a as usize] |= 1 << b;
                adj[*b as usize] |= 1 << a;
            }
            _ => return None,
        }
    }
    Some(adj)
}

fn mis_size(adj: &[u64]) -> u32 {
    let mut cand = 0u64;
    for (i, &a) in adj.iter().enumerate() {
        if (a >> i) & 1 == 0 {
            cand |= 1 << i;
        }
    }
    let mut best = 0;
    mis_rec(adj, cand, 0, &mut best);
    best
}

fn mis_rec(adj: &[u64], cand: u64, size: u32, best: &mut u32) {
    if cand == 0 {
        *best = (*best).max(size);
        return;
    }
    if size + cand.count_ones() <= *best {
        return;
    }
    // a node of degree <= 1 inside `cand` is always safe to take
    let mut rest = cand;
    let mut pivot = 0usize;
    let mut pivot_deg = 0u32;
    while rest != 0 {
        let v = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        let d = (adj[v] & cand).count_ones();
        if d <= 1 {
            mis_rec(adj, cand & !adj[v] & !(1 << v), size + 1, best);
            return;
        }
        if d > pivot_deg {
            pivot = v;
            pivot_deg = d;
        }
    }
    mis_rec(adj, cand & !adj[pivot] & !(1 << pivot), size + 1, best);
    mis_rec(adj, cand & !(1 << pivot), size, best);
}

struct Search<'a> {
    inst: &'a Instance,
    q: u8,
    order: Vec<usize>,
    /// Edges whose last node (in `order`) sits at each position.
    completes_at: Vec<Vec<usize>>,
    /// Best possible contribution of positions `p..`.
    suffix_bound: Vec<f64>,
    x: Vec<u8>,
    best: f64,
    /// Stop once this value is reached.
    stop_at: f64,
    /// Prune branches that cannot reach this value (satisfiability mode).
    floor: Option<f64>,
    first_use: bool,
    fix_first: bool,
}

impl<'a> Search<'a> {
    fn new(inst: &'a Instance, target: Option<f64>) -> Self {
        let spec = inst.spec();
        let n = inst.n_nodes();
        let degrees = inst.graph().degrees();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| degrees[b].cmp(&degrees[a]).then(a.cmp(&b)));
        let mut pos = vec![0; n];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let mut completes_at = vec![Vec::new(); n];
        for (idx, e) in inst.graph().edges().iter().enumerate() {
            let last = e.nodes().iter().map(|&v| pos[v as usize]).max().unwrap();
            completes_at[last].push(idx);
        }
        let mut suffix_bound = vec![0.0; n + 1];
        for p in (0..n).rev() {
            suffix_bound[p] =
                suffix_bound[p + 1] + spec.node_value_max() + completes_at[p].len() as f64 * spec.edge_value_max();
        }
        let first_use = matches!(spec.kind, ModelKind::MaxCut | ModelKind::Coloring);
        let fix_first = spec.kind == ModelKind::NaeKsat || (spec.kind == ModelKind::Ising && spec.field == 0.0);
        Search {
            inst,
            q: spec.q as u8,
            order,
            completes_at,
            stop_at: target.unwrap_or(suffix_bound[0]),
            floor: target,
            suffix_bound,
            x: vec![0; n],
            best: f64::NEG_INFINITY,
            first_use,
            fix_first,
        }
    }

    fn run(mut self) -> f64 {
        if self.order.is_empty() {
            return 0.0;
        }
        self.rec(0, 0.0, 0);
        self.best
    }

    fn edge_sum(&self, p: usize) -> f64 {
        let mut s = 0.0;
        let mut buf = [0u8; 16];
        for &idx in &self.completes_at[p] {
            let e = &self.inst.graph().edges()[idx];
            for (j, &v) in e.nodes().iter().enumerate() {
                buf[j] = self.x[v as usize];
            }
            s += self.inst.spec().edge_value(self.inst.sign(idx), &buf[..e.arity()]);
        }
        s
    }

    /// Returns true once the search can stop.
    fn rec(&mut self, p: usize, acc: f64, colors_used: u8) -> bool {
        let n = self.order.len();
        if p == n {
            if acc > self.best {
                self.best = acc;
            }
            return self.best >= self.stop_at;
        }
        let limit = if self.first_use {
            (colors_used + 1).min(self.q)
        } else if self.fix_first && p == 0 {
            1
        } else {
            self.q
        };
        let node = self.order[p];
        for v in 0..limit {
            self.x[node] = v;
            let val = acc + self.inst.spec().node_value(v) + self.edge_sum(p);
            if val == f64::NEG_INFINITY {
                continue;
            }
            let bound = val + self.suffix_bound[p + 1];
            if bound <= self.best || self.floor.map_or(false, |f| bound < f) {
                continue;
            }
            if self.rec(p + 1, val, colors_used.max(v + 1)) {
                return true;
            }
        }
        false
    }
}
