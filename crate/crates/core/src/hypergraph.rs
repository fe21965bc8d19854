//! Directed K-uniform multihypergraphs and the random ensembles built on them.
//!
//! Nodes are stored 0-based; the text format and every report use 1-based
//! labels. Hyperedges are ordered tuples and may repeat nodes, which is what the
//! non-simple ensembles produce.

use std::collections::HashSet;
use std::fmt::Write as _;

use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::rng::{rng_from_seed, Rng};

/// First line of the hypergraph text format.
pub const HYPERGRAPH_FORMAT: &str = "# sparse-interp hypergraph v1";

/// An ordered K-tuple of 0-based node indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hyperedge(pub Vec<u32>);

impl Hyperedge {
    pub fn new(nodes: Vec<u32>) -> Self {
        Hyperedge(nodes)
    }

    pub fn nodes(&self) -> &[u32] {
        &self.0
    }

    pub fn arity(&self) -> usize {
        self.0.len()
    }

    /// True when some node occurs more than once in the tuple.
    pub fn has_repeated_node(&self) -> bool {
        let n = &self.0;
        (0..n.len()).any(|a| (a + 1..n.len()).any(|b| n[a] == n[b]))
    }

    fn shifted(&self, by: u32) -> Hyperedge {
        Hyperedge(self.0.iter().map(|&v| v + by).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Hypergraph {
    n_nodes: usize,
    arity: usize,
    edges: Vec<Hyperedge>,
}

impl Hypergraph {
    pub fn new(n_nodes: usize, arity: usize, edges: Vec<Hyperedge>) -> Result<Self> {
        if n_nodes == 0 {
            return Err(invalid("hypergraph needs at least one node"));
        }
        if arity < 2 {
            return Err(invalid(format!("arity must be at least 2, got {arity}")));
        }
        for e in &edges {
            if e.arity() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: e.arity() });
            }
            if let Some(&bad) = e.0.iter().find(|&&v| v as usize >= n_nodes) {
                return Err(invalid(format!("node {} outside 1..{n_nodes}", bad + 1)));
            }
        }
        Ok(Hypergraph { n_nodes, arity, edges })
    }

    pub fn edgeless(n_nodes: usize, arity: usize) -> Result<Self> {
        Self::new(n_nodes, arity, Vec::new())
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn edges(&self) -> &[Hyperedge] {
        &self.edges
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    /// Number of edge slots occupied by each node (a repeated node counts once per slot).
    pub fn degrees(&self) -> Vec<usize> {
        let mut d = vec![0; self.n_nodes];
        for e in &self.edges {
            for &v in e.nodes() {
                d[v as usize] += 1;
            }
        }
        d
    }

    pub fn degree(&self, node: usize) -> usize {
        self.edges
            .iter()
            .map(|e| e.nodes().iter().filter(|&&v| v as usize == node).count())
            .sum()
    }

    /// Appends an edge, validating arity and range.
    pub fn push_edge(&mut self, e: Hyperedge) -> Result<()> {
        if e.arity() != self.arity {
            return Err(Error::ArityMismatch { expected: self.arity, found: e.arity() });
        }
        if e.0.iter().any(|&v| v as usize >= self.n_nodes) {
            return Err(invalid("edge node outside range"));
        }
        self.edges.push(e);
        Ok(())
    }

    pub fn with_edge(&self, e: Hyperedge) -> Result<Hypergraph> {
        let mut g = self.clone();
        g.push_edge(e)?;
        Ok(g)
    }

    /// Prefix of the edge list; used by nested-edge couplings.
    pub fn truncated(&self, m: usize) -> Hypergraph {
        Hypergraph { n_nodes: self.n_nodes, arity: self.arity, edges: self.edges[..m.min(self.edges.len())].to_vec() }
    }

    /// Indices of edges that repeat a node, e.g. `(i, i)`.
    pub fn repeated_node_edges(&self) -> Vec<usize> {
        self.edges.iter().enumerate().filter(|(_, e)| e.has_repeated_node()).map(|(i, _)| i).collect()
    }

    /// Serializes to the line-oriented text format (1-based labels).
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        s.push_str(HYPERGRAPH_FORMAT);
        s.push('\n');
        self.write_body(&mut s);
        s
    }

    pub(crate) fn write_body(&self, s: &mut String) {
        let _ = writeln!(s, "{} {} {}", self.n_nodes, self.arity, self.edges.len());
        for e in &self.edges {
            let line: Vec<String> = e.nodes().iter().map(|v| (v + 1).to_string()).collect();
            s.push_str(&line.join(" "));
            s.push('\n');
        }
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = content_lines(text);
        let g = Self::read_body(&mut lines)?;
        if let Some((ln, _)) = lines.next() {
            return Err(Error::Parse { line: ln, msg: "trailing content after edge list".into() });
        }
        Ok(g)
    }

    pub(crate) fn read_body<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>) -> Result<Self> {
        let (ln, header) = lines.next().ok_or(Error::Parse { line: 0, msg: "missing `N K M` header".into() })?;
        let nums = parse_numbers(header, ln)?;
        if nums.len() != 3 {
            return Err(Error::Parse { line: ln, msg: "header must be `N K M`".into() });
        }
        let (n, k, m) = (nums[0] as usize, nums[1] as usize, nums[2] as usize);
        let mut edges = Vec::with_capacity(m);
        for _ in 0..m {
            let (ln, line) = lines.next().ok_or(Error::Parse { line: ln, msg: format!("expected {m} edges") })?;
            let nodes = parse_numbers(line, ln)?;
            if nodes.len() != k {
                return Err(Error::Parse { line: ln, msg: format!("edge has {} nodes, arity is {k}", nodes.len()) });
            }
            if nodes.iter().any(|&v| v == 0 || v as usize > n) {
                return Err(Error::Parse { line: ln, msg: format!("node index outside 1..{n}") });
            }
            edges.push(Hyperedge(nodes.iter().map(|&v| (v - 1) as u32).collect()));
        }
        Hypergraph::new(n, k, edges)
    }
}

/// Non-empty, non-comment lines with their 1-based line numbers.
pub(crate) fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

pub(crate) fn parse_numbers(line: &str, ln: usize) -> Result<Vec<u64>> {
    line.split_whitespace()
        .map(|t| t.parse::<u64>().map_err(|_| Error::Parse { line: ln, msg: format!("not an integer: `{t}`") }))
        .collect()
}

fn check_er_params(n: usize, k: usize) -> Result<()> {
    if n < 1 {
        return Err(invalid("N must be at least 1"));
    }
    if k < 2 {
        return Err(invalid("K must be at least 2"));
    }
    Ok(())
}

pub(crate) fn uniform_edge(rng: &mut Rng, lo: u32, size: u32, k: usize) -> Hyperedge {
    Hyperedge((0..k).map(|_| lo + rng.gen_range(0..size)).collect())
}

/// `M` directed hyperedges drawn i.i.d. uniformly from the `N^K` ordered tuples.
pub fn generate_er(n: usize, m: usize, k: usize, seed: u64) -> Result<Hypergraph> {
    check_er_params(n, k)?;
    let mut rng = rng_from_seed(seed);
    Ok(sample_er(n, m, k, &mut rng))
}

pub(crate) fn sample_er(n: usize, m: usize, k: usize, rng: &mut Rng) -> Hypergraph {
    let edges = (0..m).map(|_| uniform_edge(rng, 0, n as u32, k)).collect();
    Hypergraph { n_nodes: n, arity: k, edges }
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
        if acc > u64::MAX as u128 {
            return u64::MAX;
        }
    }
    acc as u64
}

/// Number of undirected K-sets of distinct nodes out of `n`.
pub fn simple_edge_count(n: usize, k: usize) -> u64 {
    binomial(n as u64, k as u64)
}

/// `M` distinct undirected edges of `K` distinct nodes, sampled without
/// replacement. Nodes inside an edge are sorted and the edge list is sorted.
pub fn generate_er_simple(n: usize, m: usize, k: usize, seed: u64) -> Result<Hypergraph> {
    check_er_params(n, k)?;
    let available = simple_edge_count(n, k);
    if m as u64 > available {
        return Err(Error::InfeasibleCount { requested: m as u64, available });
    }
    let mut rng = rng_from_seed(seed);
    Ok(sample_er_simple(n, m, k, &mut rng))
}

pub(crate) fn sample_er_simple(n: usize, m: usize, k: usize, rng: &mut Rng) -> Hypergraph {
    let available = simple_edge_count(n, k);
    let mut edges: Vec<Hyperedge> = if available <= 200_000 || 2 * m as u64 > available {
        let mut all = all_k_subsets(n, k);
        let (chosen, _) = all.partial_shuffle(rng, m);
        chosen.to_vec()
    } else {
        let mut seen = HashSet::with_capacity(m);
        let nodes: Vec<u32> = (0..n as u32).collect();
        while seen.len() < m {
            let mut e: Vec<u32> = nodes.choose_multiple(rng, k).copied().collect();
            e.sort_unstable();
            seen.insert(Hyperedge(e));
        }
        seen.into_iter().collect()
    };
    edges.sort();
    Hypergraph { n_nodes: n, arity: k, edges }
}

fn all_k_subsets(n: usize, k: usize) -> Vec<Hyperedge> {
    let mut out = Vec::new();
    let mut cur: Vec<u32> = (0..k as u32).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(Hyperedge(cur.clone()));
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if (cur[i] as usize) < n - k + i {
                cur[i] += 1;
                for j in i + 1..k {
                    cur[j] = cur[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// The interpolating ensemble between the whole graph and a split pair: the
/// first `r` edges are uniform on `[N]^K`; each of the remaining `M - r` edges
/// lands, independently, uniformly inside block `[N1]` with probability `N1/N`
/// and inside `{N1+1..N}` otherwise.
pub fn generate_er_interpolated(n: usize, m: usize, r: usize, n1: usize, k: usize, seed: u64) -> Result<Hypergraph> {
    check_er_params(n, k)?;
    if r > m {
        return Err(invalid(format!("r = {r} exceeds M = {m}")));
    }
    if n1 < 1 || n1 >= n {
        return Err(invalid(format!("N1 = {n1} must lie in 1..={}", n.saturating_sub(1))));
    }
    let mut rng = rng_from_seed(seed);
    let mut edges: Vec<Hyperedge> = (0..r).map(|_| uniform_edge(&mut rng, 0, n as u32, k)).collect();
    for _ in r..m {
        edges.push(block_edge(&mut rng, n, n1, k));
    }
    Ok(Hypergraph { n_nodes: n, arity: k, edges })
}

/// One edge inside block 1 with probability `n1/n`, otherwise inside block 2.
pub(crate) fn block_edge(rng: &mut Rng, n: usize, n1: usize, k: usize) -> Hyperedge {
    if rng.gen_range(0..n) < n1 {
        uniform_edge(rng, 0, n1 as u32, k)
    } else {
        uniform_edge(rng, n1 as u32, (n - n1) as u32, k)
    }
}

/// Disjoint union: nodes of `g2` are relabelled by `+ g1.n_nodes()`.
pub fn disjoint_union(g1: &Hypergraph, g2: &Hypergraph) -> Result<Hypergraph> {
    if g1.arity != g2.arity {
        return Err(Error::ArityMismatch { expected: g1.arity, found: g2.arity });
    }
    let shift = g1.n_nodes as u32;
    let mut edges = g1.edges.clone();
    edges.extend(g2.edges.iter().map(|e| e.shifted(shift)));
    Ok(Hypergraph { n_nodes: g1.n_nodes + g2.n_nodes, arity: g1.arity, edges })
}

/// Restricts `g` to the node block `lo..lo+size`, keeping only edges that lie
/// entirely inside it, relabelled to start at 0.
pub fn induced_block(g: &Hypergraph, lo: usize, size: usize) -> Hypergraph {
    let edges = g
        .edges
        .iter()
        .filter(|e| e.0.iter().all(|&v| (v as usize) >= lo && (v as usize) < lo + size))
        .map(|e| Hyperedge(e.0.iter().map(|&v| v - lo as u32).collect()))
        .collect();
    Hypergraph { n_nodes: size, arity: g.arity, edges }
}

/// Configuration-model state: `r` clone slots per node and a partial K-uniform
/// matching on the `N r` slots. Clone `c` belongs to node `c / r`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfigurationState {
    n_nodes: usize,
    degree_bound: usize,
    arity: usize,
    matching: Vec<Vec<u32>>,
}

impl ConfigurationState {
    /// Builds a state from explicit clone groups, checking disjointness.
    pub fn new(n_nodes: usize, degree_bound: usize, arity: usize, matching: Vec<Vec<u32>>) -> Result<Self> {
        check_config_params(n_nodes, degree_bound, arity)?;
        let slots = n_nodes * degree_bound;
        let mut used = vec![false; slots];
        for group in &matching {
            if group.len() != arity {
                return Err(Error::ArityMismatch { expected: arity, found: group.len() });
            }
            for &c in group {
                let c = c as usize;
                if c >= slots {
                    return Err(invalid(format!("clone {c} outside 0..{slots}")));
                }
                if used[c] {
                    return Err(invalid(format!("clone {c} used by two hyperedges")));
                }
                used[c] = true;
            }
        }
        Ok(ConfigurationState { n_nodes, degree_bound, arity, matching })
    }

    pub fn n_nodes(&self) -> usize {
        self.n_nodes
    }

    pub fn degree_bound(&self) -> usize {
        self.degree_bound
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn n_clones(&self) -> usize {
        self.n_nodes * self.degree_bound
    }

    pub fn matching(&self) -> &[Vec<u32>] {
        &self.matching
    }

    pub fn owner(&self, clone: u32) -> u32 {
        clone / self.degree_bound as u32
    }

    pub fn matched_mask(&self) -> Vec<bool> {
        let mut used = vec![false; self.n_clones()];
        for g in &self.matching {
            for &c in g {
                used[c as usize] = true;
            }
        }
        used
    }

    /// Unmatched clone slots in increasing order.
    pub fn isolated_clones(&self) -> Vec<u32> {
        self.matched_mask().iter().enumerate().filter(|(_, &u)| !u).map(|(c, _)| c as u32).collect()
    }

    pub fn isolated_count(&self) -> usize {
        self.n_clones() - self.matching.len() * self.arity
    }

    /// Free clone slots per node, `r - degree(i)`.
    pub fn free_slots(&self) -> Vec<usize> {
        let mut free = vec![self.degree_bound; self.n_nodes];
        for g in &self.matching {
            for &c in g {
                free[self.owner(c) as usize] -= 1;
            }
        }
        free
    }

    pub(crate) fn push_group(&mut self, group: Vec<u32>) {
        self.matching.push(group);
    }

    pub(crate) fn remove_group(&mut self, idx: usize) -> Vec<u32> {
        self.matching.swap_remove(idx)
    }

    pub(crate) fn insert_group_at(&mut self, idx: usize, group: Vec<u32>) {
        // inverse of swap_remove
        if idx == self.matching.len() {
            self.matching.push(group);
        } else {
            let moved = std::mem::replace(&mut self.matching[idx], group);
            self.matching.push(moved);
        }
    }
}

fn check_config_params(n: usize, r: usize, k: usize) -> Result<()> {
    if n < 1 || r < 1 {
        return Err(invalid("N and r must be positive"));
    }
    if k < 2 {
        return Err(invalid("K must be at least 2"));
    }
    if (n * r) % k != 0 {
        return Err(Error::Integrality(format!("N r / K = {n}*{r}/{k} is not an integer")));
    }
    Ok(())
}

/// Uniform partial matching of size `T` on the `N r` clones: a random
/// permutation of the clones truncated to its first `T K` entries, grouped in
/// consecutive blocks of `K`.
pub fn generate_config_partial(n: usize, r: usize, k: usize, t: usize, seed: u64) -> Result<ConfigurationState> {
    check_config_params(n, r, k)?;
    let mut rng = rng_from_seed(seed);
    sample_config_partial(n, r, k, t, &mut rng)
}

pub(crate) fn sample_config_partial(n: usize, r: usize, k: usize, t: usize, rng: &mut Rng) -> Result<ConfigurationState> {
    check_config_params(n, r, k)?;
    let full = n * r / k;
    if t > full {
        return Err(invalid(format!("T = {t} exceeds N r / K = {full}")));
    }
    let mut clones: Vec<u32> = (0..(n * r) as u32).collect();
    let (prefix, _) = clones.partial_shuffle(rng, t * k);
    let matching = prefix.chunks(k).map(|c| c.to_vec()).collect();
    Ok(ConfigurationState { n_nodes: n, degree_bound: r, arity: k, matching })
}

/// Replaces every clone by its owner node; one hyperedge per matched group.
pub fn project(cs: &ConfigurationState) -> Hypergraph {
    let edges = cs.matching.iter().map(|g| Hyperedge(g.iter().map(|&c| cs.owner(c)).collect())).collect();
    Hypergraph { n_nodes: cs.n_nodes, arity: cs.arity, edges }
}

/// A uniformly random `r`-regular hypergraph from the configuration model.
pub fn generate_regular(n: usize, r: usize, k: usize, seed: u64) -> Result<Hypergraph> {
    check_config_params(n, r, k)?;
    Ok(project(&generate_config_partial(n, r, k, n * r / k, seed)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(v: &[u32]) -> Hyperedge {
        Hyperedge(v.to_vec())
    }

    #[test]
    fn er_single_node_repeats_the_only_tuple() {
        let g = generate_er(1, 3, 2, 11).unwrap();
        assert_eq!(g.edges(), &[e(&[0, 0]), e(&[0, 0]), e(&[0, 0])]);
    }

    #[test]
    fn er_zero_edges() {
        let g = generate_er(5, 0, 3, 1).unwrap();
        assert_eq!(g.n_nodes(), 5);
        assert_eq!(g.n_edges(), 0);
    }

    #[test]
    fn er_rejects_bad_params() {
        assert!(matches!(generate_er(0, 1, 2, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(generate_er(3, 1, 1, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn simple_saturation_and_triangle() {
        let g = generate_er_simple(3, 3, 2, 5).unwrap();
        assert_eq!(g.edges(), &[e(&[0, 1]), e(&[0, 2]), e(&[1, 2])]);
        let g = generate_er_simple(4, 6, 2, 5).unwrap();
        assert_eq!(g.n_edges(), 6);
        assert_eq!(g.degrees(), vec![3, 3, 3, 3]);
        assert_eq!(generate_er_simple(4, 0, 2, 5).unwrap().n_edges(), 0);
        assert_eq!(
            generate_er_simple(4, 7, 2, 5),
            Err(Error::InfeasibleCount { requested: 7, available: 6 })
        );
    }

    #[test]
    fn simple_edges_are_distinct_with_distinct_nodes() {
        let g = generate_er_simple(30, 200, 3, 9).unwrap();
        let set: HashSet<_> = g.edges().iter().cloned().collect();
        assert_eq!(set.len(), 200);
        for edge in g.edges() {
            assert!(edge.0.windows(2).all(|w| w[0] < w[1]));
        }
    }

    #[test]
    fn config_forced_single_edge() {
        let cs = generate_config_partial(3, 1, 3, 1, 4).unwrap();
        assert_eq!(cs.isolated_count(), 0);
        let g = project(&cs);
        assert_eq!(g.n_edges(), 1);
        let mut nodes = g.edges()[0].0.clone();
        nodes.sort_unstable();
        assert_eq!(nodes, vec![0, 1, 2]);
    }

    #[test]
    fn config_full_and_partial() {
        let full = generate_config_partial(6, 2, 3, 4, 8).unwrap();
        assert_eq!(project(&full).degrees(), vec![2; 6]);
        let part = generate_config_partial(6, 2, 3, 2, 8).unwrap();
        assert_eq!(part.isolated_count(), 6);
        assert_eq!(part.isolated_clones().len(), 6);
        assert!(matches!(generate_config_partial(5, 1, 2, 1, 0), Err(Error::Integrality(_))));
        assert!(matches!(generate_config_partial(6, 2, 3, 5, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn projection_of_empty_and_r1() {
        let cs = generate_config_partial(4, 3, 2, 0, 1).unwrap();
        assert_eq!(project(&cs).n_edges(), 0);
        let cs = generate_config_partial(8, 1, 2, 4, 1).unwrap();
        assert_eq!(project(&cs).degrees(), vec![1; 8]);
    }

    #[test]
    fn union_relabels_second_part() {
        let g1 = Hypergraph::new(2, 2, vec![e(&[0, 1])]).unwrap();
        let u = disjoint_union(&g1, &g1).unwrap();
        assert_eq!(u.n_nodes(), 4);
        assert_eq!(u.edges(), &[e(&[0, 1]), e(&[2, 3])]);
        let a = Hypergraph::edgeless(2, 2).unwrap();
        let b = Hypergraph::edgeless(3, 2).unwrap();
        assert_eq!(disjoint_union(&a, &b).unwrap(), Hypergraph::edgeless(5, 2).unwrap());
        let c = Hypergraph::edgeless(3, 3).unwrap();
        assert!(matches!(disjoint_union(&a, &c), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn interpolated_endpoints_and_errors() {
        assert_eq!(generate_er_interpolated(5, 0, 0, 2, 2, 1).unwrap().n_edges(), 0);
        let g = generate_er_interpolated(6, 40, 0, 2, 3, 3).unwrap();
        for edge in g.edges() {
            let in1 = edge.0.iter().all(|&v| v < 2);
            let in2 = edge.0.iter().all(|&v| v >= 2);
            assert!(in1 || in2);
        }
        assert!(generate_er_interpolated(6, 4, 5, 2, 2, 0).is_err());
        assert!(generate_er_interpolated(6, 4, 2, 6, 2, 0).is_err());
        assert!(generate_er_interpolated(6, 4, 2, 0, 2, 0).is_err());
    }

    #[test]
    fn text_format_round_trip() {
        let g = generate_er(7, 9, 3, 21).unwrap();
        let text = g.to_text();
        let back = Hypergraph::from_text(&text).unwrap();
        assert_eq!(back, g);
        assert_eq!(back.to_text(), text);
        assert!(text.starts_with(HYPERGRAPH_FORMAT));
        assert!(Hypergraph::from_text("3 2 1\n1 4\n").is_err());
        assert!(Hypergraph::from_text("3 2 2\n1 2\n").is_err());
    }

    #[test]
    fn swap_remove_inverse() {
        let mut cs = generate_config_partial(6, 2, 2, 5, 2).unwrap();
        let before = cs.clone();
        for idx in 0..5 {
            let g = cs.remove_group(idx);
            cs.insert_group_at(idx, g);
            assert_eq!(cs, before);
        }
    }
}
