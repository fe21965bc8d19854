use crate::error::{invalid, Result};
use crate::exact::max_value;
use crate::hypergraph::{block_edge, uniform_edge, Hyperedge, Hypergraph};
use crate::models::{Instance, ModelSpec, PotentialAssignment};
use crate::rng::Rng;
use crate::verify::{mean_se, par_trials, proportion, three_sigma, CheckReport, MarginKind};

/// Randomness of one coupled draw of the whole chain `G(N, M, r)`, `0 <= r <= M`:
/// edge `j` is `uniform[j]` when `j < r` and `block[j]` otherwise; signs are shared.
pub struct CoupledChain {
    n: usize,
    k: usize,
    uniform: Vec<Hyperedge>,
    block: Vec<Hyperedge>,
    signs: Vec<u32>,
    spec: ModelSpec,
}

impl CoupledChain {
    pub(crate) fn sample(n: usize, m: usize, n1: usize, spec: &ModelSpec, rng: &mut Rng) -> Self {
        let k = spec.k;
        let mut uniform = Vec::with_capacity(m);
        let mut block = Vec::with_capacity(m);
        let mut signs = Vec::with_capacity(m);
        for _ in 0..m {
            uniform.push(uniform_edge(rng, 0, n as u32, k));
            block.push(block_edge(rng, n, n1, k));
            signs.push(spec.random_sign(rng));
        }
        CoupledChain { n, k, uniform, block, signs, spec: *spec }
    }

    pub fn edge_count(&self) -> usize {
        self.uniform.len()
    }

    /// `G(N, M, r)` of this draw.
    pub fn at(&self, r: usize) -> Instance {
        let m = self.edge_count();
        let edges: Vec<Hyperedge> =
            (0..m).map(|j| if j < r { self.uniform[j].clone() } else { self.block[j].clone() }).collect();
        let graph = Hypergraph::new(self.n, self.k, edges).expect("valid chain graph");
        let potentials = if self.spec.kind.has_signs() {
            PotentialAssignment::from_packed(self.signs.clone())
        } else {
            PotentialAssignment::none()
        };
        Instance::new(graph, self.spec, potentials).expect("valid chain instance")
    }

    /// The two blocks of `G(N, M, 0)` as separate instances on `N1` and `N - N1` nodes.
    pub fn parts(&self, n1: usize) -> (Instance, Instance) {
        let mut e1 = Vec::new();
        let mut e2 = Vec::new();
        let (mut s1, mut s2) = (Vec::new(), Vec::new());
        for (e, &s) in self.block.iter().zip(&self.signs) {
            if (e.nodes()[0] as usize) < n1 {
                e1.push(e.clone());
                s1.push(s);
            } else {
                e2.push(Hyperedge::new(e.nodes().iter().map(|&v| v - n1 as u32).collect()));
                s2.push(s);
            }
        }
        let make = |n: usize, edges: Vec<Hyperedge>, signs: Vec<u32>| {
            let graph = Hypergraph::new(n, self.k, edges).expect("valid block graph");
            let pot = if self.spec.kind.has_signs() { PotentialAssignment::from_packed(signs) } else { PotentialAssignment::none() };
            Instance::new(graph, self.spec, pot).expect("valid block instance")
        };
        (make(n1, e1, s1), make(self.n - n1, e2, s2))
    }
}

pub(crate) fn check_chain_params(n: usize, n1: usize, c: f64) -> Result<usize> {
    if n1 < 1 || n1 >= n {
        return Err(invalid(format!("N1 = {n1} must lie in 1..={}", n.saturating_sub(1))));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(invalid(format!("edge density c must be a finite non-negative number, got {c}")));
    }
    Ok((c * n as f64).floor() as usize)
}

/// Monte Carlo estimates of `E[H(G(N, floor(cN), r))]` along the chain, from
/// coupled draws (consecutive `r` differ in one edge per draw). Asserts each
/// consecutive difference is `>= -3` standard errors. With `satisfiability`
/// set, the functional is the indicator `H = M` instead.
pub fn er_chain_mc(
    n: usize,
    c: f64,
    n1: usize,
    spec: &ModelSpec,
    r_values: &[usize],
    samples: u64,
    seed: u64,
    satisfiability: bool,
) -> Result<CheckReport> {
    spec.validate()?;
    let m = check_chain_params(n, n1, c)?;
    if satisfiability && !spec.kind.is_csp() {
        return Err(invalid("the satisfiability chain needs coloring, K-SAT or NAE-K-SAT"));
    }
    let mut rs: Vec<usize> = r_values.to_vec();
    rs.sort_unstable();
    rs.dedup();
    if rs.is_empty() || rs.iter().any(|&r| r > m) {
        return Err(invalid(format!("r values must be non-empty and lie in 0..={m}")));
    }
    if n > crate::exact::SEARCH_NODE_LIMIT {
        return Err(crate::error::Error::SizeCap { what: "search solver nodes", limit: crate::exact::SEARCH_NODE_LIMIT, requested: n });
    }
    let rows: Vec<Vec<f64>> = par_trials(samples, seed, |_, rng| {
        let chain = CoupledChain::sample(n, m, n1, spec, rng);
        rs.iter()
            .map(|&r| {
                let h = max_value(&chain.at(r)).expect("checked size").as_f64();
                if satisfiability {
                    f64::from(u8::from(crate::exact::same_value(h, m as f64)))
                } else {
                    h
                }
            })
            .collect()
    });
    let name = if satisfiability { "er-chain-sat" } else { "er-chain" };
    let mut report = CheckReport::new(name, Some(seed))
        .param("model", spec.kind.name())
        .param("spec", spec)
        .param("n", n)
        .param("n1", n1)
        .param("c", c)
        .param("m", m)
        .param("r_values", &rs)
        .param("samples", samples);
    for (i, &r) in rs.iter().enumerate() {
        let col: Vec<f64> = rows.iter().map(|row| row[i]).collect();
        let (mean, se) = if satisfiability {
            proportion(col.iter().filter(|&&v| v > 0.5).count() as u64, samples)
        } else {
            mean_se(&col)
        };
        report.estimate(format!("r={r}"), mean, se, samples);
        report.point(name, r as f64, mean, se);
    }
    for (i, w) in rs.windows(2).enumerate() {
        let diffs: Vec<f64> = rows.iter().map(|row| row[i + 1] - row[i]).collect();
        let (d, se) = mean_se(&diffs);
        report.margin(format!("E[r={}] - E[r={}]", w[1], w[0]), d, three_sigma(se), MarginKind::Statistical);
    }
    Ok(report)
}
