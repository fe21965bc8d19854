use serde::Serialize;

use super::{assignment_count, for_each_assignment, value_table, SizeCaps};
use crate::error::{invalid, Result};
use crate::models::{pack_bits, Instance};

/// Event on the assignment of a few nodes, used for Gibbs probabilities.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum GibbsEvent {
    /// Every listed node takes value 1.
    AllOnes(Vec<usize>),
    /// All listed nodes take one common value.
    AllEqual(Vec<usize>),
    /// The listed nodes take exactly the packed bit pattern (bit `p` is node `p`).
    Pattern { nodes: Vec<usize>, pattern: u32 },
    /// The listed nodes take the packed pattern or its complement.
    PatternOrComplement { nodes: Vec<usize>, pattern: u32 },
}

impl GibbsEvent {
    pub fn holds(&self, x: &[u8]) -> bool {
        match self {
            GibbsEvent::AllOnes(nodes) => nodes.iter().all(|&v| x[v] == 1),
            GibbsEvent::AllEqual(nodes) => nodes.iter().all(|&v| x[v] == x[nodes[0]]),
            GibbsEvent::Pattern { nodes, pattern } => packed(nodes, x) == *pattern,
            GibbsEvent::PatternOrComplement { nodes, pattern } => {
                let p = packed(nodes, x);
                let full = (1u32 << nodes.len()) - 1;
                p == *pattern || p == pattern ^ full
            }
        }
    }

    fn max_node(&self) -> Option<usize> {
        match self {
            GibbsEvent::AllOnes(n) | GibbsEvent::AllEqual(n) => n.iter().copied().max(),
            GibbsEvent::Pattern { nodes, .. } | GibbsEvent::PatternOrComplement { nodes, .. } => {
                nodes.iter().copied().max()
            }
        }
    }
}

fn packed(nodes: &[usize], x: &[u8]) -> u32 {
    let vals: Vec<u8> = nodes.iter().map(|&v| x[v]).collect();
    pack_bits(&vals)
}

fn check_lambda(lambda: f64) -> Result<f64> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(invalid(format!("lambda must be positive and finite, got {lambda}")));
    }
    Ok(lambda.ln())
}

/// `ln Z(G) = ln sum_x lambda^{H(x)}`, assignments with `H = -inf` weigh 0.
pub fn log_partition(inst: &Instance, lambda: f64, caps: &SizeCaps) -> Result<f64> {
    let ln_lambda = check_lambda(lambda)?;
    caps.check(inst.n_nodes(), inst.spec().q, false)?;
    // online logsumexp
    let mut shift = f64::NEG_INFINITY;
    let mut acc = 0.0f64;
    for_each_assignment(inst.n_nodes(), inst.spec().q, |_, x| {
        let h = inst.eval_raw(x);
        if h == f64::NEG_INFINITY {
            return;
        }
        let t = h * ln_lambda;
        if t > shift {
            acc = acc * (shift - t).exp() + 1.0;
            shift = t;
        } else {
            acc += (t - shift).exp();
        }
    });
    Ok(shift + acc.ln())
}

/// Normalized Gibbs weights over all assignments.
#[derive(Debug, Clone)]
pub(crate) struct WeightTable {
    pub n: usize,
    pub q: usize,
    pub log_z: f64,
    /// `mu(x)` indexed by assignment code.
    pub probs: Vec<f64>,
}

impl WeightTable {
    pub fn new(inst: &Instance, lambda: f64, caps: &SizeCaps) -> Result<Self> {
        let ln_lambda = check_lambda(lambda)?;
        let values = value_table(inst, caps)?;
        Ok(Self::from_values(inst.n_nodes(), inst.spec().q, &values, ln_lambda))
    }

    pub fn from_values(n: usize, q: usize, values: &[f64], ln_lambda: f64) -> Self {
        let shift = values
            .iter()
            .filter(|h| h.is_finite())
            .map(|h| h * ln_lambda)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut probs: Vec<f64> =
            values.iter().map(|&h| if h.is_finite() { (h * ln_lambda - shift).exp() } else { 0.0 }).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        WeightTable { n, q, log_z: shift + total.ln(), probs }
    }

    pub fn probability(&self, event: &GibbsEvent) -> f64 {
        let mut p = 0.0;
        for_each_assignment(self.n, self.q, |code, x| {
            if self.probs[code] > 0.0 && event.holds(x) {
                p += self.probs[code];
            }
        });
        p
    }
}

/// Gibbs measure of a small instance at fugacity `lambda`.
#[derive(Debug, Clone, Serialize)]
pub struct GibbsTable {
    pub lambda: f64,
    pub log_z: f64,
    /// Probability of each assignment, indexed by its mixed-radix code (node 0 least significant).
    pub probabilities: Vec<f64>,
}

impl GibbsTable {
    pub fn new(inst: &Instance, lambda: f64, caps: &SizeCaps) -> Result<Self> {
        let w = WeightTable::new(inst, lambda, caps)?;
        debug_assert_eq!(w.probs.len(), assignment_count(inst.n_nodes(), inst.spec().q));
        Ok(GibbsTable { lambda, log_z: w.log_z, probabilities: w.probs })
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "format": "gibbs-table v1",
            "lambda": self.lambda,
            "log_z": self.log_z,
            "probabilities": self.probabilities,
        })
    }
}

/// `mu_G(event)` under the Gibbs measure at fugacity `lambda`.
pub fn gibbs_event_probability(inst: &Instance, lambda: f64, event: &GibbsEvent, caps: &SizeCaps) -> Result<f64> {
    if event.max_node().map_or(false, |v| v >= inst.n_nodes()) {
        return Err(invalid("event refers to a node outside the instance"));
    }
    Ok(WeightTable::new(inst, lambda, caps)?.probability(event))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypergraph::{Hyperedge, Hypergraph};
    use crate::models::{ModelSpec, PotentialAssignment};
    use num::{BigInt, BigRational, ToPrimitive};

    fn triangle(spec: ModelSpec) -> Instance {
        let edges = vec![Hyperedge::new(vec![0, 1]), Hyperedge::new(vec![1, 2]), Hyperedge::new(vec![0, 2])];
        Instance::new(Hypergraph::new(3, 2, edges).unwrap(), spec, PotentialAssignment::none()).unwrap()
    }

    #[test]
    fn independent_set_partition_on_triangle() {
        // independent sets of a triangle: empty + 3 singletons
        let inst = triangle(ModelSpec::independent_set());
        let lz = log_partition(&inst, 2.0, &SizeCaps::default()).unwrap();
        assert!((lz - (1.0f64 + 3.0 * 2.0).ln()).abs() < 1e-12);
    }

    #[test]
    fn max_cut_partition_matches_rational_count() {
        // triangle cut values: 2 assignments cut 0 edges, 6 cut 2 edges
        let inst = triangle(ModelSpec::max_cut());
        let lambda = BigRational::new(BigInt::from(3), BigInt::from(2));
        let z = BigRational::from_integer(BigInt::from(2)) + BigRational::from_integer(BigInt::from(6)) * &lambda * &lambda;
        let expect = z.to_f64().unwrap().ln();
        let lz = log_partition(&inst, 1.5, &SizeCaps::default()).unwrap();
        assert!((lz - expect).abs() < 1e-12);
    }

    #[test]
    fn event_probability_sums() {
        let inst = triangle(ModelSpec::max_cut());
        let caps = SizeCaps::default();
        let p_eq = gibbs_event_probability(&inst, 1.5, &GibbsEvent::AllEqual(vec![0, 1]), &caps).unwrap();
        // x0 == x1 in the 2 monochromatic states and in (0,0,1), (1,1,0), which cut 2 edges
        let expect = (2.0 + 2.0 * 2.25) / (2.0 + 6.0 * 2.25);
        assert!((p_eq - expect).abs() < 1e-12);
        let t = GibbsTable::new(&inst, 1.5, &caps).unwrap();
        assert!((t.probabilities.iter().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bad_lambda_rejected() {
        let inst = triangle(ModelSpec::max_cut());
        assert!(log_partition(&inst, 0.0, &SizeCaps::default()).is_err());
        assert!(log_partition(&inst, f64::NAN, &SizeCaps::default()).is_err());
    }
}
