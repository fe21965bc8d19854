//! Exhaustive small-N solvers.
//!
//! Everything here enumerates all `q^N` assignments (or, for [`branch`],
//! searches them exactly with pruning). Sizes beyond [`SizeCaps`] are refused
//! with [`Error::SizeCap`]; nothing is silently truncated.

mod branch;
mod gibbs;
mod ground;

pub use branch::{is_satisfiable, max_value, SEARCH_NODE_LIMIT};
pub use gibbs::{gibbs_event_probability, log_partition, GibbsEvent, GibbsTable};
pub use ground::{
    edge_addition_value, ground_state, ising_levels, nae_equivalence, optimal_assignments, ClassRelation,
    EdgeAddition, GroundStateSummary, IsingLevels,
};

pub(crate) use gibbs::WeightTable;
pub(crate) use ground::{summary_from_table, levels_from_table};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::Instance;

/// Two Hamiltonian values closer than this (relative to magnitude) are the
/// same level. Only the Ising model produces non-integer values.
pub const VALUE_TOL: f64 = 1e-9;

pub(crate) fn same_value(a: f64, b: f64) -> bool {
    if a == b {
        return true;
    }
    if !a.is_finite() || !b.is_finite() {
        return false;
    }
    (a - b).abs() <= VALUE_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Enumeration limits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCaps {
    /// Largest N for binary models when only aggregates are needed.
    pub binary_values: usize,
    /// Largest N for binary models when a full value table or the optimal set is materialized.
    pub binary_materialize: usize,
    /// Largest N for models with q >= 3.
    pub qary: usize,
}

impl Default for SizeCaps {
    fn default() -> Self {
        SizeCaps { binary_values: 24, binary_materialize: 20, qary: 14 }
    }
}

impl SizeCaps {
    pub(crate) fn check(&self, n: usize, q: usize, materialize: bool) -> Result<()> {
        if q <= 2 {
            let limit = if materialize { self.binary_materialize } else { self.binary_values };
            if n > limit {
                let what = if materialize { "binary enumeration with materialized table" } else { "binary enumeration" };
                return Err(Error::SizeCap { what, limit, requested: n });
            }
        } else {
            if n > self.qary {
                return Err(Error::SizeCap { what: "q-ary enumeration", limit: self.qary, requested: n });
            }
            let total = (q as f64).powi(n as i32);
            if total > (1u64 << 24) as f64 {
                return Err(Error::SizeCap { what: "q^N assignments", limit: 1 << 24, requested: total as usize });
            }
        }
        Ok(())
    }
}

/// Number of assignments `q^N`.
pub(crate) fn assignment_count(n: usize, q: usize) -> usize {
    q.pow(n as u32)
}

/// Visits every assignment in mixed-radix order (node 0 is the least
/// significant digit); the callback receives the code and the digits.
pub(crate) fn for_each_assignment(n: usize, q: usize, mut f: impl FnMut(usize, &[u8])) {
    let total = assignment_count(n, q);
    let mut x = vec![0u8; n];
    for code in 0..total {
        f(code, &x);
        for d in x.iter_mut() {
            *d += 1;
            if (*d as usize) < q {
                break;
            }
            *d = 0;
        }
    }
}

pub(crate) fn decode(code: usize, n: usize, q: usize) -> Vec<u8> {
    let mut x = vec![0u8; n];
    let mut c = code;
    for d in x.iter_mut() {
        *d = (c % q) as u8;
        c /= q;
    }
    x
}

/// Hamiltonian of every assignment, indexed by code.
pub(crate) fn value_table(inst: &Instance, caps: &SizeCaps) -> Result<Vec<f64>> {
    caps.check(inst.n_nodes(), inst.spec().q, true)?;
    let mut table = Vec::with_capacity(assignment_count(inst.n_nodes(), inst.spec().q));
    for_each_assignment(inst.n_nodes(), inst.spec().q, |_, x| table.push(inst.eval_raw(x)));
    Ok(table)
}

/// Node subsets as sorted lists of 1-based labels, sorted lexicographically.
pub(crate) fn to_labels(classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = classes.iter().map(|c| c.iter().map(|v| v + 1).collect()).collect();
    for c in out.iter_mut() {
        c.sort_unstable();
    }
    out.sort();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mixed_radix_order() {
        let mut seen = Vec::new();
        for_each_assignment(2, 3, |c, x| seen.push((c, x.to_vec())));
        assert_eq!(seen.len(), 9);
        assert_eq!(seen[1], (1, vec![1, 0]));
        assert_eq!(seen[3], (3, vec![0, 1]));
        assert_eq!(decode(5, 2, 3), vec![2, 1]);
    }

    #[test]
    fn caps_refuse_large_sizes() {
        let caps = SizeCaps::default();
        assert!(caps.check(24, 2, false).is_ok());
        assert!(matches!(caps.check(25, 2, false), Err(Error::SizeCap { limit: 24, .. })));
        assert!(matches!(caps.check(21, 2, true), Err(Error::SizeCap { limit: 20, .. })));
        assert!(caps.check(14, 3, true).is_ok());
        assert!(caps.check(15, 3, true).is_err());
        assert!(caps.check(14, 4, true).is_err());
    }

    #[test]
    fn tolerance_groups_only_near_values() {
        assert!(same_value(0.3 * 5.0 + 1.0, -0.3 * 5.0 + 4.0));
        assert!(!same_value(1.0, 1.0 + 1e-6));
        assert!(same_value(f64::NEG_INFINITY, f64::NEG_INFINITY));
        assert!(!same_value(f64::NEG_INFINITY, 0.0));
    }
}
