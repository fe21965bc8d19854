use rand::seq::index;
use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hypergraph::{project, sample_config_partial, ConfigurationState, Hypergraph};
use crate::rng::{rng_from_seed, Rng};

/// Number of cross edges of each type `(K1, K2)` at the start of the chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhaseCount {
    pub k1: usize,
    pub k2: usize,
    pub count: usize,
}

/// One step of the regular-graph chain. `z_*` are isolated-clone counts
/// `(Z_1, Z_2)` before the step, right after the deletion, and after the insertion.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegStep {
    pub t: usize,
    pub phase: (usize, usize),
    pub deleted: Vec<u32>,
    /// 1 or 2; `None` on the failing step.
    pub side: Option<u8>,
    pub inserted: Vec<u32>,
    pub z_before: (usize, usize),
    pub z_at_deletion: (usize, usize),
    pub z_after: (usize, usize),
    /// The inserted edge joins two clones of one node.
    pub repeated_node: bool,
}

/// Full record of one run of the regular-graph interpolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegInterpolationTrace {
    pub n: usize,
    pub n1: usize,
    pub r: usize,
    pub k: usize,
    /// Size `T` of the initial partial matching.
    pub t_edges: usize,
    pub seed: u64,
    /// Schedule frozen at the start, phases `(1, K-1)` through `(K-1, 1)`.
    pub phases: Vec<PhaseCount>,
    pub initial: ConfigurationState,
    pub steps: Vec<RegStep>,
    /// Step at which fewer than `K` isolated clones remained in a part.
    pub failed_at: Option<usize>,
    pub final_state: ConfigurationState,
}

/// `T = N r / K - floor(N^(2/3) / K)`.
pub fn default_t(n: usize, r: usize, k: usize) -> usize {
    let cut = ((n as f64).powf(2.0 / 3.0) / k as f64).floor() as usize;
    (n * r / k).saturating_sub(cut)
}

pub(crate) fn check_regular_split(n: usize, n1: usize, r: usize, k: usize) -> Result<()> {
    if n1 < 1 || n1 >= n {
        return Err(invalid(format!("N1 = {n1} must lie in 1..={}", n.saturating_sub(1))));
    }
    if k < 2 || r < 1 {
        return Err(invalid("need K >= 2 and r >= 1"));
    }
    for (label, size) in [("N", n), ("N1", n1), ("N2", n - n1)] {
        if (size * r) % k != 0 {
            return Err(Error::Integrality(format!("{label} r / K = {size}*{r}/{k} is not an integer")));
        }
    }
    Ok(())
}

fn part_of(clone: u32, n1: usize, r: usize) -> usize {
    usize::from(clone as usize >= n1 * r)
}

fn cross_type(group: &[u32], n1: usize, r: usize) -> usize {
    group.iter().filter(|&&c| part_of(c, n1, r) == 0).count()
}

/// Runs the chain: for each phase `(K1, K2)` delete a uniform remaining cross
/// edge of that type, then join `K` uniform isolated clones inside part 1 with
/// probability `K1/K`, else inside part 2. Stops, with the deletion undone,
/// as soon as a part has fewer than `K` isolated clones after a deletion.
pub fn reg_chain_run(n: usize, n1: usize, r: usize, k: usize, t_override: Option<usize>, seed: u64) -> Result<RegInterpolationTrace> {
    check_regular_split(n, n1, r, k)?;
    let t_edges = t_override.unwrap_or_else(|| default_t(n, r, k));
    let mut rng = rng_from_seed(seed);
    let initial = sample_config_partial(n, r, k, t_edges, &mut rng)?;
    let mut trace = run_from(initial, n1, &mut rng)?;
    trace.seed = seed;
    Ok(trace)
}

pub(crate) fn run_from(initial: ConfigurationState, n1: usize, rng: &mut Rng) -> Result<RegInterpolationTrace> {
    let (n, r, k) = (initial.n_nodes(), initial.degree_bound(), initial.arity());
    check_regular_split(n, n1, r, k)?;
    let phases: Vec<PhaseCount> = (1..k)
        .map(|k1| PhaseCount {
            k1,
            k2: k - k1,
            count: initial.matching().iter().filter(|g| cross_type(g, n1, r) == k1).count(),
        })
        .collect();
    let mut state = initial.clone();
    let mut iso: [Vec<u32>; 2] = [Vec::new(), Vec::new()];
    for c in state.isolated_clones() {
        iso[part_of(c, n1, r)].push(c);
    }
    let mut steps = Vec::new();
    let mut failed_at = None;
    let mut t = 0;
    'phases: for ph in &phases {
        for _ in 0..ph.count {
            t += 1;
            let z_before = (iso[0].len(), iso[1].len());
            let candidates: Vec<usize> = state
                .matching()
                .iter()
                .enumerate()
                .filter(|(_, g)| cross_type(g, n1, r) == ph.k1)
                .map(|(i, _)| i)
                .collect();
            let idx = candidates[rng.gen_range(0..candidates.len())];
            let deleted = state.remove_group(idx);
            for &c in &deleted {
                iso[part_of(c, n1, r)].push(c);
            }
            let z_at = (iso[0].len(), iso[1].len());
            if z_at.0 < k || z_at.1 < k {
                for &c in deleted.iter().rev() {
                    let popped = iso[part_of(c, n1, r)].pop();
                    debug_assert_eq!(popped, Some(c));
                }
                state.insert_group_at(idx, deleted.clone());
                steps.push(RegStep {
                    t,
                    phase: (ph.k1, ph.k2),
                    deleted,
                    side: None,
                    inserted: Vec::new(),
                    z_before,
                    z_at_deletion: z_at,
                    z_after: z_before,
                    repeated_node: false,
                });
                failed_at = Some(t);
                break 'phases;
            }
            let side = if rng.gen_range(0..k) < ph.k1 { 0 } else { 1 };
            let pool = &mut iso[side];
            let mut picks: Vec<usize> = index::sample(rng, pool.len(), k).into_vec();
            let inserted: Vec<u32> = picks.iter().map(|&i| pool[i]).collect();
            picks.sort_unstable_by(|a, b| b.cmp(a));
            for i in picks {
                pool.swap_remove(i);
            }
            let mut owners: Vec<u32> = inserted.iter().map(|&c| state.owner(c)).collect();
            owners.sort_unstable();
            let repeated_node = owners.windows(2).any(|w| w[0] == w[1]);
            state.push_group(inserted.clone());
            steps.push(RegStep {
                t,
                phase: (ph.k1, ph.k2),
                deleted,
                side: Some(side as u8 + 1),
                inserted,
                z_before,
                z_at_deletion: z_at,
                z_after: (iso[0].len(), iso[1].len()),
                repeated_node,
            });
        }
    }
    Ok(RegInterpolationTrace {
        n,
        n1,
        r,
        k,
        t_edges: initial.matching().len(),
        seed: 0,
        phases,
        initial,
        steps,
        failed_at,
        final_state: state,
    })
}

impl RegInterpolationTrace {
    /// Number of cross edges at the start.
    pub fn t0(&self) -> usize {
        self.phases.iter().map(|p| p.count).sum()
    }

    /// Last index of the padded chain, `min_j N_j r`.
    pub fn horizon(&self) -> usize {
        self.n1.min(self.n - self.n1) * self.r
    }

    pub fn final_graph(&self) -> Hypergraph {
        project(&self.final_state)
    }

    /// The matching of `G(N, T, t)`: steps are replayed up to `t`; after a
    /// failure or past the last step the state stays frozen.
    pub fn state_at(&self, t: usize) -> ConfigurationState {
        let mut s = self.initial.clone();
        for step in self.steps.iter().take_while(|st| st.t <= t) {
            if step.side.is_none() {
                break;
            }
            let idx = s.matching().iter().position(|g| g == &step.deleted).expect("deleted group present");
            s.remove_group(idx);
            s.push_group(step.inserted.clone());
        }
        s
    }

    /// Checks every step against the increment law: the deletion adds `K_j`
    /// isolated clones to part `j`, the insertion removes `K` from the chosen part.
    pub fn verify_bookkeeping(&self) -> std::result::Result<(), String> {
        let k = self.k;
        for st in &self.steps {
            let (k1, k2) = st.phase;
            if st.z_at_deletion != (st.z_before.0 + k1, st.z_before.1 + k2) {
                return Err(format!("step {}: deletion increments {:?} -> {:?}", st.t, st.z_before, st.z_at_deletion));
            }
            match st.side {
                None => {
                    if st.z_at_deletion.0 >= k && st.z_at_deletion.1 >= k {
                        return Err(format!("step {}: failure declared with enough isolated clones", st.t));
                    }
                    if Some(st.t) != self.failed_at {
                        return Err(format!("step {}: failure step does not match failed_at", st.t));
                    }
                }
                Some(side) => {
                    let expect = if side == 1 { (st.z_before.0 + k1 - k, st.z_before.1 + k2) } else { (st.z_before.0 + k1, st.z_before.1 + k2 - k) };
                    if st.z_after != expect {
                        return Err(format!("step {}: insertion gives {:?}, expected {:?}", st.t, st.z_after, expect));
                    }
                }
            }
        }
        Ok(())
    }

    /// Header line, one line per step, footer line; each line is a JSON object.
    pub fn to_json_lines(&self) -> String {
        let header = serde_json::json!({
            "format": "regular-interpolation-trace v1",
            "n": self.n, "n1": self.n1, "r": self.r, "k": self.k,
            "t_edges": self.t_edges, "seed": self.seed,
            "phases": self.phases,
            "initial_matching": self.initial.matching(),
        });
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for st in &self.steps {
            out.push_str(&serde_json::to_string(st).expect("step serializes"));
            out.push('\n');
        }
        let footer = serde_json::json!({
            "failed_at": self.failed_at,
            "steps": self.steps.len(),
            "final_matching": self.final_state.matching(),
        });
        out.push_str(&serde_json::to_string(&footer).expect("footer serializes"));
        out.push('\n');
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_uniform_conserves_total_isolated() {
        let tr = reg_chain_run(24, 12, 3, 2, None, 4).unwrap();
        assert_eq!(tr.phases.len(), 1);
        tr.verify_bookkeeping().unwrap();
        for st in tr.steps.iter().filter(|s| s.side.is_some()) {
            assert_eq!(st.z_after.0 + st.z_after.1, st.z_before.0 + st.z_before.1);
        }
    }

    #[test]
    fn full_matching_fails_at_first_step() {
        // T = N r / K leaves no isolated clones: the first deletion frees K_j < K per part
        let tr = reg_chain_run(2, 1, 2, 2, Some(2), 0).unwrap();
        if tr.t0() > 0 {
            assert_eq!(tr.failed_at, Some(1));
            assert_eq!(tr.final_state, tr.initial);
        }
        tr.verify_bookkeeping().unwrap();
    }

    #[test]
    fn frozen_after_failure_and_padding() {
        for seed in 0..40 {
            let tr = reg_chain_run(12, 6, 2, 3, Some(6), seed).unwrap();
            tr.verify_bookkeeping().unwrap();
            let last = tr.steps.len();
            let frozen = tr.state_at(last);
            assert_eq!(project(&frozen).n_edges(), tr.final_graph().n_edges());
            for t in last..=tr.horizon().max(last) {
                let mut a = tr.state_at(t).matching().to_vec();
                let mut b = tr.final_state.matching().to_vec();
                a.sort();
                b.sort();
                assert_eq!(a, b);
            }
        }
    }

    #[test]
    fn integrality_checked() {
        assert!(matches!(reg_chain_run(5, 2, 1, 2, None, 0), Err(Error::Integrality(_))));
        assert!(reg_chain_run(6, 6, 1, 2, None, 0).is_err());
    }

    #[test]
    fn trace_lines() {
        let tr = reg_chain_run(16, 8, 3, 2, None, 1).unwrap();
        let text = tr.to_json_lines();
        assert_eq!(text.lines().count(), tr.steps.len() + 2);
        assert!(text.starts_with("{\"format\":\"regular-interpolation-trace v1\""));
    }
}
