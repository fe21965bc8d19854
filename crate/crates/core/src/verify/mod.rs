//! Checks with explicit verdicts: superadditivity of expectations,
//! satisfiability probabilities, the tiny-scale appendix lemmas and the
//! near-superadditive limit machinery.

mod limit;
mod report;
mod sat;
mod stats;
mod suites;
mod superadd;

pub use limit::{limit_report, AnalyticSequence, near_superadditive_limit, LimitEstimate, SequenceProbe, WorstSplit};
pub use report::{CheckReport, Estimate, Margin, MarginKind, PlotPoint, ReportEnvelope, RunHeader, Verdict};
pub use stats::{mean_se, par_trials, proportion, std_dev, three_sigma};
pub use sat::{
    check_lemma_a1, check_sat_chain, delta_unusual, entropy, estimate_sat_prob, exact_sat_prob_tiny, sat_chain_factor,
    unusual_probability_report, SatEnsemble, TINY_ASSIGNMENT_LIMIT, TINY_WORK_LIMIT,
};
pub use superadd::{
    check_superadditivity_er, check_superadditivity_reg, concentration_report, edit_distance_bound, monotone_in_edges,
    LadderEnsemble,
};
pub use suites::{ising_lemma_suite, logz_sandwich_suite, onestep_er_suite, reg_chain_suite, reg_onestep_suite};
