//! Interpolation between a graph on `[N]` and a disjoint pair on `[N1]` and
//! `{N1+1..N}`.
//!
//! The Erdős–Rényi chain `G(N, M, r)` keeps the first `r` edges uniform and
//! sends the rest into one of the two blocks. The regular-graph chain trades
//! cross edges of a configuration-model matching for edges inside the parts.
//! The one-step functions enumerate the insertion randomness exactly,
//! conditional on the graph `G0` left after a deletion.

mod chain;
mod onestep;
mod regular;

pub use chain::{er_chain_mc, CoupledChain};
pub use onestep::{
    er_onestep_exact, reg_onestep_exact, ErStepResult, FormulaCheck, LogSeries, RegularStep, SatStep, StepMode,
};
pub use regular::{default_t, reg_chain_run, PhaseCount, RegInterpolationTrace, RegStep};

pub(crate) use chain::check_chain_params;
pub(crate) use regular::check_regular_split;
