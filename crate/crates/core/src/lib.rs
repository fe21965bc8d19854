//! Interpolation experiments for ground states and log-partition functions of
//! Markov random fields on sparse random hypergraphs.
//!
//! The crate generates Erdős–Rényi and configuration-model hypergraphs, solves
//! small instances exactly, runs the interpolation chains that compare a graph
//! with a disjoint union of two smaller ones, and turns the results into
//! checks with explicit verdicts.

pub mod error;
pub mod exact;
pub mod hypergraph;
pub mod interpolate;
pub mod models;
pub mod rng;
pub mod verify;

pub use error::{Error, Result};
