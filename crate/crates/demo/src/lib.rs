//! WebAssembly bindings for the browser demo.
//!
//! Every export takes plain numbers and strings and returns a JSON document.
//! Failures come back as `{"error": "..."}` so the page never has to catch.

use serde_json::{json, Value};
use sparse_interp::exact::{ground_state, SizeCaps};
use sparse_interp::hypergraph::generate_er;
use sparse_interp::interpolate::{er_onestep_exact, StepMode};
use sparse_interp::models::{build_instance, ModelKind, ModelSpec};
use sparse_interp::verify::{check_sat_chain, limit_report, AnalyticSequence, SatEnsemble};
use wasm_bindgen::prelude::*;

fn finish(r: sparse_interp::Result<Value>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e.to_string() }).to_string(),
    }
}

/// Model with its usual parameters, `arity` overriding K for the CSPs.
fn spec_for(model: &str, arity: u32) -> sparse_interp::Result<ModelSpec> {
    let kind = ModelKind::parse(model)?;
    let mut spec = ModelSpec::default_for(kind);
    if arity > 0 && matches!(kind, ModelKind::Ksat | ModelKind::NaeKsat) {
        spec = if kind == ModelKind::Ksat { ModelSpec::ksat(arity as usize) } else { ModelSpec::nae_ksat(arity as usize) };
    }
    spec.validate()?;
    Ok(spec)
}

/// A random instance on `n` nodes with `m` edges, its ground state, and the
/// exact one-step comparison against the split `{1..n1} | {n1+1..n}`.
/// `lambda <= 0` selects the ground-state functional, otherwise `ln Z` at `lambda`.
#[wasm_bindgen]
pub fn one_step(model: &str, n: u32, m: u32, n1: u32, lambda: f64, seed: u32) -> String {
    finish((|| {
        let spec = spec_for(model, 0)?;
        let graph = generate_er(n as usize, m as usize, spec.k, u64::from(seed))?;
        let inst = build_instance(graph, spec, u64::from(seed))?;
        let caps = SizeCaps::default();
        let summary = ground_state(&inst, &caps)?;
        let mode = if lambda > 0.0 { StepMode::LogPartition { lambda } } else { StepMode::GroundState };
        let step = er_onestep_exact(&inst, n1 as usize, mode, &caps)?;
        let edges: Vec<Value> = inst
            .graph()
            .edges()
            .iter()
            .enumerate()
            .map(|(i, e)| json!({ "nodes": e.nodes(), "sign": inst.sign(i) }))
            .collect();
        Ok(json!({
            "model": inst.spec().kind.name(),
            "n": n,
            "n1": n1,
            "edges": edges,
            "ground_value": summary.value,
            "optimal_count": summary.optimal_count,
            "witness": summary.witness,
            "frozen_values": summary.frozen_values,
            "classes": summary.classes,
            "base_value": step.base_value,
            "lhs": step.lhs,
            "rhs": step.rhs,
            "margin": step.margin,
            "candidates": step.candidates,
            "formula_error": step.formula.as_ref().map(|f| f.error),
        }))
    })())
}

/// The near-superadditive limit report for one of the built-in sequences.
#[wasm_bindgen]
pub fn limit_curve(sequence: &str, n_max: u32, alpha: f64) -> String {
    finish((|| {
        let seq = AnalyticSequence::parse(sequence)?;
        let probe = seq.probe(n_max as usize, alpha, None)?;
        let report = limit_report(&probe, n_max as usize, seq.limit())?;
        Ok(serde_json::to_value(report).expect("report serializes"))
    })())
}

/// Exact satisfiability probabilities `p(N, M)` for `M = 0..=m_max` on the
/// directed ensemble, with the one-edge chain check.
#[wasm_bindgen]
pub fn sat_curve(model: &str, k: u32, n: u32, m_max: u32) -> String {
    finish((|| {
        let spec = spec_for(model, k)?;
        let report = check_sat_chain(n as usize, m_max as usize, &spec, SatEnsemble::Directed)?;
        Ok(serde_json::to_value(report).expect("report serializes"))
    })())
}
