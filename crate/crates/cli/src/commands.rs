use std::path::Path;

use serde_json::json;
use sparse_interp::exact::{ground_state, ising_levels, log_partition, max_value, GibbsTable, SizeCaps};
use sparse_interp::hypergraph::{
    generate_config_partial, generate_er, generate_er_interpolated, generate_er_simple, generate_regular, project,
    Hypergraph,
};
use sparse_interp::interpolate::{er_onestep_exact, reg_chain_run, StepMode};
use sparse_interp::models::{build_instance, Instance, ModelKind, ModelSpec};
use sparse_interp::verify::{self, AnalyticSequence, LadderEnsemble, SatEnsemble, SequenceProbe};

use crate::output::Doc;
use crate::{Analytic, CheckCommand, CliError, Command, EnsembleArg, GenEnsemble, ModelArgs};

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// An instance file, or a bare hypergraph file combined with `--model`.
fn load_instance(path: &Path, model: &ModelArgs, seed: u64) -> Result<Instance, CliError> {
    let text = read(path)?;
    let first = text.lines().map(str::trim).find(|l| !l.is_empty() && !l.starts_with('#')).unwrap_or("");
    if first.starts_with("model") {
        let inst = Instance::from_text(&text)?;
        if let Some(spec) = model.spec_opt()? {
            if spec != *inst.spec() {
                return Err(CliError::Usage(format!("--model disagrees with the model line of {}", path.display())));
            }
        }
        return Ok(inst);
    }
    let graph = Hypergraph::from_text(&text)?;
    let spec = model
        .spec_opt()?
        .ok_or_else(|| CliError::Usage(format!("{} is a bare hypergraph; pass --model", path.display())))?;
    Ok(build_instance(graph, spec, seed)?)
}

fn sat_ensemble(arg: Option<EnsembleArg>, spec: &ModelSpec) -> SatEnsemble {
    match arg {
        Some(EnsembleArg::Directed) => SatEnsemble::Directed,
        Some(EnsembleArg::Simple) => SatEnsemble::Simple,
        None => SatEnsemble::default_for(spec.kind),
    }
}

fn edge_count(m: Option<usize>, c: Option<f64>, n: usize) -> Result<usize, CliError> {
    match (m, c) {
        (Some(m), None) => Ok(m),
        (None, Some(c)) if c >= 0.0 && c.is_finite() => Ok((c * n as f64).floor() as usize),
        (None, Some(c)) => Err(CliError::Usage(format!("--c must be finite and non-negative, got {c}"))),
        (Some(_), Some(_)) => Err(CliError::Usage("give either --m or --c, not both".into())),
        (None, None) => Err(CliError::Usage("--m or --c is required".into())),
    }
}

fn need<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Usage(format!("{flag} is required")))
}

pub fn execute(cmd: &Command) -> Result<Doc, CliError> {
    match cmd {
        Command::Gen { ensemble, n, m, c, r, n1, t, seed, model } => {
            let spec = model.spec_opt()?;
            let k = spec.map(|s| s.k).or(model.k).unwrap_or(2);
            let graph = match ensemble {
                GenEnsemble::Er => generate_er(*n, edge_count(*m, *c, *n)?, k, *seed)?,
                GenEnsemble::ErSimple => generate_er_simple(*n, edge_count(*m, *c, *n)?, k, *seed)?,
                GenEnsemble::ErInterp => {
                    generate_er_interpolated(*n, edge_count(*m, *c, *n)?, need(*r, "--r")?, need(*n1, "--n1")?, k, *seed)?
                }
                GenEnsemble::Config => {
                    let r = need(*r, "--r")?;
                    let t = t.unwrap_or(n * r / k);
                    project(&generate_config_partial(*n, r, k, t, *seed)?)
                }
                GenEnsemble::Regular => generate_regular(*n, need(*r, "--r")?, k, *seed)?,
            };
            let body = match spec {
                Some(spec) => build_instance(graph, spec, *seed)?.to_text(),
                None => graph.to_text(),
            };
            Ok(Doc::Text { body, ok: true })
        }
        Command::Solve { input, seed, levels, model } => {
            let inst = load_instance(input, model, *seed)?;
            let caps = SizeCaps::default();
            let body = match ground_state(&inst, &caps) {
                Ok(summary) => {
                    let mut body = summary.to_json();
                    if *levels {
                        if inst.spec().kind != ModelKind::Ising {
                            return Err(CliError::Usage("--levels applies to the Ising model".into()));
                        }
                        body["ising_levels"] = serde_json::to_value(ising_levels(&inst, &caps)?).expect("json");
                    }
                    body
                }
                Err(sparse_interp::Error::SizeCap { .. }) if !*levels => {
                    // too large to enumerate: value only, from the exact search
                    let v = max_value(&inst)?;
                    json!({ "format": "ground-state-value v1", "value": v, "note": "optimal set not enumerated (size cap)" })
                }
                Err(e) => return Err(e.into()),
            };
            Ok(Doc::Json { body, ok: true })
        }
        Command::Logz { input, lambda, seed, table, model } => {
            let inst = load_instance(input, model, *seed)?;
            let caps = SizeCaps::default();
            let body = if *table {
                GibbsTable::new(&inst, *lambda, &caps)?.to_json()
            } else {
                json!({ "format": "log-partition v1", "lambda": lambda, "log_z": log_partition(&inst, *lambda, &caps)? })
            };
            Ok(Doc::Json { body, ok: true })
        }
        Command::InterpEr { input, n, m, n1, lambda, seed, model } => {
            let g0 = match input {
                Some(p) => load_instance(p, model, *seed)?,
                None => {
                    let spec = model.spec()?;
                    let graph = generate_er(need(*n, "--n (or --input)")?, need(*m, "--m")?, spec.k, *seed)?;
                    build_instance(graph, spec, *seed)?
                }
            };
            let mode = match lambda {
                Some(l) => StepMode::LogPartition { lambda: *l },
                None => StepMode::GroundState,
            };
            let res = er_onestep_exact(&g0, *n1, mode, &SizeCaps::default())?;
            let ok = res.margin >= -1e-12 && res.formula.as_ref().map_or(true, |f| f.error <= 1e-12);
            Ok(Doc::Json { body: serde_json::to_value(&res).expect("json"), ok })
        }
        Command::InterpReg { n, n1, r, k, t, seed } => {
            let trace = reg_chain_run(*n, *n1, *r, *k, *t, *seed)?;
            let ok = trace.verify_bookkeeping().is_ok();
            Ok(Doc::JsonLines { body: trace.to_json_lines(), ok })
        }
        Command::Check(check) => run_check(check).map(Doc::Report),
        Command::Satprob { n, m, samples, seed, ensemble, exact, model } => {
            let spec = model.spec()?;
            let ens = sat_ensemble(*ensemble, &spec);
            if *exact {
                let p = verify::exact_sat_prob_tiny(*n, *m, &spec, ens)?;
                let body = json!({
                    "format": "sat-probability v1",
                    "ensemble": ens.name(),
                    "n": n,
                    "m": m,
                    "exact": p.to_string(),
                    "value": num_to_f64(&p),
                });
                return Ok(Doc::Json { body, ok: true });
            }
            Ok(Doc::Report(verify::estimate_sat_prob(*n, *m, &spec, *samples, *seed, ens)?))
        }
        Command::Limit { sequence, analytic, alpha, constant, n_max, known } => {
            let (probe, default_n, default_known) = match (sequence, analytic) {
                (Some(path), None) => {
                    let probe = SequenceProbe::from_csv(&read(path)?, *alpha, constant.unwrap_or(0.0))?;
                    let last = (1..).take_while(|n| probe.values.contains_key(n)).last().unwrap_or(0);
                    (probe, last, None)
                }
                (None, Some(a)) => {
                    let seq = match a {
                        Analytic::Linear => AnalyticSequence::Linear,
                        Analytic::Sqrt => AnalyticSequence::Sqrt,
                        Analytic::Log => AnalyticSequence::Log,
                        Analytic::Noise => AnalyticSequence::Noise,
                        Analytic::Oscillating => AnalyticSequence::Oscillating,
                    };
                    let top = n_max.unwrap_or(512);
                    (seq.probe(top, *alpha, *constant)?, top, seq.limit())
                }
                _ => return Err(CliError::Usage("give exactly one of --sequence and --analytic".into())),
            };
            let n = n_max.unwrap_or(default_n);
            Ok(Doc::Report(verify::limit_report(&probe, n, known.or(default_known))?))
        }
    }
}

fn num_to_f64(p: &num::BigRational) -> f64 {
    use num::ToPrimitive;
    p.to_f64().unwrap_or(f64::NAN)
}

fn run_check(check: &CheckCommand) -> Result<sparse_interp::verify::CheckReport, CliError> {
    use CheckCommand as C;
    Ok(match check {
        C::SuperaddEr { model, n, n1, c, samples, seed, satisfiability } => {
            verify::check_superadditivity_er(*n, *n1, *c, &model.spec()?, *samples, *seed, *satisfiability)?
        }
        C::SuperaddReg { model, n, n1, r, samples, seed, constant } => {
            verify::check_superadditivity_reg(*n, *n1, *r, &model.spec()?, *samples, *seed, *constant)?
        }
        C::ErChain { model, n, n1, c, r_values, samples, seed, satisfiability } => {
            let rs = match r_values {
                Some(v) => v.clone(),
                None => (0..=(c * *n as f64).floor() as usize).collect(),
            };
            sparse_interp::interpolate::er_chain_mc(*n, *c, *n1, &model.spec()?, &rs, *samples, *seed, *satisfiability)?
        }
        C::OnestepEr { model, instances, n_max, m_max, lambda, seed } => {
            let mode = lambda.map_or(StepMode::GroundState, |l| StepMode::LogPartition { lambda: l });
            verify::onestep_er_suite(&model.spec()?, *instances, *n_max, *m_max, mode, *seed)?
        }
        C::OnestepReg { configs, seed } => verify::reg_onestep_suite(*configs, *seed)?,
        C::RegChain { runs, n, n1, r, k, t, seed } => verify::reg_chain_suite(*runs, *n, *n1, *r, *k, *t, *seed)?,
        C::IsingLemma { instances, n_max, betas, fields, seed } => {
            verify::ising_lemma_suite(*instances, *n_max, betas, fields, *seed)?
        }
        C::LogzSandwich { instances, n_max, m_max, lambdas, seed } => {
            verify::logz_sandwich_suite(*instances, *n_max, *m_max, lambdas, *seed)?
        }
        C::LemmaA1 { model, n, m, extra, delta, ensemble } => {
            let spec = model.spec()?;
            verify::check_lemma_a1(*n, *m, *extra, *delta, &spec, sat_ensemble(*ensemble, &spec))?
        }
        C::SatChain { model, n, m_max, ensemble } => {
            let spec = model.spec()?;
            verify::check_sat_chain(*n, *m_max, &spec, sat_ensemble(Some(*ensemble), &spec))?
        }
        C::Unusual { n, m, q, delta } => verify::unusual_probability_report(*n, *m, *q, *delta)?,
        C::Monotone { model, n, m_ladder, samples, seed } => {
            verify::monotone_in_edges(&model.spec()?, *n, m_ladder, *samples, *seed)?
        }
        C::Concentration { model, sizes, c, r, samples, seed } => {
            let ensemble = match (c, r) {
                (Some(c), None) => LadderEnsemble::ErdosRenyi { c: *c },
                (None, Some(r)) => LadderEnsemble::Regular { r: *r },
                _ => return Err(CliError::Usage("give exactly one of --c and --r".into())),
            };
            verify::concentration_report(sizes, ensemble, &model.spec()?, *samples, *seed)?
        }
        C::EditBound { model, n, m, edits, samples, seed } => {
            verify::edit_distance_bound(&model.spec()?, *n, *m, *edits, *samples, *seed)?
        }
    })
}
