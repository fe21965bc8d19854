//! Emission of results: a run header, the effective configuration, then the body.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use serde_json::json;
use sparse_interp::verify::{CheckReport, RunHeader, Verdict};

use crate::{CliError, GlobalArgs};

/// What a subcommand produced.
pub enum Doc {
    Report(CheckReport),
    /// Structured result with a success flag.
    Json { body: serde_json::Value, ok: bool },
    /// Line-oriented text (hypergraphs, instances) with a success flag.
    Text { body: String, ok: bool },
    /// One JSON object per line, with a success flag.
    JsonLines { body: String, ok: bool },
}

pub struct Run {
    command: String,
    config: BTreeMap<String, String>,
    started: Instant,
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

impl Run {
    pub fn new(command: String, config: BTreeMap<String, String>) -> Self {
        Run { command, config, started: Instant::now() }
    }

    fn config_json(&self) -> serde_json::Value {
        json!({ "command": self.command, "values": self.config })
    }

    /// Comment lines echoing the tool version and configuration.
    fn text_preamble(&self) -> String {
        let mut s = format!("# {} {}\n# command: {}\n", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION"), self.command);
        for (k, v) in &self.config {
            s.push_str(&format!("# config: {k} = {v}\n"));
        }
        s
    }

    pub fn emit(self, doc: Doc, global: &GlobalArgs) -> Result<i32, CliError> {
        let header = RunHeader::now(self.started.elapsed());
        let (text, code, summary) = match &doc {
            Doc::Report(report) => {
                let body = serde_json::to_value(report).expect("report serializes");
                let envelope = json!({ "header": header, "config": self.config_json(), "report": body });
                let text = serde_json::to_string_pretty(&envelope).expect("json") + "\n";
                (text, report.verdict.exit_code(), format!("{}: {}", report.name, report.verdict))
            }
            Doc::Json { body, ok } => {
                let envelope = json!({ "header": header, "config": self.config_json(), "result": body });
                let text = serde_json::to_string_pretty(&envelope).expect("json") + "\n";
                (text, i32::from(!ok), format!("{}: {}", self.command, if *ok { Verdict::Pass } else { Verdict::Fail }))
            }
            Doc::JsonLines { body, ok } => {
                let first = json!({
                    "format": "run-config v1",
                    "tool": env!("CARGO_PKG_NAME"),
                    "version": env!("CARGO_PKG_VERSION"),
                    "config": self.config_json(),
                });
                (format!("{first}\n{body}"), i32::from(!ok), format!("{}: {}", self.command, if *ok { "done" } else { "fail" }))
            }
            Doc::Text { body, ok } => {
                (self.text_preamble() + body, i32::from(!ok), format!("{}: {}", self.command, if *ok { "done" } else { "fail" }))
            }
        };
        match (&doc, &global.csv, &global.emit_plot_data) {
            (Doc::Report(r), csv, plot) => {
                if let Some(p) = csv {
                    write(p, &r.to_csv())?;
                }
                if let Some(p) = plot {
                    write(p, &r.plot_csv())?;
                }
            }
            (_, None, None) => {}
            _ => return Err(CliError::Usage("--csv and --emit-plot-data apply to commands that produce a report".into())),
        }
        match &global.out {
            Some(p) => {
                write(p, &text)?;
                println!("{summary}");
            }
            None => print!("{text}"),
        }
        Ok(code)
    }
}
