use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::rng::GENERATOR_VERSION;

/// Outcome of a check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Fail => 1,
            _ => 0,
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// How a margin enters the verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarginKind {
    /// Statistical comparison; the slack is three standard errors.
    Statistical,
    /// Exact comparison done in floating point or rationals.
    Exact,
    /// Depends on an unquantified lower-order term; a negative value makes
    /// the verdict inconclusive rather than failing.
    Unquantified,
    /// Reported only.
    Diagnostic,
}

/// A point estimate with its standard error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub name: String,
    pub value: f64,
    pub std_error: f64,
    pub count: u64,
}

/// An inequality written as `value >= -slack`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Margin {
    pub name: String,
    pub value: f64,
    pub slack: f64,
    pub kind: MarginKind,
    pub holds: bool,
}

/// One `(x, y, yerr)` point of a plotted series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotPoint {
    pub series: String,
    pub x: f64,
    pub y: f64,
    pub yerr: f64,
}

/// Result of a verification run. Contains nothing time-dependent, so equal
/// inputs give byte-identical serializations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    pub parameters: BTreeMap<String, serde_json::Value>,
    pub seed: Option<u64>,
    pub generator: String,
    pub estimates: Vec<Estimate>,
    pub margins: Vec<Margin>,
    pub notes: Vec<String>,
    pub plot: Vec<PlotPoint>,
    pub verdict: Verdict,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, seed: Option<u64>) -> Self {
        CheckReport {
            name: name.into(),
            parameters: BTreeMap::new(),
            seed,
            generator: GENERATOR_VERSION.to_string(),
            estimates: Vec::new(),
            margins: Vec::new(),
            notes: Vec::new(),
            plot: Vec::new(),
            verdict: Verdict::Pass,
        }
    }

    pub fn param(mut self, key: &str, value: impl Serialize) -> Self {
        self.parameters.insert(key.to_string(), serde_json::to_value(value).expect("serializable parameter"));
        self
    }

    pub fn estimate(&mut self, name: impl Into<String>, value: f64, std_error: f64, count: u64) {
        self.estimates.push(Estimate { name: name.into(), value, std_error, count });
    }

    /// Records `value >= -slack` and updates the verdict.
    pub fn margin(&mut self, name: impl Into<String>, value: f64, slack: f64, kind: MarginKind) -> bool {
        let holds = value >= -slack;
        self.margins.push(Margin { name: name.into(), value, slack, kind, holds });
        match (kind, holds) {
            (MarginKind::Statistical | MarginKind::Exact, false) => self.verdict = Verdict::Fail,
            (MarginKind::Unquantified, false) if self.verdict == Verdict::Pass => self.verdict = Verdict::Inconclusive,
            _ => {}
        }
        holds
    }

    /// Forces a failure with an explanation.
    pub fn fail(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
        self.verdict = Verdict::Fail;
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn point(&mut self, series: &str, x: f64, y: f64, yerr: f64) {
        self.plot.push(PlotPoint { series: series.to_string(), x, y, yerr });
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }

    /// Pretty JSON of the report body.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One CSV row per estimate: `report,estimate,value,std_error,count`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("report,estimate,value,std_error,count\n");
        for e in &self.estimates {
            let _ = writeln!(s, "{},{},{},{},{}", csv_field(&self.name), csv_field(&e.name), e.value, e.std_error, e.count);
        }
        s
    }

    /// `series,x,y,yerr` rows.
    pub fn plot_csv(&self) -> String {
        let mut s = String::from("series,x,y,yerr\n");
        for p in &self.plot {
            let _ = writeln!(s, "{},{},{},{}", csv_field(&p.series), p.x, p.y, p.yerr);
        }
        s
    }
}

/// Quotes a CSV field when it holds a comma, quote or line break.
fn csv_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\"")).into()
    } else {
        s.into()
    }
}

/// Run metadata kept apart from the report body.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub tool: String,
    pub version: String,
    pub unix_time: u64,
    pub runtime_ms: u64,
}

impl RunHeader {
    pub fn now(runtime: Duration) -> Self {
        RunHeader {
            tool: "sparse-interp".to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            unix_time: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            runtime_ms: runtime.as_millis() as u64,
        }
    }
}

/// Header plus body, as written to report files.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportEnvelope {
    pub header: RunHeader,
    pub report: CheckReport,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_follows_margins() {
        let mut r = CheckReport::new("t", Some(1));
        r.margin("a", 0.5, 0.0, MarginKind::Exact);
        assert_eq!(r.verdict, Verdict::Pass);
        r.margin("b", -0.1, 0.05, MarginKind::Unquantified);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        r.margin("c", -0.1, 0.2, MarginKind::Statistical);
        assert_eq!(r.verdict, Verdict::Inconclusive);
        r.margin("d", -0.3, 0.2, MarginKind::Statistical);
        assert_eq!(r.verdict, Verdict::Fail);
        r.margin("e", -9.0, 0.0, MarginKind::Diagnostic);
        assert_eq!(r.verdict.exit_code(), 1);
    }

    #[test]
    fn body_is_stable() {
        let make = || {
            let mut r = CheckReport::new("t", Some(3)).param("n", 16).param("c", 1.0);
            r.estimate("x", 1.25, 0.1, 10);
            r.to_json()
        };
        assert_eq!(make(), make());
        assert!(make().contains("\"c\": 1.0"));
    }

    #[test]
    fn csv_quotes_names_with_commas() {
        let mut r = CheckReport::new("t", None);
        r.estimate("p(N, 2)", 0.5, 0.0, 0);
        r.point("say \"hi\"", 1.0, 2.0, 0.0);
        assert_eq!(r.to_csv().lines().nth(1), Some("t,\"p(N, 2)\",0.5,0,0"));
        assert_eq!(r.plot_csv().lines().nth(1), Some("\"say \"\"hi\"\"\",1,2,0"));
    }
}
