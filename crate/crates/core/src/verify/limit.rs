use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::report::{CheckReport, MarginKind};
use crate::error::{invalid, Error, Result};
use crate::hypergraph::content_lines;

/// Closed-form sequences with known behaviour, used to exercise the limit
/// machinery.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AnalyticSequence {
    /// `3N`.
    Linear,
    /// `N - sqrt(N)`.
    Sqrt,
    /// `2N - ln N`.
    Log,
    /// `2N + sin N + 1`.
    Noise,
    /// `N sin N`, which is not near-superadditive.
    Oscillating,
}

impl AnalyticSequence {
    pub const ALL: [AnalyticSequence; 5] = [Self::Linear, Self::Sqrt, Self::Log, Self::Noise, Self::Oscillating];

    pub fn name(self) -> &'static str {
        match self {
            Self::Linear => "linear",
            Self::Sqrt => "sqrt",
            Self::Log => "log",
            Self::Noise => "noise",
            Self::Oscillating => "oscillating",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| invalid(format!("unknown analytic sequence {s:?}")))
    }

    pub fn value(self, n: f64) -> f64 {
        match self {
            Self::Linear => 3.0 * n,
            Self::Sqrt => n - n.sqrt(),
            Self::Log => 2.0 * n - n.ln(),
            Self::Noise => 2.0 * n + n.sin() + 1.0,
            Self::Oscillating => n * n.sin(),
        }
    }

    /// A constant `C` for which the sequence satisfies the premise with `alpha = 1/2`.
    pub fn default_constant(self) -> f64 {
        match self {
            Self::Linear | Self::Sqrt => 0.0,
            Self::Log => 1.0,
            Self::Noise | Self::Oscillating => 3.0,
        }
    }

    /// `lim a_N / N`, when it exists.
    pub fn limit(self) -> Option<f64> {
        match self {
            Self::Linear => Some(3.0),
            Self::Sqrt => Some(1.0),
            Self::Log | Self::Noise => Some(2.0),
            Self::Oscillating => None,
        }
    }

    /// Values for `N = 1..=n_max`; `constant` defaults to [`Self::default_constant`].
    pub fn probe(self, n_max: usize, alpha: f64, constant: Option<f64>) -> Result<SequenceProbe> {
        SequenceProbe::from_fn(n_max, alpha, constant.unwrap_or(self.default_constant()), |n| self.value(n as f64))
    }
}

/// A finite prefix of a sequence `a_N` together with the exponent and
/// constant of the correction in `a_N >= a_{N1} + a_{N2} - C N^alpha`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceProbe {
    pub values: BTreeMap<usize, f64>,
    pub alpha: f64,
    pub constant: f64,
}

impl SequenceProbe {
    pub fn new(values: BTreeMap<usize, f64>, alpha: f64, constant: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(invalid(format!("alpha must lie in (0, 1), got {alpha}")));
        }
        if !(constant >= 0.0 && constant.is_finite()) {
            return Err(invalid(format!("the correction constant must be finite and non-negative, got {constant}")));
        }
        if values.contains_key(&0) {
            return Err(invalid("sequence indices start at 1"));
        }
        if let Some((n, v)) = values.iter().find(|(_, v)| !v.is_finite()) {
            return Err(invalid(format!("a_{n} = {v} is not finite")));
        }
        Ok(SequenceProbe { values, alpha, constant })
    }

    /// Tabulates `f(N)` for `N = 1..=n_max`.
    pub fn from_fn(n_max: usize, alpha: f64, constant: f64, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((1..=n_max).map(|n| (n, f(n))).collect(), alpha, constant)
    }

    /// Parses `N,a_N` rows; `#` comments, blank lines and a non-numeric header row are skipped.
    pub fn from_csv(text: &str, alpha: f64, constant: f64) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, (ln, line)) in content_lines(text).enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(Error::Parse { line: ln, msg: format!("expected `N,a_N`, found {line:?}") });
            }
            let n = match fields[0].parse::<usize>() {
                Ok(v) => v,
                _ if i == 0 && fields[1].parse::<f64>().is_err() => continue,
                _ => return Err(Error::Parse { line: ln, msg: format!("bad index {:?}", fields[0]) }),
            };
            let a: f64 = fields[1].parse().map_err(|_| Error::Parse { line: ln, msg: format!("bad value {:?}", fields[1]) })?;
            if values.insert(n, a).is_some() {
                return Err(Error::Parse { line: ln, msg: format!("index {n} given twice") });
            }
        }
        Self::new(values, alpha, constant)
    }

    pub fn get(&self, n: usize) -> Option<f64> {
        self.values.get(&n).copied()
    }

    fn correction(&self, n: usize) -> f64 {
        self.constant * (n as f64).powf(self.alpha)
    }
}

/// The split with the smallest margin `a_N - a_{N1} - a_{N2} + C N^alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstSplit {
    pub n: usize,
    pub n1: usize,
    pub margin: f64,
}

/// Result of [`near_superadditive_limit`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LimitEstimate {
    pub n_max: usize,
    /// `a_{N_max} / N_max`.
    pub estimate: f64,
    /// `a_{N_max}/N_max - C N_max^(alpha-1) / (2^(1-alpha) - 1)`: the doubling
    /// argument started at `N_max` bounds the limit from below by this.
    pub lower_bound: f64,
    /// Running maximum of the same lower bound over `N0 <= N`, as `(N, bound)`.
    pub envelope: Vec<(usize, f64)>,
    /// `2 C N_max^(alpha-1) + 5 N_max^(-1/2)`.
    pub slack: f64,
    pub splits_checked: u64,
    pub worst_split: Option<WorstSplit>,
}

impl LimitEstimate {
    pub fn recovers(&self, known: f64) -> bool {
        (self.estimate - known).abs() <= self.slack
    }
}

/// Relative tolerance for rounding in the premise check.
const PREMISE_TOL: f64 = 1e-9;

fn doubling_loss(alpha: f64, constant: f64, n0: usize) -> f64 {
    constant * (n0 as f64).powf(alpha - 1.0) / (2f64.powf(1.0 - alpha) - 1.0)
}

/// Checks `a_N >= a_{N1} + a_{N2} - C N^alpha` on every split with
/// `N <= n_max`, then non-negativity, and estimates `lim a_N / N`.
pub fn near_superadditive_limit(probe: &SequenceProbe, n_max: usize) -> Result<LimitEstimate> {
    if n_max < 1 {
        return Err(invalid("N_max must be at least 1"));
    }
    let mut a = Vec::with_capacity(n_max + 1);
    a.push(0.0);
    for n in 1..=n_max {
        a.push(probe.get(n).ok_or_else(|| invalid(format!("the probe has no value for N = {n}")))?);
    }
    let mut worst: Option<WorstSplit> = None;
    let mut checked = 0u64;
    for n in 2..=n_max {
        let corr = probe.correction(n);
        for n1 in 1..=n / 2 {
            let margin = a[n] - a[n1] - a[n - n1] + corr;
            checked += 1;
            let scale = a[n].abs() + a[n1].abs() + a[n - n1].abs() + corr;
            if margin < -PREMISE_TOL * scale.max(1.0) {
                return Err(Error::PremiseViolation(format!(
                    "a_{n} = {} < a_{n1} + a_{} - C N^alpha = {} + {} - {corr} (split N = {n}, N1 = {n1}, N2 = {})",
                    a[n],
                    n - n1,
                    a[n1],
                    a[n - n1],
                    n - n1
                )));
            }
            if worst.map_or(true, |w| margin < w.margin) {
                worst = Some(WorstSplit { n, n1, margin });
            }
        }
    }
    if let Some(n) = (1..=n_max).find(|&n| a[n] < 0.0) {
        return Err(Error::PremiseViolation(format!("the sequence must be non-negative, but a_{n} = {}", a[n])));
    }
    let mut envelope = Vec::with_capacity(n_max);
    let mut best = f64::NEG_INFINITY;
    for (n, &an) in a.iter().enumerate().skip(1) {
        best = best.max(an / n as f64 - doubling_loss(probe.alpha, probe.constant, n));
        envelope.push((n, best));
    }
    let nm = n_max as f64;
    let estimate = a[n_max] / nm;
    Ok(LimitEstimate {
        n_max,
        estimate,
        lower_bound: estimate - doubling_loss(probe.alpha, probe.constant, n_max),
        envelope,
        slack: 2.0 * probe.constant * nm.powf(probe.alpha - 1.0) + 5.0 / nm.sqrt(),
        splits_checked: checked,
        worst_split: worst,
    })
}

/// [`near_superadditive_limit`] as a report. A premise violation gives a
/// failing verdict; with `known` set, recovery within the slack is asserted.
pub fn limit_report(probe: &SequenceProbe, n_max: usize, known: Option<f64>) -> Result<CheckReport> {
    let mut report = CheckReport::new("limit", None)
        .param("alpha", probe.alpha)
        .param("constant", probe.constant)
        .param("n_max", n_max);
    if let Some(k) = known {
        report = report.param("known_limit", k);
    }
    match near_superadditive_limit(probe, n_max) {
        Ok(est) => {
            report.estimate("a_N / N at N_max", est.estimate, 0.0, 0);
            report.estimate("doubling lower bound", est.lower_bound, 0.0, 0);
            report.estimate("slack", est.slack, 0.0, 0);
            report.note(format!("premise checked on {} splits", est.splits_checked));
            if let Some(w) = est.worst_split {
                report.margin(format!("tightest split N = {}, N1 = {}", w.n, w.n1), w.margin, 0.0, MarginKind::Diagnostic);
            }
            for &(n, b) in &est.envelope {
                report.point("envelope", n as f64, b, 0.0);
                report.point("a_N / N", n as f64, probe.get(n).unwrap_or(f64::NAN) / n as f64, 0.0);
            }
            if let Some(k) = known {
                report.margin("slack - |estimate - known|", est.slack - (est.estimate - k).abs(), 0.0, MarginKind::Exact);
            }
        }
        Err(Error::PremiseViolation(msg)) => report.fail(format!("premise violation: {msg}")),
        Err(e) => return Err(e),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_sequence_is_exact() {
        let p = SequenceProbe::from_fn(64, 0.5, 0.0, |n| 3.0 * n as f64).unwrap();
        let est = near_superadditive_limit(&p, 64).unwrap();
        assert_eq!(est.estimate, 3.0);
        assert_eq!(est.lower_bound, 3.0);
        assert!(est.recovers(3.0));
        assert_eq!(est.splits_checked, (2..=64u64).map(|n| n / 2).sum::<u64>());
    }

    #[test]
    fn oscillating_sequence_is_rejected() {
        let p = SequenceProbe::from_fn(128, 0.5, 3.0, |n| n as f64 * (n as f64).sin()).unwrap();
        match near_superadditive_limit(&p, 128) {
            Err(Error::PremiseViolation(msg)) => assert!(msg.contains("split")),
            other => panic!("expected a premise violation, got {other:?}"),
        }
        assert!(!limit_report(&p, 128, None).unwrap().passed());
    }

    #[test]
    fn missing_values_and_bad_alpha() {
        let p = SequenceProbe::from_fn(10, 0.5, 1.0, |n| n as f64).unwrap();
        assert!(matches!(near_superadditive_limit(&p, 11), Err(Error::InvalidParameter(_))));
        assert!(SequenceProbe::from_fn(10, 1.0, 1.0, |n| n as f64).is_err());
    }

    #[test]
    fn negative_but_superadditive_rejected() {
        let p = SequenceProbe::from_fn(16, 0.5, 0.0, |n| -(n as f64)).unwrap();
        assert!(matches!(near_superadditive_limit(&p, 16), Err(Error::PremiseViolation(m)) if m.contains("non-negative")));
    }

    #[test]
    fn csv_round_trip() {
        let p = SequenceProbe::from_csv("N,a\n1,2.5\n2, 5\n# note\n3,7.5\n", 0.5, 0.0).unwrap();
        assert_eq!(p.get(2), Some(5.0));
        assert_eq!(near_superadditive_limit(&p, 3).unwrap().estimate, 2.5);
        assert!(SequenceProbe::from_csv("1,2\n1,3\n", 0.5, 0.0).is_err());
        assert!(SequenceProbe::from_csv("1,2,3\n", 0.5, 0.0).is_err());
    }
}
