//! Pass/fail reports for inequality checks.
//!
//! Every check produces one report with one row per tested point (a time, a
//! radius, a ladder rung). A row passes the one-sided rule
//! `empirical <= bound + z * std_error` unless the check installs a stricter
//! rule; the report passes iff every row passes and no validity breach (a
//! broken weight normalization, for instance) was recorded.

use serde::Serialize;
use serde_json::{Map, Value};

/// One tested point of a check.
#[derive(Debug, Clone, Serialize)]
pub struct ReportPoint {
    pub label: String,
    /// Abscissa of the point: a time, a radius, a ladder parameter; zero for
    /// scalar rows.
    pub t_or_r: f64,
    pub empirical: f64,
    pub bound: f64,
    pub std_error: f64,
    pub pass: bool,
}

impl ReportPoint {
    /// Standard one-sided row.
    pub fn one_sided(
        label: impl Into<String>,
        t_or_r: f64,
        empirical: f64,
        bound: f64,
        std_error: f64,
        z: f64,
    ) -> Self {
        ReportPoint {
            label: label.into(),
            t_or_r,
            empirical,
            bound,
            std_error,
            pass: empirical <= bound + z * std_error,
        }
    }

    /// Row with a caller-decided verdict (strict comparisons, two-sided
    /// normalization checks).
    pub fn with_verdict(
        label: impl Into<String>,
        t_or_r: f64,
        empirical: f64,
        bound: f64,
        std_error: f64,
        pass: bool,
    ) -> Self {
        ReportPoint { label: label.into(), t_or_r, empirical, bound, std_error, pass }
    }

    fn margin(&self, z: f64) -> f64 {
        self.empirical - self.bound - z * self.std_error
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    pub pass: bool,
    /// Headline values: the row with the worst margin.
    pub empirical: f64,
    pub bound: f64,
    pub std_error: f64,
    pub points: Vec<ReportPoint>,
    /// Set when the implemented bound deviates from a printed form of the
    /// inequality; carries the printed form and its value.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub flagged_typo: Option<String>,
    /// Set when the run is statistically invalid (the verdict is then
    /// meaningless and `pass` is forced false).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub invalid: Option<String>,
    pub metadata: Map<String, Value>,
}

impl ExperimentReport {
    pub fn from_points(name: impl Into<String>, points: Vec<ReportPoint>, z: f64) -> Self {
        let mut report = ExperimentReport {
            name: name.into(),
            pass: points.iter().all(|p| p.pass),
            empirical: 0.0,
            bound: 0.0,
            std_error: 0.0,
            points,
            flagged_typo: None,
            invalid: None,
            metadata: Map::new(),
        };
        if let Some(worst) = report
            .points
            .iter()
            .max_by(|a, b| a.margin(z).partial_cmp(&b.margin(z)).unwrap())
        {
            report.empirical = worst.empirical;
            report.bound = worst.bound;
            report.std_error = worst.std_error;
        }
        report
    }

    pub fn with_flagged_typo(mut self, note: impl Into<String>) -> Self {
        self.flagged_typo = Some(note.into());
        self
    }

    pub fn mark_invalid(&mut self, reason: impl Into<String>) {
        self.invalid = Some(reason.into());
        self.pass = false;
    }

    pub fn insert_meta(&mut self, key: &str, value: impl Into<Value>) {
        self.metadata.insert(key.to_string(), value.into());
    }

    pub fn insert_meta_f64(&mut self, key: &str, value: f64) {
        // JSON has no inf/nan; clamp to a sentinel string instead of null
        let v = if value.is_finite() {
            Value::from(value)
        } else {
            Value::from(format!("{value}"))
        };
        self.metadata.insert(key.to_string(), v);
    }
}
