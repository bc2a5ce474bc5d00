use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Varadhan,
    CurvatureAsymptotics,
    Asympvol,
    BarrierSandwich,
    Stationarity,
    Ordering,
}

/// Predicted limit; `Infinite` marks the divergent (degenerate ball) case.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Predicted {
    Finite(f64),
    Infinite,
}

impl Serialize for Predicted {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Predicted::Finite(v) => s.serialize_f64(*v),
            Predicted::Infinite => s.serialize_str("+inf"),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub target: Target,
    pub predicted: Predicted,
    /// (parameter, value) pairs with the parameter strictly decreasing.
    pub measured_series: Vec<(f64, f64)>,
    pub extrapolated: f64,
    pub relative_error: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Sorts the series by decreasing parameter and rejects repeats.
    pub(crate) fn new(target: Target, predicted: Predicted, mut series: Vec<(f64, f64)>) -> Result<Self> {
        series.sort_by(|a, b| b.0.total_cmp(&a.0));
        if series.windows(2).any(|w| w[1].0 >= w[0].0) {
            return Err(Error::Config("series parameters must be distinct".into()));
        }
        Ok(Self { target, predicted, measured_series: series, extrapolated: f64::NAN, relative_error: f64::NAN, tolerance: f64::NAN, passed: false, notes: Vec::new() })
    }

    /// Value at the smallest parameter.
    pub fn last_value(&self) -> Option<f64> {
        self.measured_series.last().map(|p| p.1)
    }

    pub(crate) fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

/// Two-point Richardson extrapolation in √t from the two smallest times,
/// assuming Q(t) = a + b√t.
pub fn richardson_sqrt(series: &[(f64, f64)]) -> Option<f64> {
    let mut s = series.to_vec();
    s.sort_by(|a, b| a.0.total_cmp(&b.0));
    if s.len() < 2 {
        return None;
    }
    let ((t2, q2), (t1, q1)) = (s[0], s[1]);
    let (r1, r2) = (t1.sqrt(), t2.sqrt());
    Some((q2 * r1 - q1 * r2) / (r1 - r2))
}
