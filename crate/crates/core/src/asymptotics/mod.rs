//! Verification harness: runs the profile, PDE and geometry pipelines and
//! condenses each asymptotic statement into a [`VerificationReport`].

mod asympvol;
mod curvature;
mod report;
mod sandwich;
mod stationarity;
mod varadhan;

pub use asympvol::verify_asympvol;
pub use curvature::{ball_weights, ball_window, boundary_top, graph_window, curvature_report, heat_content_series, verify_curvature_asymptotics, CurvatureOptions};
pub use report::{richardson_sqrt, Predicted, Target, VerificationReport};
pub use sandwich::{barrier_sandwich_check, profile_sandwich, scan_tau};
pub use stationarity::{discriminates, stationarity_score};
pub use varadhan::{verify_varadhan, UNDERFLOW_FLOOR};

use crate::error::Result;
use crate::pde::{ordering_check, Field};

/// Ordering report for u ≤ v + slack; the series holds max(u − v) per time.
pub fn ordering_report(u: &Field, v: &Field, slack: f64) -> Result<VerificationReport> {
    let o = ordering_check(u, v, slack)?;
    let mut r = VerificationReport::new(Target::Ordering, Predicted::Finite(0.0), o.per_time.clone())?;
    r.extrapolated = o.max_violation;
    r.relative_error = o.max_violation;
    r.tolerance = slack;
    r.passed = o.passed;
    Ok(r)
}
