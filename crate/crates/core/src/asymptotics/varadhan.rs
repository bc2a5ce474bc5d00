use super::report::{Predicted, Target, VerificationReport};
use crate::error::{Error, Result};
use crate::nonlinearity::PhiTransform;
use crate::pde::Field;

/// Probe values below this are treated as underflow and skipped.
pub const UNDERFLOW_FLOOR: f64 = 1e-9;

/// sup over probe nodes of |−4tΦ(u) − d²|/d² at each recorded time.
///
/// Distances come from the grid's mask geometry. Passes when the error
/// decreases as t decreases and the value at the smallest t is within
/// `tolerance`.
pub fn verify_varadhan(field: &Field, transform: &PhiTransform, band: (f64, f64), tolerance: f64) -> Result<VerificationReport> {
    let g = &field.grid;
    let hmax = g.h[0].max(if g.dimension == 2 { g.h[1] } else { 0.0 });
    let (r0, r1) = band;
    if !(r0 > 3.0 * hmax && r1 > r0) {
        return Err(Error::Config(format!("probe band [{r0}, {r1}] must satisfy 3h < rho0 < rho1 (h = {hmax})")));
    }
    let probes: Vec<usize> = (0..g.len()).filter(|&k| g.distance[k] >= r0 && g.distance[k] <= r1).collect();
    if probes.is_empty() {
        return Err(Error::Grid("no grid nodes inside the probe band".into()));
    }
    let mut series = Vec::new();
    let mut notes = Vec::new();
    for (ti, &t) in field.times.iter().enumerate() {
        let u = &field.values[ti];
        let mut sup: f64 = 0.0;
        let mut used = 0;
        for &k in &probes {
            if u[k] < UNDERFLOW_FLOOR {
                continue;
            }
            let d2 = g.distance[k] * g.distance[k];
            let lhs = -4.0 * t * transform.phi(u[k])?;
            sup = sup.max((lhs - d2).abs() / d2);
            used += 1;
        }
        if used == 0 {
            return Err(Error::Underflow(format!("every probe node underflows at t = {t}")));
        }
        if used < probes.len() {
            notes.push(format!("t = {t}: {} of {} probe nodes below {UNDERFLOW_FLOOR:e} excluded", probes.len() - used, probes.len()));
        }
        series.push((t, sup));
    }
    let mut r = VerificationReport::new(Target::Varadhan, Predicted::Finite(0.0), series)?;
    r.notes = notes;
    let decreasing = r.measured_series.windows(2).all(|w| w[1].1 < w[0].1);
    let last = r.last_value().unwrap_or(f64::NAN);
    r.extrapolated = last;
    r.relative_error = last;
    r.tolerance = tolerance;
    r.passed = decreasing && last <= tolerance;
    if !decreasing {
        r.note("error series is not decreasing as t decreases");
    }
    Ok(r)
}
