use super::report::{Predicted, Target, VerificationReport};
use crate::error::{Error, Result};
use crate::pde::{Field, Problem};
use crate::selfsimilar::{BarrierPair, Profile, ProfileKind};

fn check_kind(field: &Field, pair: &BarrierPair) -> Result<()> {
    let ok = matches!((field.problem, pair.kind), (Problem::Ibvp, ProfileKind::HalfLine) | (Problem::Cauchy, ProfileKind::WholeLine));
    if !ok {
        return Err(Error::Config("barrier pair kind does not match the field's problem".into()));
    }
    Ok(())
}

/// Smallest of u − f_−(d/√t) and f_+(d/√t) − u over nodes with
/// d ∈ region, where d is the signed distance stored on the grid.
fn worst_margin(field: &Field, ti: usize, pair: &BarrierPair, region: (f64, f64)) -> f64 {
    let g = &field.grid;
    let st = field.times[ti].sqrt();
    let u = &field.values[ti];
    let mut worst = f64::INFINITY;
    for k in 0..g.len() {
        let d = g.distance[k];
        if d < region.0 || d > region.1 {
            continue;
        }
        let xi = d / st;
        worst = worst.min(u[k] - pair.f_minus.eval(xi)).min(pair.f_plus.eval(xi) - u[k]);
    }
    worst
}

/// Checks f_−(d/√t) ≤ u ≤ f_+(d/√t) on the probe region for every recorded
/// time in `t_interval`. The report series holds the worst margin per time.
pub fn barrier_sandwich_check(field: &Field, pair: &BarrierPair, region: (f64, f64), t_interval: (f64, f64)) -> Result<VerificationReport> {
    check_kind(field, pair)?;
    let (r0, r1) = region;
    if !(r1 > r0) || r0 < pair.eta * t_interval.1.sqrt() {
        return Err(Error::Config(format!(
            "probe region [{r0}, {r1}] must lie in [eta*sqrt(t_max), rho1] with eta = {}",
            pair.eta
        )));
    }
    let mut series = Vec::new();
    for ti in 0..field.times.len() {
        let t = field.times[ti];
        if t < t_interval.0 || t > t_interval.1 {
            continue;
        }
        let m = worst_margin(field, ti, pair, region);
        if m.is_finite() {
            series.push((t, m));
        }
    }
    if series.is_empty() {
        return Err(Error::Grid("no probe nodes or recorded times in the requested window".into()));
    }
    let mut r = VerificationReport::new(Target::BarrierSandwich, Predicted::Finite(0.0), series)?;
    let worst = r.measured_series.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    r.extrapolated = worst;
    r.relative_error = (-worst).max(0.0);
    r.tolerance = 0.0;
    r.passed = worst >= 0.0;
    Ok(r)
}

/// Largest recorded τ such that the sandwich holds at every recorded t ≤ τ.
pub fn scan_tau(field: &Field, pair: &BarrierPair, region: (f64, f64)) -> Result<Option<f64>> {
    check_kind(field, pair)?;
    let mut idx: Vec<usize> = (0..field.times.len()).collect();
    idx.sort_by(|a, b| field.times[*a].total_cmp(&field.times[*b]));
    let mut tau = None;
    for ti in idx {
        let t = field.times[ti];
        if region.0 < pair.eta * t.sqrt() {
            break;
        }
        if worst_margin(field, ti, pair, region) >= 0.0 {
            tau = Some(t);
        } else {
            break;
        }
    }
    Ok(tau)
}

/// Sandwich check with u replaced by the similarity solution f₁ on
/// ξ ∈ [η, ξ_end].
pub fn profile_sandwich(pair: &BarrierPair, f1: &Profile, xi_end: f64, samples: usize) -> Result<VerificationReport> {
    let (lower, upper) = pair.ordering_margins(f1, xi_end, samples);
    let worst = lower.min(upper);
    let mut r = VerificationReport::new(Target::BarrierSandwich, Predicted::Finite(0.0), vec![(xi_end, worst)])?;
    r.extrapolated = worst;
    r.relative_error = (-worst).max(0.0);
    r.tolerance = 0.0;
    r.passed = lower > 0.0 && upper > 0.0;
    r.note(format!("lower margin {lower:e}, upper margin {upper:e} over [{}, {xi_end}]", pair.eta));
    Ok(r)
}
