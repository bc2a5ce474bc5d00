use super::report::{Predicted, Target, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::{sup_convolution, Domain};
use crate::pde::Field;

/// Spread (max − min) of u along Γ = {d = R} at each recorded time.
///
/// Γ is the graph of g(x₁) = sup_{|y−x₁|≤R} f(y) + √(R² − |y − x₁|²),
/// sampled at `samples` points of `x_range` and interpolated bilinearly.
pub fn stationarity_score(field: &Field, dom: &Domain, radius: f64, x_range: (f64, f64), samples: usize, tolerance: f64) -> Result<VerificationReport> {
    let f = dom.graph_function().ok_or_else(|| Error::Geometry("stationarity needs a graph domain".into()))?;
    if field.grid.dimension != 2 || dom.dim != 2 || samples < 2 {
        return Err(Error::Config("stationarity scoring runs on two-dimensional graph domains".into()));
    }
    let gamma: Vec<[f64; 2]> = (0..samples)
        .map(|i| {
            let x = x_range.0 + (x_range.1 - x_range.0) * i as f64 / (samples - 1) as f64;
            [x, sup_convolution(f, radius, &[x])]
        })
        .collect();
    let mut series = Vec::new();
    for ti in 0..field.times.len() {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for p in &gamma {
            let v = field.interpolate(ti, *p).map_err(|_| Error::Grid(format!("level set Gamma leaves the grid window at {p:?}")))?;
            lo = lo.min(v);
            hi = hi.max(v);
        }
        series.push((field.times[ti], hi - lo));
    }
    let mut r = VerificationReport::new(Target::Stationarity, Predicted::Finite(0.0), series)?;
    let score = r.measured_series.iter().map(|p| p.1).fold(0.0, f64::max);
    r.extrapolated = score;
    r.relative_error = score;
    r.tolerance = tolerance;
    r.passed = score <= tolerance;
    Ok(r)
}

/// True when the flat score is below `factor`⁻¹ times the curved score at
/// every shared time.
pub fn discriminates(flat: &VerificationReport, curved: &VerificationReport, factor: f64) -> bool {
    flat.measured_series.len() == curved.measured_series.len()
        && flat.measured_series.iter().zip(&curved.measured_series).all(|(a, b)| a.0 == b.0 && a.1 < b.1 / factor)
}
