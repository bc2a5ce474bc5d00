//! c(φ,N) = 2^{(N−1)/2} ω_{N−1} ∫₀^∞ f₁(ξ) ξ^{(N−1)/2} dξ.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::numerics::quadrature;
use crate::numerics::special::unit_ball_volume;

use super::profile::{Profile, ProfileKind};
use super::shooting::{self, ShootingOptions};
use super::whole_line;

#[derive(Debug, Clone, Serialize)]
pub struct AsymptoticConstant {
    pub n: u32,
    pub kind: ProfileKind,
    pub moment: f64,
    pub omega: f64,
    pub value: f64,
    /// Whole-line constants integrate over ξ > 0 only; flagged for reports.
    pub half_range_moment: bool,
}

/// ∫₀^∞ f(ξ) ξ^{(N−1)/2} dξ, computed as 2∫₀^∞ f(τ²) τ^N dτ so the
/// integrand is smooth at the origin.
pub fn moment(p: &Profile, n: u32) -> Result<f64> {
    if n < 2 {
        return Err(Error::Domain(format!("dimension N = {n} must be at least 2")));
    }
    let integrand = |tau: f64| 2.0 * p.eval(tau * tau) * tau.powi(n as i32);
    let end = p.xi_max().sqrt();
    let pieces = (end / 0.25).ceil() as usize;
    let mut breaks: Vec<f64> = (0..=pieces).map(|i| end * i as f64 / pieces as f64).collect();
    // the erfc tail beyond the table is negligible but cheap to include
    breaks.push((4.0 * p.xi_max()).sqrt());
    quadrature::integrate_pieces(integrand, &breaks, 1e-13)
}

impl AsymptoticConstant {
    pub fn from_profile(p: &Profile, n: u32) -> Result<Self> {
        let m = moment(p, n)?;
        let omega = unit_ball_volume(n - 1);
        Ok(Self {
            n,
            kind: p.kind,
            moment: m,
            omega,
            value: 2f64.powf((n as f64 - 1.0) / 2.0) * omega * m,
            half_range_moment: p.kind == ProfileKind::WholeLine,
        })
    }
}

/// Solves f₁ for the requested problem and evaluates c(φ,N).
pub fn asymptotic_constant(nl: &Nonlinearity, n: u32, kind: ProfileKind) -> Result<AsymptoticConstant> {
    let opts = ShootingOptions::for_level(nl, 1.0);
    let p = match kind {
        ProfileKind::HalfLine => shooting::solve_half_line_with(nl, 1.0, &opts)?,
        ProfileKind::WholeLine => whole_line::solve_whole_line_with(nl, 1.0, &opts)?,
    };
    AsymptoticConstant::from_profile(&p, n)
}
