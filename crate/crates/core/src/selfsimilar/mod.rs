//! Self-similar profiles f_c solving (φ′(f)f′)′ + ½ξf′ = 0 on the half-line
//! (f(0) = c, f(∞) = 0) and on the whole line (f(−∞) = c, f(∞) = 0).

mod barrier;
mod constant;
mod profile;
mod shooting;
mod whole_line;

pub use barrier::{barrier_profiles, barrier_profiles_unchecked, default_eta, BarrierPair, BarrierSummary, ScaledProfile};
pub use constant::{asymptotic_constant, moment, AsymptoticConstant};
pub use profile::{Profile, ProfileKind, ProfileSummary};
pub use shooting::{default_xi_max, solve_half_line, shoot_slope, ShootingOptions};
pub use whole_line::{matching_gap, slope_mismatch, solve_whole_line};

use crate::error::Result;
use crate::nonlinearity::{Nonlinearity, PhiTransform};

/// |−v′(0) − ½∫₀^∞ f dξ|, with the integral taken by the end-corrected
/// trapezoid rule on the profile grid plus the Gaussian-envelope tail.
pub fn mass_identity_residual(p: &Profile) -> f64 {
    (-p.v_prime_at_zero - 0.5 * p.half_mass()).abs()
}

/// −4Φ(f(ξ))/ξ². Uses ln f so that tails below the floating-point range
/// are still meaningful.
pub fn varadhan_ratio(p: &Profile, transform: &PhiTransform, xi: f64) -> Result<f64> {
    if !(xi > 0.0) {
        return Err(crate::Error::Domain(format!("ratio needs xi > 0, got {xi}")));
    }
    let lnf = p.ln_eval(xi);
    Ok(-4.0 * transform.phi_of_ln(lnf)? / (xi * xi))
}

/// Solves f_c of either kind with tail tolerance 1e−12·c and the default window.
pub fn solve_profile(nl: &Nonlinearity, c: f64, kind: ProfileKind) -> Result<Profile> {
    let tol = 1e-12 * c;
    let xi_max = default_xi_max(nl, c, tol);
    match kind {
        ProfileKind::HalfLine => solve_half_line(nl, c, tol, xi_max),
        ProfileKind::WholeLine => solve_whole_line(nl, c, tol, xi_max),
    }
}
