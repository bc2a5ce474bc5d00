//! Scaled level profiles f_±(ξ) = f_{1±ε}(√(1∓2η)ξ) used as comparison
//! envelopes for ξ ≥ η. Below η the value at η is held constant.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;

use super::profile::{Profile, ProfileKind};
use super::shooting::ShootingOptions;
use super::{shooting, whole_line};

#[derive(Debug, Clone)]
pub struct ScaledProfile {
    pub profile: Profile,
    pub scale: f64,
    pub eta: f64,
}

impl ScaledProfile {
    pub fn eval(&self, xi: f64) -> f64 {
        self.profile.eval(self.scale * xi.max(self.eta))
    }

    /// True where the value comes from the constant extension below η.
    pub fn is_extended(&self, xi: f64) -> bool {
        xi < self.eta
    }
}

#[derive(Debug, Clone)]
pub struct BarrierPair {
    pub kind: ProfileKind,
    pub epsilon: f64,
    pub eta: f64,
    pub f_minus: ScaledProfile,
    pub f_plus: ScaledProfile,
}

#[derive(Debug, Clone, Serialize)]
pub struct BarrierSummary {
    pub kind: ProfileKind,
    pub epsilon: f64,
    pub eta: f64,
    pub scale_minus: f64,
    pub scale_plus: f64,
}

impl BarrierPair {
    pub fn summary(&self) -> BarrierSummary {
        BarrierSummary {
            kind: self.kind,
            epsilon: self.epsilon,
            eta: self.eta,
            scale_minus: self.f_minus.scale,
            scale_plus: self.f_plus.scale,
        }
    }

    /// Smallest margins min(f₁ − f_−) and min(f_+ − f₁) over ξ ∈ [η, ξ_end]
    /// sampled on `n` points.
    pub fn ordering_margins(&self, f1: &Profile, xi_end: f64, n: usize) -> (f64, f64) {
        let mut lower = f64::INFINITY;
        let mut upper = f64::INFINITY;
        for i in 0..n {
            let xi = self.eta + (xi_end - self.eta) * i as f64 / (n - 1) as f64;
            let v = f1.eval(xi);
            lower = lower.min(v - self.f_minus.eval(xi));
            upper = upper.min(self.f_plus.eval(xi) - v);
        }
        (lower, upper)
    }
}

fn level(nl: &Nonlinearity, c: f64, kind: ProfileKind) -> Result<Profile> {
    // the window is sized for the larger level so both share a grid
    let opts = ShootingOptions::for_level(nl, c.max(1.0));
    let mut o = opts;
    o.tail_tolerance = 1e-12 * c;
    o.xi_max = shooting::default_xi_max(nl, c.max(1.0), o.tail_tolerance);
    match kind {
        ProfileKind::HalfLine => shooting::solve_half_line_with(nl, c, &o),
        ProfileKind::WholeLine => whole_line::solve_whole_line_with(nl, c, &o),
    }
}

/// f_± for 0 < ε < 1/4 and 0 < η ≤ ε/10.
pub fn barrier_profiles(nl: &Nonlinearity, epsilon: f64, eta: f64, kind: ProfileKind) -> Result<BarrierPair> {
    if !(epsilon > 0.0 && epsilon < 0.25) {
        return Err(Error::Domain(format!("epsilon = {epsilon} must lie in (0, 1/4)")));
    }
    if !(eta > 0.0 && eta <= epsilon / 10.0 * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("eta = {eta} must lie in (0, epsilon/10]")));
    }
    barrier_profiles_unchecked(nl, epsilon, eta, kind)
}

/// Same construction without the parameter checks; ε = η = 0 yields the
/// degenerate pair f_− = f_+ = f₁ used to exercise violation reporting.
pub fn barrier_profiles_unchecked(nl: &Nonlinearity, epsilon: f64, eta: f64, kind: ProfileKind) -> Result<BarrierPair> {
    let minus = level(nl, 1.0 - epsilon, kind)?;
    let plus = level(nl, 1.0 + epsilon, kind)?;
    Ok(BarrierPair {
        kind,
        epsilon,
        eta,
        f_minus: ScaledProfile { profile: minus, scale: (1.0 + 2.0 * eta).sqrt(), eta },
        f_plus: ScaledProfile { profile: plus, scale: (1.0 - 2.0 * eta).sqrt(), eta },
    })
}

/// Default η for a given ε.
pub fn default_eta(epsilon: f64) -> f64 {
    epsilon / 10.0
}
