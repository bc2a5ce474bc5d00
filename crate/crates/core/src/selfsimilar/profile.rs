use serde::Serialize;

use crate::numerics::interp::Hermite;
use crate::numerics::special::ln_erfc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileKind {
    HalfLine,
    WholeLine,
}

/// Decay model beyond the table: the profile (or c − profile on the left)
/// behaves like K·erfc(|ξ|/(2√D)) where D is the diffusivity at the limit value.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Tail {
    pub xi0: f64,
    pub value0: f64,
    pub diffusivity: f64,
}

impl Tail {
    fn ln_value(&self, xi: f64) -> f64 {
        let s = 2.0 * self.diffusivity.sqrt();
        self.value0.ln() + ln_erfc(xi.abs() / s) - ln_erfc(self.xi0.abs() / s)
    }
}

/// Tabulated self-similar profile with cubic Hermite interpolation.
#[derive(Debug, Clone)]
pub struct Profile {
    pub kind: ProfileKind,
    pub c: f64,
    /// v′(0) = φ′(f(0))f′(0).
    pub v_prime_at_zero: f64,
    /// a* for whole-line profiles.
    pub match_point: Option<f64>,
    pub tail_tolerance: f64,
    pub(crate) table: Hermite,
    /// v′ = φ′(f)f′ on the grid.
    pub(crate) flux: Vec<f64>,
    pub(crate) right: Tail,
    pub(crate) left: Option<Tail>,
    /// Upper envelope coefficient A in f ≤ A·exp(−ξ²/(4δ₂)).
    pub(crate) envelope: (f64, f64),
    /// |v′(0⁻) − v′(0⁺)| for whole-line profiles.
    pub(crate) slope_jump: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct ProfileSummary {
    pub kind: ProfileKind,
    pub c: f64,
    pub v_prime_at_zero: f64,
    pub mass_residual: f64,
    pub match_point: Option<f64>,
    pub xi_max: f64,
    pub nodes: usize,
}

impl Profile {
    pub fn xi(&self) -> &[f64] {
        self.table.x()
    }

    pub fn f_values(&self) -> &[f64] {
        self.table.y()
    }

    pub fn df_values(&self) -> &[f64] {
        self.table.dy()
    }

    pub fn flux(&self) -> &[f64] {
        &self.flux
    }

    pub fn xi_min(&self) -> f64 {
        self.table.lo()
    }

    pub fn xi_max(&self) -> f64 {
        self.table.hi()
    }

    /// f(ξ). Outside the table the erfc tail model is used; on the
    /// half-line ξ < 0 returns c.
    pub fn eval(&self, xi: f64) -> f64 {
        if xi > self.xi_max() {
            return self.ln_eval(xi).exp();
        }
        if xi < self.xi_min() {
            return match &self.left {
                Some(t) => self.c - t.ln_value(xi).exp(),
                None => self.c,
            };
        }
        self.table.eval(xi)
    }

    /// f′(ξ), zero outside the half-line table on the left.
    pub fn eval_derivative(&self, xi: f64) -> f64 {
        if xi > self.xi_max() || xi < self.xi_min() {
            let tail = if xi > 0.0 { Some(&self.right) } else { self.left.as_ref() };
            return match tail {
                Some(t) => {
                    let s = 2.0 * t.diffusivity.sqrt();
                    let v = t.ln_value(xi).exp();
                    // d/dξ ln erfc(|ξ|/s) times the value, signed so f decreases
                    let z = xi.abs() / s;
                    -v * 2.0 / (std::f64::consts::PI.sqrt() * s) * (-z * z - ln_erfc(z)).exp()
                }
                None => 0.0,
            };
        }
        self.table.eval2(xi).1
    }

    /// ln f(ξ), finite far beyond the double-precision range of f.
    pub fn ln_eval(&self, xi: f64) -> f64 {
        if xi > self.xi_max() {
            return self.right.ln_value(xi);
        }
        self.eval(xi).ln()
    }

    /// Whether ξ is covered by the computed table rather than the tail model.
    pub fn in_table(&self, xi: f64) -> bool {
        xi >= self.xi_min() && xi <= self.xi_max()
    }

    /// Gaussian upper envelope A·exp(−ξ²/(4δ₂)).
    pub fn envelope(&self, xi: f64) -> f64 {
        let (a, d2) = self.envelope;
        a * (-xi * xi / (4.0 * d2)).exp()
    }

    /// ∫₀^∞ f dξ: end-corrected trapezoid on the non-negative grid plus the
    /// analytic integral of the upper envelope beyond the table.
    pub fn half_mass(&self) -> f64 {
        let x = self.table.x();
        let y = self.table.y();
        let dy = self.table.dy();
        let start = x.iter().position(|&v| v >= 0.0).unwrap_or(0);
        let mut sum = 0.0;
        for i in start..x.len() - 1 {
            let h = x[i + 1] - x[i];
            // trapezoid plus the Euler–Maclaurin endpoint term of each panel
            sum += 0.5 * h * (y[i] + y[i + 1]) + h * h / 12.0 * (dy[i] - dy[i + 1]);
        }
        let l = self.xi_max();
        let (a, d2) = self.envelope;
        let tail = a * (std::f64::consts::PI * d2).sqrt() * statrs::function::erf::erfc(l / (2.0 * d2.sqrt()));
        sum + tail
    }

    pub fn summary(&self) -> ProfileSummary {
        ProfileSummary {
            kind: self.kind,
            c: self.c,
            v_prime_at_zero: self.v_prime_at_zero,
            mass_residual: super::mass_identity_residual(self),
            match_point: self.match_point,
            xi_max: self.xi_max(),
            nodes: self.table.x().len(),
        }
    }

    /// Index-aligned (ξ, f) pairs.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.table.x().iter().copied().zip(self.table.y().iter().copied())
    }
}
