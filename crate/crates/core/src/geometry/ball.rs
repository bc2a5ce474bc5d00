use serde::Serialize;

use crate::error::{Error, Result};

use super::domain::Domain;

const TOL: f64 = 1e-9;

/// Open ball B_R(x₀) ⊂ Ω whose closure meets ∂Ω at y₀.
#[derive(Debug, Clone, Serialize)]
pub struct TouchingBall {
    pub center: Vec<f64>,
    pub radius: f64,
    pub contact_point: Vec<f64>,
    pub curvatures: Vec<f64>,
}

impl TouchingBall {
    /// Places the ball on the inward normal at `contact` and validates it.
    pub fn new(dom: &Domain, contact: &[f64], radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::Geometry(format!("ball radius {radius} must be positive")));
        }
        let n = dom.inward_normal(contact)?;
        let center: Vec<f64> = contact.iter().zip(&n).map(|(y, v)| y + radius * v).collect();
        let d = dom.signed_distance(&center)?;
        if (d - radius).abs() > TOL {
            return Err(Error::Geometry(format!(
                "ball of radius {radius} at {contact:?} is not inside the domain (centre distance {d})"
            )));
        }
        let curvatures = dom.principal_curvatures(contact)?;
        let ball = Self { center, radius, contact_point: contact.to_vec(), curvatures };
        ball.check()?;
        Ok(ball)
    }

    fn check(&self) -> Result<()> {
        let r = self.center.iter().zip(&self.contact_point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
        if (r - self.radius).abs() > TOL {
            return Err(Error::Geometry("contact point not on the ball's sphere".into()));
        }
        let inv = 1.0 / self.radius;
        if let Some(k) = self.curvatures.iter().find(|&&k| k > inv * (1.0 + 1e-12)) {
            return Err(Error::Geometry(format!("curvature {k} exceeds 1/R = {inv}")));
        }
        // sign convention guard: an interior touching ball always sees a
        // nonnegative product
        if self.gaps().iter().product::<f64>() < 0.0 {
            return Err(Error::Invariant("curvature sign convention violated".into()));
        }
        Ok(())
    }

    /// 1/R − κ_j, clamped at zero against rounding.
    pub fn gaps(&self) -> Vec<f64> {
        let inv = 1.0 / self.radius;
        self.curvatures.iter().map(|k| (inv - k).max(0.0)).collect()
    }

    /// True when some κ_j equals 1/R.
    pub fn is_degenerate(&self) -> bool {
        self.gaps().iter().any(|&g| g <= 1e-12 / self.radius)
    }

    /// ∏(1/R − κ_j)^{−1/2}; +∞ for degenerate balls.
    pub fn curvature_factor(&self) -> f64 {
        if self.is_degenerate() {
            return f64::INFINITY;
        }
        self.gaps().iter().map(|g| g.powf(-0.5)).product()
    }

    /// The factor with κ_j replaced by κ_j − shift; used for the divergence
    /// threshold of degenerate balls.
    pub fn shifted_curvature_factor(&self, shift: f64) -> f64 {
        let inv = 1.0 / self.radius;
        self.curvatures.iter().map(|k| (inv - (k - shift)).powf(-0.5)).product()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.center.iter().zip(x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() < self.radius * self.radius
    }
}
