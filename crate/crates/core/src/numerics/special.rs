//! Special functions not covered by statrs, plus thin wrappers.

use std::f64::consts::PI;

pub use statrs::function::erf::erfc;
use statrs::function::gamma::{gamma, ln_gamma};

/// ln erfc(x), accurate where erfc underflows.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 20.0 {
        return erfc(x).ln();
    }
    // asymptotic series erfc x ~ e^{-x^2}/(x sqrt pi) * sum (-1)^n (2n-1)!! / (2x^2)^n
    let z = 1.0 / (2.0 * x * x);
    let mut term = 1.0;
    let mut sum = 1.0;
    for n in 1..12 {
        term *= -((2 * n - 1) as f64) * z;
        sum += term;
    }
    -x * x - (x * PI.sqrt()).ln() + sum.ln()
}

/// Volume of the unit ball in R^k.
pub fn unit_ball_volume(k: u32) -> f64 {
    // ω_k = 2π/k · ω_{k−2}, exact to rounding for the small k used here
    if k > 64 {
        let h = k as f64 / 2.0;
        return PI.powf(h) / gamma(h + 1.0);
    }
    let mut w = if k % 2 == 0 { 1.0 } else { 2.0 };
    let mut j = if k % 2 == 0 { 2 } else { 3 };
    while j <= k {
        w *= 2.0 * PI / j as f64;
        j += 2;
    }
    w
}

pub fn ln_unit_ball_volume(k: u32) -> f64 {
    let h = k as f64 / 2.0;
    h * PI.ln() - ln_gamma(h + 1.0)
}

/// d/dx erfc(x).
pub fn derfc(x: f64) -> f64 {
    -2.0 / PI.sqrt() * (-x * x).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert_eq!(unit_ball_volume(0), 1.0);
        assert_eq!(unit_ball_volume(2), PI);
        assert!((unit_ball_volume(7) - PI.powf(3.5) / gamma(4.5)).abs() < 1e-13);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-13);
        assert!((ln_unit_ball_volume(5) - unit_ball_volume(5).ln()).abs() < 1e-13);
    }

    #[test]
    fn ln_erfc_continuous_at_switch() {
        let a = erfc(19.999).ln();
        let b = ln_erfc(20.0);
        // d/dx ln erfc ~ -2x
        assert!((b - (a - 2.0 * 20.0 * 0.001)).abs() < 1e-3);
        let below = erfc(19.9).ln();
        let series_at = {
            let x: f64 = 19.9;
            let z = 1.0 / (2.0 * x * x);
            -x * x - (x * PI.sqrt()).ln() + (1.0 - z + 3.0 * z * z - 15.0 * z * z * z).ln()
        };
        assert!((below - series_at).abs() < 1e-9);
    }
}
