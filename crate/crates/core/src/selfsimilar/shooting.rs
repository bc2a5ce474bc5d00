//! Half-line problem by shooting on v′(0), with the far tail recovered by an
//! inward integration from erfc data.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::numerics::interp::Hermite;
use crate::numerics::ode::{self, Flow, Tolerances};
use crate::numerics::roots::brent;
use crate::numerics::special::{derfc, erfc};

use super::profile::{Profile, ProfileKind, Tail};

const CROSS_TOL: f64 = 1e-14;
/// The forward trajectory is trusted down to this fraction of c.
const MATCH_LEVEL: f64 = 1e-3;

#[derive(Debug, Clone, Copy)]
pub struct ShootingOptions {
    /// Absolute tail tolerance; default 1e-12·c.
    pub tail_tolerance: f64,
    pub xi_max: f64,
    /// Spacing of the output table.
    pub grid_step: f64,
    pub rtol: f64,
    pub max_bisections: usize,
}

impl ShootingOptions {
    pub fn for_level(nl: &Nonlinearity, c: f64) -> Self {
        let tail_tolerance = 1e-12 * c;
        Self {
            tail_tolerance,
            xi_max: default_xi_max(nl, c, tail_tolerance),
            grid_step: 0.005,
            rtol: 1e-10,
            max_bisections: 200,
        }
    }
}

/// Smallest ξ ≥ 10 where the Gaussian envelope c(δ₂/δ₁)^{3/2}·exp(−ξ²/(4δ₂))
/// drops below the tail tolerance.
pub fn default_xi_max(nl: &Nonlinearity, c: f64, tail_tolerance: f64) -> f64 {
    let a = envelope_constant(nl, c);
    let arg = (a / tail_tolerance).ln().max(0.0);
    (4.0 * nl.delta2() * arg).sqrt().max(10.0)
}

fn envelope_constant(nl: &Nonlinearity, c: f64) -> f64 {
    c * (nl.delta2() / nl.delta1()).powf(1.5)
}

fn rhs(nl: &Nonlinearity) -> impl FnMut(f64, &[f64; 2]) -> [f64; 2] + '_ {
    move |xi, y| {
        let d = nl.dphi(y[0]);
        [y[1] / d, -0.5 * xi * y[1] / d]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Shot {
    Steep,
    Shallow,
}

fn classify(nl: &Nonlinearity, c: f64, p0: f64, opts: &ShootingOptions) -> Result<Shot> {
    let tol = Tolerances { rtol: opts.rtol, atol: 1e-15 * c, max_steps: 1_000_000 };
    let mut verdict = None;
    let out = ode::integrate(rhs(nl), 0.0, [c, p0], opts.xi_max, 0.0, tol, |_, y| {
        if y[0] < -CROSS_TOL {
            verdict = Some(Shot::Steep);
            Flow::Stop
        } else if y[1] >= -CROSS_TOL * c && y[0] > opts.tail_tolerance {
            verdict = Some(Shot::Shallow);
            Flow::Stop
        } else {
            Flow::Continue
        }
    })?;
    Ok(verdict.unwrap_or(if out.y[0] > 0.0 { Shot::Shallow } else { Shot::Steep }))
}

/// v′(0) of the half-line profile at level c, by bisection inside the
/// bracket implied by the Gaussian slope envelopes.
pub fn shoot_slope(nl: &Nonlinearity, c: f64, opts: &ShootingOptions) -> Result<f64> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("level c = {c} must be positive")));
    }
    let (d1, d2) = (nl.delta1(), nl.delta2());
    // the two envelope ends coincide for linear φ; widen a little
    let mut steep = -c * d2 / (PI * d1).sqrt() * 1.05;
    let mut shallow = -c * d1 / (PI * d2).sqrt() * 0.95;
    if classify(nl, c, steep, opts)? != Shot::Steep || classify(nl, c, shallow, opts)? != Shot::Shallow {
        return Err(Error::Bracket(format!(
            "{}: envelope bracket [{steep}, {shallow}] for v'(0) at c = {c} does not separate",
            nl.name()
        )));
    }
    let mut it = 0;
    while shallow - steep > 1e-13 * c {
        if it == opts.max_bisections {
            return Err(Error::NoConvergence { what: "shooting bisection", iterations: it, residual: shallow - steep });
        }
        it += 1;
        let mid = 0.5 * (steep + shallow);
        if mid <= steep || mid >= shallow {
            break;
        }
        match classify(nl, c, mid, opts)? {
            Shot::Steep => steep = mid,
            Shot::Shallow => shallow = mid,
        }
    }
    Ok(0.5 * (steep + shallow))
}

/// Half-line profile f_c. `xi_max` must satisfy the envelope condition
/// c(δ₂/δ₁)^{3/2}·exp(−xi_max²/(4δ₂)) ≤ tail_tolerance.
pub fn solve_half_line(nl: &Nonlinearity, c: f64, tail_tolerance: f64, xi_max: f64) -> Result<Profile> {
    let mut opts = ShootingOptions::for_level(nl, c);
    opts.tail_tolerance = tail_tolerance;
    opts.xi_max = xi_max;
    solve_half_line_with(nl, c, &opts)
}

pub(crate) fn solve_half_line_with(nl: &Nonlinearity, c: f64, opts: &ShootingOptions) -> Result<Profile> {
    let a = envelope_constant(nl, c);
    let env = a * (-opts.xi_max * opts.xi_max / (4.0 * nl.delta2())).exp();
    if !(opts.tail_tolerance > 0.0) || env > opts.tail_tolerance * (1.0 + 1e-12) {
        return Err(Error::Domain(format!(
            "xi_max = {} too small: envelope {env:e} exceeds tail tolerance {:e}",
            opts.xi_max, opts.tail_tolerance
        )));
    }
    let p0 = shoot_slope(nl, c, opts)?;
    let tab = tabulate(nl, c, p0, opts)?;
    let d0 = nl.dphi(0.0);
    let (xi, f, flux) = tab;
    let last = f.len() - 1;
    let df: Vec<f64> = f.iter().zip(&flux).map(|(&fv, &pv)| pv / nl.dphi(fv)).collect();
    let right = Tail { xi0: xi[last], value0: f[last], diffusivity: d0 };
    let envelope = (-p0 * (PI * nl.delta2()).sqrt() / nl.delta1(), nl.delta2());
    let profile = Profile {
        kind: ProfileKind::HalfLine,
        c,
        v_prime_at_zero: p0,
        match_point: None,
        tail_tolerance: opts.tail_tolerance,
        table: Hermite::new(xi, f, df)?,
        flux,
        right,
        left: None,
        envelope,
        slope_jump: 0.0,
    };
    check_half_line(&profile)?;
    Ok(profile)
}

type Table = (Vec<f64>, Vec<f64>, Vec<f64>);

/// Forward trajectory down to f ≈ 1e-3·c, then an inward integration from
/// erfc data at the table end, scaled to meet the forward value.
fn tabulate(nl: &Nonlinearity, c: f64, p0: f64, opts: &ShootingOptions) -> Result<Table> {
    let h = opts.grid_step;
    let d0 = nl.dphi(0.0);
    let s = 2.0 * d0.sqrt();
    // keep the far end inside erfc's double range
    let far = opts.xi_max.max(16.0 * nl.delta2().sqrt()).min(25.0 * s);
    let n = (far / h).ceil() as usize;
    let grid: Vec<f64> = (0..=n).map(|i| i as f64 * h).collect();
    let far = grid[n];

    let fwd_tol = Tolerances { rtol: opts.rtol, atol: 1e-15 * c, max_steps: 1_000_000 };
    let mut f = Vec::with_capacity(n + 1);
    let mut p = Vec::with_capacity(n + 1);
    f.push(c);
    p.push(p0);
    let mut y = [c, p0];
    let mut hstep = 0.0;
    let mut m = None;
    for i in 1..=n {
        let out = ode::integrate(rhs(nl), grid[i - 1], y, grid[i], hstep, fwd_tol, |_, _| Flow::Continue)?;
        y = out.y;
        hstep = out.h;
        f.push(y[0]);
        p.push(y[1]);
        if y[0] <= MATCH_LEVEL * c {
            m = Some(i);
            break;
        }
    }
    let m = m.ok_or_else(|| Error::Invariant(format!("profile at c = {c} never decays below {MATCH_LEVEL}·c")))?;
    let target = f[m];

    let back_tol = Tolerances { rtol: opts.rtol, atol: 1e-300, max_steps: 1_000_000 };
    let start = |k: f64| {
        let fv = k * erfc(far / s);
        [fv, nl.dphi(fv) * k * derfc(far / s) / s]
    };
    let inward = |k: f64| -> Result<f64> {
        let out = ode::integrate(rhs(nl), far, start(k), grid[m], 0.0, back_tol, |_, _| Flow::Continue)?;
        Ok(out.y[0])
    };
    let k0 = target / erfc(grid[m] / s);
    let k = if nl.is_linear() {
        k0
    } else {
        let (mut lo, mut hi) = (0.5 * k0, 2.0 * k0);
        let mut tries = 0;
        while inward(lo)? > target || inward(hi)? < target {
            lo *= 0.25;
            hi *= 4.0;
            tries += 1;
            if tries > 20 {
                return Err(Error::Bracket(format!("tail amplitude for c = {c} not bracketed")));
            }
        }
        let mut err = None;
        let k = brent(
            |k| match inward(k) {
                Ok(v) => v - target,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            },
            lo,
            hi,
            1e-15 * k0,
            200,
        )?;
        if let Some(e) = err {
            return Err(e);
        }
        k
    };

    // recording pass from the far end inward
    let mut tail_f = vec![0.0; n + 1 - m];
    let mut tail_p = vec![0.0; n + 1 - m];
    let mut y = start(k);
    tail_f[n - m] = y[0];
    tail_p[n - m] = y[1];
    let mut hstep = 0.0;
    for i in (m..n).rev() {
        let out = ode::integrate(rhs(nl), grid[i + 1], y, grid[i], hstep, back_tol, |_, _| Flow::Continue)?;
        y = out.y;
        hstep = out.h;
        tail_f[i - m] = y[0];
        tail_p[i - m] = y[1];
    }
    f.truncate(m);
    p.truncate(m);
    f.extend_from_slice(&tail_f);
    p.extend_from_slice(&tail_p);
    Ok((grid, f, p))
}

fn check_half_line(p: &Profile) -> Result<()> {
    let f = p.f_values();
    if f[0] != p.c {
        return Err(Error::Invariant(format!("f(0) = {} differs from c = {}", f[0], p.c)));
    }
    if let Some(i) = f.windows(2).position(|w| !(w[1] < w[0])) {
        return Err(Error::Invariant(format!("profile not strictly decreasing at node {i}")));
    }
    let last = *f.last().unwrap();
    if !(last > 0.0 && last <= p.tail_tolerance) {
        return Err(Error::Invariant(format!("tail value {last:e} outside (0, {:e}]", p.tail_tolerance)));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heat_slope_is_one_over_sqrt_pi() {
        let nl = Nonlinearity::heat();
        let p0 = shoot_slope(&nl, 1.0, &ShootingOptions::for_level(&nl, 1.0)).unwrap();
        assert!((p0 + 1.0 / PI.sqrt()).abs() < 1e-10, "{p0}");
    }

    #[test]
    fn rejects_short_window() {
        let nl = Nonlinearity::default_ramp();
        assert!(solve_half_line(&nl, 1.0, 1e-12, 4.0).is_err());
    }
}
