//! Whole-line profiles via the reflected nonlinearity ψ(s) = φ(c) − φ(c − s):
//! the left half is c − g_a(−ξ) with g_a the ψ-profile at level a, the right
//! half is the φ-profile at level c − a, and a* equalises the two fluxes.

use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::numerics::interp::Hermite;
use crate::numerics::roots::brent;

use super::profile::{Profile, ProfileKind, Tail};
use super::shooting::{shoot_slope, solve_half_line_with, ShootingOptions};

const MAX_JUMP: f64 = 1e-9;
const LEFT_FLOOR: f64 = 1e-13;

/// Sign function of the matching problem: V_a′(0) − v_{c−a}′(0), with
/// `psi` the reflected nonlinearity at level c.
pub fn matching_gap(nl: &Nonlinearity, psi: &Nonlinearity, c: f64, a: f64, opts: &ShootingOptions) -> Result<f64> {
    Ok(shoot_slope(psi, a, opts)? - shoot_slope(nl, c - a, opts)?)
}

pub fn solve_whole_line(nl: &Nonlinearity, c: f64, tail_tolerance: f64, xi_max: f64) -> Result<Profile> {
    let mut opts = ShootingOptions::for_level(nl, c);
    opts.tail_tolerance = tail_tolerance;
    opts.xi_max = xi_max;
    solve_whole_line_with(nl, c, &opts)
}

pub(crate) fn solve_whole_line_with(nl: &Nonlinearity, c: f64, opts: &ShootingOptions) -> Result<Profile> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Domain(format!("level c = {c} must be positive")));
    }
    let psi = nl.reflected(c)?;
    let (lo, hi) = (1e-3 * c, (1.0 - 1e-3) * c);
    let (glo, ghi) = (matching_gap(nl, &psi, c, lo, opts)?, matching_gap(nl, &psi, c, hi, opts)?);
    if !(glo > 0.0 && ghi < 0.0) {
        return Err(Error::Bracket(format!(
            "{}: matching gap has no sign change on [{lo}, {hi}] ({glo:e}, {ghi:e})",
            nl.name()
        )));
    }
    let mut err = None;
    let a_star = brent(
        |a| match matching_gap(nl, &psi, c, a, opts) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                0.0
            }
        },
        lo,
        hi,
        1e-13 * c,
        200,
    )?;
    if let Some(e) = err {
        return Err(e);
    }

    let g = solve_half_line_with(&psi, a_star, opts)?;
    let right = solve_half_line_with(nl, c - a_star, opts)?;
    let jump = (g.v_prime_at_zero - right.v_prime_at_zero).abs();
    if jump > MAX_JUMP {
        return Err(Error::NoConvergence { what: "whole-line flux matching", iterations: 0, residual: jump });
    }

    let (gx, gf, gd) = (g.xi(), g.f_values(), g.df_values());
    // c − g stops resolving g once g nears an ulp of c; stop the left table
    // while it is still strictly monotone in double precision
    let keep = gf.iter().position(|&v| v < LEFT_FLOOR * c).unwrap_or(gf.len()).max(2);
    let (gx, gf, gd) = (&gx[..keep], &gf[..keep], &gd[..keep]);
    let mut xi = Vec::with_capacity(gx.len() + right.xi().len());
    let mut f = Vec::with_capacity(xi.capacity());
    let mut df = Vec::with_capacity(xi.capacity());
    let mut flux = Vec::with_capacity(xi.capacity());
    for j in (1..gx.len()).rev() {
        xi.push(-gx[j]);
        f.push(c - gf[j]);
        df.push(gd[j]);
        flux.push(g.flux()[j]);
    }
    xi.extend_from_slice(right.xi());
    f.extend_from_slice(right.f_values());
    df.extend_from_slice(right.df_values());
    flux.extend_from_slice(right.flux());

    let last = gx.len() - 1;
    let left = Tail { xi0: -gx[last], value0: gf[last], diffusivity: nl.dphi(c) };
    let profile = Profile {
        kind: ProfileKind::WholeLine,
        c,
        v_prime_at_zero: right.v_prime_at_zero,
        match_point: Some(a_star),
        tail_tolerance: opts.tail_tolerance,
        table: Hermite::new(xi, f, df)?,
        flux,
        right: right.right,
        left: Some(left),
        envelope: right.envelope,
        slope_jump: jump,
    };
    check_whole_line(&profile)?;
    Ok(profile)
}

/// |φ′(f)f′(0⁻) − φ′(f)f′(0⁺)|; zero for half-line profiles.
pub fn slope_mismatch(p: &Profile) -> f64 {
    p.slope_jump
}

fn check_whole_line(p: &Profile) -> Result<()> {
    let f = p.f_values();
    if let Some(i) = f.windows(2).position(|w| !(w[1] < w[0])) {
        return Err(Error::Invariant(format!("whole-line profile not strictly decreasing at node {i}")));
    }
    let (first, last) = (f[0], *f.last().unwrap());
    if !((p.c - first).abs() <= p.tail_tolerance && first < p.c) {
        return Err(Error::Invariant(format!("left limit {first} not within tolerance of c = {}", p.c)));
    }
    if !(last > 0.0 && last <= p.tail_tolerance) {
        return Err(Error::Invariant(format!("right tail {last:e} above tolerance")));
    }
    Ok(())
}
