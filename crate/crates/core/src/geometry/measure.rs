//! H^{N−1}(Γ_s ∩ B_R(x₀)) for the level sets Γ_s = {d = s}.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::quadrature;
use crate::numerics::special::unit_ball_volume;

use super::ball::TouchingBall;
use super::contour::{clipped_length, marching_squares};
use super::domain::{Domain, DomainKind};
use super::graph::GraphFunction;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MeasureMethod {
    ClosedForm,
    Contour,
    MonteCarlo,
}

#[derive(Debug, Clone, Serialize)]
pub struct MeasureEstimate {
    pub value: f64,
    /// Standard error for Monte Carlo estimates.
    pub std_error: Option<f64>,
    pub method: MeasureMethod,
    pub samples: u64,
}

#[derive(Debug, Clone, Copy)]
pub struct MeasureOptions {
    /// Contour grid nodes per axis.
    pub contour_nodes: usize,
    pub mc_target_rel_se: f64,
    pub mc_max_samples: u64,
    pub seed: u64,
}

impl Default for MeasureOptions {
    fn default() -> Self {
        Self { contour_nodes: 2049, mc_target_rel_se: 3e-3, mc_max_samples: 40_000_000, seed: 20_240_601 }
    }
}

/// 2^{(N−1)/2} ω_{N−1} ∏(1/R − κ_j)^{−1/2}, the limit of s^{−(N−1)/2}·H^{N−1}.
pub fn asymptotic_volume_constant(ball: &TouchingBall, dim: usize) -> f64 {
    let m = (dim - 1) as u32;
    2f64.powf(m as f64 / 2.0) * unit_ball_volume(m) * ball.curvature_factor()
}

pub fn level_set_measure(dom: &Domain, s: f64, ball: &TouchingBall, opts: &MeasureOptions) -> Result<MeasureEstimate> {
    if !(s > 0.0 && s < ball.radius) {
        return Err(Error::Domain(format!("level s = {s} must lie in (0, R = {})", ball.radius)));
    }
    let n = dom.dim;
    let closed = |value| Ok(MeasureEstimate { value, std_error: None, method: MeasureMethod::ClosedForm, samples: 0 });
    match &dom.kind {
        DomainKind::HalfSpace { .. } => {
            let h = dom.signed_distance(&ball.center)?;
            let r2 = ball.radius * ball.radius - (h - s) * (h - s);
            closed(if r2 > 0.0 { unit_ball_volume((n - 1) as u32) * r2.powf((n - 1) as f64 / 2.0) } else { 0.0 })
        }
        DomainKind::BallInterior { center, radius } => closed(sphere_cap(n, radius - s, center, ball)?),
        DomainKind::BallExterior { center, radius } => closed(sphere_cap(n, radius + s, center, ball)?),
        DomainKind::Graph(f) if n == 2 => contour_measure(dom, f, s, ball, opts),
        DomainKind::Graph(f) => monte_carlo_measure(dom, f, s, ball, opts),
    }
}

/// Area of {y : |y − c| = a, |y − x₀| < R} in ℝ^N.
fn sphere_cap(n: usize, a: f64, c: &[f64], ball: &TouchingBall) -> Result<f64> {
    let d = c.iter().zip(&ball.center).map(|(p, q)| (p - q) * (p - q)).sum::<f64>().sqrt();
    let r = ball.radius;
    let full = (n as f64) * unit_ball_volume(n as u32) * a.powi(n as i32 - 1);
    if d == 0.0 {
        return Ok(if a < r { full } else { 0.0 });
    }
    let cos0 = ((a * a + d * d - r * r) / (2.0 * a * d)).clamp(-1.0, 1.0);
    let theta0 = cos0.acos();
    let sigma = (n as f64 - 1.0) * unit_ball_volume(n as u32 - 1);
    let ang = if n == 2 {
        theta0
    } else {
        quadrature::integrate(|t: f64| t.sin().powi(n as i32 - 2), 0.0, theta0, 1e-14)?
    };
    Ok(sigma * a.powi(n as i32 - 1) * ang)
}

/// Radius around x₀′ outside which no point of the band
/// {f + s − δ ≤ x_N ≤ f + (s+δ)·√(1+L²)} lies in the ball.
fn footprint_radius(f: &GraphFunction, s: f64, delta: f64, ball: &TouchingBall, lip: f64) -> f64 {
    let m = ball.center.len() - 1;
    let c = &ball.center;
    let r = ball.radius;
    let (z0, z1) = (s - delta, (s + delta) * (1.0 + lip * lip).sqrt());
    let hits = |y: &[f64]| {
        let q: f64 = (0..m).map(|j| (y[j] - c[j]) * (y[j] - c[j])).sum();
        if q >= r * r {
            return false;
        }
        let half = (r * r - q).sqrt();
        let base = f.value(y);
        // vertical segment [base+z0, base+z1] meets [c_N − half, c_N + half]
        base + z0 < c[m] + half && base + z1 > c[m] - half
    };
    let dirs = if m == 1 { 2 } else { 64 };
    let steps = 4000;
    let mut rmax: f64 = 0.0;
    for k in 0..dirs {
        let th = 2.0 * std::f64::consts::PI * k as f64 / dirs as f64;
        let mut dir = vec![0.0; m];
        dir[0] = th.cos();
        if m > 1 {
            dir[1] = th.sin();
        }
        for i in 0..=steps {
            let t = r * i as f64 / steps as f64;
            let y: Vec<f64> = (0..m).map(|j| c[j] + t * dir[j]).collect();
            if hits(&y) {
                rmax = rmax.max(t);
            }
        }
    }
    (rmax + 2.0 * r / steps as f64).min(r)
}

fn contour_measure(dom: &Domain, f: &GraphFunction, s: f64, ball: &TouchingBall, opts: &MeasureOptions) -> Result<MeasureEstimate> {
    let c = &ball.center;
    let margin = 0.05 * s;
    let lip0 = f.lipschitz_on(&c[..1], ball.radius);
    let rad = footprint_radius(f, s, margin, ball, lip0);
    let (xa, xb) = (c[0] - rad, c[0] + rad);
    let lip = f.lipschitz_on(&c[..1], rad);
    let nodes = opts.contour_nodes.max(16);
    // vertical extent of the band over the footprint
    let (mut ylo, mut yhi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..nodes {
        let x = xa + (xb - xa) * i as f64 / (nodes - 1) as f64;
        let v = f.value(&[x]);
        ylo = ylo.min(v + s - margin);
        yhi = yhi.max(v + (s + margin) * (1.0 + lip * lip).sqrt());
    }
    ylo = ylo.max(c[1] - ball.radius - margin);
    yhi = yhi.min(c[1] + ball.radius + margin);
    let hx = (xb - xa) / (nodes - 1) as f64;
    let hy = (yhi - ylo) / (nodes - 1) as f64;
    let values: Vec<f64> = (0..nodes * nodes)
        .into_par_iter()
        .with_min_len(4096)
        .map(|k| {
            let (i, j) = (k % nodes, k / nodes);
            dom.signed_distance(&[xa + i as f64 * hx, ylo + j as f64 * hy]).map(|d| d - s)
        })
        .collect::<Result<_>>()?;
    let segs = marching_squares(&values, nodes, nodes, [xa, ylo], [hx, hy]);
    // fixed-order sum
    let len: f64 = segs.iter().map(|sg| clipped_length(sg, [c[0], c[1]], ball.radius)).sum();
    Ok(MeasureEstimate { value: len, std_error: None, method: MeasureMethod::Contour, samples: (nodes * nodes) as u64 })
}

const CHUNK: u64 = 16_384;
const CHUNKS_PER_ROUND: u64 = 8;

fn monte_carlo_measure(dom: &Domain, f: &GraphFunction, s: f64, ball: &TouchingBall, opts: &MeasureOptions) -> Result<MeasureEstimate> {
    let n = dom.dim;
    let m = n - 1;
    let c = &ball.center;
    let delta = s / 100.0;
    let lip0 = f.lipschitz_on(&c[..m], ball.radius);
    let rad = footprint_radius(f, s, delta, ball, lip0);
    let lip = f.lipschitz_on(&c[..m], rad);
    // d ≤ z and d ≥ z/√(1+L²) bound the shell in the sheared variable z
    let (z0, z1) = (s - delta, (s + delta) * (1.0 + lip * lip).sqrt());
    let box_volume = (2.0 * rad).powi(m as i32) * (z1 - z0);

    let chunk_hits = |id: u64| -> Result<u64> {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
        rng.set_stream(id);
        let mut hits = 0;
        let mut x = vec![0.0; n];
        for _ in 0..CHUNK {
            for j in 0..m {
                x[j] = c[j] + rad * (2.0 * rng.gen::<f64>() - 1.0);
            }
            let z = z0 + (z1 - z0) * rng.gen::<f64>();
            x[m] = f.value(&x[..m]) + z;
            if !ball.contains(&x) {
                continue;
            }
            let d = dom.signed_distance(&x)?;
            if (d - s).abs() < delta {
                hits += 1;
            }
        }
        Ok(hits)
    };

    let mut hits = 0u64;
    let mut samples = 0u64;
    let mut next_chunk = 0u64;
    loop {
        let ids: Vec<u64> = (next_chunk..next_chunk + CHUNKS_PER_ROUND).collect();
        let round: Vec<u64> = ids.par_iter().map(|&id| chunk_hits(id)).collect::<Result<_>>()?;
        next_chunk += CHUNKS_PER_ROUND;
        hits += round.iter().sum::<u64>();
        samples += CHUNK * CHUNKS_PER_ROUND;
        let p = hits as f64 / samples as f64;
        let estimate = box_volume * p / (2.0 * delta);
        let rel_se = if hits == 0 { f64::INFINITY } else { ((1.0 - p) / (samples as f64 * p)).sqrt() };
        if rel_se <= opts.mc_target_rel_se {
            return Ok(MeasureEstimate {
                value: estimate,
                std_error: Some(rel_se * estimate),
                method: MeasureMethod::MonteCarlo,
                samples,
            });
        }
        if samples >= opts.mc_max_samples {
            return Err(Error::MonteCarlo { estimate, rel_std_error: rel_se, samples });
        }
    }
}
