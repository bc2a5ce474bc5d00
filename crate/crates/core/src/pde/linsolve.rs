//! Linear solves for the symmetric Newton system (D⁻¹ − dt·L)y = b.
//!
//! Vectors span the whole grid; pinned nodes carry zero and are skipped.
//! Reductions use fixed chunks summed in order, so results do not depend
//! on the number of worker threads.

use rayon::prelude::*;

use crate::error::{Error, Result};

const CHUNK: usize = 4096;

/// Five-point (or three-point) operator D⁻¹ + dt·(−L) restricted to free nodes.
pub(crate) struct StencilMatrix<'a> {
    pub nx: usize,
    pub ny: usize,
    /// Diagonal entries (1 at pinned nodes).
    pub diag: &'a [f64],
    pub free: &'a [bool],
    /// dt/h₀² and dt/h₁².
    pub cx: f64,
    pub cy: f64,
}

impl StencilMatrix<'_> {
    fn apply_at(&self, k: usize, y: &[f64]) -> f64 {
        if !self.free[k] {
            return 0.0;
        }
        let nx = self.nx;
        let (i, j) = (k % nx, k / nx);
        let mut acc = self.diag[k] * y[k];
        let mut off = 0.0;
        if i > 0 && self.free[k - 1] {
            off += y[k - 1];
        }
        if i + 1 < nx && self.free[k + 1] {
            off += y[k + 1];
        }
        acc -= self.cx * off;
        if self.ny > 1 {
            let mut off = 0.0;
            if j > 0 && self.free[k - nx] {
                off += y[k - nx];
            }
            if j + 1 < self.ny && self.free[k + nx] {
                off += y[k + nx];
            }
            acc -= self.cy * off;
        }
        acc
    }

    pub fn apply(&self, y: &[f64], out: &mut [f64]) {
        out.par_chunks_mut(CHUNK).enumerate().for_each(|(c, o)| {
            let base = c * CHUNK;
            for (m, v) in o.iter_mut().enumerate() {
                *v = self.apply_at(base + m, y);
            }
        });
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let parts: Vec<f64> = a
        .par_chunks(CHUNK)
        .zip(b.par_chunks(CHUNK))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| p * q).sum::<f64>())
        .collect();
    parts.iter().sum()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct LinearStats {
    pub iterations: usize,
    pub relative_residual: f64,
}

/// Jacobi-preconditioned conjugate gradients to ‖r‖ ≤ rtol·‖b‖.
pub(crate) fn pcg(a: &StencilMatrix, b: &[f64], rtol: f64, max_iter: usize) -> Result<(Vec<f64>, LinearStats)> {
    let n = b.len();
    let mut x = vec![0.0; n];
    let bnorm = dot(b, b).sqrt();
    if bnorm == 0.0 {
        return Ok((x, LinearStats { iterations: 0, relative_residual: 0.0 }));
    }
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.par_iter().zip(a.diag.par_iter()).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut q = vec![0.0; n];
    let mut rz = dot(&r, &z);
    for it in 1..=max_iter {
        a.apply(&p, &mut q);
        let alpha = rz / dot(&p, &q);
        x.par_iter_mut().zip(p.par_iter()).for_each(|(x, p)| *x += alpha * p);
        r.par_iter_mut().zip(q.par_iter()).for_each(|(r, q)| *r -= alpha * q);
        let rnorm = dot(&r, &r).sqrt();
        if rnorm <= rtol * bnorm {
            return Ok((x, LinearStats { iterations: it, relative_residual: rnorm / bnorm }));
        }
        z.par_iter_mut().zip(r.par_iter().zip(a.diag.par_iter())).for_each(|(z, (r, d))| *z = r / d);
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        p.par_iter_mut().zip(z.par_iter()).for_each(|(p, z)| *p = z + beta * *p);
    }
    let rel = dot(&r, &r).sqrt() / bnorm;
    Err(Error::NoConvergence { what: "conjugate gradients", iterations: max_iter, residual: rel })
}

/// Direct tridiagonal solve for one-dimensional grids.
pub(crate) fn thomas(a: &StencilMatrix, b: &[f64]) -> (Vec<f64>, LinearStats) {
    let n = b.len();
    let lower = |k: usize| if k > 0 && a.free[k] && a.free[k - 1] { -a.cx } else { 0.0 };
    let upper = |k: usize| if k + 1 < n && a.free[k] && a.free[k + 1] { -a.cx } else { 0.0 };
    let mut cp = vec![0.0; n];
    let mut dp = vec![0.0; n];
    for k in 0..n {
        let (diag, rhs) = if a.free[k] { (a.diag[k], b[k]) } else { (1.0, 0.0) };
        if k == 0 {
            cp[0] = upper(0) / diag;
            dp[0] = rhs / diag;
        } else {
            let l = lower(k);
            let m = diag - l * cp[k - 1];
            cp[k] = upper(k) / m;
            dp[k] = (rhs - l * dp[k - 1]) / m;
        }
    }
    let mut x = vec![0.0; n];
    x[n - 1] = dp[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = dp[k] - cp[k] * x[k + 1];
    }
    (x, LinearStats { iterations: 1, relative_residual: 0.0 })
}
