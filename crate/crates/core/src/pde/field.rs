use std::io::Write;
use std::path::Path;
use std::sync::Arc;

use serde::Serialize;

use super::grid::{Grid, NodeClass};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// u = 1 on ∂Ω, u = 0 in Ω at t = 0.
    Ibvp,
    /// u = χ of the complement of Ω at t = 0, no boundary condition.
    Cauchy,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct StepRecord {
    pub t: f64,
    pub dt: f64,
    pub newton_iterations: usize,
    pub linear_iterations: usize,
    /// Largest relative residual accepted from an inner linear solve.
    pub linear_residual: f64,
    pub final_update: f64,
    pub final_residual: f64,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct RunLog {
    pub steps: Vec<StepRecord>,
}

impl RunLog {
    pub fn total_newton_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.newton_iterations).sum()
    }

    pub fn max_newton_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.newton_iterations).max().unwrap_or(0)
    }

    pub fn total_linear_iterations(&self) -> usize {
        self.steps.iter().map(|s| s.linear_iterations).sum()
    }
}

/// Solution snapshots at the requested output times.
#[derive(Debug, Clone)]
pub struct Field {
    pub grid: Arc<Grid>,
    pub problem: Problem,
    pub times: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub log: RunLog,
}

impl Field {
    pub fn snapshot(&self, ti: usize) -> &[f64] {
        &self.values[ti]
    }

    /// Bilinear (linear in 1D) interpolation of snapshot `ti` at x.
    pub fn interpolate(&self, ti: usize, x: [f64; 2]) -> Result<f64> {
        let g = &self.grid;
        let u = &self.values[ti];
        let locate = |axis: usize, coord: f64| -> Result<(usize, f64)> {
            let s = (coord - g.origin[axis]) / g.h[axis];
            let last = (g.n[axis] - 1) as f64;
            if !(s >= 0.0 && s <= last) {
                return Err(Error::Grid(format!("point {x:?} lies outside the grid window")));
            }
            let i = (s.floor() as usize).min(g.n[axis] - 2);
            Ok((i, s - i as f64))
        };
        let (i, a) = locate(0, x[0])?;
        if g.dimension == 1 {
            return Ok(u[i] * (1.0 - a) + u[i + 1] * a);
        }
        let (j, b) = locate(1, x[1])?;
        let k = g.index(i, j);
        let nx = g.n[0];
        Ok((1.0 - b) * ((1.0 - a) * u[k] + a * u[k + 1]) + b * ((1.0 - a) * u[k + nx] + a * u[k + nx + 1]))
    }

    /// Checks the range and boundary invariants on every snapshot.
    pub fn check_invariants(&self) -> Result<()> {
        for (ti, u) in self.values.iter().enumerate() {
            let t = self.times[ti];
            for (k, &v) in u.iter().enumerate() {
                if !(0.0..=1.0).contains(&v) {
                    return Err(Error::Invariant(format!("u = {v} at node {k}, t = {t}")));
                }
                if self.problem == Problem::Ibvp && t > 0.0 && self.grid.class[k] == NodeClass::Boundary && v != 1.0 {
                    return Err(Error::Invariant(format!("boundary node {k} holds {v} at t = {t}")));
                }
            }
        }
        Ok(())
    }

    /// Writes `x,[y,]u` rows for snapshot `ti`.
    pub fn write_csv(&self, ti: usize, path: &Path) -> Result<()> {
        let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
        let g = &self.grid;
        if g.dimension == 1 {
            writeln!(w, "x,u")?;
        } else {
            writeln!(w, "x,y,u")?;
        }
        for (k, v) in self.values[ti].iter().enumerate() {
            let p = g.coords(k);
            if g.dimension == 1 {
                writeln!(w, "{:.16e},{:.16e}", p[0], v)?;
            } else {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", p[0], p[1], v)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}
