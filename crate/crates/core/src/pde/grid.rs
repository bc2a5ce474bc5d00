//! Uniform node grids in one or two dimensions with a domain mask.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::Domain;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NodeClass {
    /// d > 0.
    Interior,
    /// Non-interior node with an interior stencil neighbour.
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Serialize)]
pub struct GridInfo {
    pub dimension: usize,
    pub origin: [f64; 2],
    pub n: [usize; 2],
    pub h: [f64; 2],
}

/// Node grid x = origin + (i·h₀, j·h₁). One-dimensional grids have n[1] = 1
/// and use the first coordinate only; the domain is then evaluated on the
/// line of its last coordinate (see [`Grid::new`]).
#[derive(Debug, Clone)]
pub struct Grid {
    pub dimension: usize,
    pub origin: [f64; 2],
    pub n: [usize; 2],
    pub h: [f64; 2],
    pub distance: Vec<f64>,
    pub class: Vec<NodeClass>,
}

impl Grid {
    /// Builds the mask from the domain's signed distance. A 1D grid samples
    /// a two-dimensional domain along the x_N axis through the origin of x′
    /// (the grid coordinate is x_N), or a 1D-valid half-space directly.
    pub fn new(dom: &Domain, origin: [f64; 2], n: [usize; 2], h: [f64; 2]) -> Result<Self> {
        let dimension = if n[1] <= 1 { 1 } else { 2 };
        if n[0] < 3 || (dimension == 2 && n[1] < 3) {
            return Err(Error::Grid(format!("grid needs at least 3 nodes per axis, got {n:?}")));
        }
        if !(h[0] > 0.0) || (dimension == 2 && !(h[1] > 0.0)) {
            return Err(Error::Grid(format!("grid spacing must be positive, got {h:?}")));
        }
        if dom.dim != 2 {
            return Err(Error::Grid(format!("PDE grids need a two-dimensional domain description, got N = {}", dom.dim)));
        }
        let n = [n[0], n[1].max(1)];
        let total = n[0] * n[1];
        let distance: Vec<f64> = (0..total)
            .into_par_iter()
            .with_min_len(1024)
            .map(|k| {
                let (i, j) = (k % n[0], k / n[0]);
                let p = if dimension == 1 {
                    [0.0, origin[0] + i as f64 * h[0]]
                } else {
                    [origin[0] + i as f64 * h[0], origin[1] + j as f64 * h[1]]
                };
                dom.signed_distance(&p)
            })
            .collect::<Result<_>>()?;
        // nodes within roundoff of the boundary lie on it
        let snap = 1e-9 * h[0].max(h[1]);
        let distance: Vec<f64> = distance.into_iter().map(|d: f64| if d.abs() <= snap { 0.0 } else { d }).collect();
        let mut class = vec![NodeClass::Exterior; total];
        for k in 0..total {
            if distance[k] > 0.0 {
                class[k] = NodeClass::Interior;
            }
        }
        let mut g = Self { dimension, origin, n, h, distance, class };
        for k in 0..total {
            if g.class[k] != NodeClass::Interior && g.neighbours(k).into_iter().flatten().any(|m| g.class[m] == NodeClass::Interior) {
                g.class[k] = NodeClass::Boundary;
            }
        }
        Ok(g)
    }

    /// Uniform grid over [a, b] (1D) with n nodes.
    pub fn line(dom: &Domain, a: f64, b: f64, n: usize) -> Result<Self> {
        Self::new(dom, [a, 0.0], [n, 1], [(b - a) / (n - 1) as f64, 0.0])
    }

    pub fn len(&self) -> usize {
        self.n[0] * self.n[1]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n[0] + i
    }

    pub fn ij(&self, k: usize) -> (usize, usize) {
        (k % self.n[0], k / self.n[0])
    }

    /// Physical coordinates; 1D grids report (x, 0).
    pub fn coords(&self, k: usize) -> [f64; 2] {
        let (i, j) = self.ij(k);
        [self.origin[0] + i as f64 * self.h[0], self.origin[1] + j as f64 * self.h[1]]
    }

    /// Stencil neighbours in the order x−, x+, y−, y+; `None` outside the grid.
    pub fn neighbours(&self, k: usize) -> [Option<usize>; 4] {
        let (i, j) = self.ij(k);
        let nx = self.n[0];
        let mut out = [None; 4];
        if i > 0 {
            out[0] = Some(k - 1);
        }
        if i + 1 < nx {
            out[1] = Some(k + 1);
        }
        if self.dimension == 2 {
            if j > 0 {
                out[2] = Some(k - nx);
            }
            if j + 1 < self.n[1] {
                out[3] = Some(k + nx);
            }
        }
        out
    }

    pub fn same_layout(&self, other: &Grid) -> bool {
        self.n == other.n && self.h == other.h && self.origin == other.origin
    }

    pub fn info(&self) -> GridInfo {
        GridInfo { dimension: self.dimension, origin: self.origin, n: self.n, h: self.h }
    }

    /// √(δ₁·t_min) ≥ 3h on every axis.
    pub fn check_resolution(&self, delta1: f64, t_min: f64) -> Result<()> {
        let hmax = if self.dimension == 1 { self.h[0] } else { self.h[0].max(self.h[1]) };
        let scale = (delta1 * t_min).sqrt();
        if scale < 3.0 * hmax {
            return Err(Error::Grid(format!(
                "resolution rule violated: sqrt(delta1 * t_min) = {scale:e} < 3h = {:e}",
                3.0 * hmax
            )));
        }
        Ok(())
    }
}
