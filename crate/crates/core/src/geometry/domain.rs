//! Domains with signed distance (positive inside) and principal curvatures
//! with respect to the inward normal.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::graph::{GraphFunction, GraphSpec};

#[derive(Debug, Clone)]
pub enum DomainKind {
    /// {x · n > offset} with unit n.
    HalfSpace { normal: Vec<f64>, offset: f64 },
    BallInterior { center: Vec<f64>, radius: f64 },
    BallExterior { center: Vec<f64>, radius: f64 },
    /// {x_N > f(x′)}.
    Graph(GraphFunction),
}

#[derive(Debug, Clone)]
pub struct Domain {
    pub kind: DomainKind,
    pub dim: usize,
}

/// Configuration form of a domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum DomainSpec {
    HalfSpace { normal: Vec<f64>, offset: f64 },
    BallInterior { center: Vec<f64>, radius: f64 },
    BallExterior { center: Vec<f64>, radius: f64 },
    Graph { dim: usize, graph: GraphSpec },
}

impl DomainSpec {
    pub fn build(&self) -> Result<Domain> {
        match self {
            Self::HalfSpace { normal, offset } => Domain::half_space(normal.clone(), *offset),
            Self::BallInterior { center, radius } => Domain::ball_interior(center.clone(), *radius),
            Self::BallExterior { center, radius } => Domain::ball_exterior(center.clone(), *radius),
            Self::Graph { dim, graph } => Domain::graph(*dim, graph.build()),
        }
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

const POINT_TOL: f64 = 1e-9;

impl Domain {
    pub fn half_space(normal: Vec<f64>, offset: f64) -> Result<Self> {
        let n = norm(&normal);
        if normal.len() < 2 || !(n > 0.0) {
            return Err(Error::Geometry("half-space needs a nonzero normal in dimension >= 2".into()));
        }
        let dim = normal.len();
        Ok(Self { kind: DomainKind::HalfSpace { normal: normal.iter().map(|v| v / n).collect(), offset }, dim })
    }

    /// {x_N > 0} in ℝ^N.
    pub fn upper_half_space(dim: usize) -> Self {
        let mut n = vec![0.0; dim];
        n[dim - 1] = 1.0;
        Self::half_space(n, 0.0).expect("valid normal")
    }

    pub fn ball_interior(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::check_ball(&center, radius)?;
        let dim = center.len();
        Ok(Self { kind: DomainKind::BallInterior { center, radius }, dim })
    }

    pub fn ball_exterior(center: Vec<f64>, radius: f64) -> Result<Self> {
        Self::check_ball(&center, radius)?;
        let dim = center.len();
        Ok(Self { kind: DomainKind::BallExterior { center, radius }, dim })
    }

    fn check_ball(center: &[f64], radius: f64) -> Result<()> {
        if center.len() < 2 || !(radius > 0.0) {
            return Err(Error::Geometry("ball needs dimension >= 2 and a positive radius".into()));
        }
        Ok(())
    }

    pub fn graph(dim: usize, f: GraphFunction) -> Result<Self> {
        if dim < 2 {
            return Err(Error::Geometry("graph domains need N >= 2".into()));
        }
        if let GraphFunction::Affine { slope, .. } = &f {
            if slope.len() != dim - 1 {
                return Err(Error::Geometry(format!("affine slope has {} entries, expected {}", slope.len(), dim - 1)));
            }
        }
        Ok(Self { kind: DomainKind::Graph(f), dim })
    }

    pub fn graph_function(&self) -> Option<&GraphFunction> {
        match &self.kind {
            DomainKind::Graph(f) => Some(f),
            _ => None,
        }
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Geometry(format!("point has dimension {}, domain has {}", x.len(), self.dim)));
        }
        Ok(())
    }

    /// Signed distance to ∂Ω, positive inside.
    pub fn signed_distance(&self, x: &[f64]) -> Result<f64> {
        self.check_point(x)?;
        match &self.kind {
            DomainKind::HalfSpace { normal, offset } => {
                Ok(normal.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - offset)
            }
            DomainKind::BallInterior { center, radius } => Ok(radius - dist(x, center)),
            DomainKind::BallExterior { center, radius } => Ok(dist(x, center) - radius),
            DomainKind::Graph(f) => graph_distance(f, x).map(|(d, _)| d),
        }
    }

    /// Nearest boundary point.
    pub fn foot_point(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_point(x)?;
        match &self.kind {
            DomainKind::HalfSpace { normal, .. } => {
                let d = self.signed_distance(x)?;
                Ok(x.iter().zip(normal).map(|(a, n)| a - d * n).collect())
            }
            DomainKind::BallInterior { center, radius } | DomainKind::BallExterior { center, radius } => {
                let r = dist(x, center);
                if r == 0.0 {
                    return Err(Error::Geometry("foot point of the centre is not unique".into()));
                }
                Ok(center.iter().zip(x).map(|(c, v)| c + (v - c) * radius / r).collect())
            }
            DomainKind::Graph(f) => {
                let (_, y) = graph_distance(f, x)?;
                let mut p = y.clone();
                p.push(f.value(&y));
                Ok(p)
            }
        }
    }

    /// Distance from y to ∂Ω measured along the defining equation; used to
    /// validate boundary points.
    fn boundary_residual(&self, y: &[f64]) -> f64 {
        match &self.kind {
            DomainKind::Graph(f) => (y[self.dim - 1] - f.value(&y[..self.dim - 1])).abs(),
            _ => self.signed_distance(y).map(f64::abs).unwrap_or(f64::INFINITY),
        }
    }

    fn check_boundary(&self, y: &[f64]) -> Result<()> {
        self.check_point(y)?;
        let r = self.boundary_residual(y);
        if !(r <= POINT_TOL) {
            return Err(Error::Geometry(format!("point {y:?} is {r:e} away from the boundary")));
        }
        Ok(())
    }

    /// Unit inward normal at a boundary point.
    pub fn inward_normal(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_boundary(y)?;
        Ok(match &self.kind {
            DomainKind::HalfSpace { normal, .. } => normal.clone(),
            DomainKind::BallInterior { center, radius } => {
                center.iter().zip(y).map(|(c, v)| (c - v) / radius).collect()
            }
            DomainKind::BallExterior { center, radius } => {
                center.iter().zip(y).map(|(c, v)| (v - c) / radius).collect()
            }
            DomainKind::Graph(f) => {
                let m = self.dim - 1;
                let mut g = vec![0.0; m];
                f.gradient(&y[..m], &mut g);
                let w = (1.0 + g.iter().map(|v| v * v).sum::<f64>()).sqrt();
                let mut n: Vec<f64> = g.iter().map(|v| -v / w).collect();
                n.push(1.0 / w);
                n
            }
        })
    }

    /// Principal curvatures at a boundary point, sorted ascending. Positive
    /// when ∂Ω bends towards the inward normal (an interior sphere of radius ρ
    /// has κ = 1/ρ).
    pub fn principal_curvatures(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_boundary(y)?;
        let m = self.dim - 1;
        Ok(match &self.kind {
            DomainKind::HalfSpace { .. } => vec![0.0; m],
            DomainKind::BallInterior { radius, .. } => vec![1.0 / radius; m],
            DomainKind::BallExterior { radius, .. } => vec![-1.0 / radius; m],
            DomainKind::Graph(f) => graph_curvatures(f, &y[..m]),
        })
    }
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Eigenvalues of the second fundamental form Hess f / W relative to the
/// first fundamental form I + ∇f∇fᵀ.
pub fn graph_curvatures(f: &GraphFunction, xp: &[f64]) -> Vec<f64> {
    let m = xp.len();
    let mut g = vec![0.0; m];
    f.gradient(xp, &mut g);
    let gv = DVector::from_vec(g);
    let w = (1.0 + gv.norm_squared()).sqrt();
    let first = DMatrix::identity(m, m) + &gv * gv.transpose();
    let second = f.hessian(xp) / w;
    let chol = first.cholesky().expect("I + ggᵀ is positive definite");
    let l_inv = chol.l().try_inverse().expect("triangular factor is invertible");
    let s = &l_inv * second * l_inv.transpose();
    let sym = (&s + s.transpose()) * 0.5;
    let mut k: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    k.sort_by(|a, b| a.partial_cmp(b).unwrap());
    k
}

fn sq_dist_to_graph(f: &GraphFunction, x: &[f64], y: &[f64]) -> f64 {
    let m = y.len();
    let mut s: f64 = (0..m).map(|j| (y[j] - x[j]) * (y[j] - x[j])).sum();
    let dz = f.value(y) - x[m];
    s += dz * dz;
    s
}

/// (signed distance, foot abscissa y′) for the graph domain.
fn graph_distance(f: &GraphFunction, x: &[f64]) -> Result<(f64, Vec<f64>)> {
    let m = x.len() - 1;
    let xp = &x[..m];
    let vertical = x[m] - f.value(xp);
    let sign = if vertical >= 0.0 { 1.0 } else { -1.0 };
    let r0 = vertical.abs();
    if r0 == 0.0 {
        return Ok((0.0, xp.to_vec()));
    }
    if let GraphFunction::Affine { slope, .. } = f {
        let w = (1.0 + slope.iter().map(|v| v * v).sum::<f64>()).sqrt();
        let d = vertical / w;
        let y = xp.iter().zip(slope).map(|(a, s)| a + d * s / w).collect();
        return Ok((d, y));
    }
    // the foot point lies within r0 of x′ horizontally, so a sampled search
    // of that ball finds the right basin
    let k: usize = match m {
        1 => 33,
        2 => 17,
        _ => 7,
    };
    let mut best = xp.to_vec();
    let mut best_d = r0 * r0;
    let total = k.pow(m as u32);
    let mut y = vec![0.0; m];
    for idx in 0..total {
        let mut i = idx;
        let mut inside = 0.0;
        for j in 0..m {
            let t = 2.0 * (i % k) as f64 / (k - 1) as f64 - 1.0;
            i /= k;
            y[j] = xp[j] + r0 * t;
            inside += t * t;
        }
        if inside > 1.0 + 1e-12 {
            continue;
        }
        let d = sq_dist_to_graph(f, x, &y);
        if d < best_d {
            best_d = d;
            best.copy_from_slice(&y);
        }
    }
    let spacing = 2.0 * r0 / (k - 1) as f64;
    let (y, d2) = polish(f, x, best, best_d, spacing)?;
    Ok((sign * d2.sqrt(), y))
}

/// Safeguarded Newton on D(y′) = |y′ − x′|² + (f(y′) − x_N)².
fn polish(f: &GraphFunction, x: &[f64], mut y: Vec<f64>, mut dval: f64, spacing: f64) -> Result<(Vec<f64>, f64)> {
    let m = y.len();
    if m == 1 {
        return polish_1d(f, x, y[0], dval, spacing).map(|(a, b)| (vec![a], b));
    }
    let mut g = vec![0.0; m];
    for _ in 0..100 {
        f.gradient(&y, &mut g);
        let dz = f.value(&y) - x[m];
        let gv = DVector::from_column_slice(&g);
        let grad = DVector::from_iterator(m, (0..m).map(|j| 2.0 * (y[j] - x[j]) + 2.0 * dz * g[j]));
        let hess = DMatrix::identity(m, m) * 2.0 + &gv * gv.transpose() * 2.0 + f.hessian(&y) * (2.0 * dz);
        let step = match hess.clone().cholesky() {
            Some(ch) => -ch.solve(&grad),
            None => -grad.clone() * (0.5 * spacing / grad.norm().max(1e-300)),
        };
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial: Vec<f64> = (0..m).map(|j| y[j] + t * step[j]).collect();
            let dt = sq_dist_to_graph(f, x, &trial);
            if dt <= dval {
                let moved = (t * step.norm()) <= 1e-15 * (1.0 + y.iter().map(|v| v.abs()).fold(0.0, f64::max));
                y = trial;
                dval = dt;
                accepted = true;
                if moved {
                    return Ok((y, dval));
                }
                break;
            }
            t *= 0.5;
        }
        if !accepted || grad.norm() <= 1e-15 {
            return Ok((y, dval));
        }
    }
    Ok((y, dval))
}

fn polish_1d(f: &GraphFunction, x: &[f64], y0: f64, d0: f64, spacing: f64) -> Result<(f64, f64)> {
    let dfun = |y: f64| sq_dist_to_graph(f, x, &[y]);
    // golden section on the sampled bracket, then Newton
    let (mut a, mut b) = (y0 - spacing, y0 + spacing);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (dfun(c), dfun(d));
    for _ in 0..60 {
        if (b - a).abs() <= 1e-10 * (1.0 + y0.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = dfun(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = dfun(d);
        }
    }
    let (mut y, mut best) = if fc < fd { (c, fc) } else { (d, fd) };
    if d0 < best {
        y = y0;
        best = d0;
    }
    let mut g = [0.0];
    for _ in 0..8 {
        f.gradient(&[y], &mut g);
        let dz = f.value(&[y]) - x[1];
        let h = f.hessian(&[y])[(0, 0)];
        let d1 = (y - x[0]) + dz * g[0];
        let d2 = 1.0 + g[0] * g[0] + dz * h;
        if !(d2 > 0.0) {
            break;
        }
        let next = y - d1 / d2;
        let dn = dfun(next);
        if dn > best {
            break;
        }
        let done = (next - y).abs() <= 1e-15 * (1.0 + y.abs());
        y = next;
        best = dn;
        if done {
            break;
        }
    }
    Ok((y, best))
}
