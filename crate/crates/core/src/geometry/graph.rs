//! Boundary graphs x_N = f(x′) over ℝ^{N−1}.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

/// User-supplied C² graph.
pub trait GraphSurface: Send + Sync + fmt::Debug {
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64], out: &mut [f64]);
    fn hessian(&self, x: &[f64]) -> DMatrix<f64>;
}

#[derive(Debug, Clone)]
pub enum GraphFunction {
    /// a·x′ + b.
    Affine { slope: Vec<f64>, offset: f64 },
    /// |x′|²/(2ρ).
    Paraboloid { rho: f64 },
    /// A·sin(k x₁).
    Sinusoid { amplitude: f64, frequency: f64 },
    Custom(Arc<dyn GraphSurface>),
}

/// Configuration form of a graph.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase")]
pub enum GraphSpec {
    Affine { slope: Vec<f64>, offset: f64 },
    Paraboloid { rho: f64 },
    Sinusoid { amplitude: f64, frequency: f64 },
}

impl GraphSpec {
    pub fn build(&self) -> GraphFunction {
        match self {
            Self::Affine { slope, offset } => GraphFunction::Affine { slope: slope.clone(), offset: *offset },
            Self::Paraboloid { rho } => GraphFunction::Paraboloid { rho: *rho },
            Self::Sinusoid { amplitude, frequency } => {
                GraphFunction::Sinusoid { amplitude: *amplitude, frequency: *frequency }
            }
        }
    }
}

impl GraphFunction {
    pub fn value(&self, x: &[f64]) -> f64 {
        match self {
            Self::Affine { slope, offset } => offset + slope.iter().zip(x).map(|(a, b)| a * b).sum::<f64>(),
            Self::Paraboloid { rho } => x.iter().map(|v| v * v).sum::<f64>() / (2.0 * rho),
            Self::Sinusoid { amplitude, frequency } => amplitude * (frequency * x[0]).sin(),
            Self::Custom(g) => g.value(x),
        }
    }

    pub fn gradient(&self, x: &[f64], out: &mut [f64]) {
        match self {
            Self::Affine { slope, .. } => {
                for (o, s) in out.iter_mut().zip(slope) {
                    *o = *s;
                }
            }
            Self::Paraboloid { rho } => {
                for (o, v) in out.iter_mut().zip(x) {
                    *o = v / rho;
                }
            }
            Self::Sinusoid { amplitude, frequency } => {
                out.iter_mut().for_each(|o| *o = 0.0);
                out[0] = amplitude * frequency * (frequency * x[0]).cos();
            }
            Self::Custom(g) => g.gradient(x, out),
        }
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let m = x.len();
        match self {
            Self::Affine { .. } => DMatrix::zeros(m, m),
            Self::Paraboloid { rho } => DMatrix::identity(m, m) / *rho,
            Self::Sinusoid { amplitude, frequency } => {
                let mut h = DMatrix::zeros(m, m);
                h[(0, 0)] = -amplitude * frequency * frequency * (frequency * x[0]).sin();
                h
            }
            Self::Custom(g) => g.hessian(x),
        }
    }

    /// Upper bound of |∇f| on the ball |y′ − x′| ≤ r, exact for the built-ins.
    pub fn lipschitz_on(&self, x: &[f64], r: f64) -> f64 {
        match self {
            Self::Affine { slope, .. } => slope.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Self::Paraboloid { rho } => (x.iter().map(|v| v * v).sum::<f64>().sqrt() + r) / rho,
            Self::Sinusoid { amplitude, frequency } => (amplitude * frequency).abs(),
            Self::Custom(_) => {
                // sampled estimate with a safety factor
                let m = x.len();
                let mut g = vec![0.0; m];
                let mut best: f64 = 0.0;
                let k: usize = 16;
                for i in 0..k.pow(m.min(2) as u32) {
                    let mut y = x.to_vec();
                    let mut idx = i;
                    for yj in y.iter_mut().take(m.min(2)) {
                        *yj += r * (2.0 * (idx % k) as f64 / (k - 1) as f64 - 1.0);
                        idx /= k;
                    }
                    self.gradient(&y, &mut g);
                    best = best.max(g.iter().map(|v| v * v).sum::<f64>().sqrt());
                }
                1.25 * best + 1e-12
            }
        }
    }
}
