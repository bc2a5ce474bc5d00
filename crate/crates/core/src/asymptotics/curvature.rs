use std::sync::Arc;

use super::report::{richardson_sqrt, Predicted, Target, VerificationReport};
use crate::error::{Error, Result};
use crate::geometry::{Domain, DomainKind, TouchingBall};
use crate::nonlinearity::Nonlinearity;
use crate::pde::{solve, EdgeCondition, Field, Grid, Problem, SolverOptions};
use crate::selfsimilar::{asymptotic_constant, ProfileKind};

/// Sub-cell samples per axis for cells cut by the sphere.
const CELL_SUBSAMPLES: usize = 32;

#[derive(Debug, Clone)]
pub struct CurvatureOptions {
    pub h: f64,
    /// Window padding around the ball; defaults to 6√(δ₂·T).
    pub pad: Option<f64>,
    pub solver: SolverOptions,
    pub divergence_factor: f64,
    pub tolerance: f64,
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        Self {
            h: 2e-3,
            pad: None,
            solver: SolverOptions::default().with_edges([EdgeCondition::Neumann, EdgeCondition::Neumann, EdgeCondition::Dirichlet, EdgeCondition::Dirichlet]),
            divergence_factor: 10.0,
            tolerance: 0.1,
        }
    }
}

/// Height of ∂Ω above x₁ for domains lying above a graph.
fn boundary_height(dom: &Domain, x: f64) -> Result<f64> {
    match &dom.kind {
        DomainKind::HalfSpace { normal, offset } if dom.dim == 2 && normal[1] > 0.0 => Ok((offset - normal[0] * x) / normal[1]),
        DomainKind::Graph(f) if dom.dim == 2 => Ok(f.value(&[x])),
        _ => Err(Error::Geometry("PDE windows need a two-dimensional domain above a graph".into())),
    }
}

/// Window over `x_range` reaching from `below` under the lowest boundary
/// point up to height `top`, with node rows on integer multiples of h.
pub fn graph_window(dom: &Domain, x_range: (f64, f64), top: f64, below: f64, h: f64) -> Result<Grid> {
    let (xa, xb) = x_range;
    let mut low = f64::INFINITY;
    for i in 0..=2000 {
        low = low.min(boundary_height(dom, xa + (xb - xa) * i as f64 / 2000.0)?);
    }
    if !(top > low) {
        return Err(Error::Grid(format!("window top {top} lies below the boundary")));
    }
    let i0 = (xa / h).floor() as i64;
    let i1 = (xb / h).ceil() as i64;
    let j0 = ((low - below) / h).floor() as i64;
    let j1 = (top / h).ceil() as i64;
    let n = [(i1 - i0 + 1) as usize, (j1 - j0 + 1) as usize];
    Grid::new(dom, [i0 as f64 * h, j0 as f64 * h], n, [h, h])
}

/// Highest boundary point over `x_range`.
pub fn boundary_top(dom: &Domain, x_range: (f64, f64)) -> Result<f64> {
    let mut high = f64::NEG_INFINITY;
    for i in 0..=2000 {
        high = high.max(boundary_height(dom, x_range.0 + (x_range.1 - x_range.0) * i as f64 / 2000.0)?);
    }
    Ok(high)
}

/// Window around the ball padded by `pad`; the Cauchy problem also pads
/// below the boundary.
pub fn ball_window(dom: &Domain, ball: &TouchingBall, problem: Problem, h: f64, pad: f64) -> Result<Grid> {
    let (cx, cy, r) = (ball.center[0], ball.center[1], ball.radius);
    let below = match problem {
        Problem::Ibvp => 2.0 * h,
        Problem::Cauchy => pad,
    };
    graph_window(dom, (cx - r - pad, cx + r + pad), cy + r + pad, below, h)
}

/// Node weights h²·|cell ∩ B_R| for the ball quadrature.
pub fn ball_weights(grid: &Grid, ball: &TouchingBall) -> Result<Vec<(usize, f64)>> {
    if grid.dimension != 2 {
        return Err(Error::Grid("ball quadrature needs a two-dimensional grid".into()));
    }
    let (cx, cy, r) = (ball.center[0], ball.center[1], ball.radius);
    let [hx, hy] = grid.h;
    let lo = [grid.origin[0], grid.origin[1]];
    let hi = [lo[0] + (grid.n[0] - 1) as f64 * hx, lo[1] + (grid.n[1] - 1) as f64 * hy];
    if cx - r < lo[0] || cx + r > hi[0] || cy - r < lo[1] || cy + r > hi[1] {
        return Err(Error::Grid("quadrature ball exits the grid window".into()));
    }
    let mut out = Vec::new();
    let ia = ((cx - r - lo[0]) / hx).floor().max(0.0) as usize;
    let ib = (((cx + r - lo[0]) / hx).ceil() as usize + 1).min(grid.n[0] - 1);
    let ja = ((cy - r - lo[1]) / hy).floor().max(0.0) as usize;
    let jb = (((cy + r - lo[1]) / hy).ceil() as usize + 1).min(grid.n[1] - 1);
    let m = CELL_SUBSAMPLES;
    for j in ja..=jb {
        for i in ia..=ib {
            let k = grid.index(i, j);
            let [x, y] = grid.coords(k);
            let (x0, x1, y0, y1) = (x - 0.5 * hx, x + 0.5 * hx, y - 0.5 * hy, y + 0.5 * hy);
            let near_x = cx.clamp(x0, x1) - cx;
            let near_y = cy.clamp(y0, y1) - cy;
            if near_x.hypot(near_y) >= r {
                continue;
            }
            let far_x = (x0 - cx).abs().max((x1 - cx).abs());
            let far_y = (y0 - cy).abs().max((y1 - cy).abs());
            let frac = if far_x.hypot(far_y) <= r {
                1.0
            } else {
                let mut inside = 0usize;
                for a in 0..m {
                    for b in 0..m {
                        let px = x0 + (a as f64 + 0.5) / m as f64 * hx;
                        let py = y0 + (b as f64 + 0.5) / m as f64 * hy;
                        if (px - cx).hypot(py - cy) < r {
                            inside += 1;
                        }
                    }
                }
                inside as f64 / (m * m) as f64
            };
            if frac > 0.0 {
                out.push((k, frac * hx * hy));
            }
        }
    }
    Ok(out)
}

/// Q(t) = t^{−(N+1)/4}·∫_{B_R} u(x,t) dx for every recorded time (N = 2).
pub fn heat_content_series(field: &Field, ball: &TouchingBall) -> Result<Vec<(f64, f64)>> {
    let w = ball_weights(&field.grid, ball)?;
    Ok(field
        .times
        .iter()
        .zip(&field.values)
        .map(|(&t, u)| {
            let integral: f64 = w.iter().map(|(k, wk)| wk * u[*k]).sum();
            (t, t.powf(-0.75) * integral)
        })
        .collect())
}

/// Runs the PDE on a window around the ball and compares Q(t) with
/// c(φ,N)·∏(1/R − κ_j)^{−1/2}, or checks divergence for degenerate balls.
pub fn verify_curvature_asymptotics(
    nl: &Nonlinearity,
    dom: &Domain,
    ball: &TouchingBall,
    problem: Problem,
    t_series: &[f64],
    opts: &CurvatureOptions,
) -> Result<(VerificationReport, Field)> {
    if dom.dim != 2 {
        return Err(Error::Config("curvature verification runs in two dimensions".into()));
    }
    let t_max = t_series.iter().cloned().fold(0.0, f64::max);
    let pad = opts.pad.unwrap_or(6.0 * (nl.delta2() * t_max).sqrt());
    let grid = Arc::new(ball_window(dom, ball, problem, opts.h, pad)?);
    let mut times = t_series.to_vec();
    times.sort_by(f64::total_cmp);
    let field = solve(nl, grid, problem, &times, &opts.solver)?;
    let series = heat_content_series(&field, ball)?;
    let kind = match problem {
        Problem::Ibvp => ProfileKind::HalfLine,
        Problem::Cauchy => ProfileKind::WholeLine,
    };
    let c = asymptotic_constant(nl, 2, kind)?.value;
    let report = curvature_report(series, c, ball, opts)?;
    Ok((report, field))
}

/// Builds the report from a measured Q series and the constant c(φ,N).
pub fn curvature_report(series: Vec<(f64, f64)>, c: f64, ball: &TouchingBall, opts: &CurvatureOptions) -> Result<VerificationReport> {
    if series.iter().any(|p| !(p.1 > 0.0)) {
        return Err(Error::Invariant("heat content must be positive".into()));
    }
    let degenerate = ball.is_degenerate();
    let predicted = if degenerate { Predicted::Infinite } else { Predicted::Finite(c * ball.curvature_factor()) };
    let mut r = VerificationReport::new(Target::CurvatureAsymptotics, predicted, series)?;
    let last = r.last_value().unwrap_or(f64::NAN);
    match predicted {
        Predicted::Finite(p) => {
            let ex = richardson_sqrt(&r.measured_series).unwrap_or(last);
            r.extrapolated = ex;
            r.relative_error = (ex - p).abs() / p;
            r.tolerance = opts.tolerance;
            r.passed = r.relative_error <= opts.tolerance;
        }
        Predicted::Infinite => {
            let threshold = opts.divergence_factor * c * ball.shifted_curvature_factor(1.0 / (10.0 * ball.radius));
            let growing = r.measured_series.windows(2).all(|w| w[1].1 > w[0].1);
            r.extrapolated = last;
            // ratio threshold / Q(t_min); divergence needs it below 1
            r.relative_error = threshold / last;
            r.tolerance = 1.0;
            r.passed = growing && last > threshold;
            r.note(format!("divergence threshold {threshold}; Q at smallest t {last}; monotone growth {growing}"));
        }
    }
    Ok(r)
}
