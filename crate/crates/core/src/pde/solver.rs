//! Backward Euler with damped Newton for U − dt·L(φ(U)) = Uⁿ.

use std::sync::Arc;

use rayon::prelude::*;

use super::field::{Field, Problem, RunLog, StepRecord};
use super::grid::{Grid, NodeClass};
use super::linsolve::{pcg, thomas, StencilMatrix};
use crate::error::{Error, Result};
use crate::nonlinearity::Nonlinearity;
use crate::selfsimilar::Profile;

/// Closure applied on one side of the computational window.
#[derive(Debug, Clone, Default)]
pub enum EdgeCondition {
    /// Reflection across the edge: the missing neighbour takes the node's value.
    #[default]
    Neumann,
    /// Edge nodes keep their initial values.
    Dirichlet,
    /// Edge nodes follow the one-dimensional similarity solution f(d/√t),
    /// exact for half-space domains.
    Similarity(Arc<Profile>),
}

#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub dt_ratio: f64,
    /// dt₀ = t_min · dt0_fraction.
    pub dt0_fraction: f64,
    /// Upper bound dt ≤ max(dt₀, dt_max_fraction·t) once growth starts.
    pub dt_max_fraction: f64,
    /// Constant step size, overriding the geometric schedule.
    pub uniform_dt: Option<f64>,
    pub newton_tol: f64,
    pub max_newton: usize,
    pub linear_rtol: f64,
    pub max_linear: usize,
    /// Window edges in the order x−, x+, y−, y+.
    pub edges: [EdgeCondition; 4],
    /// Allowed excursion outside [0, 1] before the step is rejected.
    pub range_slack: f64,
    pub enforce_resolution: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            dt_ratio: 1.2,
            dt0_fraction: 1.0 / 200.0,
            dt_max_fraction: 0.02,
            uniform_dt: None,
            newton_tol: 1e-12,
            max_newton: 40,
            linear_rtol: 1e-10,
            max_linear: 50_000,
            edges: Default::default(),
            range_slack: 1e-9,
            enforce_resolution: true,
        }
    }
}

impl SolverOptions {
    pub fn with_edges(mut self, edges: [EdgeCondition; 4]) -> Self {
        self.edges = edges;
        self
    }
}

/// Solution state at a single time level.
#[derive(Debug, Clone)]
pub struct State {
    pub t: f64,
    pub u: Vec<f64>,
}

/// Reusable stepping machinery for one grid and problem.
pub struct Stepper<'a> {
    nl: &'a Nonlinearity,
    grid: &'a Grid,
    problem: Problem,
    opts: &'a SolverOptions,
    free: Vec<bool>,
    /// Similarity-driven edge nodes with their signed distances.
    driven: Vec<(usize, f64)>,
    profile: Option<Arc<Profile>>,
    w: [f64; 2],
}

impl<'a> Stepper<'a> {
    pub fn new(nl: &'a Nonlinearity, grid: &'a Grid, problem: Problem, opts: &'a SolverOptions) -> Result<Self> {
        let n = grid.len();
        let mut free: Vec<bool> = match problem {
            Problem::Ibvp => grid.class.iter().map(|c| *c == NodeClass::Interior).collect(),
            Problem::Cauchy => vec![true; n],
        };
        let mut driven = Vec::new();
        let mut profile = None;
        let sides = if grid.dimension == 1 { 2 } else { 4 };
        for side in 0..sides {
            let cond = &opts.edges[side];
            if matches!(cond, EdgeCondition::Neumann) {
                continue;
            }
            if let EdgeCondition::Similarity(p) = cond {
                if !Self::profile_matches(p, problem) {
                    return Err(Error::Config("similarity edge data needs a half-line profile for the IBVP and a whole-line profile for the Cauchy problem".into()));
                }
                profile = Some(p.clone());
            }
            for k in edge_nodes(grid, side) {
                let drive = matches!(cond, EdgeCondition::Similarity(_)) && (problem == Problem::Cauchy || grid.class[k] == NodeClass::Interior);
                if free[k] || drive {
                    free[k] = false;
                    if drive && !driven.iter().any(|(m, _)| *m == k) {
                        driven.push((k, grid.distance[k]));
                    }
                }
            }
        }
        let w = [1.0 / (grid.h[0] * grid.h[0]), if grid.dimension == 2 { 1.0 / (grid.h[1] * grid.h[1]) } else { 0.0 }];
        Ok(Self { nl, grid, problem, opts, free, driven, profile, w })
    }

    fn profile_matches(p: &Profile, problem: Problem) -> bool {
        use crate::selfsimilar::ProfileKind;
        matches!((problem, p.kind), (Problem::Ibvp, ProfileKind::HalfLine) | (Problem::Cauchy, ProfileKind::WholeLine))
    }

    /// Initial data: 0 in Ω and 1 on the pinned layer (IBVP), or the
    /// indicator of the closed complement of Ω (Cauchy).
    pub fn initial_state(&self) -> State {
        let u = match self.problem {
            Problem::Ibvp => self.grid.class.iter().map(|c| if *c == NodeClass::Interior { 0.0 } else { 1.0 }).collect(),
            Problem::Cauchy => self.grid.distance.iter().map(|d| if *d <= 0.0 { 1.0 } else { 0.0 }).collect(),
        };
        State { t: 0.0, u }
    }

    pub fn free_mask(&self) -> &[bool] {
        &self.free
    }

    fn residual(&self, u: &[f64], un: &[f64], phi_u: &[f64], dt: f64, out: &mut [f64]) {
        let g = self.grid;
        out.par_iter_mut().enumerate().with_min_len(2048).for_each(|(k, r)| {
            if !self.free[k] {
                *r = 0.0;
                return;
            }
            let nb = g.neighbours(k);
            let mut lap = 0.0;
            for (s, m) in nb.iter().enumerate() {
                if let Some(m) = m {
                    lap += self.w[s / 2] * (phi_u[*m] - phi_u[k]);
                }
            }
            *r = u[k] - un[k] - dt * lap;
        });
    }

    /// One backward-Euler step of size dt.
    pub fn step(&self, state: &State, dt: f64) -> Result<(State, StepRecord)> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("time step must be positive, got {dt}")));
        }
        let t = state.t + dt;
        let n = self.grid.len();
        let mut u = state.u.clone();
        if let Some(p) = &self.profile {
            let st = t.sqrt();
            for &(k, d) in &self.driven {
                u[k] = p.eval(d / st);
            }
        }
        let un = &state.u;
        let phi = |s: f64| self.nl.phi(s);
        let dphi = |s: f64| self.nl.dphi(s);
        let mut phi_u: Vec<f64> = u.par_iter().with_min_len(2048).map(|v| phi(*v)).collect();
        let mut f = vec![0.0; n];
        self.residual(&u, un, &phi_u, dt, &mut f);
        let mut fnorm = inf_norm(&f);
        let mut record = StepRecord { t, dt, newton_iterations: 0, linear_iterations: 0, linear_residual: 0.0, final_update: 0.0, final_residual: fnorm };
        if fnorm == 0.0 {
            return Ok((State { t, u }, record));
        }
        let (cx, cy) = (dt * self.w[0], dt * self.w[1]);
        let mut diag = vec![1.0; n];
        let mut dinv = vec![1.0; n];
        let mut trial = vec![0.0; n];
        let mut ftrial = vec![0.0; n];
        loop {
            if record.newton_iterations >= self.opts.max_newton {
                return Err(Error::NoConvergence { what: "Newton iteration", iterations: record.newton_iterations, residual: fnorm });
            }
            record.newton_iterations += 1;
            let g = self.grid;
            diag.par_iter_mut().zip(dinv.par_iter_mut()).enumerate().with_min_len(2048).for_each(|(k, (dg, di))| {
                if self.free[k] {
                    let d = dphi(u[k]);
                    let mut s = 0.0;
                    for (side, m) in g.neighbours(k).iter().enumerate() {
                        if m.is_some() {
                            s += self.w[side / 2];
                        }
                    }
                    *dg = 1.0 / d + dt * s;
                    *di = 1.0 / d;
                } else {
                    *dg = 1.0;
                    *di = 1.0;
                }
            });
            let a = StencilMatrix { nx: g.n[0], ny: g.n[1], diag: &diag, free: &self.free, cx, cy };
            let rhs: Vec<f64> = f.par_iter().map(|v| -v).collect();
            let (y, stats) = if g.dimension == 1 { thomas(&a, &rhs) } else { pcg(&a, &rhs, self.opts.linear_rtol, self.opts.max_linear)? };
            record.linear_iterations += stats.iterations;
            record.linear_residual = record.linear_residual.max(stats.relative_residual);
            // δ = D⁻¹y
            let delta: Vec<f64> = y.par_iter().zip(dinv.par_iter()).map(|(y, di)| y * di).collect();
            let dnorm = inf_norm(&delta);
            let mut lambda = 1.0;
            loop {
                trial.par_iter_mut().enumerate().for_each(|(k, v)| *v = u[k] + lambda * delta[k]);
                phi_u.par_iter_mut().zip(trial.par_iter()).for_each(|(p, v)| *p = phi(*v));
                self.residual(&trial, un, &phi_u, dt, &mut ftrial);
                let fnew = inf_norm(&ftrial);
                if fnew <= fnorm || lambda < 1e-3 || lambda * dnorm <= self.opts.newton_tol {
                    std::mem::swap(&mut u, &mut trial);
                    std::mem::swap(&mut f, &mut ftrial);
                    fnorm = fnew;
                    break;
                }
                lambda *= 0.5;
            }
            record.final_update = lambda * dnorm;
            record.final_residual = fnorm;
            if record.final_update <= self.opts.newton_tol || fnorm == 0.0 {
                break;
            }
        }
        let slack = self.opts.range_slack;
        for (k, v) in u.iter_mut().enumerate() {
            if !(*v >= -slack && *v <= 1.0 + slack) {
                return Err(Error::Invariant(format!("discrete maximum principle violated: u = {v} at node {k}, t = {t}")));
            }
            *v = v.clamp(0.0, 1.0);
        }
        Ok((State { t, u }, record))
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.par_iter().map(|x| x.abs()).reduce(|| 0.0, f64::max)
}

fn edge_nodes(g: &Grid, side: usize) -> Vec<usize> {
    let (nx, ny) = (g.n[0], g.n[1]);
    match side {
        0 => (0..ny).map(|j| g.index(0, j)).collect(),
        1 => (0..ny).map(|j| g.index(nx - 1, j)).collect(),
        2 => (0..nx).map(|i| g.index(i, 0)).collect(),
        _ => (0..nx).map(|i| g.index(i, ny - 1)).collect(),
    }
}

/// Step sizes from t = 0 through every output time.
pub fn time_schedule(output_times: &[f64], opts: &SolverOptions) -> Result<Vec<f64>> {
    if output_times.is_empty() {
        return Err(Error::Config("no output times given".into()));
    }
    if output_times.iter().any(|t| !(*t > 0.0)) || output_times.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Config(format!("output times must be positive and increasing, got {output_times:?}")));
    }
    let dt0 = output_times[0] * opts.dt0_fraction;
    let mut steps = Vec::new();
    let mut t = 0.0;
    let mut dt = opts.uniform_dt.unwrap_or(dt0);
    if !(dt > 0.0) {
        return Err(Error::Config(format!("time step must be positive, got {dt}")));
    }
    for &target in output_times {
        while target - t > 1e-12 * target {
            let mut next = match opts.uniform_dt {
                Some(h) => h,
                None => dt,
            };
            let remaining = target - t;
            // Avoid a sliver step just before an output time.
            if next >= remaining || remaining - next < 0.25 * next {
                next = remaining;
            }
            steps.push(next);
            t += next;
            if opts.uniform_dt.is_none() {
                dt = (dt * opts.dt_ratio).min(dt0.max(opts.dt_max_fraction * t));
            }
        }
        t = target;
    }
    Ok(steps)
}

/// Runs the time stepper from t = 0 and records snapshots at `output_times`.
pub fn solve(nl: &Nonlinearity, grid: Arc<Grid>, problem: Problem, output_times: &[f64], opts: &SolverOptions) -> Result<Field> {
    if opts.enforce_resolution {
        let t_min = output_times.iter().cloned().fold(f64::INFINITY, f64::min);
        grid.check_resolution(nl.delta1(), t_min)?;
    }
    let schedule = time_schedule(output_times, opts)?;
    let stepper = Stepper::new(nl, &grid, problem, opts)?;
    let mut state = stepper.initial_state();
    let mut log = RunLog::default();
    let mut values = Vec::with_capacity(output_times.len());
    let mut next = 0;
    for dt in schedule {
        let (s, rec) = stepper.step(&state, dt)?;
        log.steps.push(rec);
        state = s;
        if next < output_times.len() && (state.t - output_times[next]).abs() <= 1e-9 * output_times[next] {
            state.t = output_times[next];
            values.push(state.u.clone());
            next += 1;
        }
    }
    if values.len() != output_times.len() {
        return Err(Error::Invariant("time schedule missed an output time".into()));
    }
    drop(stepper);
    Ok(Field { grid, problem, times: output_times.to_vec(), values, log })
}
