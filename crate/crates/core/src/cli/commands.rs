//! One function per subcommand; each returns the reports and data it produced.

use std::sync::Arc;

use serde_json::{json, Value};

use super::config::{Command, RunConfig};
use super::io::{to_json_value, write_csv};
use crate::asymptotics::{
    barrier_sandwich_check, boundary_top, graph_window, ordering_report, profile_sandwich, scan_tau, stationarity_score, verify_asympvol,
    verify_curvature_asymptotics, verify_varadhan, CurvatureOptions, VerificationReport,
};
use crate::error::{Error, Result};
use crate::geometry::{Domain, DomainKind, GraphFunction, MeasureOptions, TouchingBall};
use crate::nonlinearity::Nonlinearity;
use crate::pde::{solve, EdgeCondition, Field, Grid, Problem, SolverOptions};
use crate::selfsimilar::{asymptotic_constant, barrier_profiles, default_eta, mass_identity_residual, solve_profile, AsymptoticConstant, ProfileKind};

/// Mass-identity residual accepted by the `profile` command.
pub const PROFILE_MASS_TOLERANCE: f64 = 1e-6;

pub struct Outcome {
    pub reports: Vec<(String, VerificationReport)>,
    pub results: Value,
    pub passed: bool,
}

impl Outcome {
    fn from_reports(reports: Vec<(String, VerificationReport)>, results: Value) -> Self {
        let passed = reports.iter().all(|(_, r)| r.passed);
        Self { reports, results, passed }
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let nl = cfg.nonlinearity.build()?;
    match cfg.command {
        Command::Profile => profile(cfg, &nl),
        Command::Constant => constant(cfg, &nl),
        Command::Pde => pde(cfg, &nl),
        Command::VerifyVaradhan => varadhan(cfg, &nl),
        Command::VerifyCurvature => curvature(cfg, &nl),
        Command::VerifyAsympvol => asympvol(cfg),
        Command::VerifyBarriers => barriers(cfg, &nl),
        Command::VerifyStationarity => stationarity(cfg, &nl),
        Command::VerifyOrdering => ordering(cfg, &nl),
    }
}

fn profile(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let p = solve_profile(nl, cfg.c, cfg.kind)?;
    let residual = mass_identity_residual(&p);
    let rows: Vec<Vec<f64>> = p.xi().iter().zip(p.f_values()).zip(p.df_values()).map(|((x, f), d)| vec![*x, *f, *d]).collect();
    write_csv(&cfg.output_dir.join("profile.csv"), &["xi", "f", "df"], rows)?;
    let passed = residual <= PROFILE_MASS_TOLERANCE;
    let results = json!({
        "summary": to_json_value(&p.summary())?,
        "mass_residual": residual,
        "mass_tolerance": PROFILE_MASS_TOLERANCE,
    });
    Ok(Outcome { reports: Vec::new(), results, passed })
}

fn constant(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let k: AsymptoticConstant = asymptotic_constant(nl, cfg.n as u32, cfg.kind)?;
    let results = json!({
        "c_phi_N": k.value,
        "N": cfg.n,
        "kind": to_json_value(&k.kind)?,
        "moment": k.moment,
        "omega": k.omega,
        "half_range_moment": k.half_range_moment,
    });
    Ok(Outcome { reports: Vec::new(), results, passed: k.value.is_finite() && k.value > 0.0 })
}

fn planar(cfg: &RunConfig) -> Result<Domain> {
    if cfg.n != 2 {
        return Err(Error::Config("PDE runs are two-dimensional; use N = 2".into()));
    }
    cfg.domain.build()
}

fn default_pad(cfg: &RunConfig, nl: &Nonlinearity) -> f64 {
    let t_max = cfg.times.last().copied().unwrap_or(0.0);
    cfg.pad.unwrap_or(6.0 * (nl.delta2() * t_max).sqrt())
}

/// Window over `x_range` from below the boundary to `pad` above its top,
/// Neumann at the sides and Dirichlet data at top and bottom.
fn run_window(cfg: &RunConfig, nl: &Nonlinearity, dom: &Domain, extra_top: f64) -> Result<Field> {
    let pad = default_pad(cfg, nl);
    let top = boundary_top(dom, cfg.x_range)? + extra_top + pad;
    let below = match cfg.problem {
        Problem::Ibvp => 2.0 * cfg.h,
        Problem::Cauchy => pad,
    };
    let grid = Arc::new(graph_window(dom, cfg.x_range, top, below, cfg.h)?);
    let opts = SolverOptions::default().with_edges([EdgeCondition::Neumann, EdgeCondition::Neumann, EdgeCondition::Dirichlet, EdgeCondition::Dirichlet]);
    solve(nl, grid, cfg.problem, &cfg.times, &opts)
}

fn field_metadata(f: &Field) -> Result<Value> {
    Ok(json!({
        "grid": to_json_value(&f.grid.info())?,
        "problem": to_json_value(&f.problem)?,
        "times": f.times,
        "steps": f.log.steps.len(),
        "newton_iterations": f.log.total_newton_iterations(),
        "max_newton_iterations": f.log.max_newton_iterations(),
        "linear_iterations": f.log.total_linear_iterations(),
        "dt_schedule": to_json_value(&f.log.steps)?,
    }))
}

fn pde(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let dom = planar(cfg)?;
    let f = run_window(cfg, nl, &dom, 0.0)?;
    f.check_invariants()?;
    for ti in 0..f.times.len() {
        f.write_csv(ti, &cfg.output_dir.join(format!("field_t{ti}.csv")))?;
    }
    Ok(Outcome { reports: Vec::new(), results: json!({ "run": field_metadata(&f)? }), passed: true })
}

fn varadhan(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let dom = planar(cfg)?;
    let f = run_window(cfg, nl, &dom, cfg.band.1)?;
    let r = verify_varadhan(&f, &nl.transform(), cfg.band, cfg.tolerance.unwrap_or(0.1))?;
    Ok(Outcome::from_reports(vec![("varadhan".into(), r)], json!({ "run": field_metadata(&f)? })))
}

fn touching_ball(cfg: &RunConfig, dom: &Domain) -> Result<TouchingBall> {
    TouchingBall::new(dom, &cfg.contact, cfg.radius)
}

fn curvature(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let dom = planar(cfg)?;
    let ball = touching_ball(cfg, &dom)?;
    let opts = CurvatureOptions { h: cfg.h, pad: cfg.pad, tolerance: cfg.tolerance.unwrap_or(0.1), ..Default::default() };
    let (r, f) = verify_curvature_asymptotics(nl, &dom, &ball, cfg.problem, &cfg.times, &opts)?;
    let results = json!({ "ball": { "center": ball.center, "radius": ball.radius, "curvatures": ball.curvatures }, "run": field_metadata(&f)? });
    Ok(Outcome::from_reports(vec![("curvature_asymptotics".into(), r)], results))
}

fn asympvol(cfg: &RunConfig) -> Result<Outcome> {
    let dom = cfg.domain.build()?;
    let ball = touching_ball(cfg, &dom)?;
    let opts = MeasureOptions { seed: cfg.seed, ..Default::default() };
    let r = verify_asympvol(&dom, &ball, &cfg.levels, &opts, cfg.tolerance.unwrap_or(0.01))?;
    Ok(Outcome::from_reports(vec![("asympvol".into(), r)], json!({ "curvatures": ball.curvatures })))
}

fn barriers(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let dom = planar(cfg)?;
    let kind = match cfg.problem {
        Problem::Ibvp => ProfileKind::HalfLine,
        Problem::Cauchy => ProfileKind::WholeLine,
    };
    let pair = barrier_profiles(nl, cfg.epsilon, default_eta(cfg.epsilon), kind)?;
    let f = run_window(cfg, nl, &dom, cfg.region.1)?;
    let t_range = (cfg.times[0], *cfg.times.last().expect("nonempty"));
    let field_report = barrier_sandwich_check(&f, &pair, cfg.region, t_range)?;
    let tau = scan_tau(&f, &pair, cfg.region)?;
    let f1 = solve_profile(nl, 1.0, kind)?;
    let xi_end = cfg.region.1 / t_range.0.sqrt();
    let self_report = profile_sandwich(&pair, &f1, xi_end, 4001)?;
    let results = json!({ "pair": to_json_value(&pair.summary())?, "tau": tau, "run": field_metadata(&f)? });
    Ok(Outcome::from_reports(vec![("sandwich".into(), field_report), ("self_consistency".into(), self_report)], results))
}

fn stationarity(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let dom = planar(cfg)?;
    let affine = matches!(dom.kind, DomainKind::Graph(GraphFunction::Affine { .. }));
    if dom.graph_function().is_none() {
        return Err(Error::Config("verify-stationarity needs a graph domain".into()));
    }
    let pad = default_pad(cfg, nl);
    let xr = (cfg.x_range.0 - pad, cfg.x_range.1 + pad);
    let top = boundary_top(&dom, xr)? + cfg.radius + pad;
    let below = if cfg.problem == Problem::Ibvp { 2.0 * cfg.h } else { pad };
    let grid = Arc::new(graph_window(&dom, xr, top, below, cfg.h)?);
    let edges = if affine {
        // flat boundaries: the similarity solution is exact data on every edge
        let kind = if cfg.problem == Problem::Ibvp { ProfileKind::HalfLine } else { ProfileKind::WholeLine };
        let p = Arc::new(solve_profile(nl, 1.0, kind)?);
        std::array::from_fn(|_| EdgeCondition::Similarity(p.clone()))
    } else {
        [EdgeCondition::Neumann, EdgeCondition::Neumann, EdgeCondition::Dirichlet, EdgeCondition::Dirichlet]
    };
    let f = solve(nl, grid, cfg.problem, &cfg.times, &SolverOptions::default().with_edges(edges))?;
    let r = stationarity_score(&f, &dom, cfg.radius, cfg.x_range, cfg.samples, cfg.tolerance.unwrap_or(1e-3))?;
    Ok(Outcome::from_reports(vec![("stationarity".into(), r)], json!({ "run": field_metadata(&f)? })))
}

fn ordering(cfg: &RunConfig, nl: &Nonlinearity) -> Result<Outcome> {
    let dom = planar(cfg)?;
    let (normal, offset) = match &dom.kind {
        DomainKind::HalfSpace { normal, offset } => (normal.clone(), *offset),
        _ => return Err(Error::Config("verify-ordering uses nested half-spaces; pass a half-space domain".into())),
    };
    let shifted = |s: f64| Domain::half_space(normal.clone(), offset + s);
    // Ω₁ ⊂ Ω ⊂ Ω₂, all sampled on the window of the largest domain
    let (inner, outer) = (shifted(cfg.shift)?, shifted(-cfg.shift)?);
    let pad = default_pad(cfg, nl);
    let top = boundary_top(&inner, cfg.x_range)? + pad;
    let below = if cfg.problem == Problem::Ibvp { 2.0 * cfg.h } else { pad };
    let base = graph_window(&outer, cfg.x_range, top, below, cfg.h)?;
    let opts = SolverOptions::default().with_edges([EdgeCondition::Neumann, EdgeCondition::Neumann, EdgeCondition::Dirichlet, EdgeCondition::Dirichlet]);
    let run = |d: &Domain| -> Result<Field> {
        let g = Grid::new(d, base.origin, base.n, base.h)?;
        solve(nl, Arc::new(g), cfg.problem, &cfg.times, &opts)
    };
    let (u1, u, u2) = (run(&inner)?, run(&dom)?, run(&outer)?);
    let lo = ordering_report(&u2, &u, crate::pde::ORDERING_SLACK)?;
    let hi = ordering_report(&u, &u1, crate::pde::ORDERING_SLACK)?;
    Ok(Outcome::from_reports(vec![("outer_below".into(), lo), ("inner_above".into(), hi)], json!({ "run": field_metadata(&u)? })))
}
