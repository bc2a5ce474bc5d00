use std::sync::Arc;

use nldiff::geometry::{Domain, GraphFunction};
use nldiff::nonlinearity::Nonlinearity;
use nldiff::numerics::special::erfc;
use nldiff::pde::*;

fn line_field(problem: Problem, h: f64, opts: &SolverOptions, t: &[f64]) -> Field {
    let dom = Domain::upper_half_space(2);
    // Cauchy: the interface sits midway between nodes.
    let (a, n) = match problem {
        Problem::Ibvp => (0.0, (1.0 / h).round() as usize + 1),
        Problem::Cauchy => (-1.0 + 0.5 * h, (2.0 / h).round() as usize),
    };
    let grid = Grid::new(&dom, [a, 0.0], [n, 1], [h, 0.0]).unwrap();
    let opts = opts.clone().with_edges([EdgeCondition::Dirichlet, EdgeCondition::Dirichlet, EdgeCondition::Neumann, EdgeCondition::Neumann]);
    solve(&Nonlinearity::heat(), Arc::new(grid), problem, t, &opts).unwrap()
}

fn line_error(f: &Field, ti: usize) -> f64 {
    let t = f.times[ti];
    let scale = if f.problem == Problem::Cauchy { 0.5 } else { 1.0 };
    f.values[ti]
        .iter()
        .enumerate()
        .map(|(k, u)| {
            let x = f.grid.coords(k)[0];
            let exact = if f.problem == Problem::Ibvp && x < 0.0 { 1.0 } else { scale * erfc(x / (2.0 * t.sqrt())) };
            (u - exact).abs()
        })
        .fold(0.0, f64::max)
}

fn fine_schedule() -> SolverOptions {
    SolverOptions { dt0_fraction: 1e-4, dt_max_fraction: 1e-3, ..Default::default() }
}

#[test]
fn half_line_ibvp_matches_erfc() {
    let f = line_field(Problem::Ibvp, 1e-3, &fine_schedule(), &[0.01]);
    let err = line_error(&f, 0);
    assert!(err <= 1e-4, "{err:e}");
    f.check_invariants().unwrap();
}

#[test]
fn line_cauchy_matches_half_erfc() {
    let f = line_field(Problem::Cauchy, 1e-3, &fine_schedule(), &[0.01]);
    let err = line_error(&f, 0);
    assert!(err <= 1e-4, "{err:e}");
}

#[test]
fn three_grid_study_is_second_order() {
    for p in [Problem::Ibvp, Problem::Cauchy] {
        let errs: Vec<f64> = [4e-3, 2e-3, 1e-3]
            .iter()
            .map(|&h| {
                let opts = SolverOptions { uniform_dt: Some(0.25 * h * h), ..Default::default() };
                line_error(&line_field(p, h, &opts, &[0.01]), 0)
            })
            .collect();
        for w in errs.windows(2) {
            assert!(w[0] / w[1] >= 3.5, "{p:?}: {errs:?}");
        }
    }
}

#[test]
fn unit_state_is_a_fixed_point() {
    let nl = Nonlinearity::default_ramp();
    let dom = Domain::graph(2, GraphFunction::Sinusoid { amplitude: 0.3, frequency: 1.0 }).unwrap();
    let grid = Grid::new(&dom, [-0.5, -0.4], [41, 41], [0.025, 0.025]).unwrap();
    let opts = SolverOptions::default();
    for problem in [Problem::Ibvp, Problem::Cauchy] {
        let st = Stepper::new(&nl, &grid, problem, &opts).unwrap();
        let s0 = State { t: 0.1, u: vec![1.0; grid.len()] };
        let (s1, _) = st.step(&s0, 0.01).unwrap();
        let dev = s1.u.iter().map(|v| (v - 1.0).abs()).fold(0.0, f64::max);
        assert!(dev <= 1e-14, "{dev:e}");
    }
}

fn half_plane_grid(h: f64, width: f64, height: f64) -> Grid {
    let dom = Domain::upper_half_space(2);
    let nx = (width / h).round() as usize + 1;
    let ny = (height / h).round() as usize + 1;
    Grid::new(&dom, [-0.5 * width, 0.0], [nx, ny], [h, h]).unwrap()
}

fn lateral_neumann() -> [EdgeCondition; 4] {
    [EdgeCondition::Neumann, EdgeCondition::Neumann, EdgeCondition::Dirichlet, EdgeCondition::Dirichlet]
}

#[test]
fn half_plane_ibvp_is_one_dimensional_erfc() {
    let grid = Arc::new(half_plane_grid(2.5e-3, 0.1, 0.3));
    let opts = SolverOptions { dt0_fraction: 1e-3, dt_max_fraction: 5e-3, ..Default::default() }.with_edges(lateral_neumann());
    let t = 1e-3;
    let f = solve(&Nonlinearity::heat(), grid.clone(), Problem::Ibvp, &[t], &opts).unwrap();
    let err = f.values[0]
        .iter()
        .enumerate()
        .map(|(k, u)| (u - erfc(grid.distance[k].max(0.0) / (2.0 * t.sqrt()))).abs())
        .fold(0.0, f64::max);
    assert!(err <= 5e-4, "{err:e}");
    f.check_invariants().unwrap();
}

fn sinusoid_run(problem: Problem, nl: &Nonlinearity) -> Field {
    let dom = Domain::graph(2, GraphFunction::Sinusoid { amplitude: 0.3, frequency: 1.0 }).unwrap();
    let h = std::f64::consts::PI / 100.0;
    // symmetry lines x = ±π/2 fall on cell faces
    let grid = Grid::new(&dom, [-std::f64::consts::FRAC_PI_2 + 0.5 * h, -0.6], [100, 90], [h, h]).unwrap();
    let opts = SolverOptions::default().with_edges(lateral_neumann());
    solve(nl, Arc::new(grid), problem, &[0.02, 0.04, 0.08], &opts).unwrap()
}

#[test]
fn ibvp_is_nondecreasing_in_time() {
    let f = sinusoid_run(Problem::Ibvp, &Nonlinearity::default_ramp());
    f.check_invariants().unwrap();
    for w in f.values.windows(2) {
        let worst = w[0].iter().zip(&w[1]).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
        assert!(worst <= 1e-12, "{worst:e}");
    }
}

#[test]
fn graph_domain_solution_decreases_in_vertical_direction() {
    for nl in [Nonlinearity::heat(), Nonlinearity::sine(0.1).unwrap()] {
        let f = sinusoid_run(Problem::Ibvp, &nl);
        let g = &f.grid;
        let (nx, ny) = (g.n[0], g.n[1]);
        let mut strict = 0;
        for u in &f.values {
            for i in 0..nx {
                for j in 0..ny - 1 {
                    let (k, up) = (g.index(i, j), g.index(i, j + 1));
                    if g.class[k] != NodeClass::Interior {
                        continue;
                    }
                    let diff = u[up] - u[k];
                    assert!(diff <= 1e-14, "column {i}, row {j}: {diff:e}");
                    if u[k] > 1e-6 {
                        assert!(diff < -1e-14, "column {i}, row {j}: {diff:e}");
                        strict += 1;
                    }
                }
            }
        }
        assert!(strict > 1000);
    }
}

#[test]
fn nested_half_planes_are_ordered() {
    let nl = Nonlinearity::default_ramp();
    let h = 5e-3;
    let make = |shift: f64| Domain::half_space(vec![0.0, 1.0], shift).unwrap();
    let grid = |dom: &Domain| Arc::new(Grid::new(dom, [-0.1, -0.2], [41, 101], [h, h]).unwrap());
    let opts = SolverOptions::default().with_edges(lateral_neumann());
    let times = [2e-3, 5e-3, 1e-2];
    for problem in [Problem::Ibvp, Problem::Cauchy] {
        // Ω₁ ⊂ Ω ⊂ Ω₂
        let u1 = solve(&nl, grid(&make(0.05)), problem, &times, &opts).unwrap();
        let u = solve(&nl, grid(&make(0.0)), problem, &times, &opts).unwrap();
        let u2 = solve(&nl, grid(&make(-0.05)), problem, &times, &opts).unwrap();
        let lo = ordering_check(&u2, &u, ORDERING_SLACK).unwrap();
        let hi = ordering_check(&u, &u1, ORDERING_SLACK).unwrap();
        assert!(lo.passed && hi.passed, "{problem:?}: {lo:?} {hi:?}");
        let same = ordering_check(&u, &u, ORDERING_SLACK).unwrap();
        assert_eq!(same.max_violation, 0.0);
    }
}

#[test]
fn ball_data_is_below_complement_data() {
    let nl = Nonlinearity::heat();
    let h = 5e-3;
    let omega = Domain::upper_half_space(2);
    // complement of a small ball below the boundary plays the role of Ω
    let ball = Domain::ball_exterior(vec![0.0, -0.1], 0.05).unwrap();
    let opts = SolverOptions::default().with_edges([EdgeCondition::Dirichlet, EdgeCondition::Dirichlet, EdgeCondition::Dirichlet, EdgeCondition::Dirichlet]);
    let g = |dom: &Domain| Arc::new(Grid::new(dom, [-0.4, -0.5], [161, 201], [h, h]).unwrap());
    let times = [1e-3, 4e-3];
    let small = solve(&nl, g(&ball), Problem::Cauchy, &times, &opts).unwrap();
    let big = solve(&nl, g(&omega), Problem::Cauchy, &times, &opts).unwrap();
    let r = ordering_check(&small, &big, ORDERING_SLACK).unwrap();
    assert!(r.passed, "{r:?}");
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let grid = Arc::new(half_plane_grid(5e-3, 0.4, 0.3));
            let opts = SolverOptions::default().with_edges(lateral_neumann());
            solve(&Nonlinearity::sine(0.1).unwrap(), grid, Problem::Cauchy, &[2e-3], &opts).unwrap()
        })
    };
    let (a, b) = (run(1), run(3));
    assert_eq!(a.values, b.values);
}

#[test]
fn resolution_rule_is_enforced() {
    let grid = Arc::new(half_plane_grid(0.02, 0.2, 0.2));
    let err = solve(&Nonlinearity::heat(), grid, Problem::Ibvp, &[1e-3], &SolverOptions::default()).unwrap_err();
    assert!(err.to_string().contains("resolution"), "{err}");
}

#[test]
fn schedule_hits_outputs_and_grows_geometrically() {
    let opts = SolverOptions::default();
    let times = [1e-3, 2e-3, 4e-3];
    let steps = time_schedule(&times, &opts).unwrap();
    assert_eq!(steps[0], 1e-3 / 200.0);
    let mut t = 0.0;
    let mut hit = 0;
    for (k, dt) in steps.iter().enumerate() {
        t += dt;
        if hit < 3 && (t - times[hit]).abs() < 1e-15 {
            hit += 1;
        } else if k > 0 {
            assert!(*dt <= 1.2 * steps[k - 1] * (1.0 + 1e-12));
        }
    }
    assert_eq!(hit, 3);
    assert!(time_schedule(&[2e-3, 1e-3], &opts).is_err());
}

#[test]
fn field_interpolation_and_export() {
    let grid = Arc::new(half_plane_grid(0.01, 0.2, 0.2));
    let f = solve(&Nonlinearity::heat(), grid, Problem::Ibvp, &[0.01], &SolverOptions::default().with_edges(lateral_neumann())).unwrap();
    let v = f.interpolate(0, [0.013, 0.055]).unwrap();
    let exact = erfc(0.055 / 0.2);
    assert!((v - exact).abs() < 2e-2, "{v} {exact}");
    assert!(f.interpolate(0, [5.0, 0.1]).is_err());
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("field.csv");
    f.write_csv(0, &path).unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("x,y,u"));
    assert_eq!(text.lines().count(), f.grid.len() + 1);
}
