use std::f64::consts::PI;
use std::sync::Arc;

use nldiff::asymptotics::*;
use nldiff::geometry::*;
use nldiff::nonlinearity::Nonlinearity;
use nldiff::numerics::special::{erfc, ln_erfc};
use nldiff::pde::*;
use nldiff::selfsimilar::*;

/// Field filled with a closed-form solution instead of a solver run.
fn synthetic(grid: Grid, problem: Problem, times: &[f64], u: impl Fn(f64, f64) -> f64) -> Field {
    let values = times.iter().map(|&t| grid.distance.iter().map(|&d| u(d, t)).collect()).collect();
    Field { grid: Arc::new(grid), problem, times: times.to_vec(), values, log: RunLog::default() }
}

fn half_plane_grid(h: f64) -> Grid {
    let dom = Domain::upper_half_space(2);
    Grid::new(&dom, [-0.4, -2.0 * h], [(0.8 / h) as usize + 1, (0.9 / h) as usize + 3], [h, h]).unwrap()
}

fn erfc_field(kappa: f64, times: &[f64]) -> Field {
    synthetic(half_plane_grid(5e-3), Problem::Ibvp, times, move |d, t| if d <= 0.0 { 1.0 } else { erfc(d / (2.0 * (kappa * t).sqrt())) })
}

#[test]
fn richardson_removes_sqrt_term() {
    let q = |t: f64| 1.5 - 3.0 * t.sqrt();
    let s: Vec<(f64, f64)> = [4e-3, 2e-3, 1e-3].iter().map(|&t| (t, q(t))).collect();
    assert!((richardson_sqrt(&s).unwrap() - 1.5).abs() < 1e-13);
    assert!(richardson_sqrt(&s[..1]).is_none());
}

#[test]
fn varadhan_closed_form_values() {
    // −4t·ln erfc(1/(2√t)) at d = 1
    let v = |t: f64| -4.0 * t * ln_erfc(1.0 / (2.0 * t.sqrt()));
    assert!((v(0.01) - 1.0883).abs() < 1e-3, "{}", v(0.01));
    assert!((v(0.0025) - 1.0288).abs() < 1e-3, "{}", v(0.0025));
    assert!(v(0.0025) < v(0.01));
}

#[test]
fn varadhan_report_on_exact_field() {
    let heat = Nonlinearity::heat();
    let times = [2e-3, 4e-3, 8e-3];
    let f = erfc_field(1.0, &times);
    let rep = verify_varadhan(&f, &heat.transform(), (0.1, 0.3), 0.8).unwrap();
    assert_eq!(rep.target, Target::Varadhan);
    // series runs from the largest t down
    assert_eq!(rep.measured_series.iter().map(|p| p.0).collect::<Vec<_>>(), vec![8e-3, 4e-3, 2e-3]);
    for &(t, e) in &rep.measured_series {
        // the sup sits at the inner edge of the band; nodes lie on d = 0.1 exactly
        let expected = (-4.0 * t * erfc(0.1 / (2.0 * t.sqrt())).ln() - 0.01).abs() / 0.01;
        assert!((e - expected).abs() < 1e-9 * expected, "{t}: {e} vs {expected}");
    }
    assert!(rep.passed, "{:?}", rep.measured_series);
    assert!(!verify_varadhan(&f, &heat.transform(), (0.1, 0.3), 0.5).unwrap().passed);
    assert!(verify_varadhan(&f, &heat.transform(), (0.01, 0.3), 0.5).is_err());
}

#[test]
fn scaled_phi_reproduces_heat_with_rescaled_time() {
    let kappa = 2.0;
    let scaled = Nonlinearity::scaled(kappa).unwrap();
    let heat = Nonlinearity::heat();
    let a = verify_varadhan(&erfc_field(kappa, &[1e-3, 2e-3, 4e-3]), &scaled.transform(), (0.1, 0.3), 1.0).unwrap();
    let b = verify_varadhan(&erfc_field(1.0, &[2e-3, 4e-3, 8e-3]), &heat.transform(), (0.1, 0.3), 1.0).unwrap();
    for (x, y) in a.measured_series.iter().zip(&b.measured_series) {
        assert!((x.1 - y.1).abs() < 1e-12 * y.1.max(1.0), "{x:?} {y:?}");
    }
}

#[test]
fn underflowing_probes_are_excluded_and_noted() {
    let heat = Nonlinearity::heat();
    let f = erfc_field(1.0, &[5e-4, 4e-3]);
    let rep = verify_varadhan(&f, &heat.transform(), (0.1, 0.3), 1.0).unwrap();
    assert!(rep.notes.iter().any(|n| n.contains("excluded")));
    let tiny = erfc_field(1.0, &[1e-5]);
    assert!(verify_varadhan(&tiny, &heat.transform(), (0.2, 0.3), 1.0).is_err());
}

#[test]
fn ball_weights_cover_the_disc() {
    let g = half_plane_grid(1e-2);
    let ball = TouchingBall::new(&Domain::upper_half_space(2), &[0.013, 0.0], 0.25).unwrap();
    let area: f64 = ball_weights(&g, &ball).unwrap().iter().map(|w| w.1).sum();
    assert!((area - PI * 0.0625).abs() < 1e-4 * PI * 0.0625, "{area}");
    let big = TouchingBall::new(&Domain::upper_half_space(2), &[0.0, 0.0], 0.6).unwrap();
    assert!(ball_weights(&g, &big).is_err());
}

#[test]
fn heat_content_matches_one_dimensional_quadrature() {
    let r = 0.25;
    let times = [1e-3, 4e-3];
    let f = synthetic(half_plane_grid(2.5e-3), Problem::Ibvp, &times, |d, t| if d <= 0.0 { 1.0 } else { erfc(d / (2.0 * t.sqrt())) });
    let ball = TouchingBall::new(&Domain::upper_half_space(2), &[0.0, 0.0], r).unwrap();
    let q = heat_content_series(&f, &ball).unwrap();
    for (t, qt) in q {
        // ∫₀^{2R} erfc(y/(2√t))·2√(R² − (y − R)²) dy by composite Simpson
        let n = 200_000;
        let hh = 2.0 * r / n as f64;
        let g = |y: f64| erfc(y / (2.0 * t.sqrt())) * 2.0 * (r * r - (y - r) * (y - r)).max(0.0).sqrt();
        let mut s = g(0.0) + g(2.0 * r);
        for i in 1..n {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * g(i as f64 * hh);
        }
        let exact = s * hh / 3.0 * t.powf(-0.75);
        assert!((qt - exact).abs() < 2e-3 * exact, "t = {t}: {qt} vs {exact}");
    }
}

#[test]
fn curvature_report_logic() {
    let dom = Domain::upper_half_space(2);
    let ball = TouchingBall::new(&dom, &[0.0, 0.0], 0.25).unwrap();
    let opts = CurvatureOptions::default();
    let c = 2.7273751255;
    let series = vec![(4e-3, 1.3), (2e-3, 1.32), (1e-3, 1.335)];
    let rep = curvature_report(series, c, &ball, &opts).unwrap();
    assert_eq!(rep.predicted, Predicted::Finite(c * 0.5));
    assert!(rep.passed);
    let deg_dom = Domain::graph(2, GraphFunction::Paraboloid { rho: 0.25 }).unwrap();
    let deg = TouchingBall::new(&deg_dom, &[0.0, 0.0], 0.25).unwrap();
    let threshold = 10.0 * c * (2.5f64).sqrt();
    let grow = vec![(4e-3, 10.0), (2e-3, 30.0), (1e-3, threshold * 1.01)];
    assert!(curvature_report(grow, c, &deg, &opts).unwrap().passed);
    let slow = vec![(4e-3, 2.5), (2e-3, 2.8), (1e-3, 3.0)];
    let r = curvature_report(slow, c, &deg, &opts).unwrap();
    assert_eq!(r.predicted, Predicted::Infinite);
    assert!(!r.passed);
    let flat = vec![(4e-3, 50.0), (2e-3, 60.0), (1e-3, 55.0)];
    assert!(!curvature_report(flat, c, &deg, &opts).unwrap().passed);
}

#[test]
fn sandwich_on_similarity_field() {
    let heat = Nonlinearity::heat();
    let pair = barrier_profiles(&heat, 0.1, default_eta(0.1), ProfileKind::HalfLine).unwrap();
    let f1 = solve_profile(&heat, 1.0, ProfileKind::HalfLine).unwrap();
    let times = [1e-3, 4e-3];
    let f = synthetic(half_plane_grid(5e-3), Problem::Ibvp, &times, |d, t| f1.eval(d / t.sqrt()));
    let rep = barrier_sandwich_check(&f, &pair, (0.01, 0.2), (1e-3, 4e-3)).unwrap();
    assert!(rep.passed, "{rep:?}");
    assert_eq!(scan_tau(&f, &pair, (0.01, 0.2)).unwrap(), Some(4e-3));
    // region must respect the η√t_max floor
    assert!(barrier_sandwich_check(&f, &pair, (1e-4, 0.2), (1e-3, 4e-3)).is_err());
    // wrong pair kind
    let whole = barrier_profiles(&heat, 0.1, default_eta(0.1), ProfileKind::WholeLine).unwrap();
    assert!(barrier_sandwich_check(&f, &whole, (0.01, 0.2), (1e-3, 4e-3)).is_err());
    // an overshooting field breaks the upper bound
    let over = synthetic(half_plane_grid(5e-3), Problem::Ibvp, &times, |d, t| (1.2 * f1.eval(d / t.sqrt())).min(1.0));
    assert!(!barrier_sandwich_check(&over, &pair, (0.01, 0.2), (1e-3, 4e-3)).unwrap().passed);
}

#[test]
fn degenerate_pair_fails_self_consistency() {
    let heat = Nonlinearity::heat();
    let f1 = solve_profile(&heat, 1.0, ProfileKind::HalfLine).unwrap();
    let ok = barrier_profiles(&heat, 0.1, default_eta(0.1), ProfileKind::HalfLine).unwrap();
    assert!(profile_sandwich(&ok, &f1, 20.0, 2001).unwrap().passed);
    let degenerate = barrier_profiles_unchecked(&heat, 0.0, 0.0, ProfileKind::HalfLine).unwrap();
    assert!(!profile_sandwich(&degenerate, &f1, 20.0, 2001).unwrap().passed);
}

#[test]
fn stationarity_of_exact_tilted_solution() {
    let aff = Domain::graph(2, GraphFunction::Affine { slope: vec![0.5], offset: 0.0 }).unwrap();
    let h = 4e-3;
    let g = graph_window(&aff, (-0.5, 0.5), 1.0, 2.0 * h, h).unwrap();
    let f = synthetic(g, Problem::Ibvp, &[0.01, 0.02], |d, t| if d <= 0.0 { 1.0 } else { erfc(d / (2.0 * t.sqrt())) });
    let rep = stationarity_score(&f, &aff, 0.2, (-0.3, 0.3), 301, 1e-3).unwrap();
    assert!(rep.passed, "{:?}", rep.measured_series);
    assert!(rep.extrapolated < 1e-4);
    // a field that varies along Γ
    let wavy = Field { values: f.values.iter().map(|u| u.iter().enumerate().map(|(k, v)| v * (1.0 + 0.05 * f.grid.coords(k)[0])).collect()).collect(), ..f.clone() };
    let rw = stationarity_score(&wavy, &aff, 0.2, (-0.3, 0.3), 301, 1e-3).unwrap();
    assert!(!rw.passed);
    assert!(discriminates(&rep, &rw, 5.0));
    assert!(!discriminates(&rw, &rep, 5.0));
    let flat = Domain::upper_half_space(2);
    assert!(stationarity_score(&f, &flat, 0.2, (-0.3, 0.3), 301, 1e-3).is_err());
}

#[test]
fn asympvol_report_series_and_tolerance() {
    let dom = Domain::upper_half_space(3);
    let ball = TouchingBall::new(&dom, &[0.0, 0.0, 0.0], 0.25).unwrap();
    let levels = [1e-2 * 0.25, 1e-3 * 0.25, 1e-4 * 0.25];
    let rep = verify_asympvol(&dom, &ball, &levels, &MeasureOptions::default(), 0.01).unwrap();
    assert!(rep.passed);
    let errs: Vec<f64> = rep.measured_series.iter().map(|p| (p.1 - 2.0 * PI * 0.25).abs()).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    assert!(verify_asympvol(&dom, &ball, &[1e-2 * 0.25, 1e-2 * 0.25], &MeasureOptions::default(), 0.01).is_err());
}

#[test]
fn ordering_report_wraps_field_comparison() {
    let f = erfc_field(1.0, &[1e-3, 2e-3]);
    let rep = ordering_report(&f, &f, ORDERING_SLACK).unwrap();
    assert!(rep.passed);
    assert_eq!(rep.extrapolated, 0.0);
    let bigger = erfc_field(1.5, &[1e-3, 2e-3]);
    assert!(ordering_report(&f, &bigger, ORDERING_SLACK).unwrap().passed);
    assert!(!ordering_report(&bigger, &f, ORDERING_SLACK).unwrap().passed);
}
