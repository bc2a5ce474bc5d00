use nldiff::nonlinearity::{test_family, Nonlinearity, NonlinearitySpec};
use proptest::prelude::*;

fn family() -> Vec<Nonlinearity> {
    let mut v = test_family();
    v.push(Nonlinearity::scaled(2.5).unwrap());
    v
}

#[test]
fn round_trip_on_fixed_samples() {
    for nl in family() {
        let t = nl.transform();
        for s in [0.1, 0.5, 1.0, 2.0] {
            let back = t.psi(t.phi(s).unwrap()).unwrap();
            assert!((back - s).abs() <= 1e-9, "{}: {s} -> {back}", nl.name());
        }
    }
}

#[test]
fn infinite_speed_condition() {
    for nl in family() {
        let t = nl.transform();
        assert!(t.phi(1e-40).unwrap() < -40.0 * nl.delta1());
        assert!(t.phi(1e-300).unwrap() < -600.0 * nl.delta1());
    }
}

#[test]
fn tabulated_import_from_csv() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("phi.csv");
    let mut text = String::from("s,phi\n");
    for i in 0..=400 {
        let s = -10.0 + 0.05 * i as f64;
        text.push_str(&format!("{s},{}\n", 1.5 * s));
    }
    std::fs::write(&path, text).unwrap();
    let spec = NonlinearitySpec::parse(&format!("table:{}", path.display())).unwrap();
    let nl = spec.build().unwrap();
    assert!(!nl.is_c2());
    assert!((nl.delta1() - 1.5).abs() < 1e-9 && (nl.delta2() - 1.5).abs() < 1e-9);
    let t = nl.transform();
    assert!((t.phi(std::f64::consts::E).unwrap() - 1.5).abs() < 1e-9);
}

#[test]
fn rejects_table_with_nonzero_origin() {
    let s: Vec<f64> = (0..=20).map(|i| -10.0 + i as f64).collect();
    let p = s.iter().map(|x| x + 0.5).collect();
    assert!(Nonlinearity::tabulated("shifted", s, p).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_within_log_envelopes(k in 0usize..4, e in -30.0f64..9.0) {
        let nl = &family()[k];
        let s = e.exp();
        let v = nl.transform().phi(s).unwrap();
        let l = s.ln();
        let (a, b) = (nl.delta1() * l, nl.delta2() * l);
        let (lo, hi) = if l >= 0.0 { (a, b) } else { (b, a) };
        prop_assert!(v >= lo - 1e-10 * (1.0 + l.abs()) && v <= hi + 1e-10 * (1.0 + l.abs()));
    }

    #[test]
    fn phi_is_monotone(k in 0usize..4, e1 in -20.0f64..4.0, gap in 1e-6f64..5.0) {
        let t = family()[k].transform();
        prop_assert!(t.phi(e1.exp()).unwrap() < t.phi((e1 + gap).exp()).unwrap());
    }

    #[test]
    fn psi_inverts_phi(k in 0usize..4, y in -40.0f64..4.0) {
        let t = family()[k].transform();
        let s = t.psi(y).unwrap();
        prop_assert!((t.phi(s).unwrap() - y).abs() <= 1e-10 * (1.0 + y.abs()));
        prop_assert!((t.psi(t.phi(s).unwrap()).unwrap() - s).abs() <= 1e-9 * s.max(1.0));
    }
}
