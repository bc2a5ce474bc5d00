use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn nldiff(args: &[&str], root: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nldiff")).args(args).env("NLDIFF_OUTPUT_ROOT", root).output().expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

#[test]
fn profile_writes_csv_and_mass_residual() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p");
    let o = nldiff(&["profile", "--nl", "heat", "--c", "1", "--kind", "half", "--out", &out_arg(&out)], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["command"], "profile");
    assert_eq!(r["passed"], true);
    assert!(r["results"]["mass_residual"].as_f64().unwrap() <= 1e-6);
    let mut rd = csv::Reader::from_path(out.join("profile.csv")).unwrap();
    assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), vec!["xi", "f", "df"]);
    let rows: Vec<Vec<f64>> = rd.records().map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect()).collect();
    assert!(rows.len() > 10);
    assert!((rows[0][1] - 1.0).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0] && w[1][1] <= w[0][1]));
}

#[test]
fn constant_for_heat_in_the_plane() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("c");
    let o = nldiff(&["constant", "--nl", "heat", "--N", "2", "--out", &out_arg(&out)], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    let c = report(&out)["results"]["c_phi_N"].as_f64().unwrap();
    assert!((c - 2.7273751255).abs() < 1e-8, "{c}");
}

#[test]
fn asympvol_passes_and_rerun_is_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let args = |d: &Path| vec!["verify-asympvol".to_string(), "--domain".into(), "half-space".into(), "--N".into(), "3".into(), "--out".into(), out_arg(d)];
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let v = args(d);
        let o = nldiff(&v.iter().map(String::as_str).collect::<Vec<_>>(), tmp.path());
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (mut ra, mut rb) = (report(&a), report(&b));
    assert_eq!(ra["reports"][0]["passed"], true);
    for r in [&mut ra, &mut rb] {
        let m = r.as_object_mut().unwrap();
        m.remove("metadata");
        m["config"].as_object_mut().unwrap().remove("output_dir");
    }
    assert_eq!(ra, rb);
    assert!(a.join("series.csv").exists());
}

#[test]
fn failed_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("f");
    let o = nldiff(&["verify-asympvol", "--domain", "parabola:0.5", "--tolerance", "1e-12", "--out", &out_arg(&out)], tmp.path());
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(report(&out)["passed"], false);
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nldiff(&["pde", "--times", "0.004,0.001"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = nldiff(&["profile", "--nl", "sine:1.5"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = nldiff(&["verify-varadhan", "--h", "0.05", "--times", "0.001"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "nonlinearity = \"heat\"\nbogus = 1\n").unwrap();
    let o = nldiff(&["profile", "--config", cfg.to_str().unwrap()], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn underflow_exits_three() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("u");
    let o = nldiff(&["verify-varadhan", "--band", "0.3,0.4", "--times", "0.001", "--h", "0.01", "--x-range", "-0.05,0.05", "--out", &out_arg(&out)], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(report(&out)["error"].is_string());
}

#[test]
fn config_file_with_flag_override() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "command = \"profile\"\nnonlinearity = \"sine:0.1\"\nc = 2.0\nkind = \"whole\"\n").unwrap();
    let out = tmp.path().join("o");
    let o = nldiff(&["profile", "--config", cfg.to_str().unwrap(), "--c", "1.5", "--out", &out_arg(&out)], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let r = report(&out);
    assert_eq!(r["config"]["c"].as_f64(), Some(1.5));
    assert_eq!(r["config"]["kind"], "whole_line");
    assert_eq!(r["config"]["nonlinearity"]["a"].as_f64(), Some(0.1));
}

#[test]
fn output_root_from_environment() {
    let tmp = tempfile::tempdir().unwrap();
    let o = nldiff(&["constant"], tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert!(tmp.path().join("nldiff-out").join("constant").join("report.json").exists(), "{:?}", std::fs::read_dir(tmp.path()).unwrap().collect::<Vec<_>>());
}

#[test]
fn small_ordering_and_pde_runs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("ord");
    let o = nldiff(&["verify-ordering", "--h", "0.01", "--times", "0.001,0.004", "--x-range", "-0.05,0.05", "--out", &out_arg(&out)], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(report(&out)["reports"].as_array().unwrap().len(), 2);
    let out = tmp.path().join("pde");
    let o = nldiff(&["pde", "--domain", "parabola:0.5", "--h", "0.01", "--times", "0.001,0.002", "--x-range", "-0.1,0.1", "--out", &out_arg(&out)], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for i in 0..2 {
        let mut rd = csv::Reader::from_path(out.join(format!("field_t{i}.csv"))).unwrap();
        assert_eq!(rd.headers().unwrap().iter().collect::<Vec<_>>(), vec!["x", "y", "u"]);
        assert!(rd.records().all(|r| {
            let u: f64 = r.unwrap()[2].parse().unwrap();
            (0.0..=1.0).contains(&u)
        }));
    }
}
