use std::path::Path;
use std::process::{Command, Output};

use planar_squeeze::entanglement::{noise_threshold, Verdict};
use planar_squeeze::SpinQuantumNumber;
use planar_squeeze_cli::commands::{BecRow, BoundsRow, PhaseRow, ScalingRow, StateReport, WitnessCsvRow};
use serde::de::DeserializeOwned;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_planar-squeeze"))
        .args(args)
        .env("PLANAR_SQUEEZE_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn csv(args: &[&str]) -> (String, Vec<Vec<String>>) {
    let text = stdout(args);
    let mut lines = text.lines();
    let header = lines.next().unwrap().to_string();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn num(s: &str) -> f64 {
    s.parse().unwrap()
}

fn json<T: DeserializeOwned>(args: &[&str]) -> (String, Vec<T>) {
    let mut full = args.to_vec();
    full.extend(["--format", "json"]);
    let text = stdout(&full);
    let rows = serde_json::from_str(&text).unwrap();
    (text, rows)
}

fn roundtrip<T: DeserializeOwned + serde::Serialize + PartialEq + std::fmt::Debug>(args: &[&str]) {
    let (text, rows) = json::<T>(args);
    let again = serde_json::to_string_pretty(&rows).unwrap() + "\n";
    assert_eq!(again, text);
    let reparsed: Vec<T> = serde_json::from_str(&again).unwrap();
    assert_eq!(reparsed, rows);
}

#[test]
fn bounds_reproduce_table() {
    let (header, rows) = csv(&["bounds", "--j", "0.5..7", "--step", "0.5"]);
    assert_eq!(header, "j,c_exact,c_direct,c_asymptotic,rel_err_asymptotic");
    let expected = [
        (0.5, 0.25),
        (1.0, 0.4375),
        (1.5, 0.6009),
        (2.0, 0.7496),
        (2.5, 0.8877),
        (3.0, 1.018),
        (3.5, 1.142),
        (4.0, 1.260),
        (5.0, 1.484),
        (6.0, 1.695),
        (7.0, 1.894),
    ];
    for (j, c) in expected {
        let row = rows.iter().find(|r| num(&r[0]) == j).unwrap();
        let got = num(&row[1]);
        assert!((got - c).abs() / c < 5e-4, "J = {j}: {got}");
    }
    let (_, one) = csv(&["bounds", "--j", "1"]);
    assert_eq!(one[0][1], "0.4375");
    let (_, fifty) = csv(&["bounds", "--j", "50"]);
    assert!((num(&fifty[0][1]) - 7.503).abs() < 5e-4);
}

#[test]
fn state_at_fifty() {
    let (header, rows) = csv(&["state", "--j", "50"]);
    assert!(header.starts_with("j,mean_x,mean_y,mean_z,var_x,var_y,var_z,planar_sum"));
    let r: Vec<f64> = rows[0].iter().map(|s| num(s)).collect();
    let (vx, vy, vz) = (r[4], r[5], r[6]);
    assert!(vz > 25.0 && 25.0 > vy && vy > vx);
    assert!(r[1] > 0.0 && r[2].abs() < 1e-9 && r[3].abs() < 1e-9);
    let (_, one) = csv(&["state", "--j", "1"]);
    assert_eq!(one[0][7], "0.4375");
}

#[test]
fn bec_scan_minimum() {
    let (header, rows) = csv(&["bec", "--n", "100", "--range", "-3:-1:401"]);
    assert_eq!(header, "ratio,var_x,var_y,var_z,planar_sum,mean_x");
    assert_eq!(rows.len(), 401);
    let best = rows
        .iter()
        .min_by(|a, b| num(&a[4]).total_cmp(&num(&b[4])))
        .unwrap();
    assert!((num(&best[0]) + 2.034).abs() <= 0.01, "{best:?}");
}

#[test]
fn bec_flags_degenerate_rows() {
    let out = run(&["bec", "--n", "10", "--range", "-1e7:-1e6:2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().skip(1).all(|l| l.ends_with(",nan,nan,nan,nan,nan")));
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));
}

#[test]
fn phase_beats_shot_noise() {
    let (header, rows) = csv(&["phase", "--j", "50", "--grid", "64"]);
    assert_eq!(header, "alpha,delta_phi");
    assert_eq!(rows.len(), 65);
    assert_eq!(rows[0][1], "nan");
    let quarter = &rows[32];
    assert!((num(&quarter[0]) - std::f64::consts::FRAC_PI_2).abs() < 1e-9);
    assert!(num(&quarter[1]) < 0.1);

    let (header, rows) = csv(&["phase", "--j", "10,100", "--grid", "8"]);
    assert_eq!(header, "j,delta_phi_min");
    assert_eq!(rows.len(), 2);
    let (_, single) = csv(&["phase", "--j", "10", "--scaling"]);
    assert_eq!(single.len(), 1);
}

#[test]
fn witness_crossings() {
    let (header, rows) = csv(&["witness", "--j", "0.5,1,2,10", "--pn", "0:1:0.01"]);
    assert_eq!(header, "j,p_n,s2_over_nj,cj_over_j,verdict");
    assert_eq!(rows.len(), 4 * 101);
    for j in [0.5, 1.0, 2.0, 10.0] {
        let t = noise_threshold(SpinQuantumNumber::from_f64(j).unwrap()).unwrap();
        for r in rows.iter().filter(|r| num(&r[0]) == j) {
            let p = num(&r[1]);
            if (p - t).abs() > 1e-6 {
                assert_eq!(r[4] == "entangled", p < t, "J = {j}, p = {p}");
            }
        }
    }
}

#[test]
fn json_roundtrips() {
    roundtrip::<BoundsRow>(&["bounds", "--j", "0.5,1,3"]);
    roundtrip::<StateReport>(&["state", "--j", "3.5"]);
    roundtrip::<BecRow>(&["bec", "--n", "20", "--range", "-3:-1:7"]);
    roundtrip::<PhaseRow>(&["phase", "--j", "5", "--grid", "8"]);
    roundtrip::<ScalingRow>(&["phase", "--j", "2,4,8"]);
    roundtrip::<WitnessCsvRow>(&["witness", "--j", "1", "--pn", "0:1:0.1"]);

    let (_, rows) = json::<StateReport>(&["state", "--j", "2"]);
    assert_eq!(rows[0].state.moments(), rows[0].moments);
    let (_, w) = json::<WitnessCsvRow>(&["witness", "--j", "1", "--pn", "0:0.1:0.1"]);
    assert_eq!(w[0].verdict, Verdict::Entangled);
}

fn run_to_file(dir: &Path, name: &str, args: &[&str]) -> Vec<u8> {
    let path = dir.join(name);
    let mut full = args.to_vec();
    full.extend(["--out", path.to_str().unwrap()]);
    let out = run(&full);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    std::fs::read(path).unwrap()
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["bounds", "--j", "0.5..4", "--seed", "17"],
        &["bec", "--n", "30", "--range", "-4:-1:31", "--format", "json"],
        &["phase", "--j", "2,5,10,20"],
        &["witness", "--j", "0.5,2", "--pn", "0:1:0.05"],
    ];
    for (i, args) in cases.iter().enumerate() {
        let a = run_to_file(dir.path(), &format!("a{i}"), args);
        let b = run_to_file(dir.path(), &format!("b{i}"), args);
        assert!(!a.is_empty());
        assert_eq!(a, b, "{args:?}");
    }
}

#[test]
fn usage_errors_exit_with_two() {
    let bad: [&[&str]; 9] = [
        &["bounds", "--j", "0.3"],
        &["bounds", "--j", "0"],
        &["bounds", "--j", "abc"],
        &["state", "--j", "1,2"],
        &["bec", "--n", "100", "--range", "-1:-3"],
        &["bec", "--n", "0"],
        &["witness", "--j", "1", "--pn", "0:2:0.5"],
        &["phase", "--j", "5", "--grid", "0"],
        &["bounds", "--j", "1", "--format", "xml"],
    ];
    for args in bad {
        let out = run(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn invalid_thread_setting_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_planar-squeeze"))
        .args(["bounds", "--j", "1"])
        .env("PLANAR_SQUEEZE_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
