use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn exe() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levsqueeze"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn run(args: &[&str], out: &Path) -> Output {
    exe().args(args).arg("--out").arg(out).output().unwrap()
}

fn csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let text = std::fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    (header, rows)
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn recoil_writes_sweep_and_report() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(
        &["recoil", "--beam", "na=0.9,axis=-z", "--db", "0:15:5", "--phase", "0,pi"],
        tmp.path(),
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv(&tmp.path().join("recoil.csv"));
    assert_eq!(header, ["r_db", "r", "phase", "ratio_perfect", "ratio_na0.9"]);
    assert_eq!(rows.len(), 8);
    let last_zero = rows.iter().rev().find(|r| r[2] == 0.0).unwrap();
    assert!((last_zero[3] - 0.0316227766).abs() < 1e-9);
    assert!(last_zero[4] > last_zero[3] && last_zero[4] < 1.0);
    let d = json(&tmp.path().join("derived.json"));
    assert_eq!(d["mode"]["kind"]["axis"], "z");
    assert!(d["overlaps"][0]["xi_modulus"].as_f64().unwrap() > 0.9);
    assert!(tmp.path().join("config.json").exists());
}

#[test]
fn perfect_overlap_drops_beam_columns() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["recoil", "--beam", "na=0.5", "--perfect-overlap"], tmp.path());
    assert!(o.status.success());
    let (header, _) = csv(&tmp.path().join("recoil.csv"));
    assert_eq!(header, ["r_db", "r", "phase", "ratio_perfect"]);
}

#[test]
fn irp_normalization_is_reported() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["irp", "--db", "10", "--phase", "pi", "--grid", "10x20"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let (header, rows) = csv(&tmp.path().join("irp.csv"));
    assert_eq!(header, ["theta", "phi", "dsigma", "irp", "f_plus_sq", "f_minus_sq"]);
    assert_eq!(rows.len(), 200);
    let m = &json(&tmp.path().join("irp.json"))["summary"];
    let (n, e) = (m["normalization"].as_f64().unwrap(), m["expected_normalization"].as_f64().unwrap());
    assert!((n - e).abs() <= 1e-9 * e);
}

#[test]
fn irp_needs_single_level() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["irp", "--db", "5,10"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("squeezer"));
}

#[test]
fn sensitivity_quadrature_curve_matches_recoil() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["sensitivity", "--xi", "0.8", "--db", "15", "--phase", "3pi/2"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let s = json(&tmp.path().join("sensitivity.json"));
    let v = s["curves"][0]["s_min_opt"].as_f64().unwrap();
    let r = 15.0 * std::f64::consts::LN_10 / 20.0;
    let want = 1.0 - 0.64 * (1.0 - (-2.0 * r).exp());
    assert!((v - want).abs() < 1e-9, "{v} vs {want}");
    let (header, rows) = csv(&tmp.path().join("sensitivity_u.csv"));
    assert_eq!(header[..2], ["u", "vacuum"]);
    assert_eq!(rows.len(), 241);
    assert!(rows.iter().all(|r| r[1] >= 1.0 - 1e-12));
    let (_, heat) = csv(&tmp.path().join("heatmap.csv"));
    assert_eq!(heat.len(), 33 * 21);
    let (_, ticks) = csv(&tmp.path().join("na_ticks.csv"));
    assert!(ticks.windows(2).all(|w| w[1][1] > w[0][1]));
}

#[test]
fn resonance_without_damping_is_numerical_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"sensitivity": {"damping_ratio": 0, "xi": 1}}"#).unwrap();
    let o = exe()
        .args(["sensitivity", "--omega-ratio", "1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn optimize_finds_large_na() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["optimize", "--budget", "40", "--free", "na=0.1:0.95", "--quad", "32x64"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let r = json(&tmp.path().join("optimize.json"));
    assert!(r["best"]["point"]["na"].as_f64().unwrap() > 0.9);
    assert!(r["evaluations"].as_u64().unwrap() <= 40);
    let (header, rows) = csv(&tmp.path().join("trace.csv"));
    assert_eq!(header, ["eval", "na", "value", "xi_modulus", "relative_phase"]);
    assert_eq!(rows.len() as u64, r["evaluations"].as_u64().unwrap());
}

#[test]
fn wigner_grid_integrates_to_one() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["wigner", "--source", "bare-mode", "--db", "6", "--phase", "pi/2", "--points", "101"], tmp.path());
    assert!(o.status.success(), "{}", stderr(&o));
    let w = json(&tmp.path().join("wigner.json"));
    assert!((w["determinant"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((w["grid_integral"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let (header, rows) = csv(&tmp.path().join("wigner.csv"));
    assert_eq!(header, ["x", "y", "w"]);
    assert_eq!(rows.len(), 101 * 101);
}

#[test]
fn invalid_values_exit_with_code_2_and_name_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cases: [(&[&str], &str); 6] = [
        (&["recoil", "--db=-3"], "squeezer.db"),
        (&["recoil", "--axis", "w"], "axis"),
        (&["recoil", "--beam", "na=1.5"], "na"),
        (&["recoil", "--mode", "libration", "--axis", "x"], "mode.axis"),
        (&["wigner", "--xi", "2"], "wigner.xi"),
        (&["optimize", "--free", "speed=0:1"], "free"),
    ];
    for (args, field) in cases {
        let o = run(args, tmp.path());
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(stderr(&o).contains(field), "{args:?}: {}", stderr(&o));
    }
}

#[test]
fn config_errors_carry_json_path() {
    let tmp = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"squeezer": {"db": "fifteen"}}"#, "squeezer.db"),
        (r#"{"laser": {"powr": 1}}"#, "laser.powr"),
        (r#"{"beams": [{"na": 0.5, "axis": [0, 0, 0]}]}"#, "beams[0]"),
        (r#"{"quad": {"n_theta": 1}}"#, "quad"),
        (r#"{"threads": 0}"#, "threads"),
    ];
    for (i, (text, field)) in cases.iter().enumerate() {
        let cfg = tmp.path().join(format!("c{i}.json"));
        std::fs::write(&cfg, text).unwrap();
        let o = exe()
            .args(["recoil", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(tmp.path().join("o"))
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(2), "{text}");
        assert!(stderr(&o).contains(field), "{text}: {}", stderr(&o));
    }
}

#[test]
fn missing_config_is_an_input_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["recoil", "--config", "/nonexistent/levsqueeze.json"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn echoed_config_reproduces_the_run() {
    let tmp = tempfile::tempdir().unwrap();
    let first = tmp.path().join("first");
    let o = run(
        &[
            "recoil",
            "--mode",
            "libration",
            "--axis",
            "y",
            "--beam",
            "na=0.8,axis=z,pol=pi/2",
            "--db",
            "15",
            "--phase",
            "0:pi:pi/4",
            "--quad",
            "32x64",
        ],
        &first,
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let second = tmp.path().join("second");
    let o = exe()
        .args(["recoil", "--config"])
        .arg(first.join("config.json"))
        .arg("--out")
        .arg(&second)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["config.json", "recoil.csv", "derived.json"] {
        let a = std::fs::read_to_string(first.join(f)).unwrap();
        let b = std::fs::read_to_string(second.join(f)).unwrap();
        assert!(a == b, "{f} differs");
    }
}

#[test]
fn flags_override_config_file() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    std::fs::write(&cfg, r#"{"squeezer": {"db": 3, "phase": 0}, "seed": 4}"#).unwrap();
    let o = exe()
        .args(["recoil", "--db", "12", "--seed", "9", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("o"))
        .output()
        .unwrap();
    assert!(o.status.success());
    let echo = json(&tmp.path().join("o/config.json"));
    assert_eq!(echo["squeezer"]["db"][0], 12.0);
    assert_eq!(echo["seed"], 9);
}

#[test]
fn relative_config_resolves_against_env_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let o = exe()
        .current_dir(tmp.path())
        .env("LEVSQUEEZE_CONFIG_DIR", configs())
        .args(["wigner", "--config", "wigner_bare.json", "--out", "o"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(json(&tmp.path().join("o/wigner.json"))["source"], "bare-mode");
}

#[test]
fn shipped_configs_run() {
    let tmp = tempfile::tempdir().unwrap();
    for (file, cmd, output) in [
        ("recoil_motion_z.json", "recoil", "reheating.csv"),
        ("recoil_libration_y.json", "recoil", "recoil.csv"),
        ("irp_motion_z.json", "irp", "irp.csv"),
        ("sensitivity.json", "sensitivity", "heatmap.csv"),
        ("optimize_na.json", "optimize", "scan.json"),
        ("wigner_bare.json", "wigner", "wigner.csv"),
    ] {
        let out = tmp.path().join(file);
        let o = exe()
            .arg(cmd)
            .arg("--config")
            .arg(configs().join(file))
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap();
        assert!(o.status.success(), "{file}: {}", stderr(&o));
        assert!(out.join(output).exists(), "{file}");
    }
}

#[test]
fn thread_count_does_not_change_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let mut files = Vec::new();
    for t in ["1", "3"] {
        let out = tmp.path().join(t);
        let o = run(&["irp", "--beam", "na=0.7,axis=x", "--grid", "20x40", "--threads", t], &out);
        assert!(o.status.success(), "{}", stderr(&o));
        files.push(std::fs::read(out.join("irp.csv")).unwrap());
    }
    assert!(files[0] == files[1]);
}
