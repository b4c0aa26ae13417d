use std::path::Path;
use std::process::{Command, Output};

use photon_gauge_kit::commands::verify::criterion;
use photon_gauge_kit::{run, Command as Sub, RunConfig, Sink};

fn kit(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_photon-gauge-kit"))
        .args(args)
        .current_dir(dir)
        .env("PHOTON_GAUGE_KIT_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn set(keys: &[&str]) -> RunConfig {
    RunConfig::load(None, &keys.iter().map(|s| s.to_string()).collect::<Vec<_>>()).unwrap()
}

#[test]
fn basis_run_writes_data_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = kit(&["basis", "--out", "res", "--set", "basis.m_values=[1]"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let res = dir.path().join("res");
    for f in ["basis.csv", "basis_decomposition.csv", "basis_triads.csv", "plot_basis.py", "run_summary.json"] {
        assert!(res.join(f).exists(), "{f}");
    }
    let csv = std::fs::read_to_string(res.join("basis.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    for line in csv.lines().skip(1) {
        let v: Vec<f64> = line.split(',').map(|x| x.parse().unwrap()).collect();
        if v[col("lambda")] != 1.0 {
            continue;
        }
        let t = v[col("theta")];
        assert!((v[col("p_minus")] - 0.25 * (t.cos() - 1.0).powi(2)).abs() < 1e-14);
        assert!((v[col("s_z_plus_l_z")] - 1.0).abs() < 1e-14);
        if t == 0.0 {
            assert_eq!((v[col("p_minus")], v[col("p_zero")], v[col("p_plus")]), (0.0, 0.0, 1.0));
        }
    }
    let summary: serde_json::Value = serde_json::from_slice(&std::fs::read(res.join("run_summary.json")).unwrap()).unwrap();
    assert_eq!(summary["command"], "basis");
    assert_eq!(summary["passed"], true);
    assert!(summary["wall_time_seconds"].is_number());
    assert_eq!(summary["config"]["basis"]["m_values"][0], 1);
}

#[test]
fn config_file_and_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("ok.toml"), "schema_version = 1\n[gauge]\ngauges = [\"linear:1\"]\nmonopole_points = 2\n").unwrap();
    std::fs::write(dir.path().join("typo.toml"), "schema_version = 1\n[gauge]\nguages = [\"zero\"]\n").unwrap();
    std::fs::write(dir.path().join("v2.toml"), "schema_version = 2\n").unwrap();

    let out = kit(&["gauge", "--config", "ok.toml", "--out", "g"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let flux = std::fs::read_to_string(dir.path().join("g/gauge_flux.csv")).unwrap();
    assert!(flux.contains("linear:1,north"));

    let out = kit(&["gauge", "--config", "typo.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guages"));

    let out = kit(&["gauge", "--config", "v2.toml"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("schema_version"));
}

#[test]
fn field_command_reports_windings() {
    let dir = tempfile::tempdir().unwrap();
    let out = kit(&["field", "--out", "f", "--set", "field.ring.p0_sweep=[1.0, 2.0]"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let w = std::fs::read_to_string(dir.path().join("f/field_winding.csv")).unwrap();
    let rows: Vec<Vec<&str>> = w.lines().skip(1).map(|l| l.split(',').collect()).collect();
    let winding: Vec<(&str, &str)> = rows.iter().map(|r| (r[1], r[3])).collect();
    assert_eq!(winding, [("-1", "2"), ("0", "1"), ("1", "0")]);
    let null = |mu: usize| rows[mu][6].parse::<f64>().unwrap();
    assert!(null(0) < 1e-10 && null(1) < 1e-10 && null(2) > 0.1);
}

#[test]
fn truncated_field_fails_with_the_tail() {
    let dir = tempfile::tempdir().unwrap();
    let out = kit(&["field", "--set", "field.l_max=3"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("tail estimate"));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let config = set(&["field.ring.p0_sweep=[1.0]"]);
    let once = |cmd| {
        let sink = Sink::memory();
        run(cmd, &config, &sink).unwrap();
        let mut files = sink.files();
        files.remove("run_summary.json");
        files
    };
    for cmd in [Sub::Basis, Sub::Gauge, Sub::Field] {
        assert_eq!(once(cmd), once(cmd));
    }
}

#[test]
fn tampered_potential_sign_fails_the_flux_criterion() {
    let c = criterion(3, &set(&["verify.potential_sign=-1"]));
    assert!(!c.passed(), "{c}");
    assert!(criterion(3, &RunConfig::default()).passed());
}

#[test]
fn reduced_l_max_fails_the_winding_criterion() {
    let c = criterion(11, &set(&["verify.field_l_max=2"]));
    assert!(!c.passed());
    assert!(c.note.as_deref().unwrap_or("").contains("tail estimate"), "{c}");
}

#[test]
fn bad_thread_count_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_photon-gauge-kit"))
        .args(["basis"])
        .current_dir(dir.path())
        .env("PHOTON_GAUGE_KIT_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn shipped_default_config_matches_the_builtin_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/default.toml");
    assert_eq!(RunConfig::load(Some(&path), &[]).unwrap(), RunConfig::default());
}
