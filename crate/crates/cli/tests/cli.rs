use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sha2::Digest;
use tempfile::TempDir;

fn sqz(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sqz"))
        .args(args)
        .current_dir(cwd)
        .env_remove("SQZ_OUT")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

fn read_csv(path: &Path) -> Vec<Vec<f64>> {
    let mut rdr = csv::Reader::from_path(path).unwrap();
    rdr.records().map(|r| r.unwrap().iter().map(|c| c.parse().unwrap()).collect()).collect()
}

#[test]
fn unknown_scenario_exits_2_without_writing() {
    let tmp = TempDir::new().unwrap();
    let out = sqz(&["run", "no-such-thing", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 2);
    assert_eq!(fs::read_dir(tmp.path()).unwrap().count(), 0);

    let cfg = write(tmp.path(), "c.json", r#"{"scenario": "nope", "output_dir": "o"}"#);
    assert_eq!(code(&sqz(&["run", &cfg], tmp.path())), 2);
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn missing_required_parameter_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = sqz(&["run", "loss-sweep", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("`r`"));
    assert!(!tmp.path().join("o").exists());
}

#[test]
fn invalid_parameter_value_exits_3() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&sqz(&["run", "tomography-demo", "--param", "state=cat", "--out", "o"], tmp.path())), 3);
    assert_eq!(code(&sqz(&["run", "loss-sweep", "--param", "r=1", "--param", "t_max=1.5", "--out", "o"], tmp.path())), 3);
    assert_eq!(code(&sqz(&["run", "loss-sweep", "--param", "r=1", "--param", "steps=2.5", "--out", "o"], tmp.path())), 3);
}

#[test]
fn unreadable_config_exits_4() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&sqz(&["run", "missing.json"], tmp.path())), 4);
    assert_eq!(code(&sqz(&["validate", "missing.json"], tmp.path())), 4);
}

#[test]
fn unwritable_output_exits_4() {
    let tmp = TempDir::new().unwrap();
    write(tmp.path(), "blocker", "");
    let out = sqz(&["run", "teleport-sweep", "--param", "r_max=1", "--out", "blocker/sub"], tmp.path());
    assert_eq!(code(&out), 4);
}

#[test]
fn malformed_config_exits_3() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "c.json", "{not json");
    assert_eq!(code(&sqz(&["validate", &cfg], tmp.path())), 3);
}

#[test]
fn validate_reports() {
    let tmp = TempDir::new().unwrap();
    let ok = write(tmp.path(), "ok.json", r#"{"scenario": "teleport-sweep", "params": {"r_max": 2.0}}"#);
    let out = sqz(&["validate", &ok], tmp.path());
    assert_eq!(code(&out), 0);
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "OK");

    let missing = write(tmp.path(), "m.json", r#"{"scenario": "teleport-sweep", "params": {"steps": 5}}"#);
    let out = sqz(&["validate", &missing], tmp.path());
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("r_max"));

    let extra = write(tmp.path(), "e.json", r#"{"scenario": "teleport-sweep", "params": {"r_max": 1, "colour": "blue"}}"#);
    let out = sqz(&["validate", &extra], tmp.path());
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning: unknown parameter `colour`"));
}

#[test]
fn loss_sweep_matches_closed_form() {
    let tmp = TempDir::new().unwrap();
    let out = sqz(&["run", "loss-sweep", "--param", "r=1.15", "--out", "o"], tmp.path());
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let rows = read_csv(&tmp.path().join("o/loss_sweep.csv"));
    assert_eq!(rows.len(), 10);
    let r: f64 = 1.15;
    for (k, row) in rows.iter().enumerate() {
        let t = 0.1 * (k + 1) as f64;
        let vx = t * (-2.0 * r).exp() / 2.0 + (1.0 - t) / 2.0;
        assert!((row[0] - t).abs() < 1e-12);
        assert!((row[1] - vx).abs() < 1e-12, "T={t}: {} vs {vx}", row[1]);
        assert!((row[3] - 10.0 * (2.0 * vx).log10()).abs() < 1e-9);
    }
}

#[test]
fn opa_spectrum_zero_frequency_is_six_db() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&sqz(&["run", "opa-spectrum", "--out", "o"], tmp.path())), 0);
    let text = fs::read_to_string(tmp.path().join("o/opa_spectrum.csv")).unwrap();
    let first: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    let db: f64 = first[4].parse().unwrap();
    assert!((db + 6.02).abs() < 0.005, "{db}");
}

#[test]
fn same_seed_gives_identical_csv() {
    let tmp = TempDir::new().unwrap();
    for dir in ["a", "b"] {
        let args = ["run", "tomography-demo", "--param", "samples=300", "--param", "grid_points=11", "--seed", "5", "--out", dir];
        assert_eq!(code(&sqz(&args, tmp.path())), 0);
    }
    for name in ["samples.csv", "wigner.csv", "summary.csv"] {
        let a = fs::read(tmp.path().join("a").join(name)).unwrap();
        let b = fs::read(tmp.path().join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name}");
    }
    let args = ["run", "tomography-demo", "--param", "samples=300", "--param", "grid_points=11", "--seed", "6", "--out", "c"];
    assert_eq!(code(&sqz(&args, tmp.path())), 0);
    assert_ne!(fs::read(tmp.path().join("a/samples.csv")).unwrap(), fs::read(tmp.path().join("c/samples.csv")).unwrap());
}

#[test]
fn manifest_records_config_and_checksums() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "c.json",
        r#"{"scenario": "teleport-sweep", "params": {"r_max": 1.0, "steps": 3}, "seed": 11, "output_dir": "from-config"}"#,
    );
    assert_eq!(code(&sqz(&["run", &cfg], tmp.path())), 0);
    let dir = tmp.path().join("from-config");
    let m: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(m["seed"], 11);
    assert_eq!(m["config"]["scenario"], "teleport-sweep");
    assert_eq!(m["config"]["params"]["gain"], 1.0);
    assert!(m["library_version"].is_string());
    let csv = fs::read(dir.join("teleport_sweep.csv")).unwrap();
    assert_eq!(m["outputs"]["teleport_sweep.csv"], hex::encode(sha2::Sha256::digest(&csv)));
    let text = String::from_utf8(csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "r,fidelity,added_noise");
    assert_eq!(text.lines().nth(1).unwrap(), "0,0.5,1");
}

#[test]
fn out_flag_overrides_env_and_config() {
    let tmp = TempDir::new().unwrap();
    let run = |extra: &[&str], env: Option<&str>| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sqz"));
        cmd.args(["run", "cavity-figures"]).args(extra).current_dir(tmp.path()).env_remove("SQZ_OUT");
        if let Some(e) = env {
            cmd.env("SQZ_OUT", e);
        }
        cmd.output().unwrap()
    };
    assert_eq!(code(&run(&[], Some("env-dir"))), 0);
    assert!(tmp.path().join("env-dir/cavity_figures.csv").exists());
    assert_eq!(code(&run(&["--out", "flag-dir"], Some("env-dir2"))), 0);
    assert!(tmp.path().join("flag-dir/cavity_figures.csv").exists());
    assert!(!tmp.path().join("env-dir2").exists());
    assert_eq!(code(&run(&[], None)), 0);
    assert!(tmp.path().join("sqz-out/cavity_figures.csv").exists());
}

#[test]
fn json_format_mirrors_table() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&sqz(&["run", "gw-snr-sweep", "--format", "json", "--out", "o"], tmp.path())), 0);
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("o/gw_snr_sweep.json")).unwrap()).unwrap();
    assert_eq!(v["columns"][0], "r");
    assert_eq!(v["columns"][3], "phi_min");
    assert_eq!(v["rows"].as_array().unwrap().len(), 16 * 6);
}

#[test]
fn engineering_outputs_are_fstate_json() {
    let tmp = TempDir::new().unwrap();
    assert_eq!(code(&sqz(&["run", "kitten", "--out", "o"], tmp.path())), 0);
    let text = fs::read_to_string(tmp.path().join("o/state.json")).unwrap();
    let state = squeezed::FockState::from_json(&text).unwrap();
    assert_eq!(state.cutoff(), 20);
    let prov: serde_json::Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("o/provenance.json")).unwrap()).unwrap();
    assert!(prov["results"]["fidelity_odd_cat"].as_f64().unwrap() > 0.95);
}

#[test]
fn list_prints_every_scenario() {
    let tmp = TempDir::new().unwrap();
    let out = sqz(&["list"], tmp.path());
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    for name in [
        "loss-sweep", "opa-spectrum", "ppktp-estimate", "cavity-figures", "tomography-demo", "spectrum-drift-demo",
        "teleport-sweep", "gw-snr-sweep", "herald-photon", "kitten", "kitten-superposition",
    ] {
        assert!(text.lines().any(|l| l == name), "{name}");
    }
    assert!(text.contains("r_max (number, required)"));
}
