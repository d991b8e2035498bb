use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lightstore_cli::exit;
use tempfile::TempDir;

fn lightstore(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lightstore")).args(args).output().unwrap()
}

fn repo_file(rel: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..").join(rel).display().to_string()
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let p = dir.path().join("run.toml");
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn out_dir(dir: &TempDir) -> PathBuf {
    dir.path().join("out")
}

fn json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

const GAS_LIMIT: &str = r#"
[material]
name = "gas"
w12_rad_s = 0.0
w13_rad_s = 0.0
gamma3_rad_s = 0.0
gamma12_rad_s = 0.0
gamma13_rad_s = 0.0
gamma23_rad_s = 0.0

[medium]
g2n_rad2_s2 = 100.0
light_speed_m_s = 1.0

[drive]
omega0_rad_s = 10.0
omega_tau_rad_s = 1.0
t_start_s = 1.0
t_end_s = 3.0

[grid]
z_max_m = 10.0
n_z = 400
dt_s = 0.005
t_max_s = 4.0
n_snapshots = 5

[reduced]
center_m = 3.0
width_m = 0.5
"#;

#[test]
fn feasibility_on_typical_preset_passes() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, "[material]\npreset = \"rare-earth-crystal-typical\"\n");
    let out = out_dir(&tmp);
    let r = lightstore(&["feasibility", "--config", &cfg, "--output", out.to_str().unwrap(), "--format", "json"]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let report = json(&out.join("feasibility.json"));
    assert_eq!(report["schema"], "lightstore.feasibility-report.v1");
    assert_eq!(report["verdict"], true);
    assert!(!out.join("feasibility.csv").exists());
    let meta = json(&out.join("metadata.json"));
    assert_eq!(meta["mode"], "feasibility");
    assert!(meta["created"].as_str().unwrap().contains('T'));
}

#[test]
fn feasibility_report_is_byte_identical_across_runs() {
    let tmp = TempDir::new().unwrap();
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    for d in [&a, &b] {
        let r = lightstore(&["feasibility", "--output", d.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(0));
    }
    for f in ["feasibility.json", "feasibility.csv"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn gas_limit_reduced_run_is_lossless() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_config(&tmp, GAS_LIMIT);
    let out = out_dir(&tmp);
    let r = lightstore(&["simulate-reduced", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    let doc = json(&out.join("reduced.json"));
    assert_eq!(doc["schema"], "lightstore.reduced-metrics.v1");
    let eff = doc["efficiency"].as_f64().unwrap();
    assert!((eff - 1.0).abs() < 0.01, "efficiency {eff}");
    let csv = std::fs::read_to_string(out.join("reduced.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# schema: lightstore.reduced.v1"));
    assert_eq!(lines.next(), Some("t,z,re_psi,im_psi,re_phi,im_phi,theta"));
}

#[test]
fn validate_passes_on_defaults() {
    let tmp = TempDir::new().unwrap();
    let out = out_dir(&tmp);
    let r = lightstore(&["validate", "--output", out.to_str().unwrap(), "--workers", "2"]);
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert_eq!(r.status.code(), Some(0), "{stdout}");
    assert!(stdout.contains("all checks passed"));
    let doc = json(&out.join("validation.json"));
    assert_eq!(doc["passed"], true);
    assert_eq!(json(&out.join("metadata.json"))["workers"], 2);
}

#[test]
fn full_simulation_writes_versioned_deterministic_files() {
    let tmp = TempDir::new().unwrap();
    let cfg = repo_file("config/desk-storage.toml");
    let run = |name: &str| {
        let out = tmp.path().join(name);
        let r = lightstore(&["simulate-full", "--config", &cfg, "--output", out.to_str().unwrap()]);
        assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let traj = std::fs::read_to_string(a.join("trajectory.csv")).unwrap();
    assert!(traj.starts_with("# schema: lightstore.trajectory.v1\nt,z,re_e,im_e,abs_sigma12,abs_sigma13,sigma33\n"));
    assert!(std::fs::read_to_string(a.join("boundary.csv")).unwrap().starts_with("# schema: lightstore.boundary.v1\n"));
    let metrics = json(&a.join("metrics.json"));
    assert_eq!(metrics["schema"], "lightstore.metrics.v1");
    let eff = metrics["metrics"]["efficiency"].as_f64().unwrap();
    assert!(eff > 0.1 && eff < 1.0, "{eff}");
    for f in ["trajectory.csv", "boundary.csv", "metrics.json"] {
        assert_eq!(std::fs::read(a.join(f)).unwrap(), std::fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn annotated_example_config_parses() {
    let tmp = TempDir::new().unwrap();
    let out = out_dir(&tmp);
    let cfg = repo_file("config/lightstore.example.toml");
    let r = lightstore(&["feasibility", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(0), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(String::from_utf8_lossy(&r.stdout).contains("verdict: PASS"));
}

#[test]
fn config_errors_have_distinct_exit_codes() {
    let tmp = TempDir::new().unwrap();
    let out = out_dir(&tmp);
    let o = out.to_str().unwrap();
    let missing = tmp.path().join("nope.toml");
    let r = lightstore(&["feasibility", "--config", missing.to_str().unwrap(), "--output", o]);
    assert_eq!(r.status.code(), Some(exit::MISSING_FILE as i32));

    let cases = [
        ("[material\n", exit::SYNTAX),
        ("[material]\nwidth = 3\n", exit::UNKNOWN_KEY),
        ("[material]\nw12_hz = 1e6\nw13_hz = 1e3\n", exit::INVALID),
    ];
    for (text, code) in cases {
        let cfg = write_config(&tmp, text);
        let r = lightstore(&["feasibility", "--config", &cfg, "--output", o]);
        assert_eq!(r.status.code(), Some(code as i32), "{text}: {}", String::from_utf8_lossy(&r.stderr));
    }
    let r = lightstore(&["feasibility", "--output", o, "--format", "xml"]);
    assert_eq!(r.status.code(), Some(exit::INVALID as i32));
    assert!(!out.exists());
}

#[test]
fn failed_run_leaves_no_partial_output() {
    let tmp = TempDir::new().unwrap();
    // dt far too coarse for the optical line
    let text = GAS_LIMIT.replace("w13_rad_s = 0.0", "w13_rad_s = 100.0").replace("dt_s = 0.005", "dt_s = 0.5");
    let cfg = write_config(&tmp, &text);
    let out = out_dir(&tmp);
    let r = lightstore(&["simulate-full", "--config", &cfg, "--output", out.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(exit::NUMERICAL as i32), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(!out.exists());
}
