use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn qsync(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qsync"))
        .args(args)
        .current_dir(dir)
        .env_remove("QSYNC_OUT")
        .output()
        .unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn data_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut v: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap())
        .filter(|e| e.file_name() != "manifest.json")
        .map(|e| (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap()))
        .collect();
    v.sort();
    v
}

const SHORT_OPTOMECH: &str = "scenario = \"fig-optomech\"\n[optomech]\nt_end = 120.0\n";

#[test]
fn invalid_key_is_schema_error_without_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "bad.toml", "scenario = \"fig-optomech\"\n[optomech.model]\nkapa = 0.1\n");
    let o = qsync(tmp.path(), &["run", cfg.to_str().unwrap(), "--out", "out"]);
    assert_eq!(o.status.code(), Some(2));
    let err: Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "schema");
    assert!(err["message"].as_str().unwrap().contains("kapa"));
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn optomech_run_census_and_repeatability() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "o.toml", SHORT_OPTOMECH);
    for out in ["a", "b"] {
        let o = qsync(tmp.path(), &["run", cfg.to_str().unwrap(), "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (data_files(&tmp.path().join("a")), data_files(&tmp.path().join("b")));
    assert_eq!(a, b);
    let names: Vec<&str> = a.iter().map(|f| f.0.as_str()).collect();
    assert!(names.contains(&"mean_field.csv") && names.contains(&"covariance.csv"));
    assert_eq!(names.iter().filter(|n| n.starts_with("indicator_")).count(), 8);
    let m = manifest(&tmp.path().join("a"));
    assert_eq!(m["status"], "complete");
    assert_eq!(m["outputs"].as_array().unwrap().len(), a.len());
    for entry in m["outputs"].as_array().unwrap() {
        let file = entry["file"].as_str().unwrap();
        let body = fs::read(tmp.path().join("a").join(file)).unwrap();
        assert_eq!(entry["bytes"].as_u64().unwrap() as usize, body.len());
        assert_eq!(entry["sha256"].as_str().unwrap().len(), 64);
    }
    let csv = String::from_utf8(a.iter().find(|f| f.0 == "mean_field.csv").unwrap().1.clone()).unwrap();
    assert!(csv.starts_with("t,re_a1,im_a1,") && !csv.contains('\r'));
}

#[test]
fn spin_sweep_independent_of_jobs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "s.toml", "scenario = \"fig-spin-common\"\n");
    for (jobs, out) in [("1", "j1"), ("8", "j8")] {
        let o = qsync(tmp.path(), &["sweep", cfg.to_str().unwrap(), "--jobs", jobs, "--out", out]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let (a, b) = (data_files(&tmp.path().join("j1")), data_files(&tmp.path().join("j8")));
    assert_eq!(a, b);
    let csv = String::from_utf8(a[0].1.clone()).unwrap();
    assert_eq!(csv.lines().count(), 401);
    assert!(csv.starts_with("omega2,lambda,C,Z_I,MI,E,status\n"));
}

#[test]
fn degenerate_cell_is_flagged_and_others_complete() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "d.toml",
        "scenario = \"fig-spin-local\"\n[spins.settings]\nt_eval = 20.0\nz_until = 20.0\nmi_at = 20.0\n\
         [spins.sweep.omega2]\nlo = 0.9\nhi = 1.1\nn = 3\n[spins.sweep.lambda]\nlo = 0.0\nhi = 0.1\nn = 2\n",
    );
    let o = qsync(tmp.path(), &["sweep", cfg.to_str().unwrap(), "--out", "out"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("out/diagram.csv")).unwrap();
    let rows: Vec<&str> = csv.lines().skip(1).collect();
    assert_eq!(rows.len(), 6);
    let degenerate: Vec<&&str> = rows.iter().filter(|r| r.ends_with("flagged:degenerate spectrum")).collect();
    assert_eq!(degenerate.len(), 1);
    assert!(degenerate[0].starts_with("1,0,nan,"));
    for r in rows.iter().filter(|r| !r.ends_with("flagged:degenerate spectrum")) {
        assert!(!r.contains("nan") && !r.contains("failed"), "{r}");
    }
    let m = manifest(&tmp.path().join("out"));
    assert!(m["warnings"].as_array().unwrap().iter().any(|w| w.as_str().unwrap().contains("degenerate spectrum")));
}

#[test]
fn kuramoto_sweep_reports_kc() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "k.toml",
        "scenario = \"kuramoto-kc\"\n[kuramoto.model]\nn = 300\nhorizon = 60.0\n[kuramoto.ks]\nlo = 0.2\nhi = 2.4\nn = 12\n",
    );
    let o = qsync(tmp.path(), &["sweep", cfg.to_str().unwrap(), "--out", "out", "--seed", "5"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(tmp.path().join("out/kc.csv")).unwrap();
    assert_eq!(csv.lines().count(), 13);
    let m = manifest(&tmp.path().join("out"));
    let kc = m["results"]["kc"].as_f64().unwrap();
    assert!((0.6..1.5).contains(&kc), "{kc}");
    assert_eq!(m["seed"], 5);
}

#[test]
fn instability_exits_3_with_partial_outputs() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(
        tmp.path(),
        "u.toml",
        "scenario = \"fig-optomech\"\n[optomech]\nt_end = 200.0\n[optomech.model]\ndrive = 1e5\nblowup = 1e4\n",
    );
    let o = qsync(tmp.path(), &["run", cfg.to_str().unwrap(), "--out", "out"]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let m = manifest(&tmp.path().join("out"));
    assert_eq!(m["status"], "partial");
    assert!(m["results"]["t_reached"].as_f64().unwrap() < 200.0);
    assert!(tmp.path().join("out/mean_field.csv").exists());
}

#[test]
fn output_directory_precedence() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "o.toml", &format!("out = \"from_config\"\n{SHORT_OPTOMECH}"));
    let run = |env: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_qsync"));
        c.current_dir(tmp.path()).env_remove("QSYNC_OUT").args(["run", cfg.to_str().unwrap()]);
        if let Some(e) = env {
            c.env("QSYNC_OUT", e);
        }
        if let Some(f) = flag {
            c.args(["--out", f]);
        }
        assert!(c.output().unwrap().status.success());
    };
    run(None, None);
    assert!(tmp.path().join("from_config/manifest.json").exists());
    run(Some("from_env"), None);
    assert!(tmp.path().join("from_env/manifest.json").exists());
    run(Some("from_env2"), Some("from_flag"));
    assert!(tmp.path().join("from_flag/manifest.json").exists());
    assert!(!tmp.path().join("from_env2").exists());
}

#[test]
fn missing_config_is_io_error() {
    let tmp = TempDir::new().unwrap();
    let o = qsync(tmp.path(), &["run", "nope.toml"]);
    assert_eq!(o.status.code(), Some(4));
    let err: Value = serde_json::from_slice(o.stderr.trim_ascii()).unwrap();
    assert_eq!(err["error"], "io");
}

#[test]
fn sweep_requires_sweep_block() {
    let tmp = TempDir::new().unwrap();
    let cfg = write(tmp.path(), "o.toml", SHORT_OPTOMECH);
    assert_eq!(qsync(tmp.path(), &["sweep", cfg.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn list_and_defaults() {
    let tmp = TempDir::new().unwrap();
    let o = qsync(tmp.path(), &["list-scenarios"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    let d = qsync(tmp.path(), &["defaults", "custom", "--model", "kuramoto"]);
    assert!(d.status.success());
    let cfg = write(tmp.path(), "c.toml", &String::from_utf8(d.stdout).unwrap().replace("n = 2000", "n = 50"));
    let o = qsync(tmp.path(), &["run", cfg.to_str().unwrap(), "--out", "c"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(tmp.path().join("c/order.csv").exists());
}

#[test]
fn custom_spin_and_tongue_points() {
    let tmp = TempDir::new().unwrap();
    let spin = write(tmp.path(), "s.toml", "scenario = \"custom\"\nmodel = \"spins\"\n[spins.model]\nomega2 = 1.2\n");
    assert!(qsync(tmp.path(), &["run", spin.to_str().unwrap(), "--out", "s"]).status.success());
    let traj = fs::read_to_string(tmp.path().join("s/trajectory.csv")).unwrap();
    assert!(traj.starts_with("t,sx1,sx2,Z\n"));
    assert!(manifest(&tmp.path().join("s"))["results"]["C"].is_number());

    let tongue = write(tmp.path(), "t.toml", "scenario = \"custom\"\nmodel = \"tongue\"\n[tongue.model]\nt_eval = 30.0\nwindow = 10.0\n");
    assert!(qsync(tmp.path(), &["run", tongue.to_str().unwrap(), "--out", "t"]).status.success());
    assert!(tmp.path().join("t/covariance.csv").exists());
}
