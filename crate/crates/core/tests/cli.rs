use std::path::Path;
use std::process::Command;

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_conley-box"))
}

fn write_config(dir: &Path, name: &str, cfg: &Value) -> std::path::PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string_pretty(cfg).unwrap()).unwrap();
    path
}

fn small_translation(out: &Path) -> Value {
    json!({
        "grid": {"bounds": [[-2, 2], [-2, 2]], "resolution": [8, 8]},
        "system": {"name": "translation2d"},
        "epsilon": {"form": {"constant": 0.05}},
        "chain": {"T": 1, "t_max": 2, "tau": 1, "H": 4},
        "omega": {"count": 3, "seed": 9, "window_radius": 4},
        "outputs": {"dir": out, "pgm": true, "svg": true, "edges_csv": true}
    })
}

fn without_timings(text: &str) -> Value {
    let mut v: Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timings");
    v
}

#[test]
fn run_writes_artifacts_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    let cfg_a = write_config(dir.path(), "a.json", &small_translation(&out_a));
    let cfg_b = write_config(dir.path(), "b.json", &small_translation(&out_b));
    assert_eq!(bin().args(["run"]).arg(&cfg_a).status().unwrap().code(), Some(0));
    assert_eq!(
        bin().args(["run"]).arg(&cfg_b).env("CONLEY_BOX_WORKERS", "1").status().unwrap().code(),
        Some(0)
    );

    let ra = std::fs::read_to_string(out_a.join("report.json")).unwrap();
    let rb = std::fs::read_to_string(out_b.join("report.json")).unwrap();
    let (mut va, mut vb) = (without_timings(&ra), without_timings(&rb));
    // the output directory is echoed with the configuration
    va["config"]["outputs"]["dir"] = Value::Null;
    vb["config"]["outputs"]["dir"] = Value::Null;
    assert_eq!(va, vb);
    assert_eq!(va["schema"], "conley-box/report/v1");

    let digest = va["omegas"][0]["omega_digest"].as_str().unwrap().to_string();
    for f in ["boxes", "edges"] {
        assert!(out_a.join(format!("{f}_{digest}.csv")).exists(), "{f}");
    }
    assert!(out_a.join(format!("edges_{digest}.json")).exists());
    let pgm = std::fs::read(out_a.join(format!("classes_{digest}.pgm"))).unwrap();
    assert!(pgm.starts_with(b"P5\n8 8\n255\n"));
    assert_eq!(pgm.len(), b"P5\n8 8\n255\n".len() + 64);
    let csv = std::fs::read_to_string(out_a.join(format!("boxes_{digest}.csv"))).unwrap();
    assert_eq!(csv.lines().count(), 65);

    let rendered = dir.path().join("again.pgm");
    let status = bin()
        .arg("render")
        .arg(out_a.join("report.json"))
        .args(["--omega", &digest, "--out"])
        .arg(&rendered)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert_eq!(std::fs::read(rendered).unwrap(), pgm);
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_translation(&dir.path().join("o"));
    cfg["chain"]["T"] = json!(3);
    let path = write_config(dir.path(), "bad.json", &cfg);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("t_max"));

    cfg["chain"]["T"] = json!(1);
    cfg["system"]["name"] = json!("lorenz96");
    let path = write_config(dir.path(), "bad2.json", &cfg);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("translation2d"));

    let out = bin().arg("run").arg(dir.path().join("missing.json")).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn invariant_breach_exits_with_one() {
    // with T = 1 the bistable graph picks up spurious recurrence near the repeller
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("o");
    let cfg = json!({
        "grid": {"bounds": [[-2, 2]], "resolution": [64]},
        "system": {"name": "bistable1d", "c": 0.5},
        "epsilon": {"form": {"constant": 0.01}},
        "chain": {"T": 1, "t_max": 4, "tau": 1, "H": 20},
        "omega": {"count": 1, "seed": 1, "window_radius": 20},
        "outputs": {"dir": out_dir}
    });
    let path = write_config(dir.path(), "c.json", &cfg);
    let out = bin().arg("run").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    let failure: Value = serde_json::from_str(&std::fs::read_to_string(out_dir.join("failure.json")).unwrap()).unwrap();
    assert_eq!(failure["schema"], "conley-box/failure/v1");
    assert!(failure["failures"][0]["invariants"]["basin_gap_meets_cr"].as_u64().unwrap() > 0);
}

#[test]
fn verify_passes_on_clean_bistable_setup() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = json!({
        "grid": {"bounds": [[-2, 2]], "resolution": [64]},
        "system": {"name": "bistable1d", "c": 0.5},
        "epsilon": {"form": {"constant": 0.01}},
        "chain": {"T": 3, "t_max": 6, "tau": 1, "H": 20},
        "omega": {"count": 1, "seed": 1, "window_radius": 20}
    });
    let path = write_config(dir.path(), "v.json", &cfg);
    let out = bin().arg("verify").arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["aggregate"]["all_checks_hold"], true);
}
