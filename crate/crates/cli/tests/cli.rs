use std::path::Path;
use std::process::Command;

use sojourn_cli::{run, ResultTable, Scenario};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sojourn"))
}

fn scenarios() -> &'static Path {
    Path::new(concat!(env!("CARGO_MANIFEST_DIR"), "/../../scenarios"))
}

const SMALL_SWEEP: &str = r#"
schema_version = 1
kind = "timescale_sweep"

[sweep]
parameter = "energy"
values = [0.5, 1.0, 2.0, 2.5, 3.0]

[output]
path = "sweep.csv"

[timescale]
closed_form = true

[timescale.profile]
segments = [{ length = 0.5, v_real = 0.3 }, { length = 1.0, v_real = 2.0 }, { length = 0.7, v_real = -0.4 }]
clock_region = [1, 2]
"#;

#[test]
fn worker_count_does_not_change_rows() {
    let s = Scenario::from_toml(SMALL_SWEEP).unwrap();
    let one = run(&s, 1).unwrap().table;
    let four = run(&s, 4).unwrap().table;
    assert_eq!(one.to_csv().unwrap(), four.to_csv().unwrap());
    assert_eq!(one.to_json(), four.to_json());
}

#[test]
fn run_writes_relative_to_scenario_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sweep.toml");
    std::fs::write(&file, SMALL_SWEEP).unwrap();
    let out = bin().arg("run").arg(&file).args(["--workers", "2"]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table = ResultTable::read(&dir.path().join("sweep.csv")).unwrap();
    assert_eq!(table.rows.len(), 5);
    let sojourn = table.values("sojourn").unwrap();
    let closed = table.values("sojourn_closed_form").unwrap();
    for (a, b) in sojourn.iter().zip(&closed) {
        let (Some(a), Some(b)) = (a, b) else { continue };
        assert!((a - b).abs() <= 1e-4 * b.abs(), "{a} vs {b}");
    }
    // barrier top: Büttiker-Landauer entry is absent and explained
    let row = &table.rows[2];
    assert!(row.reason.as_deref().unwrap_or("").contains("bl"), "{row:?}");
}

#[test]
fn compare_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("sweep.toml");
    std::fs::write(&file, SMALL_SWEEP).unwrap();
    assert!(bin().arg("run").arg(&file).output().unwrap().status.success());
    let a = dir.path().join("sweep.csv");

    let same = bin().arg("compare").arg(&a).arg(&a).output().unwrap().status;
    assert_eq!(same.code(), Some(0));

    let text = std::fs::read_to_string(&a).unwrap();
    let mut table = ResultTable::from_csv(text.as_bytes()).unwrap();
    let col = table.column("wigner").unwrap();
    table.rows[0].values[col] = table.rows[0].values[col].map(|v| v * (1.0 + 1e-3));
    let b = dir.path().join("perturbed.csv");
    std::fs::write(&b, table.to_csv().unwrap()).unwrap();

    let strict = bin().arg("compare").arg(&b).arg(&a).output().unwrap().status;
    assert_eq!(strict.code(), Some(1));
    let loose = bin()
        .arg("compare")
        .arg(&b)
        .arg(&a)
        .args(["--tol", "default=1e-12,wigner=1e-2"])
        .output()
        .unwrap()
        .status;
    assert_eq!(loose.code(), Some(0));
    let paired = bin()
        .arg("compare")
        .arg(&a)
        .arg(&a)
        .args(["--pair", "sojourn=sojourn_closed_form", "--tol", "1e-4"])
        .output()
        .unwrap()
        .status;
    assert_eq!(paired.code(), Some(0));
}

#[test]
fn config_errors_exit_two_with_json() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.toml");
    std::fs::write(&file, SMALL_SWEEP.replace("v_real = 2.0", "v_reel = 2.0")).unwrap();
    let out = bin().arg("validate").arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    let diag: serde_json::Value = serde_json::from_str(stderr.trim()).unwrap();
    assert_eq!(diag["error"], "config");
    assert!(diag["message"].as_str().unwrap().contains("v_reel"));

    let missing = bin().arg("run").arg(dir.path().join("nope.toml")).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn shipped_scenarios_validate() {
    for entry in std::fs::read_dir(scenarios()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "toml") {
            let out = bin().arg("validate").arg(&path).output().unwrap();
            assert!(
                out.status.success(),
                "{}: {}",
                path.display(),
                String::from_utf8_lossy(&out.stderr)
            );
        }
    }
}

#[test]
fn barrier_sweep_has_every_method_column() {
    let s = Scenario::load(&scenarios().join("barrier.toml")).unwrap();
    let table = run(&s, 2).unwrap().table;
    assert_eq!(table.rows.len(), 40);
    for label in [
        "wigner",
        "dwell",
        "bl",
        "larmor_y",
        "larmor_z",
        "larmor_pythagorean",
        "imag_clock",
        "sojourn",
    ] {
        let col = table.values(label).unwrap();
        assert!(col.iter().filter(|v| v.is_some()).count() >= 39, "{label}");
    }
    // totality: every row is present, gaps carry a reason
    for row in &table.rows {
        if row.values.iter().any(Option::is_none) {
            assert!(row.reason.is_some());
        }
    }
}
