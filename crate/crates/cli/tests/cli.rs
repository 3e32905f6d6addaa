use std::path::Path;
use std::process::{Command, Output};

fn gerth(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gerth")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn scan_writes_report_and_per_field_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = gerth(&[
        "scan",
        "--max-conductor",
        "2000",
        "--kmax",
        "2",
        "--shards",
        "3",
        "--out",
        out.to_str().unwrap(),
        "--per-field",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["max_conductor"], 2000);
    assert!(v["empirical_moment"].get("2").is_some());
    assert!(v["empirical_moment"].get("3").is_none());
    let csv = std::fs::read_to_string(dir.path().join("report.fields.csv")).unwrap();
    assert_eq!(csv.lines().count() as u64 - 1, v["field_count"].as_u64().unwrap());
}

#[test]
fn scan_with_checkpoint_completes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let cp = dir.path().join("r.ckpt");
    let args = [
        "scan",
        "--max-conductor",
        "5000",
        "--shards",
        "2",
        "--out",
        out.to_str().unwrap(),
        "--checkpoint",
        cp.to_str().unwrap(),
    ];
    assert!(gerth(&args).status.success());
    assert!(cp.exists());
    let first = std::fs::read(&out).unwrap();
    assert!(gerth(&args).status.success());
    assert_eq!(std::fs::read(&out).unwrap(), first);
}

#[test]
fn verify_suites_pass() {
    for args in [
        &["verify", "identity", "--max-d", "100"][..],
        &["verify", "combinatorics", "--p", "3", "--k", "2"],
        &["verify", "reciprocity", "--pairs", "200"],
    ] {
        let o = gerth(args);
        assert!(o.status.success(), "{args:?}: {}", stdout(&o));
        assert!(stdout(&o).contains(", 0 failed"));
    }
}

#[test]
fn combinatorics_reports_counts() {
    let o = gerth(&["combinatorics", "--p", "2", "--k", "2", "--enumerate"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["maximal_unlinked_sets"], "11");
    assert_eq!(v["brute_enumeration"], 11);
    assert_eq!(v["methods_agree"], true);
}

#[test]
fn predict_emits_densities() {
    let o = gerth(&["predict", "--p", "3", "--kmax", "2", "--smax", "12"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let d0 = v["density"]["0"].as_f64().unwrap();
    assert!((d0 - 0.84019).abs() < 1e-5);
    assert_eq!(v["subspace_difference"]["1"], "4");
}

#[test]
fn crosscheck_against_reference_table() {
    let table = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/rk3_reference.csv");
    let o = gerth(&["crosscheck", "--table", table.to_str().unwrap(), "--max-conductor", "1000"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
}

#[test]
fn crosscheck_failure_exits_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("t.csv");
    std::fs::write(&table, "conductor,field_index,rk3_class_group\n7,0,2\n").unwrap();
    let o = gerth(&["crosscheck", "--table", table.to_str().unwrap(), "--max-conductor", "7"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_arguments_are_rejected() {
    assert!(!gerth(&["scan", "--max-conductor", "5", "--out", "/tmp/never.json"]).status.success());
    assert!(!gerth(&["predict", "--p", "4"]).status.success());
}
