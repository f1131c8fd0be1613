//! Command-level examples run against the built binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use kissing_core::oracle::fixture;
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_kissing");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("JSON output")
}

fn write_witness(dir: &Path, name: &str, d: usize, k: i64, expected: &str) -> String {
    let f = fixture(d, k).expect("catalog fixture");
    let body = json!({ "P": f.pair.p, "Q": f.pair.q, "expected_inv_sq": expected });
    let path = dir.join(name);
    fs::write(&path, body.to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn epsilon_3_4_json() {
    let o = run(&["epsilon", "-d", "3", "-k", "4", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_of(&o);
    assert_eq!(v["command"], "epsilon");
    let r = &v["result"];
    assert_eq!(r["inv_eps_sq"], "1050");
    assert_eq!(r["certified"], true);
    // segments: two vertices on each side
    assert_eq!(r["witness"]["P"].as_array().unwrap().len(), 2);
    assert_eq!(r["witness"]["Q"].as_array().unwrap().len(), 2);
    for key in ["subsets", "singular", "zero"] {
        assert!(r["stats"][key].is_string(), "{key}");
    }
    assert!(r["stats"]["seconds"].is_f64());
    assert!((r["eps_approx"].as_f64().unwrap() - 1050f64.sqrt().recip()).abs() < 1e-12);
}

#[test]
fn epsilon_2_7_text() {
    let o = run(&["epsilon", "-d", "2", "-k", "7"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1/eps^2 = 85\n"), "{}", stdout(&o));
}

#[test]
fn capped_run_is_a_bound() {
    let o = run(&[
        "epsilon",
        "-d",
        "3",
        "-k",
        "1",
        "--max-subsets",
        "5",
        "--json",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let r = &json_of(&o)["result"];
    assert_eq!(r["certified"], false);
    assert_eq!(r["complete"], false);
    assert_eq!(r["stats"]["subsets"], "5");
}

#[test]
fn naive_kernel_flag() {
    let a = run(&["epsilon", "-d", "3", "-k", "2", "--json", "--naive-kernel"]);
    let b = run(&[
        "epsilon", "-d", "3", "-k", "2", "--json", "--kernel", "gram",
    ]);
    assert_eq!(json_of(&a)["inputs"]["kernel"], "gram");
    assert_eq!(json_of(&a)["result"]["inv_eps_sq"], "50");
    assert_eq!(
        json_of(&a)["result"]["witness"],
        json_of(&b)["result"]["witness"]
    );
}

#[test]
fn resumed_run_matches_a_single_run() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let cp = cp.to_str().unwrap();
    let base = [
        "epsilon",
        "-d",
        "3",
        "-k",
        "3",
        "--json",
        "--checkpoint-interval",
        "7000",
    ];

    let mut first = base.to_vec();
    first.extend(["--resume", cp, "--max-subsets", "50000"]);
    let o = run(&first);
    assert_eq!(o.status.code(), Some(2));
    let saved: Value = serde_json::from_str(&fs::read_to_string(cp).unwrap()).unwrap();
    assert_eq!(saved["next_index"], 50000);

    let mut second = base.to_vec();
    second.extend(["--resume", cp]);
    let resumed = run(&second);
    assert_eq!(resumed.status.code(), Some(0));
    let whole = run(&base);
    let (r, w) = (json_of(&resumed), json_of(&whole));
    assert_eq!(r["inputs"]["resumed_at"], "50000");
    for key in ["inv_eps_sq", "certified", "witness"] {
        assert_eq!(r["result"][key], w["result"][key], "{key}");
    }
    assert_eq!(
        r["result"]["stats"]["subsets"],
        w["result"]["stats"]["subsets"]
    );
}

#[test]
fn resume_rejects_another_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let cp = cp.to_str().unwrap();
    let o = run(&[
        "epsilon",
        "-d",
        "3",
        "-k",
        "2",
        "--resume",
        cp,
        "--max-subsets",
        "10",
        "--checkpoint-interval",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["epsilon", "-d", "3", "-k", "3", "--resume", cp]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rows_counts() {
    let count = |args: &[&str]| stdout(&run(args)).trim().to_string();
    assert_eq!(count(&["rows", "-d", "5", "-k", "2"]), "300");
    assert_eq!(count(&["rows", "-d", "6", "-k", "3"]), "6971");
    assert_eq!(
        count(&["rows", "-d", "3", "-k", "1", "--split", "0,2"]),
        count(&["rows", "-d", "3", "-k", "1", "--split", "1,1"])
    );
}

#[test]
fn rows_listing() {
    let text = stdout(&run(&["rows", "-d", "3", "-k", "1", "--list"]));
    assert_eq!(text.lines().count(), 7);
    let v = json_of(&run(&[
        "rows", "-d", "3", "-k", "1", "--format", "json", "--list",
    ]));
    let rows = v["result"]["rows"].as_array().unwrap();
    assert_eq!(v["result"]["count"], 6);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[0]["entries"].as_array().unwrap().len(), 3);
    assert!(rows[0]["provenance"].is_object());
}

#[test]
fn rows_bad_split_is_a_usage_error() {
    assert_eq!(
        run(&["rows", "-d", "3", "-k", "1", "--split", "1,2"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(
        run(&["rows", "-d", "3", "-k", "1", "--split", "x"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn verify_catalog_files() {
    let dir = tempfile::tempdir().unwrap();
    let f42 = write_witness(dir.path(), "w42.json", 4, 2, "452");
    let o = run(&["verify", &f42, "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let r = &json_of(&o)["result"];
    assert_eq!(r["dist_sq"], "1/452");
    assert_eq!(r["match"], true);

    let f51 = write_witness(dir.path(), "w51.json", 5, 1, "58");
    let o = run(&["verify", &f51]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("1/dist^2 = 58"));

    let bad = write_witness(dir.path(), "bad.json", 4, 2, "451");
    assert_eq!(run(&["verify", &bad]).status.code(), Some(1));
}

#[test]
fn verify_malformed_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    fs::write(&path, "{\"P\": [[0,0]], ").unwrap();
    assert_eq!(
        run(&["verify", path.to_str().unwrap()]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["verify", "/nonexistent/w.json"]).status.code(),
        Some(3)
    );
}

#[test]
fn oracle_small_cell() {
    let v = json_of(&run(&["oracle", "-d", "2", "-k", "2", "--json"]));
    assert_eq!(v["result"]["inv_eps_sq"], "5");
    let o = run(&["oracle", "-d", "3", "-k", "4"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn closedform_values() {
    let v = json_of(&run(&["closedform", "-d", "2", "-k", "7", "--json"]));
    let values = v["result"].as_array().unwrap();
    assert!(values.iter().all(|x| x["inv_sq"] == "85"));
    let v = json_of(&run(&["closedform", "-d", "3", "-k", "4", "--json"]));
    assert_eq!(v["result"][0]["name"], "segment_upper_bound");
    assert_eq!(v["result"][0]["inv_sq"], "1050");
    assert_eq!(v["result"].as_array().unwrap().len(), 1);
}

#[test]
fn table_2_passes() {
    let o = run(&["table", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,k,published,computed,status"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 28);
    assert!(rows.iter().all(|l| l.ends_with(",PASS")));
}

#[test]
fn table_1_standard_budget() {
    let o = run(&["table", "1", "--budget", "standard"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let passed: Vec<&str> = text.lines().filter(|l| l.ends_with(",PASS")).collect();
    let expected = ["3,1,", "3,2,", "3,3,", "3,4,", "4,1,", "4,2,", "5,1,"];
    assert_eq!(passed.len(), expected.len());
    for (line, prefix) in passed.iter().zip(expected) {
        assert!(line.starts_with(prefix), "{line}");
    }
    assert_eq!(text.lines().filter(|l| l.ends_with(",SKIP")).count(), 6);
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["epsilon", "-d", "3"]).status.code(), Some(3));
    assert_eq!(
        run(&["epsilon", "-d", "1", "-k", "1"]).status.code(),
        Some(3)
    );
    assert_eq!(
        run(&["epsilon", "-d", "3", "-k", "0"]).status.code(),
        Some(3)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
