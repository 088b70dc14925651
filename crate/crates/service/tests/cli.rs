use std::path::PathBuf;
use std::process::Command;

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn run(args: &[&str]) -> (bool, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_facetjoint"))
        .args(args)
        .output()
        .unwrap();
    (
        out.status.success(),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn query_prints_ranked_json() {
    let corpus = fixture("dialogue.tsv");
    let (ok, out, _) = run(&[
        "query",
        "--corpus",
        corpus.to_str().unwrap(),
        "style",
        "clothes",
    ]);
    assert!(ok);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "ok");
    assert_eq!(v["results"][0]["speaker_id"], "linus");
}

#[test]
fn collapse_needs_a_choice_unless_automatic() {
    let corpus = fixture("fashion.tsv");
    let c = corpus.to_str().unwrap();
    let (_, out, _) = run(&["query", "--corpus", c, "fashion", "style"]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "collapse_required");

    let (_, out, _) = run(&[
        "query",
        "--corpus",
        c,
        "--choose",
        "women-style",
        "fashion",
        "style",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"][0]["speaker_id"], "women-style");

    let (_, out, _) = run(&[
        "query",
        "--corpus",
        c,
        "--auto-collapse",
        "fashion",
        "style",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["status"], "ok");
}

#[test]
fn replay_is_deterministic() {
    let corpus = fixture("dialogue.tsv");
    let script = fixture("dialogue.script");
    let args = [
        "replay",
        "--corpus",
        corpus.to_str().unwrap(),
        "--script",
        script.to_str().unwrap(),
    ];
    let (ok, first, _) = run(&args);
    assert!(ok);
    let (_, second, _) = run(&args);
    assert_eq!(first, second);
    assert_eq!(first.lines().count(), 3);
}

#[test]
fn stats_from_log_file() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    let lines = [
        r#"{"kind":"query","reader_id":"u1","input":"style clothes","tags":["style","clothes"]}"#,
        r#"{"kind":"query","reader_id":"u2","input":"tie","tags":["tie"]}"#,
        r#"{"kind":"query","reader_id":"u2","input":"tie","tags":["tie"]}"#,
    ];
    std::fs::write(&log, lines.join("\n")).unwrap();
    let (ok, out, _) = run(&["stats", "--log", log.to_str().unwrap()]);
    assert!(ok);
    assert!(out.contains("Avg. # of queries/user"));
    assert!(out.contains("1.50"));
}

#[test]
fn eval_reports_each_query() {
    let (ok, out, _) = run(&[
        "eval",
        "--corpus",
        fixture("dialogue.tsv").to_str().unwrap(),
        "--judgments",
        fixture("judgments.tsv").to_str().unwrap(),
    ]);
    assert!(ok);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["queries"].as_array().unwrap().len(), 3);
}

#[test]
fn bad_input_exits_nonzero() {
    let (ok, _, err) = run(&["query", "--corpus", "/nonexistent/corpus.tsv", "x"]);
    assert!(!ok);
    assert!(err.starts_with("error:"));
}
