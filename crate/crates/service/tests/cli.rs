use std::fs;
use std::process::Command;

use insights_core::store::Store;
use insights_core::synth;
use serde_json::{json, Value};

fn insights(args: &[&str], dir: &std::path::Path) -> Vec<u8> {
    let out = Command::new(env!("CARGO_BIN_EXE_insights"))
        .args(args)
        .env("INSIGHTS_DATA_DIR", dir)
        .output()
        .expect("binary runs");
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out.stdout
}

#[test]
fn ingest_link_query_export_topics() {
    let tmp = tempfile::tempdir().unwrap();
    let data = tmp.path().join("data");
    let input = tmp.path().join("corpus.jsonl");
    fs::write(&input, synth::jsonl(200, 5)).unwrap();

    let report: Value = serde_json::from_slice(&insights(&["ingest", "--input", input.to_str().unwrap()], &data)).unwrap();
    assert_eq!(report["records_rejected"], 0);
    assert_eq!(report["records_accepted"], 200 + synth::AUTHORS.len() as u64);

    let titles: Vec<(String, String)> =
        Store::open(&data).unwrap().snapshot().publications().map(|p| (p.id.clone(), p.title.clone())).collect();
    let refs: String = titles
        .windows(2)
        .map(|w| format!("{}\n", json!({"id": w[1].0, "references": [w[0].1]})))
        .collect();
    let refs_path = tmp.path().join("refs.jsonl");
    fs::write(&refs_path, refs).unwrap();
    let summary: Value =
        serde_json::from_slice(&insights(&["link", "--references", refs_path.to_str().unwrap()], &data)).unwrap();
    assert_eq!(summary["total_references"], 199);
    assert!(summary["edges"].as_u64().unwrap() >= 190);

    let bins: Value = serde_json::from_slice(&insights(&["query", "bins"], &data)).unwrap();
    let total: u64 = bins.as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(total, 200);

    let request = r#"{"dimension":"venue","metric":"citations","k":5}"#;
    let out = tmp.path().join("top.csv");
    insights(&["export", "top_k", "--request", request, "--output", out.to_str().unwrap()], &data);
    let text = fs::read_to_string(&out).unwrap();
    assert!(text.starts_with("name,label,value\r\n"));
    assert_eq!(text.lines().count(), 6);

    let topics: Value = serde_json::from_slice(&insights(&["topics", "--k", "3", "--seed", "2"], &data)).unwrap();
    assert_eq!(topics["k"], 3);
    assert_eq!(topics["documents"], 200);
}

#[test]
fn bad_requests_fail() {
    let tmp = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_insights"))
        .args(["query", "top_k", "--request", r#"{"k":0}"#])
        .env("INSIGHTS_DATA_DIR", tmp.path())
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("k must be at least 1"));
}
