use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lingomix(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lingomix"))
        .args(args)
        .current_dir(cwd)
        .env("LINGOMIX_LOG", "warn")
        .output()
        .expect("binary runs")
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn plan_writes_plan_and_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = lingomix(
        &["plan", "--budget", "766000", "--english", "0.5", "--setup", "L100", "--dist", "uniform", "--out", "plan"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let plan = json(&dir.path().join("plan/plan.json"));
    assert_eq!(plan["english"], 383000);
    let prov = json(&dir.path().join("plan/provenance.json"));
    assert_eq!(prov["tool"], "lingomix");
    assert!(dir.path().join("plan/run.json").is_file());

    // replaying the recorded manifest gives identical bytes
    let first = fs::read(dir.path().join("plan/plan.json")).unwrap();
    fs::copy(dir.path().join("plan/run.json"), dir.path().join("run.json")).unwrap();
    let out = lingomix(&["--manifest", "run.json", "--out", "again.json"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(fs::read(dir.path().join("again.json")).unwrap(), first);
    assert!(dir.path().join("again.provenance.json").is_file());
}

#[test]
fn bad_fraction_exits_2_without_output() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("m.json"),
        r#"{"command":"plan","out":"p","plan":{"budget":100,"english_fraction":1.3,"setup":"l100"}}"#,
    )
    .unwrap();
    let out = lingomix(&["--manifest", "m.json"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("p").exists());
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1, "{names:?}");
    // errors are logged as JSON on stderr
    let stderr = String::from_utf8_lossy(&out.stderr);
    let line = stderr.lines().last().unwrap();
    let v: Value = serde_json::from_str(line).unwrap();
    assert_eq!(v["level"], "ERROR");
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(lingomix(&["plan", "--bogus"], dir.path()).status.code(), Some(2));
    assert_eq!(lingomix(&[], dir.path()).status.code(), Some(2));
    assert_eq!(lingomix(&["--help"], dir.path()).status.code(), Some(0));
}

#[test]
fn refuses_to_replace_foreign_directory() {
    let dir = tempfile::tempdir().unwrap();
    fs::create_dir(dir.path().join("mine")).unwrap();
    fs::write(dir.path().join("mine/keep.txt"), "x").unwrap();
    let out = lingomix(
        &["plan", "--budget", "10", "--english", "0", "--setup", "t5", "--out", "mine"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(dir.path().join("mine/keep.txt").is_file());
}

#[test]
fn ocr_translate_score_report_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::create_dir(d.join("corpora")).unwrap();
    fs::write(d.join("corpora/en.txt"), "the quick brown fox jumps over the lazy dog\n".repeat(5)).unwrap();
    fs::write(d.join("corpora/de.txt"), "der schnelle braune fuchs springt über den faulen hund\n".repeat(5)).unwrap();

    let ok = |out: Output| {
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        String::from_utf8(out.stdout).unwrap()
    };
    ok(lingomix(&["plan", "--budget", "6", "--english", "1/2", "--languages", "de", "--out", "p.json"], d));
    let plan = json(&d.join("p.json"));
    assert_eq!(plan["english"], 3);

    ok(lingomix(
        &["ocr-gen", "--plan", "p.json", "--corpora", "corpora", "--noise-backgrounds", "2", "--seed", "7", "--out", "ocr"],
        d,
    ));
    let gt = fs::read_to_string(d.join("ocr/de/gt.jsonl")).unwrap();
    assert_eq!(gt.lines().count(), 3);

    // missing corpus is a manifest error and leaves nothing behind
    fs::remove_file(d.join("corpora/de.txt")).unwrap();
    let out = lingomix(
        &["ocr-gen", "--plan", "p.json", "--corpora", "corpora", "--noise-backgrounds", "2", "--out", "ocr2"],
        d,
    );
    assert_ne!(out.status.code(), Some(0));
    assert!(!d.join("ocr2").exists());

    let records: Vec<Value> = (0..6)
        .map(|i| serde_json::json!({"sample_id": format!("s{i}"), "segments": [format!("<IMG>What is item {i}?")]}))
        .collect();
    let ds = serde_json::json!({"name": "vqav2", "records": records});
    fs::write(d.join("ds.json"), ds.to_string()).unwrap();
    let summary = ok(lingomix(
        &["translate", "--dataset", "ds.json", "--plan", "p.json", "--mock", "--cache-dir", "cache", "--out", "tr"],
        d,
    ));
    assert!(summary.contains("de=3"), "{summary}");
    let de = json(&d.join("tr/de.json"));
    assert!(de["records"][0]["segments"][0].as_str().unwrap().starts_with("<IMG>[deu_Latn]"));
    assert!(d.join("cache/translations.jsonl").is_file());

    fs::write(
        d.join("pred.jsonl"),
        "{\"task\":\"xgqa\",\"language\":\"de\",\"sample_id\":\"1\",\"prediction\":\"Yes.\"}\n\
         {\"task\":\"xgqa\",\"language\":\"de\",\"sample_id\":\"2\",\"prediction\":\"no\"}\n",
    )
    .unwrap();
    fs::write(
        d.join("gold.jsonl"),
        "{\"task\":\"xgqa\",\"language\":\"de\",\"sample_id\":\"1\",\"gold\":\"yes\"}\n\
         {\"task\":\"xgqa\",\"language\":\"de\",\"sample_id\":\"2\",\"gold\":\"yes\"}\n",
    )
    .unwrap();
    let table = ok(lingomix(&["score", "--pred", "pred.jsonl", "--gold", "gold.jsonl", "--out", "report.json"], d));
    assert!(table.contains("xgqa"));
    let report = json(&d.join("report.json"));
    assert_eq!(report["cells"][0]["score"], 50.0);
    let rendered = ok(lingomix(&["report", "--input", "report.json"], d));
    assert_eq!(rendered.trim_end(), table.trim_end());
}
