use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse-clt"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_free2(dir: &Path) {
    let o = run(&["comb", "--free", "2", "-o", "f2.json"], dir);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn comb_then_analyze() {
    let dir = tempfile::tempdir().unwrap();
    write_free2(dir.path());
    let doc: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("f2.json")).unwrap()).unwrap();
    assert_eq!(doc["edges"].as_array().unwrap().len(), 16);
    let o = run(&["analyze", "f2.json"], dir.path());
    assert!(o.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["spectral"]["lambda"], 3.0);
}

#[test]
fn raag_comb_from_cli() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["comb", "--raag", "a,b", "--commute", "a-b", "-o", "z2.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stderr).contains("join"));
    // Polynomial growth: no Parry chain.
    let o = run(&["tv", "--automaton", "z2.json", "--n", "4"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("semisimple"));
}

#[test]
fn sample_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    write_free2(dir.path());
    let args = ["sample", "--automaton", "f2.json", "--length", "30", "--count", "20", "--seed", "5"];
    let a = run(&args, dir.path());
    let b = run(&args, dir.path());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 20);
    for line in text.lines() {
        assert_eq!(line.split_whitespace().count(), 30);
    }
}

#[test]
fn clt_output_does_not_depend_on_jobs() {
    let dir = tempfile::tempdir().unwrap();
    write_free2(dir.path());
    fs::write(
        dir.path().join("exp.json"),
        r#"{"automaton": "f2.json", "action": {"kind": "hyperplane-count", "params": {"letter": "a"}},
            "n": [50, 100], "samples": 9000, "observables": ["displacement", "translation"]}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for jobs in ["1", "4"] {
        let report = format!("report{jobs}.json");
        let csv = format!("rows{jobs}.csv");
        let manifest = format!("manifest{jobs}.json");
        let o = run(
            &[
                "clt", "--config", "exp.json", "--seed", "17", "--jobs", jobs, "--csv", &csv, "--manifest", &manifest,
                "-o", &report,
            ],
            dir.path(),
        );
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        let m: serde_json::Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join(&manifest)).unwrap()).unwrap();
        assert_eq!(m["seed"], 17);
        assert!(m["inputs"].as_array().unwrap().iter().all(|i| i["sha256"].as_str().unwrap().len() == 64));
        outputs.push((fs::read(dir.path().join(report)).unwrap(), fs::read(dir.path().join(csv)).unwrap()));
    }
    assert_eq!(outputs[0], outputs[1]);
    let report: serde_json::Value = serde_json::from_slice(&outputs[0].0).unwrap();
    assert_eq!(report["runs"].as_array().unwrap().len(), 2);
}

#[test]
fn loops_and_tv_on_golden_mean() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("gm.json"),
        r#"{"vertices": 2, "initial": 0, "group": {"kind": "opaque", "letters": ["x", "y", "z"]},
            "edges": [{"from": 0, "to": 0, "label": "x"}, {"from": 0, "to": 1, "label": "y"},
                      {"from": 1, "to": 0, "label": "z"}]}"#,
    )
    .unwrap();
    let o = run(&["loops", "--automaton", "gm.json"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let text = r.to_string();
    assert!(text.contains("expected_return_time"));
    let o = run(&["tv", "--automaton", "gm.json", "--n", "6", "8"], dir.path());
    assert!(o.status.success());
}

#[test]
fn verify_fixtures_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["verify", "--fixtures"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["analyze", "missing.json"], dir.path()).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(1));
    fs::write(dir.path().join("bad.json"), "{\"vertices\": 1}").unwrap();
    let o = run(&["analyze", "bad.json"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    assert!(!o.stderr.is_empty());
}
