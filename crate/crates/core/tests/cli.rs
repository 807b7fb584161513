use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_tspace-lab");

fn run(args: &[&str]) -> Output {
    run_with(args, &[])
}

fn run_with(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args(args);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_file(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn help_version_and_usage_errors() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&[])), 64);
    assert_eq!(code(&run(&["frobnicate"])), 64);
    assert_eq!(code(&run(&["suite", "bases"])), 64);
    assert_eq!(code(&run(&["suite", "nonsense", "--q", "2"])), 64);
    assert_eq!(code(&run(&["suite", "sum", "--q", "2", "--r", "0", "--s", "0"])), 64);
    assert_eq!(code(&run(&["suite", "bases", "--q", "6", "--n", "1"])), 64);
    assert_eq!(code(&run(&["closure", "--q", "2", "--gen", "x^^2"])), 64);
    assert_eq!(code(&run(&["binom-table", "--q", "5", "--case", "V"])), 64);
}

#[test]
fn bases_suite_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bases.json");
    let o = run(&["suite", "bases", "--q", "3", "--n", "1", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).contains("suite bases: pass"));
    let rep = json_file(&path);
    assert_eq!(rep["schema"], "tspace-report/1");
    assert_eq!(rep["suite"], "bases");
    assert_eq!(rep["params"]["q"], 3);
    assert_eq!(rep["field"]["p"], 3);
    let checks = rep["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["status"] == "pass" && c["anchor"].is_string()));
    let codim = checks.iter().find(|c| c["anchor"] == "codimension").unwrap();
    assert_eq!(codim["detail"]["codim"], 3);
    assert!(!fs::read_to_string(&path).unwrap().contains("wall_ms"));
}

#[test]
fn timings_are_opt_in() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.json");
    let o = run(&["suite", "binom", "--q", "3", "--timings", "--json", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(fs::read_to_string(&path).unwrap().contains("wall_ms"));
}

#[test]
fn randomized_bases_is_inconclusive_not_failed() {
    let o = run(&["suite", "bases", "--q", "2", "--n", "1", "--strategy", "random", "--seed", "7"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    assert!(!stdout(&o).contains("[fail]"));
}

#[test]
fn exploratory_maximality_exits_two() {
    let o = run(&["suite", "maximality", "--q", "2", "--n", "2", "--strategy", "random", "--stall", "64"]);
    assert_eq!(code(&o), 2, "{}", stdout(&o));
    assert!(stdout(&o).contains("[exploratory]"));
}

#[test]
fn certificates_are_written_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let certs = dir.path().join("certs");
    let o = run(&["suite", "sum", "--q", "2", "--r", "0", "--s", "1", "--certs", certs.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let cert = certs.join("sum").join("q2-r0-s1.json");
    assert!(cert.exists());
    let body = json_file(&cert);
    assert_eq!(body["dim"], 15);
    assert_eq!(body["claim"], "full");
    let ok = run(&["check-cert", cert.to_str().unwrap()]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));

    let mut tampered = body.clone();
    tampered["witnesses"].as_array_mut().unwrap().truncate(3);
    let bad = dir.path().join("bad.json");
    fs::write(&bad, serde_json::to_string(&tampered).unwrap()).unwrap();
    assert_eq!(code(&run(&["check-cert", bad.to_str().unwrap()])), 1);

    fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["check-cert", bad.to_str().unwrap()])), 1);
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let dir = tempfile::tempdir().unwrap();
    for (suite, args) in [
        ("sum", vec!["--q", "2", "--r", "0", "--s", "1"]),
        ("bases", vec!["--q", "2", "--n", "2", "--strategy", "random", "--seed", "5"]),
        ("wn-props", vec!["--q", "3", "--n", "1", "--trials", "200", "--seed", "9"]),
    ] {
        let mut outs = Vec::new();
        for threads in ["1", "4"] {
            let path = dir.path().join(format!("{suite}-{threads}.json"));
            let mut full = vec!["suite", suite];
            full.extend(&args);
            full.extend(["--json", path.to_str().unwrap()]);
            run_with(&full, &[("TSPACE_LAB_THREADS", threads)]);
            outs.push(fs::read(&path).unwrap());
        }
        assert_eq!(outs[0], outs[1], "{suite}");
    }
}

#[test]
fn emit_objects() {
    let o = run(&["emit", "--object", "wn", "--q", "3", "--n", "1"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    let polys = v["polys"].as_array().unwrap();
    assert_eq!(polys.len(), 2);
    assert_eq!(polys[0]["terms"]["1"], serde_json::json!([1]));
    assert_eq!(polys[0]["terms"]["3"], serde_json::json!([1]));
    assert_eq!(polys[1]["terms"]["4"], serde_json::json!([1]));

    let en: Value = serde_json::from_str(&stdout(&run(&["emit", "--object", "en", "--q", "3", "--n", "1"]))).unwrap();
    assert_eq!(en["polys"].as_array().unwrap().len(), 3 + 3 - 1);
    let yn: Value = serde_json::from_str(&stdout(&run(&["emit", "--object", "yn", "--q", "3", "--n", "1"]))).unwrap();
    assert_eq!(yn["polys"].as_array().unwrap().len(), 3);
    assert_eq!(code(&run(&["emit", "--object", "b1r", "--q", "3"])), 64);
    assert_eq!(code(&run(&["emit", "--object", "b1r", "--q", "5", "--r", "2"])), 0);
}

#[test]
fn closure_and_membership() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("c.json");
    let o = run(&["closure", "--q", "2", "--gen", "x + x^2", "--gen", "x^3", "--cert", cert.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["dim"], 2);
    assert_eq!(v["exact"], true);
    assert_eq!(code(&run(&["check-cert", cert.to_str().unwrap()])), 0);

    let m = run(&["membership", "--q", "3", "--gen", "x + x^3", "--f", "x^2"]);
    assert_eq!(code(&m), 0);
    let v: Value = serde_json::from_str(&stdout(&m)).unwrap();
    assert_eq!(v["member"], false);
    assert_eq!(v["verdict"], "not a member");

    // x^4 + x^12 folds to 2x^4 in A_1
    let m = run(&["membership", "--q", "3", "--gen", "x + x^3", "--f", "x^4"]);
    let v: Value = serde_json::from_str(&stdout(&m)).unwrap();
    assert_eq!(v["verdict"], "member modulo U_n");

    let m = run(&["membership", "--q", "3", "--gen", "x + x^3", "--f", "x^2", "--strategy", "random", "--stall", "8"]);
    let v: Value = serde_json::from_str(&stdout(&m)).unwrap();
    assert_eq!(v["member"], false);
    assert_eq!(v["verdict"], "undecided");
    assert_eq!(code(&m), 2);
}

#[test]
fn binom_table_csv() {
    let o = run(&["binom-table", "--q", "5", "--case", "II"]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,t,j,formula,oracle,match"));
    let rows: Vec<_> = lines.collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|l| l.ends_with(",true") && l.split(',').count() == 6));
}

#[test]
fn identity_checks() {
    for args in [
        vec!["--which", "g-base", "--q", "5"],
        vec!["--which", "g-step", "--q", "5", "--r", "3"],
        vec!["--which", "h", "--q", "7", "--r", "5"],
    ] {
        let mut full = vec!["identity-check"];
        full.extend(&args);
        let o = run(&full);
        assert_eq!(code(&o), 0, "{args:?}: {}", stdout(&o));
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert_eq!(v["status"], "pass");
    }
    assert_eq!(code(&run(&["identity-check", "--which", "h", "--q", "7", "--r", "4"])), 64);
    assert_eq!(code(&run(&["identity-check", "--which", "g-step", "--q", "5", "--r", "1"])), 64);
}
