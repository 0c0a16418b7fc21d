use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

const GOOD: [&str; 5] = ["abelian", "heisenberg1", "heisenberg2", "engel", "free23"];
const COMMANDS: [&str; 7] = ["check", "frame", "e0", "dc", "pages", "verify", "cohomology"];

fn corpus(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/corpus")
        .join(format!("{name}.grp"))
        .to_string_lossy()
        .into_owned()
}

fn carnot(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carnot")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("valid JSON")
}

#[test]
fn check_reports_valid_group() {
    let o = carnot(&["check", &corpus("heisenberg1")]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout(&o), "stratification valid; multicomplex identities hold (τ ≤ 4)\n");
}

#[test]
fn check_names_the_violating_bracket() {
    let o = carnot(&["check", &corpus("bad")]);
    assert_eq!(code(&o), 2);
    let out = stdout(&o);
    assert!(out.contains("grading violation: [X1, X3]"), "{out}");
    let j = json(&carnot(&["check", &corpus("bad"), "--format", "json"]));
    assert_eq!(j["ok"], false);
    assert_eq!(j["stratification"]["valid"], false);
}

#[test]
fn verify_json_is_all_true() {
    let o = carnot(&["verify", &corpus("heisenberg1"), "--tau", "6", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["schema"], 1);
    assert_eq!(j["ok"], true);
    let slices = j["slices"].as_array().unwrap();
    assert_eq!(slices.len(), 7);
    for s in slices {
        for b in s["rumin"]["blocks"].as_array().unwrap() {
            assert_eq!(b["holds"], true, "{b}");
        }
        for p in s["pages"].as_array().unwrap() {
            assert_eq!(p["holds"], true, "{p}");
        }
    }
}

#[test]
fn exit_codes_on_the_corpus() {
    for g in GOOD {
        for c in COMMANDS {
            let o = carnot(&[c, &corpus(g), "--tau", "2"]);
            assert_eq!(code(&o), 0, "{c} {g}: {}", String::from_utf8_lossy(&o.stderr));
        }
    }
    for c in COMMANDS {
        assert_eq!(code(&carnot(&[c, &corpus("bad")])), 2, "{c} bad");
    }
}

#[test]
fn input_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let malformed = dir.path().join("broken.grp");
    std::fs::write(&malformed, "name = broken\nlayers = [2, 1]\n[brackets]\nX1 X9 = X3\n").unwrap();
    let o = carnot(&["check", malformed.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4"));

    assert_eq!(code(&carnot(&["check", "/no/such/file.grp"])), 1);
    assert_eq!(code(&carnot(&["pages", &corpus("engel"), "--weight", "8"])), 1);
    assert_eq!(code(&carnot(&["pages", &corpus("engel"), "--page", "0"])), 1);
    assert_eq!(code(&carnot(&["dc", &corpus("free23"), "--max-block-dim", "3"])), 1);
    assert_eq!(code(&carnot(&["frame", &corpus("engel"), "--format", "yaml"])), 1);
}

#[test]
fn output_is_deterministic() {
    for c in ["pages", "verify", "dc"] {
        let args = [c, &corpus("engel"), "--tau", "3", "--format", "json"];
        let a = carnot(&args);
        let b = Command::new(env!("CARGO_BIN_EXE_carnot")).args(args).env("CARNOT_THREADS", "1").output().unwrap();
        assert_eq!(a.stdout, b.stdout, "{c}");
        assert_eq!(a.stdout, carnot(&args).stdout, "{c}");
    }
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("frame.txt");
    let o = carnot(&["frame", &corpus("engel"), "--out", path.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), carnot(&["frame", &corpus("engel")]).stdout);
}

#[test]
fn bundled_names_resolve() {
    assert_eq!(carnot(&["e0", "heisenberg1"]).stdout, carnot(&["e0", &corpus("heisenberg1")]).stdout);
}

#[test]
fn reports_have_expected_shape() {
    let e0 = json(&carnot(&["e0", &corpus("heisenberg1"), "--format", "json"]));
    assert_eq!(e0["dims"], serde_json::json!([1, 2, 2, 1]));

    let frame = stdout(&carnot(&["frame", &corpus("heisenberg1")]));
    assert!(frame.contains("X1 = d1 - 1/2*x2*d3"), "{frame}");
    assert!(frame.contains("X2 = d2 + 1/2*x1*d3"), "{frame}");

    let pages = json(&carnot(&["pages", &corpus("heisenberg1"), "--tau", "2", "--page", "1", "--format", "json"]));
    let first = &pages["pages"][0];
    for k in ["group", "tau", "r", "p", "h", "partial"] {
        assert!(first.get(k).is_some(), "missing {k}");
    }
    for k in ["Z", "B", "E"] {
        assert!(first["dims"].get(k).is_some(), "missing dims.{k}");
    }
    let weight = json(&carnot(&["pages", &corpus("heisenberg1"), "--weight", "1", "--format", "json"]));
    assert!(weight["pages"].as_array().unwrap().iter().all(|p| p["p"] == 1));

    let coh = json(&carnot(&["cohomology", &corpus("engel"), "--format", "json"]));
    for s in coh["slices"].as_array().unwrap() {
        assert_eq!(s["agree"], true);
    }
}
