use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const SYSTEM: &str = r#"{"field":{"p":2,"n":3,"modulus":[1,1,0,1]},"kind":"univariate","polys":[{"terms":[{"e":5,"c":[0,1,0]},{"e":1,"c":[1,0,0]},{"e":0,"c":[1,1,0]}]}]}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_descentlab")).args(args).env_remove("DESCENTLAB_THREADS").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn ok(args: &[&str]) -> String {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    stdout(&o)
}

fn system_file(dir: &Path) -> String {
    let p = dir.join("f.json");
    std::fs::write(&p, SYSTEM).unwrap();
    p.to_str().unwrap().to_string()
}

fn json(text: &str) -> Value {
    serde_json::from_str(text.trim()).unwrap()
}

#[test]
fn descend_output_parses_back_identically() {
    let dir = tempfile::tempdir().unwrap();
    let f = system_file(dir.path());
    let once = ok(&["descend", &f]);
    let p = dir.path().join("d.json");
    std::fs::write(&p, &once).unwrap();
    let v = json(&once);
    assert_eq!(v["flavor"], "Fprime_f");
    assert_eq!(v["nvars"], 3);
    let direct = json(&ok(&["solve", &f]));
    let via_file = json(&ok(&["solve", p.to_str().unwrap()]));
    assert_eq!(direct, via_file);
    assert!(stdout(&run(&["descend", &f, "--flavor", "Fbar_f"])).contains("cyclic:0"));
}

#[test]
fn solve_lfd_and_bounds_reports() {
    let dir = tempfile::tempdir().unwrap();
    let f = system_file(dir.path());
    let trace = dir.path().join("trace.csv");
    let s = json(&ok(&["solve", &f, "--trace", trace.to_str().unwrap()]));
    assert_eq!(s["solving_degree"], 3);
    assert_eq!(s["solution"], serde_json::json!([[1], [0], [0]]));
    let trace = std::fs::read_to_string(trace).unwrap();
    assert_eq!(trace.lines().count(), 4);
    let l = json(&ok(&["lfd", &f]));
    assert_eq!(l["exact"], 3);
    let b = json(&ok(&["bounds", &f]));
    assert_eq!(b["lfd_main"], 5);
    assert!(l["exact"].as_u64() <= b["lfd_main"].as_u64());
    let csv = ok(&["--report", "csv", "bounds", &f]);
    assert_eq!(csv.lines().nth(1), Some("2,3,5,5,2,5,5,7,5,6,5,3,5,5"));
}

#[test]
fn hfe_keygen_encrypt_decrypt_attack() {
    let dir = tempfile::tempdir().unwrap();
    let kp = dir.path().join("kp.json");
    let kp = kp.to_str().unwrap();
    ok(&["--seed", "7", "hfe", "keygen", "--q", "2", "--n", "5", "--t", "3", "--out", kp]);
    let again = ok(&["--seed", "7", "hfe", "keygen", "--q", "2", "--n", "5", "--t", "3"]);
    assert_eq!(std::fs::read_to_string(kp).unwrap(), again);
    let c = ok(&["hfe", "encrypt", "--key", kp, "--plaintext", "1,0,1,1,0"]);
    let c = c.trim();
    let plain: Vec<String> = ok(&["hfe", "decrypt", "--key", kp, "--ciphertext", c]).lines().map(String::from).collect();
    assert!(plain.contains(&"1,0,1,1,0".to_string()));
    let attack = json(&ok(&["hfe", "attack", "--key", kp, "--ciphertext", c]));
    let found: Vec<String> = attack["candidates"].as_array().unwrap().iter().map(|v| v.as_str().unwrap().to_string()).collect();
    assert_eq!(found, plain);
    assert!(attack["solving_degree"].as_u64().unwrap() <= attack["sd_fake_bound"].as_u64().unwrap());
}

#[test]
fn sweep_is_deterministic_and_within_bounds() {
    let a = ok(&["--seed", "11", "sweep"]);
    let b = ok(&["--seed", "11", "--threads", "3", "sweep"]);
    assert_eq!(a, b);
    let lines: Vec<&str> = a.lines().collect();
    assert!(lines[0].starts_with("# descentlab-sweep v"));
    let header: Vec<&str> = lines[1].split(',').collect();
    let within = header.iter().position(|&c| c == "within_bounds").unwrap();
    let rows = &lines[2..];
    assert_eq!(rows.len(), 60);
    for r in rows {
        let cells: Vec<&str> = r.split(',').collect();
        assert_eq!(cells.len(), header.len(), "{r}");
        assert_eq!(cells[within], "true", "{r}");
    }
}

#[test]
fn sweep_rows_replay_from_their_seed() {
    let all = ok(&["--seed", "100", "sweep", "--n", "4", "--count", "5"]);
    let row = all.lines().nth(5).unwrap();
    let seed = row.split(',').nth(1).unwrap();
    let one = ok(&["--seed", seed, "sweep", "--n", "4", "--count", "1"]);
    let replay = one.lines().nth(2).unwrap();
    assert_eq!(row.split_once(',').unwrap().1, replay.split_once(',').unwrap().1);
}

#[test]
fn sweep_empty_corpus_and_bad_config() {
    let out = ok(&["sweep", "--count", "0"]);
    assert_eq!(out.lines().count(), 2);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"q":2,"n":[3],"surprise":1}"#).unwrap();
    assert_eq!(run(&["sweep", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["sweep", "--q", "4"]).status.code(), Some(2));
}

#[test]
fn sweep_records_bad_inputs_as_rows() {
    let dir = tempfile::tempdir().unwrap();
    let good = system_file(dir.path());
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{").unwrap();
    let out = ok(&["sweep", "--inputs", &format!("{good},{}", bad.display())]);
    let rows: Vec<&str> = out.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].ends_with("true,"));
    assert!(!rows[1].ends_with(','));
}

#[test]
fn verify_paper_claims() {
    let o = ok(&["verify-paper", "--only", "coordinate-change"]);
    assert_eq!(o.lines().count(), 1);
    assert!(o.starts_with("PASS coordinate-change"));
    for claim in ["single-generator", "lex-gap", "gf4-remainder"] {
        assert!(ok(&["verify-paper", "--only", claim]).starts_with("PASS"));
    }
    let bad = run(&["verify-paper", "--only", "gf4-remainder", "--modulus", "1,0,1"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad.stderr).contains("not irreducible"));
}

#[test]
fn verify_paper_exit_code_follows_the_battery() {
    let o = run(&["verify-paper"]);
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 5);
    let failing: Vec<&str> = text.lines().filter(|l| l.starts_with("FAIL")).collect();
    assert_eq!(o.status.code(), Some(if failing.is_empty() { 0 } else { 1 }));
}

#[test]
fn usage_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let f = system_file(dir.path());
    assert_eq!(run(&["solve", "missing.json"]).status.code(), Some(2));
    assert_eq!(run(&["solve", &f, "--flavor", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["bounds", &dir.path().join("missing").to_string_lossy()]).status.code(), Some(2));
    assert_eq!(run(&["hfe", "keygen", "--q", "2", "--n", "5", "--t", "1"]).status.code(), Some(2));
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"field":{"p":2,"n":3,"modulus":[1,0,0,1]},"kind":"univariate","polys":[]}"#).unwrap();
    assert_eq!(run(&["solve", bad.to_str().unwrap()]).status.code(), Some(2));
}
