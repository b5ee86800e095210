use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn iecc(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_iecc"))
        .args(args)
        .current_dir(dir)
        .env("IECC_WORKERS", "1")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn params_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = iecc(&["params", "--n", "256", "--epsilon", "0.1"], dir.path());
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["p"], 3840);
    assert_eq!(v["T"], 2000);
    assert_eq!(v["totalBits"], 10_560_000);
    assert!(!iecc(&["params", "--n", "100"], dir.path()).status.success());
}

#[test]
fn run_then_audit_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = r#"{"n": 16, "epsilon": "1/10", "strategy": {"kind": "IidRate", "rate": 0.2}, "trials": 2, "seed": 4}"#;
    fs::write(dir.path().join("cfg.json"), cfg).unwrap();
    let o = iecc(
        &[
            "run",
            "--config",
            "cfg.json",
            "--transcripts",
            "tr",
            "--format",
            "csv",
        ],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&o).lines().count(), 3);

    let o = iecc(
        &["audit", "tr/trial-00000.jsonl", "tr/trial-00001.jsonl"],
        dir.path(),
    );
    assert!(o.status.success());
    assert_eq!(stdout(&o).matches("clean").count(), 2);

    // change one delivered bit of Bob's first reply from 0 to 1 (or back)
    let path = dir.path().join("tr/trial-00000.jsonl");
    let text = fs::read_to_string(&path).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let mut chunk: serde_json::Value = serde_json::from_str(&lines[1]).unwrap();
    let recv = chunk["bobRecv"].as_str().unwrap().to_string();
    let mask = chunk["bobMask"].as_str().unwrap().to_string();
    let (r0, m0) = (
        u8::from_str_radix(&recv[..2], 16).unwrap(),
        u8::from_str_radix(&mask[..2], 16).unwrap(),
    );
    let bit = (0..8)
        .find(|b| m0 >> b & 1 == 0)
        .expect("an unerased bit in the first byte");
    chunk["bobRecv"] = format!("{:02x}{}", r0 ^ (1 << bit), &recv[2..]).into();
    lines[1] = chunk.to_string();
    fs::write(&path, lines.join("\n")).unwrap();
    let o = iecc(
        &["audit", "--no-replay", "tr/trial-00000.jsonl"],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("Ledger @ chunk 1"));
}

#[test]
fn oracle_search_gates_on_counterexamples() {
    let dir = tempfile::tempdir().unwrap();
    let o = iecc(
        &["oracle", "search", "--n", "16", "--tries", "5"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("NoneFound"));
    let o = iecc(
        &[
            "oracle",
            "search",
            "--n",
            "16",
            "--tries",
            "0",
            "--fraction",
            "1",
            "--archive",
            "ce.jsonl",
        ],
        dir.path(),
    );
    assert_eq!(o.status.code(), Some(1));
    assert!(dir.path().join("ce.jsonl").exists());
}

#[test]
fn sweep_and_code_audits() {
    let dir = tempfile::tempdir().unwrap();
    let o = iecc(
        &[
            "sweep",
            "--n",
            "16",
            "--fractions",
            "0,8/55,1",
            "--trials",
            "2",
            "--strategy",
            r#"{"kind":"FrontLoad"}"#,
        ],
        dir.path(),
    );
    assert!(o.status.success());
    let csv = stdout(&o);
    let rows: Vec<&str> = csv.lines().collect();
    assert_eq!(
        rows[0],
        "fraction,strategy,trials,successes,meanErasedFraction,meanWallTimeMs"
    );
    assert!(rows[1].starts_with("0.000000,FrontLoad,2,2,"));
    assert!(rows[3].starts_with("1.000000,FrontLoad,2,0,"));

    let o = iecc(
        &["codes", "audit", "--n", "16", "--samples", "200"],
        dir.path(),
    );
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["reduced"]["pass"], true);
    assert_eq!(v["sampled"]["pass"], true);
}
