//! Runs every `gatesim` command in docs/reproduction.md and checks the
//! committed expected outputs in docs/expected/.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn run(args: &[String]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gatesim"))
        .args(args)
        .current_dir(root())
        .env_remove("GATESIM_TOL")
        .output()
        .expect("gatesim runs")
}

/// Commands on code-block lines or in inline code spans.
fn documented_commands() -> Vec<Vec<String>> {
    let text = std::fs::read_to_string(root().join("docs/reproduction.md")).unwrap();
    let mut out: Vec<Vec<String>> = Vec::new();
    let mut in_block = false;
    for line in text.lines() {
        if line.trim_start().starts_with("```") {
            in_block = !in_block;
            continue;
        }
        let candidates: Vec<&str> = if in_block {
            vec![line.trim()]
        } else {
            line.split('`').skip(1).step_by(2).collect()
        };
        for c in candidates {
            if let Some(rest) = c.strip_prefix("gatesim ") {
                let args: Vec<String> = rest.split_whitespace().map(String::from).collect();
                if !out.contains(&args) {
                    out.push(args);
                }
            }
        }
    }
    out
}

#[test]
fn every_documented_command_succeeds() {
    let cmds = documented_commands();
    assert!(cmds.len() >= 15, "found only {} commands", cmds.len());
    for args in cmds {
        let out = run(&args);
        assert_eq!(
            out.status.code(),
            Some(0),
            "gatesim {}: {}",
            args.join(" "),
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stdout.is_empty(), "gatesim {} printed nothing", args.join(" "));
    }
}

fn check_number(actual: f64, check: &Value, what: &str) {
    let expected = check["value"].as_f64().unwrap();
    let diff = (actual - expected).abs();
    if let Some(t) = check.get("abs_tol").and_then(Value::as_f64) {
        assert!(diff <= t, "{what}: {actual} vs {expected} (abs tol {t})");
    }
    if let Some(t) = check.get("rel_tol").and_then(Value::as_f64) {
        assert!(diff <= t * expected.abs(), "{what}: {actual} vs {expected} (rel tol {t})");
    }
}

#[test]
fn expected_outputs_match() {
    let documented = documented_commands();
    let mut files: Vec<PathBuf> = std::fs::read_dir(root().join("docs/expected"))
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "json"))
        .collect();
    files.sort();
    assert!(!files.is_empty());
    for file in files {
        let spec: Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
        let name = file.file_name().unwrap().to_string_lossy().to_string();
        let args: Vec<String> = spec["args"].as_array().unwrap().iter().map(|a| a.as_str().unwrap().to_string()).collect();
        assert!(documented.contains(&args), "{name}: command is not in docs/reproduction.md");
        let out = run(&args);
        assert_eq!(out.status.code(), Some(spec["exit"].as_i64().unwrap() as i32), "{name}");
        let stdout = String::from_utf8(out.stdout).unwrap();
        let checks = spec["checks"].as_array().unwrap();
        match spec["format"].as_str().unwrap() {
            "json" => {
                let v: Value = serde_json::from_str(&stdout).unwrap();
                for c in checks {
                    let ptr = c["pointer"].as_str().unwrap();
                    let actual = v.pointer(ptr).unwrap_or_else(|| panic!("{name}: no {ptr}"));
                    match c.get("equals") {
                        Some(e) => assert_eq!(actual, e, "{name}: {ptr}"),
                        None => check_number(actual.as_f64().unwrap(), c, &format!("{name}: {ptr}")),
                    }
                }
            }
            "csv" => {
                let rows: Vec<Vec<&str>> = stdout.lines().skip(1).map(|l| l.split(',').collect()).collect();
                for c in checks {
                    let (r, k) = (c["row"].as_u64().unwrap() as usize, c["column"].as_u64().unwrap() as usize);
                    let actual: f64 = rows[r][k].parse().unwrap();
                    check_number(actual, c, &format!("{name}: row {r} column {k}"));
                }
            }
            f => panic!("{name}: unknown format {f}"),
        }
    }
}
