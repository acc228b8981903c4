use std::process::{Command, Output};

fn qembed(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qembed"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn report_keys_are_ordered() {
    let out = qembed(&["bounds", "--full"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let keys = [
        "schema",
        "experiment_id",
        "params",
        "seed",
        "bounds",
        "aggregates",
        "trials",
        "verdicts",
        "runtime_seconds",
    ];
    let pos: Vec<usize> = keys
        .iter()
        .map(|k| {
            text.find(&format!("\n  \"{k}\""))
                .unwrap_or_else(|| panic!("missing {k}"))
        })
        .collect();
    assert!(pos.windows(2).all(|w| w[0] < w[1]));
    assert!(text.contains("\"schema\": \"qembed-report/1\""));
    assert!(text.contains("\"runtime_seconds\": null"));
}

#[test]
fn seed_accepts_hex() {
    let a = qembed(&["fingerprint", "--rounds", "200", "--seed", "0x10"]);
    let b = qembed(&["fingerprint", "--rounds", "200", "--seed", "16"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 16);
}

#[test]
fn usage_errors_exit_three() {
    assert_eq!(qembed(&["no-such-command"]).status.code(), Some(3));
    assert_eq!(
        qembed(&["embed", "--epsilon", "1.5"]).status.code(),
        Some(3)
    );
    assert_eq!(
        qembed(&["embed", "--target-dim", "65"]).status.code(),
        Some(3)
    );
    assert_eq!(
        qembed(&["verify", "--lemma", "unknown"]).status.code(),
        Some(3)
    );
    assert_eq!(
        qembed(&["game", "--strategy", "guess"]).status.code(),
        Some(3)
    );
    assert_eq!(qembed(&["jl", "--seed", "xyz"]).status.code(), Some(3));
    assert_eq!(qembed(&["--help"]).status.code(), Some(0));
}

#[test]
fn scope_warning_is_not_a_failure() {
    let out = qembed(&["embed", "--dim", "8", "--rank", "8", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["bounds"]["in_theorem_scope"], false);
    let verdicts = r["verdicts"].as_array().unwrap();
    assert!(verdicts
        .iter()
        .any(|v| v["verdict"] == "outside-theorem-scope"));
}

#[test]
fn csv_has_header_and_one_row_per_trial() {
    let out = qembed(&["embed", "--dim", "16", "--trials", "7", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    assert!(lines[0].starts_with("trial,ratio1,ratio2sq"));
}

#[test]
fn explicit_states_from_file() {
    let dir = std::env::temp_dir().join(format!("qembed-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("states.json");
    std::fs::write(
        &path,
        r#"{"rho": [[1,0,0,0],[0,0,0,0],[0,0,0,0],[0,0,0,0]],
            "sigma": [[0,0,0,0],[0,0.5,[0,0.5],0],[0,[0,-0.5],0.5,0],[0,0,0,0]]}"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let out = qembed(&["bounds", "--states", p]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let out = qembed(&[
        "embed",
        "--states",
        p,
        "--target-dim",
        "4",
        "--trials",
        "3",
        "--epsilon",
        "0.1",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["params"]["state_family"], "explicit");
    let out = qembed(&[
        "embed",
        "--states",
        dir.join("missing.json").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn dump_goes_to_stderr() {
    let out = qembed(&["game", "--rounds", "10", "--dump"]);
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.starts_with("# rho\n1+0i\t0+0i\n"));
    assert!(err.contains("# measurement"));
    assert!(json(&out)["verdicts"].is_array());
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("qembed-out-{}.json", std::process::id()));
    let out = qembed(&[
        "two-norm",
        "--trials",
        "50",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\"experiment_id\": \"two-norm\""));
    std::fs::remove_file(&path).unwrap();
}
