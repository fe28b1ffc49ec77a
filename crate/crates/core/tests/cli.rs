use std::path::Path;
use std::process::Command;

use turbo_bec::cli;

struct Output {
    status: i32,
    stdout: String,
    stderr: String,
}

fn run(args: &[&str]) -> Output {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut argv = vec!["turbo-bec"];
    argv.extend_from_slice(args);
    let status = cli::run(argv, &mut out, &mut err);
    Output {
        status,
        stdout: String::from_utf8(out).unwrap(),
        stderr: String::from_utf8(err).unwrap(),
    }
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn table_matches_golden_file() {
    let golden = include_str!("golden/table_7_5.txt");
    let out = run(&["table", "--code", "7,5"]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    assert_eq!(out.stdout, golden);
    assert!(out.stderr.starts_with("# config: "));
}

#[test]
fn table_decimal_base_is_the_same_code() {
    let octal = run(&["table", "--code", "13,15"]);
    let decimal = run(&["table", "--code", "11,13", "--base", "decimal"]);
    assert_eq!(octal.status, 0);
    assert_eq!(octal.stdout, decimal.stdout);
    assert!(octal.stdout.contains("states=8"));
}

#[test]
fn encode_then_decode_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let info = dir.path().join("info.hex");
    let cw = dir.path().join("cw.hex");
    std::fs::write(&info, "c3a5\n").unwrap();
    let common = ["--k", "16", "--rate", "1/2", "--interleaver", "pr:3"];

    let mut args = vec!["encode"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--in", path_str(&info), "--out", path_str(&cw)]);
    let out = run(&args);
    assert_eq!(out.status, 0, "{}", out.stderr);
    let hex = std::fs::read_to_string(&cw).unwrap();
    let bits = turbo_bec::cli::hex_to_bits(hex.trim(), 32).unwrap();
    assert_eq!(&turbo_bec::cli::bits_to_hex(&bits[..]), hex.trim());

    // receive every symbol in reverse order
    let received = dir.path().join("rx.txt");
    let lines: String = (0..32)
        .rev()
        .map(|i| format!("{i} {}\n", bits[i] as u8))
        .collect();
    std::fs::write(&received, lines).unwrap();
    let mut args = vec!["decode"];
    args.extend_from_slice(&common);
    args.extend_from_slice(&["--received", path_str(&received)]);
    let out = run(&args);
    assert_eq!(out.status, 0, "{}", out.stderr);
    assert!(
        out.stdout.contains("outcome success r_stop="),
        "{}",
        out.stdout
    );
    assert!(out.stdout.ends_with("info c3a5\n"), "{}", out.stdout);
}

#[test]
fn decode_reports_contradiction() {
    let dir = tempfile::tempdir().unwrap();
    let received = dir.path().join("rx.txt");
    // leaving the zero state the first parity bit equals the info bit
    std::fs::write(&received, "0 1\n1 0\n").unwrap();
    let out = run(&[
        "decode",
        "--k",
        "8",
        "--interleaver",
        "identity",
        "--received",
        path_str(&received),
    ]);
    assert_eq!(out.status, 1);
    assert!(
        out.stdout.contains("outcome contradiction"),
        "{}",
        out.stdout
    );
}

#[test]
fn simulate_csv_schema_and_determinism() {
    let args = [
        "simulate",
        "--k",
        "64",
        "--rate",
        "1/3",
        "--trials",
        "20",
        "--seed",
        "5",
        "--interleaver",
        "pr:1",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status, 0, "{}", a.stderr);
    assert_eq!(a.stdout, b.stdout);
    let lines: Vec<&str> = a.stdout.lines().collect();
    assert_eq!(
        lines[0],
        "code,rate,K,interleaver,trials,base_seed,mu_av,mu_std,p_th_est,gap"
    );
    assert_eq!(lines.len(), 2);
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields.len(), 10);
    assert_eq!(&fields[..6], &["turbo-7_5", "1/3", "64", "pr:1", "20", "5"]);
    let mu: f64 = fields[6].parse().unwrap();
    assert!((1.0..=3.0).contains(&mu));
}

#[test]
fn sweep_over_two_lengths_and_ldpc() {
    let out = run(&[
        "sweep",
        "--code",
        "ldpc-regular",
        "--k",
        "60,120",
        "--rate",
        "1/3,2/3",
        "--trials",
        "10",
    ]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    let lines: Vec<&str> = out.stdout.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("ldpc-regular,1/3,60,-,10,0,"));
    assert!(lines[2].starts_with("ldpc-regular,1/3,120,"));
    assert!(lines[3].starts_with("ldpc-regular,2/3,60,"));
}

#[test]
fn sweep_with_empty_length_list_prints_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"command": "sweep", "k": [], "rate": ["1/3"], "trials": 5}"#,
    )
    .unwrap();
    let out = run(&["--config", path_str(&cfg)]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    assert_eq!(out.stdout.lines().count(), 1);
}

#[test]
fn rate_two_thirds_needs_a_multiple_of_four() {
    let out = run(&["simulate", "--k", "1022", "--rate", "2/3", "--trials", "1"]);
    assert_ne!(out.status, 0);
    assert!(out.stderr.contains("error:"), "{}", out.stderr);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"k": [32], "rate": ["1/2"], "trials": 7, "seed": 3, "interleaver": "pr:9"}"#,
    )
    .unwrap();
    let out = run(&["simulate", "--config", path_str(&cfg), "--trials", "4"]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    let row = out.stdout.lines().nth(1).unwrap();
    assert!(row.starts_with("turbo-7_5,1/2,32,pr:9,4,3,"), "{row}");
    let echo = out
        .stderr
        .lines()
        .find(|l| l.starts_with("# config: "))
        .unwrap();
    let json: serde_json::Value = serde_json::from_str(&echo["# config: ".len()..]).unwrap();
    assert_eq!(json["trials"], 4);
    assert_eq!(json["seed"], 3);
}

#[test]
fn unknown_config_keys_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command": "table", "colour": "blue"}"#).unwrap();
    let out = run(&["--config", path_str(&cfg)]);
    assert_ne!(out.status, 0);
}

#[test]
fn trial_trace_is_monotone() {
    let out = run(&["trial", "--k", "32", "--seed", "11"]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    let mut prev = 0;
    let mut r_stop = None;
    for line in out.stdout.lines().skip(1) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts[0] == "r_stop" {
            r_stop = Some(parts[1].parse::<usize>().unwrap());
            continue;
        }
        if parts[0] == "mu" {
            continue;
        }
        let det: usize = parts[1].parse().unwrap();
        assert!(det >= prev);
        prev = det;
    }
    assert_eq!(prev, 32);
    assert!(r_stop.unwrap() >= 32);
}

#[test]
fn version_prints_fingerprints() {
    let out = run(&["--version"]);
    assert_eq!(out.status, 0);
    assert!(
        out.stdout.contains(env!("CARGO_PKG_VERSION")),
        "{}",
        out.stdout
    );
}

#[test]
fn binary_exit_status() {
    let bin = env!("CARGO_BIN_EXE_turbo-bec");
    let ok = Command::new(bin)
        .args(["table", "--code", "7,5"])
        .output()
        .unwrap();
    assert!(ok.status.success());
    assert_eq!(
        String::from_utf8(ok.stdout).unwrap(),
        include_str!("golden/table_7_5.txt")
    );
    let bad = Command::new(bin)
        .args(["simulate", "--k", "1022", "--rate", "2/3"])
        .output()
        .unwrap();
    assert!(!bad.status.success());
    let usage = Command::new(bin).arg("--no-such-flag").output().unwrap();
    assert_eq!(usage.status.code(), Some(2));
}

#[test]
fn shipped_irregular_distribution_loads() {
    let dist = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/irregular_example.txt"
    );
    let code = format!("ldpc-irregular:{dist}");
    let out = run(&[
        "simulate", "--code", &code, "--k", "120", "--rate", "1/3", "--trials", "10",
    ]);
    assert_eq!(out.status, 0, "{}", out.stderr);
    assert!(out
        .stdout
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("ldpc-irregular,1/3,120,-,10,0,"));
}
