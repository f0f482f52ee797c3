use std::process::{Command, Output};

use rmcount_cli::record::{reserialize_run_csv, reserialize_table_csv};
use rmcount_cli::{Payload, RunRecord};

fn rmcount(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmcount"))
        .args(args)
        .arg("--quiet")
        .output()
        .expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = rmcount(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn record_of(args: &[&str]) -> RunRecord {
    RunRecord::from_json(&stdout_of(args)).unwrap()
}

fn exact_count(args: &[&str]) -> u128 {
    match record_of(args).result {
        Payload::Oracle(o) => o.exact_count.unwrap(),
        other => panic!("unexpected payload {other:?}"),
    }
}

#[test]
fn oracle_counts() {
    assert_eq!(exact_count(&["oracle", "--m", "5", "--r", "2", "--constraint", "rll:1"]), 259);
    assert_eq!(exact_count(&["oracle", "--m", "5", "--r", "2", "--constraint", "rll:2"]), 81);
}

#[test]
fn oracle_bound_is_enforced() {
    let out = rmcount(&["oracle", "--m", "7", "--r", "2", "--constraint", "rll:1"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("resource bound"), "{err}");
}

#[test]
fn oracle_k29_override() {
    let args = ["oracle", "--m", "7", "--r", "2", "--constraint", "rll:1", "--allow-k29"];
    assert_eq!(exact_count(&args), 2467);
}

#[test]
fn estimate_is_deterministic() {
    let args = ["estimate", "--m", "4", "--r", "2", "--constraint", "rll:1", "--seed", "7", "--t", "20", "--tau", "500"];
    let a = record_of(&args);
    let b = record_of(&args);
    let payload = |r: &RunRecord| serde_json::to_string(&r.result).unwrap();
    assert_eq!(payload(&a), payload(&b));
    assert_eq!(a.config_hash, b.config_hash);

    let mut other = args.to_vec();
    other[8] = "8";
    assert_ne!(payload(&a), payload(&record_of(&other)));
}

#[test]
fn record_reruns_from_config_echo() {
    let args = ["estimate", "--m", "4", "--r", "2", "--constraint", "rll:1", "--seed", "3", "--t", "10", "--tau", "300"];
    let first = record_of(&args);
    let again = rmcount_cli::run(first.config.clone()).unwrap();
    assert_eq!(again.result, first.result);
    assert_eq!(again.config_hash, first.config_hash);
}

#[test]
fn json_round_trip_is_byte_identical() {
    for args in [
        vec!["estimate", "--m", "4", "--r", "2", "--constraint", "rll:1", "--t", "10", "--tau", "200", "--exact"],
        vec!["oracle", "--m", "4", "--r", "1"],
        vec!["oracle", "--m", "4", "--r", "1", "--constraint", "weight:7", "--beta", "0,1.5"],
        vec!["budget", "--n", "16"],
        vec!["lower-bound", "--m", "7", "--r", "4"],
        vec!["weights", "--m", "4", "--r", "2", "--mode", "estimate", "--t", "5", "--tau", "200", "--weights", "4,6"],
    ] {
        let text = stdout_of(&args);
        let parsed = RunRecord::from_json(&text).unwrap();
        assert_eq!(parsed.to_json().unwrap(), text, "{args:?}");
    }
}

#[test]
fn csv_schema_and_round_trip() {
    let text = stdout_of(&[
        "estimate", "--m", "4", "--r", "2", "--constraint", "rll:1", "--t", "10", "--tau", "200", "--exact", "--format",
        "csv",
    ]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "m,r,constraint,tau,t,delta,seed,log2_Z_hat,Z_hat,rate,exact_Z,exact_rate,steps,converged,wall_ms"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], &["4", "2", "rll:1"]);
    assert_eq!(row[10], "83");
    assert_eq!(reserialize_run_csv(&text).unwrap(), text);

    let weights = stdout_of(&[
        "weights", "--m", "4", "--r", "2", "--mode", "estimate", "--t", "5", "--tau", "200", "--weights", "4,6", "--format",
        "csv",
    ]);
    assert_eq!(reserialize_run_csv(&weights).unwrap(), weights);
    assert_eq!(weights.lines().count(), 1 + 4);
}

#[test]
fn table_csv_round_trip() {
    let config = rmcount_cli::RunConfig {
        table: Some("III".into()),
        ..rmcount_cli::RunConfig::new(rmcount_cli::CommandKind::ReproduceTable)
    };
    // One cheap row through the same code path as the full table.
    let mut cache = Default::default();
    let row = rmcount::reference::TABLE_III[0];
    let cheap = rmcount::reference::ReferenceRow { tau: 200, t: 5, ..row };
    let table_row = rmcount_cli::commands::run_reference_row(&cheap, &config, &mut cache).unwrap();
    assert_eq!(table_row.exact_count, Some(1));
    let record = RunRecord::new(
        config,
        Payload::Table(rmcount_cli::record::TableReport {
            table: "III".into(),
            rows: vec![table_row],
            skipped: 0,
        }),
        0,
        vec![],
    );
    let csv = record.to_csv().unwrap();
    assert!(csv.starts_with("table,m,r,constraint,tau,t,delta,seed,log2_Z_hat,Z_hat,rate,exact_Z"));
    assert_eq!(reserialize_table_csv(&csv).unwrap(), csv);
    let json = record.to_json().unwrap();
    assert_eq!(RunRecord::from_json(&json).unwrap().to_json().unwrap(), json);
}

#[test]
fn weights_exact_mode() {
    let record = record_of(&["weights", "--m", "3", "--r", "1"]);
    let Payload::Weights(w) = record.result else { panic!() };
    let a: Vec<u128> = w.entries.iter().map(|e| e.exact.unwrap()).collect();
    assert_eq!(a, vec![1, 0, 0, 0, 14, 0, 0, 0, 1]);
}

#[test]
fn weights_estimate_mirrors() {
    let record = record_of(&["weights", "--m", "4", "--r", "2", "--mode", "estimate", "--t", "5", "--tau", "200"]);
    let Payload::Weights(w) = record.result else { panic!() };
    let sources: Vec<(usize, &str)> = w.entries.iter().map(|e| (e.weight, e.source.as_str())).collect();
    assert_eq!(sources, vec![(4, "estimate"), (6, "estimate"), (8, "estimate"), (10, "mirror"), (12, "mirror")]);
    assert_eq!(w.entries[0].rate, w.entries[4].rate);
    assert!(w.max_rate_gap.is_some());
}

#[test]
fn budget_command() {
    let record = record_of(&["budget", "--ell", "100", "--epsilon", "1"]);
    let Payload::Budget(b) = record.result else { panic!() };
    assert_eq!(b.budget.t_star, 11823);

    let record = record_of(&["budget", "--n", "32"]);
    let Payload::Budget(b) = record.result else { panic!() };
    assert_eq!(b.budget.ell, 32768);
    // Exactly 64 up to the ceiling in t*.
    let ratio = b.doubled_n_total_samples.unwrap() as f64 / b.total_samples as f64;
    assert!((ratio / 64.0 - 1.0).abs() < 1e-6, "{ratio}");
}

#[test]
fn lower_bound_command() {
    let Payload::LowerBound(lb) = record_of(&["lower-bound", "--m", "7", "--r", "4"]).result else { panic!() };
    assert!((lb.bound.value - 0.3945).abs() < 5e-5);
    assert_eq!(lb.published, Some(0.3945));
    let Payload::LowerBound(lb) = record_of(&["lower-bound", "--m", "8", "--r", "3", "--no-log-lb"]).result else {
        panic!()
    };
    assert_eq!(lb.bound.value, 29.0 / 256.0);
}

#[test]
fn bad_constraint_is_a_usage_error() {
    let out = rmcount(&["estimate", "--m", "4", "--r", "2", "--constraint", "rll:0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("rll:<d>"));
}

#[test]
fn long_table_needs_flag() {
    let record = record_of(&["reproduce-table", "IV"]);
    let Payload::Table(t) = record.result else { panic!() };
    assert!(t.rows.is_empty());
    assert_eq!(t.skipped, 3);
    assert!(record.warnings[0].contains("--long"));
}

#[test]
fn output_file() {
    let dir = std::env::temp_dir().join(format!("rmcount-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.json");
    let out = rmcount(&["oracle", "--m", "4", "--r", "2", "--constraint", "rll:1", "--output", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let record = RunRecord::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(matches!(record.result, Payload::Oracle(ref o) if o.exact_count == Some(83)));
    std::fs::remove_dir_all(dir).unwrap();
}
