use std::fs;
use std::process::{Command, Output};

use serde_json::Value;
use spinring::cli::{Status, METHOD_AGREEMENT_TOL};
use spinring::output::{sha256_hex, RunManifest};

fn spinring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spinring"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).expect("json output")
}

#[test]
fn amplitude_golden_record() {
    let o = spinring(&["amplitude", "--n", "5", "--d", "1", "--f", "-0.25", "--beta", "1214.3"]);
    assert_eq!(o.status.code(), Some(0));
    let expected = "{\n  \"n\": 5,\n  \"d\": 1,\n  \"f\": -0.25,\n  \"beta\": 1214.3,\n  \"xi\": 0.999833053426,\n  \
                    \"value_re\": 0.916445263229,\n  \"value_im\": 0.39974268502,\n  \"method\": \"spectral\"\n}\n";
    assert_eq!(stdout(&o), expected);
}

#[test]
fn every_method_agrees_on_the_command_line() {
    let o = spinring(&[
        "amplitude",
        "--n",
        "7",
        "--d",
        "-3",
        "--f",
        "0.25",
        "--beta",
        "3500.4",
        "--method",
        "all",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["d"], 4);
    assert_eq!(v["records"].as_array().unwrap().len(), 3);
    assert!(v["max_xi_deviation"].as_f64().unwrap() <= METHOD_AGREEMENT_TOL);
}

#[test]
fn coupling_and_field_flags_only_change_phase() {
    let plain = json(&spinring(&["amplitude", "--n", "6", "--d", "2", "--beta", "9.5"]));
    let driven = json(&spinring(&[
        "amplitude",
        "--n",
        "6",
        "--d",
        "2",
        "--beta",
        "9.5",
        "--j",
        "2.5",
        "--b",
        "7.3",
    ]));
    assert_eq!(plain["xi"], driven["xi"]);
}

#[test]
fn bad_input_exits_with_usage_code() {
    for args in [
        vec!["amplitude", "--n", "2", "--d", "1", "--beta", "1"],
        vec!["amplitude", "--n", "5", "--d", "1", "--beta", "-1"],
        vec!["amplitude", "--n", "5"],
        vec!["frobnicate"],
        vec![
            "optimize",
            "--n",
            "5",
            "--d",
            "1",
            "--beta-min",
            "10",
            "--beta-max",
            "1",
        ],
        vec!["multiparty", "--n", "9", "--sites", "1,1"],
    ] {
        let o = spinring(&args);
        assert_eq!(o.status.code(), Some(Status::Usage as i32), "{args:?}");
    }
}

#[test]
fn table_reproduces() {
    let o = spinring(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let mut rows = csv::Reader::from_reader(text.as_bytes());
    let records: Vec<_> = rows.records().map(Result::unwrap).collect();
    assert_eq!(records.len(), 10);
    assert!(records.iter().all(|r| &r[12] == "true"));
}

#[test]
fn truncated_table_is_a_physics_failure() {
    let o = spinring(&["table1", "--beta-max", "1000"]);
    assert_eq!(o.status.code(), Some(Status::PhysicsFailure as i32));
}

#[test]
fn blockage_command_reports_zero() {
    let o = spinring(&["blockage", "--nn", "1,2,3"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    for r in reports {
        assert_eq!(r["analytic_zero"], true);
        assert!(r["max_xi_over_samples"].as_f64().unwrap() <= 1e-12);
    }
}

#[test]
fn entangle_reports_reference_point() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    let o = spinring(&[
        "entangle",
        "--n",
        "4",
        "--beta-max",
        "50",
        "--curve",
        curve.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["best"]["entropy_ebits"].as_f64().unwrap() >= 0.99);
    assert_eq!(v["reference"]["reference_point"], true);
    assert!((v["reference"]["beta"].as_f64().unwrap() - 8.5 * std::f64::consts::PI).abs() < 1e-9);
    let lines = fs::read_to_string(&curve).unwrap().lines().count();
    assert_eq!(lines, 1 + 10_001);
}

#[test]
fn sweep_emits_full_grid() {
    let o = spinring(&[
        "sweep",
        "--n",
        "5",
        "--d",
        "1",
        "--f-min",
        "-0.5",
        "--f-max",
        "0.5",
        "--f-step",
        "0.25",
        "--beta-max",
        "1",
        "--beta-step",
        "0.5",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().next(), Some("f,beta,xi"));
    assert_eq!(text.lines().count(), 1 + 5 * 3);
}

#[test]
fn optimize_reads_config_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("search.json");
    fs::write(
        &cfg,
        r#"{"beta_max": 2000.0, "twist_candidates": [-0.25, 0.25], "refine_twist": false}"#,
    )
    .unwrap();
    let o = spinring(&[
        "optimize",
        "--n",
        "5",
        "--d",
        "2",
        "--config",
        cfg.to_str().unwrap(),
        "--beta-max",
        "200",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let best = &json(&o)["best"];
    assert!((best["beta"].as_f64().unwrap() - 162.51).abs() < 0.5);
    assert_eq!(best["f"], -0.25);
}

#[test]
fn unknown_config_field_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("search.json");
    fs::write(&cfg, r#"{"beta_maximum": 10}"#).unwrap();
    let o = spinring(&["optimize", "--n", "5", "--d", "2", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = ["multiparty", "--n", "6", "--sites", "1,3,4", "--beta-max", "300"];
    assert_eq!(spinring(&args).stdout, spinring(&args).stdout);
}

#[test]
fn manifest_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan.json");
    let o = spinring(&[
        "multiparty",
        "--n",
        "6",
        "--sites",
        "1,3,4",
        "--beta-max",
        "300",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let sidecar = RunManifest::sidecar_path(&out);
    let manifest: RunManifest = serde_json::from_str(&fs::read_to_string(&sidecar).unwrap()).unwrap();
    assert_eq!(manifest.command, "multiparty");
    assert_eq!(manifest.results_sha256, sha256_hex(&fs::read(&out).unwrap()));
    assert_eq!(manifest.parameters["n"], 6);

    let replay = spinring(&["replay", "--manifest", sidecar.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(0));
    assert_eq!(json(&replay)["reproduced"], true);
}

#[test]
fn tampered_manifest_fails_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("amp.json");
    spinring(&[
        "amplitude",
        "--n",
        "4",
        "--d",
        "2",
        "--beta",
        "3",
        "--out",
        out.to_str().unwrap(),
    ]);
    let sidecar = RunManifest::sidecar_path(&out);
    let mut manifest: Value = serde_json::from_str(&fs::read_to_string(&sidecar).unwrap()).unwrap();
    manifest["parameters"]["beta"] = 3.5.into();
    fs::write(&sidecar, manifest.to_string()).unwrap();
    let replay = spinring(&["replay", "--manifest", sidecar.to_str().unwrap()]);
    assert_eq!(replay.status.code(), Some(Status::PhysicsFailure as i32));
    assert_eq!(json(&replay)["reproduced"], false);
}

#[test]
fn negative_twist_lists_parse() {
    let o = spinring(&[
        "optimize",
        "--n",
        "5",
        "--d",
        "2",
        "--twists",
        "-0.25,0.25",
        "--beta-max",
        "200",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["best"]["f"], -0.25);
}
