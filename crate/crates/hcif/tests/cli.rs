//! CLI behavior beyond the acceptance contract: trace chaining, the
//! enabled-at sample stream, DOT export, error exits and the delta override.

use std::io::BufRead;
use std::path::PathBuf;

use hcif::cli::run_cli;

fn models_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("models")
}

fn run(args: &[&str]) -> (i32, String, String) {
    run_with_stdin(args, "")
}

fn run_with_stdin(args: &[&str], input: &str) -> (i32, String, String) {
    let argv: Vec<String> = args.iter().map(|s| s.to_string()).collect();
    let mut stdout = Vec::new();
    let mut stderr = Vec::new();
    let mut reader = std::io::BufReader::new(input.as_bytes());
    let code = run_cli(&argv, &mut stdout, &mut stderr, &mut (&mut reader as &mut dyn BufRead));
    (code, String::from_utf8(stdout).unwrap(), String::from_utf8(stderr).unwrap())
}

#[test]
fn simulate_traces_chain() {
    let hier = models_dir().join("thermostat_hier.hcif");
    let (code, out, _) = run(&[
        "hcif",
        "simulate",
        hier.to_str().unwrap(),
        "--steps",
        "15",
        "--seed",
        "7",
    ]);
    assert_eq!(code, 0);
    let records: Vec<serde_json::Value> =
        out.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(!records.is_empty());
    for (k, pair) in records.windows(2).enumerate() {
        assert_eq!(pair[0]["post"], pair[1]["pre"], "chain broken at step {}", k);
        assert_eq!(pair[0]["step"], serde_json::json!(k));
    }
    for r in &records {
        match r["kind"].as_str().unwrap() {
            "action" => assert!(r["label"].is_string()),
            "env" => assert!(r["terminating"].is_boolean()),
            "time" => {
                let rho = r["rho"].as_array().unwrap();
                let theta = r["theta"].as_array().unwrap();
                let omega = r["omega"].as_array().unwrap();
                assert_eq!(rho.len(), theta.len());
                assert_eq!(rho.len(), omega.len());
            }
            other => panic!("unexpected record kind {}", other),
        }
    }
}

#[test]
fn different_seeds_usually_diverge() {
    let hier = models_dir().join("thermostat_hier.hcif");
    let sim = |seed: &str| {
        run(&["hcif", "simulate", hier.to_str().unwrap(), "--steps", "15", "--seed", seed]).1
    };
    // Not guaranteed in principle, but stable for these fixed seeds.
    assert_ne!(sim("1"), sim("2"));
}

#[test]
fn interactive_simulation_reads_choices() {
    let hier = models_dir().join("thermostat_hier.hcif");
    let (code, out, err) = run_with_stdin(
        &["hcif", "simulate", hier.to_str().unwrap(), "--steps", "3", "--interactive"],
        "0\n0\n0\n",
    );
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 3);
    assert!(err.contains("enabled transitions"));
}

#[test]
fn enabled_at_prints_the_example_band() {
    let model = models_dir().join("enabled_over_time.hcif");
    let (code, out, _) = run(&["hcif", "enabled-at", model.to_str().unwrap(), "--horizon", "2"]);
    assert_eq!(code, 0);
    let (ln2, ln4) = (2.0f64.ln(), 4.0f64.ln());
    let mut samples = 0;
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        let s = v["s"].as_f64().unwrap();
        let theta: Vec<&str> = v["theta"].as_array().unwrap().iter().map(|t| t.as_str().unwrap()).collect();
        assert!(theta.contains(&"a"));
        assert_eq!(theta.contains(&"b"), s > ln2 && s < ln4, "at s = {}", s);
        // The outer location never terminates, so the composite omega is
        // false even while the inner level is terminable.
        assert!(!v["omega"].as_bool().unwrap());
        samples += 1;
    }
    assert_eq!(samples, 65);
}

#[test]
fn delta_env_var_is_honored_and_flag_wins() {
    let model = models_dir().join("enabled_over_time.hcif");
    let run_bin = |extra: &[&str]| {
        let out = std::process::Command::new(env!("CARGO_BIN_EXE_hcif"))
            .args(["enabled-at", model.to_str().unwrap(), "--horizon", "2"])
            .args(extra)
            .env("HCIF_DELTA", "0.25")
            .output()
            .unwrap();
        assert!(out.status.success());
        String::from_utf8(out.stdout).unwrap()
    };
    // Coarser grid from the environment: 2^-2 over horizon 2 gives 9 samples.
    assert_eq!(run_bin(&[]).lines().count(), 9);
    // An explicit flag wins over the environment.
    assert_eq!(run_bin(&["--delta", "0.5"]).lines().count(), 5);
}

#[test]
fn export_dot_emits_clusters() {
    let hier = models_dir().join("thermostat_hier.hcif");
    let (code, out, _) = run(&["hcif", "export-dot", hier.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.starts_with("digraph model {"));
    assert_eq!(out.matches("subgraph cluster_").count(), 2);
}

#[test]
fn parse_and_validation_errors_exit_one() {
    let dir = std::env::temp_dir().join(format!("hcif-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();

    let bad_syntax = dir.join("bad_syntax.hcif");
    std::fs::write(&bad_syntax, "automaton A location L {}").unwrap();
    let (code, _, err) = run(&["hcif", "flatten", bad_syntax.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("line 1"), "stderr: {}", err);

    let bad_model = dir.join("bad_model.hcif");
    std::fs::write(&bad_model, "automaton A { location L { init q = 1 } }").unwrap();
    let (code, _, err) = run(&["hcif", "simulate", bad_model.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("undeclared variable"), "stderr: {}", err);

    let (code, _, err) = run(&["hcif", "bisim", bad_model.to_str().unwrap(), bad_model.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(!err.is_empty());

    let missing = dir.join("missing.hcif");
    let (code, _, _) = run(&["hcif", "export-dot", missing.to_str().unwrap()]);
    assert_eq!(code, 1);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn bisim_reads_sigma_files() {
    let dir = std::env::temp_dir().join(format!("hcif-sigma-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let hier = models_dir().join("thermostat_hier.hcif");

    let sigma = dir.join("sigma.txt");
    std::fs::write(&sigma, "# two starting points\nT=25, n=0, c=0, Delta=0.5\nT=18 n=3 c=0 Delta=0.5\n").unwrap();

    let flat_out = dir.join("flat.hcif");
    let (code, _, _) = run(&["hcif", "flatten", hier.to_str().unwrap(), "-o", flat_out.to_str().unwrap()]);
    assert_eq!(code, 0);
    let (code, out, err) = run(&[
        "hcif",
        "bisim",
        hier.to_str().unwrap(),
        flat_out.to_str().unwrap(),
        "--sigma",
        sigma.to_str().unwrap(),
        "--depth",
        "4",
        "--durations",
        "0.5,1",
    ]);
    assert_eq!(code, 0, "stdout: {} stderr: {}", out, err);

    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn custom_durations_reach_deeper_behavior() {
    let hier = models_dir().join("thermostat_hier.hcif");
    let (code, out, _) = run(&[
        "hcif",
        "simulate",
        hier.to_str().unwrap(),
        "--steps",
        "6",
        "--seed",
        "3",
        "--durations",
        "2",
    ]);
    assert_eq!(code, 0);
    for line in out.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        if v["kind"] == "time" {
            assert_eq!(v["duration"], serde_json::json!(2.0));
        }
    }
}

/// The installed binary behaves like the library entry point.
#[test]
fn binary_smoke_test() {
    let hier = models_dir().join("thermostat_hier.hcif");
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_hcif"))
        .args(["export-dot", hier.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(output.status.success());
    assert!(String::from_utf8(output.stdout).unwrap().contains("digraph model"));

    let status = std::process::Command::new(env!("CARGO_BIN_EXE_hcif"))
        .args(["flatten", "/nonexistent.hcif"])
        .output()
        .unwrap();
    assert_eq!(status.status.code(), Some(1));
}
