//! Black-box tests of the command-line interface: created files parse and
//! satisfy the library's own invariants, repeated runs with one seed agree,
//! and exit codes distinguish usage errors from decode failures.

use std::process::{Command, Output};

use nalgebra::DVector;
use rand::Rng;

use polarcs::decode::{DecodeStatus, RecoverMethod};
use polarcs::io::{construction_from_json, read_text, vector_to_json, write_text};
use polarcs::rng::substream;
use polarcs::sensing::SensingSystem;

fn load_system(path: &std::path::Path) -> SensingSystem {
    construction_from_json(&read_text(path).unwrap())
        .unwrap()
        .into_system()
        .unwrap()
}

fn polarcs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polarcs"))
        .args(args)
        .output()
        .expect("binary must launch")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

#[test]
fn construct_writes_a_sound_system() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("system.json");
    let out = polarcs(&[
        "construct",
        "--n",
        "5",
        "--p",
        "0.1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));

    let sys = load_system(&path);
    assert_eq!(sys.block_size(), 32);
    assert_eq!(sys.dimension(), 29); // ceil(0.9 * 32)
    let fa = sys.measurement_matrix() * sys.coding_matrix();
    assert!(fa.abs().max() <= 1e-10, "stored system must annihilate");
}

#[test]
fn mids_prints_both_csv_layouts() {
    let out = polarcs(&["mids", "--n", "3", "--p", "0.2"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "index,mid");
    assert_eq!(lines.len(), 9, "header plus one row per coordinate");

    let out = polarcs(&["mids", "--n", "3", "--p", "0.2", "--sorted"]);
    let text = stdout_of(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "rank,mid");
    let vals: Vec<f64> = lines[1..]
        .iter()
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    for w in vals.windows(2) {
        assert!(w[0] >= w[1], "sorted output must be non-increasing");
    }
}

fn strip_wall_time(csv: &str) -> String {
    csv.lines()
        .map(|line| {
            let (head, _) = line.rsplit_once(',').expect("csv rows have columns");
            head
        })
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn simulate_is_deterministic_for_a_fixed_seed() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| -> String {
        let path = dir.path().join(name);
        let out = polarcs(&[
            "simulate",
            "--m",
            "16",
            "--grid",
            "0:0.2:0.1",
            "--trials",
            "25",
            "--seed",
            "7",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
        read_text(&path).unwrap()
    };
    let first = run("a.csv");
    let second = run("b.csv");
    assert_eq!(
        strip_wall_time(&first),
        strip_wall_time(&second),
        "same seed must reproduce every column except wall time"
    );
    assert_eq!(first.lines().count(), 4, "header plus three grid points");
}

#[test]
fn recover_round_trips_a_sparse_error_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let sys_path = dir.path().join("system.json");
    let out = polarcs(&[
        "construct",
        "--n",
        "4",
        "--p",
        "0.1",
        "--N",
        "8",
        "--out",
        sys_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let sys = load_system(&sys_path);

    let mut rng = substream(42, 0);
    let mut e = DVector::zeros(16);
    e[5] = 1.0 + rng.random::<f64>();
    let y_prime = sys.measure(&e).unwrap();
    let y_path = dir.path().join("measurements.json");
    write_text(&y_path, &vector_to_json(&y_prime)).unwrap();

    for method in ["l0", "l1"] {
        let est_path = dir.path().join(format!("estimate_{method}.csv"));
        let out = polarcs(&[
            "recover",
            "--system",
            sys_path.to_str().unwrap(),
            "--measurements",
            y_path.to_str().unwrap(),
            "--method",
            method,
            "--out",
            est_path.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{method} stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let text = read_text(&est_path).unwrap();
        let got: Vec<f64> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
            .collect();
        assert_eq!(got.len(), 16);
        for (i, (&gi, &ei)) in got.iter().zip(e.iter()).enumerate() {
            assert!(
                (gi - ei).abs() <= 1e-6,
                "{method} coordinate {i}: {gi} vs {ei}"
            );
        }
    }

    // The library agrees with what the files say.
    let direct = polarcs::decode::recover_sparse(&sys, &y_prime, RecoverMethod::L0Oracle).unwrap();
    assert_eq!(direct.status, DecodeStatus::Success);
}

#[test]
fn infodim_reports_the_uniform_law() {
    let out = polarcs(&[
        "infodim",
        "--law",
        "uniform",
        "--levels",
        "1024",
        "--samples",
        "200000",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    let dim = doc["dim_estimate"].as_f64().unwrap();
    assert!((dim - 1.0).abs() <= 0.05, "uniform dimension estimate {dim}");
    assert_eq!(doc["saturated"], serde_json::Value::Bool(false));
}

#[test]
fn exit_codes_distinguish_usage_errors() {
    // Unknown subcommand and malformed flags are usage errors.
    assert_eq!(polarcs(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(polarcs(&["construct", "--n"]).status.code(), Some(1));
    // Domain errors from the library surface as exit 1 with a message.
    let out = polarcs(&["construct", "--n", "5", "--p", "1.5", "--out", "/dev/null"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("error"),
        "domain failures must explain themselves"
    );
    // Missing input files are reported, not panicked over.
    let out = polarcs(&[
        "recover",
        "--system",
        "/nonexistent/system.json",
        "--measurements",
        "/nonexistent/y.json",
    ]);
    assert_eq!(out.status.code(), Some(1));
    // Help and version are successes.
    assert_eq!(polarcs(&["--help"]).status.code(), Some(0));
    assert_eq!(polarcs(&["--version"]).status.code(), Some(0));
}

#[test]
fn help_names_every_subcommand() {
    let text = stdout_of(&polarcs(&["--help"]));
    for cmd in ["construct", "mids", "simulate", "recover", "infodim"] {
        assert!(text.contains(cmd), "help must mention `{cmd}`");
    }
}
