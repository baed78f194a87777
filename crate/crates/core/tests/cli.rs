//! End-to-end tests of the command-line surface: flag handling, output
//! formats, exit codes, and cache behavior.

use std::path::Path;
use std::process::{Command, Output};

use entropy_cumulants::convert;
use entropy_cumulants::engine::Engine;
use entropy_cumulants::symexpr::SymExpr;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_entropy-cumulants")
}

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

#[test]
fn cumulant_latex_contains_variance_terms() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["cumulant", "--of", "s", "--order", "2", "--format", "latex"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("\\psi_{1}(mn)"), "{text}");
    assert!(text.contains("\\psi_{1}(n)"), "{text}");
}

#[test]
fn eval_mean_entropy_thirty_digits() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "eval", "--of", "s", "--order", "1", "--m", "2", "--n", "2", "--digits", "30",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "0.333333333333333333333333333333");
}

#[test]
fn verify_degenerate_subsystem_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "verify", "--m", "1", "--n", "5", "--orders", "1,2", "--samples", "1000", "--seed",
            "7",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let text = stdout(&out);
    assert!(text.contains("\"exact\": \"0\""), "{text}");
    assert!(text.contains("\"pass\": true"), "{text}");
}

#[test]
fn verify_failure_maps_to_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    // an absurdly tight threshold cannot pass on real samples
    let out = run(
        &[
            "verify", "--m", "2", "--n", "2", "--orders", "1", "--samples", "2000", "--seed",
            "1", "--threshold", "1e-6",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(2), "{}", stdout(&out));
    assert!(stdout(&out).contains("\"pass\": false"));
}

#[test]
fn usage_errors_map_to_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    for args in [
        vec!["cumulant", "--of", "q", "--order", "2"],
        vec!["cumulant", "--of", "s"],
        vec!["cumulant", "--of", "s", "--order", "2", "--joint", "T:1"],
        vec!["eval", "--of", "s", "--order", "1", "--m", "3", "--n", "2"],
        vec!["verify", "--m", "2", "--n", "3", "--orders", "9"],
        vec!["nonsense"],
    ] {
        let out = run(&args, tmp.path());
        assert_eq!(out.status.code(), Some(1), "args {args:?}");
    }
}

#[test]
fn help_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["--help"], tmp.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn json_output_round_trips_to_the_same_expression() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &["cumulant", "--of", "s", "--order", "2", "--format", "json"],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let parsed = SymExpr::from_json_str(stdout(&out).trim()).unwrap();
    let mut engine = Engine::new();
    let expect = convert::cumulant_s(&mut engine, 2).unwrap();
    assert!(parsed.expr_equal(&expect).unwrap());
}

#[test]
fn cold_and_warm_cache_runs_print_identical_output() {
    let tmp = tempfile::tempdir().unwrap();
    let args = ["cumulant", "--of", "s", "--order", "3", "--format", "json"];
    let cold = run(&args, tmp.path());
    assert_eq!(cold.status.code(), Some(0));
    // default cache directory now holds the joint-cumulant entries
    assert!(tmp.path().join(".cumcache").join("T_1_3.json").exists());
    let warm = run(&args, tmp.path());
    assert_eq!(warm.status.code(), Some(0));
    assert_eq!(stdout(&cold), stdout(&warm));
}

#[test]
fn cache_subcommands() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(&["mean", "--of", "t", "--k", "2"], tmp.path());
    assert_eq!(out.status.code(), Some(0));

    let listed = run(&["cache", "list"], tmp.path());
    assert_eq!(listed.status.code(), Some(0));
    let names = stdout(&listed);
    assert!(names.contains("T_2_1.json"), "{names}");

    let checked = run(&["cache", "check"], tmp.path());
    assert_eq!(checked.status.code(), Some(0));
    assert!(stdout(&checked).lines().all(|l| l.starts_with("ok ")));

    // corrupt one entry: check reports it and exits 3
    let victim = tmp.path().join(".cumcache").join("T_2_1.json");
    let body = std::fs::read_to_string(&victim).unwrap();
    std::fs::write(&victim, body.replace("\"num\"", "\"mun\"")).unwrap();
    let checked = run(&["cache", "check"], tmp.path());
    assert_eq!(checked.status.code(), Some(3));
    assert!(stdout(&checked).contains("corrupt"));

    let cleared = run(&["cache", "clear"], tmp.path());
    assert_eq!(cleared.status.code(), Some(0));
    let listed = run(&["cache", "list"], tmp.path());
    assert_eq!(stdout(&listed).trim(), "");
}

#[test]
fn joint_cumulant_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run(
        &[
            "cumulant", "--of", "t", "--order", "2", "--joint", "R:1", "--format", "text",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    // kappa(R, T) = kappa(T) + kappa(R): pure psi_0 structure
    assert!(stdout(&out).contains("psi_0(m+alpha)"));
}
