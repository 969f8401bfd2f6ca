//! End-to-end runs of the binary: golden outputs, exit codes, and
//! byte-for-byte determinism.

mod common;

use std::io::Write;
use std::process::Command;

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_sgchrom"))
        .args(args)
        .output()
        .expect("binary should run");
    (
        out.status.code().expect("no exit code"),
        String::from_utf8(out.stdout).expect("stdout is UTF-8"),
        String::from_utf8(out.stderr).expect("stderr is UTF-8"),
    )
}

fn fixture(name: &str) -> String {
    common::fixture_path(name).to_str().expect("fixture paths are UTF-8").to_owned()
}

fn temp_graph(contents: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().expect("temp file");
    file.write_all(contents.as_bytes()).expect("write temp graph");
    file
}

#[test]
fn poly_prints_census_and_both_polynomials() {
    let (code, stdout, _) = run(&["poly", &fixture("triangle_unbalanced.sg")]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "c: 1 3 3 1\nc*: 1 3 3\nP1: 1 -3 3 -1\nP0: 1 -3 3 0\n");

    let (code, stdout, _) = run(&["poly", &fixture("triangle_balanced.sg")]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "c: 1 3 2 0\nc*: 1 3 2\nP1: 1 -3 2 0\nP0: 1 -3 2 0\n");

    let (code, stdout, _) = run(&["poly", &fixture("double_digon.sg")]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "c: 1 4 6 3\nc*: 1 4 4\nP1: 1 -4 6 -3\nP0: 1 -4 4 0\n");
}

#[test]
fn poly_handles_the_empty_graph() {
    let file = temp_graph("0 0\n");
    let (code, stdout, _) = run(&["poly", file.path().to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "c: 1\nc*:\nP1: 1\nP0: 1\n");
}

#[test]
fn poly_census_is_order_invariant() {
    let baseline = run(&["poly", &fixture("double_digon.sg")]);
    let reordered = run(&["poly", &fixture("double_digon.sg"), "--order", "3,2,1,0"]);
    assert_eq!(baseline, reordered);
}

#[test]
fn count_methods_agree_on_fixtures() {
    for method in ["brute", "ie", "nbc"] {
        let (code, stdout, _) =
            run(&["count", &fixture("triangle_unbalanced.sg"), "-k", "4", "--method", method]);
        assert_eq!(code, 0, "method {method}");
        assert_eq!(stdout, "28\n", "method {method}");

        let (code, stdout, _) = run(&[
            "count",
            &fixture("triangle_unbalanced.sg"),
            "--list",
            &fixture("triangle_12.lst"),
            "--method",
            method,
        ]);
        assert_eq!(code, 0, "method {method}");
        assert_eq!(stdout, "2\n", "method {method}");
    }

    let (code, stdout, _) =
        run(&["count", &fixture("triangle_unbalanced.sg"), "-k", "2", "--method", "brute"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "2\n");
}

#[test]
fn circuits_lists_cycles_barbells_and_broken_circuits() {
    let (code, stdout, _) = run(&["circuits", &fixture("double_digon.sg")]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "cycles: 2\n\
         \x20 [0,1] unbalanced\n\
         \x20 [2,3] unbalanced\n\
         barbells: 1\n\
         \x20 cycle [0,1] + path [] + cycle [2,3]\n\
         broken circuits: 1\n\
         \x20 [0,1,2] from barbell [0,1,2,3] multiplicity 1\n\
         minimal broken circuits: 1\n\
         \x20 [0,1,2]\n"
    );

    // Reversing the order breaks the barbell at a different edge.
    let (code, stdout, _) =
        run(&["circuits", &fixture("double_digon.sg"), "--order", "3,2,1,0"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("broken circuits: 1\n  [1,2,3] from barbell [0,1,2,3]"));
}

#[test]
fn verify_passes_on_fixtures_and_is_deterministic() {
    let first = run(&["verify", &fixture("double_digon.sg")]);
    assert_eq!(first.0, 0);
    assert_eq!(
        first.1,
        "ok: three methods agree for k = 1..=5\n\
         ok: three methods agree on 20 random list assignments (seed 0)\n\
         ok: census is invariant under 5 random edge orders\n\
         ok: counts and census are invariant under 5 random switchings\n\
         verify: all checks passed\n"
    );
    assert_eq!(first, run(&["verify", &fixture("double_digon.sg")]));

    let (code, _, _) = run(&["verify", &fixture("triangle_unbalanced.sg"), "--kmax", "4"]);
    assert_eq!(code, 0);
}

#[test]
fn minimize_reports_the_known_small_counterexample() {
    // Below the threshold (k = 2 < 3 = t1 for three edges) a list beats
    // the palette on the unbalanced triangle.
    let (code, stdout, _) = run(&["minimize", &fixture("triangle_unbalanced.sg"), "-k", "2"]);
    assert_eq!(code, 0);
    assert_eq!(
        stdout,
        "mode: any\n\
         k: 2\n\
         universe: 2\n\
         strategy: exhaustive\n\
         evaluated: 300\n\
         min: 1\n\
         canonical: 2\n\
         counterexample: true\n\
         minimizers: 3\n\
         argmin:\n\
         0: 0 1\n\
         1: -1 0\n\
         2: -1 0\n"
    );
}

#[test]
fn minimize_zero_included_matches_the_odd_polynomial() {
    let (code, stdout, _) = run(&[
        "minimize",
        &fixture("digon.sg"),
        "-k",
        "3",
        "--mode",
        "zero-included",
        "--exhaustive",
    ]);
    assert_eq!(code, 0);
    assert!(stdout.contains("mode: zero-included\n"));
    assert!(stdout.contains("min: 4\n"));
    assert!(stdout.contains("canonical: 4\n"));
    assert!(stdout.contains("counterexample: false\n"));
}

#[test]
fn minimize_random_runs_are_reproducible() {
    let args = [
        "minimize",
        &fixture("triangle_unbalanced.sg"),
        "-k",
        "3",
        "--random",
        "40",
        "--seed",
        "7",
    ];
    let first = run(&args);
    assert_eq!(first.0, 0);
    assert!(first.1.contains("strategy: random trials=40 seed=7\n"));
    assert!(first.1.contains("evaluated: 40\n"));
    assert_eq!(first, run(&args));
}

#[test]
fn switch_negates_the_cut_and_round_trips() {
    let (code, stdout, _) = run(&["switch", &fixture("triangle_unbalanced.sg"), "--at", "0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "3 3\n0 1 -\n1 2 +\n0 2 +\n");

    // Switching at the same set again restores the input.
    let file = temp_graph(&stdout);
    let (code, stdout, _) = run(&["switch", file.path().to_str().unwrap(), "--at", "0"]);
    assert_eq!(code, 0);
    assert_eq!(stdout, "3 3\n0 1 +\n1 2 +\n0 2 -\n");
}

#[test]
fn usage_errors_exit_with_one() {
    let (code, _, _) = run(&["badcmd"]);
    assert_eq!(code, 1);
    let (code, _, stderr) = run(&["count", &fixture("digon.sg")]);
    assert_eq!(code, 1);
    assert!(stderr.contains("exactly one of -k and --list"));
    let (code, _, _) = run(&[
        "count",
        &fixture("digon.sg"),
        "-k",
        "2",
        "--list",
        &fixture("triangle_12.lst"),
    ]);
    assert_eq!(code, 1);
    let (code, _, stderr) = run(&["poly", &fixture("digon.sg"), "--order", "0"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("--order lists 1 positions"));
    let (code, _, _) = run(&["poly", &fixture("digon.sg"), "--order", "0,0"]);
    assert_eq!(code, 1);
    let (code, _, _) = run(&["minimize", &fixture("digon.sg"), "-k", "2", "--random", "0"]);
    assert_eq!(code, 1);
    let (code, _, stderr) = run(&["switch", &fixture("digon.sg"), "--at", "9"]);
    assert_eq!(code, 1);
    assert!(stderr.contains("out of range"));
    let (code, _, _) = run(&["count", &fixture("digon.sg"), "-k", "0"]);
    assert_eq!(code, 1);
}

#[test]
fn input_errors_exit_with_two() {
    let (code, _, _) = run(&["poly", "does_not_exist.sg"]);
    assert_eq!(code, 2);

    let bad = temp_graph("2 1\n0 1 x\n");
    let (code, _, stderr) = run(&["poly", bad.path().to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("line 2"));

    let bad_list = temp_graph("0: 1 1\n");
    let (code, _, _) =
        run(&["count", &fixture("digon.sg"), "--list", bad_list.path().to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn resource_caps_exit_with_three() {
    let (code, _, stderr) =
        run(&["poly", &fixture("digon.sg"), "--max-subset-edges", "1"]);
    assert_eq!(code, 3);
    assert!(stderr.contains("capped"));
    let (code, _, _) = run(&["circuits", &fixture("double_digon.sg"), "--max-circuits", "1"]);
    assert_eq!(code, 3);
}

#[test]
fn help_and_version_exit_cleanly() {
    let (code, stdout, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(stdout.contains("poly"));
    let (code, _, _) = run(&["--version"]);
    assert_eq!(code, 0);
}
