use std::process::Command;

use pellphi_cli::{run_with_env, EXIT_COUNTEREXAMPLE, EXIT_OK, EXIT_USAGE};
use pellphi_core::render::from_json;
use pellphi_core::Status;

fn pellphi(args: &[&str]) -> (i32, String, String) {
    pellphi_env(args, None)
}

fn pellphi_env(args: &[&str], budget: Option<&str>) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("pellphi").chain(args.iter().copied());
    let code = run_with_env(argv, budget.map(String::from), &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn verify_perfect_powers() {
    let (code, out, _) = pellphi(&["verify", "lemma-2.2", "--max-n", "200"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("witness (7) 169  13^2"), "{out}");
}

#[test]
fn pell_table_row() {
    let (code, out, _) = pellphi(&["table", "pell", "--mod", "11"]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out,
        "11 | 0, 1, 2, 5, 1, 7, 4, 4, 1, 6, 2, 10, 0, 10, 9, 6, 10, 4, 7, 7, 10, 5, 9, 1 | 24\n"
    );
}

#[test]
fn default_tables() {
    let (_, out, _) = pellphi(&["table", "assoc-pell"]);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 4);
    assert_eq!(lines[2], "8 | 1, 1, 3, 7 | 4");
}

#[test]
fn repdigit_theorem_passes() {
    let (code, out, _) = pellphi(&["verify", "theorem-3.1", "--max-n", "60", "--min-m", "2"]);
    assert_eq!(code, EXIT_OK, "{out}");
}

#[test]
fn replay_reports_mismatches() {
    let (code, out, _) = pellphi(&["replay", "theorem-3.1"]);
    assert_eq!(code, EXIT_COUNTEREXAMPLE);
    assert!(out.contains("trace (fails)"));
    assert!(out.contains("expected {6, 7} (mod 11)"));
}

#[test]
fn totient_bound_counterexample_exit_code() {
    let (code, out, _) = pellphi(&["verify", "lemma-2.11", "--max-n", "1000"]);
    assert_eq!(code, EXIT_COUNTEREXAMPLE);
    assert!(out.contains("witness (4) 2"));
}

#[test]
fn preimages_and_sequences() {
    let (code, out, _) = pellphi(&["preimages", "pell", "--mod", "11", "--residue", "4"]);
    assert_eq!((code, out.as_str()), (EXIT_OK, "{6, 7, 17} (mod 24)\n"));
    let (_, out, _) = pellphi(&["seq", "balancing", "--max-n", "3"]);
    assert_eq!(out, "0 0\n1 1\n2 6\n3 35\n");
    let (_, out, _) = pellphi(&["seq", "pell", "--max-n", "5", "--json"]);
    let terms: Vec<String> = serde_json::from_str(&out).unwrap();
    assert_eq!(terms, ["0", "1", "2", "5", "12", "29"]);
}

#[test]
fn search_command() {
    let (code, out, _) = pellphi(&["search", "assoc-pell", "--max-n", "16", "--min-m", "1", "--json"]);
    assert_eq!(code, EXIT_OK);
    let r = from_json(&out).unwrap();
    let idx: Vec<u64> = r.witnesses.iter().map(|w| w.index[0]).collect();
    assert_eq!(idx, [0, 1, 2, 3]);
}

#[test]
fn json_output_is_deterministic() {
    let args = ["verify", "lemma-2.7", "--max-n", "40", "--json"];
    let strip = |s: String| {
        let mut r = from_json(&s).unwrap();
        r.meta.elapsed = Default::default();
        serde_json::to_string(&r).unwrap()
    };
    let (_, a, _) = pellphi(&args);
    let (_, b, _) = pellphi(&[&args[..], &["--jobs", "1"]].concat());
    assert_eq!(strip(a), strip(b));
}

#[test]
fn usage_errors() {
    for args in [
        &["frobnicate"][..],
        &["verify"],
        &["verify", "lemma-9.9"],
        &["table", "fibonacci"],
        &["table", "pell", "--mod", "1"],
        &["preimages", "pell", "--mod", "11"],
        &["verify", "lemma-2.2", "--jobs", "0"],
        &["replay", "lemma-2.2"],
    ] {
        let (code, _, err) = pellphi(args);
        assert_eq!(code, EXIT_USAGE, "{args:?}");
        assert!(err.contains("usage: pellphi <command>"), "{args:?}: {err}");
    }
}

#[test]
fn budget_from_environment() {
    let (code, out, _) = pellphi_env(&["verify", "lemma-2.2", "--max-n", "10", "--json"], Some("3"));
    assert_eq!(code, EXIT_OK);
    let r = from_json(&out).unwrap();
    assert_eq!(r.meta.budget.as_secs(), 3);
    assert_eq!(r.status, Status::Verified);
    let (code, _, _) = pellphi_env(&["verify", "lemma-2.2"], Some("soon"));
    assert_eq!(code, EXIT_USAGE);
    let (_, out, _) = pellphi_env(&["verify", "lemma-2.2", "--max-n", "10", "--budget", "7", "--json"], Some("3"));
    assert_eq!(from_json(&out).unwrap().meta.budget.as_secs(), 7);
}

#[test]
fn help_and_version_exit_zero() {
    let (code, out, _) = pellphi(&["--help"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.contains("Usage"));
    let (code, out, _) = pellphi(&["--version"]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("pellphi "));
}

#[test]
fn binary_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_pellphi");
    let code = |args: &[&str]| Command::new(bin).args(args).output().unwrap().status.code();
    assert_eq!(code(&["verify", "table-1"]), Some(EXIT_OK));
    assert_eq!(code(&["replay", "theorem-3.1"]), Some(EXIT_COUNTEREXAMPLE));
    assert_eq!(code(&["nonsense"]), Some(EXIT_USAGE));
}
