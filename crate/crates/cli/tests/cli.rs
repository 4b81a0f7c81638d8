use std::path::PathBuf;
use std::process::{Command, Output};

use spantopos_cli::{run, Command as Cmd, Format, RunConfig, Source};

fn spantopos(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spantopos"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("data")
        .join(name)
        .display()
        .to_string()
}

#[test]
fn selftest_on_finset_exits_zero() {
    let o = spantopos(&["selftest", "--topos", "finset"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("all checks pass"));
}

#[test]
fn eval_closed_true_formula() {
    let o = spantopos(&["eval", "--topos", "finset", "--formula", "forall x:two. x = x"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("value: true"));
}

#[test]
fn eval_closed_false_formula() {
    let o = spantopos(&["eval", "--topos", "finset", "--formula", "exists x:two. not x = x"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("value: false"));
}

#[test]
fn eval_excluded_middle_fails_in_sierpinski_file() {
    let file = data("sierpinski.topos");
    let o = spantopos(&[
        "eval",
        "--topos",
        &file,
        "--formula",
        "forall x:Y. mem(x, S) or not mem(x, S)",
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn eval_open_formula_prints_extension() {
    let file = data("sierpinski.topos");
    let o = spantopos(&["eval", "--topos", &file, "--formula", "mem(x:F, R)"]);
    assert_eq!(o.status.code(), Some(2));
    let out = stdout(&o);
    assert!(out.contains("extension at 0: {r}"), "{out}");
    assert!(out.contains("extension at 1: {p}"), "{out}");
}

#[test]
fn booleanize_sierpinski_inverts_b() {
    let o = spantopos(&["booleanize", "--topos", "sierpinski", "--depth", "2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("b invertible: yes"));
}

#[test]
fn booleanize_with_slice_functor_reports_reflection() {
    let functor = data("slice_y0.functor");
    let o = spantopos(&["booleanize", "--topos", "sierpinski", "--functor", &functor]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let out = stdout(&o);
    assert!(out.contains("== reflection =="));
    assert!(!out.contains("FAIL"));
}

#[test]
fn check_allegory_on_file_passes() {
    let o = spantopos(&["check-allegory", "--topos", &data("sierpinski.topos")]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("modular_law_holds"));
}

#[test]
fn adjoin_reports_hom_tables() {
    let o = spantopos(&["adjoin", "--topos", &data("sierpinski.topos"), "--object", "G"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("hom(G, G): T: 2, T[x]: 8"));
}

#[test]
fn malformed_file_is_an_input_error_with_position() {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    let path = dir.join("broken.topos");
    std::fs::write(&path, "[object A]\n*: a b\n[morphism f : A -> B]\n*: a -> x\n").unwrap();
    let o = spantopos(&["eval", "--topos", &path.display().to_string(), "--formula", "true"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("line 3"), "{}", stdout(&o));
}

#[test]
fn bad_formula_is_an_input_error() {
    let o = spantopos(&["eval", "--topos", "finset", "--formula", "forall x:two. ("]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("syntax error at 1:"));
}

#[test]
fn records_format_has_one_record_per_line() {
    let o = spantopos(&["check-allegory", "--topos", "finset", "--format", "records"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.lines().all(|l| l.starts_with("kind=")));
    assert!(out
        .lines()
        .any(|l| l.contains("op=modular_law_holds") && l.contains("status=pass")));
}

#[test]
fn same_seed_same_report() {
    let cfg = RunConfig {
        topos: Some(Source::File(data("sierpinski.topos").into())),
        seed: 7,
        ..RunConfig::new(Cmd::CheckAllegory)
    };
    assert_eq!(run(&cfg), run(&cfg));
    let records = RunConfig {
        format: Format::Records,
        ..cfg
    };
    assert_eq!(run(&records), run(&records));
}
