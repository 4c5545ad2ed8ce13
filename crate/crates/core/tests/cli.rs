use std::process::{Command, Output};

fn geocalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geocalc"))
        .args(args)
        .env_remove("GEOCALC_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

const HEADER: &str =
    "scenario,n,m,field,mode,quad_order,lhs_norm,rhs_norm,residual,rel_residual,observed_order,seconds";

#[test]
fn flat_verification_passes_and_prints_csv() {
    let out = geocalc(&[
        "verify",
        "--manifold",
        "identity_cube:2",
        "--field",
        "x1*x2*e1 + x2**2*e12",
        "--order",
        "3",
        "--id",
        "flat",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(HEADER));
    let row = lines.next().unwrap();
    assert!(row.starts_with("flat,2,2,"), "{row}");
    assert_eq!(lines.next(), None);
}

#[test]
fn breach_exits_one() {
    // order 1 cannot integrate x1**3 exactly, so the two sides disagree
    let out = geocalc(&[
        "verify",
        "--manifold",
        "polar_square",
        "--field",
        "x1**3*x2*e1 + sin(3*x2)*e2",
        "--order",
        "1",
        "--tolerance",
        "1e-12",
    ]);
    assert_eq!(code(&out), 1);
}

#[test]
fn usage_errors_exit_two() {
    let cases: &[&[&str]] = &[
        &["verify", "--manifold", "identity_cube:2", "--field", "x1*e1", "--order", "0"],
        &["verify", "--manifold", "identity_cube:2", "--field", "x1 +* e1"],
        &["verify", "--manifold", "no_such_cube", "--field", "x1"],
        &["verify", "--manifold", "identity_cube:2"],
        &["verify"],
        &["hk"],
        &["frobnicate"],
        &["grad", "--field", "x1", "--at", "0.5"],
    ];
    for args in cases {
        let out = geocalc(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn help_exits_zero() {
    assert_eq!(code(&geocalc(&["--help"])), 0);
    assert_eq!(code(&geocalc(&["study", "--help"])), 0);
}

#[test]
fn hk_builtin_reaches_minus_one() {
    let out = geocalc(&["hk", "--builtin", "pathological", "--tol", "1e-4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let value: f64 = text
        .split_whitespace()
        .find_map(|kv| kv.strip_prefix("value="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((value + 1.0).abs() <= 1e-4, "{text}");
    assert!(text.contains("converged=true"));
}

#[test]
fn hk_expression_with_expected_value() {
    let ok = geocalc(&["hk", "--expr", "cos(x1)", "--a", "-1", "--b", "2", "--tol", "1e-8", "--expect", "1.7507684116335782"]);
    assert_eq!(code(&ok), 0, "{}", stdout(&ok));
    let off = geocalc(&["hk", "--expr", "cos(x1)", "--tol", "1e-8", "--expect", "0.5"]);
    assert_eq!(code(&off), 1);
}

#[test]
fn scenario_files_are_sorted_and_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("campaign.json");
    std::fs::write(
        &path,
        r#"[
            {"id": "b_cyl", "manifold": "cylinder_patch", "field": "x1*x3*e1 + x2**2*e3", "order": 8, "tolerance": 1e-6},
            {"id": "a_flat", "manifold": "identity_cube:3", "field": "x1*x2*x3*e123 + x3**2*e1", "order": 3},
            {"id": "c_expr", "manifold": ["x1", "x2", "x1*x2"], "n": 2, "field": "x3*e1", "order": 8, "tolerance": 1e-6}
        ]"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_geocalc"))
            .args(["verify", "--scenario", p, "--omit-timing"])
            .env("GEOCALC_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert_eq!(code(&one), 0, "{}", String::from_utf8_lossy(&one.stderr));
    assert_eq!(one.stdout, four.stdout);
    let text = stdout(&one);
    let ids: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').next().unwrap()).collect();
    assert_eq!(ids, ["a_flat", "b_cyl", "c_expr"]);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",0")));
}

#[test]
fn csv_file_output() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let out = geocalc(&[
        "study",
        "refinement",
        "--manifold",
        "cylinder_patch",
        "--field",
        "x1*x3*e1 + x2**2*e3 + x1*x2*e23",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().next(), Some(HEADER));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    let order: f64 = row[10].parse().unwrap();
    assert!(order >= 1.5, "{order}");
}

#[test]
fn unknown_scenario_keys_are_usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"manifold": "identity_cube:2", "field": "x1", "colour": "red"}"#).unwrap();
    let out = geocalc(&["verify", "--scenario", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
}

#[test]
fn invalid_thread_count_is_rejected() {
    let out = Command::new(env!("CARGO_BIN_EXE_geocalc"))
        .args(["hk", "--builtin", "pathological"])
        .env("GEOCALC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn grad_prints_both_estimators() {
    let out = geocalc(&["grad", "--manifold", "cylinder_patch", "--field", "x1*x2*e3", "--at", "0.4,0.6"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = stdout(&out);
    assert!(text.contains("coordinate =") && text.contains("limit      ="));
    let diff: f64 = text
        .lines()
        .find_map(|l| l.strip_prefix("difference = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(diff < 1e-5, "{text}");
}

#[test]
fn monogenic_control_is_flagged() {
    let good = geocalc(&["monogenic", "--field", "x1 + x2*e12"]);
    assert_eq!(code(&good), 0, "{}", String::from_utf8_lossy(&good.stderr));
    let bad = geocalc(&["monogenic", "--field", "x1*e1 + x2*e2"]);
    assert_eq!(code(&bad), 1);
    assert!(String::from_utf8_lossy(&bad.stderr).contains("not monogenic"));
}

#[test]
fn shrinking_study_passes() {
    let out = geocalc(&["study", "shrinking", "--field", "sqrt(x1)", "--omit-timing"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(stdout(&out).lines().count(), 5);
}
