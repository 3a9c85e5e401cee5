use std::path::PathBuf;
use std::process::Command;

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn euclid(args: &[&str]) -> (i32, String, String) {
    euclid_env(args, &[])
}

fn euclid_env(args: &[&str], env: &[(&str, &str)]) -> (i32, String, String) {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_euclid"));
    cmd.current_dir(root()).args(args).env_remove("EUCLID_HEIGHT_CAP");
    for (k, v) in env {
        cmd.env(k, v);
    }
    let out = cmd.output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8(out.stdout).unwrap(),
        String::from_utf8(out.stderr).unwrap(),
    )
}

#[test]
fn wantzel_presets_and_polynomials() {
    let (code, out, _) = euclid(&["wantzel", "cube-doubling"]);
    assert_eq!((code, out.as_str()), (0, "NotConstructible: irreducible degree 3 is not a power of 2\n"));
    let (code, out, _) = euclid(&["wantzel", "x^2 - 2"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("NecessaryConditionHolds(2)"));
    let (code, _, err) = euclid(&["wantzel", "x^2 - 1"]);
    assert_eq!(code, 2);
    assert!(err.contains("reducible"));
}

#[test]
fn closure_of_a_lone_circle_is_stuck() {
    let (code, out, _) = euclid(&["closure", "configs/circle-only.cfg", "--rounds", "5", "--target", "center"]);
    assert_eq!((code, out.as_str()), (0, "NoWithinBudget (fixed point at round 0)\n"));
    let (code, out, _) = euclid(&["closure", "configs/ab.cfg", "--rounds", "3", "--target", "M"]);
    assert_eq!((code, out.as_str()), (0, "Yes(2)\n"));
}

#[test]
fn run_midpoint_writes_a_stable_svg() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    let args = |p: &PathBuf| {
        vec![
            "run".to_string(),
            "corpus/midpoint.construct".into(),
            "configs/ab.cfg".into(),
            "--svg".into(),
            p.to_str().unwrap().to_string(),
        ]
    };
    let run = |p: &PathBuf| {
        let v = args(p);
        euclid(&v.iter().map(String::as_str).collect::<Vec<_>>())
    };
    let (code, out, _) = run(&a);
    assert_eq!((code, out.as_str()), (0, "M = (1, 0)\n"));
    assert_eq!(run(&b).1, out);
    let (sa, sb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(sa, sb);
    let svg = String::from_utf8(sa).unwrap();
    assert!(svg.starts_with("<svg"));
    assert_eq!(svg.matches(r#"class="point target""#).count(), 1);
}

#[test]
fn games_report_outcomes_with_exit_zero() {
    let (code, out, _) = euclid(&[
        "game",
        "configs/ab.cfg",
        "--target",
        "M",
        "--alice",
        "midpoint",
        "--bob",
        "certificate:rational",
    ]);
    assert_eq!(code, 0);
    assert!(out.ends_with("outcome: AliceWins(6)\n"), "{out}");
    let (code, out, _) = euclid(&[
        "game",
        "configs/circle-center.cfg",
        "--target",
        "O",
        "--alice",
        "circle_center",
        "--bob",
        "sampling:3",
        "--max-moves",
        "2",
    ]);
    assert_eq!(code, 0);
    assert!(out.ends_with("outcome: Timeout(2)\n"), "{out}");
}

#[test]
fn densify_reports_a_grid_point() {
    let (code, out, _) = euclid(&["densify", "configs/triangle.cfg", "--target", "T", "--eps", "1/64"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("T = ("), "{out}");
    let (code, out, _) = euclid(&["--json", "densify", "configs/triangle.cfg", "--target", "T", "--eps", "1/64"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["straightedge_only"], true);
    assert!(!v["steps"].as_array().unwrap().is_empty());
}

#[test]
fn every_subcommand_speaks_json() {
    let cases: &[&[&str]] = &[
        &["--json", "wantzel", "heptagon"],
        &["--json", "closure", "configs/ab.cfg", "--rounds", "1"],
        &["--json", "closure", "configs/ab.cfg", "--rounds", "2", "--target", "M"],
        &["--json", "run", "corpus/midpoint.construct", "configs/ab.cfg"],
        &["--json", "game", "configs/ab.cfg", "--target", "M", "--alice", "midpoint"],
        &["--json", "verify-corpus", "midpoint", "--trials", "2", "--seeds", "1"],
    ];
    for args in cases {
        let (code, out, err) = euclid(args);
        assert_eq!(code, 0, "{args:?}: {err}");
        serde_json::from_str::<serde_json::Value>(&out).unwrap_or_else(|e| panic!("{args:?}: {e}"));
    }
}

#[test]
fn verify_corpus_marks_the_broken_entry_as_expected() {
    let (code, out, _) = euclid(&["verify-corpus", "incenter_broken", "--trials", "4", "--seeds", "2"]);
    assert_eq!(code, 0);
    assert!(out.contains("FAIL (trial") && out.contains("(expected)"), "{out}");
}

#[test]
fn input_and_resource_errors_have_their_own_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.cfg");
    std::fs::write(&bad, "point A = (0, 0)\npoint A = (1, 0)\n").unwrap();
    let (code, _, err) = euclid(&["closure", bad.to_str().unwrap(), "--rounds", "1"]);
    assert_eq!(code, 2);
    assert!(err.contains("line 2"), "{err}");
    assert_eq!(euclid(&["nonsense"]).0, 2);
    assert_eq!(euclid(&["closure", "configs/missing.cfg", "--rounds", "1"]).0, 2);
    let (code, _, err) = euclid_env(
        &["run", "corpus/midpoint.construct", "configs/ab.cfg"],
        &[("EUCLID_HEIGHT_CAP", "0")],
    );
    assert_eq!(code, 3, "{err}");
    assert_eq!(euclid(&["closure", "configs/ab.cfg", "--rounds", "2", "--max-objects", "10"]).0, 3);
}

#[test]
fn scripted_oracle_answers_arbitrary_points() {
    let dir = tempfile::tempdir().unwrap();
    let script = dir.path().join("answers.txt");
    // the first answer must lie inside the circle
    std::fs::write(&script, "(5, 5)\n").unwrap();
    let oracle = format!("script:{}", script.display());
    let (code, out, err) = euclid(&[
        "run",
        "corpus/circle_center.construct",
        "configs/circle-center.cfg",
        "--oracle",
        &oracle,
    ]);
    assert_eq!(code, 2, "{out}");
    assert!(err.contains("run failed"), "{err}");
    std::fs::write(&script, "(1/4, -1)\n(1/2, 3)\n(3, 0)\n").unwrap();
    let (code, out, err) = euclid(&[
        "run",
        "corpus/circle_center.construct",
        "configs/circle-center.cfg",
        "--oracle",
        &oracle,
    ]);
    assert_eq!((code, out.as_str()), (0, "O = (1/3, -1)\n"), "{err}");
}
