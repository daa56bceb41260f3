use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use polystab::graph::{max_clique, max_independent_set, parse_dimacs, to_dimacs, Graph};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

fn polystab(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polystab"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn setup() -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("k3.col"),
        "c triangle\np edge 3 3\ne 1 2\ne 1 3\ne 2 3\n",
    )
    .unwrap();
    fs::write(dir.path().join("e3.col"), "p edge 3 0\n").unwrap();
    dir
}

#[test]
fn reduce_writes_polytope_with_meta() {
    let dir = setup();
    let out = polystab(
        dir.path(),
        &["reduce", "k3.col", "--kind", "min-radius", "--j", "2", "-o", "k3.json"],
    );
    assert_eq!(code(&out), 0);
    let summary = stdout_json(&out);
    assert_eq!((summary["n"].as_u64(), summary["k"].as_u64()), (Some(4), Some(3)));
    assert_eq!(summary["r"].as_f64(), Some(0.0));
    let file: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("k3.json")).unwrap()).unwrap();
    assert_eq!(file["meta"]["kind"], "MIN_RADIUS");
    assert_eq!(file["matrices"].as_array().unwrap().len(), 3);

    let out = polystab(dir.path(), &["reduce", "k3.col", "--kind", "max-radius", "--j", "3"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout_json(&out)["meta"]["r"].as_f64(), Some(0.5));
}

#[test]
fn reduce_rejects_small_threshold() {
    let dir = setup();
    let out = polystab(dir.path(), &["reduce", "k3.col", "--kind", "min-radius", "--j", "1"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("j must be ≥ 2"));
    let out = polystab(
        dir.path(),
        &["reduce", "missing.col", "--kind", "min-radius", "--j", "2"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn decide_exit_codes() {
    let dir = setup();
    for g in ["e3", "k3"] {
        let out = polystab(
            dir.path(),
            &[
                "reduce",
                &format!("{g}.col"),
                "--kind",
                "min-radius",
                "--j",
                "2",
                "-o",
                &format!("{g}.json"),
            ],
        );
        assert_eq!(code(&out), 0);
    }
    let yes = polystab(dir.path(), &["decide", "e3.json", "--question", "schur-exists"]);
    assert_eq!(code(&yes), 0);
    let d = stdout_json(&yes);
    assert_eq!(d["answer"], "YES");
    for w in d["witness"].as_array().unwrap() {
        assert!((w.as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }
    let no = polystab(dir.path(), &["decide", "k3.json", "--question", "schur-exists"]);
    assert_eq!(code(&no), 1);
    assert_eq!(stdout_json(&no)["answer"], "NO");

    fs::write(
        dir.path().join("raw.json"),
        r#"{"n":2,"k":2,"matrices":[[[1,0.5],[0,1]],[1,0,0,1]]}"#,
    )
    .unwrap();
    let unknown = polystab(dir.path(), &["decide", "raw.json", "--question", "m-matrix-exists"]);
    assert_eq!(code(&unknown), 3);
    assert_eq!(stdout_json(&unknown)["answer"], "UNKNOWN");

    fs::write(dir.path().join("bad.json"), "{").unwrap();
    assert_eq!(
        code(&polystab(
            dir.path(),
            &["decide", "bad.json", "--question", "schur-exists"]
        )),
        2
    );
    assert_eq!(
        code(&polystab(dir.path(), &["decide", "e3.json", "--question", "nonsense"])),
        2
    );
}

#[test]
fn reduce_then_decide_matches_the_oracle() {
    let dir = setup();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let questions = [
        ("min-radius", "schur-exists"),
        ("max-radius", "unstable-exists"),
        ("m-matrix", "m-matrix-exists"),
        ("hurwitz", "hurwitz-exists"),
    ];
    for trial in 0..6 {
        let g = Graph::random(5, 0.5, &mut rng).unwrap();
        let name = format!("g{trial}.col");
        fs::write(dir.path().join(&name), to_dimacs(&g)).unwrap();
        let g = parse_dimacs(&fs::read_to_string(dir.path().join(&name)).unwrap()).unwrap();
        let alpha = max_independent_set(&g).unwrap().size;
        let omega = max_clique(&g).unwrap().size;
        for j in 2..=5 {
            for (kind, question) in questions {
                let file = format!("g{trial}-{kind}-{j}.json");
                let out = polystab(
                    dir.path(),
                    &["reduce", &name, "--kind", kind, "--j", &j.to_string(), "-o", &file],
                );
                assert_eq!(code(&out), 0);
                let out = polystab(dir.path(), &["decide", &file, "--question", question]);
                let size = if kind == "max-radius" { omega } else { alpha };
                assert_eq!(code(&out), if size >= j { 0 } else { 1 }, "{kind} j={j} {g:?}");
                assert_eq!(stdout_json(&out)["method"], "GRAPH_ORACLE");
            }
        }
    }
}

#[test]
fn spectrum_cross_check() {
    let dir = setup();
    polystab(
        dir.path(),
        &[
            "reduce",
            "e3.col",
            "--kind",
            "min-radius",
            "--j",
            "2",
            "-o",
            "e3_j2.json",
        ],
    );
    let out = polystab(dir.path(), &["spectrum", "e3_j2.json", "--weights", "uniform"]);
    assert_eq!(code(&out), 0);
    let s = stdout_json(&out);
    assert!(s["max_deviation"].as_f64().unwrap() <= 1e-9);
    assert!((s["spectral_radius"].as_f64().unwrap() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
    let out = polystab(dir.path(), &["spectrum", "e3_j2.json", "--weights", "0.5,0.5"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn simulate_writes_trajectory() {
    let dir = setup();
    fs::write(
        dir.path().join("minus_identity.json"),
        r#"{"n":2,"k":1,"matrices":[[-1,0,0,-1]]}"#,
    )
    .unwrap();
    let out = polystab(
        dir.path(),
        &[
            "simulate",
            "minus_identity.json",
            "--policy",
            "constant:1",
            "--x0",
            "e1",
            "--horizon",
            "5",
            "-o",
            "traj.csv",
        ],
    );
    assert_eq!(code(&out), 0);
    let s = stdout_json(&out);
    assert!((s["final_norm"].as_f64().unwrap() - 6.7379e-3).abs() < 1e-7);
    let csv = fs::read_to_string(dir.path().join("traj.csv")).unwrap();
    assert!(csv.starts_with("t,x_1,x_2,active_index\n"));
    assert_eq!(csv.lines().count(), 5002);
    let out = polystab(
        dir.path(),
        &["simulate", "minus_identity.json", "--policy", "constant:2"],
    );
    assert_eq!(code(&out), 2);
}

#[test]
fn experiment_is_deterministic() {
    let dir = setup();
    let args = |out: &str| {
        vec![
            "--seed".to_string(),
            "7".into(),
            "experiment".into(),
            "--random-graphs".into(),
            "4".into(),
            "--n".into(),
            "6".into(),
            "--edge-prob".into(),
            "0.5".into(),
            "--j".into(),
            "2..4".into(),
            "--horizon".into(),
            "10".into(),
            "--step".into(),
            "1e-2".into(),
            "-o".into(),
            out.to_string(),
        ]
    };
    let run = |out: &str| {
        let a = args(out);
        let a: Vec<&str> = a.iter().map(String::as_str).collect();
        polystab(dir.path(), &a)
    };
    let first = run("a.csv");
    assert_eq!(code(&first), 0);
    assert_eq!(stdout_json(&first)["rows"].as_u64(), Some(12));
    assert_eq!(code(&run("b.csv")), 0);
    let a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(a, fs::read(dir.path().join("b.csv")).unwrap());
    assert_eq!(String::from_utf8(a).unwrap().lines().count(), 13);

    let out = polystab(
        dir.path(),
        &[
            "experiment",
            "--graphs",
            "e3.col",
            "k3.col",
            "--j",
            "2",
            "--horizon",
            "10",
            "--step",
            "1e-2",
        ],
    );
    assert_eq!(code(&out), 0);
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("e3,3,2,3,YES,"));
    assert!(csv.lines().nth(2).unwrap().starts_with("k3,3,2,1,NO,"));
}
