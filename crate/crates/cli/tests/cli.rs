use std::path::Path;
use std::process::Command;

use rootwave::constants::theorem3_constant;
use rootwave_cli::record::RunRecord;

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = rootwave_cli::run(
        std::iter::once("rootwave").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn path(dir: &tempfile::TempDir, name: &str) -> String {
    dir.path().join(name).to_str().unwrap().to_string()
}

#[test]
fn sum_decades_reaches_theorem3_constant() {
    let (code, out, _) = run(&[
        "sum",
        "--poly",
        "(1,0)(1,1)(2,1)",
        "--x",
        "1000000",
        "--checkpoints",
        "decades",
    ]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().next().unwrap(), "x,count,re,im,ratio_re");
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[5][0], "1000000");
    let ratio: f64 = rows[5][4].parse().unwrap();
    assert!((ratio - theorem3_constant(10_000_000).unwrap().value).abs() < 0.05);
}

#[test]
fn sum_quadratic_factor_and_explicit_checkpoints() {
    let (code, out, _) = run(&[
        "sum",
        "--poly",
        "(1,0) * q",
        "--x",
        "1000",
        "--checkpoints",
        "500, 100",
        "--h",
        "2",
    ]);
    assert_eq!(code, 0);
    let xs: Vec<String> = csv_rows(&out).into_iter().map(|r| r[0].clone()).collect();
    assert_eq!(xs, ["100", "500", "1000"]);
}

#[test]
fn sum_input_errors_map_to_exit_codes() {
    assert_eq!(run(&["sum", "--poly", "(1,0)", "--x", "0"]).0, 2);
    assert_eq!(run(&["sum", "--poly", "(1,0", "--x", "10"]).0, 2);
    assert_eq!(run(&["sum", "--poly", "(2,4)", "--x", "10"]).0, 2);
    assert_eq!(run(&["sum", "--x", "10"]).0, 2);
    assert_eq!(
        run(&["sum", "--poly", "(1,0)", "--x", "10", "--h", "0"]).0,
        2
    );
    assert_eq!(
        run(&["sum", "--poly", "(1,0)", "--x", "10", "--checkpoints", "11"]).0,
        2
    );
    assert_eq!(
        run(&["sum", "--poly", "(1,0)", "--x", "10", "--out", "a.txt"]).0,
        2
    );
    assert_eq!(
        run(&["sum", "--poly", "(1,0)", "--x", "99999999999999999999"]).0,
        2
    );
    assert_eq!(
        run(&["sum", "--poly", "(1,0)", "--x", "1000000000000000000"]).0,
        3
    );
    assert_eq!(run(&["frobnicate"]).0, 2);
    let (code, out, _) = run(&["--help"]);
    assert_eq!(code, 0);
    assert!(out.contains("pair := "));
}

#[test]
fn same_threads_give_identical_files() {
    let dir = tempfile::tempdir().unwrap();
    let args = |out: &str| -> Vec<String> {
        [
            "sum",
            "--poly",
            "(1,0)(1,1)",
            "--x",
            "200000",
            "--checkpoints",
            "decades",
            "--threads",
            "2",
            "--out",
            out,
        ]
        .iter()
        .map(|s| s.to_string())
        .collect()
    };
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    for p in [&a, &b] {
        let v = args(p);
        assert_eq!(run(&v.iter().map(String::as_str).collect::<Vec<_>>()).0, 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let (a, b) = (path(&dir, "a.json"), path(&dir, "b.json"));
    for p in [&a, &b] {
        let v = args(p);
        assert_eq!(run(&v.iter().map(String::as_str).collect::<Vec<_>>()).0, 0);
    }
    let (mut ra, mut rb) = (
        RunRecord::load(Path::new(&a)).unwrap(),
        RunRecord::load(Path::new(&b)).unwrap(),
    );
    assert_eq!(ra.schema_version, 1);
    assert_eq!(ra.thread_count, 2);
    ra.wall_time = 0.0;
    rb.wall_time = 0.0;
    assert_eq!(ra.to_json(), rb.to_json());
}

#[test]
fn resume_matches_fresh_run() {
    let dir = tempfile::tempdir().unwrap();
    let (first, resumed, fresh) = (
        path(&dir, "first.json"),
        path(&dir, "resumed.json"),
        path(&dir, "fresh.json"),
    );
    let base = [
        "sum",
        "--poly",
        "(1,0)(1,1)(2,1)",
        "--h",
        "3",
        "--checkpoints",
        "decades",
    ];
    let with = |extra: &[&str]| -> Vec<String> {
        base.iter().chain(extra).map(|s| s.to_string()).collect()
    };
    let call = |v: Vec<String>| run(&v.iter().map(String::as_str).collect::<Vec<_>>()).0;
    assert_eq!(call(with(&["--x", "150000", "--out", &first])), 0);
    assert_eq!(
        call(with(&[
            "--x", "3000000", "--out", &resumed, "--resume", &first
        ])),
        0
    );
    assert_eq!(call(with(&["--x", "3000000", "--out", &fresh])), 0);
    let r = RunRecord::load(Path::new(&resumed)).unwrap().checkpoints;
    let f = RunRecord::load(Path::new(&fresh)).unwrap().checkpoints;
    let old = RunRecord::load(Path::new(&first)).unwrap().checkpoints;
    assert!(r.checkpoints.starts_with(&old.checkpoints));
    assert_eq!(r.values[..old.len()], old.values[..]);
    for &x in &f.checkpoints {
        let (a, b) = (r.value_at(x).unwrap(), f.value_at(x).unwrap());
        assert!((a - b).norm() <= 1e-9 * b.norm().max(1.0), "x={x}");
    }
    for (i, x) in f.checkpoints.iter().enumerate() {
        let j = r.checkpoints.iter().position(|y| y == x).unwrap();
        assert_eq!(r.counts[j], f.counts[i]);
    }

    // the record pins the polynomial and frequency
    assert_eq!(
        run(&["sum", "--x", "200000", "--resume", &first, "--h", "2"]).0,
        4
    );
    assert_eq!(
        run(&[
            "sum",
            "--x",
            "200000",
            "--resume",
            &first,
            "--poly",
            "(1,0)(1,1)"
        ])
        .0,
        4
    );
    assert_eq!(run(&["sum", "--x", "150000", "--resume", &first]).0, 4);
    assert_eq!(
        run(&[
            "sum",
            "--x",
            "200000",
            "--resume",
            &path(&dir, "missing.json")
        ])
        .0,
        4
    );
    assert_eq!(run(&["sum", "--x", "200000", "--resume", &first]).0, 0);
}

#[test]
fn constant_command() {
    let parse = |s: &str| -> serde_json::Value { serde_json::from_str(s).unwrap() };
    let (code, out, _) = run(&["constant", "--which", "thm3", "--pmax", "10000000"]);
    assert_eq!(code, 0);
    let v = parse(&out);
    assert!(v["tail"].as_f64().unwrap() < 2e-7);
    assert_eq!(v["pmax"].as_u64(), Some(10_000_000));
    assert!(out.starts_with("{\"value\":"));

    let q = parse(&run(&["constant", "--which", "quadratic", "--a", "1", "--c", "1"]).1);
    let pi2 = std::f64::consts::PI * std::f64::consts::PI;
    assert!((q["value"].as_f64().unwrap() - 12.0 / pi2).abs() < 1e-12);

    let g = parse(
        &run(&[
            "constant", "--which", "general", "--a", "1", "--b", "0", "--c", "1", "--d", "1",
        ])
        .1,
    );
    let diff = (g["value"].as_f64().unwrap() - q["value"].as_f64().unwrap()).abs();
    assert!(diff <= g["tail"].as_f64().unwrap());

    assert_eq!(run(&["constant", "--which", "quadratic", "--a", "1"]).0, 2);
    assert_eq!(
        run(&["constant", "--which", "general", "--a", "1", "--b", "0", "--c", "1"]).0,
        2
    );
    assert_eq!(run(&["constant", "--which", "thm2", "--pmax", "1"]).0, 2);
    assert_eq!(
        run(&["constant", "--which", "thm2", "--pmax", "100000000000"]).0,
        3
    );
    assert_eq!(run(&["constant", "--which", "nonsense"]).0, 2);

    let dir = tempfile::tempdir().unwrap();
    let out = path(&dir, "c.json");
    assert_eq!(
        run(&["constant", "--which", "thm2", "--pmax", "1000", "--out", &out]).0,
        0
    );
    assert!(parse(&std::fs::read_to_string(&out).unwrap())["value"].is_f64());
}

#[test]
fn verify_command() {
    let (code, out, _) = run(&["verify", "--suite", "parity"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["violations"], 0);
    assert_eq!(v["suites"][0]["checked"], 35654);

    let a = run(&[
        "verify", "--suite", "weil", "--seed", "42", "--budget", "200",
    ]);
    let b = run(&[
        "verify", "--suite", "weil", "--seed", "42", "--budget", "200",
    ]);
    assert_eq!(a.0, 0);
    assert_eq!(a.1, b.1);

    assert_eq!(
        run(&["verify", "--suite", "gauss", "--budget", "2000"]).0,
        0
    );
    assert_eq!(
        run(&["verify", "--suite", "k1k2", "--budget", "300", "--seed", "5"]).0,
        0
    );
    assert_eq!(
        run(&["verify", "--suite", "lemma1", "--budget", "200"]).0,
        0
    );
    assert_eq!(run(&["verify", "--suite", "aprocess"]).0, 0);
    assert_eq!(run(&["verify", "--suite", "gauss", "--budget", "0"]).0, 2);
    assert_eq!(
        run(&["verify", "--suite", "parity", "--budget", "1000"]).0,
        3
    );
    assert_eq!(run(&["verify", "--suite", "all", "--budget", "5"]).0, 2);
}

#[test]
fn binary_exit_codes_and_thread_env() {
    let bin = env!("CARGO_BIN_EXE_rootwave");
    let status = |args: &[&str], threads: Option<&str>| {
        let mut cmd = Command::new(bin);
        cmd.args(args);
        match threads {
            Some(t) => cmd.env("ROOTWAVE_THREADS", t),
            None => cmd.env_remove("ROOTWAVE_THREADS"),
        };
        cmd.output().unwrap()
    };
    let ok = status(&["sum", "--poly", "(1,0)(1,1)", "--x", "10"], Some("1"));
    assert_eq!(ok.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&ok.stdout)
        .lines()
        .nth(1)
        .unwrap()
        .starts_with("10,23,"));
    assert_eq!(
        status(&["sum", "--poly", "(1,0)", "--x", "10"], Some("many"))
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        status(&["sum", "--poly", "(1,0)", "--x", "0"], None)
            .status
            .code(),
        Some(2)
    );
    let dir = tempfile::tempdir().unwrap();
    let rec = path(&dir, "r.json");
    assert_eq!(
        status(
            &["sum", "--poly", "(1,0)", "--x", "100", "--out", &rec],
            Some("3")
        )
        .status
        .code(),
        Some(0)
    );
    assert_eq!(RunRecord::load(Path::new(&rec)).unwrap().thread_count, 3);
}
