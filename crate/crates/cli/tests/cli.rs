use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn jbtriple(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jbtriple"))
        .args(args)
        .env_remove(jbtriple_cli::OUT_DIR_ENV)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn lines(o: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&o.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("json line"))
        .collect()
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("jbtriple-cli-{tag}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn jordan_suite_example_passes() {
    let o = jbtriple(&[
        "verify",
        "--factor",
        "matrix:2x3",
        "--suite",
        "jordan-identity",
        "--trials",
        "1000",
        "--seed",
        "7",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = lines(&o);
    assert_eq!(recs.len(), 1000);
    assert!(recs
        .iter()
        .all(|r| r["seed"] == 7 && r["tol"] == 1e-10 && r["pass"] == true));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        &["verify", "--factor", "matrix:2y3", "--suite", "axioms"][..],
        &["verify", "--suite", "no-such-suite"],
        &["verify", "--suite", "axioms", "--tol.no-such-tol=1"],
        &["verify", "--suite", "axioms", "--tol.jordan=abc"],
        &[
            "verify",
            "--suite",
            "gamma1-invariance",
            "--factor",
            "matrix:2x3",
        ],
        &["verify"],
        &["experiment", "no-such-experiment"],
        &["experiment", "russo-dye", "--N", "2"],
        &["verify", "--suite", "axioms", "--bogus"],
    ] {
        let o = jbtriple(args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", stderr(&o));
        assert!(!stderr(&o).is_empty());
    }
    assert_eq!(jbtriple(&["--help"]).status.code(), Some(0));
}

#[test]
fn failures_exit_one_and_name_the_triple() {
    let o = jbtriple(&[
        "verify",
        "--suite",
        "jordan-identity",
        "--factor",
        "matrix:2x2",
        "--trials",
        "5",
        "--seed",
        "11",
        "--tol.jordan=0",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    let line = err
        .lines()
        .find(|l| l.starts_with("FAIL"))
        .expect("failure line");
    assert!(
        line.contains("jordan-identity") && line.contains("seed=11") && line.contains("residual=")
    );
    assert!(lines(&o).iter().all(|r| r["tol"] == 0.0));
}

#[test]
fn boundary_example_reports_ranks() {
    let o = jbtriple(&[
        "experiment",
        "boundary",
        "--factor",
        "matrix:2x2",
        "--trials",
        "100",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = lines(&o);
    assert_eq!(recs.len(), 100);
    for r in &recs {
        let rank = r["rank"].as_u64().unwrap();
        assert!(rank <= 2);
        assert!(r["tripotent"].is_object());
    }
}

#[test]
fn russo_dye_example_is_monotone() {
    let o = jbtriple(&[
        "experiment",
        "russo-dye",
        "--factor",
        "commutative:2",
        "--N",
        "16,64,256,512",
        "--seed",
        "3",
        "--trials",
        "6",
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let errs: Vec<f64> = rdr
        .records()
        .map(|r| r.unwrap()[5].parse::<f64>().unwrap())
        .collect();
    assert_eq!(errs.len(), 4);
    assert!(errs.windows(2).all(|w| w[1] <= w[0] + 1e-14), "{errs:?}");
}

#[test]
fn shilov_example_stays_below_one() {
    let o = jbtriple(&[
        "experiment",
        "shilov",
        "--factor",
        "matrix:2x2",
        "--epsilon",
        "0.1",
        "--trials",
        "2",
        "--samples",
        "2000",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    for r in lines(&o).iter().filter(|r| r["check"] == "peak") {
        assert!(r["residual"].as_f64().unwrap() < 1.0);
    }
}

#[test]
fn config_file_and_flags() {
    let dir = scratch("config");
    let cfg = dir.join("run.json");
    fs::write(
        &cfg,
        r#"{"factor":"commutative:2","experiment":"russo-dye","seeds":[1,2],"N":[16,512],"tolerances":{"russo-dye":1e-9},"trials":2}"#,
    )
    .unwrap();
    let o = jbtriple(&[
        "experiment",
        "--config",
        cfg.to_str().unwrap(),
        "--trials",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let recs = lines(&o);
    // 2 seeds x 3 trials x 2 node counts
    assert_eq!(recs.len(), 12);
    assert!(recs.iter().any(|r| r["tol"] == 1e-9));

    fs::write(&cfg, r#"{"experiment":"russo-dye","bogus":1}"#).unwrap();
    let o = jbtriple(&["experiment", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn out_dir_from_environment() {
    let dir = scratch("out");
    let o = Command::new(env!("CARGO_BIN_EXE_jbtriple"))
        .args([
            "verify",
            "--suite",
            "axioms",
            "--factor",
            "commutative:2",
            "--trials",
            "3",
        ])
        .env(jbtriple_cli::OUT_DIR_ENV, &dir)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(o.stdout.is_empty());
    let report = fs::read_to_string(dir.join("verify-axioms.jsonl")).unwrap();
    assert_eq!(report.lines().count(), 15);
    // the human summary goes to stderr when the report goes to a file
    assert!(stderr(&o).contains("contractivity"));
}

#[test]
fn list_shows_the_tolerance_table() {
    let o = jbtriple(&["list"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    for name in jbtriple_cli::tolerances::DEFAULTS.iter().map(|d| d.0) {
        assert!(text.contains(name));
    }
}
