//! Acceptance gate: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails. Runs without the libtest harness so the lines always
//! show in `cargo test` output.

use std::collections::BTreeSet;
use std::process::Command;
use std::time::Instant;

use jbtriple::boundary::{boundary_component, shilov_witness};
use jbtriple::moebius::{random_automorphism, transvection_apply};
use jbtriple::operators::Identity;
use jbtriple::sampling::seeded_rng;
use jbtriple::spectral::classify_tripotent;
use jbtriple::{Element, Factor};
use jbtriple_cli::config::{Format, Mode, RunConfig};
use jbtriple_cli::record::{render, Record};
use jbtriple_cli::{run, Report};

type Outcome = Result<String, String>;

fn config(mode: Mode, name: &str, trials: Option<usize>) -> RunConfig {
    let mut cfg = RunConfig::new(mode, name).expect("valid acceptance config");
    cfg.trials = trials;
    cfg
}

fn run_named(mode: Mode, name: &str, trials: Option<usize>) -> Report {
    run(&config(mode, name, trials))
}

fn factor_count(report: &Report) -> usize {
    report
        .records
        .iter()
        .map(|r| r.factor.as_str())
        .collect::<BTreeSet<_>>()
        .len()
}

/// Largest `residual/scale` among records whose check starts with `prefix`.
fn worst(records: &[Record], prefix: &str) -> f64 {
    records
        .iter()
        .filter(|r| r.check.starts_with(prefix))
        .map(|r| r.residual / r.scale)
        .fold(0.0, f64::max)
}

fn all_pass(report: &Report, what: &str) -> Result<(), String> {
    match report.records.iter().find(|r| !r.pass) {
        None if report.records.is_empty() => Err(format!("{what}: no records")),
        None => Ok(()),
        Some(r) => Err(format!("{what}: {}", r.failure_line())),
    }
}

/// Every (factor, check) group of `report` has exactly `trials` records.
fn trials_per_check(report: &Report, trials: usize, what: &str) -> Result<(), String> {
    let mut counts = std::collections::BTreeMap::new();
    for r in &report.records {
        *counts
            .entry((r.factor.as_str(), r.check.as_str()))
            .or_insert(0usize) += 1;
    }
    match counts.iter().find(|(_, &n)| n != trials) {
        None => Ok(()),
        Some(((f, c), n)) => Err(format!(
            "{what}: {f}/{c} has {n} records, expected {trials}"
        )),
    }
}

fn jordan() -> Outcome {
    let r = run_named(Mode::Verify, "jordan-identity", Some(1000));
    all_pass(&r, "jordan")?;
    trials_per_check(&r, 1000, "jordan")?;
    Ok(format!(
        "1000 triples x {} factors, worst relative residual {:.2e} (tol 1e-10)",
        factor_count(&r),
        worst(&r.records, "jordan")
    ))
}

fn catalogue() -> Outcome {
    let r = run_named(Mode::Verify, "jp-catalogue", Some(200));
    all_pass(&r, "catalogue")?;
    trials_per_check(&r, 200, "catalogue")?;
    let required = [
        Identity::Jp33,
        Identity::Jp34,
        Identity::Jp35,
        Identity::Jp36,
        Identity::Jpa1,
        Identity::Jpa2,
        Identity::Jps,
        Identity::Local1,
    ];
    let mut detail = Vec::new();
    for id in required {
        if !r.records.iter().any(|x| x.check == id.name()) {
            return Err(format!("identity {id} missing from the suite"));
        }
        detail.push(format!("{id} {:.1e}", worst(&r.records, id.name())));
    }
    Ok(format!(
        "200 tuples at radius 0.6 per identity per factor; {}",
        detail.join(", ")
    ))
}

fn bergmann_identity() -> Outcome {
    let r = run_named(Mode::Verify, "bergmann-identity", Some(100));
    all_pass(&r, "bergmann")?;
    trials_per_check(&r, 100, "bergmann")?;
    Ok(format!(
        "100 (a, b) x {} factors, worst Frobenius residual {:.2e} (tol 1e-9)",
        factor_count(&r),
        worst(&r.records, "bergmann")
    ))
}

fn gamma_invariance() -> Outcome {
    let r = run_named(Mode::Verify, "gamma-invariance", Some(100));
    all_pass(&r, "gamma")?;
    trials_per_check(&r, 100, "gamma")?;

    let f = Factor::commutative(2).map_err(|e| e.to_string())?;
    let a = Element::from_reals(&f, &[0.5, 0.5]).map_err(|e| e.to_string())?;
    let e = Element::from_reals(&f, &[1.0, 0.0]).map_err(|e| e.to_string())?;
    let image = transvection_apply(&f, &a, &e).map_err(|e| e.to_string())?;
    let expected = Element::from_reals(&f, &[1.0, 0.5]).map_err(|e| e.to_string())?;
    if image != expected {
        return Err(format!(
            "g_(1/2,1/2)((1,0)) = {:?}, expected (1, 1/2)",
            image.coords()
        ));
    }
    let flags = classify_tripotent(&f, &image, 1e-9).map_err(|e| e.to_string())?;
    if flags.is_tripotent || flags.tripotent_residual != 0.375 {
        return Err(format!(
            "image should fail is_tripotent with residual 3/8, got {} / {}",
            flags.is_tripotent, flags.tripotent_residual
        ));
    }
    Ok(format!(
        "worst ‖B(g(e),g(e))‖_F {:.2e} (tol 1e-8); g_(1/2,1/2)((1,0)) = (1,1/2) exactly, residual 3/8 exactly",
        worst(&r.records, "maximal-image")
    ))
}

fn gamma1_invariance() -> Outcome {
    let r = run_named(Mode::Verify, "gamma1-invariance", Some(100));
    all_pass(&r, "gamma1")?;
    trials_per_check(&r, 100, "gamma1")?;
    let names: BTreeSet<&str> = r.records.iter().map(|x| x.factor.as_str()).collect();
    for must in ["matrix:2x2", "matrix:3x3", "commutative:2", "commutative:4"] {
        if !names.contains(must) {
            return Err(format!("{must} missing from the unitary suite"));
        }
    }
    let ks = run_named(Mode::Verify, "kaup-sauter", None);
    all_pass(&ks, "kaup-sauter")?;
    let ratio = ks
        .records
        .iter()
        .filter(|x| x.check.starts_with("bound"))
        .map(|x| x.residual / x.scale)
        .fold(0.0, f64::max);
    Ok(format!(
        "worst ‖Q²−Id‖_F {:.2e} (tol 1e-8) on {} factors; ‖B_tu‖ ≤ 2√(1−t²) at t ∈ {{0.9,0.99,0.999}}, worst ratio {ratio:.3}, closed form to {:.1e}",
        worst(&r.records, "unitary-image"),
        names.len(),
        worst(&ks.records, "closed-form")
    ))
}

fn composition() -> Outcome {
    let r = run_named(Mode::Verify, "composition", Some(100));
    all_pass(&r, "composition")?;
    trials_per_check(&r, 100, "composition")?;
    Ok(format!(
        "composition {:.1e}, swap {:.1e} (tol 1e-9); k(a,b) norm defect {:.1e} on 100 probes (tol 1e-10)",
        worst(&r.records, "composition"),
        worst(&r.records, "swap"),
        worst(&r.records, "k-isometry")
    ))
}

fn russo_dye() -> Outcome {
    let r = run_named(Mode::Experiment, "russo-dye", None);
    all_pass(&r, "russo-dye")?;
    let n512 = worst(&r.records, "N=512");
    let sets: BTreeSet<String> = r
        .records
        .iter()
        .filter_map(|x| x.extra.get("witness_set").map(|v| v.to_string()))
        .collect();
    if sets.len() != 2 {
        return Err(format!(
            "witness sets exercised: {sets:?}, expected Γ and orbit"
        ));
    }
    Ok(format!(
        "error monotone over N = 16,64,256,512 in every trial, worst at N=512 {n512:.1e} (tol 1e-8); witnesses certified in Γ and in G⁰_v"
    ))
}

fn mean_value() -> Outcome {
    let r = run_named(Mode::Verify, "mean-value", None);
    all_pass(&r, "mean-value")?;
    let names: BTreeSet<&str> = r.records.iter().map(|x| x.check.as_str()).collect();
    if names.len() != jbtriple::boundary::TestFunctionId::ALL.len() {
        return Err(format!("registered functions covered: {names:?}"));
    }
    Ok(format!(
        "{} registered functions, worst residual at N=512 {:.1e} (tol 1e-8)",
        names.len(),
        worst(&r.records, "")
    ))
}

fn boundary() -> Outcome {
    let r = run_named(Mode::Experiment, "boundary", Some(100));
    all_pass(&r, "boundary")?;
    let per_factor = r.records.len() / factor_count(&r).max(1);
    if per_factor != 100 {
        return Err(format!(
            "{per_factor} boundary samples per factor, expected 100"
        ));
    }
    // rank preservation is integer equality; `pass` already demands it
    for rec in &r.records {
        if rec.extra.get("rank") != rec.extra.get("rank_after") {
            return Err(format!("rank changed: {}", rec.failure_line()));
        }
    }

    let f = Factor::commutative(2).map_err(|e| e.to_string())?;
    let v = Element::from_reals(&f, &[1.0, 0.5]).map_err(|e| e.to_string())?;
    let comp = boundary_component(&f, &v).map_err(|e| e.to_string())?;
    let e = Element::from_reals(&f, &[1.0, 0.0]).map_err(|e| e.to_string())?;
    if comp.tripotent.max_abs_diff(&e) > 1e-12 || comp.rank != 1 {
        return Err(format!(
            "v = (1,1/2): tripotent {:?}, rank {}",
            comp.tripotent.coords(),
            comp.rank
        ));
    }
    let mut rng = seeded_rng(4);
    for i in 0..100 {
        let g = random_automorphism(&f, &mut rng, 0.9);
        let gv = g.apply(&v).map_err(|e| e.to_string())?;
        let c = boundary_component(&f, &gv).map_err(|e| e.to_string())?;
        if c.rank != 1 {
            return Err(format!(
                "G⁰ sample {i} of v landed in a rank-{} component",
                c.rank
            ));
        }
    }
    Ok(format!(
        "iterate vs spectral worst {:.1e} (tol 1e-8) on 100 samples x {} factors, ranks preserved; v=(1,1/2) → e=(1,0), rank 1, 100 G⁰_v samples all rank 1",
        worst(&r.records, "rank="),
        factor_count(&r)
    ))
}

fn algnorm_and_peak() -> Outcome {
    let alg = run_named(Mode::Verify, "algnorm", Some(1000));
    all_pass(&alg, "algnorm")?;
    trials_per_check(&alg, 1000, "algnorm")?;

    let mut cfg = config(Mode::Experiment, "shilov", None);
    cfg.samples = Some(10_000);
    cfg.epsilon = 0.1;
    let sh = run(&cfg);
    all_pass(&sh, "shilov")?;
    let mut min_gap_over_eta = f64::INFINITY;
    for rec in sh.records.iter().filter(|r| r.check == "minimality") {
        let gap = rec.extra["gap"].as_f64().unwrap_or(f64::NAN);
        let eta = rec.extra["eta"].as_f64().unwrap_or(f64::NAN);
        if !(gap >= eta && eta > 0.0) {
            return Err(format!("minimality gap {gap} below η {eta}"));
        }
        min_gap_over_eta = min_gap_over_eta.min(gap / eta);
    }

    let f = Factor::matrix(2, 2).map_err(|e| e.to_string())?;
    let e = jbtriple::boundary::random_maximal_tripotent(&f, &mut seeded_rng(8));
    let at_e = shilov_witness(&f, &e, &e).map_err(|e| e.to_string())?;
    if (at_e - 1.0).norm() > 1e-12 {
        return Err(format!("shilov_witness(e) = {at_e}"));
    }
    Ok(format!(
        "algnorm sandwich on 1000 samples x {} factors; |h| ≤ 1−η away from e on 10⁴ samples, sup {:.4}; minimality gap ≥ {min_gap_over_eta:.0}·η",
        factor_count(&alg),
        worst(&sh.records, "peak")
    ))
}

fn maximal_unitary() -> Outcome {
    let r = run_named(Mode::Verify, "maximal-unitary", Some(100));
    all_pass(&r, "maximal-unitary")?;
    trials_per_check(&r, 100, "maximal-unitary")?;
    Ok(format!(
        "100 polar-part and 100 sampled maximal tripotents per square factor classify unitary, worst residual {:.1e} (tol 1e-8)",
        worst(&r.records, "")
    ))
}

fn derivative() -> Outcome {
    let r = run_named(Mode::Verify, "derivative", Some(100));
    all_pass(&r, "derivative")?;
    trials_per_check(&r, 100, "derivative")?;
    Ok(format!(
        "100 (a, x0) x {} factors, worst relative error {:.1e} (tol 1e-5)",
        factor_count(&r),
        worst(&r.records, "")
    ))
}

fn determinism() -> Outcome {
    let mut checked = 0;
    for (mode, name, trials) in [
        (Mode::Verify, "jp-catalogue", 20),
        (Mode::Verify, "composition", 20),
        (Mode::Experiment, "boundary", 20),
        (Mode::Experiment, "russo-dye", 4),
    ] {
        let cfg = config(mode, name, Some(trials));
        let a = render(&run(&cfg).records, Format::Jsonl).map_err(|e| e.to_string())?;
        let b = render(&run(&cfg).records, Format::Jsonl).map_err(|e| e.to_string())?;
        if a != b {
            return Err(format!("{name}: reports differ between runs"));
        }
        checked += 1;
    }
    let bin = env!("CARGO_BIN_EXE_jbtriple");
    let args = [
        "verify",
        "--suite",
        "axioms",
        "--factor",
        "matrix:2x3",
        "--trials",
        "50",
        "--seed",
        "7",
    ];
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let out = Command::new(bin)
            .args(args)
            .env("RAYON_NUM_THREADS", threads)
            .env_remove(jbtriple_cli::OUT_DIR_ENV)
            .output()
            .map_err(|e| e.to_string())?;
        if !out.status.success() {
            return Err(format!("binary exited with {}", out.status));
        }
        outputs.push(out.stdout);
    }
    if outputs[0] != outputs[1] || outputs[0].is_empty() {
        return Err("binary reports differ between 1 and 4 threads".into());
    }
    Ok(format!(
        "{checked} suites rerun in-process and the binary rerun at 1 and 4 threads give byte-identical JSON-lines"
    ))
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() {
    let criteria: [Criterion; 13] = [
        ("Jordan triple identity", jordan),
        ("Jordan-pair identity catalogue", catalogue),
        ("Bergmann operator identity for g_a(b)", bergmann_identity),
        (
            "Γ invariance and the non-preservation example",
            gamma_invariance,
        ),
        ("Γ₁ invariance and the Kaup–Sauter bound", gamma1_invariance),
        ("composition and swap laws, k(a,b) isometric", composition),
        ("Russo–Dye quadrature", russo_dye),
        ("mean-value property", mean_value),
        ("boundary tripotents, components and ranks", boundary),
        (
            "algebraic norm, peak function and minimality",
            algnorm_and_peak,
        ),
        (
            "maximal tripotents are unitary in square factors",
            maximal_unitary,
        ),
        ("transvection derivative", derivative),
        ("determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (title, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let (tag, detail) = match check() {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!(
            "{tag} {:>2} {title}: {detail} [{:.1}s]",
            i + 1,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
