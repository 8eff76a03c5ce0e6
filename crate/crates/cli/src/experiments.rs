//! Experiments behind `jbtriple experiment`.

use jbtriple::boundary::{
    boundary_component, component_rank_preserved, determining_sup, gamma_in_orbit_closure_demo,
    gamma_sample, random_maximal_tripotent, russo_dye_reconstruct, shilov_minimality, shilov_sweep,
    SetSpec, TestFunction, TestFunctionId,
};
use jbtriple::moebius::random_automorphism;
use jbtriple::sampling::{random_element, Radius};
use jbtriple::spectral::{boundary_tripotent, spectral_decomposition, BoundaryMethod};
use jbtriple::{Element, Factor};
use rand::{Rng, RngCore};

use crate::config::RunConfig;
use crate::record::{Meta, Record};
use crate::suites::run_trials;

pub const EXPERIMENTS: &[&str] = &[
    "russo-dye",
    "determining",
    "boundary",
    "orbit-closure",
    "shilov",
];

pub fn default_trials(name: &str) -> usize {
    match name {
        "russo-dye" => 20,
        // one trial per registered test function
        "determining" => TestFunctionId::ALL.len(),
        "boundary" => 100,
        "orbit-closure" => 20,
        "shilov" => 10,
        _ => 1,
    }
}

pub fn default_samples(name: &str) -> usize {
    match name {
        "determining" => 2_000,
        _ => 10_000,
    }
}

/// `‖b‖` bound for the quadrature experiment.
const RUSSO_DYE_RADIUS: f64 = 0.9;
/// Node counts from which the reconstruction tolerance applies.
const RUSSO_DYE_TOL_FROM: usize = 512;
/// Non-top spectral values of boundary samples stay below this, clear of
/// the slow-convergence band of the iterated cube.
const BOUNDARY_INTERIOR: f64 = 0.95;
const RANK_PROBES: usize = 8;
/// Grid `t = 1 − 10^{−k}`. Beyond k = 6 the smallest eigenvalue of
/// `B(te,te)`, `(1−t²)²`, falls under the eigenvalue floor of `B_a`.
const ORBIT_T_EXPONENTS: std::ops::RangeInclusive<i32> = 1..=6;

pub fn run_experiment(name: &'static str, f: &Factor, seed: u64, cfg: &RunConfig) -> Vec<Record> {
    let samples = cfg.samples.unwrap_or_else(|| default_samples(name));
    let trials = cfg.trials_for(name);
    let tols = &cfg.tolerances;
    let n_list = &cfg.n_list;
    let eps = cfg.epsilon;
    match name {
        "russo-dye" => run_trials("experiment", name, f, seed, trials, tols, &|m, rng| {
            russo_dye(f, m, rng, n_list)
        }),
        "determining" => run_trials("experiment", name, f, seed, trials, tols, &|m, rng| {
            determining(f, m, rng, samples)
        }),
        "boundary" => run_trials("experiment", name, f, seed, trials, tols, &|m, rng| {
            boundary(f, m, rng)
        }),
        "orbit-closure" => run_trials("experiment", name, f, seed, trials, tols, &|m, rng| {
            orbit_closure(f, m, rng)
        }),
        "shilov" => run_trials("experiment", name, f, seed, trials, tols, &|m, rng| {
            shilov(f, m, rng, eps, samples)
        }),
        other => unreachable!("experiment {other} passed validation"),
    }
}

fn russo_dye(
    f: &Factor,
    m: &Meta,
    rng: &mut dyn RngCore,
    n_list: &[usize],
) -> jbtriple::Result<Vec<Record>> {
    let floor = m.tols.get("monotone-floor");
    let b = random_element(f, rng, Radius::Uniform(RUSSO_DYE_RADIUS));
    // maximal a certifies nodes in Γ; a general unit a only in its orbit
    let a = if m.trial.is_multiple_of(2) {
        random_maximal_tripotent(f, rng)
    } else {
        random_element(f, rng, Radius::Exact(1.0))
    };
    let mut prev: Option<f64> = None;
    let mut out = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let r = russo_dye_reconstruct(f, &b, &a, n)?;
        let monotone = prev.is_none_or(|p| r.error <= p + floor);
        prev = Some(r.error);
        let rec = if n >= RUSSO_DYE_TOL_FROM {
            m.check(format!("N={n}"), r.error, 1.0, "russo-dye")
        } else {
            m.measure(format!("N={n}"), r.error)
        };
        out.push(
            rec.with("n", n)
                .with("b_norm", b.norm())
                .with("witness_set", r.witness_set)
                .with("certificate_residual", r.certificate_residual)
                .require("error increased with N", monotone)
                .require("witness certificate", r.certified()),
        );
    }
    Ok(out)
}

fn determining(
    f: &Factor,
    m: &Meta,
    rng: &mut dyn RngCore,
    samples: usize,
) -> jbtriple::Result<Vec<Record>> {
    let id = TestFunctionId::ALL[m.trial as usize % TestFunctionId::ALL.len()];
    let h = TestFunction::registered(id, f, rng);
    let v = random_element(f, rng, Radius::Exact(1.0));
    let mut sets = vec![SetSpec::Gamma];
    if f.has_unitaries() {
        sets.push(SetSpec::Gamma1);
    }
    sets.push(SetSpec::OrbitG0(v.clone()));
    sets.push(SetSpec::OrbitG(v));
    let tol = m.tols.get("gap-constant") / (samples as f64).sqrt();
    let mut out = Vec::with_capacity(sets.len());
    for set in &sets {
        let r = determining_sup(f, &h, set, samples, samples, rng.random())?;
        out.push(
            m.check_value(
                format!("{}/{}", id.name(), set.name()),
                r.gap,
                1.0,
                "gap-constant/√samples",
                tol,
            )
            .with("test_function", id.name())
            .with("set", set.name())
            .with("sup_ball", r.sup_ball)
            .with("sup_set", r.sup_set)
            .with("n_set", r.n_set)
            .with("n_ball", r.n_ball)
            .require(
                "sup over the set exceeds sup over the ball",
                r.sup_set <= r.sup_ball,
            ),
        );
    }
    Ok(out)
}

/// A unit-norm point with exactly `k` spectral values equal to one.
fn boundary_point(f: &Factor, rng: &mut dyn RngCore) -> jbtriple::Result<(Element, usize)> {
    let x = random_element(f, rng, Radius::Uniform(1.0));
    let s = spectral_decomposition(f, &x)?;
    let k = rng.random_range(1..=s.frame.len());
    let top = s.lambdas[0];
    let v =
        s.frame
            .iter()
            .zip(&s.lambdas)
            .enumerate()
            .fold(Element::zero(f), |acc, (i, (e, &l))| {
                let mu = if i < k {
                    1.0
                } else {
                    BOUNDARY_INTERIOR * l / top
                };
                acc + &e.scale_real(mu)
            });
    Ok((v, k))
}

fn boundary(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let (v, k) = boundary_point(f, rng)?;
    let e_iter = boundary_tripotent(f, &v, BoundaryMethod::Iterate)?;
    let e_spec = boundary_tripotent(f, &v, BoundaryMethod::Spectral)?;
    let comp = boundary_component(f, &v)?;
    let g = random_automorphism(f, rng, 0.9);
    let kept = component_rank_preserved(f, &v, &g, RANK_PROBES, rng)?;
    let membership = m.tols.get("membership");
    Ok(vec![m
        .check(
            format!("rank={}", comp.rank),
            (&e_iter - &e_spec).norm(),
            1.0,
            "boundary",
        )
        .with("rank", comp.rank)
        .with("tripotent", &comp.tripotent)
        .with("range_residual", comp.certificate.range_residual)
        .with("peirce0_norm", comp.certificate.peirce0_norm)
        .with("rank_after", kept.rank_after)
        .with("image_range_residual", kept.worst_range_residual)
        .require(
            "rank is factor rank minus frame length",
            comp.rank == f.rank() - k,
        )
        .require("membership certificate", comp.certificate.holds(membership))
        .require("rank preserved", kept.holds(membership))])
}

fn orbit_closure(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let r = if m.trial.is_multiple_of(2) {
        Radius::Exact(1.0)
    } else {
        Radius::Uniform(1.0)
    };
    let v = random_element(f, rng, r);
    let e = random_maximal_tripotent(f, rng);
    let grid: Vec<f64> = ORBIT_T_EXPONENTS.map(|k| 1.0 - 10f64.powi(-k)).collect();
    let points = gamma_in_orbit_closure_demo(f, &v, &e, &grid)?;
    // the family can stall near a vanishing Möbius denominator; such points
    // are reported, not failed
    Ok(ORBIT_T_EXPONENTS
        .zip(points)
        .map(|(k, p)| {
            let check = format!("t=1-1e-{k}");
            let rec = match p.distance {
                Some(d) => m.measure(check, d),
                None => m.measure(check, f64::NAN),
            };
            let mut rec = rec.with("t", p.t).with("v_norm", v.norm());
            rec.pass = true;
            if let Some(err) = p.error {
                rec = rec.with("stall", err);
            }
            rec
        })
        .collect())
}

fn shilov(
    f: &Factor,
    m: &Meta,
    rng: &mut dyn RngCore,
    eps: f64,
    samples: usize,
) -> jbtriple::Result<Vec<Record>> {
    let e = random_maximal_tripotent(f, rng);
    let sweep = shilov_sweep(f, &e, eps, samples, rng)?;
    let mut points = gamma_sample(f, samples / 2, rng.random())?;
    points.extend((0..samples / 2).map(|_| random_element(f, rng, Radius::Exact(1.0))));
    let min = shilov_minimality(f, &e, &points, eps)?;
    Ok(vec![
        m.check_value("peak", sweep.sup_away, 1.0, "1−η", 1.0 - sweep.eta)
            .with("epsilon", eps)
            .with("delta", sweep.delta)
            .with("eta", sweep.eta)
            .with("value_at_e", sweep.value_at_e)
            .with("samples_away", sweep.samples_away)
            .require(
                "peak value at e is 1",
                (sweep.value_at_e - 1.0).abs() <= 1e-12,
            ),
        m.check_value("minimality", min.sup_set, 1.0, "1−η", 1.0 - min.eta)
            .with("gap", min.gap)
            .with("eta", min.eta)
            .with("kept", min.kept)
            .require("sample set misses the sphere away from e", min.kept > 0),
    ])
}
