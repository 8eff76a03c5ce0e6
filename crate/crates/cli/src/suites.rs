//! Identity suites behind `jbtriple verify`.

use jbtriple::boundary::{
    algebraic_inner, algebraic_inner_frame, algebraic_norm, mean_value_check,
    random_maximal_tripotent, random_unitary_tripotent, TestFunction, TestFunctionId,
};
use jbtriple::linalg::hermitian_eigen;
use jbtriple::moebius::{isometry_defect, k_isometry, transvection_apply, transvection_derivative};
use jbtriple::operators::{
    bergmann, bergmann_sqrt, bergmann_sqrt_operator_norm, verify_identity, Identity,
    IdentityOutcome,
};
use jbtriple::sampling::{random_element, random_polydisc, trial_rng, Radius};
use jbtriple::spectral::{classify_tripotent, spectral_decomposition};
use jbtriple::{Complex64, Element, Factor};
use rand::RngCore;
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::record::{Meta, Record};
use crate::tolerances::Tolerances;

pub const SUITES: &[&str] = &[
    "jordan-identity",
    "axioms",
    "jp-catalogue",
    "bergmann-identity",
    "gamma-invariance",
    "gamma1-invariance",
    "kaup-sauter",
    "composition",
    "derivative",
    "maximal-unitary",
    "algnorm",
    "mean-value",
];

/// Suites that only make sense where unitary tripotents exist.
pub const NEEDS_UNITARIES: &[&str] = &["gamma1-invariance", "maximal-unitary"];

pub fn default_trials(name: &str) -> usize {
    match name {
        "jordan-identity" | "algnorm" => 1000,
        "jp-catalogue" => 200,
        // each trial runs every registered function through N nodes
        "mean-value" => 10,
        _ => 100,
    }
}

/// Radius of the catalogue inputs; keeps every embedded quasi-inverse
/// well inside its domain.
const CATALOGUE_RADIUS: f64 = 0.6;
/// Step of the central differences in the derivative suite.
const FD_STEP: f64 = 1e-6;
const ISOMETRY_PROBES: usize = 100;

type Body<'a> = dyn Fn(&Meta, &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> + Sync + 'a;

/// Runs `trials` independent trials in parallel and returns their records
/// in trial order. A trial that errors out becomes one failing record.
pub(crate) fn run_trials(
    kind: &'static str,
    name: &'static str,
    f: &Factor,
    seed: u64,
    trials: usize,
    tols: &Tolerances,
    body: &Body<'_>,
) -> Vec<Record> {
    let factor = f.to_string();
    (0..trials as u64)
        .into_par_iter()
        .map(|trial| {
            let meta = Meta {
                kind,
                name,
                factor: factor.clone(),
                seed,
                trial,
                tols,
            };
            let mut rng = trial_rng(seed, trial);
            body(&meta, &mut rng).unwrap_or_else(|e| vec![meta.error("trial", e)])
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

pub fn run_suite(name: &'static str, f: &Factor, seed: u64, cfg: &RunConfig) -> Vec<Record> {
    let n_mean_value = cfg.n_list.iter().copied().max().unwrap_or(512);
    let body: Box<Body<'_>> = match name {
        "jordan-identity" => Box::new(|m, rng| jordan(f, m, rng)),
        "axioms" => Box::new(|m, rng| axioms(f, m, rng)),
        "jp-catalogue" => Box::new(|m, rng| catalogue(f, m, rng)),
        "bergmann-identity" => Box::new(|m, rng| bergmann_identity(f, m, rng)),
        "gamma-invariance" => Box::new(|m, rng| gamma(f, m, rng)),
        "gamma1-invariance" => Box::new(|m, rng| gamma1(f, m, rng)),
        "kaup-sauter" => Box::new(|m, rng| kaup_sauter(f, m, rng)),
        "composition" => Box::new(|m, rng| composition(f, m, rng)),
        "derivative" => Box::new(|m, rng| derivative(f, m, rng)),
        "maximal-unitary" => Box::new(|m, rng| maximal_unitary(f, m, rng)),
        "algnorm" => Box::new(|m, rng| algnorm(f, m, rng)),
        "mean-value" => Box::new(move |m, rng| mean_value(f, m, rng, n_mean_value)),
        other => unreachable!("suite {other} passed validation"),
    };
    run_trials(
        "verify",
        name,
        f,
        seed,
        cfg.trials_for(name),
        &cfg.tolerances,
        &*body,
    )
}

fn jordan(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let v: Vec<Element> = (0..5).map(|_| random_polydisc(f, rng)).collect();
    let (a, b, x, y, z) = (&v[0], &v[1], &v[2], &v[3], &v[4]);
    let t = |p: &Element, q: &Element, r: &Element| f.triple_product(p, q, r);
    let lhs = t(a, b, &t(x, y, z)?)?;
    let rhs = t(&t(a, b, x)?, y, z)? - &t(x, &t(b, a, y)?, z)? + &t(x, y, &t(a, b, z)?)?;
    let scale = 1.0 + v.iter().map(Element::norm).product::<f64>();
    Ok(vec![m.check(
        "jordan",
        (lhs - &rhs).norm(),
        scale,
        "jordan",
    )])
}

fn axioms(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let v: Vec<Element> = (0..4).map(|_| random_polydisc(f, rng)).collect();
    let (x, y, z, w) = (&v[0], &v[1], &v[2], &v[3]);
    let t = |p: &Element, q: &Element, r: &Element| f.triple_product(p, q, r);
    let xyz = t(x, y, z)?;
    let bound = x.norm() * y.norm() * z.norm();
    let scale = 1.0 + bound;

    let symmetry = xyz.max_abs_diff(&t(z, y, x)?);
    let additive = t(&(x + w), y, z)?.max_abs_diff(&(&xyz + &t(w, y, z)?));
    let i = Complex64::new(0.0, 1.0);
    let conj_linear = t(x, &y.scale(i), z)?.max_abs_diff(&xyz.scale(-i));

    let d = f.d_operator(x, x)?;
    let (values, _) = hermitian_eigen(d.matrix(), m.tols.get("hermitian"))?;
    let negative = values.iter().fold(0.0f64, |acc, &v| acc.max(-v));
    let (lo, hi) = f.dxx_operator_norm(x)?;
    let n2 = x.norm() * x.norm();

    Ok(vec![
        m.check("symmetry", symmetry, scale, "symmetry"),
        m.check("linearity", additive.max(conj_linear), scale, "symmetry"),
        m.check(
            "contractivity",
            (xyz.norm() - bound).max(0.0),
            1.0,
            "contractivity",
        ),
        m.check("hermitian", negative, 1.0, "hermitian"),
        m.check(
            "norm-axiom",
            (lo - n2).abs().max((hi - n2).abs()),
            1.0,
            "norm-axiom",
        ),
    ])
}

fn catalogue(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let mut out = Vec::with_capacity(Identity::ALL.len());
    for id in Identity::ALL {
        let inputs: Vec<Element> = (0..id.arity())
            .map(|_| random_element(f, rng, Radius::Uniform(CATALOGUE_RADIUS)))
            .collect();
        out.push(match verify_identity(f, id, &inputs)? {
            IdentityOutcome::Checked { residual, scale } => {
                m.check(id.name(), residual, scale, "catalogue")
            }
            IdentityOutcome::Skipped { reason } => m.error(id.name(), format!("skipped: {reason}")),
        });
    }
    Ok(out)
}

/// Closed ball samples: half on the sphere, half uniform inside.
fn closed_ball(f: &Factor, rng: &mut dyn RngCore, m: &Meta) -> Element {
    let r = if m.trial.is_multiple_of(2) {
        Radius::Exact(1.0)
    } else {
        Radius::Uniform(1.0)
    };
    random_element(f, rng, r)
}

fn open_ball(f: &Factor, rng: &mut dyn RngCore) -> Element {
    loop {
        let a = random_element(f, rng, Radius::Uniform(1.0));
        if a.norm() < 1.0 {
            return a;
        }
    }
}

fn bergmann_identity(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let a = open_ball(f, rng);
    let b = closed_ball(f, rng, m);
    let g = transvection_apply(f, &a, &b)?;
    let lhs = bergmann(f, &g, &g)?;
    let s = bergmann_sqrt(f, &a)?.map;
    let neg_a = -&a;
    let rhs = &(&(&(&s * &bergmann(f, &b, &neg_a)?.inverse()?) * &bergmann(f, &b, &b)?)
        * &bergmann(f, &neg_a, &b)?.inverse()?)
        * &s;
    Ok(vec![m
        .check("bergmann", lhs.distance(&rhs), 1.0, "bergmann-identity")
        .with("a_norm", a.norm())
        .with("b_norm", b.norm())])
}

fn gamma(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let a = open_ball(f, rng);
    let e = random_maximal_tripotent(f, rng);
    let w = transvection_apply(f, &a, &e)?;
    Ok(vec![m
        .check(
            "maximal-image",
            bergmann(f, &w, &w)?.frobenius_norm(),
            1.0,
            "gamma",
        )
        .with("a_norm", a.norm())])
}

fn gamma1(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let a = open_ball(f, rng);
    let u = random_unitary_tripotent(f, rng)?;
    let w = transvection_apply(f, &a, &u)?;
    let flags = classify_tripotent(f, &w, m.tols.get("gamma1"))?;
    Ok(vec![m
        .check("unitary-image", flags.unitary_residual, 1.0, "gamma1")
        .with("a_norm", a.norm())])
}

fn kaup_sauter(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let u = random_maximal_tripotent(f, rng);
    let unitary = classify_tripotent(f, &u, m.tols.get("unitary"))?.is_unitary;
    let mut out = Vec::new();
    for t in [0.9, 0.99, 0.999] {
        let n = bergmann_sqrt_operator_norm(f, &u.scale_real(t))?;
        let s = 1.0 - t * t;
        // B_{tu} is (1−t²)·Id for unitary u; a maximal u also has a
        // Peirce-½ part, where it acts as √(1−t²)
        let closed = if unitary { s } else { s.sqrt() };
        out.push(m.check(
            format!("closed-form t={t}"),
            (n - closed).abs(),
            1.0,
            "kaup-sauter",
        ));
        out.push(
            m.check_value(format!("bound t={t}"), n, 2.0 * s.sqrt(), "2√(1−t²)", 1.0)
                .with("unitary", unitary),
        );
    }
    Ok(out)
}

fn composition(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let a = random_element(f, rng, Radius::Uniform(0.9));
    let b = random_element(f, rng, Radius::Uniform(0.9));
    let x = random_element(f, rng, Radius::Uniform(1.0));
    let k = k_isometry(f, &a, &b)?;
    let gab = transvection_apply(f, &a, &b)?;
    let lhs = transvection_apply(f, &a, &transvection_apply(f, &b, &x)?)?;
    let rhs = transvection_apply(f, &gab, &k.apply(&x)?)?;
    let kba = k_isometry(f, &b, &a)?;
    let swapped = kba.inverse()?.apply(&transvection_apply(f, &b, &a)?)?;
    let defect = isometry_defect(&k, ISOMETRY_PROBES, rng);
    Ok(vec![
        m.check("composition", lhs.max_abs_diff(&rhs), 1.0, "composition"),
        m.check("swap", gab.max_abs_diff(&swapped), 1.0, "composition"),
        m.check("k-isometry", defect, 1.0, "isometry"),
    ])
}

fn derivative(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let a = random_element(f, rng, Radius::Uniform(0.8));
    let x0 = random_element(f, rng, Radius::Uniform(0.8));
    let d = transvection_derivative(f, &a, &x0)?;
    let mut worst: f64 = 0.0;
    for j in 0..f.dim() {
        let e = Element::basis(f, j).scale_real(FD_STEP);
        let plus = transvection_apply(f, &a, &(&x0 + &e))?;
        let minus = transvection_apply(f, &a, &(&x0 - &e))?;
        let fd = (plus - &minus).scale_real(0.5 / FD_STEP);
        let col = d.apply(&Element::basis(f, j))?;
        worst = worst.max((&fd - &col).coord_norm() / col.coord_norm().max(f64::MIN_POSITIVE));
    }
    Ok(vec![m.check("finite-difference", worst, 1.0, "derivative")])
}

fn maximal_unitary(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let tol = m.tols.get("unitary");
    // polar part of a generic element: the sum of its full frame
    let x = random_element(f, rng, Radius::Uniform(1.0));
    let s = spectral_decomposition(f, &x)?;
    let polar = s.frame.iter().fold(Element::zero(f), |acc, e| acc + e);
    let flags = classify_tripotent(f, &polar, tol)?;
    let sampled = classify_tripotent(f, &random_maximal_tripotent(f, rng), tol)?;
    let residual =
        |fl: &jbtriple::spectral::TripotentFlags| fl.tripotent_residual.max(fl.unitary_residual);
    Ok(vec![
        m.check("polar-part", residual(&flags), 1.0, "unitary")
            .with("frame_len", s.frame.len())
            .require("maximal", flags.is_maximal),
        m.check("sampler", residual(&sampled), 1.0, "unitary")
            .require("maximal", sampled.is_maximal),
    ])
}

fn algnorm(f: &Factor, m: &Meta, rng: &mut dyn RngCore) -> jbtriple::Result<Vec<Record>> {
    let x = random_element(f, rng, Radius::Uniform(2.0));
    let n2 = x.norm() * x.norm();
    let na = algebraic_norm(f, &x)?;
    let na2 = na * na;
    let excess = (n2 - na2).max(na2 - f.rank() as f64 * n2).max(0.0);
    let y = random_element(f, rng, Radius::Uniform(1.0));
    let frame_gap = (algebraic_inner(f, &x, &y)? - algebraic_inner_frame(f, &x, &y)?).norm();
    Ok(vec![
        m.check("norm-sandwich", excess, 1.0, "algnorm")
            .with("norm2", n2)
            .with("algnorm2", na2),
        m.check(
            "frame-pairing",
            frame_gap,
            1.0 + x.norm() * y.norm(),
            "inner-frame",
        ),
    ])
}

fn mean_value(
    f: &Factor,
    m: &Meta,
    rng: &mut dyn RngCore,
    n: usize,
) -> jbtriple::Result<Vec<Record>> {
    let mut out = Vec::with_capacity(TestFunctionId::ALL.len());
    for (i, id) in TestFunctionId::ALL.into_iter().enumerate() {
        let h = TestFunction::registered(id, f, rng);
        let b = random_element(f, rng, Radius::Uniform(0.9));
        let a = if (m.trial as usize + i).is_multiple_of(2) {
            random_maximal_tripotent(f, rng)
        } else {
            random_element(f, rng, Radius::Exact(1.0))
        };
        let r = mean_value_check(f, &h, &b, &a, n)?;
        out.push(m.check(id.name(), r, 1.0, "mean-value").with("n", n));
    }
    Ok(out)
}
