//! Boundary components, samplers for maximal and unitary tripotents,
//! circle-quadrature reconstructions, determining-set suprema, the
//! algebraic inner product and the peak function at a maximal tripotent.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{Element, Factor, FactorKind};
use crate::moebius::{
    discrete_isometry, random_automorphism, transvection_apply, BallAutomorphism,
};
use crate::operators::bergmann_map;
use crate::sampling::{
    circle_point, complex_gaussian, disc_point, haar_unitary, random_element, seeded_rng, Radius,
};
use crate::spectral::{
    boundary_tripotent, classify_tripotent, peirce_projections, spectral_decomposition,
    BoundaryMethod,
};
use crate::tol;

/// Residual bounds certifying that `x` lies in `K_e = e + B₀(e)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MembershipCertificate {
    /// `‖P₀(e)(x−e) − (x−e)‖`.
    pub range_residual: f64,
    /// `‖P₀(e)(x−e)‖`, which equals `‖P₀(e)x‖`.
    pub peirce0_norm: f64,
}

impl MembershipCertificate {
    pub fn holds(&self, tol: f64) -> bool {
        self.range_residual <= tol && self.peirce0_norm < 1.0
    }
}

/// Certificate for `x ∈ K_e`; `e` must be a tripotent.
pub fn component_membership(f: &Factor, e: &Element, x: &Element) -> Result<MembershipCertificate> {
    f.ensure(x)?;
    let p = peirce_projections(f, e)?;
    let d = x - e;
    let pd = p.p0.apply_unchecked(&d);
    Ok(MembershipCertificate {
        range_residual: (&pd - &d).norm(),
        peirce0_norm: pd.norm(),
    })
}

/// The boundary component `K_e` containing a unit-norm point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComponent {
    pub tripotent: Element,
    /// Rank of the Peirce-0 subtriple `Z₀(e)`.
    pub rank: usize,
    pub factor: Factor,
    pub certificate: MembershipCertificate,
}

/// In every supported factor `Z₀(e)` is again a factor of rank
/// `rank(Z) − k` when `e` is a sum of `k` orthogonal minimal tripotents.
pub fn boundary_component(f: &Factor, x: &Element) -> Result<BoundaryComponent> {
    let e = boundary_tripotent(f, x, BoundaryMethod::Spectral)?;
    let frame_len = spectral_decomposition(f, &e)?.lambdas.len();
    let certificate = component_membership(f, &e, x)?;
    if !certificate.holds(tol::MEMBERSHIP) {
        return Err(Error::Consistency(format!(
            "x fails its own component certificate: range residual {:e}, ‖P₀x‖ = {}",
            certificate.range_residual, certificate.peirce0_norm
        )));
    }
    Ok(BoundaryComponent {
        tripotent: e,
        rank: f.rank() - frame_len,
        factor: f.clone(),
        certificate,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RankPreservation {
    pub rank_before: usize,
    pub rank_after: usize,
    /// Sampled points of `K_v` pushed through `g`.
    pub samples: usize,
    /// Worst certificate of `g(x) ∈ K_{g(v)}` over the samples.
    pub worst_range_residual: f64,
    pub worst_peirce0_norm: f64,
}

impl RankPreservation {
    pub fn holds(&self, tol: f64) -> bool {
        self.rank_before == self.rank_after
            && self.worst_range_residual <= tol
            && self.worst_peirce0_norm < 1.0
    }
}

/// Ranks of `K_v` and `K_{g(v)}`, plus a sampled check that `g` carries
/// points of `K_v` into `K_{g(v)}`.
pub fn component_rank_preserved<R: Rng + ?Sized>(
    f: &Factor,
    v: &Element,
    g: &BallAutomorphism,
    samples: usize,
    rng: &mut R,
) -> Result<RankPreservation> {
    if g.factor() != f {
        return Err(Error::FactorMismatch {
            expected: f.to_string(),
            found: g.factor().to_string(),
        });
    }
    let before = boundary_component(f, v)?;
    let gv = g.apply(v)?;
    let after = boundary_component(f, &gv)?;
    let p0 = peirce_projections(f, &before.tripotent)?.p0;
    let mut worst_range_residual: f64 = 0.0;
    let mut worst_peirce0_norm: f64 = 0.0;
    for _ in 0..samples {
        let w = random_element(f, rng, Radius::Uniform(0.99));
        let x = &before.tripotent + &p0.apply_unchecked(&w);
        let c = component_membership(f, &after.tripotent, &g.apply(&x)?)?;
        worst_range_residual = worst_range_residual.max(c.range_residual);
        worst_peirce0_norm = worst_peirce0_norm.max(c.peirce0_norm);
    }
    Ok(RankPreservation {
        rank_before: before.rank,
        rank_after: after.rank,
        samples,
        worst_range_residual,
        worst_peirce0_norm,
    })
}

/// Random maximal tripotent: `U·J·V*` on matrix blocks with `J` the
/// rectangular identity, unimodular phases on commutative blocks.
pub fn random_maximal_tripotent<R: Rng + ?Sized>(f: &Factor, rng: &mut R) -> Element {
    let mut coords = DVector::zeros(f.dim());
    for (offset, block) in f.blocks() {
        match block.kind() {
            FactorKind::Matrix { p, q } => {
                let u = haar_unitary(*p, rng);
                let v = haar_unitary(*q, rng);
                let j = DMatrix::<Complex64>::identity(*p, *q);
                let m = u * j * v.adjoint();
                for i in 0..*p {
                    for k in 0..*q {
                        coords[offset + i * q + k] = m[(i, k)];
                    }
                }
            }
            FactorKind::Commutative { n } => {
                for i in 0..*n {
                    coords[offset + i] = circle_point(rng);
                }
            }
            FactorKind::DirectSum(_) => unreachable!("blocks are simple"),
        }
    }
    Element::from_parts(f.clone(), coords)
}

/// Random unitary tripotent; `EmptyGamma1` when `f` has none.
pub fn random_unitary_tripotent<R: Rng + ?Sized>(f: &Factor, rng: &mut R) -> Result<Element> {
    if !f.has_unitaries() {
        return Err(Error::EmptyGamma1(f.to_string()));
    }
    Ok(random_maximal_tripotent(f, rng))
}

/// `n` certified maximal tripotents.
pub fn gamma_sample(f: &Factor, n: usize, seed: u64) -> Result<Vec<Element>> {
    let mut rng = seeded_rng(seed);
    (0..n)
        .map(|_| {
            let e = random_maximal_tripotent(f, &mut rng);
            let flags = classify_tripotent(f, &e, tol::HERMITIAN)?;
            if !flags.is_maximal {
                return Err(Error::Consistency(format!(
                    "sampled maximal tripotent has B(e,e) residual {:e}",
                    flags.maximal_residual
                )));
            }
            Ok(e)
        })
        .collect()
}

/// `n` certified unitary tripotents.
pub fn gamma1_sample(f: &Factor, n: usize, seed: u64) -> Result<Vec<Element>> {
    let mut rng = seeded_rng(seed);
    (0..n)
        .map(|_| {
            let u = random_unitary_tripotent(f, &mut rng)?;
            let flags = classify_tripotent(f, &u, tol::HERMITIAN)?;
            if !flags.is_unitary {
                return Err(Error::Consistency(format!(
                    "sampled unitary tripotent has Q_uQ_u residual {:e}",
                    flags.unitary_residual
                )));
            }
            Ok(u)
        })
        .collect()
}

/// Which set the quadrature nodes `g_b(ζa)` were certified to lie in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSet {
    /// `a` is maximal: each node has `‖B(w,w)‖_F` below the Γ tolerance.
    Gamma,
    /// General boundary `a`: each node maps back to `ζa` under `g_{−b}`, so
    /// it lies in the orbit of `a` under the identity component.
    Orbit,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RussoDye {
    pub approx: Element,
    /// `‖approx − b‖`.
    pub error: f64,
    pub witnesses: Vec<Element>,
    pub witness_set: WitnessSet,
    /// Worst per-node certificate residual.
    pub certificate_residual: f64,
}

/// Tolerance for certifying a node in Γ.
pub const GAMMA_WITNESS_TOL: f64 = 1e-8;
/// Tolerance for certifying a node in the orbit of `a`.
pub const ORBIT_WITNESS_TOL: f64 = 1e-9;

impl RussoDye {
    pub fn certified(&self) -> bool {
        let limit = match self.witness_set {
            WitnessSet::Gamma => GAMMA_WITNESS_TOL,
            WitnessSet::Orbit => ORBIT_WITNESS_TOL,
        };
        self.certificate_residual <= limit
    }
}

fn roots_of_unity(n: usize) -> impl Iterator<Item = Complex64> {
    (0..n).map(move |k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
}

fn check_quadrature_inputs(f: &Factor, b: &Element, a: &Element, n: usize) -> Result<()> {
    f.ensure(b)?;
    f.ensure(a)?;
    if b.norm() >= 1.0 {
        return Err(Error::Domain("b must lie in the open ball".into()));
    }
    let na = a.norm();
    if (na - 1.0).abs() > tol::UNIT_NORM {
        return Err(Error::NotUnitNorm { norm: na });
    }
    if n < 4 {
        return Err(Error::InvalidArgument(format!(
            "need at least 4 nodes, got {n}"
        )));
    }
    Ok(())
}

/// Trapezoid average `(1/N) Σ_k g_b(e^{2πik/N} a)`, which reconstructs `b`
/// as an average of boundary points.
pub fn russo_dye_reconstruct(f: &Factor, b: &Element, a: &Element, n: usize) -> Result<RussoDye> {
    check_quadrature_inputs(f, b, a, n)?;
    let a_is_maximal = classify_tripotent(f, a, tol::ALGEBRA)?.is_maximal;
    let neg_b = -b;
    let mut sum = Element::zero(f);
    let mut witnesses = Vec::with_capacity(n);
    let mut certificate_residual: f64 = 0.0;
    for zeta in roots_of_unity(n) {
        let za = a.scale(zeta);
        let w = transvection_apply(f, b, &za)?;
        let r = if a_is_maximal {
            bergmann_map(f, &w, &w).frobenius_norm()
        } else {
            (transvection_apply(f, &neg_b, &w)? - &za).norm()
        };
        certificate_residual = certificate_residual.max(r);
        sum = sum + &w;
        witnesses.push(w);
    }
    let approx = sum.scale_real(1.0 / n as f64);
    Ok(RussoDye {
        error: (&approx - b).norm(),
        approx,
        witnesses,
        witness_set: if a_is_maximal {
            WitnessSet::Gamma
        } else {
            WitnessSet::Orbit
        },
        certificate_residual,
    })
}

/// `‖h(b) − (1/N) Σ_k h(g_b(e^{2πik/N} a))‖`.
pub fn mean_value_check(
    f: &Factor,
    h: &TestFunction,
    b: &Element,
    a: &Element,
    n: usize,
) -> Result<f64> {
    check_quadrature_inputs(f, b, a, n)?;
    h.check_factor(f)?;
    let mut acc = vec![Complex64::new(0.0, 0.0); h.arity()];
    for zeta in roots_of_unity(n) {
        let w = transvection_apply(f, b, &a.scale(zeta))?;
        for (s, v) in acc.iter_mut().zip(h.eval(&w)) {
            *s += v;
        }
    }
    let at_b = h.eval(b);
    Ok(acc
        .iter()
        .zip(at_b)
        .map(|(s, v)| (s / n as f64 - v).norm_sqr())
        .sum::<f64>()
        .sqrt())
}

/// `ℓ(z) = c + Σ_j w_j z_j` in canonical coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Affine {
    pub constant: Complex64,
    pub weights: Vec<Complex64>,
}

impl Affine {
    /// Random weights normalised to `Σ|w_j| = 1`, so `|ℓ − c| ≤ 1` on the
    /// closed ball (every coordinate is bounded by the norm).
    fn random<R: Rng + ?Sized>(f: &Factor, rng: &mut R, with_constant: bool) -> Self {
        let mut weights: Vec<Complex64> = (0..f.dim()).map(|_| complex_gaussian(rng)).collect();
        let total: f64 = weights.iter().map(|w| w.norm()).sum();
        for w in &mut weights {
            *w /= total;
        }
        let constant = if with_constant {
            disc_point(rng)
        } else {
            Complex64::new(0.0, 0.0)
        };
        Affine { constant, weights }
    }

    fn coordinate(f: &Factor, j: usize) -> Self {
        let mut weights = vec![Complex64::new(0.0, 0.0); f.dim()];
        weights[j] = Complex64::new(1.0, 0.0);
        Affine {
            constant: Complex64::new(0.0, 0.0),
            weights,
        }
    }

    pub fn eval(&self, z: &Element) -> Complex64 {
        self.constant
            + self
                .weights
                .iter()
                .zip(z.coords().iter())
                .map(|(w, x)| w * x)
                .sum::<Complex64>()
    }
}

/// Names of the registered holomorphic test functions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestFunctionId {
    Constant,
    Linear,
    Affine,
    Product,
    Power,
    Cubic,
    Exp,
    Shilov,
    Pair,
}

impl TestFunctionId {
    pub const ALL: [TestFunctionId; 9] = [
        TestFunctionId::Constant,
        TestFunctionId::Linear,
        TestFunctionId::Affine,
        TestFunctionId::Product,
        TestFunctionId::Power,
        TestFunctionId::Cubic,
        TestFunctionId::Exp,
        TestFunctionId::Shilov,
        TestFunctionId::Pair,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TestFunctionId::Constant => "constant",
            TestFunctionId::Linear => "linear",
            TestFunctionId::Affine => "affine",
            TestFunctionId::Product => "product",
            TestFunctionId::Power => "power",
            TestFunctionId::Cubic => "cubic",
            TestFunctionId::Exp => "exp",
            TestFunctionId::Shilov => "shilov",
            TestFunctionId::Pair => "pair",
        }
    }
}

impl fmt::Display for TestFunctionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestFunctionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|id| id.name() == s)
            .ok_or_else(|| Error::UnregisteredTestFunction(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Body {
    /// `Σ_t c_t Π_i ℓ_i^{k_{t,i}}`.
    Polynomial {
        functionals: Vec<Affine>,
        terms: Vec<(Complex64, Vec<u32>)>,
    },
    Exp(Affine),
    Shilov {
        tripotent: Element,
        rank: usize,
    },
    Pair(Box<Body>, Box<Body>),
}

impl Body {
    fn eval_into(&self, z: &Element, out: &mut Vec<Complex64>) {
        match self {
            Body::Polynomial { functionals, terms } => {
                let values: Vec<Complex64> = functionals.iter().map(|l| l.eval(z)).collect();
                let v = terms
                    .iter()
                    .map(|(c, powers)| {
                        values
                            .iter()
                            .zip(powers)
                            .fold(*c, |acc, (v, &k)| acc * v.powu(k))
                    })
                    .sum();
                out.push(v);
            }
            Body::Exp(l) => out.push(l.eval(z).exp()),
            Body::Shilov { tripotent, rank } => out.push(peak(z, tripotent, *rank)),
            Body::Pair(x, y) => {
                x.eval_into(z, out);
                y.eval_into(z, out);
            }
        }
    }

    fn arity(&self) -> usize {
        match self {
            Body::Pair(x, y) => x.arity() + y.arity(),
            _ => 1,
        }
    }
}

/// A registered entire test function, scalar or `ℂ²`-valued.
#[derive(Clone, Debug, PartialEq)]
pub struct TestFunction {
    id: TestFunctionId,
    factor: Factor,
    body: Body,
    /// Points where the sup over the closed ball is known to be attained.
    anchors: Vec<Element>,
}

impl TestFunction {
    /// Draw the coefficients of a registered family member.
    pub fn registered<R: Rng + ?Sized>(id: TestFunctionId, f: &Factor, rng: &mut R) -> Self {
        let poly = |functionals: Vec<Affine>, terms: Vec<(Complex64, Vec<u32>)>| Body::Polynomial {
            functionals,
            terms,
        };
        let one = Complex64::new(1.0, 0.0);
        let mut anchors = Vec::new();
        let body = match id {
            TestFunctionId::Constant => poly(vec![], vec![(disc_point(rng), vec![])]),
            TestFunctionId::Linear => {
                poly(vec![Affine::random(f, rng, false)], vec![(one, vec![1])])
            }
            TestFunctionId::Affine => {
                poly(vec![Affine::random(f, rng, true)], vec![(one, vec![1])])
            }
            TestFunctionId::Product => poly(
                vec![Affine::random(f, rng, true), Affine::random(f, rng, true)],
                vec![(one, vec![1, 1])],
            ),
            TestFunctionId::Power => poly(vec![Affine::random(f, rng, true)], vec![(one, vec![4])]),
            TestFunctionId::Cubic => {
                // all monomials of degree ≤ 3 in two coordinate functionals
                let j = if f.dim() > 1 { 1 } else { 0 };
                let functionals = vec![Affine::coordinate(f, 0), Affine::coordinate(f, j)];
                let terms = (0..=3u32)
                    .flat_map(|d| (0..=d).map(move |i| vec![i, d - i]))
                    .map(|powers| (disc_point(rng), powers))
                    .collect();
                poly(functionals, terms)
            }
            TestFunctionId::Exp => Body::Exp(Affine::random(f, rng, true)),
            TestFunctionId::Shilov => {
                let e = random_maximal_tripotent(f, rng);
                anchors.push(e.clone());
                Body::Shilov {
                    tripotent: e,
                    rank: f.rank(),
                }
            }
            TestFunctionId::Pair => Body::Pair(
                Box::new(poly(
                    vec![Affine::random(f, rng, true), Affine::random(f, rng, true)],
                    vec![(one, vec![1, 1])],
                )),
                Box::new(Body::Exp(Affine::random(f, rng, true))),
            ),
        };
        TestFunction {
            id,
            factor: f.clone(),
            body,
            anchors,
        }
    }

    /// Parse a registered name and draw its coefficients.
    pub fn from_name<R: Rng + ?Sized>(name: &str, f: &Factor, rng: &mut R) -> Result<Self> {
        Ok(Self::registered(name.parse()?, f, rng))
    }

    /// The peak function at a given maximal tripotent.
    pub fn shilov(f: &Factor, e: &Element) -> Result<Self> {
        ensure_maximal(f, e)?;
        Ok(TestFunction {
            id: TestFunctionId::Shilov,
            factor: f.clone(),
            body: Body::Shilov {
                tripotent: e.clone(),
                rank: f.rank(),
            },
            anchors: vec![e.clone()],
        })
    }

    pub fn id(&self) -> TestFunctionId {
        self.id
    }

    /// Dimension of the target space.
    pub fn arity(&self) -> usize {
        self.body.arity()
    }

    pub fn anchors(&self) -> &[Element] {
        &self.anchors
    }

    fn check_factor(&self, f: &Factor) -> Result<()> {
        if &self.factor != f {
            return Err(Error::FactorMismatch {
                expected: f.to_string(),
                found: self.factor.to_string(),
            });
        }
        Ok(())
    }

    /// Panics if `z` belongs to another factor.
    pub fn eval(&self, z: &Element) -> Vec<Complex64> {
        assert_eq!(
            z.factor(),
            &self.factor,
            "test function evaluated on another factor"
        );
        let mut out = Vec::with_capacity(self.arity());
        self.body.eval_into(z, &mut out);
        out
    }

    /// Euclidean norm of the value.
    pub fn norm_at(&self, z: &Element) -> f64 {
        self.eval(z)
            .iter()
            .map(|v| v.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// `⟨x,y⟩_a` as the canonical pairing `Σ x_j·conj(y_j)` (trace form on
/// matrix blocks, Euclidean on commutative ones).
pub fn algebraic_inner(f: &Factor, x: &Element, y: &Element) -> Result<Complex64> {
    f.ensure(x)?;
    f.ensure(y)?;
    Ok(pairing(x, y))
}

fn pairing(x: &Element, y: &Element) -> Complex64 {
    x.coords()
        .iter()
        .zip(y.coords().iter())
        .map(|(a, b)| a * b.conj())
        .sum()
}

/// `‖x‖_a = ⟨x,x⟩_a^½`.
pub fn algebraic_norm(f: &Factor, x: &Element) -> Result<f64> {
    Ok(algebraic_inner(f, x, x)?.re.max(0.0).sqrt())
}

/// `⟨x,y⟩_a = Σ_i λ_i·conj(φ_i(y))` over the spectral frame of `x`, where
/// `φ_i(y)` is read off from `P₁(e_i)y = φ_i(y)·e_i`.
pub fn algebraic_inner_frame(f: &Factor, x: &Element, y: &Element) -> Result<Complex64> {
    f.ensure(y)?;
    let s = spectral_decomposition(f, x)?;
    let mut total = Complex64::new(0.0, 0.0);
    for (&lambda, e) in s.lambdas.iter().zip(&s.frame) {
        let p1y = peirce_projections(f, e)?.p1.apply_unchecked(y);
        let (k, pivot) = e
            .coords()
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .expect("minimal tripotent is non-zero");
        let phi = p1y.coords()[k] / pivot;
        total += phi.conj() * lambda;
    }
    Ok(total)
}

fn ensure_maximal(f: &Factor, e: &Element) -> Result<()> {
    let flags = classify_tripotent(f, e, tol::ALGEBRA)?;
    if !flags.is_maximal {
        return Err(Error::NotMaximal {
            residual: flags.maximal_residual.max(flags.tripotent_residual),
        });
    }
    Ok(())
}

fn peak(z: &Element, e: &Element, rank: usize) -> Complex64 {
    (1.0 + pairing(z, e) / rank as f64) * 0.5
}

/// `h(z) = ½(1 + ⟨z,e⟩_a/⟨e,e⟩_a)`, which peaks on the closed ball exactly
/// at the maximal tripotent `e` (where `⟨e,e⟩_a = rank`).
pub fn shilov_witness(f: &Factor, e: &Element, z: &Element) -> Result<Complex64> {
    f.ensure(z)?;
    ensure_maximal(f, e)?;
    Ok(peak(z, e, f.rank()))
}

/// Largest `δ` with `δ·‖e‖ + √(2δ)·‖e‖ ≤ ε`; then `|1 − ⟨z,e⟩/⟨e,e⟩| < δ`
/// forces `‖z − e‖ < ε` whenever `‖z‖ ≤ ‖e‖` in an inner product space.
pub fn delta_for_epsilon(norm_e: f64, epsilon: f64) -> Result<f64> {
    if !(norm_e > 0.0 && epsilon > 0.0 && norm_e.is_finite() && epsilon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "need positive finite ‖e‖ and ε, got {norm_e} and {epsilon}"
        )));
    }
    // quadratic in s = √δ: s² + √2·s − ε/‖e‖ = 0
    let r = epsilon / norm_e;
    let s = 2.0 * r / (std::f64::consts::SQRT_2 + (2.0 + 4.0 * r).sqrt());
    Ok(s * s)
}

/// `η` with `½|1+μ| > 1−η ⇒ |1−μ| < δ` on the closed unit disc:
/// `δ = 2√(2η − η²)`.
pub fn eta_for_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0 && delta <= 2.0) {
        return Err(Error::InvalidArgument(format!(
            "δ = {delta} outside (0, 2]"
        )));
    }
    let q = delta * delta / 4.0;
    // 1 − √(1 − q) without cancellation
    Ok(q / (1.0 + (1.0 - q).sqrt()))
}

/// The `ε ↦ δ ↦ η` chain at a maximal tripotent of a rank-`n` factor.
pub fn eta_for_epsilon(rank: usize, epsilon: f64) -> Result<f64> {
    eta_for_delta(delta_for_epsilon((rank as f64).sqrt(), epsilon)?.min(2.0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShilovSweep {
    pub epsilon: f64,
    pub delta: f64,
    pub eta: f64,
    pub value_at_e: f64,
    /// Largest `|h(z)|` over boundary samples with `‖z − e‖ ≥ ε`.
    pub sup_away: f64,
    pub samples_away: usize,
    pub samples: usize,
}

impl ShilovSweep {
    pub fn holds(&self) -> bool {
        (self.value_at_e - 1.0).abs() <= 1e-12 && self.sup_away <= 1.0 - self.eta
    }
}

/// Samples the unit sphere (half uniformly, half clustered around `e`) and
/// compares `|h|` away from `e` with the bound `1 − η(ε)`.
pub fn shilov_sweep<R: Rng + ?Sized>(
    f: &Factor,
    e: &Element,
    epsilon: f64,
    samples: usize,
    rng: &mut R,
) -> Result<ShilovSweep> {
    ensure_maximal(f, e)?;
    let n = f.rank();
    let delta = delta_for_epsilon((n as f64).sqrt(), epsilon)?;
    let eta = eta_for_delta(delta.min(2.0))?;
    let mut sup_away: f64 = 0.0;
    let mut samples_away = 0;
    for i in 0..samples {
        let z = if i % 2 == 0 {
            random_element(f, rng, Radius::Exact(1.0))
        } else {
            let w = random_element(f, rng, Radius::Uniform(3.0 * epsilon));
            let y = e + &w;
            y.scale_real(1.0 / y.norm())
        };
        if (&z - e).norm() >= epsilon {
            samples_away += 1;
            sup_away = sup_away.max(peak(&z, e, n).norm());
        }
    }
    Ok(ShilovSweep {
        epsilon,
        delta,
        eta,
        value_at_e: peak(e, e, n).norm(),
        sup_away,
        samples_away,
        samples,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub radius: f64,
    pub eta: f64,
    /// Points of the sample set outside `B(e, radius)`.
    pub kept: usize,
    pub sup_set: f64,
    /// `sup_ball − sup_set` with `sup_ball = h(e) = 1`.
    pub gap: f64,
}

/// Restricts `points` to the complement of `B(e, radius)` and measures how
/// far the peak function's sup over that set falls below its sup over the
/// ball.
pub fn shilov_minimality(
    f: &Factor,
    e: &Element,
    points: &[Element],
    radius: f64,
) -> Result<MinimalityReport> {
    ensure_maximal(f, e)?;
    let eta = eta_for_epsilon(f.rank(), radius)?;
    let mut kept = 0;
    let mut sup_set: f64 = 0.0;
    for z in points {
        f.ensure(z)?;
        if (z - e).norm() >= radius {
            kept += 1;
            sup_set = sup_set.max(peak(z, e, f.rank()).norm());
        }
    }
    Ok(MinimalityReport {
        radius,
        eta,
        kept,
        sup_set,
        gap: peak(e, e, f.rank()).norm() - sup_set,
    })
}

/// Candidate determining subsets of the closed ball.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetSpec {
    Gamma,
    Gamma1,
    /// `{g(v)}` for `g` in the identity component.
    OrbitG0(Element),
    /// As [`SetSpec::OrbitG0`] plus transposes and coordinate permutations.
    OrbitG(Element),
}

impl SetSpec {
    pub fn name(&self) -> &'static str {
        match self {
            SetSpec::Gamma => "gamma",
            SetSpec::Gamma1 => "gamma1",
            SetSpec::OrbitG0(_) => "orbit-g0",
            SetSpec::OrbitG(_) => "orbit-g",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeterminingReport {
    pub test_function_id: TestFunctionId,
    pub set: String,
    pub sup_ball: f64,
    pub sup_set: f64,
    pub gap: f64,
    pub n_set: usize,
    pub n_ball: usize,
}

/// Base radius for the uniformly drawn half of the orbit samples.
const ORBIT_BASE_RADIUS: f64 = 0.99;

/// Sampled `sup ‖h‖` over the closed ball versus over a candidate set. The
/// set samples are points of the closed ball, so they are pooled into the
/// ball samples; `sup_set ≤ sup_ball` holds by construction.
pub fn determining_sup(
    f: &Factor,
    h: &TestFunction,
    set: &SetSpec,
    n_set: usize,
    n_ball: usize,
    seed: u64,
) -> Result<DeterminingReport> {
    h.check_factor(f)?;
    let mut rng = seeded_rng(seed);
    let mut set_points: Vec<Element> = Vec::with_capacity(n_set + h.anchors().len());
    match set {
        SetSpec::Gamma => {
            for _ in 0..n_set {
                set_points.push(random_maximal_tripotent(f, &mut rng));
            }
            set_points.extend(h.anchors().iter().cloned());
        }
        SetSpec::Gamma1 => {
            for _ in 0..n_set {
                set_points.push(random_unitary_tripotent(f, &mut rng)?);
            }
            set_points.extend(h.anchors().iter().cloned());
        }
        SetSpec::OrbitG0(v) | SetSpec::OrbitG(v) => {
            f.ensure(v)?;
            if v.norm() > 1.0 + tol::UNIT_NORM {
                return Err(Error::Domain(
                    "orbit base point lies outside the closed ball".into(),
                ));
            }
            for i in 0..n_set {
                let mut g = random_automorphism(f, &mut rng, ORBIT_BASE_RADIUS);
                if i % 2 == 1 {
                    // base points t·e with t ↑ 1 push v towards the maximal
                    // tripotent e, which the orbit has in its closure
                    let e = random_maximal_tripotent(f, &mut rng);
                    let t = 1.0 - 10f64.powf(-4.0 * rng.random::<f64>());
                    g = BallAutomorphism::from_parts(g.isometry().clone(), e.scale_real(t))?;
                }
                if matches!(set, SetSpec::OrbitG(_)) {
                    let d = discrete_isometry(f, &mut rng);
                    g = BallAutomorphism::from_parts(&d * g.isometry(), g.base().clone())?;
                }
                set_points.push(g.apply(v)?);
            }
        }
    }
    let sup_set = set_points.iter().map(|z| h.norm_at(z)).fold(0.0, f64::max);
    let mut sup_ball = sup_set;
    for i in 0..n_ball {
        let radius = if i % 2 == 0 {
            Radius::Exact(1.0)
        } else {
            Radius::Uniform(1.0)
        };
        sup_ball = sup_ball.max(h.norm_at(&random_element(f, &mut rng, radius)));
    }
    Ok(DeterminingReport {
        test_function_id: h.id(),
        set: set.name().to_string(),
        sup_ball,
        sup_set,
        gap: sup_ball - sup_set,
        n_set: set_points.len(),
        n_ball: n_ball + set_points.len(),
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitClosurePoint {
    pub t: f64,
    /// `‖g_{te}(v) − e‖`, absent when the transvection failed.
    pub distance: Option<f64>,
    pub error: Option<String>,
}

/// Distances `‖g_{te}(v) − e‖` along a grid of `t ↑ 1`, showing maximal
/// tripotents as limits of orbit points of `v`. Interior points `v` are
/// accepted too; the limit is the same.
pub fn gamma_in_orbit_closure_demo(
    f: &Factor,
    v: &Element,
    e: &Element,
    t_grid: &[f64],
) -> Result<Vec<OrbitClosurePoint>> {
    f.ensure(v)?;
    if v.norm() > 1.0 + tol::UNIT_NORM {
        return Err(Error::Domain("v lies outside the closed ball".into()));
    }
    ensure_maximal(f, e)?;
    Ok(t_grid
        .iter()
        .map(|&t| match transvection_apply(f, &e.scale_real(t), v) {
            Ok(w) => OrbitClosurePoint {
                t,
                distance: Some((&w - e).norm()),
                error: None,
            },
            Err(err) => OrbitClosurePoint {
                t,
                distance: None,
                error: Some(err.to_string()),
            },
        })
        .collect())
}
