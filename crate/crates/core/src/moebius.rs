//! Transvections, ball automorphisms `g = T∘g_a`, the cocycle `k(a,b)` and
//! derivatives of transvections.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{Element, Factor, FactorKind, LinearMap};
use crate::operators::{bergmann_map, bergmann_sqrt, qinv};
use crate::sampling::{circle_point, haar_unitary, random_element, seeded_rng, Radius};

/// `g_a(x) = a + B_a x^{−a}`, defined for `‖a‖ < 1` and `‖a‖·‖x‖ < 1`.
pub fn transvection_apply(f: &Factor, a: &Element, x: &Element) -> Result<Element> {
    f.ensure(a)?;
    f.ensure(x)?;
    let na = a.norm();
    if na >= 1.0 {
        return Err(Error::Domain(format!(
            "transvection base has norm {na} ≥ 1"
        )));
    }
    let nx = x.norm();
    if na * nx >= 1.0 {
        return Err(Error::Domain(format!(
            "‖a‖·‖x‖ = {} ≥ 1 is outside the extension domain",
            na * nx
        )));
    }
    let sqrt = bergmann_sqrt(f, a)?;
    let xq = qinv(f, x, &-a)?;
    Ok(a + &sqrt.map.apply_unchecked(&xq))
}

/// Ball automorphism in the canonical form `x ↦ T(g_a(x))`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AutomorphismRepr", into = "AutomorphismRepr")]
pub struct BallAutomorphism {
    isometry: LinearMap,
    base: Element,
}

/// Probes used to certify that `T` preserves the JB*-norm.
const ISOMETRY_PROBES: usize = 100;
const ISOMETRY_TOL: f64 = 1e-10;

impl BallAutomorphism {
    /// Validates `‖a‖ < 1` and certifies `T` as a norm isometry on a fixed set
    /// of probes.
    pub fn new(isometry: LinearMap, base: Element) -> Result<Self> {
        let g = Self::from_parts(isometry, base)?;
        let defect = isometry_defect(&g.isometry, ISOMETRY_PROBES, &mut seeded_rng(0x150));
        if defect > ISOMETRY_TOL {
            return Err(Error::Domain(format!(
                "linear part is not an isometry (norm defect {defect:e})"
            )));
        }
        Ok(g)
    }

    /// Like [`BallAutomorphism::new`] without the isometry certificate, for
    /// linear parts that are isometries by construction.
    pub fn from_parts(isometry: LinearMap, base: Element) -> Result<Self> {
        isometry.factor().ensure(&base)?;
        if base.norm() >= 1.0 {
            return Err(Error::Domain(format!(
                "automorphism base has norm {} ≥ 1",
                base.norm()
            )));
        }
        Ok(Self { isometry, base })
    }

    pub fn identity(f: &Factor) -> Self {
        Self {
            isometry: LinearMap::identity(f),
            base: Element::zero(f),
        }
    }

    pub fn transvection(a: &Element) -> Result<Self> {
        Self::from_parts(LinearMap::identity(a.factor()), a.clone())
    }

    pub fn factor(&self) -> &Factor {
        self.isometry.factor()
    }

    pub fn isometry(&self) -> &LinearMap {
        &self.isometry
    }

    pub fn base(&self) -> &Element {
        &self.base
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        let y = transvection_apply(self.factor(), &self.base, x)?;
        Ok(self.isometry.apply_unchecked(&y))
    }

    /// `(T, a)⁻¹ = (T⁻¹, −T a)`, from `g⁻¹ = g_{−a}∘T⁻¹ = T⁻¹∘g_{−Ta}`.
    pub fn inverse(&self) -> Result<Self> {
        let t_inv = self.isometry.inverse()?;
        let base = -self.isometry.apply_unchecked(&self.base);
        Self::from_parts(t_inv, base)
    }

    /// `self ∘ other` normalised to canonical form.
    ///
    /// With `self = T g_a`, `other = S g_b` and `a₁ = S⁻¹a`:
    /// `T g_a S g_b = TS g_{a₁} g_b = TS g_c k = (TSk) g_{k⁻¹c}` where
    /// `c = g_{a₁}(b)` and `k = k(a₁, b)`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        let f = self.factor();
        if f != other.factor() {
            return Err(Error::FactorMismatch {
                expected: f.to_string(),
                found: other.factor().to_string(),
            });
        }
        let s_inv = other.isometry.inverse()?;
        let a1 = s_inv.apply_unchecked(&self.base);
        let c = transvection_apply(f, &a1, &other.base)?;
        let k = k_isometry(f, &a1, &other.base)?;
        let base = k.inverse()?.apply_unchecked(&c);
        let isometry = &(&self.isometry * &other.isometry) * &k;
        Self::from_parts(isometry, base)
    }
}

pub fn automorphism_apply(g: &BallAutomorphism, x: &Element) -> Result<Element> {
    g.apply(x)
}

pub fn automorphism_inverse(g: &BallAutomorphism) -> Result<BallAutomorphism> {
    g.inverse()
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AutomorphismRepr {
    isometry: LinearMap,
    base: Element,
}

impl TryFrom<AutomorphismRepr> for BallAutomorphism {
    type Error = Error;

    fn try_from(r: AutomorphismRepr) -> Result<Self> {
        BallAutomorphism::new(r.isometry, r.base)
    }
}

impl From<BallAutomorphism> for AutomorphismRepr {
    fn from(g: BallAutomorphism) -> Self {
        AutomorphismRepr {
            isometry: g.isometry,
            base: g.base,
        }
    }
}

/// `k(a,b) = B_{g_a(b)}^{-1} B_a B(b,−a)^{-1} B_b`, the linear isometry with
/// `g_a∘g_b = g_{g_a(b)}∘k(a,b)`.
pub fn k_isometry(f: &Factor, a: &Element, b: &Element) -> Result<LinearMap> {
    if a.norm() >= 1.0 || b.norm() >= 1.0 {
        return Err(Error::Domain("k(a,b) needs a, b in the open ball".into()));
    }
    let gab = transvection_apply(f, a, b)?;
    let s_gab = bergmann_sqrt(f, &gab)?;
    let s_a = bergmann_sqrt(f, a)?;
    let s_b = bergmann_sqrt(f, b)?;
    let mid = bergmann_map(f, b, &-a).inverse()?;
    Ok(&(&(&s_gab.inverse_map * &s_a.map) * &mid) * &s_b.map)
}

/// `g_a'(x₀) = B_a B(x₀,−a)^{-1}`.
pub fn transvection_derivative(f: &Factor, a: &Element, x0: &Element) -> Result<LinearMap> {
    f.ensure(a)?;
    f.ensure(x0)?;
    if a.norm() >= 1.0 || a.norm() * x0.norm() >= 1.0 {
        return Err(Error::Domain(
            "x₀ is outside the extension domain of g_a".into(),
        ));
    }
    let s_a = bergmann_sqrt(f, a)?;
    let b = bergmann_map(f, x0, &-a);
    let b_inv = b
        .inverse()
        .map_err(|_| Error::Domain("B(x₀,−a) is singular".into()))?;
    Ok(&s_a.map * &b_inv)
}

/// Random isometry in the identity component: `x ↦ U x V*` with Haar
/// unitaries on matrix blocks, unimodular phases on commutative blocks.
pub fn random_isometry<R: Rng + ?Sized>(f: &Factor, rng: &mut R) -> LinearMap {
    let mut m = DMatrix::zeros(f.dim(), f.dim());
    for (offset, block) in f.blocks() {
        let n = block.dim();
        let sub = match block.kind() {
            FactorKind::Matrix { p, q } => {
                let u = haar_unitary(*p, rng);
                let v = haar_unitary(*q, rng);
                sandwich_matrix(*p, *q, &u, &v.adjoint())
            }
            FactorKind::Commutative { .. } => {
                DMatrix::from_diagonal(&DVector::from_fn(n, |_, _| circle_point(rng)))
            }
            FactorKind::DirectSum(_) => unreachable!("blocks are simple"),
        };
        m.view_mut((offset, offset), (n, n)).copy_from(&sub);
    }
    LinearMap::new(f.clone(), m).expect("square")
}

/// Random isometry outside the identity component (with probability ½ per
/// block): transposition on square matrix blocks, a uniformly random
/// coordinate permutation on commutative blocks.
pub fn discrete_isometry<R: Rng + ?Sized>(f: &Factor, rng: &mut R) -> LinearMap {
    let mut m = DMatrix::zeros(f.dim(), f.dim());
    for (offset, block) in f.blocks() {
        let n = block.dim();
        let mut sub = DMatrix::identity(n, n);
        match block.kind() {
            FactorKind::Matrix { p, q } if p == q && rng.random::<bool>() => {
                sub.fill(Complex64::new(0.0, 0.0));
                for i in 0..*p {
                    for j in 0..*q {
                        sub[(j * q + i, i * q + j)] = Complex64::new(1.0, 0.0);
                    }
                }
            }
            FactorKind::Commutative { .. } => {
                let mut perm: Vec<usize> = (0..n).collect();
                perm.shuffle(rng);
                sub.fill(Complex64::new(0.0, 0.0));
                for (i, &j) in perm.iter().enumerate() {
                    sub[(j, i)] = Complex64::new(1.0, 0.0);
                }
            }
            _ => {}
        }
        m.view_mut((offset, offset), (n, n)).copy_from(&sub);
    }
    LinearMap::new(f.clone(), m).expect("square")
}

/// Matrix of `X ↦ L X R` on row-major `p × q` coordinates.
fn sandwich_matrix(
    p: usize,
    q: usize,
    left: &DMatrix<Complex64>,
    right: &DMatrix<Complex64>,
) -> DMatrix<Complex64> {
    let n = p * q;
    let mut m = DMatrix::zeros(n, n);
    let mut unit = DMatrix::zeros(p, q);
    for i in 0..p {
        for j in 0..q {
            unit.fill(Complex64::new(0.0, 0.0));
            unit[(i, j)] = Complex64::new(1.0, 0.0);
            let image = left * &unit * right;
            for r in 0..p {
                for s in 0..q {
                    m[(r * q + s, i * q + j)] = image[(r, s)];
                }
            }
        }
    }
    m
}

/// Random automorphism `T∘g_a` with `T` from [`random_isometry`] and
/// `‖a‖` uniform in `(0, base_radius]`.
pub fn random_automorphism<R: Rng + ?Sized>(
    f: &Factor,
    rng: &mut R,
    base_radius: f64,
) -> BallAutomorphism {
    let t = random_isometry(f, rng);
    let a = random_element(f, rng, Radius::Uniform(base_radius));
    BallAutomorphism::from_parts(t, a).expect("base inside the ball")
}

/// Largest `|‖Tz‖ − ‖z‖|` over random probes on and inside the unit sphere.
pub fn isometry_defect<R: Rng + ?Sized>(t: &LinearMap, probes: usize, rng: &mut R) -> f64 {
    let f = t.factor();
    (0..probes)
        .map(|i| {
            let radius = if i % 2 == 0 {
                Radius::Exact(1.0)
            } else {
                Radius::Uniform(1.0)
            };
            let z = random_element(f, rng, radius);
            (t.apply_unchecked(&z).norm() - z.norm()).abs()
        })
        .fold(0.0, f64::max)
}
