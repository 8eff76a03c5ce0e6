//! Bergmann operators, their square roots and quasi-inverses, together with
//! the catalogue of Jordan-pair identities they satisfy.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{Element, Factor, FactorKind, LinearMap};
use crate::linalg::{condition_number, hermitian_eigen, psd_sqrt, spectral_function};
use crate::tol;

/// `B(x,y) = Id − 2D(x,y) + Q_x Q_y`.
pub fn bergmann(f: &Factor, x: &Element, y: &Element) -> Result<LinearMap> {
    f.ensure(x)?;
    f.ensure(y)?;
    Ok(bergmann_map(f, x, y))
}

pub(crate) fn bergmann_map(f: &Factor, x: &Element, y: &Element) -> LinearMap {
    let d = f.d_map(x, y);
    let qq = f.q_map(x).then_conjugate(&f.q_map(y)).expect("same factor");
    let two = Complex64::new(2.0, 0.0);
    let m = DMatrix::identity(f.dim(), f.dim()) - d.matrix() * two + qq.matrix();
    LinearMap::new(f.clone(), m).expect("square")
}

/// `B_a = B(a,a)^½` and its inverse for `‖a‖ < 1`.
#[derive(Clone, Debug)]
pub struct BergmannSqrt {
    pub base: Element,
    pub map: LinearMap,
    pub inverse_map: LinearMap,
    /// Spectrum of `B(a,a)`, ascending.
    pub eigenvalues: Vec<f64>,
}

/// Principal square root of `B(a,a)` through its Hermitian
/// eigendecomposition.
pub fn bergmann_sqrt(f: &Factor, a: &Element) -> Result<BergmannSqrt> {
    f.ensure(a)?;
    let norm = a.norm();
    if norm >= 1.0 {
        return Err(Error::Domain(format!(
            "B_a needs ‖a‖ < 1, got ‖a‖ = {norm}"
        )));
    }
    let b = bergmann_map(f, a, a);
    let (values, vectors) = hermitian_eigen(b.matrix(), tol::HERMITIAN)?;
    let mut eigenvalues: Vec<f64> = values.iter().copied().collect();
    eigenvalues.sort_by(f64::total_cmp);
    if let Some(&bad) = eigenvalues.iter().find(|&&v| v < tol::EIGEN_FLOOR) {
        return Err(Error::NonPositiveEigenvalue { value: bad });
    }
    let map = spectral_function(&values, &vectors, f64::sqrt);
    let inverse = spectral_function(&values, &vectors, |v| 1.0 / v.sqrt());
    Ok(BergmannSqrt {
        base: a.clone(),
        map: LinearMap::new(f.clone(), map)?,
        inverse_map: LinearMap::new(f.clone(), inverse)?,
        eigenvalues,
    })
}

/// JB*-operator norm of `B_a` in closed form: on a matrix block `B_a` is
/// `z ↦ (1−aa*)^½ z (1−a*a)^½` whose norm is the product of the two
/// factors' norms; on a commutative block it multiplies by `1 − |a_i|²`.
pub fn bergmann_sqrt_operator_norm(f: &Factor, a: &Element) -> Result<f64> {
    f.ensure(a)?;
    if a.norm() >= 1.0 {
        return Err(Error::Domain("B_a needs ‖a‖ < 1".into()));
    }
    let mut best: f64 = 0.0;
    for (offset, block) in f.blocks() {
        let xs = &a.coords().as_slice()[offset..offset + block.dim()];
        let v = match block.kind() {
            FactorKind::Matrix { p, q } => {
                let m = DMatrix::from_row_slice(*p, *q, xs);
                let left = DMatrix::identity(*p, *p) - &m * m.adjoint();
                let right = DMatrix::identity(*q, *q) - m.adjoint() * &m;
                max_sv(&psd_sqrt(&left)?) * max_sv(&psd_sqrt(&right)?)
            }
            FactorKind::Commutative { .. } => {
                xs.iter().map(|c| 1.0 - c.norm_sqr()).fold(0.0, f64::max)
            }
            FactorKind::DirectSum(_) => unreachable!("blocks are simple"),
        };
        best = best.max(v);
    }
    Ok(best)
}

fn max_sv(m: &DMatrix<Complex64>) -> f64 {
    m.singular_values().iter().copied().fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    Direct,
    Series,
}

#[derive(Clone, Debug)]
pub struct QuasiInverseResult {
    pub value: Element,
    pub solver: Solver,
    /// `‖B(x,y)·value − (x − Q_x y)‖`.
    pub residual: f64,
    /// Condition number of `B(x,y)`.
    pub condition: f64,
}

/// `x^y = B(x,y)^{-1}(x − Q_x y)` by a dense LU solve.
pub fn quasi_inverse(f: &Factor, x: &Element, y: &Element) -> Result<QuasiInverseResult> {
    quasi_inverse_with_limit(f, x, y, tol::CONDITION_LIMIT)
}

/// [`quasi_inverse`] with an explicit condition-number threshold.
pub fn quasi_inverse_with_limit(
    f: &Factor,
    x: &Element,
    y: &Element,
    condition_limit: f64,
) -> Result<QuasiInverseResult> {
    f.ensure(x)?;
    f.ensure(y)?;
    let b = bergmann_map(f, x, y);
    let condition = condition_number(b.matrix());
    if condition.is_nan() || condition > condition_limit {
        return Err(Error::NotQuasiInvertible {
            condition,
            threshold: condition_limit,
        });
    }
    let rhs = x.coords() - f.triple_coords(x.coords(), y.coords(), x.coords());
    let sol = b
        .matrix()
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(Error::NotQuasiInvertible {
            condition: f64::INFINITY,
            threshold: condition_limit,
        })?;
    let residual = f.ball_norm_coords(&(b.matrix() * &sol - rhs));
    Ok(QuasiInverseResult {
        value: Element::from_parts(f.clone(), sol),
        solver: Solver::Direct,
        residual,
        condition,
    })
}

pub(crate) fn qinv(f: &Factor, x: &Element, y: &Element) -> Result<Element> {
    quasi_inverse(f, x, y).map(|r| r.value)
}

/// Neumann series `Σ_k D(x,y)^k x`, summed until the increment drops below
/// `tol`. Requires `‖x‖·‖y‖ < 1`.
pub fn quasi_inverse_series(f: &Factor, x: &Element, y: &Element, tol: f64) -> Result<Element> {
    f.ensure(x)?;
    f.ensure(y)?;
    let product = x.norm() * y.norm();
    if product >= 1.0 {
        return Err(Error::SeriesPrecondition { product });
    }
    let d = f.d_map(x, y);
    let mut term = x.coords().clone();
    let mut sum = term.clone();
    for _ in 0..tol::SERIES_CAP {
        if term.norm() < tol {
            return Ok(Element::from_parts(f.clone(), sum));
        }
        term = d.matrix() * &term;
        sum += &term;
    }
    Err(Error::NonConvergence {
        iterations: tol::SERIES_CAP,
    })
}

/// Identities from the Jordan-pair catalogue.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Identity {
    /// `B(x,y+z) = B(x,y) B(x^y,z)`
    Jp33,
    /// `B(y+z,x) = B(z,x^y) B(y,x)`
    Jp34,
    /// `B(x,y)^{-1} = B(x^y,−y)`
    Jp35,
    /// `B(B(u,v)x, B(v,u)^{-1}y) = B(u,v) B(x,y) B(u,v)^{-1}`
    ///
    /// The right-hand side conjugates by `B(u,v)`. Conjugating by
    /// `B(v,u)^{-1}` instead is false already in `ℂ`, where the two sides
    /// differ by the factor `(1−uv̄)²/(1−vū)²`; the forms agree when
    /// `u = v`, which is the case used with `B_a`.
    Jp36,
    /// `x^{y+z} = (x^y)^z`
    Jpa1,
    /// `(x+z)^y = x^y + B(x,y)^{-1} z^{(y^x)}`
    Jpa2,
    /// `(B(x,y)z)^y = B(x,y) z^{B(y,x)y}`
    Jps,
    /// `a^a = B_a^{-1} a`
    Local1,
    /// `B(B_a x, B_a^{-1} y) = B_a B(x,y) B_a^{-1}`
    Jp36Sqrt,
}

impl Identity {
    pub const ALL: [Identity; 9] = [
        Identity::Jp33,
        Identity::Jp34,
        Identity::Jp35,
        Identity::Jp36,
        Identity::Jpa1,
        Identity::Jpa2,
        Identity::Jps,
        Identity::Local1,
        Identity::Jp36Sqrt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Jp33 => "JP33",
            Identity::Jp34 => "JP34",
            Identity::Jp35 => "JP35",
            Identity::Jp36 => "JP36",
            Identity::Jpa1 => "JPA1",
            Identity::Jpa2 => "JPA2",
            Identity::Jps => "JPS",
            Identity::Local1 => "local1",
            Identity::Jp36Sqrt => "JP36-sqrt",
        }
    }

    /// Number of element inputs.
    pub fn arity(self) -> usize {
        match self {
            Identity::Local1 => 1,
            Identity::Jp35 => 2,
            Identity::Jp36 => 4,
            _ => 3,
        }
    }
}

impl fmt::Display for Identity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Identity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Identity::ALL
            .into_iter()
            .find(|id| id.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown identity `{s}`")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum IdentityOutcome {
    /// `residual = ‖lhs − rhs‖` (Frobenius for operators, Euclidean for
    /// elements) and `scale = max(1, ‖lhs‖, ‖rhs‖)`.
    Checked {
        residual: f64,
        scale: f64,
    },
    Skipped {
        reason: String,
    },
}

impl IdentityOutcome {
    pub fn passes(&self, tol: f64) -> bool {
        match self {
            IdentityOutcome::Checked { residual, scale } => *residual <= tol * scale,
            IdentityOutcome::Skipped { .. } => false,
        }
    }
}

/// Evaluates both sides of `id` on `inputs` and returns their distance.
///
/// Inputs outside the open unit ball, or any embedded quasi-inverse that does
/// not exist, produce [`IdentityOutcome::Skipped`].
pub fn verify_identity(f: &Factor, id: Identity, inputs: &[Element]) -> Result<IdentityOutcome> {
    if inputs.len() != id.arity() {
        return Err(Error::InvalidArgument(format!(
            "{id} takes {} inputs, got {}",
            id.arity(),
            inputs.len()
        )));
    }
    for x in inputs {
        f.ensure(x)?;
        if x.norm() >= 1.0 {
            return Ok(IdentityOutcome::Skipped {
                reason: format!("input of norm {} outside the open ball", x.norm()),
            });
        }
    }
    match evaluate_identity(f, id, inputs) {
        Ok(outcome) => Ok(outcome),
        Err(e @ (Error::NotQuasiInvertible { .. } | Error::Domain(_))) => {
            Ok(IdentityOutcome::Skipped {
                reason: e.to_string(),
            })
        }
        Err(e) => Err(e),
    }
}

fn maps_outcome(lhs: &LinearMap, rhs: &LinearMap) -> IdentityOutcome {
    IdentityOutcome::Checked {
        residual: lhs.distance(rhs),
        scale: 1f64.max(lhs.frobenius_norm()).max(rhs.frobenius_norm()),
    }
}

fn elements_outcome(lhs: &Element, rhs: &Element) -> IdentityOutcome {
    IdentityOutcome::Checked {
        residual: (lhs - rhs).coord_norm(),
        scale: 1f64.max(lhs.coord_norm()).max(rhs.coord_norm()),
    }
}

fn evaluate_identity(f: &Factor, id: Identity, v: &[Element]) -> Result<IdentityOutcome> {
    let b = |x: &Element, y: &Element| bergmann_map(f, x, y);
    Ok(match id {
        Identity::Jp33 => {
            let (x, y, z) = (&v[0], &v[1], &v[2]);
            let lhs = b(x, &(y + z));
            let rhs = &b(x, y) * &b(&qinv(f, x, y)?, z);
            maps_outcome(&lhs, &rhs)
        }
        Identity::Jp34 => {
            let (x, y, z) = (&v[0], &v[1], &v[2]);
            let lhs = b(&(y + z), x);
            let rhs = &b(z, &qinv(f, x, y)?) * &b(y, x);
            maps_outcome(&lhs, &rhs)
        }
        Identity::Jp35 => {
            let (x, y) = (&v[0], &v[1]);
            ensure_invertible(&b(x, y))?;
            let lhs = b(x, y).inverse()?;
            let rhs = b(&qinv(f, x, y)?, &-y);
            maps_outcome(&lhs, &rhs)
        }
        Identity::Jp36 => {
            let (u, w, x, y) = (&v[0], &v[1], &v[2], &v[3]);
            let buv = b(u, w);
            let bvu = b(w, u);
            ensure_invertible(&bvu)?;
            ensure_invertible(&buv)?;
            let bvu_inv = bvu.inverse()?;
            let lhs = b(&buv.apply_unchecked(x), &bvu_inv.apply_unchecked(y));
            let rhs = &(&buv * &b(x, y)) * &buv.inverse()?;
            maps_outcome(&lhs, &rhs)
        }
        Identity::Jpa1 => {
            let (x, y, z) = (&v[0], &v[1], &v[2]);
            let lhs = qinv(f, x, &(y + z))?;
            let rhs = qinv(f, &qinv(f, x, y)?, z)?;
            elements_outcome(&lhs, &rhs)
        }
        Identity::Jpa2 => {
            let (x, y, z) = (&v[0], &v[1], &v[2]);
            let lhs = qinv(f, &(x + z), y)?;
            let bxy = b(x, y);
            ensure_invertible(&bxy)?;
            let yx = qinv(f, y, x)?;
            let rhs = qinv(f, x, y)? + bxy.inverse()?.apply_unchecked(&qinv(f, z, &yx)?);
            elements_outcome(&lhs, &rhs)
        }
        Identity::Jps => {
            let (x, y, z) = (&v[0], &v[1], &v[2]);
            let bxy = b(x, y);
            let lhs = qinv(f, &bxy.apply_unchecked(z), y)?;
            let byx_y = b(y, x).apply_unchecked(y);
            let rhs = bxy.apply_unchecked(&qinv(f, z, &byx_y)?);
            elements_outcome(&lhs, &rhs)
        }
        Identity::Local1 => {
            let a = &v[0];
            let ba = bergmann_sqrt(f, a)?;
            let lhs = qinv(f, a, a)?;
            let rhs = ba.inverse_map.apply_unchecked(a);
            elements_outcome(&lhs, &rhs)
        }
        Identity::Jp36Sqrt => {
            let (a, x, y) = (&v[0], &v[1], &v[2]);
            let ba = bergmann_sqrt(f, a)?;
            let lhs = b(
                &ba.map.apply_unchecked(x),
                &ba.inverse_map.apply_unchecked(y),
            );
            let rhs = &(&ba.map * &b(x, y)) * &ba.inverse_map;
            maps_outcome(&lhs, &rhs)
        }
    })
}

fn ensure_invertible(m: &LinearMap) -> Result<()> {
    let condition = condition_number(m.matrix());
    if condition.is_nan() || condition > tol::CONDITION_LIMIT {
        return Err(Error::NotQuasiInvertible {
            condition,
            threshold: tol::CONDITION_LIMIT,
        });
    }
    Ok(())
}
