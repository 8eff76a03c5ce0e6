//! Odd powers, spectral frames, odd functional calculus, tripotent
//! classification, Peirce projections, element rank and the tripotent
//! order.
//!
//! Spectral values are stored in descending order: `λ₁ = ‖x‖ ≥ λ₂ ≥ … > 0`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factors::{Element, Factor, FactorKind, LinearMap};
use crate::linalg::{self, hermitian_eigen};
use crate::operators::bergmann_map;
use crate::tol;

/// `x^{(m)}` for odd `m`, via `x^{(2n+1)} = {x, x^{(2n−1)}, x}`.
pub fn odd_power(f: &Factor, x: &Element, m: u32) -> Result<Element> {
    f.ensure(x)?;
    if m.is_multiple_of(2) {
        return Err(Error::EvenPower(m));
    }
    let mut p = x.clone();
    for _ in 0..m / 2 {
        p = f.triple(x, &p, x);
    }
    Ok(p)
}

/// `x = Σ λ_i e_i` over a frame of pairwise orthogonal minimal tripotents.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpectralRepr", into = "SpectralRepr")]
pub struct SpectralData {
    pub base: Element,
    pub lambdas: Vec<f64>,
    pub frame: Vec<Element>,
}

impl SpectralData {
    /// `Σ φ(λ_i) e_i`.
    pub fn map_values<F: Fn(f64) -> f64>(&self, phi: F) -> Element {
        let f = self.base.factor();
        self.lambdas
            .iter()
            .zip(&self.frame)
            .fold(Element::zero(f), |acc, (&l, e)| acc + e.scale_real(phi(l)))
    }

    pub fn reconstruct(&self) -> Element {
        self.map_values(|l| l)
    }
}

/// SVD on matrix blocks (`e_i = u_i v_i*`), polar decomposition on
/// commutative blocks (`e_i = (x_i/|x_i|)·δ_i`); values below
/// `1e-12·‖x‖` are dropped.
pub fn spectral_decomposition(f: &Factor, x: &Element) -> Result<SpectralData> {
    f.ensure(x)?;
    let cutoff = tol::SPECTRAL_DROP * x.norm();
    let mut pairs: Vec<(f64, Element)> = Vec::new();
    for (offset, block) in f.blocks() {
        let xs = &x.coords().as_slice()[offset..offset + block.dim()];
        let mut embed = |local: &[Complex64], lambda: f64| {
            let mut e = Element::zero(f).into_coords();
            e.as_mut_slice()[offset..offset + local.len()].copy_from_slice(local);
            pairs.push((lambda, Element::from_parts(f.clone(), e)));
        };
        match block.kind() {
            FactorKind::Matrix { p, q } => {
                let m = DMatrix::from_row_slice(*p, *q, xs);
                let svd = linalg::svd(&m)?;
                for (k, &s) in svd.singular_values.iter().enumerate() {
                    if s > cutoff && s > 0.0 {
                        let e = svd.u.column(k) * svd.v.column(k).adjoint();
                        let local: Vec<Complex64> = (0..*p)
                            .flat_map(|i| (0..*q).map(move |j| (i, j)))
                            .map(|ij| e[ij])
                            .collect();
                        embed(&local, s);
                    }
                }
            }
            FactorKind::Commutative { n } => {
                for (i, c) in xs.iter().enumerate() {
                    let r = c.norm();
                    if r > cutoff && r > 0.0 {
                        let mut local = vec![Complex64::new(0.0, 0.0); *n];
                        local[i] = c / r;
                        embed(&local, r);
                    }
                }
            }
            FactorKind::DirectSum(_) => unreachable!("blocks are simple"),
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let (lambdas, frame) = pairs.into_iter().unzip();
    Ok(SpectralData {
        base: x.clone(),
        lambdas,
        frame,
    })
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpectralRepr {
    lambdas: Vec<f64>,
    frame: Vec<Element>,
}

impl TryFrom<SpectralRepr> for SpectralData {
    type Error = Error;

    fn try_from(r: SpectralRepr) -> Result<Self> {
        if r.lambdas.len() != r.frame.len() {
            return Err(Error::InvalidArgument(format!(
                "{} spectral values for a frame of {}",
                r.lambdas.len(),
                r.frame.len()
            )));
        }
        let Some(first) = r.frame.first() else {
            return Err(Error::InvalidArgument(
                "empty frame carries no factor; encode zero explicitly".into(),
            ));
        };
        let f = first.factor().clone();
        if r.frame.len() > f.rank() {
            return Err(Error::InvalidArgument("frame longer than the rank".into()));
        }
        if r.lambdas.iter().any(|l| !(l.is_finite() && *l > 0.0))
            || r.lambdas.windows(2).any(|w| w[0] < w[1])
        {
            return Err(Error::InvalidArgument(
                "spectral values must be positive and descending".into(),
            ));
        }
        for (i, e) in r.frame.iter().enumerate() {
            f.ensure(e)?;
            let flags = classify_tripotent(&f, e, 1e-8)?;
            if !flags.is_minimal {
                return Err(Error::InvalidArgument(format!(
                    "frame element {i} is not a minimal tripotent"
                )));
            }
            for other in &r.frame[..i] {
                if f.d_map(e, other).frobenius_norm() > 1e-8 {
                    return Err(Error::InvalidArgument("frame is not orthogonal".into()));
                }
            }
        }
        let base = r
            .lambdas
            .iter()
            .zip(&r.frame)
            .fold(Element::zero(&f), |acc, (&l, e)| acc + e.scale_real(l));
        Ok(SpectralData {
            base,
            lambdas: r.lambdas,
            frame: r.frame,
        })
    }
}

impl From<SpectralData> for SpectralRepr {
    fn from(s: SpectralData) -> Self {
        SpectralRepr {
            lambdas: s.lambdas,
            frame: s.frame,
        }
    }
}

/// Odd real polynomial `Σ c_k t^k`, `c_k = 0` for even `k`.
#[derive(Clone, Debug, PartialEq)]
pub struct OddPolynomial {
    coeffs: Vec<f64>,
}

impl OddPolynomial {
    /// `coeffs[k]` is the coefficient of `t^k`.
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if let Some(degree) = coeffs
            .iter()
            .enumerate()
            .position(|(k, &c)| k % 2 == 0 && c != 0.0)
        {
            return Err(Error::EvenCoefficient { degree });
        }
        Ok(Self { coeffs })
    }

    pub fn monomial(degree: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = 1.0;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * t + c)
    }
}

/// `p(x) = Σ p(λ_i) e_i`.
pub fn odd_calculus(f: &Factor, x: &Element, p: &OddPolynomial) -> Result<Element> {
    Ok(spectral_decomposition(f, x)?.map_values(|l| p.eval(l)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripotentFlags {
    pub is_tripotent: bool,
    pub is_minimal: bool,
    pub is_maximal: bool,
    pub is_unitary: bool,
    /// `‖{e,e,e} − e‖`.
    pub tripotent_residual: f64,
    /// `‖B(e,e)‖_F`.
    pub maximal_residual: f64,
    /// `‖Q_e Q_e − Id‖_F`.
    pub unitary_residual: f64,
    /// Dimension of the Peirce-1 space (eigenvalue-1 space of `D(e,e)`).
    pub peirce1_dim: usize,
}

pub fn classify_tripotent(f: &Factor, e: &Element, tol: f64) -> Result<TripotentFlags> {
    f.ensure(e)?;
    let tripotent_residual = (f.triple(e, e, e) - e).norm();
    let maximal_residual = bergmann_map(f, e, e).frobenius_norm();
    let qq = f.q_map(e).then_conjugate(&f.q_map(e))?;
    let unitary_residual = qq.distance(&LinearMap::identity(f));
    let is_tripotent = tripotent_residual <= tol;
    let peirce1_dim = if is_tripotent {
        // D(e,e) has spectrum in {0, ½, 1}; count the values nearest to 1
        let (values, _) = hermitian_eigen(f.d_map(e, e).matrix(), tol::HERMITIAN)?;
        values.iter().filter(|&&v| (v - 1.0).abs() < 0.25).count()
    } else {
        0
    };
    let is_unitary = is_tripotent && unitary_residual <= tol;
    Ok(TripotentFlags {
        is_tripotent,
        is_minimal: is_tripotent && peirce1_dim == 1,
        is_maximal: is_tripotent && (maximal_residual <= tol || is_unitary),
        is_unitary,
        tripotent_residual,
        maximal_residual,
        unitary_residual,
        peirce1_dim,
    })
}

/// `P₀ = B(e,e)`, `P½ = 2(D(e,e) − Q_eQ_e)`, `P₁ = Q_eQ_e`.
#[derive(Clone, Debug)]
pub struct PeirceProjections {
    pub p0: LinearMap,
    pub phalf: LinearMap,
    pub p1: LinearMap,
}

pub fn peirce_projections(f: &Factor, e: &Element) -> Result<PeirceProjections> {
    ensure_tripotent(f, e)?;
    let qq = f.q_map(e).then_conjugate(&f.q_map(e))?;
    let d = f.d_map(e, e);
    let phalf = (&d - &qq).scale(Complex64::new(2.0, 0.0));
    Ok(PeirceProjections {
        p0: bergmann_map(f, e, e),
        phalf,
        p1: qq,
    })
}

fn ensure_tripotent(f: &Factor, e: &Element) -> Result<()> {
    f.ensure(e)?;
    let residual = (f.triple(e, e, e) - e).norm();
    if residual > tol::ALGEBRA {
        return Err(Error::NotTripotent { residual });
    }
    Ok(())
}

/// `c ≤ e` iff `e − c` is a tripotent orthogonal to `c`; `0 ≤ e` and
/// `e ≤ e` always hold.
pub fn tripotent_leq(f: &Factor, c: &Element, e: &Element) -> Result<bool> {
    ensure_tripotent(f, c)?;
    ensure_tripotent(f, e)?;
    let d = e - c;
    let d_is_tripotent = (f.triple(&d, &d, &d) - &d).norm() <= tol::ALGEBRA;
    Ok(d_is_tripotent && f.d_map(&d, c).frobenius_norm() <= tol::ALGEBRA)
}

/// Number of distinct non-zero spectral values (the dimension of the
/// subtriple generated by `x`).
pub fn element_rank(f: &Factor, x: &Element) -> Result<usize> {
    let s = spectral_decomposition(f, x)?;
    Ok(count_distinct(&s.lambdas))
}

fn count_distinct(sorted_desc: &[f64]) -> usize {
    match sorted_desc.first() {
        None => 0,
        Some(_) => {
            1 + sorted_desc
                .windows(2)
                .filter(|w| w[0] - w[1] > tol::RANK_SEPARATION)
                .count()
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMethod {
    /// Repeated cubing `x ← {x,x,x}`.
    Iterate,
    /// `Σ e_i` over the spectral values within `1e-8` of 1.
    Spectral,
}

/// Spectral values in this band are too close to 1 for repeated cubing to
/// settle the same way as the spectral threshold.
const SLOW_BAND: (f64, f64) = (1.0 - tol::BOUNDARY_SPECTRAL, 1.0 - 1e-12);

/// The tripotent `e = lim x^{(2n+1)}` of a unit-norm element.
pub fn boundary_tripotent(f: &Factor, x: &Element, method: BoundaryMethod) -> Result<Element> {
    f.ensure(x)?;
    let norm = x.norm();
    if (norm - 1.0).abs() > tol::UNIT_NORM {
        return Err(Error::NotUnitNorm { norm });
    }
    let spectral = spectral_decomposition(f, x)?;
    let e = match method {
        BoundaryMethod::Spectral => spectral
            .lambdas
            .iter()
            .zip(&spectral.frame)
            .filter(|(&l, _)| l >= 1.0 - tol::BOUNDARY_SPECTRAL)
            .fold(Element::zero(f), |acc, (_, e)| acc + e),
        BoundaryMethod::Iterate => {
            if let Some(&lambda) = spectral
                .lambdas
                .iter()
                .find(|&&l| l > SLOW_BAND.0 && l < SLOW_BAND.1)
            {
                return Err(Error::SlowConvergence { lambda });
            }
            let mut y = x.clone();
            let mut converged = false;
            for _ in 0..tol::ODD_POWER_CAP {
                let cube = f.triple(&y, &y, &y);
                // renormalise so rounding in the top value cannot grow
                let next = cube.scale_real(1.0 / cube.norm());
                let change = (&next - &y).norm();
                y = next;
                if change < tol::ODD_POWER_STEP {
                    converged = true;
                    break;
                }
            }
            if !converged {
                let lambda = spectral
                    .lambdas
                    .iter()
                    .copied()
                    .filter(|&l| l < 1.0 - tol::ODD_POWER_STEP)
                    .fold(0.0, f64::max);
                return Err(Error::SlowConvergence { lambda });
            }
            y
        }
    };
    let residual = (f.triple(&e, &e, &e) - &e).norm();
    if residual > tol::MEMBERSHIP {
        return Err(Error::Consistency(format!(
            "boundary tripotent has residual {residual:e}"
        )));
    }
    Ok(e)
}
