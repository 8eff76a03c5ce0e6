use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Factor, FactorKind};
use crate::error::{Error, Result};

/// A point of a factor, stored as its coordinate vector in the canonical
/// basis (row-major entries for matrix blocks).
///
/// Arithmetic operators panic when the operands live in different factors,
/// the same way dense-matrix arithmetic panics on shape mismatch.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ElementRepr", into = "ElementRepr")]
pub struct Element {
    factor: Factor,
    coords: DVector<Complex64>,
}

impl Element {
    pub fn new(factor: Factor, coords: DVector<Complex64>) -> Result<Self> {
        if coords.len() != factor.dim() {
            return Err(Error::DimensionMismatch {
                expected: factor.dim(),
                found: coords.len(),
            });
        }
        Ok(Self { factor, coords })
    }

    pub fn from_slice(factor: &Factor, coords: &[Complex64]) -> Result<Self> {
        Self::new(factor.clone(), DVector::from_column_slice(coords))
    }

    /// Element with real coordinates.
    pub fn from_reals(factor: &Factor, coords: &[f64]) -> Result<Self> {
        let c: Vec<Complex64> = coords.iter().map(|&r| Complex64::new(r, 0.0)).collect();
        Self::from_slice(factor, &c)
    }

    pub fn zero(factor: &Factor) -> Self {
        Self {
            factor: factor.clone(),
            coords: DVector::zeros(factor.dim()),
        }
    }

    /// The `j`-th canonical basis vector.
    pub fn basis(factor: &Factor, j: usize) -> Self {
        let mut coords = DVector::zeros(factor.dim());
        coords[j] = Complex64::new(1.0, 0.0);
        Self {
            factor: factor.clone(),
            coords,
        }
    }

    /// Element of a matrix factor from a `p × q` matrix.
    pub fn from_matrix(factor: &Factor, m: &DMatrix<Complex64>) -> Result<Self> {
        match factor.kind() {
            FactorKind::Matrix { p, q } if m.nrows() == *p && m.ncols() == *q => {
                let coords = DVector::from_iterator(
                    p * q,
                    (0..*p).flat_map(|i| (0..*q).map(move |j| m[(i, j)])),
                );
                Ok(Self {
                    factor: factor.clone(),
                    coords,
                })
            }
            _ => Err(Error::InvalidArgument(format!(
                "a {}x{} matrix is not an element of {factor}",
                m.nrows(),
                m.ncols()
            ))),
        }
    }

    /// The matrix of an element of a matrix factor.
    pub fn to_matrix(&self) -> Option<DMatrix<Complex64>> {
        match self.factor.kind() {
            FactorKind::Matrix { p, q } => {
                Some(DMatrix::from_row_slice(*p, *q, self.coords.as_slice()))
            }
            _ => None,
        }
    }

    pub(crate) fn from_parts(factor: Factor, coords: DVector<Complex64>) -> Self {
        debug_assert_eq!(coords.len(), factor.dim());
        Self { factor, coords }
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    pub fn coords(&self) -> &DVector<Complex64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<Complex64> {
        self.coords
    }

    /// JB*-norm; see [`Factor::ball_norm`].
    pub fn norm(&self) -> f64 {
        self.factor.ball_norm_coords(&self.coords)
    }

    /// Euclidean norm of the coordinates, i.e. the norm of the canonical
    /// Hermitian pairing.
    pub fn coord_norm(&self) -> f64 {
        self.coords.norm()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self::from_parts(self.factor.clone(), &self.coords * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        Self::from_parts(self.factor.clone(), &self.coords * Complex64::new(s, 0.0))
    }

    /// Largest coordinate-wise distance to another element of the same factor.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.factor, other.factor, "factor mismatch");
        self.coords
            .iter()
            .zip(other.coords.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

macro_rules! binop {
    ($tr:ident, $method:ident, $op:tt) => {
        impl $tr<&Element> for &Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                assert_eq!(self.factor, rhs.factor, "factor mismatch");
                Element::from_parts(self.factor.clone(), &self.coords $op &rhs.coords)
            }
        }
        impl $tr<Element> for Element {
            type Output = Element;
            fn $method(self, rhs: Element) -> Element {
                &self $op &rhs
            }
        }
        impl $tr<&Element> for Element {
            type Output = Element;
            fn $method(self, rhs: &Element) -> Element {
                &self $op rhs
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        Element::from_parts(self.factor.clone(), -&self.coords)
    }
}

impl Neg for Element {
    type Output = Element;
    fn neg(self) -> Element {
        -&self
    }
}

impl Mul<Complex64> for &Element {
    type Output = Element;
    fn mul(self, s: Complex64) -> Element {
        self.scale(s)
    }
}

impl Mul<f64> for &Element {
    type Output = Element;
    fn mul(self, s: f64) -> Element {
        self.scale_real(s)
    }
}

/// JSON form: `{"factor": <factor>, "coords": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ElementRepr {
    factor: Factor,
    coords: Vec<[f64; 2]>,
}

impl TryFrom<ElementRepr> for Element {
    type Error = Error;

    fn try_from(repr: ElementRepr) -> Result<Self> {
        if repr.coords.len() != repr.factor.dim() {
            return Err(Error::DimensionMismatch {
                expected: repr.factor.dim(),
                found: repr.coords.len(),
            });
        }
        if repr.coords.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coordinate".into()));
        }
        let coords = DVector::from_iterator(
            repr.coords.len(),
            repr.coords.iter().map(|[re, im]| Complex64::new(*re, *im)),
        );
        Ok(Element::from_parts(repr.factor, coords))
    }
}

impl From<Element> for ElementRepr {
    fn from(e: Element) -> Self {
        ElementRepr {
            coords: e.coords.iter().map(|c| [c.re, c.im]).collect(),
            factor: e.factor,
        }
    }
}
