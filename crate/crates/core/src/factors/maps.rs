use std::ops::{Add, Mul, Sub};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{Element, Factor};
use crate::error::{Error, Result};

/// Complex-linear operator on a factor, stored as its matrix in the
/// canonical basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapRepr", into = "MapRepr")]
pub struct LinearMap {
    factor: Factor,
    matrix: DMatrix<Complex64>,
}

/// Conjugate-linear operator `z ↦ M·conj(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugateLinearMap {
    factor: Factor,
    matrix: DMatrix<Complex64>,
}

fn check_square(factor: &Factor, m: &DMatrix<Complex64>) -> Result<()> {
    if m.nrows() != factor.dim() || m.ncols() != factor.dim() {
        return Err(Error::DimensionMismatch {
            expected: factor.dim(),
            found: if m.nrows() != factor.dim() {
                m.nrows()
            } else {
                m.ncols()
            },
        });
    }
    Ok(())
}

impl LinearMap {
    pub fn new(factor: Factor, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_square(&factor, &matrix)?;
        Ok(Self { factor, matrix })
    }

    pub(crate) fn from_parts(factor: Factor, matrix: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(matrix.nrows(), factor.dim());
        Self { factor, matrix }
    }

    /// Map whose `j`-th column is `column(j)`.
    pub(crate) fn from_columns<F>(factor: &Factor, mut column: F) -> Self
    where
        F: FnMut(usize) -> DVector<Complex64>,
    {
        let n = factor.dim();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n {
            m.set_column(j, &column(j));
        }
        Self::from_parts(factor.clone(), m)
    }

    pub fn identity(factor: &Factor) -> Self {
        Self::from_parts(
            factor.clone(),
            DMatrix::identity(factor.dim(), factor.dim()),
        )
    }

    pub fn zero(factor: &Factor) -> Self {
        Self::from_parts(factor.clone(), DMatrix::zeros(factor.dim(), factor.dim()))
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.matrix
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.factor.ensure(x)?;
        Ok(self.apply_unchecked(x))
    }

    pub(crate) fn apply_unchecked(&self, x: &Element) -> Element {
        Element::from_parts(self.factor.clone(), &self.matrix * x.coords())
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &LinearMap) -> Result<LinearMap> {
        self.same_factor(other)?;
        Ok(Self::from_parts(
            self.factor.clone(),
            &self.matrix * &other.matrix,
        ))
    }

    /// Inverse by LU decomposition.
    pub fn inverse(&self) -> Result<LinearMap> {
        let inv = self
            .matrix
            .clone()
            .lu()
            .try_inverse()
            .ok_or_else(|| Error::Domain("operator is singular".into()))?;
        Ok(Self::from_parts(self.factor.clone(), inv))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.matrix.norm()
    }

    /// Frobenius distance to another map on the same factor.
    pub fn distance(&self, other: &LinearMap) -> f64 {
        assert_eq!(self.factor, other.factor, "factor mismatch");
        (&self.matrix - &other.matrix).norm()
    }

    pub fn scale(&self, s: Complex64) -> LinearMap {
        Self::from_parts(self.factor.clone(), &self.matrix * s)
    }

    fn same_factor(&self, other: &LinearMap) -> Result<()> {
        if self.factor != other.factor {
            return Err(Error::FactorMismatch {
                expected: self.factor.to_string(),
                found: other.factor.to_string(),
            });
        }
        Ok(())
    }
}

impl Mul<&LinearMap> for &LinearMap {
    type Output = LinearMap;
    fn mul(self, rhs: &LinearMap) -> LinearMap {
        assert_eq!(self.factor, rhs.factor, "factor mismatch");
        LinearMap::from_parts(self.factor.clone(), &self.matrix * &rhs.matrix)
    }
}

impl Add<&LinearMap> for &LinearMap {
    type Output = LinearMap;
    fn add(self, rhs: &LinearMap) -> LinearMap {
        assert_eq!(self.factor, rhs.factor, "factor mismatch");
        LinearMap::from_parts(self.factor.clone(), &self.matrix + &rhs.matrix)
    }
}

impl Sub<&LinearMap> for &LinearMap {
    type Output = LinearMap;
    fn sub(self, rhs: &LinearMap) -> LinearMap {
        assert_eq!(self.factor, rhs.factor, "factor mismatch");
        LinearMap::from_parts(self.factor.clone(), &self.matrix - &rhs.matrix)
    }
}

impl ConjugateLinearMap {
    pub fn new(factor: Factor, matrix: DMatrix<Complex64>) -> Result<Self> {
        check_square(&factor, &matrix)?;
        Ok(Self { factor, matrix })
    }

    pub(crate) fn from_parts(factor: Factor, matrix: DMatrix<Complex64>) -> Self {
        Self { factor, matrix }
    }

    pub fn factor(&self) -> &Factor {
        &self.factor
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn apply(&self, x: &Element) -> Result<Element> {
        self.factor.ensure(x)?;
        Ok(Element::from_parts(
            self.factor.clone(),
            &self.matrix * x.coords().conjugate(),
        ))
    }

    /// `self ∘ other`, which is complex-linear with matrix `M₁·conj(M₂)`.
    pub fn then_conjugate(&self, other: &ConjugateLinearMap) -> Result<LinearMap> {
        if self.factor != other.factor {
            return Err(Error::FactorMismatch {
                expected: self.factor.to_string(),
                found: other.factor.to_string(),
            });
        }
        Ok(LinearMap::from_parts(
            self.factor.clone(),
            &self.matrix * other.matrix.conjugate(),
        ))
    }
}

/// JSON form of a linear map: the factor and the matrix as rows of
/// `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapRepr {
    factor: Factor,
    matrix: Vec<Vec<[f64; 2]>>,
}

impl TryFrom<MapRepr> for LinearMap {
    type Error = Error;

    fn try_from(repr: MapRepr) -> Result<Self> {
        let n = repr.factor.dim();
        if repr.matrix.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: repr.matrix.len(),
            });
        }
        if let Some(row) = repr.matrix.iter().find(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        if repr
            .matrix
            .iter()
            .flatten()
            .flatten()
            .any(|v| !v.is_finite())
        {
            return Err(Error::InvalidArgument("non-finite matrix entry".into()));
        }
        let m = DMatrix::from_fn(n, n, |i, j| {
            let [re, im] = repr.matrix[i][j];
            Complex64::new(re, im)
        });
        Ok(LinearMap::from_parts(repr.factor, m))
    }
}

impl From<LinearMap> for MapRepr {
    fn from(map: LinearMap) -> Self {
        let n = map.matrix.nrows();
        MapRepr {
            matrix: (0..n)
                .map(|i| {
                    (0..n)
                        .map(|j| [map.matrix[(i, j)].re, map.matrix[(i, j)].im])
                        .collect()
                })
                .collect(),
            factor: map.factor,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn conjugate_composition_rule() {
        let f = Factor::commutative(2).unwrap();
        let m1 = DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 1.0), c(0.0, 2.0), c(-1.0, 0.0), c(0.5, -0.5)],
        );
        let m2 =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 1.0), c(1.0, 0.0), c(2.0, -1.0), c(0.0, 0.0)]);
        let a = ConjugateLinearMap::new(f.clone(), m1).unwrap();
        let b = ConjugateLinearMap::new(f.clone(), m2).unwrap();
        let ab = a.then_conjugate(&b).unwrap();
        let z = Element::from_slice(&f, &[c(0.3, -0.7), c(1.1, 0.2)]).unwrap();
        let direct = a.apply(&b.apply(&z).unwrap()).unwrap();
        let composed = ab.apply(&z).unwrap();
        assert!(direct.max_abs_diff(&composed) < 1e-14);
    }

    #[test]
    fn non_square_matrix_rejected() {
        let f = Factor::commutative(2).unwrap();
        assert!(LinearMap::new(f, DMatrix::zeros(2, 3)).is_err());
    }

    #[test]
    fn inverse_of_singular_map_fails() {
        let f = Factor::commutative(2).unwrap();
        assert!(LinearMap::zero(&f).inverse().is_err());
        let id = LinearMap::identity(&f);
        assert_eq!(id.inverse().unwrap(), id);
    }
}
