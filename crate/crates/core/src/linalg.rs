//! Small dense complex helpers on top of `nalgebra`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Eigendecomposition of a Hermitian matrix. The input is checked for
/// hermiticity (relative Frobenius residual `tol`) and then symmetrised.
pub fn hermitian_eigen(
    m: &DMatrix<Complex64>,
    tol: f64,
) -> Result<(DVector<f64>, DMatrix<Complex64>)> {
    let adj = m.adjoint();
    let residual = (m - &adj).norm();
    if residual > tol * (1.0 + m.norm()) {
        return Err(Error::NotHermitian { residual });
    }
    let sym = (m + adj) * Complex64::new(0.5, 0.0);
    let eig = sym.symmetric_eigen();
    Ok((eig.eigenvalues, eig.eigenvectors))
}

/// `V·diag(φ(λ))·V*` for a Hermitian eigendecomposition.
pub fn spectral_function<F>(
    values: &DVector<f64>,
    vectors: &DMatrix<Complex64>,
    phi: F,
) -> DMatrix<Complex64>
where
    F: Fn(f64) -> f64,
{
    let mut scaled = vectors.clone();
    for (j, &v) in values.iter().enumerate() {
        let s = Complex64::new(phi(v), 0.0);
        for x in scaled.column_mut(j).iter_mut() {
            *x *= s;
        }
    }
    scaled * vectors.adjoint()
}

/// Thin singular value decomposition `m = Σ_k σ_k u_k v_k*` with `σ`
/// descending; `u` and `v` hold the `min(p, q)` singular vectors as columns.
pub struct Svd {
    pub u: DMatrix<Complex64>,
    pub singular_values: Vec<f64>,
    pub v: DMatrix<Complex64>,
}

/// Computed with faer. nalgebra's complex SVD returns singular vectors with
/// O(0.1) reconstruction error when singular values repeat, which is the
/// normal case for tripotents and boundary points.
pub fn svd(m: &DMatrix<Complex64>) -> Result<Svd> {
    let (p, q) = m.shape();
    let fm = faer::Mat::<Complex64>::from_fn(p, q, |i, j| m[(i, j)]);
    let d = fm
        .thin_svd()
        .map_err(|e| Error::Consistency(format!("SVD failed: {e:?}")))?;
    let (u, s, v) = (d.U(), d.S().column_vector(), d.V());
    let k = p.min(q);
    Ok(Svd {
        u: DMatrix::from_fn(p, k, |i, j| u[(i, j)]),
        singular_values: (0..k).map(|j| s[j].re).collect(),
        v: DMatrix::from_fn(q, k, |i, j| v[(i, j)]),
    })
}

/// Ratio of extreme singular values; `inf` for singular matrices.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 1.0;
    }
    let sv = m.singular_values();
    let max = sv.iter().copied().fold(0.0, f64::max);
    let min = sv.iter().copied().fold(f64::INFINITY, f64::min);
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Principal square root of a positive semidefinite Hermitian matrix.
pub fn psd_sqrt(m: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (values, vectors) = hermitian_eigen(m, crate::tol::HERMITIAN)?;
    let scale = values.iter().map(|v| v.abs()).fold(1.0, f64::max);
    if let Some(&bad) = values.iter().find(|&&v| v < -1e-12 * scale) {
        return Err(Error::NonPositiveEigenvalue { value: bad });
    }
    Ok(spectral_function(&values, &vectors, |v| v.max(0.0).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn psd_sqrt_squares_back() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(2.0, 0.0),
                Complex64::new(0.5, 0.5),
                Complex64::new(0.5, -0.5),
                Complex64::new(1.0, 0.0),
            ],
        );
        let r = psd_sqrt(&a).unwrap();
        assert!((&r * &r - &a).norm() < 1e-13);
        assert!((&r - r.adjoint()).norm() < 1e-14);
    }

    #[test]
    fn non_hermitian_rejected() {
        let a = DMatrix::from_row_slice(
            2,
            2,
            &[
                Complex64::new(1.0, 0.0),
                Complex64::new(1.0, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(1.0, 0.0),
            ],
        );
        assert!(matches!(
            hermitian_eigen(&a, 1e-10),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn condition_of_singular_matrix_is_infinite() {
        let z = DMatrix::<Complex64>::zeros(3, 3);
        assert!(condition_number(&z).is_infinite());
        assert_eq!(condition_number(&DMatrix::identity(3, 3)), 1.0);
    }
}
