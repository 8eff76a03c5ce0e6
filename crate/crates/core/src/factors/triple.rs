use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{ConjugateLinearMap, Element, Factor, FactorKind, LinearMap};
use crate::error::Result;
use crate::linalg;

impl Factor {
    /// `{x,y,z}`: complex-linear in `x` and `z`, conjugate-linear in `y`.
    pub fn triple_product(&self, x: &Element, y: &Element, z: &Element) -> Result<Element> {
        self.ensure(x)?;
        self.ensure(y)?;
        self.ensure(z)?;
        Ok(self.triple(x, y, z))
    }

    /// Unchecked triple product on elements known to belong to `self`.
    pub(crate) fn triple(&self, x: &Element, y: &Element, z: &Element) -> Element {
        Element::from_parts(
            self.clone(),
            self.triple_coords(x.coords(), y.coords(), z.coords()),
        )
    }

    pub(crate) fn triple_coords(
        &self,
        x: &DVector<Complex64>,
        y: &DVector<Complex64>,
        z: &DVector<Complex64>,
    ) -> DVector<Complex64> {
        let mut out = DVector::zeros(self.dim());
        for (offset, block) in self.blocks() {
            let r = offset..offset + block.dim();
            simple_triple(
                block.kind(),
                &x.as_slice()[r.clone()],
                &y.as_slice()[r.clone()],
                &z.as_slice()[r.clone()],
                &mut out.as_mut_slice()[r],
            );
        }
        out
    }

    /// `D(x,y): z ↦ {x,y,z}`; column `j` is `{x, y, basis_j}`.
    pub fn d_operator(&self, x: &Element, y: &Element) -> Result<LinearMap> {
        self.ensure(x)?;
        self.ensure(y)?;
        Ok(self.d_map(x, y))
    }

    pub(crate) fn d_map(&self, x: &Element, y: &Element) -> LinearMap {
        let mut basis = DVector::zeros(self.dim());
        LinearMap::from_columns(self, |j| {
            basis.fill(Complex64::new(0.0, 0.0));
            basis[j] = Complex64::new(1.0, 0.0);
            self.triple_coords(x.coords(), y.coords(), &basis)
        })
    }

    /// `Q_x: z ↦ {x,z,x}` as a conjugate-linear map.
    pub fn q_operator(&self, x: &Element) -> Result<ConjugateLinearMap> {
        self.ensure(x)?;
        Ok(self.q_map(x))
    }

    pub(crate) fn q_map(&self, x: &Element) -> ConjugateLinearMap {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        let mut basis = DVector::zeros(n);
        for j in 0..n {
            basis.fill(Complex64::new(0.0, 0.0));
            basis[j] = Complex64::new(1.0, 0.0);
            m.set_column(j, &self.triple_coords(x.coords(), &basis, x.coords()));
        }
        ConjugateLinearMap::from_parts(self.clone(), m)
    }

    /// JB*-norm: largest singular value on matrix blocks, largest modulus on
    /// commutative blocks, maximum over the blocks of a sum.
    pub fn ball_norm(&self, x: &Element) -> Result<f64> {
        self.ensure(x)?;
        Ok(self.ball_norm_coords(x.coords()))
    }

    pub(crate) fn ball_norm_coords(&self, x: &DVector<Complex64>) -> f64 {
        self.blocks()
            .into_iter()
            .map(|(offset, block)| {
                simple_norm(block.kind(), &x.as_slice()[offset..offset + block.dim()])
            })
            .fold(0.0, f64::max)
    }

    /// Operator norm of `D(x,x)` with respect to the JB*-norm, returned as a
    /// `(lower, upper)` bracket from closed forms.
    ///
    /// On a matrix block `D(x,x)z = ½(xx*·z + z·x*x)` is bounded above by
    /// `½(‖xx*‖ + ‖x*x‖)` and attains `σ₁²` at the top frame element
    /// `u₁v₁*`; on commutative blocks it is the multiplier `|x_i|²`; on a sum
    /// the operator is block diagonal, so its norm is the largest block norm.
    pub fn dxx_operator_norm(&self, x: &Element) -> Result<(f64, f64)> {
        self.ensure(x)?;
        let mut lower: f64 = 0.0;
        let mut upper: f64 = 0.0;
        for (offset, block) in self.blocks() {
            let xs = &x.coords().as_slice()[offset..offset + block.dim()];
            match block.kind() {
                FactorKind::Matrix { p, q } => {
                    let m = DMatrix::from_row_slice(*p, *q, xs);
                    let left = spectral_norm(&(&m * m.adjoint()));
                    let right = spectral_norm(&(m.adjoint() * &m));
                    upper = upper.max(0.5 * (left + right));
                    let svd = linalg::svd(&m)?;
                    let top = svd.u.column(0) * svd.v.column(0).adjoint();
                    let image = (&m * m.adjoint() * &top + &top * m.adjoint() * &m)
                        * Complex64::new(0.5, 0.0);
                    lower = lower.max(spectral_norm(&image));
                }
                FactorKind::Commutative { .. } => {
                    let v = xs.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max);
                    lower = lower.max(v);
                    upper = upper.max(v);
                }
                FactorKind::DirectSum(_) => unreachable!("blocks are simple"),
            }
        }
        Ok((lower, upper))
    }
}

fn simple_triple(
    kind: &FactorKind,
    x: &[Complex64],
    y: &[Complex64],
    z: &[Complex64],
    out: &mut [Complex64],
) {
    match kind {
        FactorKind::Matrix { p, q } => {
            let xm = DMatrix::from_row_slice(*p, *q, x);
            let ym = DMatrix::from_row_slice(*p, *q, y).adjoint();
            let zm = DMatrix::from_row_slice(*p, *q, z);
            let r = (&xm * &ym * &zm + &zm * &ym * &xm) * Complex64::new(0.5, 0.0);
            for i in 0..*p {
                for j in 0..*q {
                    out[i * q + j] = r[(i, j)];
                }
            }
        }
        FactorKind::Commutative { .. } => {
            for (o, ((a, b), c)) in out.iter_mut().zip(x.iter().zip(y).zip(z)) {
                *o = a * b.conj() * c;
            }
        }
        FactorKind::DirectSum(_) => unreachable!("blocks are simple"),
    }
}

fn simple_norm(kind: &FactorKind, x: &[Complex64]) -> f64 {
    match kind {
        FactorKind::Matrix { p, q } => spectral_norm(&DMatrix::from_row_slice(*p, *q, x)),
        FactorKind::Commutative { .. } => x.iter().map(|c| c.norm()).fold(0.0, f64::max),
        FactorKind::DirectSum(_) => unreachable!("blocks are simple"),
    }
}

/// Largest singular value.
pub(crate) fn spectral_norm(m: &DMatrix<Complex64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0, f64::max)
}
