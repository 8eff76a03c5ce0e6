//! Computation kit for finite-rank JB*-triples.
//!
//! The crate models three concrete families of triples (rectangular matrix
//! factors, commutative `C^n` with the max norm, and finite direct sums of
//! these) and builds on top of the triple product:
//!
//! * [`factors`]: factor descriptors, elements, the triple product and the
//!   multiplication operators `D(x,y)` and `Q_x`;
//! * [`operators`]: Bergmann operators, their square roots, quasi-inverses and
//!   the catalogue of Jordan-pair identities;
//! * [`moebius`]: transvections `g_a`, ball automorphisms `T∘g_a`, the
//!   isometric cocycle `k(a,b)` and derivatives;
//! * [`spectral`]: odd powers, spectral frames, tripotent classification,
//!   Peirce projections and the tripotent order;
//! * [`boundary`]: boundary components, samplers for maximal and unitary
//!   tripotents, circle-quadrature reconstructions, determining-set suprema
//!   and the peak function at a maximal tripotent.
//!
//! ```
//! use jbtriple::moebius::transvection_apply;
//! use jbtriple::{Element, Factor};
//!
//! let f: Factor = "commutative:2".parse()?;
//! let a = Element::from_reals(&f, &[0.5, 0.0])?;
//! let x = Element::zero(&f);
//! assert_eq!(transvection_apply(&f, &a, &x)?, a); // g_a(0) = a
//! # Ok::<(), jbtriple::Error>(())
//! ```

pub mod boundary;
pub mod error;
pub mod factors;
pub mod linalg;
pub mod moebius;
pub mod operators;
pub mod sampling;
pub mod spectral;
pub mod tol;

pub use error::{Error, Result};
pub use factors::{ConjugateLinearMap, Element, Factor, FactorKind, LinearMap};
pub use num_complex::Complex64;
