//! Default numerical tolerances.
//!
//! | name                     | value   | used for                                          |
//! |--------------------------|---------|---------------------------------------------------|
//! | `ALGEBRA`                | 1e-9    | tripotent / maximality / unitarity classification |
//! | `CONDITION_LIMIT`        | 1e12    | invertibility of Bergmann operators               |
//! | `EIGEN_FLOOR`            | 1e-12   | positivity of `B(a,a)` before taking roots        |
//! | `HERMITIAN`              | 1e-10   | hermiticity of operators passed to eigensolvers   |
//! | `SPECTRAL_DROP`          | 1e-12   | relative cut-off for vanishing singular values    |
//! | `RANK_SEPARATION`        | 1e-9    | distinct spectral values in element rank          |
//! | `UNIT_NORM`              | 1e-10   | "on the unit sphere" precondition                 |
//! | `BOUNDARY_SPECTRAL`      | 1e-8    | spectral values counted as 1 on the boundary      |
//! | `ODD_POWER_STEP`         | 1e-10   | stopping rule for repeated cubing                 |
//! | `ODD_POWER_CAP`          | 200     | iteration cap for repeated cubing                 |
//! | `MEMBERSHIP`             | 1e-9    | boundary-component membership certificate         |
//! | `SERIES_CAP`             | 10^6    | Neumann-series term cap                           |

pub const ALGEBRA: f64 = 1e-9;
pub const CONDITION_LIMIT: f64 = 1e12;
pub const EIGEN_FLOOR: f64 = 1e-12;
pub const HERMITIAN: f64 = 1e-10;
pub const SPECTRAL_DROP: f64 = 1e-12;
pub const RANK_SEPARATION: f64 = 1e-9;
pub const UNIT_NORM: f64 = 1e-10;
pub const BOUNDARY_SPECTRAL: f64 = 1e-8;
pub const ODD_POWER_STEP: f64 = 1e-10;
pub const ODD_POWER_CAP: usize = 200;
pub const MEMBERSHIP: f64 = 1e-9;
pub const SERIES_CAP: usize = 1_000_000;
