use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid factor: {0}")]
    InvalidFactor(String),

    #[error("factor mismatch: expected {expected}, found {found}")]
    FactorMismatch { expected: String, found: String },

    #[error("coordinate count {found} does not match factor dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("outside the domain: {0}")]
    Domain(String),

    #[error("operator is not hermitian (residual {residual:e})")]
    NotHermitian { residual: f64 },

    #[error("non-positive eigenvalue {value:e} where a positive spectrum is required")]
    NonPositiveEigenvalue { value: f64 },

    #[error("pair is not quasi-invertible: condition number {condition:e} exceeds {threshold:e}")]
    NotQuasiInvertible { condition: f64, threshold: f64 },

    #[error("series precondition violated: ‖x‖‖y‖ = {product} ≥ 1")]
    SeriesPrecondition { product: f64 },

    #[error("no convergence after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("odd power requested with even exponent {0}")]
    EvenPower(u32),

    #[error("odd functional calculus got a non-zero coefficient of even degree {degree}")]
    EvenCoefficient { degree: usize },

    #[error("element is not a tripotent (residual {residual:e})")]
    NotTripotent { residual: f64 },

    #[error("element is not a maximal tripotent (residual {residual:e})")]
    NotMaximal { residual: f64 },

    #[error("expected a unit-norm element, got norm {norm}")]
    NotUnitNorm { norm: f64 },

    #[error("odd-power iteration converges too slowly (spectral value {lambda}); use the spectral method")]
    SlowConvergence { lambda: f64 },

    #[error("factor {0} has no unitary tripotents")]
    EmptyGamma1(String),

    #[error("unregistered test function `{0}`")]
    UnregisteredTestFunction(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
