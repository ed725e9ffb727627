//! Error type shared by every module in the crate.

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    /// A covariate column has zero variance and cannot be standardized.
    #[error("column {0} has zero variance")]
    ConstantColumn(usize),

    /// A NaN or infinity showed up where finite data was required.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// The per-model Gram matrix is numerically singular.
    #[error("gram matrix numerically singular (condition estimate {cond:.3e})")]
    SingularGram { cond: f64 },

    /// A parameter is outside its admissible range.
    #[error("invalid parameter: {0}")]
    Domain(String),

    /// The mode search for a Laplace approximation failed to converge.
    #[error("mode search did not converge within {0} iterations")]
    NonConvergence(usize),

    /// The negative Hessian at the mode is not positive definite.
    #[error("negative hessian at mode is not positive definite")]
    SingularHessian,

    /// Quadrature is only supported for models with at most two coefficients.
    #[error("quadrature supports |k| <= 2, got {0}")]
    DimensionTooLarge(usize),

    /// Every candidate in a sampling step carries probability zero.
    #[error("all candidate scores are -inf")]
    AllNegInfinity,

    /// A posterior summary was requested from a ledger with no finite score.
    #[error("ledger holds no finite score")]
    EmptyLedger,

    /// A search or scorer configuration is self-inconsistent.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
