//! Crate-wide error type.

/// Errors surfaced by the numerical routines.
#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("degenerate interval: a = {a}, b = {b}, n = {n} (need b > a and n >= 3)")]
    DegenerateInterval { a: f64, b: f64, n: usize },

    #[error("sample contains a non-finite entry")]
    NonFiniteSample,

    #[error("derivative of order {order} cannot be formed on this sample")]
    MissingDerivative { order: u8 },

    #[error("Hölder exponent alpha = {alpha} outside (0, 1)")]
    InvalidExponent { alpha: f64 },

    #[error("coefficient sample contains a non-finite entry")]
    NonFiniteCoefficient,

    #[error("samples live on different grids")]
    GridMismatch,

    #[error(
        "discrete operator is (near-)singular: pivot ratio {pivot_ratio:.3e}, \
         eigenvalue ratio {eigen_ratio:.3e}; the homogeneous problem has a nontrivial kernel"
    )]
    SingularSystem { pivot_ratio: f64, eigen_ratio: f64 },

    #[error("mu = {mu} makes mu*c15 = {mu_c15} >= 1; the absorption step fails")]
    MuTooLarge { mu: f64, mu_c15: f64 },

    #[error("no mu on the scan grid satisfies mu*c15(mu) < 1/2")]
    NoValidMu,

    #[error("maximum principle inapplicable: q attains {max_q:.3e} > 0")]
    MaxPrincipleInapplicable { max_q: f64 },

    #[error("sample does not solve the Poisson-type equation: residual {residual:.3e}")]
    NotAPoissonSolution { residual: f64 },

    #[error("ledger inputs do not match the problem's coefficient bounds")]
    LedgerMismatch,

    #[error("no catenoid spans the rings: h/r = {ratio:.6} exceeds the critical ratio")]
    NoSolution { ratio: f64 },

    #[error("profile is not strictly positive (min value {min_value:.3e})")]
    NonPositiveProfile { min_value: f64 },

    #[error("no positive solution of the linearized equation exists on this interval")]
    Unstable,

    #[error("stability certificate invalid (chi must be strictly positive)")]
    CertificateInvalid,

    #[error("boundary magnitude {magnitude:.3e} exceeds the admissible threshold {max_allowed:.3e}")]
    BoundaryDataTooLarge { magnitude: f64, max_allowed: f64 },

    #[error("fixed-point iteration not contracting: ratio {ratio:.3} at step {step}")]
    NotContracting { ratio: f64, step: usize },

    #[error("beta = 0: the fourth-order equation cannot be normalized")]
    BetaZero,

    #[error("maximum-principle condition violated: 1/min(f)^2 = {lhs:.4e} >= alpha/beta = {rhs:.4e}")]
    Condition414Violated { lhs: f64, rhs: f64 },

    #[error("epsilon = {epsilon:.3e} exceeds the admissible bound {max_allowed:.3e}")]
    EpsilonTooLarge { epsilon: f64, max_allowed: f64 },

    #[error(
        "Newton continuation failed at stage `{stage}`: \
         profile residual {residual_profile:.3e}, curvature residual {residual_curvature:.3e}"
    )]
    NoConvergence {
        residual_profile: f64,
        residual_curvature: f64,
        stage: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
