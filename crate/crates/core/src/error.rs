use core::fmt;

/// Error type shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Coupling parameters outside their domain (J must be positive, alpha
    /// non-negative, both finite).
    InvalidCouplings { j: f64, alpha: f64 },
    /// Adaptive quadrature could not reach the requested absolute tolerance;
    /// carries the achieved error estimate.
    QuadratureNoConverge { estimate: f64, requested: f64 },
    /// An iterative or sweep-based eigensolver exhausted its iteration budget.
    EigenNoConverge { detail: &'static str },
    /// Eigenvalue of a correlation matrix fell outside [0, 1] by more than
    /// rounding slop.
    SpectrumOutOfRange { value: f64 },
    /// Operation defined only for specific block sizes.
    UnsupportedBlockSize { n: usize },
    /// Two-site state violates positivity or unit trace.
    InvalidTwoSiteState { detail: &'static str },
    /// Chain length outside the supported range.
    UnsupportedChainLength { sites: usize },
    /// Lanczos failed to reach the residual target; carries the best residual.
    SolverStagnation { residual: f64 },
    /// State vector is not normalized.
    UnnormalizedVector { norm: f64 },
    /// Bipartition mask empty, full, or inconsistent with the chain length.
    InvalidBipartition,
    /// All-bipartitions enumeration requested for a chain too long to afford it.
    TooManyBipartitions { sites: usize },
    /// A parameter grid was not sorted strictly increasing.
    UnsortedGrid,
    /// Too few data points for the requested operation.
    InsufficientPoints { needed: usize, got: usize },
    /// Power-law fit input with alpha_N not above the assumed critical point.
    NonPositiveShift { alpha_n: f64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidCouplings { j, alpha } => {
                write!(f, "invalid couplings: J = {j}, alpha = {alpha} (need J > 0, alpha >= 0)")
            }
            Error::QuadratureNoConverge { estimate, requested } => write!(
                f,
                "quadrature did not converge: achieved error estimate {estimate:e}, requested {requested:e}"
            ),
            Error::EigenNoConverge { detail } => {
                write!(f, "eigensolver did not converge: {detail}")
            }
            Error::SpectrumOutOfRange { value } => {
                write!(f, "correlation-matrix eigenvalue {value} outside [0, 1]")
            }
            Error::UnsupportedBlockSize { n } => write!(f, "unsupported block size n = {n}"),
            Error::InvalidTwoSiteState { detail } => {
                write!(f, "invalid two-site state: {detail}")
            }
            Error::UnsupportedChainLength { sites } => {
                write!(f, "chain length N = {sites} outside supported range")
            }
            Error::SolverStagnation { residual } => {
                write!(f, "iterative eigensolver stagnated at residual {residual:e}")
            }
            Error::UnnormalizedVector { norm } => {
                write!(f, "state vector not normalized: |psi| = {norm}")
            }
            Error::InvalidBipartition => write!(f, "bipartition must be a proper nonempty subset"),
            Error::TooManyBipartitions { sites } => {
                write!(f, "all-bipartitions mode unsupported for N = {sites}")
            }
            Error::UnsortedGrid => write!(f, "parameter grid must be strictly increasing"),
            Error::InsufficientPoints { needed, got } => {
                write!(f, "need at least {needed} points, got {got}")
            }
            Error::NonPositiveShift { alpha_n } => {
                write!(f, "fit point alpha_N = {alpha_n} does not exceed alpha_c")
            }
        }
    }
}

impl core::error::Error for Error {}
