use thiserror::Error;

/// Errors raised anywhere in the simulation pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("unknown scenario label {0:?} (expected one of a, b, c, d, e)")]
    UnknownScenario(String),

    #[error("factorial ratio requires n >= m (got n = {n}, m = {m})")]
    InvalidRange { n: usize, m: usize },

    #[error("residual phase requires m >= k (got m = {m}, k = {k})")]
    BelowStarkThreshold { m: usize, k: usize },

    #[error("deformation table covers n <= {len} but n = {needed} is required")]
    TableTooShort { len: usize, needed: usize },

    #[error("cubic has complex roots (residual {residual:e})")]
    ComplexRoots { residual: f64 },

    #[error("quadratic has complex roots (discriminant {discriminant:e})")]
    ComplexQuadratic { discriminant: f64 },

    #[error("leading coefficient of quadratic is zero")]
    NotQuadratic,

    #[error("degenerate manifold spectrum at n = {n} (root gap {gap:e})")]
    DegenerateManifold { n: usize, gap: f64 },

    #[error("matrix is not Hermitian (deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("eigenvalue {value:e} is too negative for a density matrix")]
    NotPositive { value: f64 },

    #[error("density matrix breaks the exchange symmetry (deviation {deviation:e})")]
    SymmetryBroken { deviation: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("Jacobi iteration did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("truncation n_max = {n_max} is below the required minimum {min}")]
    TruncationTooSmall { n_max: usize, min: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
