use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("wave number {k} out of range on axis {axis} (count {count})")]
    IndexOutOfRange { axis: usize, k: i64, count: usize },

    #[error("wave vector has {got} components, grid has {expected} axes")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("expected {expected} samples, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),

    #[error("non-real reconstruction: imaginary residue {residue:e} exceeds threshold")]
    NonRealReconstruction { residue: f64 },

    #[error("{what} = {value} is outside its domain")]
    Domain { what: &'static str, value: f64 },

    #[error("quadrature failure on [{lower}, {upper}]: error estimate {estimate:e} after refinement cap")]
    QuadratureFailure { lower: f64, upper: f64, estimate: f64 },

    #[error("invalid diffusivity profile: {0}")]
    InvalidProfile(String),

    #[error("amplification overflow: exponent {exponent} exceeds the cap")]
    AmplificationOverflow { exponent: f64 },

    #[error("noise exceeds prior bound: delta {delta} >= M {bound}")]
    NoiseExceedsPrior { delta: f64, bound: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("perturbation frequency {m} exceeds grid Nyquist frequency {nyquist} (aliasing)")]
    Aliasing { m: f64, nyquist: f64 },

    #[error("relative error undefined: exact field is zero")]
    ZeroReference,
}
