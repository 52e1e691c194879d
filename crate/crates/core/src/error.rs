use thiserror::Error;

/// Errors raised by constructors and evaluators in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not unitary: |(U^H U - I)[{row}][{col}]| = {deviation:e} exceeds {tol:e}")]
    NotUnitary {
        row: usize,
        col: usize,
        deviation: f64,
        tol: f64,
    },
    #[error("qubit state is not normalised: |alpha|^2 + |beta|^2 = {norm_sq}")]
    NotNormalized { norm_sq: f64 },
    #[error("entry is not finite")]
    NonFinite,
    #[error("path index {k} out of range for n = {n} (must be < 2^{n})")]
    IndexOutOfRange { n: u32, k: u64 },
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("step m = {m} out of range for n = {n} (need 0 <= m < n)")]
    StepOutOfRange { m: u32, n: u32 },
    #[error("horizon n = {n} exceeds the enumeration cap {cap}; use xi_matrix or the evolution pipelines")]
    EnumerationCap { n: u32, cap: u32 },
    #[error("horizon n = {n} exceeds the dense decoherence cap {cap}; use the matrix-free quantum_integral")]
    DenseCap { n: u32, cap: u32 },
    #[error("{samples} Fourier samples alias a degree-{n} walk (need at least {min})")]
    Aliasing { samples: usize, n: u32, min: usize },
    #[error("l + m = {l} + {m} does not equal n = {n}")]
    LevelMismatch { n: u32, l: u32, m: u32 },
    #[error("function table covers |x| <= {covered}, walk needs |x| <= {needed}")]
    TableTooShort { covered: u32, needed: u32 },
    #[error("integrand must be real-valued, path {k} has imaginary part {imag:e}")]
    ComplexIntegrand { k: u64, imag: f64 },
    #[error("integrand is NaN on path {k}")]
    NanIntegrand { k: u64 },
    #[error("step weight p = {0} is outside [0, 1]")]
    BadWeight(f64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
