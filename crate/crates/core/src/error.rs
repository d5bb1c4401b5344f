use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("undefined degree: zero polynomial")]
    ZeroPolynomial,
    #[error("polynomial is not quasi-homogeneous of type ({t1},{t2})")]
    NotQuasiHomogeneous { t1: u32, t2: u32 },
    #[error("invalid type vector ({t1},{t2}): need 0 < t1 <= t2 and gcd(t1,t2) = 1")]
    InvalidType { t1: u32, t2: u32 },
    #[error("field is not quasi-homogeneous for type ({t1},{t2}) with a common degree")]
    FieldNotQuasiHomogeneous { t1: u32, t2: u32 },
    #[error("field is not quasi-homogeneous for any admissible type")]
    NoAdmissibleType,
    #[error("degenerate normalization: r + |t| = 0")]
    DegenerateNormalization,
    #[error("P and Q share the non-constant factor {0}")]
    NotCoprime(String),
    #[error("identically zero conservative part")]
    ZeroConservativePart,
    #[error("origin is not monodromic: {0}")]
    NotMonodromic(String),
    #[error("root refinement did not converge (best residual {residual:e})")]
    RootNonConvergence { residual: f64 },
    #[error("insufficient precision: {0}")]
    InsufficientPrecision(String),
    #[error("integrator failure: {0}")]
    Integrator(String),
    #[error("near-resonant denominator: |h| = {0:e} on the orbit")]
    NearResonant(f64),
    #[error("non-monodromic behavior detected: {0}")]
    Escape(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("arity mismatch: expected {expected} parameters, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("family has empty manifold: {0}")]
    EmptyManifold(String),
    #[error("unknown family {0}")]
    UnknownFamily(String),
    #[error("catalog error: {0}")]
    Catalog(String),
    #[error("i/o error: {0}")]
    Io(String),
}

/// Coarse error classes that map onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Numeric,
    Hypothesis,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use Error::*;
        match self {
            RootNonConvergence { .. }
            | InsufficientPrecision(_)
            | Integrator(_)
            | NearResonant(_)
            | Escape(_) => ErrorClass::Numeric,
            NotCoprime(_) | NotMonodromic(_) | ZeroConservativePart => ErrorClass::Hypothesis,
            _ => ErrorClass::Input,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.class() {
            ErrorClass::Input => 2,
            ErrorClass::Numeric => 3,
            ErrorClass::Hypothesis => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
