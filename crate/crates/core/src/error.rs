use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {mode} out of range for {n} modes")]
    ModeOutOfRange { mode: usize, n: usize },
    #[error("mode count {0} outside supported range 1..=12")]
    ModeCount(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("state is not normalized (squared norm {0})")]
    NotNormalized(f64),
    #[error("state does not have definite number parity")]
    MixedParity,
    #[error("the zero vector cannot be normalized")]
    ZeroState,
    #[error("matrix is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("density matrix has trace {0}, expected 1")]
    Trace(f64),
    #[error("density matrix is not positive semidefinite (lowest eigenvalue {0:e})")]
    NotPositive(f64),
    #[error("density matrix does not commute with number parity (residual {0:e})")]
    ParityMixing(f64),
    #[error("density matrix has weight in both parity sectors; split it with parity_split first")]
    BothSectors,
    #[error("invalid Bogoliubov transformation: {0}")]
    InvalidMap(String),
    #[error(
        "U is singular (|det U| = {0:e}); apply a particle-hole transformation to the \
         modes occupied in the vacuum before building the Thouless form"
    )]
    SingularU(f64),
    #[error("operation requires n = 4 single-particle levels, got {0}")]
    NotFourLevels(usize),
    #[error("invalid entropy function: {0}")]
    EntropyFunction(String),
    #[error("invalid search budget: {0}")]
    Budget(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
