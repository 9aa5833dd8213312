use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside an operation's stated domain.
    #[error("domain: {0}")]
    Domain(String),

    /// A table or sieve would exceed the configured memory budget.
    #[error("resource: {0}")]
    Resource(String),

    /// A combinatorial enumeration exceeded its work budget.
    #[error("work budget exceeded in {stage}")]
    Budget { stage: &'static str },

    /// Exact integer arithmetic overflowed its representation.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    /// An eigenvalue table is shorter than an evaluation requires.
    #[error("eigenvalue table too short: need lambda(n) for n <= {needed}, have n <= {have}")]
    InsufficientData { needed: u64, have: u64 },

    /// Hecke eigenvalues too close to separate numerically.
    #[error("degenerate T2 spectrum at weight {weight} (relative gap {gap:.3e})")]
    DegenerateSpectrum { weight: u32, gap: f64 },

    /// The Petersson linear system is too ill-conditioned to trust.
    #[error("ill-conditioned Petersson system at weight {weight} (cond ~ {cond:.3e})")]
    IllConditioned { weight: u32, cond: f64 },

    /// Cache or artifact I/O failure.
    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
