use thiserror::Error;

/// Errors shared across the library.
#[derive(Error, Debug)]
pub enum Error {
    /// A parameter violates its documented precondition.
    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// Matrix/vector/state dimensions do not line up.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// An enumeration or simulation would exceed the configured budget.
    #[error("resource budget exceeded: {0}")]
    Budget(String),

    /// A coset or support turned out empty.
    #[error("empty support: {0}")]
    EmptySupport(String),

    /// Trapdoor inversion found no decoding within the accepted radius.
    #[error("decoding failure: {0}")]
    DecodeFailure(String),

    /// The Goldreich-Levin extractor found no strict majority.
    #[error("extractor failure: {0}")]
    ExtractorFailure(String),

    /// An adversary violated the experiment interface contract.
    #[error("adversary contract violation: {0}")]
    AdversaryContract(String),

    /// Malformed serialized data.
    #[error("serialization error: {0}")]
    Serialization(String),

    /// Malformed circuit netlist or depth violation.
    #[error("circuit error: {0}")]
    Circuit(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
