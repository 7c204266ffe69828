use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix must be square with n >= 1")]
    NotSquare,
    #[error("vector must be nonzero")]
    ZeroVector,
    #[error("polynomial must be nonzero")]
    ZeroPolynomial,
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not nilpotent")]
    NotNilpotent,
    #[error("matrix is not semisimple")]
    NotSemisimple,
    #[error("matrix is not regular nilpotent")]
    NotRegularNilpotent,
    #[error("p indices differ ({0} vs {1}); no element of P conjugates them")]
    PIndexMismatch(usize, usize),
    #[error("p index is 0 (dense P-orbit); no semisimple witness exists")]
    DenseOrbit,
    #[error("witness parameters must differ (a = b gives a scalar)")]
    ScalarWitness,
    #[error("element does not commute with the semisimple element")]
    NotInCentralizer,
    #[error("matrix is not block diagonal for the given blocks")]
    BlockStructure,
    #[error("basis is linearly dependent")]
    DependentBasis,
    #[error("span is not closed under the bracket")]
    NotClosed,
    #[error("operators live on different variable sets")]
    VariableMismatch,
    #[error("operator degree {0} exceeds the cap of {cap}", cap = crate::weyl::DEGREE_CAP)]
    DegreeCap(u32),
    #[error("operator is zero")]
    ZeroOperator,
    #[error("symbolic dimension {0} is too large")]
    SymbolicTooLarge(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal check failed: {0}")]
    Check(String),
}
