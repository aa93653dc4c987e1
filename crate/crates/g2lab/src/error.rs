use thiserror::Error;

use crate::scalars::ScalarError;

#[derive(Debug, Error, Clone)]
pub enum Error {
    #[error(transparent)]
    Scalar(#[from] ScalarError),
    #[error("gram matrix is not symmetric")]
    NotSymmetric,
    #[error("quadratic form is degenerate")]
    Degenerate,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("objects live over different towers")]
    TowerMismatch,
    #[error("matrix is not a similitude of the form")]
    NotSimilitude,
    #[error("vector is isotropic")]
    IsotropicVector,
    #[error("Clifford elements belong to different algebras")]
    AlgebraMismatch,
    #[error("Clifford element is not invertible")]
    NotInvertible,
    #[error("Clifford element is not homogeneous")]
    NotHomogeneous,
    #[error("twisted conjugation does not preserve V")]
    DoesNotNormalizeV,
    #[error("gamma times its transpose is not a scalar")]
    NotScalar,
    #[error("matrix is not a proper isometry")]
    NotProperIsometry,
    #[error("element is not even or not in the Clifford group")]
    NotEvenOrNotCliffordGroup,
    #[error("matrix is not an automorphism of the octonions")]
    NotAutomorphism,
    #[error("group order exceeds cap {0}")]
    OrderCapExceeded(usize),
    #[error("representation is not a homomorphism")]
    NotAHomomorphism,
    #[error("group exponent {exponent} does not divide conductor {conductor}")]
    ExponentNotDividingConductor { exponent: u64, conductor: u64 },
    #[error("central element did not split: {0}")]
    SplitFailed(String),
    #[error("multiplicity is not a nonnegative integer: {0}")]
    NonIntegerMultiplicity(String),
    #[error("polynomial is not monic of degree 7")]
    NotMonicDegree7,
    #[error("eigenvalue route and fixed-spinor route disagree: {0}")]
    EquivalenceViolation(String),
    #[error("classification failed, no case matches: {0}")]
    TheoremViolation(String),
    #[error("constructed group failed verification: {0}")]
    ConstructionVerificationFailed(String),
    #[error("similitude factor is not +1 or -1")]
    SimilitudeFactorNotPlusMinusOne,
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("invalid input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
