use thiserror::Error;

use crate::rational::Rational;
use crate::verdict::{Time, Witness};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("probabilities sum to {total}, not 1")]
    ProbabilityNotNormalized { total: Rational },
    #[error("negative probability on atom {atom}")]
    NegativeProbability { atom: usize },
    #[error("atom {atom} has zero probability")]
    ZeroProbabilityBlock { atom: usize },
    #[error("partition at level {level} does not refine the previous level")]
    PartitionNotRefining { level: usize },
    #[error("partition at level {level} is not a partition of the atoms: {reason}")]
    InvalidPartition { level: usize, reason: String },
    #[error("shape mismatch for {what}: expected {expected}, found {found}")]
    ShapeMismatch {
        what: String,
        expected: usize,
        found: usize,
    },
    #[error("time {t} out of range for horizon {horizon}")]
    TimeOutOfRange { t: usize, horizon: usize },
    #[error("measure is not equivalent: density vanishes on atom {atom}")]
    NotEquivalent { atom: usize },
    #[error("invalid density: {reason}")]
    InvalidDensity { reason: String },
    #[error("{what} is not adapted at time {t}")]
    NotAdapted { what: String, t: Time },
    #[error("{what} is not predictable at time {t}")]
    NotPredictable { what: String, t: Time },
    #[error("conditional distribution field axiom violated: {0}")]
    FieldAxiomViolation(Box<Witness>),
    #[error("hypothesis (HP) fails: {0}")]
    HypothesisHPFails(Box<Witness>),
    #[error("field is not strictly positive: {0}")]
    FieldNotStrictlyPositive(Box<Witness>),
    #[error("degenerate denominator at time {t} on atom {atom}")]
    DegenerateDenominator { t: Time, atom: usize },
    #[error("extended density data rejected: {0}")]
    EDVerificationFails(Box<Witness>),
    #[error("auxiliary time does not realize F: {0}")]
    RealizationMismatch(Box<Witness>),
    #[error("field decreases in u at atom {atom}")]
    NegativeMassIncrement { atom: usize },
    #[error("positivity precondition fails: {0}")]
    PositivityFails(Box<Witness>),
    #[error("separability precondition fails: {0}")]
    SeparabilityPreconditionFails(String),
    #[error("not a martingale: {0}")]
    NotMartingale(Box<Witness>),
    #[error("random time is not honest: {0}")]
    NotHonest(String),
    #[error("U - B is not a martingale for the initial enlargement: {0}")]
    InitialDecompositionInvalid(Box<Witness>),
    #[error("density is not strictly positive: {0}")]
    DensityNotPositive(Box<Witness>),
    #[error("density normalization fails: {0}")]
    NormalizationFails(Box<Witness>),
    #[error("drift has no density against <U,U>: {0}")]
    DriftDensityMissing(Box<Witness>),
}

pub type Result<T> = std::result::Result<T, Error>;
