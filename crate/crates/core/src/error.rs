use thiserror::Error;

/// Errors produced by the automaton, word and group machinery.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet mismatch: {left:?} vs {right:?}")]
    AlphabetMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("table of {needed} entries exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("not reversible within radius limit {radius_limit}")]
    NotReversibleWithinLimit {
        radius_limit: usize,
        /// Two distinct periodic words with the same image, when injectivity fails.
        witness: Option<(Vec<u32>, Vec<u32>)>,
    },

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("control word {control} admits occurrences {distance} apart, closer than window width {width}")]
    OverlappingWindows {
        control: String,
        distance: usize,
        width: u32,
    },

    #[error("unsupported factor: {0}")]
    UnsupportedFactor(String),

    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(u32, u32),

    #[error("domain mismatch: {0} vs {1}")]
    DomainMismatch(usize, usize),

    #[error("permutation is odd")]
    NotEven,

    #[error("permutation is not in the generated group")]
    NotInGeneratedGroup,

    #[error("family has {0} words, at least 5 required")]
    FamilyTooSmall(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("target not reachable at stage `{stage}`: {reason}")]
    NotReachable { stage: String, reason: String },

    #[error("no candidate found within budget of {0}")]
    NoneFoundWithinBudget(usize),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
