use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("duplicate label `{0}`")]
    DuplicateLabel(String),
    #[error("label `{label}` at byte {pos} is not allowed in an unlabelled flavour")]
    UnexpectedLabel { pos: usize, label: String },
    #[error("node at byte {pos} needs a label in the labelled flavour")]
    MissingLabel { pos: usize },
    #[error("{0} vertices or edges given; at most 64 are supported")]
    TooLarge(usize),
    #[error("vertex set is not connected in the tree")]
    NotConnected,
    #[error("vertex set is not contained in the forest")]
    NotASubset,
    #[error("the forest has no labels, so it cannot be used labelled")]
    Unlabelled,
    #[error("simplicial set is not reduced: level 0 has {0} elements")]
    NotReduced(usize),
    #[error("variant mismatch: {0}")]
    VariantMismatch(String),
    #[error("morphisms are not composable")]
    NotComposable,
    #[error("{count} fillers found in level {level}; expected exactly one")]
    NotUnique { level: usize, count: usize },
    #[error("colour mismatch at input {0}")]
    ColourMismatch(usize),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("truncation {have} is too small; need {need}")]
    Truncation { have: usize, need: usize },
    #[error("invalid simplicial data: {0}")]
    Invalid(String),
    #[error("unknown element code `{0}` in level {1}")]
    UnknownCode(String, usize),
}
