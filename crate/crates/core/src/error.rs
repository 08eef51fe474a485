use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("transition table is not total: state {state} has no successor on `{letter}`")]
    NotTotal { state: usize, letter: String },
    #[error("color {color} of state {state} outside declared range {low}..{high}")]
    ColorOutOfRange {
        state: usize,
        color: u32,
        low: u32,
        high: u32,
    },
    #[error("unknown acceptance `{0}`")]
    UnknownAcceptance(String),
    #[error("letter `{0}` is not in the alphabet")]
    UnknownLetter(String),
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("invalid automaton: {0}")]
    Invalid(String),
    #[error("empty block where a non-empty word is required: {0}")]
    EmptyBlock(String),
    #[error("determinization exceeded the state cap of {0}")]
    CapExceeded(usize),
    #[error("malformed family spec `{0}`")]
    BadFamily(String),
    #[error("wrong winner: {0}")]
    WrongWinner(String),
    #[error("certificate extraction is not supported for family `{0}`")]
    ShapeUnsupported(String),
    #[error("invalid certificate: {0}")]
    BadCertificate(String),
    #[error("enumeration bounds exceeded: {0}")]
    BoundsExceeded(String),
    #[error("solve deadline exceeded")]
    Cancelled,
    #[error("session error: {0}")]
    Session(String),
}

pub type Result<T> = std::result::Result<T, Error>;
