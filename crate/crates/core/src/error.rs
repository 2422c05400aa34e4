use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("operation `{symbol}`: table has {got} entries, expected {expected}")]
    TableLength {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("operation `{symbol}`: entry {value} at position {position} is outside the universe 0..{size}")]
    EntryOutOfRange {
        symbol: String,
        position: usize,
        value: usize,
        size: usize,
    },
    #[error("duplicate operation symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("empty operation symbol name")]
    EmptySymbolName,
    #[error("unknown operation symbol index {0}")]
    UnknownSymbol(usize),
    #[error("symbol `{symbol}` expects {expected} arguments, got {got}")]
    ArityMismatch {
        symbol: String,
        expected: usize,
        got: usize,
    },
    #[error("variable x{0} is not bound by the assignment")]
    UnboundVariable(usize),
    #[error("tuple entry {value} is not below the base {base}")]
    TupleEntryOutOfRange { value: usize, base: usize },
    #[error("rank {rank} is not below {bound}")]
    RankOutOfRange { rank: u128, bound: u128 },
    #[error("rank space {base}^{width} does not fit the rank type")]
    RankOverflow { base: usize, width: usize },
    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("place {place} is outside 1..={width}")]
    PlaceOutOfRange { place: usize, width: usize },
    #[error("width must be positive")]
    ZeroWidth,
    #[error("F is not a subset of G")]
    NotSubset,
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("edge arity must be at least {min}, got {got}")]
    ArityTooSmall { min: usize, got: usize },
    #[error("word length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("alphabet size mismatch: {0} vs {1}")]
    AlphabetMismatch(usize, usize),
    #[error("letter {letter} is not below the alphabet size {alphabet}")]
    LetterOutOfRange { letter: usize, alphabet: usize },
    #[error("empty word")]
    EmptyWord,
    #[error("map is not a valid witness")]
    InvalidWitness,
    #[error("arity {arity} exceeds the configured bound {bound}")]
    ArityOverBound { arity: usize, bound: usize },
    #[error("budget exhausted after {0} steps")]
    BudgetExceeded(u64),
    #[error("enumeration limit {0} exceeded")]
    LimitExceeded(u64),
    #[error("cancelled")]
    Cancelled,
    #[error("membership precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
