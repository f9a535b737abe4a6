use std::fmt;

use num_rational::BigRational;
use thiserror::Error;

/// Which row of a table a validation problem was found in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableSide {
    /// The domain row (`v` words).
    Domain,
    /// The range row (`u` words).
    Range,
}

impl fmt::Display for TableSide {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TableSide::Domain => f.write_str("v"),
            TableSide::Range => f.write_str("u"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("alphabet sizes must be at least 2 and at most 256, got {0}")]
    InvalidAlphabet(u32),

    #[error("a signature needs at least one coordinate")]
    EmptySignature,

    #[error("signature mismatch: expected {expected}, found {found}")]
    SignatureMismatch { expected: String, found: String },

    #[error("letter {letter} out of range for alphabet size {size}")]
    LetterOutOfRange { letter: u32, size: u32 },

    #[error("period of an eventually periodic point must be non-empty")]
    EmptyPeriod,

    #[error("point does not start with the word tuple {0}")]
    NotAPrefix(String),

    #[error("cells {first} and {second} of the {side} row overlap")]
    OverlappingCells {
        first: usize,
        second: usize,
        side: TableSide,
    },

    #[error("the {side} row misses measure {deficit}")]
    MeasureDeficit { side: TableSide, deficit: BigRational },

    #[error("a table needs at least one row")]
    EmptyTable,

    #[error("generator set is empty")]
    EmptyGenerators,

    #[error("no witness found around the point within depth {0}")]
    NoWitness(usize),

    #[error("nesting violated at chain index {0}")]
    NestingViolation(usize),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(String),

    #[error("invalid bound: {0}")]
    InvalidBound(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag used in JSON reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidAlphabet(_) => "InvalidAlphabet",
            Error::EmptySignature => "EmptySignature",
            Error::SignatureMismatch { .. } => "SignatureMismatch",
            Error::LetterOutOfRange { .. } => "LetterOutOfRange",
            Error::EmptyPeriod => "EmptyPeriod",
            Error::NotAPrefix(_) => "NotAPrefix",
            Error::OverlappingCells { .. } => "OverlappingCells",
            Error::MeasureDeficit { .. } => "MeasureDeficit",
            Error::EmptyTable => "EmptyTable",
            Error::EmptyGenerators => "EmptyGenerators",
            Error::NoWitness(_) => "NoWitness",
            Error::NestingViolation(_) => "NestingViolation",
            Error::InvalidEmbedding(_) => "InvalidEmbedding",
            Error::InvalidBound(_) => "InvalidBound",
            Error::Parse(_) => "Parse",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
