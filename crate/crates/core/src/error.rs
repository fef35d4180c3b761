//! Error type shared by every module of the crate.

use std::path::PathBuf;

use thiserror::Error;

use crate::types::{LanguageTag, TokenId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("token id {id} out of range (must be < {bound})")]
    TokenOutOfRange { id: u32, bound: u32 },

    #[error("token id {id} is not in the remap image for {language}")]
    InverseDomain { id: u32, language: LanguageTag },

    #[error("character {ch:?} at byte offset {offset} is not covered by the vocabulary")]
    Coverage { ch: char, offset: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("vocabulary mismatch: {0}")]
    VocabMismatch(String),

    #[error("no occurrences of token {token} for {language} in the dump")]
    MissingToken {
        token: TokenId,
        language: LanguageTag,
    },

    #[error("cosine similarity undefined: token {token} pooled to a zero-norm vector")]
    ZeroNorm { token: TokenId },

    #[error("embedding dimension mismatch at record {record}: expected {expected}, found {found}")]
    DumpDimension {
        record: usize,
        expected: usize,
        found: usize,
    },

    #[error("vector dimension mismatch: {left} vs {right}")]
    VectorDimension { left: usize, right: usize },

    #[error("{set} set needs {needed} tokens but only {available} are available")]
    SizeShortfall {
        set: &'static str,
        needed: usize,
        available: usize,
    },

    #[error("frequency-weighted overlap undefined: corpus for {language} is empty")]
    EmptyCorpus { language: LanguageTag },

    #[error("compression rate undefined for zero tokens")]
    ZeroTokens,

    #[error("effect size undefined: pooled standard deviation is zero")]
    UndefinedEffect,

    #[error("sample too small: need at least {needed} values, got {got}")]
    SampleTooSmall { needed: usize, got: usize },

    #[error("correctness vectors differ in length: {a} vs {b}")]
    LengthMismatch { a: usize, b: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
