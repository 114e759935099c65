use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty corpus")]
    EmptyCorpus,

    #[error("empty treebank")]
    EmptyTreebank,

    #[error("malformed tree on line {line}: {msg}")]
    MalformedTree { line: usize, msg: String },

    #[error("{what}, line {line}: {msg}")]
    Format {
        what: &'static str,
        line: usize,
        msg: String,
    },

    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),

    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),

    #[error("not a channel-reachable pair: {intended:?} -> {observed:?}")]
    NotChannelReachable { intended: String, observed: String },

    #[error("zero channel probability: alpha = 1 admits no typing errors ({intended:?} -> {observed:?})")]
    ZeroChannelProbability { intended: String, observed: String },

    #[error("sequence length mismatch: {intended} intended vs {observed} observed tokens")]
    LengthMismatch { intended: usize, observed: usize },

    #[error("combinatorial blowup: {count} {what} exceed the cap of {cap} (window sizes {window_sizes:?})")]
    CombinatorialBlowup {
        what: &'static str,
        count: u128,
        cap: u64,
        window_sizes: Vec<u128>,
    },

    #[error("window-multi mode needs a grammar")]
    MissingGrammar,

    #[error("language model and lexicon disagree on the vocabulary")]
    VocabularyMismatch,

    #[error("misaligned evaluation inputs: {0}")]
    Misaligned(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}
