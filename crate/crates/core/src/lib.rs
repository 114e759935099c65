//! Real-word spelling correction.
//!
//! A word that is spelled correctly but is not the word the writer meant
//! ("support aim for them Contras") can only be found from context. This crate
//! scores candidate corrections with a noisy-channel model on top of a smoothed
//! trigram language model, and offers three search strategies:
//!
//! * [`Mode::Mdm`]: whole-sentence search with at most one substitution.
//! * [`Mode::WindowSingle`]: fixed windows of `d + 4` tokens, one substitution
//!   per window, composed left to right.
//! * [`Mode::WindowMulti`]: fixed windows where every combination of spelling
//!   variations is considered, pruned by a probabilistic context-free grammar
//!   and recombined across the sentence.
//!
//! The [`eval`] module reproduces the synthetic error-injection protocol used to
//! measure detection and correction precision, recall and F1.

pub mod channel;
pub mod error;
pub mod eval;
pub mod lexicon;
pub mod lm;
pub mod par;
pub mod pcfg;
pub mod search;
pub mod text;

pub use channel::ChannelParams;
pub use error::{Error, Result};
pub use lexicon::{CandidateSet, Lexicon, Vocabulary, WordId};
pub use lm::TrigramModel;
pub use pcfg::{Grammar, ParseResult};
pub use search::{CorrectionResult, Corrector, Edit, Mode, SearchConfig};
