//! Noisy-channel typing model.
//!
//! A writer who means `intended` types it correctly with probability `alpha`;
//! the remaining `1 - alpha` is spread evenly over the spelling variations of
//! `intended`. All functions return `ln P(observed | intended)`.

use crate::error::{Error, Result};
use crate::lexicon::{CandidateSet, Lexicon};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    alpha: f64,
    ln_alpha: f64,
    ln_error_mass: f64,
}

impl ChannelParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidAlpha(alpha));
        }
        Ok(Self {
            alpha,
            ln_alpha: alpha.ln(),
            ln_error_mass: (1.0 - alpha).ln(),
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `ln P(w | w)` for a word with `variations` spelling variations. A word
    /// without variations cannot be mistyped, so it keeps the whole mass.
    #[inline]
    pub fn ln_correct(&self, variations: usize) -> f64 {
        if variations == 0 {
            0.0
        } else {
            self.ln_alpha
        }
    }

    /// `ln((1 - alpha) / variations)`: typing one particular variation.
    /// Negative infinity when `alpha = 1`.
    #[inline]
    pub fn ln_error(&self, variations: usize) -> f64 {
        debug_assert!(variations > 0);
        self.ln_error_mass - (variations as f64).ln()
    }
}

/// `ln P(observed | intended)` where `candidates` is the variation set of
/// `intended`.
pub fn channel_log_prob(
    params: &ChannelParams,
    intended: &str,
    observed: &str,
    candidates: &CandidateSet,
) -> Result<f64> {
    debug_assert_eq!(candidates.source, intended);
    if observed == intended {
        return Ok(params.ln_correct(candidates.len()));
    }
    if !candidates.contains(observed) {
        return Err(Error::NotChannelReachable {
            intended: intended.to_owned(),
            observed: observed.to_owned(),
        });
    }
    if params.alpha == 1.0 {
        return Err(Error::ZeroChannelProbability {
            intended: intended.to_owned(),
            observed: observed.to_owned(),
        });
    }
    Ok(params.ln_error(candidates.len()))
}

/// Sum of per-word channel log-probabilities over aligned positions.
pub fn sequence_channel_log_prob<S: AsRef<str>, T: AsRef<str>>(
    params: &ChannelParams,
    intended: &[S],
    observed: &[T],
    lexicon: &Lexicon,
) -> Result<f64> {
    if intended.len() != observed.len() {
        return Err(Error::LengthMismatch {
            intended: intended.len(),
            observed: observed.len(),
        });
    }
    let mut total = 0.0;
    for (i, o) in intended.iter().zip(observed) {
        let (i, o) = (i.as_ref(), o.as_ref());
        let set = lexicon.spelling_variations(i);
        total += channel_log_prob(params, i, o, &set)?;
    }
    Ok(total)
}
