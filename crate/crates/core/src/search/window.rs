//! Fixed windows and their candidate search spaces.

use crate::lexicon::{Lexicon, WordId};
use crate::text::{BOS, EOS};

/// Number of context tokens kept on each side of a window's span.
pub const CONTEXT: usize = 2;

/// A stretch of the padded sentence `<s> <s> w1 .. wn </s>`: the `d`
/// replaceable tokens of the span plus up to two tokens of context on each
/// side. All indices refer to the padded sentence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Window {
    pub index: usize,
    /// Padded index of the first covered token.
    pub start: usize,
    pub tokens: Vec<String>,
    pub span_start: usize,
    pub span_length: usize,
    /// The two tokens before the span, which open the window.
    pub left_context: [String; 2],
}

impl Window {
    pub fn end(&self) -> usize {
        self.start + self.tokens.len()
    }

    pub fn span_end(&self) -> usize {
        self.span_start + self.span_length
    }

    /// Window-relative offset of the first span token.
    pub fn span_offset(&self) -> usize {
        self.span_start - self.start
    }

    /// Covered tokens without sentinels.
    pub fn real_tokens(&self) -> impl Iterator<Item = &str> {
        self.tokens
            .iter()
            .map(String::as_str)
            .filter(|t| *t != BOS && *t != EOS)
    }
}

/// `<s> <s> tokens </s>`.
pub fn pad<S: AsRef<str>>(tokens: &[S]) -> Vec<String> {
    let mut out = Vec::with_capacity(tokens.len() + 3);
    out.push(BOS.to_owned());
    out.push(BOS.to_owned());
    out.extend(tokens.iter().map(|t| t.as_ref().to_owned()));
    out.push(EOS.to_owned());
    out
}

/// Padded-index layout of the windows of a sentence with `n` real tokens.
/// Returns `(start, span_start, span_length, end)` per window.
pub(crate) fn window_layout(n: usize, d: usize) -> Vec<(usize, usize, usize, usize)> {
    assert!(d >= 1, "span width must be positive");
    let padded = n + CONTEXT + 1;
    let mut out = Vec::new();
    let mut span_start = CONTEXT;
    while span_start < CONTEXT + n {
        let span_length = d.min(CONTEXT + n - span_start);
        let end = (span_start + span_length + CONTEXT).min(padded);
        out.push((span_start - CONTEXT, span_start, span_length, end));
        span_start += d;
    }
    out
}

/// Splits a padded sentence into windows whose spans tile the real tokens
/// with stride `d`. The last window is cut at the end-of-sentence marker.
pub fn enumerate_windows<S: AsRef<str>>(padded: &[S], d: usize) -> Vec<Window> {
    assert!(padded.len() > CONTEXT, "sentence is not padded");
    let n = padded.len() - CONTEXT - 1;
    window_layout(n, d)
        .into_iter()
        .enumerate()
        .map(|(index, (start, span_start, span_length, end))| Window {
            index,
            start,
            tokens: padded[start..end]
                .iter()
                .map(|t| t.as_ref().to_owned())
                .collect(),
            span_start,
            span_length,
            left_context: [
                padded[span_start - 2].as_ref().to_owned(),
                padded[span_start - 1].as_ref().to_owned(),
            ],
        })
        .collect()
}

/// One element of a window's search space.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSequence {
    pub window: usize,
    /// Same length as the window's tokens.
    pub tokens: Vec<String>,
    /// Window-relative indices where `tokens` differs from the window.
    pub changed_positions: Vec<usize>,
    pub lm_channel_log_prob: Option<f64>,
    pub parse_log_prob: Option<f64>,
}

/// Per-position choices for a span: index 0 is the original token, the rest
/// are its spelling variations in spelling order. Tokens outside the
/// vocabulary have no alternatives.
pub(crate) fn span_choices<S: AsRef<str>>(
    span: &[S],
    lexicon: &Lexicon,
) -> Vec<Vec<Option<WordId>>> {
    span.iter()
        .map(|t| {
            let id = lexicon.vocab().id(t.as_ref());
            let mut v = vec![id];
            if let Some(id) = id {
                v.extend(lexicon.variations(id).iter().map(|&x| Some(x)));
            }
            v
        })
        .collect()
}

/// `prod(1 + |S_c(w)|) - 1` over the span, saturating.
pub fn search_space_size(window: &Window, lexicon: &Lexicon) -> u128 {
    let span = &window.tokens[window.span_offset()..window.span_offset() + window.span_length];
    product_size(span_choices(span, lexicon).iter().map(Vec::len)) - 1
}

pub(crate) fn product_size(sizes: impl Iterator<Item = usize>) -> u128 {
    sizes.fold(1u128, |acc, s| acc.saturating_mul(s as u128))
}

/// Mixed-radix counter over choice indices, rightmost digit fastest. Starts
/// just after the all-zero assignment and stops after the last one.
#[derive(Debug, Clone)]
pub(crate) struct Odometer {
    radices: Vec<usize>,
    digits: Vec<usize>,
}

impl Odometer {
    pub fn new(radices: Vec<usize>) -> Self {
        let digits = vec![0; radices.len()];
        Self { radices, digits }
    }

    /// Advances and returns the new digits, or `None` once wrapped around.
    pub fn next(&mut self) -> Option<&[usize]> {
        for i in (0..self.digits.len()).rev() {
            self.digits[i] += 1;
            if self.digits[i] < self.radices[i] {
                return Some(&self.digits);
            }
            self.digits[i] = 0;
        }
        None
    }
}

/// The full search space of a window: every combination of original tokens
/// and spelling variations over the span, except the window itself. Span
/// positions vary left to right with the rightmost fastest; at each position
/// the original comes first and variations follow in spelling order.
pub fn generate_search_space(window: &Window, lexicon: &Lexicon) -> Vec<CandidateSequence> {
    let off = window.span_offset();
    let span = &window.tokens[off..off + window.span_length];
    let choices = span_choices(span, lexicon);
    let mut odo = Odometer::new(choices.iter().map(Vec::len).collect());
    let mut out = Vec::new();
    while let Some(digits) = odo.next() {
        let mut tokens = window.tokens.clone();
        let mut changed = Vec::new();
        for (p, &dgt) in digits.iter().enumerate() {
            if dgt > 0 {
                let id = choices[p][dgt].expect("variations are vocabulary words");
                tokens[off + p] = lexicon.vocab().word(id).to_owned();
                changed.push(off + p);
            }
        }
        out.push(CandidateSequence {
            window: window.index,
            tokens,
            changed_positions: changed,
            lm_channel_log_prob: None,
            parse_log_prob: None,
        });
    }
    out
}
