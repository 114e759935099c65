//! The correction engine.
//!
//! Every mode maximizes `ln P(S') + ln P(S | S')`, the language-model score of
//! a candidate sentence `S'` plus the channel score of the observed sentence
//! `S` given `S'`, but over different candidate sets:
//!
//! * [`Mode::Mdm`] considers the observed sentence and every sentence that
//!   differs from it in exactly one word.
//! * [`Mode::WindowSingle`] slides windows of `d + 4` tokens over the sentence.
//!   Each window may change one word of its `d`-word span; the window is scored
//!   on the trigrams that touch the span, and each window sees the corrections
//!   already made to its left.
//! * [`Mode::WindowMulti`] collects, per window, every multi-word variant that
//!   parses strictly better than the original window and scores at least as
//!   well, then combines those variants across windows. A combination must
//!   beat the observed sentence's summed window score and parse better than
//!   it; among those the highest sum of window scores wins.

mod window;

use std::fmt;
use std::str::FromStr;

pub use window::{
    enumerate_windows, generate_search_space, pad, search_space_size, CandidateSequence, Window,
    CONTEXT,
};
use window::{product_size, span_choices, window_layout, Odometer};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::lexicon::{Lexicon, WordId};
use crate::lm::TrigramModel;
use crate::par;
use crate::pcfg::{Grammar, DEFAULT_PARSE_FLOOR};
use crate::text::{BOS, EOS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Mode {
    Mdm,
    WindowSingle,
    WindowMulti,
}

impl Mode {
    pub const ALL: [Mode; 3] = [Mode::Mdm, Mode::WindowSingle, Mode::WindowMulti];

    pub fn name(self) -> &'static str {
        match self {
            Mode::Mdm => "mdm",
            Mode::WindowSingle => "window-single",
            Mode::WindowMulti => "window-multi",
        }
    }

    pub fn uses_windows(self) -> bool {
        self != Mode::Mdm
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "unknown mode {s:?} (expected mdm, window-single or window-multi)"
                ))
            })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchConfig {
    /// Upper bound on the candidates of one window and on the number of
    /// cross-window combinations in window-multi mode.
    pub combination_cap: u64,
    /// Parse score of an unparseable sequence.
    pub parse_floor: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            combination_cap: 1_000_000,
            parse_floor: DEFAULT_PARSE_FLOOR,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    /// Index into the unpadded sentence.
    pub position: usize,
    pub original: String,
    pub replacement: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WindowStats {
    /// Index of the first span token in the unpadded sentence.
    pub span_start: usize,
    pub span_length: usize,
    /// Candidates considered before any pruning.
    pub initial: u128,
    /// Candidates kept for combination: in window-multi mode those passing
    /// the parse gate and scoring at least as well as the original window;
    /// in window-single mode those scoring at least as well.
    pub retained: usize,
    /// Retained candidates that score strictly better than the original.
    pub improving: usize,
    /// Window-multi only: candidates with a good enough score that the parse
    /// gate rejected.
    pub parse_pruned: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionResult {
    pub original: Vec<String>,
    pub corrected: Vec<String>,
    pub edits: Vec<Edit>,
    pub mode: Mode,
    /// Improvement of the mode's objective over leaving the sentence alone.
    pub score_delta: f64,
    pub windows: Vec<WindowStats>,
    /// Window-multi only: size of the cross-window combination space.
    pub combinations: u128,
}

impl CorrectionResult {
    /// The sentence left as it is.
    pub fn unchanged(original: Vec<String>, mode: Mode) -> Self {
        Self {
            corrected: original.clone(),
            original,
            edits: Vec::new(),
            mode,
            score_delta: 0.0,
            windows: Vec::new(),
            combinations: 0,
        }
    }

    fn with_changes(
        original: Vec<String>,
        changes: &[(usize, String)],
        mode: Mode,
        score_delta: f64,
        windows: Vec<WindowStats>,
    ) -> Self {
        let mut corrected = original.clone();
        let mut edits = Vec::with_capacity(changes.len());
        for (pos, word) in changes {
            edits.push(Edit {
                position: *pos,
                original: original[*pos].clone(),
                replacement: word.clone(),
            });
            corrected[*pos] = word.clone();
        }
        edits.sort_by_key(|e| e.position);
        Self {
            original,
            corrected,
            edits,
            mode,
            score_delta,
            windows,
            combinations: 0,
        }
    }
}

/// Candidate retained by one window: the substitutions it makes (padded
/// position, word) and its window score.
#[derive(Debug, Clone)]
struct Stored {
    changes: Vec<(usize, WordId)>,
    score: f64,
}

/// A sentence prepared for scoring.
struct Sentence<'t> {
    /// Padded surface tokens.
    words: Vec<&'t str>,
    /// Padded model ids.
    ids: Vec<u32>,
    /// Vocabulary id per padded position; `None` for sentinels and unknown words.
    vocab_ids: Vec<Option<WordId>>,
    /// Channel log-probability of leaving each padded position unchanged.
    keep: Vec<f64>,
}

/// Scores and corrects sentences with fixed models.
#[derive(Debug, Clone, Copy)]
pub struct Corrector<'a> {
    lexicon: &'a Lexicon,
    model: &'a TrigramModel,
    grammar: Option<&'a Grammar>,
    channel: ChannelParams,
    config: SearchConfig,
}

impl<'a> Corrector<'a> {
    pub fn new(
        lexicon: &'a Lexicon,
        model: &'a TrigramModel,
        channel: ChannelParams,
    ) -> Result<Self> {
        if lexicon.vocab() != model.vocab() {
            return Err(Error::VocabularyMismatch);
        }
        Ok(Self {
            lexicon,
            model,
            grammar: None,
            channel,
            config: SearchConfig::default(),
        })
    }

    pub fn with_grammar(mut self, grammar: &'a Grammar) -> Self {
        self.grammar = Some(grammar);
        self
    }

    pub fn with_config(mut self, config: SearchConfig) -> Self {
        self.config = config;
        self
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    pub fn model(&self) -> &'a TrigramModel {
        self.model
    }

    pub fn grammar(&self) -> Option<&'a Grammar> {
        self.grammar
    }

    pub fn channel(&self) -> ChannelParams {
        self.channel
    }

    pub fn config(&self) -> SearchConfig {
        self.config
    }

    pub fn correct<S: AsRef<str>>(
        &self,
        tokens: &[S],
        mode: Mode,
        d: usize,
    ) -> Result<CorrectionResult> {
        match mode {
            Mode::Mdm => Ok(self.correct_mdm(tokens)),
            Mode::WindowSingle => self.correct_window_single(tokens, d),
            Mode::WindowMulti => self.correct_window_multi(tokens, d),
        }
    }

    /// Corrects many sentences, in parallel when the `parallel` feature is on.
    pub fn correct_batch<S>(
        &self,
        sentences: &[Vec<S>],
        mode: Mode,
        d: usize,
    ) -> Vec<Result<CorrectionResult>>
    where
        S: AsRef<str> + Sync,
    {
        par::map(sentences, |s| self.correct(s, mode, d))
    }

    pub fn correct_batch_sequential<S: AsRef<str>>(
        &self,
        sentences: &[Vec<S>],
        mode: Mode,
        d: usize,
    ) -> Vec<Result<CorrectionResult>> {
        par::map_sequential(sentences, |s| self.correct(s, mode, d))
    }

    fn prepare<'t, S: AsRef<str>>(&self, tokens: &'t [S]) -> Sentence<'t> {
        let mut words: Vec<&'t str> = Vec::with_capacity(tokens.len() + 3);
        words.push(BOS);
        words.push(BOS);
        words.extend(tokens.iter().map(|t| t.as_ref()));
        words.push(EOS);
        let n = words.len();
        let mut ids = Vec::with_capacity(n);
        let mut vocab_ids = Vec::with_capacity(n);
        let mut keep = Vec::with_capacity(n);
        for (i, w) in words.iter().enumerate() {
            let sentinel = i < CONTEXT || i == n - 1;
            let vid = if sentinel {
                None
            } else {
                self.lexicon.vocab().id(w)
            };
            ids.push(match (sentinel, vid) {
                (true, _) if i == n - 1 => self.model.eos(),
                (true, _) => self.model.bos(),
                (false, Some(v)) => v,
                (false, None) => self.model.unk(),
            });
            let variations = match vid {
                Some(v) => self.lexicon.variation_count(v),
                None if sentinel => 0,
                None => self.lexicon.spelling_variations(w).len(),
            };
            vocab_ids.push(vid);
            keep.push(self.channel.ln_correct(variations));
        }
        Sentence {
            words,
            ids,
            vocab_ids,
            keep,
        }
    }

    /// `ln P(observed | intended)` for a vocabulary word `intended` typed as a
    /// different word.
    #[inline]
    fn ln_substitute(&self, intended: WordId) -> f64 {
        self.channel
            .ln_error(self.lexicon.variation_count(intended))
    }

    /// Language-model score of the trigrams ending in `start + 2 .. end` plus
    /// the channel terms of the span, given one channel term per span token.
    #[inline]
    fn window_score(
        &self,
        ids: &[u32],
        start: usize,
        end: usize,
        channel: impl Iterator<Item = f64>,
    ) -> f64 {
        let lm = self
            .model
            .span_log_prob_ids([ids[start], ids[start + 1]], &ids[start + 2..end]);
        let mut ch = 0.0;
        for t in channel {
            ch += t;
        }
        lm + ch
    }

    /// Sentence score over padded ids with one channel term per real token.
    fn sentence_score(&self, ids: &[u32], channel: impl Iterator<Item = f64>) -> f64 {
        let lm = self
            .model
            .sentence_log_prob_ids(&ids[CONTEXT..ids.len() - 1]);
        let mut ch = 0.0;
        for t in channel {
            ch += t;
        }
        lm + ch
    }

    /// Best sentence with at most one substituted word. Ties keep the earlier
    /// candidate, and the original wins ties against every candidate.
    pub fn correct_mdm<S: AsRef<str>>(&self, tokens: &[S]) -> CorrectionResult {
        let original: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
        let s = self.prepare(tokens);
        let n = s.ids.len();
        let real = CONTEXT..n - 1;
        let base = self.sentence_score(&s.ids, s.keep[real.clone()].iter().copied());
        let mut best = base;
        let mut best_change = None;
        let mut ids = s.ids.clone();
        for p in real.clone() {
            let Some(v) = s.vocab_ids[p] else { continue };
            for &c in self.lexicon.variations(v) {
                ids[p] = c;
                let sub = self.ln_substitute(c);
                let score = self.sentence_score(
                    &ids,
                    real.clone().map(|i| if i == p { sub } else { s.keep[i] }),
                );
                if score > best {
                    best = score;
                    best_change = Some((p, c));
                }
            }
            ids[p] = s.ids[p];
        }
        match best_change {
            None => CorrectionResult::unchanged(original, Mode::Mdm),
            Some((p, c)) => CorrectionResult::with_changes(
                original,
                &[(p - CONTEXT, self.lexicon.vocab().word(c).to_owned())],
                Mode::Mdm,
                best - base,
                Vec::new(),
            ),
        }
    }

    /// One substitution per window, windows processed left to right on the
    /// progressively corrected text.
    pub fn correct_window_single<S: AsRef<str>>(
        &self,
        tokens: &[S],
        d: usize,
    ) -> Result<CorrectionResult> {
        check_span_width(d)?;
        let original: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
        let s = self.prepare(tokens);
        let mut cur = s.ids.clone();
        let mut changes = Vec::new();
        let mut delta = 0.0;
        let mut stats = Vec::new();
        for (start, span_start, span_len, end) in window_layout(original.len(), d) {
            let span = span_start..span_start + span_len;
            let base = self.window_score(&cur, start, end, s.keep[span.clone()].iter().copied());
            let mut best = base;
            let mut best_change = None;
            let mut st = WindowStats {
                span_start: span_start - CONTEXT,
                span_length: span_len,
                ..WindowStats::default()
            };
            for p in span.clone() {
                let Some(v) = s.vocab_ids[p] else { continue };
                for &c in self.lexicon.variations(v) {
                    st.initial += 1;
                    cur[p] = c;
                    let sub = self.ln_substitute(c);
                    let score = self.window_score(
                        &cur,
                        start,
                        end,
                        span.clone().map(|i| if i == p { sub } else { s.keep[i] }),
                    );
                    if score >= base {
                        st.retained += 1;
                    }
                    if score > base {
                        st.improving += 1;
                    }
                    if score > best {
                        best = score;
                        best_change = Some((p, c));
                    }
                }
                cur[p] = s.ids[p];
            }
            if let Some((p, c)) = best_change {
                cur[p] = c;
                delta += best - base;
                changes.push((p - CONTEXT, self.lexicon.vocab().word(c).to_owned()));
            }
            stats.push(st);
        }
        Ok(CorrectionResult::with_changes(
            original,
            &changes,
            Mode::WindowSingle,
            delta,
            stats,
        ))
    }

    /// Multiple substitutions per window with grammar-based pruning and
    /// recombination across windows.
    pub fn correct_window_multi<S: AsRef<str>>(
        &self,
        tokens: &[S],
        d: usize,
    ) -> Result<CorrectionResult> {
        check_span_width(d)?;
        let grammar = self.grammar.ok_or(Error::MissingGrammar)?;
        let original: Vec<String> = tokens.iter().map(|t| t.as_ref().to_owned()).collect();
        if original.is_empty() {
            return Ok(CorrectionResult::unchanged(original, Mode::WindowMulti));
        }
        let s = self.prepare(tokens);
        let layout = window_layout(original.len(), d);
        let cap = self.config.combination_cap;
        let floor = self.config.parse_floor;

        let choices: Vec<Vec<Vec<Option<WordId>>>> = layout
            .iter()
            .map(|&(_, a, len, _)| span_choices(&s.words[a..a + len], self.lexicon))
            .collect();
        let sizes: Vec<u128> = choices
            .iter()
            .map(|c| product_size(c.iter().map(Vec::len)) - 1)
            .collect();
        if let Some(&big) = sizes.iter().filter(|&&x| x > cap as u128).max() {
            return Err(Error::CombinatorialBlowup {
                what: "window candidates",
                count: big,
                cap,
                window_sizes: sizes,
            });
        }

        let mut parser = grammar.parser();
        let mut stats = Vec::with_capacity(layout.len());
        let mut originals = Vec::with_capacity(layout.len());
        let mut stored: Vec<Vec<Stored>> = Vec::with_capacity(layout.len());
        let mut ids = s.ids.clone();
        let mut frag: Vec<&str> = Vec::new();

        // per-window candidate lists, scored against the observed text
        for (w, &(start, span_start, span_len, end)) in layout.iter().enumerate() {
            let span = span_start..span_start + span_len;
            let base = self.window_score(&s.ids, start, end, s.keep[span.clone()].iter().copied());
            let base_parse =
                parser.fragment_log_prob_or_floor(&real_tokens(&s.words[start..end]), floor);
            let mut st = WindowStats {
                span_start: span_start - CONTEXT,
                span_length: span_len,
                initial: sizes[w],
                ..WindowStats::default()
            };
            let mut kept = Vec::new();
            let ch = &choices[w];
            let mut odo = Odometer::new(ch.iter().map(Vec::len).collect());
            while let Some(digits) = odo.next() {
                for (k, &dg) in digits.iter().enumerate() {
                    ids[span_start + k] = match ch[k][dg] {
                        Some(c) if dg > 0 => c,
                        _ => s.ids[span_start + k],
                    };
                }
                let terms = digits.iter().enumerate().map(|(k, &dg)| match ch[k][dg] {
                    Some(c) if dg > 0 => self.ln_substitute(c),
                    _ => s.keep[span_start + k],
                });
                let score = self.window_score(&ids, start, end, terms);
                if score < base {
                    continue;
                }
                frag.clear();
                for i in start..end {
                    if i < CONTEXT || i == s.words.len() - 1 {
                        continue;
                    }
                    frag.push(if span.contains(&i) && digits[i - span_start] > 0 {
                        self.lexicon.vocab().word(ids[i])
                    } else {
                        s.words[i]
                    });
                }
                let parse = parser.fragment_log_prob_or_floor(&frag, floor);
                if parse <= base_parse {
                    st.parse_pruned += 1;
                    continue;
                }
                st.retained += 1;
                if score > base {
                    st.improving += 1;
                }
                let changes = digits
                    .iter()
                    .enumerate()
                    .filter(|&(_, &dg)| dg > 0)
                    .map(|(k, &dg)| (span_start + k, ch[k][dg].expect("variation")))
                    .collect();
                kept.push(Stored { changes, score });
            }
            for k in span {
                ids[k] = s.ids[k];
            }
            stats.push(st);
            originals.push(base);
            stored.push(kept);
        }

        // combinations of stored window candidates
        let radices: Vec<usize> = stored.iter().map(|k| k.len() + 1).collect();
        let total = product_size(radices.iter().copied()) - 1;
        if total > cap as u128 {
            return Err(Error::CombinatorialBlowup {
                what: "combinations",
                count: total,
                cap,
                window_sizes: stored.iter().map(|k| k.len() as u128).collect(),
            });
        }
        let mut result = CorrectionResult::unchanged(original, Mode::WindowMulti);
        result.windows = stats;
        result.combinations = total;
        if total == 0 {
            return Ok(result);
        }
        let base_total = combination_log_prob(&vec![None; originals.len()], &originals);
        let mut scored: Vec<(f64, u64)> = Vec::with_capacity(total as usize);
        let mut odo = Odometer::new(radices.clone());
        let mut chosen: Vec<Option<f64>> = vec![None; radices.len()];
        let mut index = 0u64;
        while let Some(digits) = odo.next() {
            index += 1;
            for (w, &dg) in digits.iter().enumerate() {
                chosen[w] = (dg > 0).then(|| stored[w][dg - 1].score);
            }
            scored.push((combination_log_prob(&chosen, &originals), index));
        }
        // best combined score among sentences that parse better than the
        // observed one; earlier combinations win ties
        scored.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let original = &result.original;
        let observed_parse = parser.fragment_log_prob_or_floor(original, floor);
        let mut sentence: Vec<&str> = Vec::with_capacity(original.len());
        for (score, index) in scored {
            if score <= base_total {
                break;
            }
            let digits = decode_mixed_radix(index, &radices);
            sentence.clear();
            sentence.extend(original.iter().map(String::as_str));
            let mut changes = Vec::new();
            for (w, &dg) in digits.iter().enumerate() {
                if dg > 0 {
                    for &(p, c) in &stored[w][dg - 1].changes {
                        sentence[p - CONTEXT] = self.lexicon.vocab().word(c);
                        changes.push((p - CONTEXT, self.lexicon.vocab().word(c).to_owned()));
                    }
                }
            }
            if parser.fragment_log_prob_or_floor(&sentence, floor) > observed_parse {
                let mut r = CorrectionResult::with_changes(
                    original.clone(),
                    &changes,
                    Mode::WindowMulti,
                    score - base_total,
                    result.windows.clone(),
                );
                r.combinations = total;
                return Ok(r);
            }
        }
        Ok(result)
    }
}

/// Score of a cross-window combination: the sum over windows of the chosen candidate's score,
/// or of the original window's score where nothing was chosen. Summed left to
/// right.
pub fn combination_log_prob(chosen: &[Option<f64>], originals: &[f64]) -> f64 {
    assert_eq!(chosen.len(), originals.len(), "one entry per window");
    let mut total = 0.0;
    for (c, o) in chosen.iter().zip(originals) {
        total += c.unwrap_or(*o);
    }
    total
}

fn check_span_width(d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidConfig(
            "span width d must be at least 1".into(),
        ));
    }
    Ok(())
}

fn real_tokens<'t>(padded: &[&'t str]) -> Vec<&'t str> {
    padded
        .iter()
        .copied()
        .filter(|t| *t != BOS && *t != EOS)
        .collect()
}

/// Digits of `index` in the mixed radix `radices`, most significant first.
fn decode_mixed_radix(mut index: u64, radices: &[usize]) -> Vec<usize> {
    let mut digits = vec![0; radices.len()];
    for (d, &r) in digits.iter_mut().zip(radices).rev() {
        *d = (index % r as u64) as usize;
        index /= r as u64;
    }
    digits
}
