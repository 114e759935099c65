//! Smoothed trigram language model.
//!
//! Counts are taken over sentences padded as `<s> <s> w1 .. wn </s>`. Observed
//! n-grams are discounted by a constant `delta` and the freed mass is handed to
//! the next lower order through per-context backoff weights (Katz style), so
//! the conditional distribution at every observed context sums to one. The
//! unigram level is add-`delta` smoothed over the vocabulary plus `</s>` and
//! `<unk>`, which keeps every probability strictly positive when `delta > 0`.
//!
//! Probabilities are stored as base-10 logarithms, exactly as they appear in
//! the model file, and converted to natural logarithms on the way out.

use std::collections::hash_map::Entry;
use std::f64::consts::LN_10;
use std::io::{BufRead, Write};

use rustc_hash::FxHashMap;

use crate::error::{Error, Result};
use crate::lexicon::Vocabulary;
use crate::text::{BOS, EOS, UNK};

pub const DEFAULT_DELTA: f64 = 0.5;

/// Placeholder log10 probability for n-grams that end in `<s>`; they carry
/// only a backoff weight and are never predicted.
const SENTINEL_LOG10: f64 = -99.0;

const ID_BITS: u32 = 21;
const MAX_IDS: usize = 1 << ID_BITS;

#[inline]
fn key2(u: u32, v: u32) -> u64 {
    (u64::from(u) << ID_BITS) | u64::from(v)
}

#[inline]
fn key3(u: u32, v: u32, w: u32) -> u64 {
    (u64::from(u) << (2 * ID_BITS)) | (u64::from(v) << ID_BITS) | u64::from(w)
}

fn unkey2(k: u64) -> (u32, u32) {
    let m = (1u64 << ID_BITS) - 1;
    ((k >> ID_BITS) as u32, (k & m) as u32)
}

fn unkey3(k: u64) -> (u32, u32, u32) {
    let m = (1u64 << ID_BITS) - 1;
    (
        (k >> (2 * ID_BITS)) as u32,
        ((k >> ID_BITS) & m) as u32,
        (k & m) as u32,
    )
}

/// Token ids: vocabulary words first, then `</s>`, `<unk>`, `<s>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Ids {
    vocab_len: u32,
}

impl Ids {
    fn eos(self) -> u32 {
        self.vocab_len
    }
    fn unk(self) -> u32 {
        self.vocab_len + 1
    }
    fn bos(self) -> u32 {
        self.vocab_len + 2
    }
    fn total(self) -> usize {
        self.vocab_len as usize + 3
    }
    /// Ids that can be predicted: the vocabulary, `</s>` and `<unk>`.
    fn predictable(self) -> std::ops::Range<u32> {
        0..self.vocab_len + 2
    }
}

fn token_id(vocab: &Vocabulary, ids: Ids, tok: &str) -> u32 {
    match vocab.id(tok) {
        Some(id) => id,
        None if tok == EOS => ids.eos(),
        None if tok == BOS => ids.bos(),
        None => ids.unk(),
    }
}

/// Raw n-gram counts over padded sentences.
#[derive(Debug, Clone)]
pub struct NgramCounts {
    vocab: Vocabulary,
    ids: Ids,
    unigrams: Vec<u64>,
    bigrams: FxHashMap<u64, u64>,
    trigrams: FxHashMap<u64, u64>,
    trigram_contexts: FxHashMap<u64, u64>,
    events: u64,
}

impl NgramCounts {
    /// Counts every predicted token of every sentence. Out-of-vocabulary
    /// tokens are credited to `<unk>`.
    pub fn collect<I, S, T>(sentences: I, vocab: &Vocabulary) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[T]>,
        T: AsRef<str>,
    {
        if vocab.len() + 3 > MAX_IDS {
            return Err(Error::InvalidVocabulary(format!(
                "{} words exceed the model limit of {}",
                vocab.len(),
                MAX_IDS - 3
            )));
        }
        let ids = Ids {
            vocab_len: vocab.len() as u32,
        };
        let mut counts = Self {
            vocab: vocab.clone(),
            ids,
            unigrams: vec![0; ids.total()],
            bigrams: FxHashMap::default(),
            trigrams: FxHashMap::default(),
            trigram_contexts: FxHashMap::default(),
            events: 0,
        };
        let mut sentences_seen = 0usize;
        let mut padded = Vec::new();
        for sentence in sentences {
            sentences_seen += 1;
            padded.clear();
            padded.extend([ids.bos(), ids.bos()]);
            for tok in sentence.as_ref() {
                let id = token_id(vocab, ids, tok.as_ref());
                // sentinels inside a sentence are ordinary unknown tokens
                padded.push(if id == ids.bos() || id == ids.eos() {
                    ids.unk()
                } else {
                    id
                });
            }
            padded.push(ids.eos());
            for t in padded.windows(3) {
                let (u, v, w) = (t[0], t[1], t[2]);
                counts.unigrams[w as usize] += 1;
                *counts.bigrams.entry(key2(v, w)).or_default() += 1;
                *counts.trigrams.entry(key3(u, v, w)).or_default() += 1;
                *counts.trigram_contexts.entry(key2(u, v)).or_default() += 1;
                counts.events += 1;
            }
        }
        if sentences_seen == 0 {
            return Err(Error::EmptyCorpus);
        }
        Ok(counts)
    }

    fn id(&self, tok: &str) -> u32 {
        token_id(&self.vocab, self.ids, tok)
    }

    pub fn trigram(&self, u: &str, v: &str, w: &str) -> u64 {
        self.trigrams
            .get(&key3(self.id(u), self.id(v), self.id(w)))
            .copied()
            .unwrap_or(0)
    }

    pub fn unigram(&self, w: &str) -> u64 {
        self.unigrams[self.id(w) as usize]
    }

    /// Unsmoothed relative frequency `c(u v w) / c(u v)`; `None` for an
    /// unseen context.
    pub fn mle(&self, u: &str, v: &str, w: &str) -> Option<f64> {
        let ctx = *self.trigram_contexts.get(&key2(self.id(u), self.id(v)))?;
        Some(self.trigram(u, v, w) as f64 / ctx as f64)
    }

    /// Number of predicted tokens, `</s>` included.
    pub fn events(&self) -> u64 {
        self.events
    }
}

/// Discounts the observed continuations of one context and returns their
/// log10 probabilities plus the context's log10 backoff weight.
fn discount_context(
    observed: &[(u32, u64)],
    delta: f64,
    lower: impl Fn(u32) -> f64,
) -> (Vec<f64>, Option<f64>) {
    let total: u64 = observed.iter().map(|&(_, c)| c).sum();
    let total = total as f64;
    let mut probs: Vec<f64> = observed
        .iter()
        .map(|&(_, c)| (c as f64 - delta) / total)
        .collect();
    let kept: f64 = probs.iter().sum();
    let lower_mass: f64 = observed.iter().map(|&(w, _)| lower(w)).sum();
    let free = 1.0 - lower_mass;
    let bow = if free > 1e-12 {
        Some(((1.0 - kept) / free).log10())
    } else {
        // every predictable word was observed here: nothing to back off to
        for p in &mut probs {
            *p /= kept;
        }
        None
    };
    (probs.into_iter().map(f64::log10).collect(), bow)
}

/// A trained trigram model. Immutable and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct TrigramModel {
    vocab: Vocabulary,
    ids: Ids,
    delta: f64,
    unigrams: Vec<f64>,
    unigram_bows: Vec<Option<f64>>,
    bigrams: FxHashMap<u64, f64>,
    bigram_bows: FxHashMap<u64, f64>,
    trigrams: FxHashMap<u64, f64>,
}

impl TrigramModel {
    /// Counts and smooths in one go.
    pub fn train<I, S, T>(sentences: I, vocab: &Vocabulary, delta: f64) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[T]>,
        T: AsRef<str>,
    {
        let counts = NgramCounts::collect(sentences, vocab)?;
        Self::from_counts(&counts, delta)
    }

    pub fn from_counts(counts: &NgramCounts, delta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&delta) {
            return Err(Error::InvalidConfig(format!(
                "discount delta must lie in [0, 1), got {delta}"
            )));
        }
        let ids = counts.ids;
        let n_pred = f64::from(ids.vocab_len + 2);
        let denom = counts.events as f64 + delta * n_pred;
        let mut unigrams = vec![SENTINEL_LOG10; ids.total()];
        for id in ids.predictable() {
            unigrams[id as usize] = ((counts.unigrams[id as usize] as f64 + delta) / denom).log10();
        }

        let mut model = Self {
            vocab: counts.vocab.clone(),
            ids,
            delta,
            unigrams,
            unigram_bows: vec![None; ids.total()],
            bigrams: FxHashMap::default(),
            bigram_bows: FxHashMap::default(),
            trigrams: FxHashMap::default(),
        };

        // Sorted so sums (and therefore the model file) do not depend on hash order.
        let mut bigrams: Vec<(u64, u64)> = counts.bigrams.iter().map(|(&k, &c)| (k, c)).collect();
        bigrams.sort_unstable();
        for group in bigrams.chunk_by(|a, b| unkey2(a.0).0 == unkey2(b.0).0) {
            let v = unkey2(group[0].0).0;
            let observed: Vec<(u32, u64)> = group.iter().map(|&(k, c)| (unkey2(k).1, c)).collect();
            let (probs, bow) =
                discount_context(&observed, delta, |w| 10f64.powf(model.unigrams[w as usize]));
            for (&(w, _), p) in observed.iter().zip(probs) {
                model.bigrams.insert(key2(v, w), p);
            }
            model.unigram_bows[v as usize] = bow;
        }

        let mut trigrams: Vec<(u64, u64)> = counts.trigrams.iter().map(|(&k, &c)| (k, c)).collect();
        trigrams.sort_unstable();
        let mut new_trigrams = FxHashMap::default();
        new_trigrams.reserve(trigrams.len());
        for group in trigrams.chunk_by(|a, b| a.0 >> ID_BITS == b.0 >> ID_BITS) {
            let (u, v, _) = unkey3(group[0].0);
            let observed: Vec<(u32, u64)> = group.iter().map(|&(k, c)| (unkey3(k).2, c)).collect();
            let (probs, bow) =
                discount_context(&observed, delta, |w| 10f64.powf(model.log10_bigram(v, w)));
            for (&(w, _), p) in observed.iter().zip(probs) {
                new_trigrams.insert(key3(u, v, w), p);
            }
            if let Some(b) = bow {
                model.bigram_bows.insert(key2(u, v), b);
            }
        }
        model.trigrams = new_trigrams;
        Ok(model)
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn bos(&self) -> u32 {
        self.ids.bos()
    }

    pub fn eos(&self) -> u32 {
        self.ids.eos()
    }

    pub fn unk(&self) -> u32 {
        self.ids.unk()
    }

    /// Model id of a token; vocabulary ids coincide with [`Vocabulary::id`].
    pub fn token_id(&self, tok: &str) -> u32 {
        token_id(&self.vocab, self.ids, tok)
    }

    pub fn token(&self, id: u32) -> &str {
        if id < self.ids.vocab_len {
            self.vocab.word(id)
        } else if id == self.ids.eos() {
            EOS
        } else if id == self.ids.unk() {
            UNK
        } else {
            BOS
        }
    }

    pub fn ngram_counts(&self) -> [usize; 3] {
        [self.ids.total(), self.bigrams.len(), self.trigrams.len()]
    }

    #[inline]
    fn log10_bigram(&self, v: u32, w: u32) -> f64 {
        match self.bigrams.get(&key2(v, w)) {
            Some(&p) => p,
            None => self.unigram_bows[v as usize].unwrap_or(0.0) + self.unigrams[w as usize],
        }
    }

    #[inline]
    fn log10_trigram(&self, u: u32, v: u32, w: u32) -> f64 {
        match self.trigrams.get(&key3(u, v, w)) {
            Some(&p) => p,
            None => {
                self.bigram_bows.get(&key2(u, v)).copied().unwrap_or(0.0) + self.log10_bigram(v, w)
            }
        }
    }

    /// Natural-log `P(w | u v)` over model ids.
    #[inline]
    pub fn log_prob_ids(&self, u: u32, v: u32, w: u32) -> f64 {
        self.log10_trigram(u, v, w) * LN_10
    }

    /// Natural-log `P(w | u v)`.
    pub fn log_prob(&self, u: &str, v: &str, w: &str) -> f64 {
        self.log_prob_ids(self.token_id(u), self.token_id(v), self.token_id(w))
    }

    /// What `P(w | u v)` would be if the trigram had not been observed.
    pub fn backoff_log_prob(&self, u: &str, v: &str, w: &str) -> f64 {
        let (u, v, w) = (self.token_id(u), self.token_id(v), self.token_id(w));
        (self.bigram_bows.get(&key2(u, v)).copied().unwrap_or(0.0) + self.log10_bigram(v, w))
            * LN_10
    }

    /// Whether `(u, v)` was ever seen as a trigram context.
    pub fn has_context(&self, u: &str, v: &str) -> bool {
        let (u, v) = (self.token_id(u), self.token_id(v));
        self.bigram_bows.contains_key(&key2(u, v))
            || self
                .ids
                .predictable()
                .any(|w| self.trigrams.contains_key(&key3(u, v, w)))
    }

    /// Every token id that can be predicted.
    pub fn predictable_ids(&self) -> std::ops::Range<u32> {
        self.ids.predictable()
    }

    /// Sum of natural-log conditionals of `span`, where `left` holds the two
    /// tokens preceding it. An empty span scores 0.
    pub fn span_log_prob_ids(&self, left: [u32; 2], span: &[u32]) -> f64 {
        let (mut u, mut v) = (left[0], left[1]);
        let mut total = 0.0;
        for &w in span {
            total += self.log_prob_ids(u, v, w);
            u = v;
            v = w;
        }
        total
    }

    pub fn span_log_prob<S: AsRef<str>>(&self, left: [&str; 2], span: &[S]) -> f64 {
        let ids: Vec<u32> = span.iter().map(|t| self.token_id(t.as_ref())).collect();
        self.span_log_prob_ids([self.token_id(left[0]), self.token_id(left[1])], &ids)
    }

    /// `ln P(w1 .. wn </s>)` with two `<s>` tokens of left padding.
    pub fn sentence_log_prob_ids(&self, tokens: &[u32]) -> f64 {
        let bos = self.ids.bos();
        let tail = match tokens {
            [] => [bos, bos],
            [w] => [bos, *w],
            [.., a, b] => [*a, *b],
        };
        self.span_log_prob_ids([bos, bos], tokens)
            + self.log_prob_ids(tail[0], tail[1], self.ids.eos())
    }

    pub fn sentence_log_prob<S: AsRef<str>>(&self, tokens: &[S]) -> f64 {
        let ids: Vec<u32> = tokens.iter().map(|t| self.token_id(t.as_ref())).collect();
        self.sentence_log_prob_ids(&ids)
    }

    /// Writes the model in ARPA layout: `log10-prob<TAB>n-gram<TAB>backoff`.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        let mut bigram_keys: Vec<u64> = self.bigrams.keys().copied().collect();
        // contexts that only exist as trigram histories, e.g. "<s> <s>"
        for &k in self.bigram_bows.keys() {
            if !self.bigrams.contains_key(&k) {
                bigram_keys.push(k);
            }
        }
        bigram_keys.sort_unstable();
        let mut trigram_keys: Vec<u64> = self.trigrams.keys().copied().collect();
        trigram_keys.sort_unstable();

        writeln!(w, "# realword trigram model; delta={}", self.delta)?;
        writeln!(w, "\\data\\")?;
        writeln!(w, "ngram 1={}", self.ids.total())?;
        writeln!(w, "ngram 2={}", bigram_keys.len())?;
        writeln!(w, "ngram 3={}", trigram_keys.len())?;
        writeln!(w)?;
        writeln!(w, "\\1-grams:")?;
        for id in 0..self.ids.total() as u32 {
            write!(w, "{}\t{}", self.unigrams[id as usize], self.token(id))?;
            match self.unigram_bows[id as usize] {
                Some(b) => writeln!(w, "\t{b}")?,
                None => writeln!(w)?,
            }
        }
        writeln!(w)?;
        writeln!(w, "\\2-grams:")?;
        for k in bigram_keys {
            let (u, v) = unkey2(k);
            let p = self.bigrams.get(&k).copied().unwrap_or(SENTINEL_LOG10);
            write!(w, "{p}\t{} {}", self.token(u), self.token(v))?;
            match self.bigram_bows.get(&k) {
                Some(b) => writeln!(w, "\t{b}")?,
                None => writeln!(w)?,
            }
        }
        writeln!(w)?;
        writeln!(w, "\\3-grams:")?;
        for k in trigram_keys {
            let (u, v, x) = unkey3(k);
            writeln!(
                w,
                "{}\t{} {} {}",
                self.trigrams[&k],
                self.token(u),
                self.token(v),
                self.token(x)
            )?;
        }
        writeln!(w)?;
        writeln!(w, "\\end\\")?;
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Format {
            what: "language model file",
            line,
            msg,
        };
        let mut delta = DEFAULT_DELTA;
        let mut section = 0u8;
        let mut uni_lines: Vec<(f64, String, Option<f64>)> = Vec::new();
        let mut bi_lines: Vec<(usize, f64, String, Option<f64>)> = Vec::new();
        let mut tri_lines: Vec<(usize, f64, String)> = Vec::new();
        let mut ended = false;

        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if let Some(rest) = line.strip_prefix('#') {
                if let Some(d) = rest.split("delta=").nth(1) {
                    delta = d
                        .trim()
                        .parse()
                        .map_err(|e| err(lineno, format!("bad delta: {e}")))?;
                }
                continue;
            }
            match line {
                "" => continue,
                "\\data\\" => {
                    section = 0;
                    continue;
                }
                "\\1-grams:" => {
                    section = 1;
                    continue;
                }
                "\\2-grams:" => {
                    section = 2;
                    continue;
                }
                "\\3-grams:" => {
                    section = 3;
                    continue;
                }
                "\\end\\" => {
                    ended = true;
                    break;
                }
                _ => {}
            }
            if section == 0 {
                continue; // ngram counts are informational
            }
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() < 2 || fields.len() > 3 {
                return Err(err(
                    lineno,
                    format!("expected 2 or 3 tab-separated fields, got {}", fields.len()),
                ));
            }
            let p: f64 = fields[0]
                .parse()
                .map_err(|e| err(lineno, format!("bad probability: {e}")))?;
            let bow = match fields.get(2) {
                Some(b) => Some(
                    b.parse::<f64>()
                        .map_err(|e| err(lineno, format!("bad backoff: {e}")))?,
                ),
                None => None,
            };
            let words = fields[1].to_owned();
            if words.split(' ').count() != section as usize {
                return Err(err(
                    lineno,
                    format!("expected a {section}-gram, got {words:?}"),
                ));
            }
            match section {
                1 => uni_lines.push((p, words, bow)),
                2 => bi_lines.push((lineno, p, words, bow)),
                _ => {
                    if bow.is_some() {
                        return Err(err(lineno, "trigrams carry no backoff weight".into()));
                    }
                    tri_lines.push((lineno, p, words))
                }
            }
        }
        if !ended {
            return Err(err(0, "missing \\end\\ marker".into()));
        }

        let words: Vec<String> = uni_lines
            .iter()
            .filter(|(_, w, _)| w != BOS && w != EOS && w != UNK)
            .map(|(_, w, _)| w.clone())
            .collect();
        let vocab = Vocabulary::from_ranked(words)?;
        if vocab.len() + 3 > MAX_IDS || uni_lines.len() != vocab.len() + 3 {
            return Err(err(
                0,
                "unigram section must list the vocabulary plus <s>, </s> and <unk>".into(),
            ));
        }
        let ids = Ids {
            vocab_len: vocab.len() as u32,
        };
        let mut model = Self {
            vocab,
            ids,
            delta,
            unigrams: vec![SENTINEL_LOG10; ids.total()],
            unigram_bows: vec![None; ids.total()],
            bigrams: FxHashMap::default(),
            bigram_bows: FxHashMap::default(),
            trigrams: FxHashMap::default(),
        };
        let lookup = |model: &Self, lineno: usize, w: &str| -> Result<u32> {
            let id = model.token_id(w);
            if id == model.ids.unk() && w != UNK {
                return Err(err(
                    lineno,
                    format!("token {w:?} missing from the unigram section"),
                ));
            }
            Ok(id)
        };
        for (p, w, bow) in uni_lines {
            let id = model.token_id(&w) as usize;
            model.unigrams[id] = p;
            model.unigram_bows[id] = bow;
        }
        for (lineno, p, words, bow) in bi_lines {
            let mut it = words.split(' ');
            let u = lookup(&model, lineno, it.next().unwrap_or_default())?;
            let v = lookup(&model, lineno, it.next().unwrap_or_default())?;
            let k = key2(u, v);
            if v != model.ids.bos() {
                model.bigrams.insert(k, p);
            }
            if let Some(b) = bow {
                model.bigram_bows.insert(k, b);
            }
        }
        for (lineno, p, words) in tri_lines {
            let mut it = words.split(' ');
            let u = lookup(&model, lineno, it.next().unwrap_or_default())?;
            let v = lookup(&model, lineno, it.next().unwrap_or_default())?;
            let x = lookup(&model, lineno, it.next().unwrap_or_default())?;
            match model.trigrams.entry(key3(u, v, x)) {
                Entry::Occupied(_) => {
                    return Err(err(lineno, format!("duplicate trigram {words:?}")))
                }
                Entry::Vacant(e) => {
                    e.insert(p);
                }
            }
        }
        Ok(model)
    }
}
