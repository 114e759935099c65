//! Toy models and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use rand::distributions::WeightedIndex;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use realword::channel::{channel_log_prob, sequence_channel_log_prob};
use realword::pcfg::{Rhs, Rule, Sym};
use realword::text::{BOS, EOS};
use realword::{ChannelParams, Grammar, Lexicon, TrigramModel, Vocabulary};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Optimal string alignment distance, by the textbook table.
pub fn osa_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut d = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=a.len() {
        for j in 1..=b.len() {
            let cost = usize::from(a[i - 1] != b[j - 1]);
            d[i][j] = (d[i - 1][j] + 1)
                .min(d[i][j - 1] + 1)
                .min(d[i - 1][j - 1] + cost);
            if i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1] {
                d[i][j] = d[i][j].min(d[i - 2][j - 2] + 1);
            }
        }
    }
    d[a.len()][b.len()]
}

/// Between `min` and `max` distinct words of one to three letters over `letters`.
pub fn toy_words(rng: &mut impl Rng, letters: &str, min: usize, max: usize) -> Vec<String> {
    let letters: Vec<char> = letters.chars().collect();
    let mut all = Vec::new();
    for len in 1..=3u32 {
        for k in 0..letters.len().pow(len) {
            let mut w = String::new();
            let mut x = k;
            for _ in 0..len {
                w.push(letters[x % letters.len()]);
                x /= letters.len();
            }
            all.push(w);
        }
    }
    all.shuffle(rng);
    all.truncate(rng.gen_range(min..=max).min(all.len()));
    all
}

/// Sentences drawn from a skewed unigram distribution over `words`.
pub fn toy_corpus(
    rng: &mut impl Rng,
    words: &[String],
    sentences: usize,
    max_len: usize,
) -> Vec<Vec<String>> {
    let weights: Vec<f64> = words
        .iter()
        .map(|_| rng.gen::<f64>().powi(3) + 1e-3)
        .collect();
    let pick = WeightedIndex::new(&weights).expect("positive weights");
    (0..sentences)
        .map(|_| {
            let n = rng.gen_range(1..=max_len);
            (0..n).map(|_| words[pick.sample(rng)].clone()).collect()
        })
        .collect()
}

pub struct Toy {
    pub lexicon: Lexicon,
    pub model: TrigramModel,
    pub words: Vec<String>,
}

/// A vocabulary of up to `max_vocab` words over a small alphabet, so most
/// words have spelling variations, and a trigram model trained on random text.
pub fn toy_world(rng: &mut impl Rng, min_vocab: usize, max_vocab: usize) -> Toy {
    let words = toy_words(rng, "abcd", min_vocab, max_vocab);
    let corpus = toy_corpus(rng, &words, 40, 8);
    let vocab = Vocabulary::build(corpus.iter().flatten(), usize::MAX).expect("non-empty corpus");
    let model = TrigramModel::train(corpus.iter(), &vocab, 0.5).expect("trainable");
    let words = vocab.words().to_vec();
    Toy {
        lexicon: Lexicon::new(vocab),
        model,
        words,
    }
}

/// A random sentence over `words`, with an out-of-vocabulary token now and then.
pub fn toy_sentence(rng: &mut impl Rng, words: &[String], max_len: usize) -> Vec<String> {
    let n = rng.gen_range(1..=max_len);
    (0..n)
        .map(|_| {
            if rng.gen_bool(0.1) {
                "zz".to_owned()
            } else {
                words[rng.gen_range(0..words.len())].clone()
            }
        })
        .collect()
}

/// A random CNF grammar with at most `max_rules` rules over the labels S, A
/// and B, lexical rules for a few of `words` and unknown-word emissions.
pub fn toy_grammar(rng: &mut impl Rng, words: &[String], max_rules: usize) -> Grammar {
    let labels = ["S", "A", "B"];
    let mut shapes: Vec<(usize, Rhs)> = Vec::new();
    for &l in &[1usize, 2] {
        if rng.gen_bool(0.8) {
            shapes.push((l, Rhs::Unknown));
        }
    }
    let lexical = rng.gen_range(1..=3);
    for _ in 0..lexical {
        let w = words[rng.gen_range(0..words.len())].clone();
        let lhs = rng.gen_range(0..3);
        if !shapes
            .iter()
            .any(|(l, r)| *l == lhs && *r == Rhs::Word(w.clone()))
        {
            shapes.push((lhs, Rhs::Word(w)));
        }
    }
    let mut tries = 0;
    while shapes.len() < max_rules && tries < 50 {
        tries += 1;
        let lhs = rng.gen_range(0..3);
        let rhs = Rhs::Binary(
            labels[rng.gen_range(0..3)].to_owned(),
            labels[rng.gen_range(0..3)].to_owned(),
        );
        if !shapes.iter().any(|(l, r)| *l == lhs && *r == rhs) {
            shapes.push((lhs, rhs));
        }
        if rng.gen_bool(0.2) {
            break;
        }
    }
    let mut rules = Vec::new();
    for (lhs, label) in labels.iter().enumerate() {
        let mine: Vec<&Rhs> = shapes
            .iter()
            .filter(|(l, _)| *l == lhs)
            .map(|(_, r)| r)
            .collect();
        let weights: Vec<f64> = mine.iter().map(|_| rng.gen_range(0.1..1.0)).collect();
        let total: f64 = mine
            .iter()
            .zip(&weights)
            .filter(|(r, _)| !matches!(r, Rhs::Unknown))
            .map(|(_, w)| w)
            .sum();
        for (r, w) in mine.into_iter().zip(weights) {
            let p = if *r == Rhs::Unknown {
                w / 2.0
            } else {
                w / total
            };
            rules.push(Rule {
                lhs: (*label).to_owned(),
                rhs: r.clone(),
                log10_prob: p.log10(),
            });
        }
    }
    let roots = vec![
        ("S".to_owned(), 0.8f64.log10()),
        ("A".to_owned(), 0.2f64.log10()),
    ];
    let chunks = labels
        .iter()
        .map(|l| ((*l).to_owned(), rng.gen_range(0.1..0.5f64).log10()))
        .collect();
    Grammar::from_parts(rules, roots, chunks).expect("well-formed toy grammar")
}

/// Log-probabilities of every derivation of `words` from `sym`, found by
/// recursive enumeration without sharing subresults.
pub fn derivations(g: &Grammar, sym: Sym, words: &[&str]) -> Vec<f64> {
    if words.len() == 1 {
        return g
            .lexical_entries(words[0])
            .iter()
            .filter(|(a, _)| *a == sym)
            .map(|&(_, p)| p)
            .collect();
    }
    let mut out = Vec::new();
    for m in 1..words.len() {
        for r in g.binary_rules().iter().filter(|r| r.lhs == sym) {
            let left = derivations(g, r.left, &words[..m]);
            if left.is_empty() {
                continue;
            }
            let right = derivations(g, r.right, &words[m..]);
            for &l in &left {
                for &x in &right {
                    out.push(r.log_prob + l + x);
                }
            }
        }
    }
    out
}

pub fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(f64::NEG_INFINITY, f64::max)
}

/// Best root-weighted derivation of the whole input.
pub fn oracle_viterbi(g: &Grammar, words: &[&str]) -> f64 {
    max_of(
        (0..g.symbols().len() as Sym)
            .map(|s| g.root_log_prob(s) + max_of(derivations(g, s, words))),
    )
}

/// Best segmentation into constituents, over every segmentation.
pub fn oracle_fragment(g: &Grammar, words: &[&str]) -> f64 {
    let n = words.len();
    let mut best = f64::NEG_INFINITY;
    // bit k set: a segment boundary after token k
    for mask in 0u32..(1 << (n - 1)) {
        let mut total = 0.0;
        let mut start = 0;
        for k in 0..n {
            if k == n - 1 || mask & (1 << k) != 0 {
                let seg = &words[start..=k];
                total += max_of(
                    (0..g.symbols().len() as Sym)
                        .map(|s| g.chunk_log_prob(s) + max_of(derivations(g, s, seg))),
                );
                start = k + 1;
            }
        }
        best = best.max(total);
    }
    best
}

/// Every sentence reachable by substituting spelling variations at any
/// subset of positions, the observed sentence first.
pub fn all_substitutions(tokens: &[String], lexicon: &Lexicon) -> Vec<Vec<String>> {
    let mut out = vec![tokens.to_vec()];
    for (p, t) in tokens.iter().enumerate() {
        let alts = if lexicon.vocab().contains(t) {
            lexicon.spelling_variations(t).variations
        } else {
            Vec::new()
        };
        let mut next = Vec::with_capacity(out.len() * (alts.len() + 1));
        for s in &out {
            next.push(s.clone());
            for a in &alts {
                let mut c = s.clone();
                c[p] = a.clone();
                next.push(c);
            }
        }
        out = next;
    }
    out
}

pub fn full_space_size(tokens: &[String], lexicon: &Lexicon) -> u128 {
    tokens
        .iter()
        .map(|t| {
            if lexicon.vocab().contains(t) {
                1 + lexicon.spelling_variations(t).len() as u128
            } else {
                1
            }
        })
        .product()
}

/// The set of best sentences and their score gain over the observed one.
#[derive(Debug, Clone)]
pub struct OracleAnswer {
    pub best: Vec<Vec<String>>,
    pub gain: f64,
}

impl OracleAnswer {
    fn unchanged(tokens: &[String]) -> Self {
        Self {
            best: vec![tokens.to_vec()],
            gain: 0.0,
        }
    }

    pub fn accepts(&self, corrected: &[String], gain: f64) -> bool {
        self.best.iter().any(|b| b == corrected) && (gain - self.gain).abs() <= 1e-9
    }
}

fn channel_terms(
    params: &ChannelParams,
    intended: &[String],
    observed: &[String],
    lexicon: &Lexicon,
) -> f64 {
    sequence_channel_log_prob(params, intended, observed, lexicon).expect("reachable")
}

/// Best sentence with at most one substituted word by exhaustive scoring.
pub fn oracle_mdm(tokens: &[String], toy: &Toy, params: &ChannelParams) -> OracleAnswer {
    let score = |s: &[String]| {
        toy.model.sentence_log_prob(s) + channel_terms(params, s, tokens, &toy.lexicon)
    };
    let base = score(tokens);
    let mut best = base;
    let mut argmax: Vec<Vec<String>> = Vec::new();
    for (p, t) in tokens.iter().enumerate() {
        if !toy.lexicon.vocab().contains(t) {
            continue;
        }
        for alt in toy.lexicon.spelling_variations(t).variations {
            let mut c = tokens.to_vec();
            c[p] = alt;
            let s = score(&c);
            if s > best + 1e-12 {
                best = s;
                argmax = vec![c];
            } else if (s - best).abs() <= 1e-12 && s > base {
                argmax.push(c);
            }
        }
    }
    if argmax.is_empty() {
        return OracleAnswer::unchanged(tokens);
    }
    OracleAnswer {
        best: argmax,
        gain: best - base,
    }
}

/// Windows as `(start, span_start, span_end, end)` in padded coordinates:
/// spans of `d` tokens tiling the sentence, two tokens of context each side.
pub fn windows(n: usize, d: usize) -> Vec<(usize, usize, usize, usize)> {
    let mut out = Vec::new();
    let mut s = 0;
    while s < n {
        let len = d.min(n - s);
        let span_start = s + 2;
        out.push((
            s,
            span_start,
            span_start + len,
            (span_start + len + 2).min(n + 3),
        ));
        s += d;
    }
    out
}

fn padded(tokens: &[String]) -> Vec<String> {
    let mut p = vec![BOS.to_owned(), BOS.to_owned()];
    p.extend(tokens.iter().cloned());
    p.push(EOS.to_owned());
    p
}

/// Window-multi correction by enumerating every multi-substitution sentence
/// and applying the gates to it directly: each window that changes must score
/// at least as well as the observed window and parse strictly better; the
/// summed window scores must beat the observed sum; the whole sentence must
/// parse strictly better than the observed one.
pub fn oracle_multi(
    tokens: &[String],
    toy: &Toy,
    grammar: &Grammar,
    params: &ChannelParams,
    d: usize,
    floor: f64,
) -> OracleAnswer {
    let obs = padded(tokens);
    let frag = |s: &[String]| {
        let real: Vec<&str> = s
            .iter()
            .map(String::as_str)
            .filter(|t| *t != BOS && *t != EOS)
            .collect();
        grammar.fragment_log_prob_or_floor(&real, floor)
    };
    let window_score = |cand: &[String], (start, a, b, end): (usize, usize, usize, usize)| {
        let lm = toy
            .model
            .span_log_prob([&obs[start], &obs[start + 1]], &cand[start + 2..end]);
        let mut ch = 0.0;
        for i in a..b {
            let set = toy.lexicon.spelling_variations(&cand[i]);
            ch += channel_log_prob(params, &cand[i], &obs[i], &set).expect("reachable");
        }
        lm + ch
    };
    let ws = windows(tokens.len(), d);
    let bases: Vec<f64> = ws.iter().map(|&w| window_score(&obs, w)).collect();
    let base_parses: Vec<f64> = ws.iter().map(|&(s, _, _, e)| frag(&obs[s..e])).collect();
    let base_total = bases.iter().fold(0.0, |acc, x| acc + x);
    let observed_parse = frag(&obs);

    let mut best = f64::NEG_INFINITY;
    let mut argmax: Vec<Vec<String>> = Vec::new();
    for cand in all_substitutions(tokens, &toy.lexicon).into_iter().skip(1) {
        let c = padded(&cand);
        let mut total = 0.0;
        let mut ok = true;
        for (k, &w) in ws.iter().enumerate() {
            let (start, a, b, end) = w;
            if c[a..b] == obs[a..b] {
                total += bases[k];
                continue;
            }
            // the window sees the observed text outside its span
            let mut local = obs.clone();
            local[a..b].clone_from_slice(&c[a..b]);
            let s = window_score(&local, w);
            if s < bases[k] || frag(&local[start..end]) <= base_parses[k] {
                ok = false;
                break;
            }
            total += s;
        }
        if !ok || total <= base_total || frag(&c) <= observed_parse {
            continue;
        }
        if total > best {
            best = total;
            argmax = vec![cand];
        } else if total == best {
            argmax.push(cand);
        }
    }
    if argmax.is_empty() {
        return OracleAnswer::unchanged(tokens);
    }
    OracleAnswer {
        best: argmax,
        gain: best - base_total,
    }
}
