//! Public-domain English prose for training and held-out evaluation.
//!
//! The bundled text is 233 annual presidential addresses (1790 to 2021),
//! roughly 1.8 million words. [`sentences`] splits them into sentences in
//! chronological order, and [`Split`] deals those into a training and a test
//! portion without randomness.

pub mod shallow;
pub mod tagger;

use std::io::Read;

use flate2::read::GzDecoder;

const BUNDLED: &[u8] = include_bytes!("../data/sotu.tsv.gz");

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Address {
    /// `<year>_<president>_<party>`.
    pub id: String,
    pub year: u16,
    pub text: String,
}

/// Every bundled address, oldest first.
pub fn addresses() -> Vec<Address> {
    let mut raw = String::new();
    GzDecoder::new(BUNDLED)
        .read_to_string(&mut raw)
        .expect("bundled corpus is valid gzip and UTF-8");
    raw.lines()
        .map(|line| {
            let (id, text) = line
                .split_once('\t')
                .expect("bundled corpus line has a tab");
            let year = id[..4].parse().expect("bundled id starts with a year");
            Address {
                id: id.to_owned(),
                year,
                text: text.to_owned(),
            }
        })
        .collect()
}

/// Tokens that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "messrs", "dr", "st", "gen", "col", "capt", "lieut", "maj", "hon", "jr",
    "sr", "rev", "no", "nos", "vs", "viz", "etc", "ft", "mt", "co", "art", "sec", "ch", "vol",
    "jan", "feb", "aug", "sept", "oct", "nov", "dec",
];

fn is_abbreviation(word: &str) -> bool {
    let w = word.trim_start_matches(|c: char| !c.is_alphanumeric());
    let letters: String = w.chars().filter(|c| *c != '.').collect();
    if letters.chars().count() == 1 && letters.chars().all(char::is_alphabetic) {
        return true;
    }
    // U.S., D.C., A.D.
    if w.contains('.') && w.split('.').all(|p| p.chars().count() <= 1) {
        return true;
    }
    ABBREVIATIONS.contains(&letters.to_lowercase().as_str())
}

/// Splits prose into sentences at `.`, `?` or `!` (optionally followed by
/// closing quotes or brackets) when the next word starts with an uppercase
/// letter, a digit or an opening quote. A period after a known abbreviation
/// or a single initial does not end a sentence.
pub fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let words: Vec<(usize, &str)> = text
        .split(' ')
        .scan(0usize, |pos, w| {
            let start = *pos;
            *pos += w.len() + 1;
            Some((start, w))
        })
        .filter(|(_, w)| !w.is_empty())
        .collect();
    let mut start = None;
    for (i, &(pos, word)) in words.iter().enumerate() {
        let s = *start.get_or_insert(pos);
        let core = word.trim_end_matches(['"', '\'', ')', ']', '\u{201d}', '\u{2019}']);
        let terminal =
            core.ends_with(['?', '!']) || (core.ends_with('.') && !is_abbreviation(core));
        let next_opens = words.get(i + 1).is_none_or(|&(_, n)| {
            n.chars().next().is_some_and(|c| {
                c.is_uppercase() || c.is_ascii_digit() || "\"'(\u{201c}\u{2018}".contains(c)
            })
        });
        if terminal && next_opens {
            out.push(text[s..pos + word.len()].trim());
            start = None;
        }
    }
    if let Some(s) = start {
        let rest = text[s..].trim();
        if !rest.is_empty() {
            out.push(rest);
        }
    }
    out
}

/// Every sentence of every address, in order. Rows of the budget tables
/// printed in some addresses (runs of leader dots) are left out.
pub fn sentences() -> Vec<String> {
    addresses()
        .iter()
        .flat_map(|a| {
            split_sentences(&a.text)
                .into_iter()
                .filter(|s| !s.contains("...."))
                .map(str::to_owned)
                .collect::<Vec<_>>()
        })
        .collect()
}

/// A deterministic train/test split. `test_size` of the sentences that
/// `accept` are taken as test sentences, spread evenly over the whole
/// sequence; everything else is training text. When fewer sentences are
/// accepted, all of them go to the test side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Split {
    pub train: Vec<String>,
    pub test: Vec<String>,
}

impl Split {
    pub fn new(sentences: Vec<String>, test_size: usize, accept: impl Fn(&str) -> bool) -> Self {
        let accepted: Vec<bool> = sentences.iter().map(|s| accept(s)).collect();
        let q = accepted.iter().filter(|&&a| a).count();
        let take = test_size.min(q);
        let mut train = Vec::with_capacity(sentences.len() - take);
        let mut test = Vec::with_capacity(take);
        let mut k = 0;
        for (s, a) in sentences.into_iter().zip(accepted) {
            // the k-th accepted sentence is a test sentence when the running
            // quota take * k / q steps up
            if a && (k + 1) * take / q > k * take / q {
                test.push(s);
            } else {
                train.push(s);
            }
            k += usize::from(a);
        }
        Self { train, test }
    }
}
