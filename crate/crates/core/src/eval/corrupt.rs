//! Synthetic real-word error injection.
//!
//! Every eligible word is replaced, independently and with probability
//! `1 - alpha`, by one of its spelling variations chosen uniformly. Random
//! draws come from ChaCha8 seeded with `seed`; sentence `i` uses stream `i`, so
//! the output does not depend on how sentences are scheduled across threads.
//! Each eligible word consumes one `f64` draw, and a replaced word one more
//! `gen_range` draw for the variation index.

use std::collections::HashSet;
use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::par;
use crate::text::detokenize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TestSet {
    /// Any vocabulary word may be corrupted.
    S62000,
    /// Only words whose base form is a noun.
    Malp,
}

impl TestSet {
    pub fn name(self) -> &'static str {
        match self {
            TestSet::S62000 => "S62000",
            TestSet::Malp => "MALP",
        }
    }
}

impl fmt::Display for TestSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TestSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "s62000" => Ok(TestSet::S62000),
            "malp" => Ok(TestSet::Malp),
            _ => Err(Error::InvalidConfig(format!(
                "unknown test set {s:?} (expected S62000 or MALP)"
            ))),
        }
    }
}

/// Words that count as nouns for the MALP test set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NounLexicon {
    words: HashSet<String>,
}

impl NounLexicon {
    pub fn from_words<I: IntoIterator<Item = S>, S: AsRef<str>>(words: I) -> Self {
        Self {
            words: words
                .into_iter()
                .map(|w| w.as_ref().to_lowercase())
                .filter(|w| !w.is_empty())
                .collect(),
        }
    }

    /// One noun per line; blank lines and `#` comments are skipped.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut words = Vec::new();
        for line in reader.lines() {
            let line = line?;
            let w = line.trim();
            if !w.is_empty() && !w.starts_with('#') {
                words.push(w.to_owned());
            }
        }
        Ok(Self::from_words(words))
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The word itself or, failing that, the word without a final `s` is listed.
    pub fn has_noun_base(&self, word: &str) -> bool {
        self.words.contains(word)
            || word
                .strip_suffix('s')
                .is_some_and(|b| self.words.contains(b))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionSpec {
    pub alpha: f64,
    pub test_set: TestSet,
    pub seed: u64,
    pub nouns: Option<NounLexicon>,
}

impl CorruptionSpec {
    pub fn new(
        alpha: f64,
        test_set: TestSet,
        seed: u64,
        nouns: Option<NounLexicon>,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "corruption alpha must lie in (0, 1), got {alpha}"
            )));
        }
        if test_set == TestSet::Malp && nouns.as_ref().is_none_or(NounLexicon::is_empty) {
            return Err(Error::InvalidConfig(
                "the MALP test set needs a non-empty noun list".into(),
            ));
        }
        Ok(Self {
            alpha,
            test_set,
            seed,
            nouns,
        })
    }

    pub fn is_eligible(&self, word: &str, lexicon: &Lexicon) -> bool {
        let Some(id) = lexicon.vocab().id(word) else {
            return false;
        };
        if lexicon.variation_count(id) == 0 {
            return false;
        }
        match self.test_set {
            TestSet::S62000 => true,
            TestSet::Malp => self.nouns.as_ref().is_some_and(|n| n.has_noun_base(word)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Injection {
    pub position: usize,
    pub intended: String,
    pub error: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptedSentence {
    pub original: Vec<String>,
    pub corrupted: Vec<String>,
    /// Sorted by position.
    pub injected: Vec<Injection>,
}

impl CorruptedSentence {
    pub fn is_injected(&self, position: usize) -> Option<&Injection> {
        self.injected
            .binary_search_by_key(&position, |i| i.position)
            .ok()
            .map(|k| &self.injected[k])
    }
}

pub fn corrupt_one<S: AsRef<str>>(
    sentence: &[S],
    index: usize,
    spec: &CorruptionSpec,
    lexicon: &Lexicon,
) -> CorruptedSentence {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(index as u64);
    let original: Vec<String> = sentence.iter().map(|t| t.as_ref().to_owned()).collect();
    let mut corrupted = original.clone();
    let mut injected = Vec::new();
    for (pos, word) in original.iter().enumerate() {
        if !spec.is_eligible(word, lexicon) {
            continue;
        }
        if rng.gen::<f64>() < 1.0 - spec.alpha {
            let id = lexicon
                .vocab()
                .id(word)
                .expect("eligible words are in the vocabulary");
            let vars = lexicon.variations(id);
            let error = lexicon
                .vocab()
                .word(vars[rng.gen_range(0..vars.len())])
                .to_owned();
            corrupted[pos] = error.clone();
            injected.push(Injection {
                position: pos,
                intended: word.clone(),
                error,
            });
        }
    }
    CorruptedSentence {
        original,
        corrupted,
        injected,
    }
}

/// Corrupts every sentence; deterministic in `spec.seed`.
pub fn corrupt<S: AsRef<str> + Sync>(
    sentences: &[Vec<S>],
    spec: &CorruptionSpec,
    lexicon: &Lexicon,
) -> Vec<CorruptedSentence> {
    par::map_indexed(sentences, |i, s| corrupt_one(s, i, spec, lexicon))
}

/// `original<TAB>corrupted<TAB>pos:intended:error;...`, one sentence per line.
pub fn write_corrupted<W: Write>(sentences: &[CorruptedSentence], mut w: W) -> Result<()> {
    for s in sentences {
        let inj: Vec<String> = s
            .injected
            .iter()
            .map(|i| format!("{}:{}:{}", i.position, i.intended, i.error))
            .collect();
        writeln!(
            w,
            "{}\t{}\t{}",
            detokenize(&s.original),
            detokenize(&s.corrupted),
            inj.join(";")
        )?;
    }
    Ok(())
}

pub fn read_corrupted<R: BufRead>(reader: R) -> Result<Vec<CorruptedSentence>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = i + 1;
        let err = |msg: String| Error::Format {
            what: "corrupted test set",
            line: lineno,
            msg,
        };
        let line = line.trim_end_matches('\r');
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(err(format!(
                "expected 3 tab-separated fields, found {}",
                fields.len()
            )));
        }
        let original: Vec<String> = fields[0].split_whitespace().map(str::to_owned).collect();
        let corrupted: Vec<String> = fields[1].split_whitespace().map(str::to_owned).collect();
        if original.len() != corrupted.len() {
            return Err(err(
                "original and corrupted sentences differ in length".into()
            ));
        }
        let injected = parse_injections(fields[2], &original, &corrupted).map_err(err)?;
        let mut expected = original.clone();
        for inj in &injected {
            expected[inj.position] = inj.error.clone();
        }
        if expected != corrupted {
            return Err(err("injections do not account for every difference".into()));
        }
        out.push(CorruptedSentence {
            original,
            corrupted,
            injected,
        });
    }
    Ok(out)
}

/// Words may themselves contain `:` or `;`, so each triple is read by
/// position: the words are taken from the two sentences and checked against
/// the text.
fn parse_injections(
    mut text: &str,
    original: &[String],
    corrupted: &[String],
) -> std::result::Result<Vec<Injection>, String> {
    let mut out: Vec<Injection> = Vec::new();
    while !text.is_empty() {
        let digits = text
            .find(|c: char| !c.is_ascii_digit())
            .unwrap_or(text.len());
        let position: usize = text[..digits]
            .parse()
            .map_err(|_| format!("bad injection list near {text:?}"))?;
        if position >= original.len() {
            return Err(format!(
                "injection position {position} is past the end of the sentence"
            ));
        }
        if out.last().is_some_and(|l| l.position >= position) {
            return Err("injection positions must increase".into());
        }
        let (intended, error) = (&original[position], &corrupted[position]);
        let expect = format!(":{intended}:{error}");
        let rest = &text[digits..];
        if !rest.starts_with(&expect) {
            return Err(format!(
                "injection at {position} should read {position}{expect}"
            ));
        }
        text = &rest[expect.len()..];
        if let Some(r) = text.strip_prefix(';') {
            text = r;
            if text.is_empty() {
                return Err("trailing ';' in injection list".into());
            }
        } else if !text.is_empty() {
            return Err(format!("expected ';' before {text:?}"));
        }
        out.push(Injection {
            position,
            intended: intended.clone(),
            error: error.clone(),
        });
    }
    Ok(out)
}
