//! Vocabulary and spelling-variation sets.
//!
//! The spelling variations of a word `w` are the vocabulary words reachable
//! from `w` by exactly one insertion, deletion, substitution or transposition
//! of two adjacent characters. Only tokens that contain a letter take part:
//! punctuation and bare numbers stay in the vocabulary for the language
//! model but are never variations, and have none.

use std::collections::{BTreeSet, HashMap};
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::par;

/// Index of a word in a [`Vocabulary`]; `id + 1` is its frequency rank.
pub type WordId = u32;

/// A closed, rank-ordered word list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, WordId>,
}

impl Vocabulary {
    /// Keeps the `size_limit` most frequent distinct tokens of `corpus`.
    /// Frequency ties go to the lexicographically smaller token.
    pub fn build<I, S>(corpus: I, size_limit: usize) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        if size_limit == 0 {
            return Err(Error::InvalidConfig(
                "vocabulary size must be at least 1".into(),
            ));
        }
        let mut counts: HashMap<String, u64> = HashMap::new();
        for tok in corpus {
            let tok = tok.as_ref();
            if tok.is_empty() {
                continue;
            }
            match counts.get_mut(tok) {
                Some(c) => *c += 1,
                None => {
                    counts.insert(tok.to_owned(), 1);
                }
            }
        }
        if counts.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        let mut ranked: Vec<(String, u64)> = counts.into_iter().collect();
        ranked.sort_unstable_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        ranked.truncate(size_limit);
        Self::from_ranked(ranked.into_iter().map(|(w, _)| w).collect())
    }

    /// Wraps an already ranked word list (most frequent first).
    pub fn from_ranked(words: Vec<String>) -> Result<Self> {
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if w.is_empty() || w.chars().any(char::is_whitespace) {
                return Err(Error::InvalidVocabulary(format!(
                    "bad word {w:?} at rank {}",
                    i + 1
                )));
            }
            if index.insert(w.clone(), i as WordId).is_some() {
                return Err(Error::InvalidVocabulary(format!("duplicate word {w:?}")));
            }
        }
        Ok(Self { words, index })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.index.contains_key(word)
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    /// Frequency rank, 1 for the most frequent word.
    pub fn rank(&self, word: &str) -> Option<usize> {
        self.id(word).map(|id| id as usize + 1)
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    /// Characters used anywhere in the vocabulary's words, sorted.
    pub fn alphabet(&self) -> Vec<char> {
        let set: BTreeSet<char> = self
            .words
            .iter()
            .filter(|w| is_word(w))
            .flat_map(|w| w.chars())
            .collect();
        set.into_iter().collect()
    }

    /// One word per line, most frequent first.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let mut words = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let word = line.trim_end_matches('\r');
            if word.is_empty() {
                return Err(Error::Format {
                    what: "vocabulary file",
                    line: i + 1,
                    msg: "empty line".into(),
                });
            }
            words.push(word.to_owned());
        }
        Self::from_ranked(words)
    }

    pub fn write<W: Write>(&self, mut writer: W) -> Result<()> {
        for w in &self.words {
            writeln!(writer, "{w}")?;
        }
        Ok(())
    }
}

/// The spelling-variation set of one word.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSet {
    pub source: String,
    /// Sorted lexicographically; never contains `source`.
    pub variations: Vec<String>,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.variations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.variations.is_empty()
    }

    pub fn contains(&self, word: &str) -> bool {
        self.variations
            .binary_search_by(|v| v.as_str().cmp(word))
            .is_ok()
    }
}

/// Whether `token` can have or be a spelling variation.
pub fn is_word(token: &str) -> bool {
    token.chars().any(char::is_alphabetic)
}

/// Every vocabulary word at edit distance exactly one from `word`.
///
/// The operation is total: `word` need not belong to `vocab`.
pub fn spelling_variations(word: &str, vocab: &Vocabulary) -> CandidateSet {
    let alphabet = vocab.alphabet();
    let mut ids = neighbour_ids(word, vocab, &alphabet);
    sort_by_word(&mut ids, vocab);
    CandidateSet {
        source: word.to_owned(),
        variations: ids
            .into_iter()
            .map(|id| vocab.word(id).to_owned())
            .collect(),
    }
}

fn neighbour_ids(word: &str, vocab: &Vocabulary, alphabet: &[char]) -> Vec<WordId> {
    let chars: Vec<char> = word.chars().collect();
    let n = chars.len();
    let mut found = Vec::new();
    let mut buf = String::with_capacity(word.len() + 4);
    if !is_word(word) {
        return found;
    }
    let mut probe = |cs: &mut dyn Iterator<Item = char>, found: &mut Vec<WordId>| {
        buf.clear();
        buf.extend(cs);
        if buf != word && is_word(&buf) {
            if let Some(id) = vocab.id(&buf) {
                found.push(id);
            }
        }
    };

    for i in 0..n {
        // deletion
        probe(
            &mut chars[..i].iter().chain(&chars[i + 1..]).copied(),
            &mut found,
        );
        // transposition
        if i + 1 < n && chars[i] != chars[i + 1] {
            let swapped = [chars[i + 1], chars[i]];
            probe(
                &mut chars[..i]
                    .iter()
                    .chain(&swapped)
                    .chain(&chars[i + 2..])
                    .copied(),
                &mut found,
            );
        }
        // substitution
        for &c in alphabet {
            if c != chars[i] {
                probe(
                    &mut chars[..i]
                        .iter()
                        .chain(std::iter::once(&c))
                        .chain(&chars[i + 1..])
                        .copied(),
                    &mut found,
                );
            }
        }
    }
    // insertion
    for i in 0..=n {
        for &c in alphabet {
            probe(
                &mut chars[..i]
                    .iter()
                    .chain(std::iter::once(&c))
                    .chain(&chars[i..])
                    .copied(),
                &mut found,
            );
        }
    }
    found
}

fn sort_by_word(ids: &mut Vec<WordId>, vocab: &Vocabulary) {
    ids.sort_unstable_by(|&a, &b| vocab.word(a).cmp(vocab.word(b)));
    ids.dedup();
}

/// A vocabulary with every word's spelling variations precomputed.
#[derive(Debug, Clone)]
pub struct Lexicon {
    vocab: Vocabulary,
    alphabet: Vec<char>,
    variations: Vec<Vec<WordId>>,
}

impl Lexicon {
    pub fn new(vocab: Vocabulary) -> Self {
        let alphabet = vocab.alphabet();
        let variations = par::map(vocab.words(), |w| {
            let mut ids = neighbour_ids(w, &vocab, &alphabet);
            sort_by_word(&mut ids, &vocab);
            ids
        });
        Self {
            vocab,
            alphabet,
            variations,
        }
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn alphabet(&self) -> &[char] {
        &self.alphabet
    }

    /// Variations of a vocabulary word, sorted by spelling.
    pub fn variations(&self, id: WordId) -> &[WordId] {
        &self.variations[id as usize]
    }

    pub fn variation_count(&self, id: WordId) -> usize {
        self.variations[id as usize].len()
    }

    pub fn spelling_variations(&self, word: &str) -> CandidateSet {
        let ids = match self.vocab.id(word) {
            Some(id) => self.variations[id as usize].clone(),
            None => {
                let mut ids = neighbour_ids(word, &self.vocab, &self.alphabet);
                sort_by_word(&mut ids, &self.vocab);
                ids
            }
        };
        CandidateSet {
            source: word.to_owned(),
            variations: ids
                .into_iter()
                .map(|id| self.vocab.word(id).to_owned())
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vocab(words: &[&str]) -> Vocabulary {
        Vocabulary::from_ranked(words.iter().map(|w| w.to_string()).collect()).unwrap()
    }

    #[test]
    fn build_ranks_by_frequency() {
        let v = Vocabulary::build("a b a c b a".split(' '), 2).unwrap();
        assert_eq!(v.words(), ["a", "b"]);
        assert_eq!(v.rank("a"), Some(1));
        assert_eq!(v.rank("b"), Some(2));
        assert_eq!(v.rank("c"), None);
    }

    #[test]
    fn build_with_fewer_types_than_limit() {
        let v = Vocabulary::build(["x"], 5).unwrap();
        assert_eq!(v.words(), ["x"]);
    }

    #[test]
    fn build_breaks_ties_lexicographically() {
        let v = Vocabulary::build("d c b a".split(' '), 3).unwrap();
        assert_eq!(v.words(), ["a", "b", "c"]);
    }

    #[test]
    fn build_rejects_empty_corpus() {
        let err = Vocabulary::build(Vec::<&str>::new(), 1).unwrap_err();
        assert_eq!(err.to_string(), "empty corpus");
        assert!(Vocabulary::build("".split_whitespace(), 1).is_err());
    }

    #[test]
    fn rejects_duplicates_and_whitespace() {
        assert!(Vocabulary::from_ranked(vec!["a".into(), "a".into()]).is_err());
        assert!(Vocabulary::from_ranked(vec!["a b".into()]).is_err());
        assert!(Vocabulary::from_ranked(vec!["".into()]).is_err());
    }

    #[test]
    fn variations_of_the() {
        let v = vocab(&["the", "them", "they", "he"]);
        // "they" is "the" plus one inserted letter, so it is a variation too.
        let set = spelling_variations("the", &v);
        assert_eq!(set.variations, ["he", "them", "they"]);
    }

    #[test]
    fn aim_reaches_aid() {
        let v = vocab(&["aid", "aim", "hit"]);
        let set = spelling_variations("aim", &v);
        assert!(set.contains("aid"));
        assert!(!set.contains("hit"));
    }

    #[test]
    fn punctuation_and_numbers_are_not_words() {
        let v = vocab(&["a", ",", "i", "1", "2", "2a"]);
        assert_eq!(spelling_variations("a", &v).variations, ["2a", "i"]);
        assert!(spelling_variations("1", &v).is_empty());
        assert!(Lexicon::new(v).spelling_variations(",").is_empty());
    }

    #[test]
    fn empty_vocab_gives_empty_set() {
        let v = Vocabulary::from_ranked(Vec::new()).unwrap();
        assert!(spelling_variations("anything", &v).is_empty());
    }

    #[test]
    fn transposition_and_case_of_repeated_letters() {
        let v = vocab(&["form", "from", "too", "to"]);
        assert_eq!(spelling_variations("form", &v).variations, ["from"]);
        assert_eq!(spelling_variations("to", &v).variations, ["too"]);
    }

    #[test]
    fn lexicon_matches_free_function() {
        let v = vocab(&["the", "them", "then", "he", "hen", "ten", "tea", "a"]);
        let lex = Lexicon::new(v.clone());
        for w in v.words() {
            assert_eq!(lex.spelling_variations(w), spelling_variations(w, &v));
        }
        assert_eq!(
            lex.spelling_variations("thex"),
            spelling_variations("thex", &v)
        );
    }

    #[test]
    fn file_round_trip() {
        let v = vocab(&["the", "of", "aid"]);
        let mut buf = Vec::new();
        v.write(&mut buf).unwrap();
        assert_eq!(buf, b"the\nof\naid\n");
        let back = Vocabulary::read(&buf[..]).unwrap();
        assert_eq!(back, v);
    }
}
