//! Probabilistic context-free grammar: induction from a treebank, a text
//! file format, and CKY Viterbi scoring.
//!
//! Grammars are kept in Chomsky normal form: binary rules `A -> B C` and
//! lexical rules `A -> word`. Unary chains in the treebank are collapsed into
//! compound labels (`NP+PRP`) and wider nodes are binarized with intermediate
//! symbols named after the children they still have to produce
//! (`@VP[NP,PP]`). Each intermediate symbol has exactly one expansion, so the
//! probability of every original derivation is unchanged.
//!
//! Besides rule probabilities a grammar carries two distributions over
//! labels: how often each label roots a whole tree (used for full sentences)
//! and how often each label occurs as a constituent at all (used to score
//! fragments as sequences of adjacent constituents).

mod cky;
pub mod tree;

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::LN_10;
use std::io::{BufRead, Write};

pub use cky::{Chart, Parser};
pub use tree::{read_treebank, Tree};

use crate::error::{Error, Result};

pub type Sym = u32;

/// Log probability assigned to unparseable input by the `_or_floor` helpers.
pub const DEFAULT_PARSE_FLOOR: f64 = -1e9;

pub const UNKNOWN_WORD: &str = "<unk>";
const ROOT_LHS: &str = "<ROOT>";
const CHUNK_LHS: &str = "<FRAG>";
const ARROW: &str = "→";

#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    Binary(String, String),
    Word(String),
    /// Emission of any word the grammar has not seen. Scored apart from the
    /// ordinary rules: its probability is the share of the left-hand side's
    /// occurrences that produced a word seen only once in training, and it
    /// does not count toward the left-hand side's rule total.
    Unknown,
}

/// A rule in canonical (file) form with a base-10 log probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub lhs: String,
    pub rhs: Rhs,
    pub log10_prob: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinaryRule {
    pub lhs: Sym,
    pub left: Sym,
    pub right: Sym,
    pub log_prob: f64,
}

/// Result of parsing a whole sentence from a root label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParseResult {
    pub parseable: bool,
    /// Natural log; negative infinity when not parseable.
    pub viterbi_log_prob: f64,
}

#[derive(Debug, Clone)]
pub struct Grammar {
    rules: Vec<Rule>,
    roots: Vec<(String, f64)>,
    chunks: Vec<(String, f64)>,

    symbols: Vec<String>,
    index: HashMap<String, Sym>,
    start: Sym,
    binary: Vec<BinaryRule>,
    by_left: Vec<Vec<(Sym, Sym, f64)>>,
    lexical: HashMap<String, Vec<(Sym, f64)>>,
    unknown: Vec<(Sym, f64)>,
    root_ln: Vec<f64>,
    chunk_ln: Vec<f64>,
}

impl PartialEq for Grammar {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.roots == other.roots && self.chunks == other.chunks
    }
}

impl Grammar {
    /// Builds a grammar from canonical rules. `roots` and `chunks` give base-10
    /// log probabilities of labels as whole-sentence roots and as fragment
    /// constituents.
    pub fn from_parts(
        mut rules: Vec<Rule>,
        mut roots: Vec<(String, f64)>,
        mut chunks: Vec<(String, f64)>,
    ) -> Result<Self> {
        if roots.is_empty() {
            return Err(Error::InvalidConfig(
                "a grammar needs at least one root label".into(),
            ));
        }
        let rhs_key = |r: &Rhs| match r {
            Rhs::Binary(b, c) => (0u8, b.clone(), c.clone()),
            Rhs::Word(w) => (1, w.clone(), String::new()),
            Rhs::Unknown => (2, String::new(), String::new()),
        };
        rules.sort_by(|a, b| {
            a.lhs
                .cmp(&b.lhs)
                .then_with(|| rhs_key(&a.rhs).cmp(&rhs_key(&b.rhs)))
        });
        for pair in rules.windows(2) {
            if pair[0].lhs == pair[1].lhs && pair[0].rhs == pair[1].rhs {
                return Err(Error::InvalidConfig(format!(
                    "duplicate rule for {}",
                    pair[0].lhs
                )));
            }
        }
        roots.sort_by(|a, b| a.0.cmp(&b.0));
        chunks.sort_by(|a, b| a.0.cmp(&b.0));

        let mut names: Vec<&str> = Vec::new();
        for r in &rules {
            names.push(&r.lhs);
            if let Rhs::Binary(b, c) = &r.rhs {
                names.push(b);
                names.push(c);
            }
        }
        names.extend(roots.iter().map(|(s, _)| s.as_str()));
        names.extend(chunks.iter().map(|(s, _)| s.as_str()));
        names.sort_unstable();
        names.dedup();
        let symbols: Vec<String> = names.into_iter().map(str::to_owned).collect();
        let index: HashMap<String, Sym> = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| (s.clone(), i as Sym))
            .collect();

        let mut binary = Vec::new();
        let mut lexical: BTreeMap<String, Vec<(Sym, f64)>> = BTreeMap::new();
        let mut unknown = Vec::new();
        for r in &rules {
            let lhs = index[&r.lhs];
            let lp = r.log10_prob * LN_10;
            if r.log10_prob > 0.0 || r.log10_prob.is_nan() {
                return Err(Error::InvalidConfig(format!(
                    "rule for {} has log-probability {}",
                    r.lhs, r.log10_prob
                )));
            }
            match &r.rhs {
                Rhs::Binary(b, c) => binary.push(BinaryRule {
                    lhs,
                    left: index[b],
                    right: index[c],
                    log_prob: lp,
                }),
                Rhs::Word(w) => lexical.entry(w.clone()).or_default().push((lhs, lp)),
                Rhs::Unknown => unknown.push((lhs, lp)),
            }
        }
        let mut by_left = vec![Vec::new(); symbols.len()];
        for r in &binary {
            by_left[r.left as usize].push((r.right, r.lhs, r.log_prob));
        }
        let mut root_ln = vec![f64::NEG_INFINITY; symbols.len()];
        for (s, p) in &roots {
            root_ln[index[s] as usize] = p * LN_10;
        }
        let mut chunk_ln = vec![f64::NEG_INFINITY; symbols.len()];
        for (s, p) in &chunks {
            chunk_ln[index[s] as usize] = p * LN_10;
        }
        // most probable root; ties go to the smaller name
        let start = roots
            .iter()
            .fold(None::<&(String, f64)>, |best, r| match best {
                Some(b) if b.1 >= r.1 => Some(b),
                _ => Some(r),
            })
            .map(|(s, _)| index[s])
            .expect("roots is non-empty");

        Ok(Self {
            rules,
            roots,
            chunks,
            symbols,
            index,
            start,
            binary,
            by_left,
            lexical: lexical.into_iter().collect(),
            unknown,
            root_ln,
            chunk_ln,
        })
    }

    /// Relative-frequency estimate from a treebank.
    pub fn induce(trees: &[Tree]) -> Result<Self> {
        if trees.is_empty() {
            return Err(Error::EmptyTreebank);
        }
        let mut counts = InductionCounts::default();
        for tree in trees {
            if let Some(t) = tree::normalize(tree) {
                counts.add_tree(&t);
            }
        }
        if counts.trees == 0 {
            return Err(Error::EmptyTreebank);
        }
        counts.into_grammar()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn symbol(&self, name: &str) -> Option<Sym> {
        self.index.get(name).copied()
    }

    pub fn start(&self) -> &str {
        &self.symbols[self.start as usize]
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn binary_rules(&self) -> &[BinaryRule] {
        &self.binary
    }

    /// `(lhs, ln p)` pairs that can produce `word`, falling back to the
    /// unknown-word emissions for unseen words.
    pub fn lexical_entries(&self, word: &str) -> &[(Sym, f64)] {
        match self.lexical.get(word) {
            Some(e) => e,
            None => &self.unknown,
        }
    }

    pub fn knows_word(&self, word: &str) -> bool {
        self.lexical.contains_key(word)
    }

    pub fn root_log_prob(&self, sym: Sym) -> f64 {
        self.root_ln[sym as usize]
    }

    pub fn chunk_log_prob(&self, sym: Sym) -> f64 {
        self.chunk_ln[sym as usize]
    }

    pub(crate) fn by_left(&self, sym: Sym) -> &[(Sym, Sym, f64)] {
        &self.by_left[sym as usize]
    }

    pub fn parser(&self) -> Parser<'_> {
        Parser::new(self)
    }

    /// Best derivation of the whole sentence from any root label.
    pub fn viterbi_parse<S: AsRef<str>>(&self, tokens: &[S]) -> ParseResult {
        self.parser().viterbi_parse(tokens)
    }

    pub fn parse_log_prob_or_floor<S: AsRef<str>>(&self, tokens: &[S], floor: f64) -> f64 {
        let r = self.viterbi_parse(tokens);
        if r.parseable {
            r.viterbi_log_prob
        } else {
            floor
        }
    }

    /// Best segmentation of `tokens` into adjacent constituents; see
    /// [`Parser::fragment_log_prob`].
    pub fn fragment_log_prob<S: AsRef<str>>(&self, tokens: &[S]) -> Option<f64> {
        self.parser().fragment_log_prob(tokens)
    }

    pub fn fragment_log_prob_or_floor<S: AsRef<str>>(&self, tokens: &[S], floor: f64) -> f64 {
        self.fragment_log_prob(tokens).unwrap_or(floor)
    }

    /// `LHS → RHS1 [RHS2]<TAB>log10-prob`, one rule per line. Root and
    /// fragment distributions use the reserved left-hand sides `<ROOT>` and
    /// `<FRAG>`; unknown-word emissions have the right-hand side `<unk>`.
    pub fn write<W: Write>(&self, mut w: W) -> Result<()> {
        for (s, p) in &self.roots {
            writeln!(w, "{ROOT_LHS} {ARROW} {s}\t{p}")?;
        }
        for (s, p) in &self.chunks {
            writeln!(w, "{CHUNK_LHS} {ARROW} {s}\t{p}")?;
        }
        for r in &self.rules {
            match &r.rhs {
                Rhs::Binary(b, c) => writeln!(w, "{} {ARROW} {b} {c}\t{}", r.lhs, r.log10_prob)?,
                Rhs::Word(x) => writeln!(w, "{} {ARROW} {x}\t{}", r.lhs, r.log10_prob)?,
                Rhs::Unknown => writeln!(w, "{} {ARROW} {UNKNOWN_WORD}\t{}", r.lhs, r.log10_prob)?,
            }
        }
        Ok(())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let err = |line: usize, msg: String| Error::Format {
            what: "grammar file",
            line,
            msg,
        };
        let mut rules = Vec::new();
        let mut roots = Vec::new();
        let mut chunks = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let (rule, prob) = line
                .split_once('\t')
                .ok_or_else(|| err(lineno, "missing tab before the probability".into()))?;
            let log10_prob: f64 = prob
                .parse()
                .map_err(|e| err(lineno, format!("bad probability: {e}")))?;
            let parts: Vec<&str> = rule.split(' ').collect();
            if parts.len() < 3 || parts.len() > 4 || parts[1] != ARROW {
                return Err(err(
                    lineno,
                    format!("expected `LHS {ARROW} RHS [RHS]`, got {rule:?}"),
                ));
            }
            let lhs = parts[0].to_owned();
            match (lhs.as_str(), &parts[2..]) {
                (ROOT_LHS, [s]) => roots.push(((*s).to_owned(), log10_prob)),
                (CHUNK_LHS, [s]) => chunks.push(((*s).to_owned(), log10_prob)),
                (ROOT_LHS | CHUNK_LHS, _) => {
                    return Err(err(lineno, "distribution lines take one label".into()))
                }
                (_, [w]) if *w == UNKNOWN_WORD => rules.push(Rule {
                    lhs,
                    rhs: Rhs::Unknown,
                    log10_prob,
                }),
                (_, [w]) => rules.push(Rule {
                    lhs,
                    rhs: Rhs::Word((*w).to_owned()),
                    log10_prob,
                }),
                (_, [b, c]) => rules.push(Rule {
                    lhs,
                    rhs: Rhs::Binary((*b).to_owned(), (*c).to_owned()),
                    log10_prob,
                }),
                _ => unreachable!(),
            }
        }
        Self::from_parts(rules, roots, chunks)
    }
}

fn intermediate_label(parent: &str, rest: &[&str]) -> String {
    format!("@{parent}[{}]", rest.join(","))
}

#[derive(Default)]
struct InductionCounts {
    trees: u64,
    roots: BTreeMap<String, u64>,
    labels: BTreeMap<String, u64>,
    binary: BTreeMap<(String, String, String), u64>,
    lexical: BTreeMap<(String, String), u64>,
    words: HashMap<String, u64>,
}

impl InductionCounts {
    fn add_tree(&mut self, tree: &Tree) {
        self.trees += 1;
        *self.roots.entry(tree.label().to_owned()).or_default() += 1;
        self.add_node(tree);
    }

    fn add_node(&mut self, node: &Tree) {
        let Tree::Node { label, children } = node else {
            return;
        };
        *self.labels.entry(label.clone()).or_default() += 1;
        if let [Tree::Leaf(w)] = children.as_slice() {
            *self.lexical.entry((label.clone(), w.clone())).or_default() += 1;
            *self.words.entry(w.clone()).or_default() += 1;
            return;
        }
        let kids: Vec<&str> = children.iter().map(Tree::label).collect();
        // normalize() leaves no unary nonterminal nodes
        debug_assert!(kids.len() >= 2);
        let mut lhs = label.clone();
        let mut rest = &kids[..];
        while rest.len() > 2 {
            let next = intermediate_label(label, &rest[1..]);
            *self
                .binary
                .entry((lhs, rest[0].to_owned(), next.clone()))
                .or_default() += 1;
            lhs = next;
            rest = &rest[1..];
        }
        *self
            .binary
            .entry((lhs, rest[0].to_owned(), rest[1].to_owned()))
            .or_default() += 1;
        for c in children {
            self.add_node(c);
        }
    }

    fn into_grammar(self) -> Result<Grammar> {
        let mut lhs_total: BTreeMap<&str, u64> = BTreeMap::new();
        let mut singletons: BTreeMap<&str, u64> = BTreeMap::new();
        for ((a, _, _), c) in &self.binary {
            *lhs_total.entry(a).or_default() += c;
        }
        for ((a, w), c) in &self.lexical {
            *lhs_total.entry(a).or_default() += c;
            if self.words[w] == 1 {
                *singletons.entry(a).or_default() += c;
            }
        }
        let denom = |a: &str| lhs_total[a] as f64;

        let mut rules = Vec::new();
        for ((a, b, c), n) in &self.binary {
            rules.push(Rule {
                lhs: a.clone(),
                rhs: Rhs::Binary(b.clone(), c.clone()),
                log10_prob: (*n as f64 / denom(a)).log10(),
            });
        }
        for ((a, w), n) in &self.lexical {
            rules.push(Rule {
                lhs: a.clone(),
                rhs: Rhs::Word(w.clone()),
                log10_prob: (*n as f64 / denom(a)).log10(),
            });
        }
        for (a, s) in &singletons {
            rules.push(Rule {
                lhs: (*a).to_owned(),
                rhs: Rhs::Unknown,
                log10_prob: (*s as f64 / denom(a)).log10(),
            });
        }
        let roots = self
            .roots
            .iter()
            .map(|(s, n)| (s.clone(), (*n as f64 / self.trees as f64).log10()))
            .collect();
        let total_labels: u64 = self.labels.values().sum();
        let chunks = self
            .labels
            .iter()
            .map(|(s, n)| (s.clone(), (*n as f64 / total_labels as f64).log10()))
            .collect();
        Grammar::from_parts(rules, roots, chunks)
    }
}
