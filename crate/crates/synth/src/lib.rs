//! Seeded generator of English-like sentences with Penn-style parse trees.
//!
//! Sentences come from a small hand-written phrase-structure grammar with
//! subject-verb agreement, `a`/`an` selection, prepositional and clausal
//! attachment, and coordination. Open-class words are drawn by corpus
//! frequency from a bundled tagged word list; closed-class words are listed
//! below. The same seed always yields the same sentences.

use std::collections::BTreeMap;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const BUNDLED: &str = include_str!("../data/lexicon.tsv");

const DT_SG: &[(&str, u32)] = &[
    ("the", 80030),
    ("a", 21155),
    ("this", 4063),
    ("that", 12512),
    ("no", 2348),
    ("any", 1204),
    ("every", 650),
    ("each", 411),
    ("another", 841),
];
const DT_PL: &[(&str, u32)] = &[
    ("the", 80030),
    ("these", 1231),
    ("those", 1201),
    ("some", 1536),
    ("all", 4144),
    ("no", 2348),
    ("both", 529),
];
const PRP_SG: &[(&str, u32)] = &[("he", 12401), ("she", 3946), ("it", 10681)];
const PRP_PL: &[(&str, u32)] = &[("they", 3938), ("we", 1906), ("i", 7687), ("you", 5622)];
const PRP_OBJ: &[(&str, u32)] = &[
    ("him", 5230),
    ("her", 5284),
    ("them", 2241),
    ("us", 684),
    ("me", 1920),
];
const PRP_POSS: &[(&str, u32)] = &[
    ("his", 10034),
    ("their", 2955),
    ("its", 1635),
    ("our", 1066),
    ("my", 2249),
    ("your", 1279),
];
const IN: &[(&str, u32)] = &[
    ("of", 40025),
    ("in", 22050),
    ("for", 6941),
    ("on", 6643),
    ("with", 9740),
    ("at", 6791),
    ("by", 6738),
    ("from", 5709),
    ("about", 1497),
    ("into", 2124),
    ("over", 1282),
    ("after", 1504),
    ("under", 963),
    ("between", 654),
    ("through", 815),
    ("against", 660),
    ("during", 503),
    ("without", 1015),
    ("before", 1363),
    ("around", 271),
    ("across", 222),
    ("near", 293),
];
const MD: &[(&str, u32)] = &[
    ("will", 1577),
    ("would", 1953),
    ("could", 1700),
    ("should", 1297),
    ("may", 2551),
    ("might", 536),
    ("can", 1095),
    ("must", 955),
];
const CC: &[(&str, u32)] = &[("and", 38313), ("but", 5653), ("or", 5352)];
const VBP_EXTRA: &[(&str, u32)] = &[("are", 3000), ("have", 3500)];

/// Words grouped by part-of-speech tag, each with a sampling weight.
#[derive(Debug, Clone)]
pub struct TaggedLexicon {
    tags: BTreeMap<String, Pool>,
}

#[derive(Debug, Clone)]
struct Pool {
    words: Vec<String>,
    weights: Vec<u32>,
    dist: WeightedIndex<u32>,
}

impl Pool {
    fn new(entries: Vec<(String, u32)>) -> Self {
        let (words, weights): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        let dist = WeightedIndex::new(&weights).expect("non-empty pool with positive weights");
        Self {
            words,
            weights,
            dist,
        }
    }

    fn pick<R: Rng>(&self, rng: &mut R) -> &str {
        &self.words[self.dist.sample(rng)]
    }
}

fn owned(list: &[(&str, u32)]) -> Vec<(String, u32)> {
    list.iter().map(|&(w, f)| (w.to_owned(), f)).collect()
}

impl TaggedLexicon {
    /// The bundled open-class word list plus the closed classes.
    pub fn bundled() -> Self {
        Self::parse(BUNDLED).expect("bundled lexicon is well-formed")
    }

    /// Parses `word<TAB>tag<TAB>frequency` lines (`#` starts a comment) and
    /// adds the closed classes.
    pub fn parse(text: &str) -> Result<Self, String> {
        let mut open: BTreeMap<String, Vec<(String, u32)>> = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.starts_with('#') || line.trim().is_empty() {
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let [word, tag, freq] = f[..] else {
                return Err(format!("line {}: expected word, tag and frequency", i + 1));
            };
            let freq: u32 = freq.parse().map_err(|e| format!("line {}: {e}", i + 1))?;
            if freq == 0 {
                return Err(format!("line {}: zero frequency", i + 1));
            }
            open.entry(tag.to_owned())
                .or_default()
                .push((word.to_owned(), freq));
        }
        for tag in ["NN", "NNS", "JJ", "VB", "VBD", "VBZ", "VBN", "RB"] {
            if !open.contains_key(tag) {
                return Err(format!("no words tagged {tag}"));
            }
        }
        let mut vbp: Vec<(String, u32)> = open["VB"]
            .iter()
            .filter(|(w, _)| w != "be")
            .cloned()
            .collect();
        vbp.extend(owned(VBP_EXTRA));
        let mut tags: BTreeMap<String, Pool> =
            open.into_iter().map(|(t, e)| (t, Pool::new(e))).collect();
        for (tag, list) in [
            ("DT-SG", DT_SG),
            ("DT-PL", DT_PL),
            ("PRP-SG", PRP_SG),
            ("PRP-PL", PRP_PL),
            ("PRP-OBJ", PRP_OBJ),
            ("PRP$", PRP_POSS),
            ("IN", IN),
            ("MD", MD),
            ("CC", CC),
        ] {
            tags.insert(tag.to_owned(), Pool::new(owned(list)));
        }
        tags.insert("VBP".to_owned(), Pool::new(vbp));
        Ok(Self { tags })
    }

    fn pool(&self, tag: &str) -> &Pool {
        &self.tags[tag]
    }

    /// Singular nouns, for noun-only error injection.
    pub fn nouns(&self) -> Vec<String> {
        self.pool("NN").words.clone()
    }

    /// Every `(word, tag, weight)` entry, tags sorted.
    pub fn entries(&self) -> Vec<(&str, &str, u32)> {
        let mut out = Vec::new();
        for (tag, pool) in &self.tags {
            for (w, &f) in pool.words.iter().zip(&pool.weights) {
                out.push((w.as_str(), tag.as_str(), f));
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Num {
    Sg,
    Pl,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tense {
    Past,
    Present,
    Modal,
}

/// A sentence and its bracketed tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedSentence {
    pub tokens: Vec<String>,
    pub tree: String,
}

/// Shortest and longest sentence the generator emits, in tokens.
pub const MIN_TOKENS: usize = 6;
pub const MAX_TOKENS: usize = 23;

pub struct Generator<'l> {
    lex: &'l TaggedLexicon,
    rng: ChaCha8Rng,
}

/// A generated constituent: its bracketing and words.
struct Phrase {
    tree: String,
    words: Vec<String>,
}

impl Phrase {
    fn leaf(tag: &str, word: &str) -> Self {
        Phrase {
            tree: format!("({tag} {word})"),
            words: vec![word.to_owned()],
        }
    }

    fn node(label: &str, kids: Vec<Phrase>) -> Self {
        let mut tree = format!("({label}");
        let mut words = Vec::new();
        for k in kids {
            tree.push(' ');
            tree.push_str(&k.tree);
            words.extend(k.words);
        }
        tree.push(')');
        Phrase { tree, words }
    }
}

fn starts_with_vowel(w: &str) -> bool {
    w.starts_with(['a', 'e', 'i', 'o', 'u'])
}

impl<'l> Generator<'l> {
    pub fn new(lex: &'l TaggedLexicon, seed: u64) -> Self {
        Self {
            lex,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    fn word(&mut self, pool: &str) -> String {
        self.lex.pool(pool).pick(&mut self.rng).to_owned()
    }

    fn leaf(&mut self, tag: &str, pool: &str) -> Phrase {
        let w = self.word(pool);
        Phrase::leaf(tag, &w)
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Index drawn from unnormalized weights.
    fn choose(&mut self, weights: &[f64]) -> usize {
        let total: f64 = weights.iter().sum();
        let mut x = self.rng.gen::<f64>() * total;
        for (i, w) in weights.iter().enumerate() {
            if x < *w {
                return i;
            }
            x -= w;
        }
        weights.len() - 1
    }

    /// Next sentence between [`MIN_TOKENS`] and [`MAX_TOKENS`] tokens.
    pub fn sentence(&mut self) -> GeneratedSentence {
        loop {
            let p = self.s_top();
            if (MIN_TOKENS..=MAX_TOKENS).contains(&p.words.len()) {
                return GeneratedSentence {
                    tokens: p.words,
                    tree: p.tree,
                };
            }
        }
    }

    pub fn sentences(&mut self, n: usize) -> Vec<GeneratedSentence> {
        (0..n).map(|_| self.sentence()).collect()
    }

    fn s_top(&mut self) -> Phrase {
        let stop = Phrase::leaf(".", ".");
        match self.choose(&[0.58, 0.12, 0.10, 0.14, 0.06]) {
            0 => {
                let mut k = self.clause(0);
                k.push(stop);
                Phrase::node("S", k)
            }
            1 => {
                let pp = self.pp(1);
                let mut k = vec![pp, Phrase::leaf(",", ",")];
                k.extend(self.clause(1));
                k.push(stop);
                Phrase::node("S", k)
            }
            2 => {
                let adv = self.leaf("RB", "RB");
                let mut k = vec![Phrase::node("ADVP", vec![adv])];
                k.extend(self.clause(1));
                k.push(stop);
                Phrase::node("S", k)
            }
            3 => {
                let a = self.clause(1);
                let b = self.clause(1);
                let cc = self.leaf("CC", "CC");
                Phrase::node(
                    "S",
                    vec![
                        Phrase::node("S", a),
                        Phrase::leaf(",", ","),
                        cc,
                        Phrase::node("S", b),
                        stop,
                    ],
                )
            }
            _ => {
                let num = if self.chance(0.6) { Num::Sg } else { Num::Pl };
                let be = if num == Num::Sg { "was" } else { "were" };
                let (obj, _) = self.np_num(num, 1);
                let mut vp = vec![Phrase::leaf("VBD", be), obj];
                if self.chance(0.4) {
                    vp.push(self.pp(2));
                }
                Phrase::node(
                    "S",
                    vec![
                        Phrase::node("NP-SBJ", vec![Phrase::leaf("EX", "there")]),
                        Phrase::node("VP", vp),
                        stop,
                    ],
                )
            }
        }
    }

    /// Subject and predicate as separate children.
    fn clause(&mut self, depth: usize) -> Vec<Phrase> {
        let (subj, num) = self.subject(depth);
        let vp = self.vp(num, depth);
        vec![subj, vp]
    }

    fn subject(&mut self, depth: usize) -> (Phrase, Num) {
        if self.chance(0.3) {
            let num = if self.chance(0.55) { Num::Sg } else { Num::Pl };
            let pool = if num == Num::Sg { "PRP-SG" } else { "PRP-PL" };
            let p = self.leaf("PRP", pool);
            return (Phrase::node("NP-SBJ", vec![p]), num);
        }
        let (np, num) = self.np(depth);
        let Phrase { tree, words } = np;
        // relabel the outermost NP as a subject
        let tree = format!("(NP-SBJ{}", &tree[3..]);
        (Phrase { tree, words }, num)
    }

    fn np(&mut self, depth: usize) -> (Phrase, Num) {
        let num = if self.chance(0.6) { Num::Sg } else { Num::Pl };
        self.np_num(num, depth)
    }

    fn determiner(&mut self, num: Num, next: &str) -> Phrase {
        if num == Num::Sg {
            let w = self.word("DT-SG");
            if w == "a" && starts_with_vowel(next) {
                return Phrase::leaf("DT", "an");
            }
            Phrase::leaf("DT", &w)
        } else {
            self.leaf("DT", "DT-PL")
        }
    }

    fn np_num(&mut self, num: Num, depth: usize) -> (Phrase, Num) {
        let noun_pool = if num == Num::Sg { "NN" } else { "NNS" };
        let base = match self.choose(&[0.42, 0.20, 0.18, 0.10, 0.10]) {
            0 => {
                let n = self.leaf(noun_pool, noun_pool);
                let dt = self.determiner(num, &n.words[0]);
                Phrase::node("NP", vec![dt, n])
            }
            1 => {
                let adj = self.leaf("JJ", "JJ");
                let n = self.leaf(noun_pool, noun_pool);
                let dt = self.determiner(num, &adj.words[0]);
                Phrase::node("NP", vec![dt, adj, n])
            }
            2 => {
                let poss = self.leaf("PRP$", "PRP$");
                let n = self.leaf(noun_pool, noun_pool);
                if self.chance(0.3) {
                    let adj = self.leaf("JJ", "JJ");
                    Phrase::node("NP", vec![poss, adj, n])
                } else {
                    Phrase::node("NP", vec![poss, n])
                }
            }
            3 if num == Num::Pl => {
                let n = self.leaf("NNS", "NNS");
                if self.chance(0.5) {
                    let adj = self.leaf("JJ", "JJ");
                    Phrase::node("NP", vec![adj, n])
                } else {
                    Phrase::node("NP", vec![n])
                }
            }
            _ => {
                let modifier = self.leaf("NN", "NN");
                let n = self.leaf(noun_pool, noun_pool);
                let dt = self.determiner(num, &modifier.words[0]);
                Phrase::node("NP", vec![dt, modifier, n])
            }
        };
        if depth < 2 && self.chance(0.2) {
            let pp = self.pp(depth + 1);
            return (Phrase::node("NP", vec![base, pp]), num);
        }
        if depth < 1 && self.chance(0.06) {
            let vp = self.vp(num, depth + 1);
            let rel = Phrase::node(
                "SBAR",
                vec![
                    Phrase::node("WHNP", vec![Phrase::leaf("WP", "who")]),
                    Phrase::node("S", vec![vp]),
                ],
            );
            return (Phrase::node("NP", vec![base, rel]), num);
        }
        (base, num)
    }

    fn object(&mut self, depth: usize) -> Phrase {
        if self.chance(0.15) {
            let p = self.leaf("PRP", "PRP-OBJ");
            return Phrase::node("NP", vec![p]);
        }
        self.np(depth).0
    }

    fn pp(&mut self, depth: usize) -> Phrase {
        let prep = self.leaf("IN", "IN");
        let obj = self.object(depth.max(1));
        Phrase::node("PP", vec![prep, obj])
    }

    fn verb(&mut self, num: Num, tense: Tense) -> Phrase {
        match (tense, num) {
            (Tense::Past, _) => loop {
                let w = self.word("VBD");
                let ok = match w.as_str() {
                    "was" => num == Num::Sg,
                    "were" => num == Num::Pl,
                    _ => true,
                };
                if ok {
                    return Phrase::leaf("VBD", &w);
                }
            },
            (Tense::Present, Num::Sg) => self.leaf("VBZ", "VBZ"),
            (Tense::Present, Num::Pl) => self.leaf("VBP", "VBP"),
            (Tense::Modal, _) => self.leaf("VB", "VB"),
        }
    }

    fn vp(&mut self, num: Num, depth: usize) -> Phrase {
        let tense = match self.choose(&[0.6, 0.28, 0.12]) {
            0 => Tense::Past,
            1 => Tense::Present,
            _ => Tense::Modal,
        };
        if tense == Tense::Modal {
            let md = self.leaf("MD", "MD");
            let inner = self.vp_body(num, tense, depth);
            if self.chance(0.15) {
                return Phrase::node("VP", vec![md, Phrase::leaf("RB", "not"), inner]);
            }
            return Phrase::node("VP", vec![md, inner]);
        }
        if self.chance(0.08) {
            let aux = match (tense, num) {
                (Tense::Past, _) => Phrase::leaf("VBD", "had"),
                (_, Num::Sg) => Phrase::leaf("VBZ", "has"),
                (_, Num::Pl) => Phrase::leaf("VBP", "have"),
            };
            let vbn = self.leaf("VBN", "VBN");
            let mut kids = vec![vbn];
            if self.chance(0.6) {
                kids.push(self.object(depth + 1));
            } else {
                kids.push(self.pp(depth + 1));
            }
            return Phrase::node("VP", vec![aux, Phrase::node("VP", kids)]);
        }
        self.vp_body(num, tense, depth)
    }

    fn vp_body(&mut self, num: Num, tense: Tense, depth: usize) -> Phrase {
        let v = self.verb(num, tense);
        let deep = depth >= 2;
        let weights = if deep {
            [0.45, 0.15, 0.15, 0.12, 0.13, 0.0, 0.0]
        } else {
            [0.34, 0.15, 0.12, 0.08, 0.10, 0.09, 0.12]
        };
        let kids = match self.choose(&weights) {
            0 => vec![v, self.object(depth + 1)],
            1 => {
                let o = self.object(depth + 1);
                let p = self.pp(depth + 1);
                vec![v, o, p]
            }
            2 => vec![v, self.pp(depth + 1)],
            3 => vec![v],
            4 => {
                let adv = self.leaf("RB", "RB");
                vec![v, Phrase::node("ADVP", vec![adv])]
            }
            5 => {
                let inner = self.clause(depth + 1);
                let sbar = Phrase::node(
                    "SBAR",
                    vec![Phrase::leaf("IN", "that"), Phrase::node("S", inner)],
                );
                vec![v, sbar]
            }
            _ => {
                let vb = self.vp_body(num, Tense::Modal, depth + 1);
                let inf = Phrase::node("VP", vec![Phrase::leaf("TO", "to"), vb]);
                vec![v, Phrase::node("S", vec![inf])]
            }
        };
        Phrase::node("VP", kids)
    }
}

/// `n` sentences from a generator seeded with `seed`.
pub fn generate(lex: &TaggedLexicon, seed: u64, n: usize) -> Vec<GeneratedSentence> {
    Generator::new(lex, seed).sentences(n)
}
