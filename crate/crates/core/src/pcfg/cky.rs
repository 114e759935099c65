//! CKY Viterbi chart.
//!
//! The chart is filled column by column (all spans ending at `j` before any
//! span ending at `j + 1`), so when consecutive inputs share a prefix only the
//! columns after the first changed token are recomputed. Search-space
//! enumeration varies the rightmost position fastest, which makes this reuse
//! pay off.

use super::{Grammar, ParseResult, Sym};

#[derive(Debug, Clone, Default)]
struct Cell {
    score: Vec<f64>,
    active: Vec<Sym>,
    /// Best `inside(A) + chunk(A)` over labels in this cell.
    chunk: f64,
}

impl Cell {
    fn reset(&mut self, symbols: usize) {
        if self.score.len() != symbols {
            self.score = vec![f64::NEG_INFINITY; symbols];
            self.active.clear();
        } else {
            for &a in &self.active {
                self.score[a as usize] = f64::NEG_INFINITY;
            }
            self.active.clear();
        }
        self.chunk = f64::NEG_INFINITY;
    }

    #[inline]
    fn offer(&mut self, sym: Sym, score: f64) {
        let slot = &mut self.score[sym as usize];
        if *slot == f64::NEG_INFINITY {
            self.active.push(sym);
            *slot = score;
        } else if score > *slot {
            *slot = score;
        }
    }
}

/// Read access to a filled chart.
pub trait Chart {
    /// Viterbi inside log-probability of `sym` spanning tokens `i..j`.
    fn inside(&self, i: usize, j: usize, sym: Sym) -> f64;
}

/// Reusable parsing scratch space bound to one grammar.
#[derive(Debug, Clone)]
pub struct Parser<'g> {
    grammar: &'g Grammar,
    words: Vec<String>,
    cells: Vec<Cell>,
    /// `prefix[j]`: best segmentation of the first `j` tokens into constituents.
    prefix: Vec<f64>,
}

#[inline]
fn cell_index(i: usize, j: usize) -> usize {
    debug_assert!(i < j);
    j * (j - 1) / 2 + i
}

impl<'g> Parser<'g> {
    pub fn new(grammar: &'g Grammar) -> Self {
        Self {
            grammar,
            words: Vec::new(),
            cells: Vec::new(),
            prefix: vec![0.0],
        }
    }

    pub fn grammar(&self) -> &'g Grammar {
        self.grammar
    }

    fn prepare<S: AsRef<str>>(&mut self, tokens: &[S]) {
        let n = tokens.len();
        let mut k = 0;
        while k < n && k < self.words.len() && self.words[k] == tokens[k].as_ref() {
            k += 1;
        }
        if k == n && self.words.len() == n {
            return;
        }
        self.words.truncate(k);
        self.words
            .extend(tokens[k..].iter().map(|t| t.as_ref().to_owned()));
        let needed = n * (n + 1) / 2;
        if self.cells.len() < needed {
            self.cells.resize_with(needed, Cell::default);
        }
        self.prefix.resize(n + 1, f64::NEG_INFINITY);
        for j in k + 1..=n {
            self.fill_column(j);
        }
    }

    fn fill_column(&mut self, j: usize) {
        let g = self.grammar;
        let symbols = g.symbols().len();

        let mut cell = std::mem::take(&mut self.cells[cell_index(j - 1, j)]);
        cell.reset(symbols);
        for &(a, lp) in g.lexical_entries(&self.words[j - 1]) {
            cell.offer(a, lp);
        }
        finish_cell(g, &mut cell);
        self.cells[cell_index(j - 1, j)] = cell;

        for i in (0..j - 1).rev() {
            let mut cell = std::mem::take(&mut self.cells[cell_index(i, j)]);
            cell.reset(symbols);
            for m in i + 1..j {
                let left = &self.cells[cell_index(i, m)];
                let right = &self.cells[cell_index(m, j)];
                if left.active.is_empty() || right.active.is_empty() {
                    continue;
                }
                for &b in &left.active {
                    let lb = left.score[b as usize];
                    for &(c, a, p) in g.by_left(b) {
                        let rc = right.score[c as usize];
                        if rc == f64::NEG_INFINITY {
                            continue;
                        }
                        cell.offer(a, p + lb + rc);
                    }
                }
            }
            finish_cell(g, &mut cell);
            self.cells[cell_index(i, j)] = cell;
        }

        let mut best = f64::NEG_INFINITY;
        for i in 0..j {
            let s = self.prefix[i] + self.cells[cell_index(i, j)].chunk;
            if s > best {
                best = s;
            }
        }
        self.prefix[j] = best;
    }

    /// Best derivation of the whole input from any root label, weighted by
    /// the grammar's root distribution.
    pub fn viterbi_parse<S: AsRef<str>>(&mut self, tokens: &[S]) -> ParseResult {
        let n = tokens.len();
        if n == 0 {
            return ParseResult {
                parseable: false,
                viterbi_log_prob: f64::NEG_INFINITY,
            };
        }
        self.prepare(tokens);
        let cell = &self.cells[cell_index(0, n)];
        let mut best = f64::NEG_INFINITY;
        for &a in &cell.active {
            let s = cell.score[a as usize] + self.grammar.root_log_prob(a);
            if s > best {
                best = s;
            }
        }
        ParseResult {
            parseable: best > f64::NEG_INFINITY,
            viterbi_log_prob: best,
        }
    }

    pub fn parse_log_prob_or_floor<S: AsRef<str>>(&mut self, tokens: &[S], floor: f64) -> f64 {
        let r = self.viterbi_parse(tokens);
        if r.parseable {
            r.viterbi_log_prob
        } else {
            floor
        }
    }

    /// Scores a sentence fragment as its best segmentation into adjacent
    /// constituents: the maximum over segmentations of the sum, per segment,
    /// of the segment label's Viterbi inside score plus the label's log
    /// frequency as a constituent. A fragment that is one constituent is
    /// a single segment. `None` when some token has no lexical entry at all.
    pub fn fragment_log_prob<S: AsRef<str>>(&mut self, tokens: &[S]) -> Option<f64> {
        if tokens.is_empty() {
            return Some(0.0);
        }
        self.prepare(tokens);
        let s = self.prefix[tokens.len()];
        (s > f64::NEG_INFINITY).then_some(s)
    }

    pub fn fragment_log_prob_or_floor<S: AsRef<str>>(&mut self, tokens: &[S], floor: f64) -> f64 {
        self.fragment_log_prob(tokens).unwrap_or(floor)
    }
}

fn finish_cell(g: &Grammar, cell: &mut Cell) {
    let mut best = f64::NEG_INFINITY;
    for &a in &cell.active {
        let s = cell.score[a as usize] + g.chunk_log_prob(a);
        if s > best {
            best = s;
        }
    }
    cell.chunk = best;
}

impl Chart for Parser<'_> {
    fn inside(&self, i: usize, j: usize, sym: Sym) -> f64 {
        assert!(
            i < j && j <= self.words.len(),
            "span {i}..{j} outside the last input"
        );
        let cell = &self.cells[cell_index(i, j)];
        cell.score
            .get(sym as usize)
            .copied()
            .unwrap_or(f64::NEG_INFINITY)
    }
}
