//! Evaluation with synthetic real-word errors.
//!
//! A clean test corpus is corrupted at each alpha, corrected with the same
//! alpha, and scored per word. [`evaluate`] corrects sentences in parallel and
//! reports accuracy plus search-space statistics; [`bench`] runs the same
//! grid sequentially and also times every sentence.

pub mod corrupt;
pub mod metrics;
pub mod report;

use std::time::Instant;

pub use corrupt::{
    corrupt, read_corrupted, write_corrupted, CorruptedSentence, CorruptionSpec, Injection,
    NounLexicon, TestSet,
};
pub use metrics::{f1, score, Counts, Prf, Scores};
pub use report::{Cell, EvalReport};

use crate::channel::ChannelParams;
use crate::error::{Error, Result};
use crate::lexicon::Lexicon;
use crate::lm::TrigramModel;
use crate::pcfg::Grammar;
use crate::search::{CorrectionResult, Corrector, Mode, SearchConfig};

pub const DEFAULT_ALPHAS: [f64; 4] = [0.9, 0.99, 0.995, 0.999];
pub const DEFAULT_DS: [usize; 4] = [1, 3, 6, 10];

#[derive(Debug, Clone, Copy)]
pub struct Models<'a> {
    pub lexicon: &'a Lexicon,
    pub model: &'a TrigramModel,
    pub grammar: Option<&'a Grammar>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalConfig {
    pub alphas: Vec<f64>,
    pub ds: Vec<usize>,
    pub modes: Vec<Mode>,
    pub test_set: TestSet,
    pub nouns: Option<NounLexicon>,
    pub seed: u64,
    pub search: SearchConfig,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            alphas: DEFAULT_ALPHAS.to_vec(),
            ds: DEFAULT_DS.to_vec(),
            modes: vec![Mode::WindowSingle, Mode::WindowMulti],
            test_set: TestSet::S62000,
            nouns: None,
            seed: 0,
            search: SearchConfig::default(),
        }
    }
}

impl EvalConfig {
    fn check(&self, models: &Models<'_>) -> Result<()> {
        if self.alphas.is_empty() || self.modes.is_empty() {
            return Err(Error::InvalidConfig("empty alpha or mode grid".into()));
        }
        if self.modes.iter().any(|m| m.uses_windows())
            && (self.ds.is_empty() || self.ds.contains(&0))
        {
            return Err(Error::InvalidConfig(
                "window modes need span widths d >= 1".into(),
            ));
        }
        if self.modes.contains(&Mode::WindowMulti) && models.grammar.is_none() {
            return Err(Error::MissingGrammar);
        }
        for &a in &self.alphas {
            CorruptionSpec::new(a, self.test_set, self.seed, self.nouns.clone())?;
        }
        Ok(())
    }

    /// `(mode, d)` pairs in report order; sentence mode has no span width.
    fn runs(&self) -> Vec<(Mode, usize)> {
        let mut out = Vec::new();
        for &m in &self.modes {
            if m.uses_windows() {
                out.extend(self.ds.iter().map(|&d| (m, d)));
            } else {
                out.push((m, 0));
            }
        }
        out
    }
}

/// Corrects every test sentence in parallel and scores the result.
pub fn evaluate(
    sentences: &[Vec<String>],
    models: Models<'_>,
    config: &EvalConfig,
) -> Result<EvalReport> {
    run_grid(sentences, models, config, None)
}

/// Like [`evaluate`], but sequential and timed. The first `warmup`
/// corrections of every run are repeated untimed beforehand.
pub fn bench(
    sentences: &[Vec<String>],
    models: Models<'_>,
    config: &EvalConfig,
    warmup: usize,
) -> Result<EvalReport> {
    run_grid(sentences, models, config, Some(warmup))
}

fn run_grid(
    sentences: &[Vec<String>],
    models: Models<'_>,
    config: &EvalConfig,
    timed: Option<usize>,
) -> Result<EvalReport> {
    config.check(&models)?;
    let mut report = EvalReport::default();
    for &alpha in &config.alphas {
        let spec = CorruptionSpec::new(alpha, config.test_set, config.seed, config.nouns.clone())?;
        let tests = corrupt(sentences, &spec, models.lexicon);
        let inputs: Vec<Vec<String>> = tests.iter().map(|t| t.corrupted.clone()).collect();
        let mut corrector =
            Corrector::new(models.lexicon, models.model, ChannelParams::new(alpha)?)?
                .with_config(config.search);
        if let Some(g) = models.grammar {
            corrector = corrector.with_grammar(g);
        }
        for (mode, d) in config.runs() {
            let (outcomes, time) = match timed {
                None => (corrector.correct_batch(&inputs, mode, d), None),
                Some(warmup) => {
                    let (o, t) = timed_run(&corrector, &inputs, mode, d, warmup);
                    (o, Some(t))
                }
            };
            report.cells.push(build_cell(
                &tests,
                &inputs,
                outcomes,
                config.test_set,
                mode,
                d,
                alpha,
                time,
            )?);
        }
    }
    Ok(report)
}

fn timed_run(
    corrector: &Corrector<'_>,
    inputs: &[Vec<String>],
    mode: Mode,
    d: usize,
    warmup: usize,
) -> (Vec<Result<CorrectionResult>>, f64) {
    for s in inputs.iter().take(warmup) {
        let _ = corrector.correct(s, mode, d);
    }
    let mut total = 0.0;
    let mut out = Vec::with_capacity(inputs.len());
    for s in inputs {
        let t = Instant::now();
        let r = corrector.correct(s, mode, d);
        total += t.elapsed().as_secs_f64() * 1e3;
        out.push(r);
    }
    let mean = if inputs.is_empty() {
        0.0
    } else {
        total / inputs.len() as f64
    };
    (out, mean)
}

#[allow(clippy::too_many_arguments)]
fn build_cell(
    tests: &[CorruptedSentence],
    inputs: &[Vec<String>],
    outcomes: Vec<Result<CorrectionResult>>,
    test_set: TestSet,
    mode: Mode,
    d: usize,
    alpha: f64,
    mean_time_ms: Option<f64>,
) -> Result<Cell> {
    let mut scores = Scores::default();
    let mut blowups = 0;
    let (mut windows, mut initial, mut retained) = (0u64, 0f64, 0f64);
    for ((test, input), outcome) in tests.iter().zip(inputs).zip(outcomes) {
        let result = match outcome {
            Ok(r) => r,
            Err(Error::CombinatorialBlowup { .. }) => {
                blowups += 1;
                CorrectionResult::unchanged(input.clone(), mode)
            }
            Err(e) => return Err(e),
        };
        for w in &result.windows {
            windows += 1;
            initial += w.initial as f64;
            retained += w.retained as f64;
        }
        scores.add(metrics::score_sentence(test, &result)?);
    }
    let mean = |x: f64| (windows > 0).then(|| x / windows as f64);
    Ok(Cell {
        test_set,
        mode,
        d,
        alpha,
        sentences: tests.len(),
        words: tests.iter().map(|t| t.original.len()).sum(),
        injected: tests.iter().map(|t| t.injected.len()).sum(),
        scores,
        blowups,
        mean_time_ms,
        mean_initial: mean(initial),
        mean_final: mean(retained),
    })
}
