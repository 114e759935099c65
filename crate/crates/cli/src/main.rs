//! `realword`: train models, correct text, corrupt and evaluate test sets.
//!
//! Exit status is 0 on success (warnings included), 1 for a usage error and 2
//! when an input file or model cannot be read or used.

use std::fs::{self, File};
use std::io::{self, BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use realword::eval::{self, CorruptionSpec, EvalConfig, Models, NounLexicon, TestSet};
use realword::pcfg::{read_treebank, DEFAULT_PARSE_FLOOR};
use realword::text::{detokenize, tokenize};
use realword::{
    ChannelParams, Corrector, Error, Grammar, Lexicon, Mode, SearchConfig, TrigramModel, Vocabulary,
};

#[derive(Parser)]
#[command(name = "realword", version, about = "Real-word spelling correction")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the bundled State of the Union sentences as a train/test split.
    Sotu(SotuArgs),
    /// Tag and chunk tokenized sentences into a bracketed treebank.
    Treebank(TreebankArgs),
    /// Build a vocabulary and trigram model from one sentence per line.
    TrainLm(TrainLmArgs),
    /// Estimate a grammar from a bracketed treebank, one tree per line.
    TrainGrammar(TrainGrammarArgs),
    /// Correct one sentence per line.
    Correct(CorrectArgs),
    /// Inject real-word errors into one sentence per line.
    Corrupt(CorruptArgs),
    /// Corrupt, correct and score a test corpus over a grid of settings.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct SotuArgs {
    /// Number of test sentences.
    #[arg(long, default_value_t = 10_000)]
    test_size: usize,
    /// Fewest words in a test sentence.
    #[arg(long, default_value_t = 6)]
    min_words: usize,
    /// Most words in a test sentence.
    #[arg(long, default_value_t = 23)]
    max_words: usize,
    #[arg(long)]
    train: PathBuf,
    #[arg(long)]
    test: PathBuf,
}

#[derive(Args)]
struct TreebankArgs {
    input: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TrainLmArgs {
    corpus: PathBuf,
    /// Number of most frequent tokens kept.
    #[arg(long, default_value_t = 20_000)]
    vocab: usize,
    /// Discount subtracted from every seen n-gram count.
    #[arg(long, default_value_t = realword::lm::DEFAULT_DELTA)]
    delta: f64,
    /// Writes `<output>.vocab` and `<output>.lm`.
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct TrainGrammarArgs {
    treebank: PathBuf,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct ModelArgs {
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    lm: PathBuf,
    /// Required by window-multi.
    #[arg(long)]
    grammar: Option<PathBuf>,
    /// Upper bound on candidates per window and on combinations.
    #[arg(long, default_value_t = SearchConfig::default().combination_cap)]
    cap: u64,
    /// Log probability given to an unparseable sequence.
    #[arg(long, default_value_t = DEFAULT_PARSE_FLOOR, allow_negative_numbers = true)]
    parse_floor: f64,
}

#[derive(Args)]
struct CorrectArgs {
    /// Defaults to standard input.
    input: Option<PathBuf>,
    #[command(flatten)]
    models: ModelArgs,
    #[arg(long, default_value_t = 0.99)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::WindowMulti)]
    mode: ModeArg,
    /// Words per window span.
    #[arg(long, default_value_t = 1)]
    d: usize,
    /// Defaults to standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Tab-separated edit log: sentence (from 1), position (from 0), original,
    /// replacement. Defaults to standard error.
    #[arg(long)]
    edits: Option<PathBuf>,
}

#[derive(Args)]
struct CorruptArgs {
    input: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = TestSetArg::S62000)]
    test_set: TestSetArg,
    /// One noun per line; required by the malp test set.
    #[arg(long)]
    nouns: Option<PathBuf>,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Args)]
struct EvaluateArgs {
    test: PathBuf,
    #[command(flatten)]
    models: ModelArgs,
    #[arg(long, value_delimiter = ',', default_values_t = eval::DEFAULT_ALPHAS)]
    alpha: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_values_t = eval::DEFAULT_DS)]
    d: Vec<usize>,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [ModeArg::WindowSingle, ModeArg::WindowMulti])]
    mode: Vec<ModeArg>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = TestSetArg::S62000)]
    test_set: TestSetArg,
    #[arg(long)]
    nouns: Option<PathBuf>,
    /// Run sequentially and report mean time per sentence.
    #[arg(long)]
    timed: bool,
    /// Three-decimal tables.
    #[arg(long)]
    output: PathBuf,
    /// One `key=value` line per cell at full precision.
    #[arg(long)]
    records: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Mdm,
    WindowSingle,
    WindowMulti,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Mdm => Mode::Mdm,
            ModeArg::WindowSingle => Mode::WindowSingle,
            ModeArg::WindowMulti => Mode::WindowMulti,
        }
    }
}

impl std::fmt::Display for ModeArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(Mode::from(*self).name())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum TestSetArg {
    S62000,
    Malp,
}

impl From<TestSetArg> for TestSet {
    fn from(t: TestSetArg) -> Self {
        match t {
            TestSetArg::S62000 => TestSet::S62000,
            TestSetArg::Malp => TestSet::Malp,
        }
    }
}

/// A bad combination of flags, reported with exit status 1.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Sotu(a) => sotu(a),
        Command::Treebank(a) => treebank(a),
        Command::TrainLm(a) => train_lm(a),
        Command::TrainGrammar(a) => train_grammar(a),
        Command::Correct(a) => correct(a),
        Command::Corrupt(a) => corrupt(a),
        Command::Evaluate(a) => evaluate(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.is::<Usage>() {
                ExitCode::from(1)
            } else {
                ExitCode::from(2)
            }
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

fn read_sentences(reader: impl BufRead, what: &Path) -> Result<Vec<Vec<String>>> {
    let mut out = Vec::new();
    for line in reader.lines() {
        let line = line.with_context(|| format!("cannot read {}", what.display()))?;
        out.push(tokenize(&line));
    }
    Ok(out)
}

fn read_sentence_file(path: &Path) -> Result<Vec<Vec<String>>> {
    read_sentences(open(path)?, path)
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).with_context(|| format!("cannot write {}", path.display()))
}

fn lines<'a>(sentences: impl IntoIterator<Item = &'a String>) -> String {
    let mut out = String::new();
    for s in sentences {
        out.push_str(&detokenize(&tokenize(s)));
        out.push('\n');
    }
    out
}

fn word_count(tokens: &[String]) -> usize {
    tokens
        .iter()
        .filter(|t| t.chars().any(char::is_alphanumeric))
        .count()
}

fn sotu(a: SotuArgs) -> Result<()> {
    if a.min_words > a.max_words {
        return Err(usage("--min-words exceeds --max-words"));
    }
    let range = a.min_words..=a.max_words;
    let split = realword_corpus::Split::new(realword_corpus::sentences(), a.test_size, |s| {
        range.contains(&word_count(&tokenize(s)))
    });
    write_file(&a.train, lines(&split.train).as_bytes())?;
    write_file(&a.test, lines(&split.test).as_bytes())?;
    eprintln!(
        "{} training sentences, {} test sentences",
        split.train.len(),
        split.test.len()
    );
    Ok(())
}

fn treebank(a: TreebankArgs) -> Result<()> {
    let sentences = read_sentence_file(&a.input)?;
    let mut out = String::new();
    for s in sentences.iter().filter(|s| !s.is_empty()) {
        out.push_str(&realword_corpus::shallow::parse(s));
        out.push('\n');
    }
    write_file(&a.output, out.as_bytes())
}

fn with_extension(path: &Path, ext: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".");
    s.push(ext);
    PathBuf::from(s)
}

fn train_lm(a: TrainLmArgs) -> Result<()> {
    if a.vocab == 0 {
        return Err(usage("--vocab must be at least 1"));
    }
    if !(a.delta > 0.0 && a.delta < 1.0) {
        return Err(usage("--delta must lie in (0, 1)"));
    }
    let corpus = read_sentence_file(&a.corpus)?;
    let vocab = Vocabulary::build(corpus.iter().flatten(), a.vocab)?;
    let model = TrigramModel::train(corpus.iter(), &vocab, a.delta)?;
    let (mut vbuf, mut mbuf) = (Vec::new(), Vec::new());
    vocab.write(&mut vbuf)?;
    model.write(&mut mbuf)?;
    write_file(&with_extension(&a.output, "vocab"), &vbuf)?;
    write_file(&with_extension(&a.output, "lm"), &mbuf)?;
    let tokens: usize = corpus.iter().map(Vec::len).sum();
    let types = corpus
        .iter()
        .flatten()
        .collect::<std::collections::HashSet<_>>()
        .len();
    let [uni, bi, tri] = model.ngram_counts();
    eprintln!(
        "{} sentences, {tokens} tokens, {types} types, {} vocabulary words; {uni} unigrams, {bi} bigrams, {tri} trigrams",
        corpus.len(),
        vocab.len()
    );
    Ok(())
}

fn train_grammar(a: TrainGrammarArgs) -> Result<()> {
    let trees = read_treebank(open(&a.treebank)?)
        .with_context(|| format!("cannot read treebank {}", a.treebank.display()))?;
    let grammar = Grammar::induce(&trees)?;
    let mut buf = Vec::new();
    grammar.write(&mut buf)?;
    write_file(&a.output, &buf)?;
    eprintln!(
        "{} trees, {} symbols, {} rules",
        trees.len(),
        grammar.symbols().len(),
        grammar.rules().len()
    );
    Ok(())
}

struct Loaded {
    lexicon: Lexicon,
    model: TrigramModel,
    grammar: Option<Grammar>,
    search: SearchConfig,
}

fn load_vocab(path: &Path) -> Result<Vocabulary> {
    Vocabulary::read(open(path)?)
        .with_context(|| format!("cannot load vocabulary {}", path.display()))
}

fn load_models(a: &ModelArgs, need_grammar: bool) -> Result<Loaded> {
    if need_grammar && a.grammar.is_none() {
        return Err(usage("window-multi needs --grammar"));
    }
    if a.cap == 0 {
        return Err(usage("--cap must be at least 1"));
    }
    let vocab = load_vocab(&a.vocab)?;
    let model = TrigramModel::read(open(&a.lm)?)
        .with_context(|| format!("cannot load language model {}", a.lm.display()))?;
    let grammar = match &a.grammar {
        Some(p) => Some(
            Grammar::read(open(p)?)
                .with_context(|| format!("cannot load grammar {}", p.display()))?,
        ),
        None => None,
    };
    if model.vocab() != &vocab {
        return Err(Error::VocabularyMismatch.into());
    }
    Ok(Loaded {
        lexicon: Lexicon::new(vocab),
        model,
        grammar,
        search: SearchConfig {
            combination_cap: a.cap,
            parse_floor: a.parse_floor,
        },
    })
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(usage(format!("--alpha must lie in (0, 1), got {alpha}")))
    }
}

fn correct(a: CorrectArgs) -> Result<()> {
    check_alpha(a.alpha)?;
    let mode = Mode::from(a.mode);
    if mode.uses_windows() && a.d == 0 {
        return Err(usage("--d must be at least 1"));
    }
    let m = load_models(&a.models, mode == Mode::WindowMulti)?;
    let sentences = match &a.input {
        Some(p) => read_sentence_file(p)?,
        None => read_sentences(io::stdin().lock(), Path::new("standard input"))?,
    };
    let mut corrector =
        Corrector::new(&m.lexicon, &m.model, ChannelParams::new(a.alpha)?)?.with_config(m.search);
    if let Some(g) = &m.grammar {
        corrector = corrector.with_grammar(g);
    }
    let results = corrector.correct_batch(&sentences, mode, a.d);

    let (mut out, mut log) = (String::new(), String::new());
    let mut warnings = 0usize;
    for (i, (tokens, r)) in sentences.iter().zip(results).enumerate() {
        let n = i + 1;
        match r {
            Ok(r) => {
                out.push_str(&detokenize(&r.corrected));
                for e in &r.edits {
                    log.push_str(&format!(
                        "{n}\t{}\t{}\t{}\n",
                        e.position, e.original, e.replacement
                    ));
                }
            }
            Err(e @ Error::CombinatorialBlowup { .. }) => {
                eprintln!("warning: sentence {n} left unchanged: {e}");
                warnings += 1;
                out.push_str(&detokenize(tokens));
            }
            Err(e) => return Err(anyhow::Error::new(e).context(format!("sentence {n}"))),
        }
        out.push('\n');
    }
    match &a.output {
        Some(p) => write_file(p, out.as_bytes())?,
        None => io::stdout().lock().write_all(out.as_bytes())?,
    }
    match &a.edits {
        Some(p) => write_file(p, log.as_bytes())?,
        None => io::stderr().lock().write_all(log.as_bytes())?,
    }
    if warnings > 0 {
        eprintln!("{warnings} warning(s)");
    }
    Ok(())
}

fn load_nouns(path: Option<&Path>, test_set: TestSet) -> Result<Option<NounLexicon>> {
    match path {
        Some(p) => {
            let mut text = String::new();
            open(p)?.read_to_string(&mut text)?;
            Ok(Some(NounLexicon::read(text.as_bytes())?))
        }
        None if test_set == TestSet::Malp => Err(usage("the malp test set needs --nouns")),
        None => Ok(None),
    }
}

fn corrupt(a: CorruptArgs) -> Result<()> {
    check_alpha(a.alpha)?;
    let test_set = TestSet::from(a.test_set);
    let nouns = load_nouns(a.nouns.as_deref(), test_set)?;
    let lexicon = Lexicon::new(load_vocab(&a.vocab)?);
    let sentences = read_sentence_file(&a.input)?;
    let spec = CorruptionSpec::new(a.alpha, test_set, a.seed, nouns)?;
    let out = eval::corrupt(&sentences, &spec, &lexicon);
    let mut buf = Vec::new();
    eval::write_corrupted(&out, &mut buf)?;
    write_file(&a.output, &buf)?;
    let injected: usize = out.iter().map(|s| s.injected.len()).sum();
    eprintln!("{} sentences, {injected} errors injected", out.len());
    Ok(())
}

fn evaluate(a: EvaluateArgs) -> Result<()> {
    for &alpha in &a.alpha {
        check_alpha(alpha)?;
    }
    let modes: Vec<Mode> = a.mode.iter().map(|&m| m.into()).collect();
    if modes.iter().any(|m| m.uses_windows()) && a.d.contains(&0) {
        return Err(usage("--d values must be at least 1"));
    }
    let test_set = TestSet::from(a.test_set);
    let nouns = load_nouns(a.nouns.as_deref(), test_set)?;
    let m = load_models(&a.models, modes.contains(&Mode::WindowMulti))?;
    let sentences = read_sentence_file(&a.test)?;
    let config = EvalConfig {
        alphas: a.alpha.clone(),
        ds: a.d.clone(),
        modes,
        test_set,
        nouns,
        seed: a.seed,
        search: m.search,
    };
    let models = Models {
        lexicon: &m.lexicon,
        model: &m.model,
        grammar: m.grammar.as_ref(),
    };
    let report = if a.timed {
        eval::bench(&sentences, models, &config, 5)?
    } else {
        eval::evaluate(&sentences, models, &config)?
    };
    write_file(&a.output, report.to_text(a.timed).as_bytes())?;
    if let Some(p) = &a.records {
        write_file(p, report.to_records(a.timed).as_bytes())?;
    }
    let blowups: usize = report.cells.iter().map(|c| c.blowups).sum();
    if blowups > 0 {
        eprintln!(
            "warning: {blowups} sentence correction(s) exceeded the cap and were left unchanged"
        );
    }
    eprintln!(
        "{} cells over {} sentences",
        report.cells.len(),
        sentences.len()
    );
    Ok(())
}
