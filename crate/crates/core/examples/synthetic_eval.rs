//! Trains every model on a generated corpus and evaluates the window modes.
//!
//! ```text
//! cargo run --release --example synthetic_eval -- [train-sentences] [test-sentences] [d,...] [bench-sentences]
//! ```

use std::time::Instant;

use realword::eval::{self, EvalConfig, Models};
use realword::pcfg::Tree;
use realword::{Grammar, Lexicon, Mode, TrigramModel, Vocabulary};
use realword_synth::{generate, TaggedLexicon};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let n_train: usize = args.first().map_or(Ok(85_000), |a| a.parse())?;
    let n_test: usize = args.get(1).map_or(Ok(2_000), |a| a.parse())?;
    let ds: Vec<usize> = args
        .get(2)
        .map_or("1".to_owned(), Clone::clone)
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let n_bench: usize = args.get(3).map_or(Ok(0), |a| a.parse())?;

    let t = Instant::now();
    let tagged = TaggedLexicon::bundled();
    let train = generate(&tagged, 1, n_train);
    let test: Vec<Vec<String>> = generate(&tagged, 2, n_test)
        .into_iter()
        .map(|s| s.tokens)
        .collect();
    let tokens: usize = train.iter().map(|s| s.tokens.len()).sum();
    let vocab = Vocabulary::build(train.iter().flat_map(|s| s.tokens.iter()), usize::MAX)?;
    let lexicon = Lexicon::new(vocab.clone());
    let model = TrigramModel::train(train.iter().map(|s| &s.tokens), &vocab, 0.5)?;
    let trees: Vec<Tree> = train
        .iter()
        .map(|s| Tree::parse(&s.tree))
        .collect::<Result<_, _>>()?;
    let grammar = Grammar::induce(&trees)?;
    println!(
        "{} training tokens, {} types, {} grammar symbols, built in {:.1?}",
        tokens,
        vocab.len(),
        grammar.symbols().len(),
        t.elapsed()
    );

    let models = Models {
        lexicon: &lexicon,
        model: &model,
        grammar: Some(&grammar),
    };
    let config = EvalConfig {
        ds: ds.clone(),
        modes: vec![Mode::WindowSingle, Mode::WindowMulti],
        ..EvalConfig::default()
    };
    let t = Instant::now();
    let report = eval::evaluate(&test, models, &config)?;
    println!("{}", report.to_text(false));
    println!("evaluated in {:.1?}", t.elapsed());

    if n_bench > 0 {
        let config = EvalConfig {
            alphas: vec![0.9],
            ..config
        };
        let report = eval::bench(&test[..n_bench.min(test.len())], models, &config, 5)?;
        println!("{}", report.to_text(true));
    }
    Ok(())
}
