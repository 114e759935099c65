//! Trains the language model on the bundled addresses, the grammar on a
//! shallow-parsed copy of the same training text, and evaluates the window
//! modes on held-out sentences.
//!
//! ```text
//! cargo run --release --example prose_eval -- [vocab-size] [test-sentences] [d,...] [bench-sentences]
//! ```

use std::time::Instant;

use realword::eval::{self, EvalConfig, Models};
use realword::pcfg::Tree;
use realword::text::{split_tokens, tokenize};
use realword::{Grammar, Lexicon, Mode, TrigramModel, Vocabulary};
use realword_corpus::{sentences, shallow, Split};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let vocab_size: usize = args.first().map_or(Ok(20_000), |a| a.parse())?;
    let n_test: usize = args.get(1).map_or(Ok(10_000), |a| a.parse())?;
    let ds: Vec<usize> = args
        .get(2)
        .map_or("1".to_owned(), Clone::clone)
        .split(',')
        .map(str::parse)
        .collect::<Result<_, _>>()?;
    let n_bench: usize = args.get(3).map_or(Ok(0), |a| a.parse())?;

    let t = Instant::now();
    let split = Split::new(sentences(), n_test, |s| {
        (6..=23).contains(
            &tokenize(s)
                .iter()
                .filter(|t| t.chars().any(char::is_alphanumeric))
                .count(),
        )
    });
    let train: Vec<Vec<String>> = split.train.iter().map(|s| tokenize(s)).collect();
    let test: Vec<Vec<String>> = split.test.iter().map(|s| tokenize(s)).collect();
    let tokens: usize = train.iter().map(Vec::len).sum();
    let vocab = Vocabulary::build(train.iter().flatten(), vocab_size)?;
    let lexicon = Lexicon::new(vocab.clone());
    let model = TrigramModel::train(train.iter(), &vocab, 0.5)?;
    let trees: Vec<Tree> = split
        .train
        .iter()
        .map(|s| split_tokens(s))
        .filter(|w| !w.is_empty())
        .map(|w| Tree::parse(&shallow::parse(&w)))
        .collect::<Result<_, _>>()?;
    let grammar = Grammar::induce(&trees)?;
    let lens: Vec<usize> = test.iter().map(Vec::len).collect();
    println!(
        "{} train sentences, {} tokens, {} types in vocabulary, {} test sentences (mean {:.1} tokens, max {}), {} grammar symbols, built in {:.1?}",
        train.len(),
        tokens,
        vocab.len(),
        test.len(),
        lens.iter().sum::<usize>() as f64 / lens.len() as f64,
        lens.iter().max().unwrap_or(&0),
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
