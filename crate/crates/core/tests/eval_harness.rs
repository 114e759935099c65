mod common;

use common::{rng, toy_grammar, toy_sentence, toy_world};
use realword::eval::{
    self, corrupt, read_corrupted, write_corrupted, CorruptionSpec, EvalConfig, Models, TestSet,
};
use realword::Mode;

fn setup() -> (common::Toy, realword::Grammar, Vec<Vec<String>>) {
    let mut r = rng(31);
    let toy = toy_world(&mut r, 15, 25);
    let g = toy_grammar(&mut r, &toy.words, 10);
    let sentences = (0..120)
        .map(|_| toy_sentence(&mut r, &toy.words, 7))
        .collect();
    (toy, g, sentences)
}

#[test]
fn report_cells_satisfy_the_f1_identity() {
    let (toy, g, sentences) = setup();
    let models = Models {
        lexicon: &toy.lexicon,
        model: &toy.model,
        grammar: Some(&g),
    };
    let config = EvalConfig {
        ds: vec![1, 3],
        modes: Mode::ALL.to_vec(),
        ..EvalConfig::default()
    };
    let r = eval::evaluate(&sentences, models, &config).unwrap();
    // sentence mode once per alpha, the window modes once per d
    assert_eq!(r.cells.len(), 4 * (1 + 2 + 2));
    for c in &r.cells {
        for prf in [c.detection(), c.correction()] {
            let want = eval::f1(prf.precision, prf.recall);
            assert!((prf.f1 - want).abs() < 1e-9);
        }
        assert_eq!(c.sentences, sentences.len());
        let s = c.scores;
        assert_eq!(s.detection.tp + s.detection.fn_, c.injected as u64);
        assert_eq!(s.correction.tp + s.correction.fn_, c.injected as u64);
    }
}

#[test]
fn parallel_and_timed_runs_agree() {
    let (toy, g, sentences) = setup();
    let models = Models {
        lexicon: &toy.lexicon,
        model: &toy.model,
        grammar: Some(&g),
    };
    let config = EvalConfig {
        alphas: vec![0.9, 0.99],
        ds: vec![1, 2],
        seed: 4,
        ..EvalConfig::default()
    };
    let a = eval::evaluate(&sentences, models, &config).unwrap();
    let b = eval::bench(&sentences, models, &config, 3).unwrap();
    assert_eq!(a.to_records(false), b.to_records(false));
    assert_eq!(a.to_text(false), b.to_text(false));
    assert!(b.cells.iter().all(|c| c.mean_time_ms.is_some()));
}

#[test]
fn corrupted_sets_survive_a_file_round_trip() {
    let (toy, _, sentences) = setup();
    let spec = CorruptionSpec::new(0.8, TestSet::S62000, 12, None).unwrap();
    let out = corrupt(&sentences, &spec, &toy.lexicon);
    let mut buf = Vec::new();
    write_corrupted(&out, &mut buf).unwrap();
    assert_eq!(read_corrupted(&buf[..]).unwrap(), out);
    // same seed, same set; another seed, another set
    assert_eq!(corrupt(&sentences, &spec, &toy.lexicon), out);
    let other = CorruptionSpec::new(0.8, TestSet::S62000, 13, None).unwrap();
    assert_ne!(corrupt(&sentences, &other, &toy.lexicon), out);
}
