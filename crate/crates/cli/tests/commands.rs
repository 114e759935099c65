use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use std::io::Write;

use tempfile::TempDir;

const TRAINING: &str = "\
i bought two of the books .
she has two of the tickets .
two of the men left early .
we sold two of the horses .
they lost two of the games .
he went to the market .
they came to the city .
give it to the children .
one of the boys is here .
most of the work is done .
the thew of his arm was strong .
we told them the truth .
give them the money .
our aim is peace .
the senate voted to support aid for the contras .
congress will support aid for the farmers .
we support aid for the poor .
the aid for the contras was approved .
the senate will support the bill .
it is too late .
he is off to work .
";

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_realword"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    let mut input = child.stdin.take().unwrap();
    // a usage error can exit before reading, closing the pipe
    let _ = input.write_all(stdin.unwrap_or("").as_bytes());
    drop(input);
    child.wait_with_output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

struct Models {
    dir: TempDir,
}

impl Models {
    fn path(&self, name: &str) -> PathBuf {
        self.dir.path().join(name)
    }

    fn arg(&self, name: &str) -> String {
        self.path(name).to_str().unwrap().to_owned()
    }

    fn flags(&self) -> Vec<String> {
        ["--vocab", "m.vocab", "--lm", "m.lm", "--grammar", "g.pcfg"]
            .chunks(2)
            .flat_map(|p| [p[0].to_owned(), self.arg(p[1])])
            .collect()
    }
}

fn trained() -> Models {
    let m = Models {
        dir: tempfile::tempdir().unwrap(),
    };
    fs::write(m.path("train.txt"), TRAINING).unwrap();
    let o = run(
        &["train-lm", &m.arg("train.txt"), "--output", &m.arg("m")],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(
        &[
            "treebank",
            &m.arg("train.txt"),
            "--output",
            &m.arg("train.trees"),
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let o = run(
        &[
            "train-grammar",
            &m.arg("train.trees"),
            "--output",
            &m.arg("g.pcfg"),
        ],
        None,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    m
}

fn correct(m: &Models, extra: &[&str], stdin: &str) -> Output {
    let mut args: Vec<String> = vec!["correct".into()];
    args.extend(m.flags());
    args.extend(extra.iter().map(|s| (*s).to_owned()));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&args, Some(stdin))
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn train_lm_writes_two_files_and_reruns_identically() {
    let m = trained();
    let o = run(
        &["train-lm", &m.arg("train.txt"), "--output", &m.arg("again")],
        None,
    );
    assert_eq!(code(&o), 0);
    assert!(stderr(&o).contains("tokens"), "{}", stderr(&o));
    for ext in ["vocab", "lm"] {
        let a = fs::read(m.path(&format!("m.{ext}"))).unwrap();
        let b = fs::read(m.path(&format!("again.{ext}"))).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b, "{ext} differs between runs");
    }
}

#[test]
fn missing_corpus_fails_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("m");
    let o = run(
        &[
            "train-lm",
            "/nonexistent/corpus.txt",
            "--output",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("/nonexistent/corpus.txt"));
    assert!(files(dir.path()).is_empty());
}

#[test]
fn train_grammar_reports_malformed_lines_and_reruns_identically() {
    let m = trained();
    let o = run(
        &[
            "train-grammar",
            &m.arg("train.trees"),
            "--output",
            &m.arg("g2.pcfg"),
        ],
        None,
    );
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(m.path("g.pcfg")).unwrap(),
        fs::read(m.path("g2.pcfg")).unwrap()
    );

    fs::write(
        m.path("bad.trees"),
        "(S (NP (DT the) (NN dog)))\n(S (NP (DT the)\n",
    )
    .unwrap();
    let o = run(
        &[
            "train-grammar",
            &m.arg("bad.trees"),
            "--output",
            &m.arg("bad.pcfg"),
        ],
        None,
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("line 2"), "{}", stderr(&o));
    assert!(!m.path("bad.pcfg").exists());
}

#[test]
fn window_multi_fixes_both_errors_in_one_sentence() {
    let m = trained();
    let input = "the senate voted to support aim for them contras .\nwe sold to of thew horses .\n";
    let o = correct(
        &m,
        &["--alpha", "0.9", "--mode", "window-multi", "--d", "1"],
        input,
    );
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert_eq!(
        String::from_utf8(o.stdout.clone()).unwrap(),
        "the senate voted to support aid for the contras .\nwe sold two of the horses .\n"
    );
    let log = stderr(&o);
    for edit in [
        "1\t5\taim\taid",
        "1\t7\tthem\tthe",
        "2\t2\tto\ttwo",
        "2\t4\tthew\tthe",
    ] {
        assert!(log.lines().any(|l| l == edit), "missing {edit:?} in {log}");
    }

    // sentence mode repairs at most one word per sentence
    let o = correct(&m, &["--alpha", "0.9", "--mode", "mdm"], input);
    assert_eq!(code(&o), 0);
    for (line, observed) in String::from_utf8(o.stdout.clone())
        .unwrap()
        .lines()
        .zip(input.lines())
    {
        let changed = line
            .split(' ')
            .zip(observed.split(' '))
            .filter(|(a, b)| a != b)
            .count();
        assert!(changed <= 1);
    }
}

#[test]
fn empty_input_gives_empty_output() {
    let m = trained();
    let o = correct(&m, &[], "");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(o.stdout.is_empty());
}

#[test]
fn correction_is_deterministic_and_keeps_order() {
    let m = trained();
    let input: String = TRAINING.lines().rev().map(|l| format!("{l}\n")).collect();
    let outs: Vec<Output> = (0..2)
        .map(|_| {
            correct(
                &m,
                &["--alpha", "0.9", "--mode", "window-single", "--d", "3"],
                &input,
            )
        })
        .collect();
    assert_eq!(outs[0].stdout, outs[1].stdout);
    assert_eq!(outs[0].stderr, outs[1].stderr);
    // training sentences are already the most probable reading
    assert_eq!(String::from_utf8(outs[0].stdout.clone()).unwrap(), input);
}

#[test]
fn a_cap_breach_leaves_the_sentence_and_warns() {
    let m = trained();
    let input = "we sold to of thew horses .\n";
    let o = correct(&m, &["--alpha", "0.9", "--d", "6", "--cap", "2"], input);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout.clone()).unwrap(), input);
    let err = stderr(&o);
    assert!(
        err.contains("warning: sentence 1") && err.contains("1 warning(s)"),
        "{err}"
    );
}

#[test]
fn usage_errors_exit_with_one() {
    let m = trained();
    assert_eq!(code(&correct(&m, &["--alpha", "1.5"], "x\n")), 1);
    assert_eq!(code(&correct(&m, &["--d", "0"], "x\n")), 1);
    assert_eq!(code(&correct(&m, &["--no-such-flag"], "x\n")), 1);
    assert_eq!(
        code(&run(
            &[
                "correct",
                "--vocab",
                &m.arg("m.vocab"),
                "--lm",
                &m.arg("m.lm")
            ],
            Some("x\n")
        )),
        1
    );
    assert_eq!(code(&run(&[], None)), 1);
    assert_eq!(code(&run(&["--help"], None)), 0);
}

#[test]
fn a_missing_model_stops_before_any_output() {
    let m = trained();
    let out = m.path("out.txt");
    let o = run(
        &[
            "correct",
            &m.arg("train.txt"),
            "--vocab",
            &m.arg("m.vocab"),
            "--lm",
            &m.arg("nope.lm"),
            "--mode",
            "mdm",
            "--output",
            out.to_str().unwrap(),
        ],
        None,
    );
    assert_eq!(code(&o), 2);
    assert!(!out.exists());

    // a model trained on other text does not match the vocabulary
    fs::write(m.path("other.txt"), "a b c .\n").unwrap();
    assert_eq!(
        code(&run(
            &["train-lm", &m.arg("other.txt"), "--output", &m.arg("other")],
            None
        )),
        0
    );
    let o = run(
        &[
            "correct",
            "--vocab",
            &m.arg("m.vocab"),
            "--lm",
            &m.arg("other.lm"),
            "--mode",
            "mdm",
        ],
        Some("a\n"),
    );
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("disagree"));
}

fn evaluate(m: &Models, extra: &[&str], output: &str, records: &str) -> Output {
    let mut args: Vec<String> = vec!["evaluate".into(), m.arg("train.txt")];
    args.extend(m.flags());
    args.extend([
        "--output".into(),
        m.arg(output),
        "--records".into(),
        m.arg(records),
    ]);
    args.extend(extra.iter().map(|s| (*s).to_owned()));
    let args: Vec<&str> = args.iter().map(String::as_str).collect();
    run(&args, None)
}

#[test]
fn evaluation_grid_shape_and_reruns() {
    let m = trained();
    let o = evaluate(&m, &["--seed", "3"], "a.txt", "a.rec");
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let records = fs::read_to_string(m.path("a.rec")).unwrap();
    assert_eq!(records.lines().count(), 4 * 4 * 2);
    let text = fs::read_to_string(m.path("a.txt")).unwrap();
    assert!(text.contains("mode window-multi, d = 10"));
    assert!(text.contains(" 0.995 "));

    let o = evaluate(&m, &["--seed", "3"], "b.txt", "b.rec");
    assert_eq!(code(&o), 0);
    assert_eq!(
        fs::read(m.path("a.rec")).unwrap(),
        fs::read(m.path("b.rec")).unwrap()
    );
    assert_eq!(
        fs::read(m.path("a.txt")).unwrap(),
        fs::read(m.path("b.txt")).unwrap()
    );

    let o = evaluate(
        &m,
        &["--alpha", "0.9", "--d", "3", "--mode", "window-single"],
        "c.txt",
        "c.rec",
    );
    assert_eq!(code(&o), 0);
    let one = fs::read_to_string(m.path("c.rec")).unwrap();
    assert_eq!(one.lines().count(), 1);
    assert!(one.starts_with("test_set=S62000 mode=window-single d=3 alpha=0.9 "));
}

#[test]
fn evaluation_needs_every_model_up_front() {
    let m = trained();
    fs::remove_file(m.path("g.pcfg")).unwrap();
    let o = evaluate(&m, &[], "x.txt", "x.rec");
    assert_eq!(code(&o), 2);
    assert!(!m.path("x.txt").exists());
    let o = evaluate(&m, &["--test-set", "malp"], "x.txt", "x.rec");
    assert_eq!(code(&o), 1);
}

#[test]
fn corruption_is_seeded_and_inputs_stay_untouched() {
    let m = trained();
    let before = files(m.dir.path());
    let corrupt = |seed: &str, out: &str| {
        run(
            &[
                "corrupt",
                &m.arg("train.txt"),
                "--vocab",
                &m.arg("m.vocab"),
                "--alpha",
                "0.7",
                "--seed",
                seed,
                "--output",
                &m.arg(out),
            ],
            None,
        )
    };
    assert_eq!(code(&corrupt("5", "c1.tsv")), 0);
    assert_eq!(code(&corrupt("5", "c2.tsv")), 0);
    assert_eq!(code(&corrupt("6", "c3.tsv")), 0);
    let c1 = fs::read_to_string(m.path("c1.tsv")).unwrap();
    assert_eq!(c1, fs::read_to_string(m.path("c2.tsv")).unwrap());
    assert_ne!(c1, fs::read_to_string(m.path("c3.tsv")).unwrap());
    assert_eq!(c1.lines().count(), TRAINING.lines().count());
    assert!(c1.lines().any(|l| !l.ends_with('\t')));

    let _ = correct(&m, &["--mode", "mdm", &m.arg("train.txt")], "");
    let _ = evaluate(&m, &["--alpha", "0.9", "--d", "1"], "e.txt", "e.rec");
    let after: Vec<_> = files(m.dir.path())
        .into_iter()
        .filter(|(name, _)| before.iter().any(|(b, _)| b == name))
        .collect();
    assert_eq!(before, after);
}
