//! Per-word detection and correction scores.

use super::corrupt::CorruptedSentence;
use crate::error::{Error, Result};
use crate::search::CorrectionResult;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Counts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
}

impl Counts {
    pub fn precision(&self) -> f64 {
        ratio(self.tp, self.tp + self.fp)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.tp, self.tp + self.fn_)
    }

    pub fn prf(&self) -> Prf {
        Prf::new(self.precision(), self.recall())
    }

    fn add(&mut self, other: Counts) {
        self.tp += other.tp;
        self.fp += other.fp;
        self.fn_ += other.fn_;
    }
}

fn ratio(num: u64, den: u64) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}

/// Harmonic mean of precision and recall; 0 when both are 0.
pub fn f1(precision: f64, recall: f64) -> f64 {
    if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Prf {
    pub fn new(precision: f64, recall: f64) -> Self {
        Self {
            precision,
            recall,
            f1: f1(precision, recall),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Scores {
    pub detection: Counts,
    pub correction: Counts,
}

impl Scores {
    pub fn add(&mut self, other: Scores) {
        self.detection.add(other.detection);
        self.correction.add(other.correction);
    }
}

/// Counts for one sentence. A changed position is a detection; it is a
/// correct detection if an error was injected there, and a correct correction
/// if the replacement restores the intended word. A wrong replacement at an
/// injected position counts as a correction false positive and a correction
/// false negative.
pub fn score_sentence(test: &CorruptedSentence, result: &CorrectionResult) -> Result<Scores> {
    if result.original != test.corrupted {
        return Err(Error::Misaligned(format!(
            "correction input {:?} is not the corrupted sentence {:?}",
            result.original.join(" "),
            test.corrupted.join(" ")
        )));
    }
    let mut s = Scores::default();
    let mut found = 0;
    for edit in &result.edits {
        match test.is_injected(edit.position) {
            Some(inj) => {
                found += 1;
                s.detection.tp += 1;
                if edit.replacement == inj.intended {
                    s.correction.tp += 1;
                } else {
                    s.correction.fp += 1;
                    s.correction.fn_ += 1;
                }
            }
            None => {
                s.detection.fp += 1;
                s.correction.fp += 1;
            }
        }
    }
    let missed = (test.injected.len() - found) as u64;
    s.detection.fn_ += missed;
    s.correction.fn_ += missed;
    Ok(s)
}

pub fn score(pairs: &[(CorruptedSentence, CorrectionResult)]) -> Result<Scores> {
    let mut total = Scores::default();
    for (t, r) in pairs {
        total.add(score_sentence(t, r)?);
    }
    Ok(total)
}
