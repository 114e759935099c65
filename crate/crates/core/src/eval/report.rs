//! Evaluation reports: fixed-precision text tables and key=value records.

use std::fmt::Write as _;

use super::corrupt::TestSet;
use super::metrics::{Prf, Scores};
use crate::search::Mode;

/// One (test set, mode, d, alpha) cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub test_set: TestSet,
    pub mode: Mode,
    /// Span width; 0 for sentence mode.
    pub d: usize,
    pub alpha: f64,
    pub sentences: usize,
    pub words: usize,
    pub injected: usize,
    pub scores: Scores,
    /// Sentences left unchanged because the candidate or combination cap was hit.
    pub blowups: usize,
    /// Mean wall-clock correction time per sentence, in milliseconds.
    pub mean_time_ms: Option<f64>,
    /// Mean window search-space size before pruning.
    pub mean_initial: Option<f64>,
    /// Mean number of candidates a window retains.
    pub mean_final: Option<f64>,
}

impl Cell {
    pub fn detection(&self) -> Prf {
        self.scores.detection.prf()
    }

    pub fn correction(&self) -> Prf {
        self.scores.correction.prf()
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EvalReport {
    pub cells: Vec<Cell>,
}

fn opt3(x: Option<f64>) -> String {
    x.map_or_else(|| "-".to_owned(), |v| format!("{v:.3}"))
}

impl EvalReport {
    pub fn find(&self, test_set: TestSet, mode: Mode, d: usize, alpha: f64) -> Option<&Cell> {
        self.cells
            .iter()
            .find(|c| c.test_set == test_set && c.mode == mode && c.d == d && c.alpha == alpha)
    }

    /// One table per (test set, mode, d), rows by alpha, three decimals.
    /// Timing columns are left out unless `timing` is set, since they are the
    /// only part of a report that varies between identical runs.
    pub fn to_text(&self, timing: bool) -> String {
        let mut groups: Vec<(TestSet, Mode, usize)> = Vec::new();
        for c in &self.cells {
            let k = (c.test_set, c.mode, c.d);
            if !groups.contains(&k) {
                groups.push(k);
            }
        }
        let mut out = String::new();
        for (i, &(ts, mode, d)) in groups.iter().enumerate() {
            if i > 0 {
                out.push('\n');
            }
            let dname = if d == 0 {
                "-".to_owned()
            } else {
                d.to_string()
            };
            writeln!(out, "test set {ts}, mode {mode}, d = {dname}").unwrap();
            write!(
                out,
                "{:>6}  {:>6} {:>6} {:>6}  {:>6} {:>6} {:>6}  {:>8} {:>8}",
                "alpha", "det.P", "det.R", "det.F", "cor.P", "cor.R", "cor.F", "initial", "final"
            )
            .unwrap();
            if timing {
                write!(out, "  {:>10}", "ms/sent").unwrap();
            }
            writeln!(out, "  {:>7}", "blowups").unwrap();
            for c in self
                .cells
                .iter()
                .filter(|c| (c.test_set, c.mode, c.d) == (ts, mode, d))
            {
                let (det, cor) = (c.detection(), c.correction());
                write!(
                    out,
                    "{:>6.3}  {:>6.3} {:>6.3} {:>6.3}  {:>6.3} {:>6.3} {:>6.3}  {:>8} {:>8}",
                    c.alpha,
                    det.precision,
                    det.recall,
                    det.f1,
                    cor.precision,
                    cor.recall,
                    cor.f1,
                    opt3(c.mean_initial),
                    opt3(c.mean_final)
                )
                .unwrap();
                if timing {
                    write!(out, "  {:>10}", opt3(c.mean_time_ms)).unwrap();
                }
                writeln!(out, "  {:>7}", c.blowups).unwrap();
            }
        }
        out
    }

    /// One line per cell of space-separated `key=value` pairs at full precision.
    pub fn to_records(&self, timing: bool) -> String {
        let mut out = String::new();
        for c in &self.cells {
            let (det, cor) = (c.detection(), c.correction());
            let (sd, sc) = (c.scores.detection, c.scores.correction);
            write!(
                out,
                "test_set={} mode={} d={} alpha={} sentences={} words={} injected={} \
                 det_tp={} det_fp={} det_fn={} det_p={} det_r={} det_f={} \
                 cor_tp={} cor_fp={} cor_fn={} cor_p={} cor_r={} cor_f={} blowups={}",
                c.test_set,
                c.mode,
                c.d,
                c.alpha,
                c.sentences,
                c.words,
                c.injected,
                sd.tp,
                sd.fp,
                sd.fn_,
                det.precision,
                det.recall,
                det.f1,
                sc.tp,
                sc.fp,
                sc.fn_,
                cor.precision,
                cor.recall,
                cor.f1,
                c.blowups
            )
            .unwrap();
            for (k, v) in [
                ("mean_initial", c.mean_initial),
                ("mean_final", c.mean_final),
            ] {
                if let Some(v) = v {
                    write!(out, " {k}={v}").unwrap();
                }
            }
            if timing {
                if let Some(t) = c.mean_time_ms {
                    write!(out, " mean_time_ms={t}").unwrap();
                }
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::metrics::Counts;

    fn cell(alpha: f64, time: Option<f64>) -> Cell {
        Cell {
            test_set: TestSet::S62000,
            mode: Mode::WindowMulti,
            d: 1,
            alpha,
            sentences: 10,
            words: 100,
            injected: 12,
            scores: Scores {
                detection: Counts {
                    tp: 8,
                    fp: 4,
                    fn_: 4,
                },
                correction: Counts {
                    tp: 6,
                    fp: 6,
                    fn_: 6,
                },
            },
            blowups: 0,
            mean_time_ms: time,
            mean_initial: Some(154.0),
            mean_final: Some(10.0),
        }
    }

    #[test]
    fn text_table() {
        let r = EvalReport {
            cells: vec![cell(0.9, Some(1.5)), cell(0.99, Some(2.0))],
        };
        let text = r.to_text(false);
        assert_eq!(text.lines().count(), 4);
        assert!(text.contains(" 0.900   0.667  0.667  0.667   0.500  0.500  0.500"));
        assert!(!text.contains("ms/sent"));
        assert!(r.to_text(true).contains("1.500"));
    }

    #[test]
    fn records_skip_timing_unless_asked() {
        let a = EvalReport {
            cells: vec![cell(0.9, Some(1.5))],
        };
        let b = EvalReport {
            cells: vec![cell(0.9, Some(7.0))],
        };
        assert_eq!(a.to_records(false), b.to_records(false));
        assert_ne!(a.to_records(true), b.to_records(true));
        assert!(a.to_records(false).contains("det_p=0.6666666666666666"));
    }
}
