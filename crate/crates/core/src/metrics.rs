//! Word alignment and the bias / non-bias split of word error rate.
//!
//! Each reference word is classed as bias when it lies inside a matched
//! bias-list occurrence in the reference (same matching as
//! [`crate::tagging`]). Substitutions and deletions are charged to the
//! reference word's class; insertions to the inserted hypothesis word's
//! class, judged by matching the bias list against the hypothesis.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::tagging::bias_token_mask;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MetricsError {
    #[error("no {0} reference words; rate undefined")]
    EmptyReference(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EditOp {
    Match,
    Sub,
    Del,
    Ins,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlignStep {
    pub reference: Option<String>,
    pub hypothesis: Option<String>,
    pub op: EditOp,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordAlignment {
    pub steps: Vec<AlignStep>,
}

impl WordAlignment {
    pub fn errors(&self) -> usize {
        self.steps.iter().filter(|s| s.op != EditOp::Match).count()
    }

    pub fn count(&self, op: EditOp) -> usize {
        self.steps.iter().filter(|s| s.op == op).count()
    }

    /// Three-line text view: REF, HYP and operation markers, column aligned.
    pub fn diff_view(&self) -> String {
        let (mut r, mut h, mut o) = (String::from("REF:"), String::from("HYP:"), String::from("OPS:"));
        for s in &self.steps {
            let rw = s.reference.as_deref().unwrap_or("***");
            let hw = s.hypothesis.as_deref().unwrap_or("***");
            let mark = match s.op {
                EditOp::Match => "",
                EditOp::Sub => "S",
                EditOp::Del => "D",
                EditOp::Ins => "I",
            };
            let width = rw.chars().count().max(hw.chars().count()).max(1);
            r.push_str(&format!(" {rw:<width$}"));
            h.push_str(&format!(" {hw:<width$}"));
            o.push_str(&format!(" {mark:<width$}"));
        }
        format!("{}\n{}\n{}\n", r.trim_end(), h.trim_end(), o.trim_end())
    }
}

/// Minimal unit-cost alignment. Traceback prefers match, then
/// substitution, deletion, insertion.
pub fn align<S: AsRef<str>>(reference: &[S], hypothesis: &[S]) -> WordAlignment {
    let (n, m) = (reference.len(), hypothesis.len());
    let eq = |i: usize, j: usize| reference[i].as_ref() == hypothesis[j].as_ref();
    let mut d = vec![vec![0usize; m + 1]; n + 1];
    for (i, row) in d.iter_mut().enumerate() {
        row[0] = i;
    }
    for (j, cell) in d[0].iter_mut().enumerate() {
        *cell = j;
    }
    for i in 1..=n {
        for j in 1..=m {
            let diag = d[i - 1][j - 1] + usize::from(!eq(i - 1, j - 1));
            d[i][j] = diag.min(d[i - 1][j] + 1).min(d[i][j - 1] + 1);
        }
    }

    let mut steps = Vec::with_capacity(n.max(m));
    let (mut i, mut j) = (n, m);
    let word = |s: &S| Some(s.as_ref().to_string());
    while i > 0 || j > 0 {
        if i > 0 && j > 0 && eq(i - 1, j - 1) && d[i][j] == d[i - 1][j - 1] {
            steps.push(AlignStep {
                reference: word(&reference[i - 1]),
                hypothesis: word(&hypothesis[j - 1]),
                op: EditOp::Match,
            });
            i -= 1;
            j -= 1;
        } else if i > 0 && j > 0 && d[i][j] == d[i - 1][j - 1] + 1 {
            steps.push(AlignStep {
                reference: word(&reference[i - 1]),
                hypothesis: word(&hypothesis[j - 1]),
                op: EditOp::Sub,
            });
            i -= 1;
            j -= 1;
        } else if i > 0 && d[i][j] == d[i - 1][j] + 1 {
            steps.push(AlignStep {
                reference: word(&reference[i - 1]),
                hypothesis: None,
                op: EditOp::Del,
            });
            i -= 1;
        } else {
            steps.push(AlignStep {
                reference: None,
                hypothesis: word(&hypothesis[j - 1]),
                op: EditOp::Ins,
            });
            j -= 1;
        }
    }
    steps.reverse();
    WordAlignment { steps }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct WerReport {
    pub b_err: usize,
    pub b_ref: usize,
    pub u_err: usize,
    pub u_ref: usize,
    pub total_err: usize,
    pub total_ref: usize,
}

fn rate(err: usize, total: usize, class: &'static str) -> Result<f64, MetricsError> {
    if total == 0 {
        return Err(MetricsError::EmptyReference(class));
    }
    Ok(err as f64 / total as f64)
}

impl WerReport {
    pub fn b_wer(&self) -> Result<f64, MetricsError> {
        rate(self.b_err, self.b_ref, "bias")
    }

    pub fn u_wer(&self) -> Result<f64, MetricsError> {
        rate(self.u_err, self.u_ref, "non-bias")
    }

    pub fn wer(&self) -> Result<f64, MetricsError> {
        rate(self.total_err, self.total_ref, "reference")
    }

    /// Field-wise sum; rates derived from it are micro-averages.
    pub fn add(&self, other: &WerReport) -> WerReport {
        WerReport {
            b_err: self.b_err + other.b_err,
            b_ref: self.b_ref + other.b_ref,
            u_err: self.u_err + other.u_err,
            u_ref: self.u_ref + other.u_ref,
            total_err: self.total_err + other.total_err,
            total_ref: self.total_ref + other.total_ref,
        }
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            b_wer: self.b_wer().ok(),
            u_wer: self.u_wer().ok(),
            wer: self.wer().ok(),
            counts: *self,
        }
    }

    /// `name | #bias | #non-bias` with thousands separators.
    pub fn count_row(&self, name: &str) -> String {
        format!(
            "{name} | {} | {}",
            group_thousands(self.b_ref),
            group_thousands(self.u_ref)
        )
    }
}

/// Serialized report: rates are `null` when their denominator is zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub b_wer: Option<f64>,
    pub u_wer: Option<f64>,
    pub wer: Option<f64>,
    pub counts: WerReport,
}

impl fmt::Display for ReportSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pct = |r: Option<f64>| r.map(|r| format!("{:.1}%", 100.0 * r)).unwrap_or_else(|| "n/a".into());
        write!(
            f,
            "B-WER {}  U-WER {}  WER {}",
            pct(self.b_wer),
            pct(self.u_wer),
            pct(self.wer)
        )
    }
}

fn group_thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(c);
    }
    out
}

pub fn score<S: AsRef<str>, E: AsRef<str>>(reference: &[S], hypothesis: &[S], bias_list: &[E]) -> WerReport {
    let ref_bias = bias_token_mask(reference, bias_list);
    let hyp_bias = bias_token_mask(hypothesis, bias_list);
    let alignment = align(reference, hypothesis);

    let mut report = WerReport {
        b_ref: ref_bias.iter().filter(|&&b| b).count(),
        total_ref: reference.len(),
        ..WerReport::default()
    };
    report.u_ref = report.total_ref - report.b_ref;

    let (mut ri, mut hi) = (0, 0);
    for step in &alignment.steps {
        let is_bias = match step.op {
            EditOp::Match => {
                ri += 1;
                hi += 1;
                continue;
            }
            EditOp::Sub => {
                ri += 1;
                hi += 1;
                ref_bias[ri - 1]
            }
            EditOp::Del => {
                ri += 1;
                ref_bias[ri - 1]
            }
            EditOp::Ins => {
                hi += 1;
                hyp_bias[hi - 1]
            }
        };
        if is_bias {
            report.b_err += 1;
        } else {
            report.u_err += 1;
        }
    }
    report.total_err = report.b_err + report.u_err;
    report
}

pub fn aggregate<'a, I: IntoIterator<Item = &'a WerReport>>(reports: I) -> WerReport {
    reports.into_iter().fold(WerReport::default(), |acc, r| acc.add(r))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> Vec<&str> {
        s.split_whitespace().collect()
    }

    #[test]
    fn identical_is_all_match() {
        let a = align(&w("a b c"), &w("a b c"));
        assert!(a.steps.iter().all(|s| s.op == EditOp::Match));
    }

    #[test]
    fn deletion() {
        let a = align(&w("a b c"), &w("a c"));
        assert_eq!(a.count(EditOp::Del), 1);
        assert_eq!(a.errors(), 1);
        let del = a.steps.iter().find(|s| s.op == EditOp::Del).unwrap();
        assert_eq!(del.reference.as_deref(), Some("b"));
    }

    #[test]
    fn substitution_case() {
        let a = align(&w("the sheriff met shelley"), &w("the sheriff met shelly"));
        assert_eq!(a.count(EditOp::Match), 3);
        assert_eq!(a.count(EditOp::Sub), 1);
        assert_eq!(
            a.diff_view(),
            "REF: the sheriff met shelley\nHYP: the sheriff met shelly\nOPS:                 S\n"
        );
    }

    #[test]
    fn shelley_scores() {
        let r = score(
            &w("the sheriff met shelley"),
            &w("the sheriff met shelly"),
            &["shelley"],
        );
        assert_eq!((r.b_err, r.b_ref, r.u_err, r.u_ref), (1, 1, 0, 3));
        assert_eq!(r.b_wer().unwrap(), 1.0);
        assert_eq!(r.u_wer().unwrap(), 0.0);
        assert_eq!(r.wer().unwrap(), 0.25);
    }

    #[test]
    fn inserted_bias_word() {
        let r = score(&w("the sheriff"), &w("the sheriff shelley"), &["shelley"]);
        assert_eq!((r.b_err, r.b_ref, r.u_err, r.u_ref), (1, 0, 0, 2));
        assert_eq!(r.b_wer(), Err(MetricsError::EmptyReference("bias")));
    }

    #[test]
    fn empty_reference() {
        let r = score::<&str, &str>(&[], &w("x"), &[]);
        assert_eq!(r.total_err, 1);
        assert!(r.wer().is_err());
        assert!(r.summary().wer.is_none());
    }

    #[test]
    fn aggregate_is_micro_average() {
        let a = WerReport {
            b_err: 1,
            b_ref: 1,
            u_err: 0,
            u_ref: 1,
            total_err: 1,
            total_ref: 2,
        };
        let b = WerReport {
            b_err: 1,
            b_ref: 3,
            u_err: 0,
            u_ref: 1,
            total_err: 1,
            total_ref: 4,
        };
        assert_eq!(aggregate([&a]), a);
        let s = aggregate([&a, &b]);
        assert_eq!(s.b_wer().unwrap(), 0.5);
        assert_eq!(s.wer().unwrap(), 2.0 / 6.0);
    }

    #[test]
    fn count_row_format() {
        let r = WerReport {
            b_ref: 2050,
            u_ref: 50832,
            total_ref: 52882,
            ..WerReport::default()
        };
        assert_eq!(
            r.count_row("Librispeech test-other"),
            "Librispeech test-other | 2,050 | 50,832"
        );
        assert_eq!(group_thousands(956711), "956,711");
        assert_eq!(group_thousands(0), "0");
    }
}
