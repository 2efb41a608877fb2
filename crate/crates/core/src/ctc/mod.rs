//! CTC loss over the bias-tag alphabet.
//!
//! Class order is fixed: `[blank, b, n, s]`, blank at index 0. The loss is
//! computed with the forward-backward recursion over the blank-augmented
//! label sequence, entirely in log space. [`oracle`] holds an independent
//! path-enumeration implementation for small inputs, and [`toy`] a linear
//! tagger trained with this loss.

pub mod matrix;
pub mod oracle;
pub mod selfcheck;
pub mod toy;

use thiserror::Error;

pub use matrix::{FeatureMatrix, LogitMatrix, Matrix, MatrixError};

use crate::tagging::{Tag, TagSequence};

pub const BLANK: usize = 0;
pub const NUM_CLASSES: usize = 4;
pub const CLASS_NAMES: [&str; NUM_CLASSES] = ["blank", "b", "n", "s"];

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CtcError {
    #[error("{frames} frames cannot emit {labels} labels with {repeats} repeats")]
    InfeasibleLength {
        frames: usize,
        labels: usize,
        repeats: usize,
    },
    #[error("label {label} is out of range for {classes} classes")]
    InvalidLabel { label: usize, classes: usize },
    #[error("logits must be finite")]
    NonFinite,
    #[error("need at least one frame")]
    NoFrames,
}

pub fn tag_class(tag: Tag) -> usize {
    match tag {
        Tag::Bias => 1,
        Tag::NonBias => 2,
        Tag::Space => 3,
    }
}

pub fn tag_labels(tags: &TagSequence) -> Vec<usize> {
    tags.tags().iter().map(|&t| tag_class(t)).collect()
}

/// Minimum frames needed to emit `labels`: one per label plus one blank
/// between each pair of equal neighbours.
pub fn min_frames(labels: &[usize]) -> usize {
    labels.len() + labels.windows(2).filter(|w| w[0] == w[1]).count()
}

pub(crate) fn log_sum_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// Row-wise log-softmax.
pub fn log_softmax(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for t in 0..out.rows() {
        let row = out.row_mut(t);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + row.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
        row.iter_mut().for_each(|x| *x -= lse);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct CtcOutput {
    /// `-log P(labels | logits)`.
    pub nll: f64,
    /// `d nll / d logits`, same shape as the logits.
    pub grad: Matrix,
}

/// CTC negative log-likelihood and its gradient for arbitrary class
/// counts. `labels` must not contain [`BLANK`].
pub fn ctc_loss_labels(logits: &Matrix, labels: &[usize]) -> Result<CtcOutput, CtcError> {
    let frames = logits.rows();
    let classes = logits.cols();
    if frames == 0 {
        return Err(CtcError::NoFrames);
    }
    if !logits.values().iter().all(|x| x.is_finite()) {
        return Err(CtcError::NonFinite);
    }
    if let Some(&label) = labels.iter().find(|&&l| l == BLANK || l >= classes) {
        return Err(CtcError::InvalidLabel { label, classes });
    }
    if min_frames(labels) > frames {
        return Err(CtcError::InfeasibleLength {
            frames,
            labels: labels.len(),
            repeats: min_frames(labels) - labels.len(),
        });
    }

    let logp = log_softmax(logits);
    // Extended sequence: blank, l1, blank, l2, ..., lU, blank.
    let ext: Vec<usize> = std::iter::once(BLANK)
        .chain(labels.iter().flat_map(|&l| [l, BLANK]))
        .collect();
    let states = ext.len();
    let can_skip = |s: usize| s >= 2 && ext[s] != BLANK && ext[s] != ext[s - 2];
    let neg = f64::NEG_INFINITY;

    // alpha[t][s]: log prob of prefixes ending in state s at frame t, emissions included.
    let mut alpha = vec![vec![neg; states]; frames];
    alpha[0][0] = logp.get(0, ext[0]);
    if states > 1 {
        alpha[0][1] = logp.get(0, ext[1]);
    }
    for t in 1..frames {
        for s in 0..states {
            let mut acc = alpha[t - 1][s];
            if s >= 1 {
                acc = log_sum_exp(acc, alpha[t - 1][s - 1]);
            }
            if can_skip(s) {
                acc = log_sum_exp(acc, alpha[t - 1][s - 2]);
            }
            alpha[t][s] = acc + logp.get(t, ext[s]);
        }
    }

    // beta[t][s]: log prob of completing from state s at frame t, emissions after t only.
    let mut beta = vec![vec![neg; states]; frames];
    beta[frames - 1][states - 1] = 0.0;
    if states > 1 {
        beta[frames - 1][states - 2] = 0.0;
    }
    for t in (0..frames - 1).rev() {
        for s in 0..states {
            let mut acc = beta[t + 1][s] + logp.get(t + 1, ext[s]);
            if s + 1 < states {
                acc = log_sum_exp(acc, beta[t + 1][s + 1] + logp.get(t + 1, ext[s + 1]));
            }
            if s + 2 < states && can_skip(s + 2) {
                acc = log_sum_exp(acc, beta[t + 1][s + 2] + logp.get(t + 1, ext[s + 2]));
            }
            beta[t][s] = acc;
        }
    }

    let mut log_p = alpha[frames - 1][states - 1];
    if states > 1 {
        log_p = log_sum_exp(log_p, alpha[frames - 1][states - 2]);
    }

    // d nll / d z[t][k] = softmax[t][k] - sum_{s: ext[s]=k} exp(alpha + beta - log_p)
    let mut grad = Matrix::zeros(frames, classes);
    for t in 0..frames {
        let mut occupancy = vec![neg; classes];
        for s in 0..states {
            occupancy[ext[s]] = log_sum_exp(occupancy[ext[s]], alpha[t][s] + beta[t][s]);
        }
        for (k, occ) in occupancy.iter().enumerate() {
            let posterior = if *occ == neg { 0.0 } else { (occ - log_p).exp() };
            grad.set(t, k, logp.get(t, k).exp() - posterior);
        }
    }

    Ok(CtcOutput { nll: -log_p, grad })
}

/// CTC loss of a tag sequence under frame-wise `[blank, b, n, s]` logits.
pub fn ctc_loss(logits: &LogitMatrix, labels: &TagSequence) -> Result<CtcOutput, CtcError> {
    ctc_loss_labels(logits.as_matrix(), &tag_labels(labels))
}

/// `l_asr + alpha * l_ctc`.
pub fn combined_loss(l_asr: f64, l_ctc: f64, alpha: f64) -> f64 {
    l_asr + alpha * l_ctc
}
