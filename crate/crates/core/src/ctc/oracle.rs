//! Brute-force CTC by enumerating every frame path.
//!
//! Exponential in the frame count; meant for checking [`super::ctc_loss`]
//! on tiny inputs. Shares nothing with the forward-backward code beyond the
//! matrix type.

use super::{Matrix, BLANK};

/// Largest frame count accepted by [`brute_force_nll`].
pub const MAX_FRAMES: usize = 8;

/// Removes repeats, then blanks.
pub fn collapse(path: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut prev = None;
    for &k in path {
        if Some(k) != prev && k != BLANK {
            out.push(k);
        }
        prev = Some(k);
    }
    out
}

/// `-log` of the summed probability of all paths collapsing to `labels`;
/// `+inf` when no path does.
pub fn brute_force_nll(logits: &Matrix, labels: &[usize]) -> f64 {
    let frames = logits.rows();
    let classes = logits.cols();
    assert!(frames <= MAX_FRAMES, "brute force limited to {MAX_FRAMES} frames");

    let probs: Vec<Vec<f64>> = (0..frames)
        .map(|t| {
            let row = logits.row(t);
            let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let exps: Vec<f64> = row.iter().map(|x| (x - max).exp()).collect();
            let total: f64 = exps.iter().sum();
            exps.into_iter().map(|e| e / total).collect()
        })
        .collect();

    let mut total = 0.0;
    let mut path = vec![0usize; frames];
    let count = classes.pow(frames as u32);
    for code in 0..count {
        let mut c = code;
        for slot in path.iter_mut() {
            *slot = c % classes;
            c /= classes;
        }
        if collapse(&path) == labels {
            total += path.iter().enumerate().map(|(t, &k)| probs[t][k]).product::<f64>();
        }
    }
    -total.ln()
}
