//! A single linear layer trained with CTC on frame features.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{ctc_loss_labels, min_frames, tag_labels, CtcError, FeatureMatrix, Matrix, BLANK, NUM_CLASSES};
use crate::tagging::TagSequence;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    /// Weight of the tagging loss in the combined loss.
    pub alpha: f64,
    pub learning_rate: f64,
    pub steps: usize,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig {
            alpha: 1.0,
            learning_rate: 0.05,
            steps: 500,
        }
    }
}

/// Linear map from `dims` features to the four tag classes.
#[derive(Debug, Clone, PartialEq)]
pub struct ToyTagger {
    weights: Matrix,
}

impl ToyTagger {
    /// Weights drawn uniformly from `[-0.1, 0.1)`.
    pub fn init(dims: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = (0..dims * NUM_CLASSES).map(|_| rng.random_range(-0.1..0.1)).collect();
        ToyTagger {
            weights: Matrix::from_vec(dims, NUM_CLASSES, data).expect("shape"),
        }
    }

    pub fn weights(&self) -> &Matrix {
        &self.weights
    }

    pub fn logits(&self, features: &FeatureMatrix) -> Matrix {
        features.as_matrix().matmul(&self.weights)
    }

    /// One gradient-descent step; returns the loss before the update.
    pub fn step(&mut self, features: &FeatureMatrix, labels: &[usize], lr: f64) -> Result<f64, CtcError> {
        let out = ctc_loss_labels(&self.logits(features), labels)?;
        let grad_w = features.as_matrix().t_matmul(&out.grad);
        for (w, g) in self.weights.values_mut().iter_mut().zip(grad_w.values()) {
            *w -= lr * g;
        }
        Ok(out.nll)
    }
}

/// Trains a fresh [`ToyTagger`] and returns the loss before each step
/// followed by the final loss (`steps + 1` values).
pub fn train_toy_tagger(
    features: &FeatureMatrix,
    target: &TagSequence,
    cfg: &LossConfig,
    seed: u64,
) -> Result<Vec<f64>, CtcError> {
    let labels = tag_labels(target);
    let mut tagger = ToyTagger::init(features.dims(), seed);
    let mut trajectory = Vec::with_capacity(cfg.steps + 1);
    for _ in 0..cfg.steps {
        trajectory.push(tagger.step(features, &labels, cfg.learning_rate)?);
    }
    trajectory.push(ctc_loss_labels(&tagger.logits(features), &labels)?.nll);
    Ok(trajectory)
}

/// A frame-level class path of length `frames` that collapses to `labels`.
/// Labels are separated by blanks when there is room, then stretched evenly.
pub fn frame_alignment(labels: &[usize], frames: usize) -> Result<Vec<usize>, CtcError> {
    let needed = min_frames(labels);
    if needed > frames || frames == 0 {
        return Err(CtcError::InfeasibleLength {
            frames,
            labels: labels.len(),
            repeats: needed - labels.len(),
        });
    }
    let spaced = labels.len() * 2;
    let mut base = Vec::new();
    for (i, &l) in labels.iter().enumerate() {
        let need_blank = i > 0 && (spaced - 1 <= frames || labels[i - 1] == l);
        if need_blank {
            base.push(BLANK);
        }
        base.push(l);
    }
    if base.is_empty() {
        base.push(BLANK);
    }
    Ok((0..frames).map(|t| base[t * base.len() / frames]).collect())
}

/// Features whose first four dimensions one-hot encode the aligned frame
/// class, plus Gaussian noise (sd 0.1) on every dimension. `dims` must be
/// at least four.
pub fn synthetic_separable(
    target: &TagSequence,
    frames: usize,
    dims: usize,
    seed: u64,
) -> Result<FeatureMatrix, CtcError> {
    assert!(dims >= NUM_CLASSES, "need at least {NUM_CLASSES} feature dims");
    let path = frame_alignment(&tag_labels(target), frames)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noise = Normal::new(0.0, 0.1).expect("valid sd");
    let mut m = Matrix::zeros(frames, dims);
    for (t, &class) in path.iter().enumerate() {
        for d in 0..dims {
            let signal = if d == class { 1.0 } else { 0.0 };
            m.set(t, d, signal + noise.sample(&mut rng));
        }
    }
    Ok(FeatureMatrix::new(m).expect("finite, non-empty"))
}
