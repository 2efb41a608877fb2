//! Randomized consistency checks for the CTC implementation.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oracle::brute_force_nll;
use super::toy::{synthetic_separable, train_toy_tagger, LossConfig};
use super::{ctc_loss_labels, min_frames, Matrix, NUM_CLASSES};
use crate::tagging::TagSequence;

pub const ORACLE_TOLERANCE: f64 = 1e-9;
pub const FD_EPSILON: f64 = 1e-5;
pub const GRADIENT_TOLERANCE: f64 = 1e-4;
/// Gradient magnitudes below this are compared absolutely.
pub const GRADIENT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub instances: usize,
    pub worst: f64,
    pub tolerance: f64,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.worst <= self.tolerance
    }
}

impl std::fmt::Display for CheckReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}: {} ({} instances, worst {:.3e}, tolerance {:.0e})",
            self.name,
            if self.passed() { "PASS" } else { "FAIL" },
            self.instances,
            self.worst,
            self.tolerance
        )
    }
}

/// Random feasible instance: `frames` in `1..=max_frames`, labels up to
/// `max_labels`, logits uniform in `[-3, 3)`.
pub fn random_instance(rng: &mut ChaCha8Rng, max_frames: usize, max_labels: usize) -> (Matrix, Vec<usize>) {
    loop {
        let frames = rng.random_range(1..=max_frames);
        let len = rng.random_range(0..=max_labels);
        let labels: Vec<usize> = (0..len).map(|_| rng.random_range(1..NUM_CLASSES)).collect();
        if min_frames(&labels) > frames {
            continue;
        }
        let data = (0..frames * NUM_CLASSES).map(|_| rng.random_range(-3.0..3.0)).collect();
        return (Matrix::from_vec(frames, NUM_CLASSES, data).expect("shape"), labels);
    }
}

/// Largest `|ctc - brute force|` in nll over random instances.
pub fn oracle_check(instances: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let worst = (0..instances)
        .map(|_| {
            let (logits, labels) = random_instance(&mut rng, 6, 3);
            let fast = ctc_loss_labels(&logits, &labels).expect("feasible").nll;
            (fast - brute_force_nll(&logits, &labels)).abs()
        })
        .fold(0.0, f64::max);
    CheckReport {
        name: "oracle",
        instances,
        worst,
        tolerance: ORACLE_TOLERANCE,
    }
}

/// Largest relative error between the analytic gradient and central differences.
pub fn gradient_check(instances: usize, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..instances {
        let (logits, labels) = random_instance(&mut rng, 6, 3);
        let analytic = ctc_loss_labels(&logits, &labels).expect("feasible").grad;
        for i in 0..logits.values().len() {
            let mut plus = logits.clone();
            plus.values_mut()[i] += FD_EPSILON;
            let mut minus = logits.clone();
            minus.values_mut()[i] -= FD_EPSILON;
            let numeric = (ctc_loss_labels(&plus, &labels).expect("feasible").nll
                - ctc_loss_labels(&minus, &labels).expect("feasible").nll)
                / (2.0 * FD_EPSILON);
            let a = analytic.values()[i];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(GRADIENT_FLOOR);
            worst = worst.max(rel);
        }
    }
    CheckReport {
        name: "gradient",
        instances,
        worst,
        tolerance: GRADIENT_TOLERANCE,
    }
}

/// Final-to-initial loss ratio of the toy tagger on separable data.
pub fn toy_check(frames: usize, dims: usize, seed: u64) -> CheckReport {
    let target: TagSequence = crate::tagging::tag_transcript("tom hanks is here", &["tom hanks"]);
    let features = synthetic_separable(&target, frames, dims, seed).expect("feasible target");
    let trajectory = train_toy_tagger(&features, &target, &LossConfig::default(), seed).expect("feasible target");
    CheckReport {
        name: "toy-tagger",
        instances: 1,
        worst: trajectory[trajectory.len() - 1] / trajectory[0],
        tolerance: 0.1,
    }
}
