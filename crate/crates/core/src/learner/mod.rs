//! A recurrent contextual-bandit agent trained with REINFORCE.
//!
//! The agent reads a numeral morpheme by morpheme and outputs the mean of a
//! Gaussian policy over (0,1); the sampled action times 100 is its number
//! prediction. Reward is bounded and decays exponentially with distance:
//!
//! ```text
//! R(p, n) = 1[0 < round(p) < 100] * exp(-alpha * |p - n|)
//! ```
//!
//! Only the indicator rounds; the distance uses the raw prediction.

mod dist;
mod net;
mod trainer;

pub use dist::{DistKind, NeedDistribution};
pub use net::{AgentParams, NetError, Tape, EMBED_DIM, HIDDEN};
pub use trainer::{
    surrogate_grad, surrogate_loss, train_run, StepStats, TrainConfig, TrainError, Trainer,
};

/// Reward for predicting `prediction` when the target was `target`.
/// Predictions rounding outside 1..=99 earn nothing; inside, reward decays
/// exponentially with the unrounded distance, sharpness `alpha`.
pub fn reward(prediction: f64, target: u32, alpha: f64) -> f64 {
    let rounded = prediction.round(); // ties away from zero
    if rounded > 0.0 && rounded < 100.0 {
        (-alpha * (prediction - f64::from(target)).abs()).exp()
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reward_examples() {
        assert_eq!(reward(23.0, 23, 0.5), 1.0);
        assert!((reward(25.0, 23, 0.5) - (-1.0f64).exp()).abs() < 1e-12);
        assert_eq!(reward(150.0, 50, 0.5), 0.0);
        assert_eq!(reward(0.4, 1, 0.5), 0.0);
    }

    #[test]
    fn reward_boundary_rounding() {
        // Ties round away from zero: 0.5 -> 1 (inside), 99.5 -> 100 (out).
        assert!(reward(0.5, 1, 0.5) > 0.0);
        assert_eq!(reward(99.5, 99, 0.5), 0.0);
        assert!(reward(99.4, 99, 0.5) > 0.0);
        assert_eq!(reward(-3.0, 1, 0.5), 0.0);
        assert_eq!(reward(f64::NAN, 1, 0.5), 0.0);
    }

    mod prop {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn reward_is_bounded(p in -200.0..200.0f64, n in 1u32..=99, a in 0.01..2.0f64) {
                let r = reward(p, n, a);
                prop_assert!((0.0..=1.0).contains(&r));
            }
        }
    }
}
