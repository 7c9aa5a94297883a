//! REINFORCE training of the agent on one numeral system.

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::dist::NeedDistribution;
use super::net::{AgentParams, NetError, Tape};
use super::reward;
use crate::numeral::{NumeralSystem, NUMBER_MAX, NUMBER_MIN};
use crate::seed;

/// Hyperparameters of one training run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: u32,
    pub batches_per_epoch: u32,
    pub batch_size: u32,
    /// Sharpness of the reward's exponential decay.
    pub alpha: f64,
    /// Policy standard deviation, annealed exponentially between these ends.
    pub sigma_start: f64,
    pub sigma_end: f64,
    pub step_size: f64,
    /// Exponential-moving-average reward baseline.
    pub baseline_decay: f64,
    pub use_baseline: bool,
    pub grad_clip_norm: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30_000,
            batches_per_epoch: 5,
            batch_size: 32,
            alpha: 0.5,
            sigma_start: 0.25,
            sigma_end: 0.01,
            step_size: 0.005,
            baseline_decay: 0.9,
            use_baseline: true,
            grad_clip_norm: 5.0,
            seed: 0,
        }
    }
}

impl TrainConfig {
    /// Policy standard deviation at a given epoch: exponential interpolation
    /// from `sigma_start` (epoch 0) to `sigma_end` (final epoch).
    pub fn sigma_at(&self, epoch: u32) -> f64 {
        let frac = f64::from(epoch) / f64::from(self.epochs.max(1));
        self.sigma_start * (self.sigma_end / self.sigma_start).powf(frac)
    }
}

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("non-finite gradient at update {step}")]
    NonFiniteGradient { step: u64 },
    #[error("empty batch")]
    EmptyBatch,
    #[error("system has no numeral for sampled target {0}")]
    MissingNumeral(u32),
}

/// Adam-style per-parameter adaptive step.
#[derive(Debug, Clone)]
struct Adam {
    first: Vec<f64>,
    second: Vec<f64>,
    t: u64,
    lr: f64,
}

impl Adam {
    const BETA1: f64 = 0.9;
    const BETA2: f64 = 0.999;
    const EPS: f64 = 1e-8;

    fn new(len: usize, lr: f64) -> Self {
        Adam {
            first: vec![0.0; len],
            second: vec![0.0; len],
            t: 0,
            lr,
        }
    }

    fn step(&mut self, theta: &mut [f64], grad: &[f64]) {
        self.t += 1;
        let bc1 = 1.0 - Self::BETA1.powi(self.t as i32);
        let bc2 = 1.0 - Self::BETA2.powi(self.t as i32);
        for ((param, &g), (m, v)) in theta
            .iter_mut()
            .zip(grad)
            .zip(self.first.iter_mut().zip(self.second.iter_mut()))
        {
            *m = Self::BETA1 * *m + (1.0 - Self::BETA1) * g;
            *v = Self::BETA2 * *v + (1.0 - Self::BETA2) * g * g;
            let m_hat = *m / bc1;
            let v_hat = *v / bc2;
            *param -= self.lr * m_hat / (v_hat.sqrt() + Self::EPS);
        }
    }
}

/// One REINFORCE training process: parameters, optimizer state, reward
/// baseline and the RNG driving sampling.
pub struct Trainer {
    pub params: AgentParams,
    config: TrainConfig,
    /// Pre-encoded numeral for each number, indexed by `n - 1`; `None` for
    /// numbers a partial system does not cover.
    encoded: Vec<Option<Vec<usize>>>,
    opt: Adam,
    baseline: f64,
    rng: ChaCha8Rng,
    grad: Vec<f64>,
    tape: Tape,
    updates: u64,
}

/// What one update step observed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepStats {
    pub mean_reward: f64,
}

impl Trainer {
    pub fn new(system: &NumeralSystem, config: TrainConfig) -> Result<Self, TrainError> {
        let params = AgentParams::init(
            system.alphabet(),
            seed::derive(config.seed, &[seed::tag("init")]),
        );
        let mut encoded = Vec::with_capacity(NUMBER_MAX as usize);
        for n in NUMBER_MIN..=NUMBER_MAX {
            encoded.push(match system.numeral(n) {
                Some(numeral) => Some(params.encode(numeral)?),
                None => None,
            });
        }
        let rng = seed::rng(seed::derive(config.seed, &[seed::tag("train")]));
        let len = params.len();
        let lr = config.step_size;
        Ok(Trainer {
            params,
            config,
            encoded,
            opt: Adam::new(len, lr),
            baseline: 0.0,
            rng,
            grad: vec![0.0; len],
            tape: Tape::default(),
            updates: 0,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// Samples a batch of targets from the need distribution.
    pub fn sample_batch(&mut self, dist: &NeedDistribution) -> Vec<u32> {
        (0..self.config.batch_size)
            .map(|_| dist.sample(&mut self.rng))
            .collect()
    }

    /// One REINFORCE update on a batch of target numbers: sample an action
    /// per numeral from N(mu, sigma), score it, and step the surrogate
    /// -(reward - baseline) * log_prob averaged over the batch.
    pub fn train_step(&mut self, batch: &[u32], sigma: f64) -> Result<StepStats, TrainError> {
        if batch.is_empty() {
            return Err(TrainError::EmptyBatch);
        }
        self.grad.fill(0.0);
        let normal = Normal::new(0.0, 1.0).expect("unit normal");
        let inv_batch = 1.0 / batch.len() as f64;
        let mut reward_sum = 0.0;
        for &target in batch {
            let encoded = self.encoded[(target - 1) as usize]
                .as_ref()
                .ok_or(TrainError::MissingNumeral(target))?;
            let mu = self.params.forward_tape(encoded, &mut self.tape);
            let action = mu + sigma * normal.sample(&mut self.rng);
            let prediction = 100.0 * action;
            let r = reward(prediction, target, self.config.alpha);
            reward_sum += r;
            let advantage = if self.config.use_baseline {
                r - self.baseline
            } else {
                r
            };
            // d/d_mu of -advantage * log N(action | mu, sigma).
            let d_mu = -advantage * (action - mu) / (sigma * sigma) * inv_batch;
            self.params.backward(&self.tape, d_mu, &mut self.grad);
        }
        self.updates += 1;
        if self.grad.iter().any(|g| !g.is_finite()) {
            return Err(TrainError::NonFiniteGradient { step: self.updates });
        }
        let norm: f64 = self.grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if norm > self.config.grad_clip_norm {
            let scale = self.config.grad_clip_norm / norm;
            for g in &mut self.grad {
                *g *= scale;
            }
        }
        self.opt.step(self.params.theta_mut(), &self.grad);
        let mean_reward = reward_sum * inv_batch;
        if self.config.use_baseline {
            self.baseline = self.config.baseline_decay * self.baseline
                + (1.0 - self.config.baseline_decay) * mean_reward;
        }
        Ok(StepStats { mean_reward })
    }
}

/// Runs the full schedule: `epochs` x `batches_per_epoch` updates with the
/// annealed sigma, invoking `eval_hook` before training, every `eval_every`
/// epochs, and once more after the final epoch.
pub fn train_run<F>(
    system: &NumeralSystem,
    dist: &NeedDistribution,
    config: TrainConfig,
    eval_every: u32,
    mut eval_hook: F,
) -> Result<AgentParams, TrainError>
where
    F: FnMut(u32, &AgentParams),
{
    let mut trainer = Trainer::new(system, config)?;
    let epochs = trainer.config.epochs;
    let eval_every = eval_every.max(1);
    for epoch in 0..epochs {
        if epoch % eval_every == 0 {
            eval_hook(epoch, &trainer.params);
        }
        let sigma = trainer.config.sigma_at(epoch);
        for _ in 0..trainer.config.batches_per_epoch {
            let batch = trainer.sample_batch(dist);
            trainer.train_step(&batch, sigma)?;
        }
    }
    eval_hook(epochs, &trainer.params);
    Ok(trainer.params)
}

/// The surrogate objective whose gradient REINFORCE follows, exposed for
/// gradient verification: mean over items of -advantage * log N(action |
/// mu(numeral), sigma), with actions and advantages held fixed.
pub fn surrogate_loss(
    params: &AgentParams,
    items: &[(Vec<usize>, f64, f64)],
    sigma: f64,
) -> f64 {
    let mut tape = Tape::default();
    let mut total = 0.0;
    for (encoded, action, advantage) in items {
        let mu = params.forward_tape(encoded, &mut tape);
        let z = (action - mu) / sigma;
        let log_prob = -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
        total += -advantage * log_prob;
    }
    total / items.len() as f64
}

/// Analytic gradient of [`surrogate_loss`].
pub fn surrogate_grad(
    params: &AgentParams,
    items: &[(Vec<usize>, f64, f64)],
    sigma: f64,
) -> Vec<f64> {
    let mut tape = Tape::default();
    let mut grad = vec![0.0; params.len()];
    let inv = 1.0 / items.len() as f64;
    for (encoded, action, advantage) in items {
        let mu = params.forward_tape(encoded, &mut tape);
        let d_mu = -advantage * (action - mu) / (sigma * sigma) * inv;
        params.backward(&tape, d_mu, &mut grad);
    }
    grad
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::learner::DistKind;
    use crate::numeral::{builtin_system, tokenize, BuiltinName, Numeral, SystemSource};
    use std::collections::BTreeMap;

    fn toy_system() -> NumeralSystem {
        // Two numerals sharing structure, targets 12 and 21.
        let numerals: BTreeMap<u32, Numeral> = [
            (12, tokenize("10+2").unwrap()),
            (21, tokenize("2*10+1").unwrap()),
        ]
        .into_iter()
        .collect();
        NumeralSystem::new("toy", numerals, SystemSource::Generated)
    }

    #[test]
    fn sigma_schedule_is_monotone_between_endpoints() {
        let config = TrainConfig::default();
        assert_eq!(config.sigma_at(0), 0.25);
        assert!((config.sigma_at(config.epochs) - 0.01).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for epoch in (0..=config.epochs).step_by(1000) {
            let sigma = config.sigma_at(epoch);
            assert!(sigma <= prev);
            assert!(sigma >= 0.01 - 1e-12 && sigma <= 0.25 + 1e-12);
            prev = sigma;
        }
    }

    /// Gradients of the frozen-action surrogate match central finite
    /// differences, block by block, at relative error <= 1e-4.
    #[test]
    fn surrogate_gradient_matches_finite_differences() {
        let sys = toy_system();
        let mut params = AgentParams::init(sys.alphabet(), 0x7ab);
        use rand::Rng;
        let mut rng = seed::rng(0x90);
        let len = params.len();
        for slot in params.theta_mut()[len - 11..].iter_mut() {
            *slot = rng.random_range(-0.5..0.5);
        }
        let sigma = 0.2;
        let items: Vec<(Vec<usize>, f64, f64)> = vec![
            (params.encode(sys.numeral(12).unwrap()).unwrap(), 0.31, 0.6),
            (params.encode(sys.numeral(21).unwrap()).unwrap(), 0.17, -0.4),
        ];
        let analytic = surrogate_grad(&params, &items, sigma);
        let h = 1e-5;
        let mut fd = vec![0.0; params.len()];
        for idx in 0..params.len() {
            let orig = params.theta()[idx];
            params.theta_mut()[idx] = orig + h;
            let up = surrogate_loss(&params, &items, sigma);
            params.theta_mut()[idx] = orig - h;
            let down = surrogate_loss(&params, &items, sigma);
            params.theta_mut()[idx] = orig;
            fd[idx] = (up - down) / (2.0 * h);
        }
        for (name, range) in params.block_ranges() {
            let num: f64 = range
                .clone()
                .map(|i| (fd[i] - analytic[i]).powi(2))
                .sum::<f64>()
                .sqrt();
            let den: f64 = range
                .clone()
                .map(|i| fd[i].powi(2))
                .sum::<f64>()
                .sqrt()
                .max(1e-12);
            let rel = num / den;
            assert!(rel <= 1e-4, "block {name}: relative error {rel}");
        }
    }

    #[test]
    fn zero_advantage_leaves_parameters_untouched() {
        let sys = toy_system();
        let params = AgentParams::init(sys.alphabet(), 1);
        let items: Vec<(Vec<usize>, f64, f64)> = vec![
            (params.encode(sys.numeral(12).unwrap()).unwrap(), 0.12, 0.0),
            (params.encode(sys.numeral(21).unwrap()).unwrap(), 0.21, 0.0),
        ];
        let grad = surrogate_grad(&params, &items, 0.05);
        assert!(grad.iter().all(|&g| g == 0.0));
        // And the optimizer applies a zero step on a zero gradient.
        let mut theta: Vec<f64> = params.theta().to_vec();
        let before = theta.clone();
        let mut adam = Adam::new(theta.len(), 0.005);
        adam.step(&mut theta, &grad);
        assert_eq!(theta, before);
    }

    #[test]
    fn same_seed_same_trajectory() {
        let sys = builtin_system(BuiltinName::Mandarin);
        let dist = NeedDistribution::new(DistKind::PowerLaw);
        let config = TrainConfig {
            seed: 99,
            ..TrainConfig::default()
        };
        let mut a = Trainer::new(&sys, config.clone()).unwrap();
        let mut b = Trainer::new(&sys, config).unwrap();
        for step in 0..100 {
            let sigma = a.config.sigma_at(step / 5);
            let batch_a = a.sample_batch(&dist);
            let batch_b = b.sample_batch(&dist);
            assert_eq!(batch_a, batch_b);
            a.train_step(&batch_a, sigma).unwrap();
            b.train_step(&batch_b, sigma).unwrap();
            assert_eq!(a.params.theta(), b.params.theta(), "diverged at {step}");
        }
    }

    #[test]
    fn rewards_move_the_mean_toward_targets() {
        // Single-target bandit: mean prediction should drift toward 1.
        let numerals: BTreeMap<u32, Numeral> =
            [(1, tokenize("1").unwrap())].into_iter().collect();
        let sys = NumeralSystem::new("one", numerals, SystemSource::Generated);
        let config = TrainConfig {
            epochs: 200,
            seed: 5,
            ..TrainConfig::default()
        };
        let mut trainer = Trainer::new(&sys, config).unwrap();
        let numeral = tokenize("1").unwrap();
        let before = trainer.params.forward(&numeral).unwrap();
        for epoch in 0..200u32 {
            let sigma = trainer.config.sigma_at(epoch);
            for _ in 0..5 {
                trainer.train_step(&[1; 32], sigma).unwrap();
            }
        }
        let after = trainer.params.forward(&numeral).unwrap();
        assert!(before == 0.5);
        assert!(after < 0.1, "mean did not move toward 0.01: {after}");
    }
}
