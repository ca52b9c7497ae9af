//! Policy-gradient training of the disparity layer against an actual
//! listener.

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{
    accumulate_ascent, decision_loss, pragmatic_select_with, simulate_all, DisparityPolicy,
    ScheduleState, SelectMode, SimulationResult,
};
use crate::error::{Error, Result};
use crate::listener::{choose, reward, ListenerProfile};
use crate::rng::{self, stream};
use crate::scenes::{Dataset, ScenePair};
use crate::speaker::{candidates, CandidateSet, Mode};
use crate::taxonomy::Taxonomy;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub mode: Mode,
    pub lambda_l: f64,
    pub lambda_d: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Initial learning rate.
    pub lr: f64,
    /// Multiplier applied to `lr` for each summed batch gradient.
    pub lr_scale: f64,
    pub patience: usize,
    pub decay: f64,
    pub seed: u64,
}

impl TrainConfig {
    pub fn word(seed: u64) -> Self {
        TrainConfig {
            mode: Mode::Word,
            lambda_l: 1.0,
            lambda_d: 1.0,
            epochs: 200,
            batch_size: 128,
            lr: 2.0,
            lr_scale: 1.0 / 128.0,
            patience: 50,
            decay: 0.8,
            seed,
        }
    }

    pub fn sentence(seed: u64) -> Self {
        TrainConfig {
            mode: Mode::Sentence,
            epochs: 150,
            lr: 0.5,
            patience: 20,
            ..Self::word(seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = [("lr", self.lr), ("lr_scale", self.lr_scale)];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be positive, got {v}")));
            }
        }
        for (name, v) in [("lambda_l", self.lambda_l), ("lambda_d", self.lambda_d)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if !(self.decay > 0.0 && self.decay < 1.0) {
            return Err(Error::config(format!(
                "decay must lie in (0,1), got {}",
                self.decay
            )));
        }
        if self.epochs == 0 || self.batch_size == 0 || self.patience == 0 {
            return Err(Error::config(
                "epochs, batch_size and patience must be positive",
            ));
        }
        Ok(())
    }
}

/// A pair with its frozen candidates and simulated-listener outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct PreparedPair<'d> {
    pub pair: &'d ScenePair,
    pub candidates: CandidateSet,
    pub sims: Vec<SimulationResult>,
}

impl<'d> PreparedPair<'d> {
    pub fn new(
        pair: &'d ScenePair,
        mode: Mode,
        sim_profile: &ListenerProfile,
        tax: &Taxonomy,
    ) -> Self {
        let candidates = candidates(pair.target_scene(), mode, tax);
        let sims = simulate_all(&candidates, pair, sim_profile, tax);
        PreparedPair {
            pair,
            candidates,
            sims,
        }
    }

    pub fn prepare_all(
        pairs: &'d [ScenePair],
        mode: Mode,
        sim_profile: &ListenerProfile,
        tax: &Taxonomy,
    ) -> Vec<Self> {
        pairs
            .iter()
            .map(|p| Self::new(p, mode, sim_profile, tax))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_accuracy: f64,
    pub val_accuracy: f64,
    pub mean_loss: f64,
    /// Learning rate used during this epoch.
    pub lr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrainingHistory {
    /// Validation accuracy of the all-zero policy before any update.
    pub initial_val_accuracy: f64,
    /// Epoch of the returned snapshot; `None` if no epoch beat the start.
    pub best_epoch: Option<usize>,
    pub epochs: Vec<EpochRecord>,
}

/// Accuracy of the policy's Eval-mode choices against `listener`, with one
/// listener coin stream per pair id.
pub fn evaluate_policy(
    pairs: &[PreparedPair<'_>],
    policy: &DisparityPolicy,
    listener: &ListenerProfile,
    tax: &Taxonomy,
    seed: u64,
) -> f64 {
    if pairs.is_empty() {
        return 0.0;
    }
    let correct = pairs
        .iter()
        .filter(|p| {
            let mut rng = rng::derived(seed, stream::VALIDATION, p.pair.id);
            let chosen = pragmatic_select_with(
                p.pair,
                &p.candidates,
                &p.sims,
                policy,
                SelectMode::Eval,
                &mut rng,
            );
            let choice = choose(&chosen.utterance, p.pair, listener, tax, &mut rng);
            reward(choice, p.pair.target) > 0
        })
        .count();
    correct as f64 / pairs.len() as f64
}

/// Trains a fresh policy on the train split and returns the snapshot with
/// the best validation accuracy plus the per-epoch history.
///
/// Each epoch visits the train pairs in a seeded shuffled order, samples one
/// candidate per pair in proportion to its score, plays it to `listener`,
/// and sums the per-decision gradients; the sum is applied every
/// `batch_size` decisions. The learning rate decays by `decay` after
/// `patience` epochs without a validation improvement.
pub fn train(
    dataset: &Dataset,
    listener: &ListenerProfile,
    config: &TrainConfig,
    tax: &Taxonomy,
) -> Result<(DisparityPolicy, TrainingHistory)> {
    config.validate()?;
    if dataset.train.is_empty() || dataset.val.is_empty() {
        return Err(Error::config(
            "training needs nonempty train and val splits",
        ));
    }
    let full = ListenerProfile::full();
    let train_set = PreparedPair::prepare_all(&dataset.train, config.mode, &full, tax);
    let val_set = PreparedPair::prepare_all(&dataset.val, config.mode, &full, tax);

    let mut policy = DisparityPolicy {
        theta: vec![0.0; tax.vocab_len()],
        lambda_l: config.lambda_l,
        lambda_d: config.lambda_d,
        lr: config.lr,
        mode: config.mode,
        seed: config.seed,
        schedule: ScheduleState::new(config.decay, config.patience),
    };
    let initial = evaluate_policy(&val_set, &policy, listener, tax, config.seed);
    policy.schedule.best_val_accuracy = initial;
    let mut best = policy.clone();
    let mut history = TrainingHistory {
        initial_val_accuracy: initial,
        best_epoch: None,
        epochs: Vec::with_capacity(config.epochs),
    };

    let mut lr = config.lr;
    let mut order: Vec<usize> = (0..train_set.len()).collect();
    let mut ascent = vec![0.0; tax.vocab_len()];
    for epoch in 0..config.epochs {
        let mut rng = rng::derived(config.seed, stream::TRAIN, epoch as u64);
        order.shuffle(&mut rng);
        let (mut correct, mut loss_sum, mut loss_n, mut in_batch) = (0usize, 0.0, 0usize, 0usize);
        for &i in &order {
            let p = &train_set[i];
            let chosen = pragmatic_select_with(
                p.pair,
                &p.candidates,
                &p.sims,
                &policy,
                SelectMode::Train,
                &mut rng,
            );
            let r = reward(
                choose(&chosen.utterance, p.pair, listener, tax, &mut rng),
                p.pair.target,
            );
            correct += usize::from(r > 0);
            if accumulate_ascent(&policy, &chosen, r, &mut ascent) {
                loss_sum += decision_loss(chosen.a, r);
                loss_n += 1;
            } else {
                log::debug!("pair {}: chosen candidate has a = 0, no update", p.pair.id);
            }
            in_batch += 1;
            if in_batch == config.batch_size {
                policy.apply_ascent(&ascent, lr * config.lr_scale);
                ascent.fill(0.0);
                in_batch = 0;
            }
        }
        if in_batch > 0 {
            policy.apply_ascent(&ascent, lr * config.lr_scale);
            ascent.fill(0.0);
        }

        let val_accuracy = evaluate_policy(&val_set, &policy, listener, tax, config.seed);
        history.epochs.push(EpochRecord {
            epoch,
            train_accuracy: correct as f64 / train_set.len() as f64,
            val_accuracy,
            mean_loss: if loss_n > 0 {
                loss_sum / loss_n as f64
            } else {
                0.0
            },
            lr,
        });
        policy.lr = lr;
        if policy.schedule.observe(val_accuracy, &mut lr) {
            best = policy.clone();
            history.best_epoch = Some(epoch);
        }
        log::trace!("epoch {epoch}: val {val_accuracy:.4} lr {lr}");
    }
    Ok((best, history))
}
