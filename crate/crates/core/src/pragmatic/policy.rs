use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::logistic;
use crate::error::{Error, Result};
use crate::speaker::{Mode, Utterance};
use crate::taxonomy::{Taxonomy, TokenId};

pub const POLICY_FORMAT_VERSION: u32 = 1;

/// Learning-rate schedule bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleState {
    pub best_val_accuracy: f64,
    pub epochs_since_improve: usize,
    pub decay_factor: f64,
    pub patience: usize,
}

impl ScheduleState {
    pub fn new(decay_factor: f64, patience: usize) -> Self {
        ScheduleState {
            best_val_accuracy: 0.0,
            epochs_since_improve: 0,
            decay_factor,
            patience,
        }
    }

    /// Records an epoch's validation accuracy. Returns true if it is a new
    /// best. After `patience` epochs without improvement the learning rate
    /// decays and the counter restarts.
    pub fn observe(&mut self, val_accuracy: f64, lr: &mut f64) -> bool {
        if val_accuracy > self.best_val_accuracy {
            self.best_val_accuracy = val_accuracy;
            self.epochs_since_improve = 0;
            return true;
        }
        self.epochs_since_improve += 1;
        if self.epochs_since_improve >= self.patience {
            *lr *= self.decay_factor;
            self.epochs_since_improve = 0;
        }
        false
    }
}

/// Per-token weights of the disparity-adjustment layer.
#[derive(Clone, Debug, PartialEq)]
pub struct DisparityPolicy {
    /// Indexed by [`TokenId::index`]; covers the whole vocabulary.
    pub theta: Vec<f64>,
    pub lambda_l: f64,
    pub lambda_d: f64,
    pub lr: f64,
    pub mode: Mode,
    pub seed: u64,
    pub schedule: ScheduleState,
}

impl DisparityPolicy {
    /// All-zero weights, so every candidate starts with `q = 0.5`.
    pub fn uniform(tax: &Taxonomy, lambda_l: f64, lambda_d: f64) -> Self {
        DisparityPolicy {
            theta: vec![0.0; tax.vocab_len()],
            lambda_l,
            lambda_d,
            lr: 1.0,
            mode: Mode::Word,
            seed: 0,
            schedule: ScheduleState::new(0.8, 50),
        }
    }

    pub fn weight(&self, token: TokenId) -> f64 {
        self.theta[token.index()]
    }

    pub fn set_weight(&mut self, token: TokenId, w: f64) {
        self.theta[token.index()] = w;
    }

    /// `logistic(mean theta[w])` over the utterance's content tokens.
    pub fn q_score(&self, utt: &Utterance) -> f64 {
        self.q_of_tokens(&utt.tokens)
    }

    pub fn q_of_tokens(&self, tokens: &[TokenId]) -> f64 {
        let mean = tokens.iter().map(|t| self.theta[t.index()]).sum::<f64>() / tokens.len() as f64;
        logistic(mean)
    }

    /// `q` for tokens given by name; the vocabulary is closed, so unknown
    /// names are an error.
    pub fn q_of_words<S: AsRef<str>>(&self, words: &[S], tax: &Taxonomy) -> Result<f64> {
        let ids = words
            .iter()
            .map(|w| tax.try_id(w.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        if ids.is_empty() {
            return Err(Error::config("utterance has no content tokens"));
        }
        Ok(self.q_of_tokens(&ids))
    }

    /// `theta += lr * ascent`.
    pub fn apply_ascent(&mut self, ascent: &[f64], lr: f64) {
        for (t, g) in self.theta.iter_mut().zip(ascent) {
            *t += lr * g;
        }
    }

    pub fn to_json(&self, tax: &Taxonomy) -> Result<String> {
        let ckpt = Checkpoint {
            format_version: POLICY_FORMAT_VERSION,
            mode: self.mode,
            lambda_l: self.lambda_l,
            lambda_d: self.lambda_d,
            lr: self.lr,
            theta: tax
                .vocabulary()
                .map(|t| (tax.name(t).to_string(), self.theta[t.index()]))
                .collect(),
            schedule_state: self.schedule,
            best_val_accuracy: self.schedule.best_val_accuracy,
            seed: self.seed,
        };
        Ok(serde_json::to_string_pretty(&ckpt)?)
    }

    pub fn from_json(text: &str, tax: &Taxonomy) -> Result<Self> {
        let ckpt: Checkpoint = serde_json::from_str(text)?;
        if ckpt.format_version != POLICY_FORMAT_VERSION {
            return Err(Error::config(format!(
                "unsupported policy format_version {}",
                ckpt.format_version
            )));
        }
        let mut theta = vec![f64::NAN; tax.vocab_len()];
        for (name, w) in &ckpt.theta {
            theta[tax.try_id(name)?.index()] = *w;
        }
        if let Some(missing) = tax.vocabulary().find(|t| theta[t.index()].is_nan()) {
            return Err(Error::config(format!(
                "policy has no weight for `{}`",
                tax.name(missing)
            )));
        }
        Ok(DisparityPolicy {
            theta,
            lambda_l: ckpt.lambda_l,
            lambda_d: ckpt.lambda_d,
            lr: ckpt.lr,
            mode: ckpt.mode,
            seed: ckpt.seed,
            schedule: ckpt.schedule_state,
        })
    }

    pub fn save(&self, path: impl AsRef<Path>, tax: &Taxonomy) -> Result<()> {
        let path = path.as_ref();
        std::fs::write(path, self.to_json(tax)? + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>, tax: &Taxonomy) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text, tax)
    }
}

#[derive(Serialize, Deserialize)]
struct Checkpoint {
    format_version: u32,
    mode: Mode,
    lambda_l: f64,
    lambda_d: f64,
    lr: f64,
    theta: BTreeMap<String, f64>,
    schedule_state: ScheduleState,
    best_val_accuracy: f64,
    seed: u64,
}
