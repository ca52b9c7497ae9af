use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::listener::ListenerProfile;
use crate::pragmatic::TrainConfig;
use crate::scenes::{DatasetConfig, GenerationConfig};
use crate::speaker::Mode;
use crate::taxonomy::Taxonomy;

/// Which listener the speaker is playing with.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Disparity {
    /// Understands every word and sees everything.
    None,
    /// Only category words are understood.
    Hypernym,
    /// Cannot see, or name, the blocked categories.
    LimitedVisual,
}

impl std::str::FromStr for Disparity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "none" => Ok(Disparity::None),
            "hypernym" => Ok(Disparity::Hypernym),
            "limited-visual" | "limited_visual" => Ok(Disparity::LimitedVisual),
            other => Err(format!(
                "unknown disparity `{other}` (expected hypernym|limited-visual|none)"
            )),
        }
    }
}

/// Everything a run needs. Mirrors the flat config file; `epochs`, `lr` and
/// `patience` fall back to per-mode defaults when unset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seed: u64,
    pub n_pairs: usize,
    pub hard_fraction: f64,
    pub mode: Mode,
    pub disparity: Disparity,
    pub lambda_l: f64,
    pub lambda_d: f64,
    pub epochs: Option<usize>,
    pub batch_size: usize,
    pub lr: Option<f64>,
    pub lr_scale: f64,
    pub patience: Option<usize>,
    pub decay: f64,
    pub n_repeats: usize,
    pub size_min: usize,
    pub size_max: usize,
    /// Limited-visual only; empty means `animal`.
    pub blocked_categories: Vec<String>,
    /// Load pairs from this file instead of generating them.
    pub dataset: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let gen = GenerationConfig::default();
        let train = TrainConfig::word(0);
        ExperimentConfig {
            seed: 0,
            n_pairs: 2000,
            hard_fraction: 0.58,
            mode: Mode::Word,
            disparity: Disparity::Hypernym,
            lambda_l: train.lambda_l,
            lambda_d: train.lambda_d,
            epochs: None,
            batch_size: train.batch_size,
            lr: None,
            lr_scale: train.lr_scale,
            patience: None,
            decay: train.decay,
            n_repeats: 3,
            size_min: gen.size_min,
            size_max: gen.size_max,
            blocked_categories: Vec::new(),
            dataset: None,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::config(format!("bad config: {e}")))
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text).map_err(|e| Error::config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is always representable")
    }

    pub fn dataset_config(&self) -> DatasetConfig {
        DatasetConfig {
            n_pairs: self.n_pairs,
            hard_fraction: self.hard_fraction,
            generation: GenerationConfig {
                size_min: self.size_min,
                size_max: self.size_max,
            },
        }
    }

    /// Training settings for repeat `repeat`, seeded with `seed + repeat`.
    pub fn train_config(&self, repeat: usize) -> TrainConfig {
        let base = match self.mode {
            Mode::Word => TrainConfig::word(0),
            Mode::Sentence => TrainConfig::sentence(0),
        };
        TrainConfig {
            mode: self.mode,
            lambda_l: self.lambda_l,
            lambda_d: self.lambda_d,
            epochs: self.epochs.unwrap_or(base.epochs),
            batch_size: self.batch_size,
            lr: self.lr.unwrap_or(base.lr),
            lr_scale: self.lr_scale,
            patience: self.patience.unwrap_or(base.patience),
            decay: self.decay,
            seed: self.repeat_seed(repeat),
        }
    }

    pub fn repeat_seed(&self, repeat: usize) -> u64 {
        self.seed.wrapping_add(repeat as u64)
    }

    pub fn listener(&self, tax: &Taxonomy) -> Result<ListenerProfile> {
        let blocked = &self.blocked_categories;
        match self.disparity {
            Disparity::None => ListenerProfile::from_parts(crate::ListenerKind::Full, blocked, tax),
            Disparity::Hypernym => {
                ListenerProfile::from_parts(crate::ListenerKind::HypernymOnly, blocked, tax)
            }
            Disparity::LimitedVisual => {
                ListenerProfile::from_parts(crate::ListenerKind::LimitedVisual, blocked, tax)
            }
        }
    }

    pub fn validate(&self, tax: &Taxonomy) -> Result<()> {
        if self.n_repeats == 0 {
            return Err(Error::config("n_repeats must be at least 1"));
        }
        if self.dataset.is_none() {
            self.dataset_config().validate()?;
        }
        self.train_config(0).validate()?;
        self.listener(tax)?;
        Ok(())
    }
}
