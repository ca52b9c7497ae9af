use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::listener::{choose, reward, ListenerProfile};
use crate::pragmatic::{
    pragmatic_select_with, rational_select_index, simulate_all, DisparityPolicy, SelectMode,
};
use crate::rng::{self, stream};
use crate::scenes::{Difficulty, ScenePair};
use crate::speaker::{candidates, Mode, Utterance};
use crate::taxonomy::Taxonomy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SpeakerKind {
    /// Literal speaker: a uniformly random candidate.
    S0,
    /// Rational speaker simulating a full-knowledge listener.
    S1,
    /// Rational speaker plus the learned disparity layer.
    S1d,
    /// Rational speaker simulating the actual listener (upper bound).
    S1nd,
}

impl SpeakerKind {
    pub const ALL: [SpeakerKind; 4] = [
        SpeakerKind::S0,
        SpeakerKind::S1,
        SpeakerKind::S1d,
        SpeakerKind::S1nd,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SpeakerKind::S0 => "S0",
            SpeakerKind::S1 => "S1",
            SpeakerKind::S1d => "S1d",
            SpeakerKind::S1nd => "S1nd",
        }
    }
}

impl std::fmt::Display for SpeakerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.pad(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Slice {
    Hard,
    Easy,
    Combined,
}

impl Slice {
    pub const ALL: [Slice; 3] = [Slice::Hard, Slice::Easy, Slice::Combined];

    pub fn as_str(self) -> &'static str {
        match self {
            Slice::Hard => "Hard",
            Slice::Easy => "Easy",
            Slice::Combined => "Combined",
        }
    }
}

/// Wins and games per difficulty slice.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SliceCounts {
    pub hard_correct: usize,
    pub hard_total: usize,
    pub easy_correct: usize,
    pub easy_total: usize,
}

impl SliceCounts {
    pub fn record(&mut self, difficulty: Difficulty, correct: bool) {
        let (c, t) = match difficulty {
            Difficulty::Hard => (&mut self.hard_correct, &mut self.hard_total),
            Difficulty::Easy => (&mut self.easy_correct, &mut self.easy_total),
        };
        *c += usize::from(correct);
        *t += 1;
    }

    /// Fraction of games won; 0 for an empty slice.
    pub fn accuracy(&self, slice: Slice) -> f64 {
        let (c, t) = match slice {
            Slice::Hard => (self.hard_correct, self.hard_total),
            Slice::Easy => (self.easy_correct, self.easy_total),
            Slice::Combined => (
                self.hard_correct + self.easy_correct,
                self.hard_total + self.easy_total,
            ),
        };
        if t == 0 {
            0.0
        } else {
            c as f64 / t as f64
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpeakerEvaluation {
    pub kind: SpeakerKind,
    pub counts: SliceCounts,
    /// One per pair, in input order.
    pub chosen: Vec<Utterance>,
}

impl SpeakerEvaluation {
    pub fn accuracy(&self, slice: Slice) -> f64 {
        self.counts.accuracy(slice)
    }
}

/// Plays `kind` against `listener` on every pair.
///
/// Listener coin flips come from a stream keyed by `(seed, pair id)`, so all
/// speakers evaluated with the same seed face the same coins. S0's random
/// pick uses its own per-pair stream.
pub fn evaluate_speaker(
    kind: SpeakerKind,
    pairs: &[ScenePair],
    mode: Mode,
    listener: &ListenerProfile,
    policy: Option<&DisparityPolicy>,
    tax: &Taxonomy,
    seed: u64,
) -> Result<SpeakerEvaluation> {
    let policy = match (kind, policy) {
        (SpeakerKind::S1d, None) => return Err(Error::config("S1d needs a trained policy")),
        (SpeakerKind::S1d, Some(p)) if p.mode != mode => {
            return Err(Error::config(format!(
                "policy was trained in {:?} mode, evaluation is in {mode:?} mode",
                p.mode
            )))
        }
        (_, p) => p,
    };
    let full = ListenerProfile::full();
    let mut counts = SliceCounts::default();
    let mut chosen = Vec::with_capacity(pairs.len());
    for pair in pairs {
        let cands = candidates(pair.target_scene(), mode, tax);
        let mut coins = rng::derived(seed, stream::LISTENER, pair.id);
        let index = match kind {
            SpeakerKind::S0 => {
                rng::derived(seed, stream::LITERAL, pair.id).random_range(0..cands.len())
            }
            SpeakerKind::S1 => rational_select_index(pair, &simulate_all(&cands, pair, &full, tax)),
            SpeakerKind::S1nd => {
                rational_select_index(pair, &simulate_all(&cands, pair, listener, tax))
            }
            SpeakerKind::S1d => {
                let sims = simulate_all(&cands, pair, &full, tax);
                let policy = policy.expect("checked above");
                pragmatic_select_with(pair, &cands, &sims, policy, SelectMode::Eval, &mut coins)
                    .index
            }
        };
        let utt = &cands.candidates[index];
        let won = reward(choose(utt, pair, listener, tax, &mut coins), pair.target) > 0;
        counts.record(pair.difficulty, won);
        chosen.push(utt.clone());
    }
    Ok(SpeakerEvaluation {
        kind,
        counts,
        chosen,
    })
}
