//! Working memory: rational re-ranking of literal candidates and the learned
//! disparity-adjustment layer on top of it.
//!
//! For each candidate the speaker simulates a listener and gets a predicted
//! scene `t_i` with confidence `p_i`. The rational speaker keeps the
//! candidate maximising `[t_i == target] * p_i`. The pragmatic speaker also
//! multiplies in a per-utterance preference `q_i = logistic(mean theta[w])`
//! and scores `a_i = ([t_i == target] * p_i)^lambda_l * q_i^lambda_d`.
//! Only `theta` is learned; candidates and simulations stay fixed.

mod policy;
mod train;

pub use policy::{DisparityPolicy, ScheduleState, POLICY_FORMAT_VERSION};
pub use train::{evaluate_policy, train, EpochRecord, PreparedPair, TrainConfig, TrainingHistory};

use rand::Rng;

use crate::listener::{ground_perceived, perceive, ListenerProfile};
use crate::rng::SimRng;
use crate::scenes::ScenePair;
use crate::speaker::{CandidateSet, Utterance};
use crate::taxonomy::Taxonomy;

/// What the simulated listener would pick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SimPick {
    Scene(usize),
    Tie,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimulationResult {
    pub pick: SimPick,
    /// Share of grounding evidence that falls on the target scene; 0.5 on a tie.
    pub confidence: f64,
}

impl SimulationResult {
    /// `[t_i == target] * p_i`.
    pub fn task_score(&self, target: usize) -> f64 {
        if self.pick == SimPick::Scene(target) {
            self.confidence
        } else {
            0.0
        }
    }

    pub fn hits(&self, target: usize) -> bool {
        self.pick == SimPick::Scene(target)
    }
}

/// Runs the simulated listener on one candidate.
pub fn simulate_listener(
    candidate: &Utterance,
    pair: &ScenePair,
    sim_profile: &ListenerProfile,
    tax: &Taxonomy,
) -> SimulationResult {
    let target = perceive(pair.target_scene(), sim_profile, tax);
    let distractor = perceive(pair.distractor_scene(), sim_profile, tax);
    let st = ground_perceived(&candidate.tokens, &target, sim_profile, tax).0;
    let sd = ground_perceived(&candidate.tokens, &distractor, sim_profile, tax).0;
    if st + sd == 0 {
        return SimulationResult {
            pick: SimPick::Tie,
            confidence: 0.5,
        };
    }
    let pick = match st.cmp(&sd) {
        std::cmp::Ordering::Greater => SimPick::Scene(pair.target),
        std::cmp::Ordering::Less => SimPick::Scene(pair.distractor()),
        std::cmp::Ordering::Equal => SimPick::Tie,
    };
    let confidence = if pick == SimPick::Tie {
        0.5
    } else {
        st as f64 / (st + sd) as f64
    };
    SimulationResult { pick, confidence }
}

pub fn simulate_all(
    candidates: &CandidateSet,
    pair: &ScenePair,
    sim_profile: &ListenerProfile,
    tax: &Taxonomy,
) -> Vec<SimulationResult> {
    candidates
        .iter()
        .map(|c| simulate_listener(c, pair, sim_profile, tax))
        .collect()
}

/// First index holding the strict maximum; 0 for an empty or all-zero list
/// resolves to the first candidate.
fn first_argmax(scores: impl IntoIterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_score = f64::NEG_INFINITY;
    for (i, s) in scores.into_iter().enumerate() {
        if s > best_score {
            best = i;
            best_score = s;
        }
    }
    best
}

/// Index of the candidate the rational speaker sends.
pub fn rational_select_index(pair: &ScenePair, sims: &[SimulationResult]) -> usize {
    assert!(!sims.is_empty(), "no candidates to select from");
    first_argmax(sims.iter().map(|s| s.task_score(pair.target)))
}

/// Rational speaker: simulate `sim_profile` on each candidate and keep the
/// most reliably correct one, earliest first on ties.
pub fn rational_select<'c>(
    pair: &ScenePair,
    candidates: &'c CandidateSet,
    sim_profile: &ListenerProfile,
    tax: &Taxonomy,
) -> &'c Utterance {
    let sims = simulate_all(candidates, pair, sim_profile, tax);
    &candidates.candidates[rational_select_index(pair, &sims)]
}

pub fn logistic(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// `x^lambda` with `0^0 = 1`.
pub fn weighted_power(x: f64, lambda: f64) -> f64 {
    if lambda == 0.0 {
        1.0
    } else if lambda == 1.0 {
        x
    } else {
        x.powf(lambda)
    }
}

/// `a_i = ([hit] * p)^lambda_l * q^lambda_d`.
pub fn combined_score(hit: bool, p: f64, q: f64, lambda_l: f64, lambda_d: f64) -> f64 {
    let task = if hit { p } else { 0.0 };
    weighted_power(task, lambda_l) * weighted_power(q, lambda_d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelectMode {
    /// Sample in proportion to `a_i`.
    Train,
    /// Take the argmax of `a_i`.
    Eval,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScoredCandidate {
    pub index: usize,
    pub utterance: Utterance,
    pub sim: SimulationResult,
    pub q: f64,
    pub a: f64,
}

/// `a_i` for every candidate.
pub fn score_candidates(
    pair: &ScenePair,
    candidates: &CandidateSet,
    sims: &[SimulationResult],
    policy: &DisparityPolicy,
) -> Vec<(f64, f64)> {
    candidates
        .iter()
        .zip(sims)
        .map(|(c, s)| {
            let q = policy.q_score(c);
            let a = combined_score(
                s.hits(pair.target),
                s.confidence,
                q,
                policy.lambda_l,
                policy.lambda_d,
            );
            (q, a)
        })
        .collect()
}

/// Index into `weights` drawn with probability proportional to weight;
/// uniform when every weight is zero.
pub fn sample_proportional(weights: &[f64], rng: &mut SimRng) -> usize {
    let total: f64 = weights.iter().sum();
    if total.is_nan() || total <= 0.0 {
        return rng.random_range(0..weights.len());
    }
    let mut x = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    // Rounding left x at the very top; take the last positive weight.
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Pragmatic speaker choice over precomputed simulations.
pub fn pragmatic_select_with(
    pair: &ScenePair,
    candidates: &CandidateSet,
    sims: &[SimulationResult],
    policy: &DisparityPolicy,
    mode: SelectMode,
    rng: &mut SimRng,
) -> ScoredCandidate {
    assert!(!candidates.is_empty(), "no candidates to select from");
    let scored = score_candidates(pair, candidates, sims, policy);
    let index = match mode {
        SelectMode::Eval => first_argmax(scored.iter().map(|&(_, a)| a)),
        SelectMode::Train => {
            let weights: Vec<f64> = scored.iter().map(|&(_, a)| a).collect();
            sample_proportional(&weights, rng)
        }
    };
    ScoredCandidate {
        index,
        utterance: candidates.candidates[index].clone(),
        sim: sims[index],
        q: scored[index].0,
        a: scored[index].1,
    }
}

/// Pragmatic speaker: simulate a full-knowledge listener on every candidate,
/// then score with the policy. `rng` is only used in Train mode.
pub fn pragmatic_select(
    pair: &ScenePair,
    candidates: &CandidateSet,
    policy: &DisparityPolicy,
    mode: SelectMode,
    tax: &Taxonomy,
    rng: &mut SimRng,
) -> ScoredCandidate {
    let sims = simulate_all(candidates, pair, &ListenerProfile::full(), tax);
    pragmatic_select_with(pair, candidates, &sims, policy, mode, rng)
}

/// Policy-gradient loss of one decision, `-ln(a) * r`.
pub fn decision_loss(a: f64, reward: i32) -> f64 {
    -a.ln() * f64::from(reward)
}

/// Adds `-dL/dtheta` of one decision into `grad`. Only the `q` factor
/// depends on `theta`; returns false (nothing added) when `a == 0`.
pub fn accumulate_ascent(
    policy: &DisparityPolicy,
    chosen: &ScoredCandidate,
    reward: i32,
    grad: &mut [f64],
) -> bool {
    if chosen.a.is_nan() || chosen.a <= 0.0 {
        return false;
    }
    let tokens = &chosen.utterance.tokens;
    let q = policy.q_score(&chosen.utterance);
    let step = f64::from(reward) * policy.lambda_d * (1.0 - q) / tokens.len() as f64;
    for t in tokens {
        grad[t.index()] += step;
    }
    true
}

/// One policy-gradient step on a single decision. Returns false and leaves
/// `policy` untouched when `chosen.a == 0`.
pub fn reinforce_update(
    policy: &mut DisparityPolicy,
    chosen: &ScoredCandidate,
    reward: i32,
    lr: f64,
) -> bool {
    let mut grad = vec![0.0; policy.theta.len()];
    if !accumulate_ascent(policy, chosen, reward, &mut grad) {
        return false;
    }
    policy.apply_ascent(&grad, lr);
    true
}

#[cfg(test)]
mod tests;
