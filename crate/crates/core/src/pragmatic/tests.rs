use proptest::prelude::*;
use rand::Rng;

use super::*;
use crate::rng;
use crate::scenes::Scene;
use crate::speaker::{sentence_candidates, word_candidates, Mode};
use crate::taxonomy::{load_taxonomy, TokenId};

fn pair(a: &[&str], b: &[&str], target: usize, tax: &Taxonomy) -> ScenePair {
    ScenePair::new(
        0,
        Scene::from_names(0, a, tax).unwrap(),
        Scene::from_names(1, b, tax).unwrap(),
        target,
    )
    .unwrap()
}

fn word(w: &str, tax: &Taxonomy) -> Utterance {
    Utterance::word(tax.id(w).unwrap())
}

fn id(w: &str, tax: &Taxonomy) -> TokenId {
    tax.id(w).unwrap()
}

// Values below were computed with 30-digit arithmetic (mpmath).
const LOGISTIC_2: f64 = 0.880_797_077_977_882_4;
const LOGISTIC_1: f64 = 0.731_058_578_630_004_9;
const LOGISTIC_005: f64 = 0.512_497_396_484_210_3;

#[test]
fn simulation_examples() {
    let tax = load_taxonomy();
    let full = ListenerProfile::full();
    let p = pair(&["pizza", "owl"], &["owl", "sun"], 0, &tax);
    let r = simulate_listener(&word("pizza", &tax), &p, &full, &tax);
    assert_eq!(
        r,
        SimulationResult {
            pick: SimPick::Scene(0),
            confidence: 1.0
        }
    );

    let p = pair(&["pie", "sun"], &["pizza", "pie", "sun"], 1, &tax);
    let r = simulate_listener(&word("food", &tax), &p, &full, &tax);
    assert_eq!(r.pick, SimPick::Scene(1));
    assert!((r.confidence - 2.0 / 3.0).abs() < 1e-15);

    let p = pair(&["sun", "kite"], &["sun", "pie"], 0, &tax);
    let r = simulate_listener(&word("sun", &tax), &p, &full, &tax);
    assert_eq!(
        r,
        SimulationResult {
            pick: SimPick::Tie,
            confidence: 0.5
        }
    );

    // No evidence at all is also a tie.
    let r = simulate_listener(
        &word("pizza", &tax),
        &p,
        &ListenerProfile::hypernym_only(),
        &tax,
    );
    assert_eq!(
        r,
        SimulationResult {
            pick: SimPick::Tie,
            confidence: 0.5
        }
    );
}

#[test]
fn distractor_leaning_candidate_scores_zero() {
    let tax = load_taxonomy();
    let p = pair(&["pizza", "sun"], &["pie", "coke", "sun"], 0, &tax);
    let r = simulate_listener(&word("food", &tax), &p, &ListenerProfile::full(), &tax);
    assert_eq!(r.pick, SimPick::Scene(1));
    assert_eq!(r.task_score(0), 0.0);
}

#[test]
fn rational_selection() {
    let tax = load_taxonomy();
    let full = ListenerProfile::full();
    let p = pair(&["owl", "pizza"], &["owl"], 0, &tax);
    let cands = word_candidates(p.target_scene(), &tax);
    assert_eq!(
        rational_select(&p, &cands, &full, &tax).render(&tax),
        "pizza"
    );

    // Everything the target offers is also in the distractor.
    let p = pair(&["owl", "sun"], &["owl", "sun", "pie"], 0, &tax);
    let cands = word_candidates(p.target_scene(), &tax);
    assert_eq!(
        rational_select(&p, &cands, &full, &tax),
        &cands.candidates[0]
    );

    // The unique candidate wins wherever it sits in the list.
    let p = pair(
        &["bear", "cat", "dog", "snake"],
        &["bear", "cat", "dog"],
        0,
        &tax,
    );
    let cands = word_candidates(p.target_scene(), &tax);
    assert_eq!(
        rational_select(&p, &cands, &full, &tax).render(&tax),
        "snake"
    );
}

#[test]
fn q_examples() {
    let tax = load_taxonomy();
    let mut policy = DisparityPolicy::uniform(&tax, 1.0, 1.0);
    for t in tax.vocabulary() {
        assert_eq!(policy.q_score(&Utterance::word(t)), 0.5);
    }
    policy.set_weight(id("pizza", &tax), 2.0);
    assert!((policy.q_score(&word("pizza", &tax)) - LOGISTIC_2).abs() < 1e-15);
    let s = Utterance::sentence(vec![id("pizza", &tax), id("food", &tax)], &tax);
    assert!((policy.q_score(&s) - LOGISTIC_1).abs() < 1e-15);
    assert!(policy.q_of_words(&["pizza", "spaceship"], &tax).is_err());
}

#[test]
fn logistic_is_stable_at_extremes() {
    assert_eq!(logistic(-1000.0), 0.0);
    assert_eq!(logistic(1000.0), 1.0);
    assert!((logistic(-2.0) - (1.0 - LOGISTIC_2)).abs() < 1e-15);
}

#[test]
fn combined_score_examples() {
    assert!((combined_score(true, 0.8, 0.5, 1.0, 1.0) - 0.4).abs() < 1e-15);
    assert_eq!(combined_score(false, 0.8, 0.5, 1.0, 1.0), 0.0);
    assert_eq!(combined_score(false, 1.0, 1.0, 3.0, 0.5), 0.0);
    assert_eq!(combined_score(true, 0.7, 0.1, 1.0, 0.0), 0.7);
    // lambda_l = 0 drops the task factor, indicator included.
    assert_eq!(combined_score(false, 0.7, 0.25, 0.0, 1.0), 0.25);
}

#[test]
fn eval_selection_is_argmax_with_order_tiebreak() {
    let tax = load_taxonomy();
    // Target {pizza, owl} vs {owl}: "pizza" and "food" both separate with p = 1.
    let p = pair(&["pizza", "owl"], &["owl"], 0, &tax);
    let cands = word_candidates(p.target_scene(), &tax);
    let mut policy = DisparityPolicy::uniform(&tax, 1.0, 1.0);
    let mut rng = rng::seeded(0);
    let chosen = pragmatic_select(&p, &cands, &policy, SelectMode::Eval, &tax, &mut rng);
    assert_eq!(chosen.utterance.render(&tax), "pizza");
    assert!((chosen.a - 0.5).abs() < 1e-15);

    policy.set_weight(id("food", &tax), 1.0);
    let chosen = pragmatic_select(&p, &cands, &policy, SelectMode::Eval, &tax, &mut rng);
    assert_eq!(chosen.utterance.render(&tax), "food");
}

#[test]
fn train_sampling_follows_scores() {
    let tax = load_taxonomy();
    let p = pair(&["pizza", "owl"], &["owl"], 0, &tax);
    let cands = word_candidates(p.target_scene(), &tax);
    let sims = simulate_all(&cands, &p, &ListenerProfile::full(), &tax);
    let policy = DisparityPolicy::uniform(&tax, 1.0, 1.0);
    let mut rng = rng::seeded(42);
    let n = 1000;
    let pizza = (0..n)
        .filter(|_| {
            pragmatic_select_with(&p, &cands, &sims, &policy, SelectMode::Train, &mut rng)
                .utterance
                .render(&tax)
                == "pizza"
        })
        .count();
    let frac = pizza as f64 / n as f64;
    assert!((0.45..=0.55).contains(&frac), "{frac}");

    // All-zero scores fall back to uniform over candidates.
    let weights = [0.0; 4];
    let mut counts = [0usize; 4];
    for _ in 0..4000 {
        counts[sample_proportional(&weights, &mut rng)] += 1;
    }
    assert!(
        counts.iter().all(|&c| (800..=1200).contains(&c)),
        "{counts:?}"
    );
}

#[test]
fn uniform_policy_matches_rational_speaker() {
    let tax = load_taxonomy();
    let full = ListenerProfile::full();
    let policy = DisparityPolicy::uniform(&tax, 1.0, 1.0);
    let mut rng = rng::seeded(1);
    for seed in 0..300 {
        let mut g = rng::seeded(seed);
        let difficulty = if seed % 2 == 0 {
            crate::Difficulty::Hard
        } else {
            crate::Difficulty::Easy
        };
        let p = crate::scenes::generate_pair(&mut g, seed, difficulty, &Default::default(), &tax)
            .unwrap();
        for cands in [
            word_candidates(p.target_scene(), &tax),
            sentence_candidates(p.target_scene(), &tax),
        ] {
            let rational = rational_select(&p, &cands, &full, &tax);
            let prag = pragmatic_select(&p, &cands, &policy, SelectMode::Eval, &tax, &mut rng);
            assert_eq!(&prag.utterance, rational);
        }
    }
}

fn scored(utt: Utterance, policy: &DisparityPolicy, p: f64) -> ScoredCandidate {
    let q = policy.q_score(&utt);
    ScoredCandidate {
        index: 0,
        sim: SimulationResult {
            pick: SimPick::Scene(0),
            confidence: p,
        },
        a: combined_score(true, p, q, policy.lambda_l, policy.lambda_d),
        utterance: utt,
        q,
    }
}

#[test]
fn reinforce_step_examples() {
    let tax = load_taxonomy();
    let pizza = id("pizza", &tax);
    let mut policy = DisparityPolicy::uniform(&tax, 1.0, 1.0);
    let chosen = scored(Utterance::word(pizza), &policy, 1.0);
    assert!(reinforce_update(&mut policy, &chosen, 1, 0.1));
    assert!((policy.weight(pizza) - 0.05).abs() < 1e-15);
    assert!((policy.q_score(&Utterance::word(pizza)) - LOGISTIC_005).abs() < 1e-15);
    // Only the chosen token moved.
    assert_eq!(policy.theta.iter().filter(|&&w| w != 0.0).count(), 1);

    let mut policy = DisparityPolicy::uniform(&tax, 1.0, 1.0);
    reinforce_update(&mut policy, &chosen, -1, 0.1);
    assert!((policy.weight(pizza) + 0.05).abs() < 1e-15);

    let mut policy = DisparityPolicy::uniform(&tax, 1.0, 0.0);
    let chosen = scored(Utterance::word(pizza), &policy, 1.0);
    reinforce_update(&mut policy, &chosen, 1, 0.1);
    assert!(policy.theta.iter().all(|&w| w == 0.0));
}

#[test]
fn zero_score_decisions_are_skipped() {
    let tax = load_taxonomy();
    let mut policy = DisparityPolicy::uniform(&tax, 1.0, 1.0);
    let mut chosen = scored(word("pizza", &tax), &policy, 1.0);
    chosen.a = 0.0;
    assert!(!reinforce_update(&mut policy, &chosen, 1, 0.1));
    assert!(policy.theta.iter().all(|&w| w == 0.0));
}

/// `-ln(a) * r` recomputed from theta directly.
fn loss_at(theta: &[f64], tokens: &[TokenId], p: f64, lambda_l: f64, lambda_d: f64, r: i32) -> f64 {
    let mean = tokens.iter().map(|t| theta[t.index()]).sum::<f64>() / tokens.len() as f64;
    let q = 1.0 / (1.0 + (-mean).exp());
    let a = p.powf(lambda_l) * q.powf(lambda_d);
    -a.ln() * f64::from(r)
}

proptest! {
    #[test]
    fn analytic_gradient_matches_finite_differences(
        weights in prop::collection::vec(-3.0f64..3.0, 78),
        first in 0usize..78,
        second in prop::option::of(0usize..78),
        p in 0.05f64..1.0,
        lambda_l in 0.0f64..4.0,
        lambda_d in 0.1f64..4.0,
        positive in any::<bool>(),
    ) {
        let tax = load_taxonomy();
        let ids: Vec<TokenId> = tax.vocabulary().collect();
        let mut tokens = vec![ids[first]];
        if let Some(s) = second.filter(|&s| s != first) {
            tokens.push(ids[s]);
        }
        let utt = if tokens.len() == 1 { Utterance::word(tokens[0]) } else { Utterance::sentence(tokens.clone(), &tax) };
        let mut policy = DisparityPolicy::uniform(&tax, lambda_l, lambda_d);
        policy.theta = weights.clone();
        let r = if positive { 1 } else { -1 };
        let chosen = scored(utt, &policy, p);
        let mut ascent = vec![0.0; weights.len()];
        prop_assert!(accumulate_ascent(&policy, &chosen, r, &mut ascent));

        let h = 1e-6;
        for t in &tokens {
            let mut plus = weights.clone();
            plus[t.index()] += h;
            let mut minus = weights.clone();
            minus[t.index()] -= h;
            let fd = (loss_at(&plus, &tokens, p, lambda_l, lambda_d, r)
                - loss_at(&minus, &tokens, p, lambda_l, lambda_d, r)) / (2.0 * h);
            let analytic = -ascent[t.index()];
            let rel = (analytic - fd).abs() / fd.abs().max(1e-12);
            prop_assert!(rel <= 1e-5, "token {t}: analytic {analytic} fd {fd}");
        }
    }

    #[test]
    fn selection_is_scale_invariant(
        weights in prop::collection::vec(0.0f64..1.0, 1..12),
        scale in 0.01f64..100.0,
        seed in any::<u64>(),
    ) {
        let scaled: Vec<f64> = weights.iter().map(|w| w * scale).collect();
        prop_assert_eq!(first_argmax(weights.iter().copied()), first_argmax(scaled.iter().copied()));
        let mut r1 = rng::seeded(seed);
        let mut r2 = rng::seeded(seed);
        let a = sample_proportional(&weights, &mut r1);
        let b = sample_proportional(&scaled, &mut r2);
        // Scaling changes rounding only at bucket edges.
        let total: f64 = weights.iter().sum();
        if total > 0.0 && a != b {
            let edge: f64 = weights[..a.max(b)].iter().sum::<f64>() / total;
            let u: f64 = rng::seeded(seed).random();
            prop_assert!((u - edge).abs() < 1e-9);
        }
    }
}

fn small_dataset(seed: u64, tax: &Taxonomy) -> crate::Dataset {
    let config = crate::scenes::DatasetConfig {
        n_pairs: 200,
        hard_fraction: 0.58,
        generation: Default::default(),
    };
    crate::scenes::assemble_dataset(seed, config, tax).unwrap()
}

fn short_config(seed: u64) -> TrainConfig {
    TrainConfig {
        epochs: 12,
        patience: 2,
        batch_size: 16,
        ..TrainConfig::word(seed)
    }
}

#[test]
fn training_is_deterministic() {
    let tax = load_taxonomy();
    let ds = small_dataset(5, &tax);
    let ho = ListenerProfile::hypernym_only();
    let (p1, h1) = train(&ds, &ho, &short_config(9), &tax).unwrap();
    let (p2, h2) = train(&ds, &ho, &short_config(9), &tax).unwrap();
    assert_eq!(p1, p2);
    assert_eq!(h1, h2);
    let (p3, _) = train(&ds, &ho, &short_config(10), &tax).unwrap();
    assert_ne!(p1.theta, p3.theta);
}

#[test]
fn learning_rate_never_grows() {
    let tax = load_taxonomy();
    let ds = small_dataset(6, &tax);
    let (_, history) = train(
        &ds,
        &ListenerProfile::limited_visual(&tax),
        &short_config(1),
        &tax,
    )
    .unwrap();
    assert_eq!(history.epochs.len(), 12);
    assert!(history.epochs.windows(2).all(|w| w[1].lr <= w[0].lr));
    assert!(history.epochs.iter().all(|e| e.lr <= 2.0));
}

#[test]
fn returned_snapshot_is_the_best_validation_epoch() {
    let tax = load_taxonomy();
    let ds = small_dataset(7, &tax);
    let (policy, history) = train(
        &ds,
        &ListenerProfile::hypernym_only(),
        &short_config(2),
        &tax,
    )
    .unwrap();
    let best = history
        .epochs
        .iter()
        .map(|e| e.val_accuracy)
        .fold(history.initial_val_accuracy, f64::max);
    assert_eq!(policy.schedule.best_val_accuracy, best);
    let val = PreparedPair::prepare_all(&ds.val, Mode::Word, &ListenerProfile::full(), &tax);
    let again = evaluate_policy(&val, &policy, &ListenerProfile::hypernym_only(), &tax, 2);
    assert_eq!(again, best);
}

#[test]
fn checkpoint_round_trip() {
    let tax = load_taxonomy();
    let ds = small_dataset(8, &tax);
    let (policy, _) = train(
        &ds,
        &ListenerProfile::hypernym_only(),
        &short_config(3),
        &tax,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("policy.json");
    policy.save(&path, &tax).unwrap();
    let back = DisparityPolicy::load(&path, &tax).unwrap();
    assert_eq!(back, policy);

    let text = std::fs::read_to_string(&path).unwrap();
    let broken = text.replace("\"pizza\"", "\"spaceship\"");
    assert!(DisparityPolicy::from_json(&broken, &tax).is_err());
}

#[test]
fn invalid_training_configs_are_rejected() {
    let tax = load_taxonomy();
    let ds = small_dataset(8, &tax);
    let full = ListenerProfile::full();
    for bad in [
        TrainConfig {
            lr: 0.0,
            ..short_config(0)
        },
        TrainConfig {
            lambda_d: -1.0,
            ..short_config(0)
        },
        TrainConfig {
            decay: 1.0,
            ..short_config(0)
        },
        TrainConfig {
            batch_size: 0,
            ..short_config(0)
        },
    ] {
        assert!(matches!(train(&ds, &full, &bad, &tax), Err(e) if e.is_config()));
    }
}

fn fingerprint(ds: &crate::Dataset, tax: &Taxonomy) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    tax.to_tsv().hash(&mut h);
    let full = ListenerProfile::full();
    for (split, pair) in ds.iter() {
        split.hash(&mut h);
        format!("{pair:?}").hash(&mut h);
        for mode in [Mode::Word, Mode::Sentence] {
            let prepared = PreparedPair::new(pair, mode, &full, tax);
            prepared.candidates.hash(&mut h);
            format!("{:?}", prepared.sims).hash(&mut h);
        }
    }
    h.finish()
}

#[test]
fn training_leaves_long_term_memory_untouched() {
    let tax = load_taxonomy();
    let ds = small_dataset(11, &tax);
    let before = fingerprint(&ds, &tax);
    train(
        &ds,
        &ListenerProfile::hypernym_only(),
        &short_config(4),
        &tax,
    )
    .unwrap();
    train(
        &ds,
        &ListenerProfile::limited_visual(&tax),
        &short_config(4),
        &tax,
    )
    .unwrap();
    assert_eq!(fingerprint(&ds, &tax), before);
}

#[test]
fn hypernym_listener_pushes_toward_category_words() {
    let tax = load_taxonomy();
    let ds = small_dataset(12, &tax);
    let ho = ListenerProfile::hypernym_only();
    let (policy, history) = train(&ds, &ho, &short_config(5), &tax).unwrap();
    assert!(history.best_epoch.is_some());
    for t in tax.hypernyms() {
        assert!(policy.weight(t) >= 0.0, "{}", tax.name(t));
    }
    let hypernym_rate = |policy: &DisparityPolicy| {
        let val = PreparedPair::prepare_all(&ds.val, Mode::Word, &ListenerProfile::full(), &tax);
        let mut rng = rng::seeded(0);
        let n = val
            .iter()
            .filter(|p| {
                let c = pragmatic_select_with(
                    p.pair,
                    &p.candidates,
                    &p.sims,
                    policy,
                    SelectMode::Eval,
                    &mut rng,
                );
                tax.is_hypernym(c.utterance.tokens[0])
            })
            .count();
        n as f64 / val.len() as f64
    };
    let start = hypernym_rate(&DisparityPolicy::uniform(&tax, 1.0, 1.0));
    assert!(hypernym_rate(&policy) > start);
}
