//! Literal speaker: candidate utterances for a target scene.
//!
//! Candidates depend on the target scene alone. Word mode offers every
//! object name in the scene plus every category covering one of them;
//! sentence mode wraps those words in two fixed templates.

use serde::{Deserialize, Serialize};

use crate::scenes::Scene;
use crate::taxonomy::{Taxonomy, TokenId};

/// Maximum number of candidates kept per scene.
pub const BEAM_SIZE: usize = 30;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Word,
    Sentence,
}

impl std::str::FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "word" => Ok(Mode::Word),
            "sentence" => Ok(Mode::Sentence),
            other => Err(format!("unknown mode `{other}` (expected word|sentence)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Utterance {
    /// Content tokens, in surface order.
    pub tokens: Vec<TokenId>,
    pub mode: Mode,
    /// Rendered sentence; `None` in word mode.
    pub surface: Option<String>,
}

impl Utterance {
    pub fn word(token: TokenId) -> Self {
        Utterance {
            tokens: vec![token],
            mode: Mode::Word,
            surface: None,
        }
    }

    pub fn sentence(tokens: Vec<TokenId>, tax: &Taxonomy) -> Self {
        let surface = match tokens.as_slice() {
            [x] => format!("there is a {}", tax.name(*x)),
            [x, y] => format!("there is a {} and a {}", tax.name(*x), tax.name(*y)),
            _ => panic!("sentence templates take one or two content words"),
        };
        Utterance {
            tokens,
            mode: Mode::Sentence,
            surface: Some(surface),
        }
    }

    pub fn render(&self, tax: &Taxonomy) -> String {
        match &self.surface {
            Some(s) => s.clone(),
            None => self
                .tokens
                .iter()
                .map(|&t| tax.name(t))
                .collect::<Vec<_>>()
                .join(" "),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CandidateSet {
    pub candidates: Vec<Utterance>,
    pub source_scene_id: u64,
}

impl CandidateSet {
    pub fn len(&self) -> usize {
        self.candidates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.candidates.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Utterance> {
        self.candidates.iter()
    }

    /// Every content token names an object of `scene` or a category covering
    /// one of them.
    pub fn is_grounded_in(&self, scene: &Scene, tax: &Taxonomy) -> bool {
        self.candidates.iter().all(|u| {
            u.tokens.iter().all(|&w| {
                scene
                    .objects()
                    .iter()
                    .any(|&o| o == w || tax.parent(o) == w)
            })
        })
    }
}

fn word_tokens(target: &Scene, tax: &Taxonomy) -> Vec<TokenId> {
    // Object ids sort lexicographically and precede category ids, so one
    // sort gives objects then categories, each alphabetical.
    let mut tokens: Vec<TokenId> = target.objects().to_vec();
    tokens.extend(target.objects().iter().map(|&o| tax.parent(o)));
    tokens.sort_unstable();
    tokens.dedup();
    tokens
}

pub fn word_candidates(target: &Scene, tax: &Taxonomy) -> CandidateSet {
    let mut tokens = word_tokens(target, tax);
    tokens.truncate(BEAM_SIZE);
    CandidateSet {
        candidates: tokens.into_iter().map(Utterance::word).collect(),
        source_scene_id: target.id,
    }
}

/// "there is a x" for each word candidate, then "there is a x and a y" for
/// each pair with x before y in word-candidate order.
pub fn sentence_candidates(target: &Scene, tax: &Taxonomy) -> CandidateSet {
    let words = word_tokens(target, tax);
    let singles = words.iter().map(|&w| vec![w]);
    let doubles = words
        .iter()
        .enumerate()
        .flat_map(|(i, &x)| words[i + 1..].iter().map(move |&y| vec![x, y]));
    let candidates = singles
        .chain(doubles)
        .take(BEAM_SIZE)
        .map(|tokens| Utterance::sentence(tokens, tax))
        .collect();
    CandidateSet {
        candidates,
        source_scene_id: target.id,
    }
}

pub fn candidates(target: &Scene, mode: Mode, tax: &Taxonomy) -> CandidateSet {
    match mode {
        Mode::Word => word_candidates(target, tax),
        Mode::Sentence => sentence_candidates(target, tax),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::load_taxonomy;
    use std::collections::HashSet;

    fn names(set: &CandidateSet, tax: &Taxonomy) -> Vec<String> {
        set.iter().map(|u| u.render(tax)).collect()
    }

    #[test]
    fn word_candidates_objects_then_categories() {
        let tax = load_taxonomy();
        let scene = Scene::from_names(1, &["pizza", "owl", "sun"], &tax).unwrap();
        let set = word_candidates(&scene, &tax);
        assert_eq!(
            names(&set, &tax),
            ["owl", "pizza", "sun", "animal", "food", "sky_objects"]
        );
        assert_eq!(set.source_scene_id, 1);
    }

    #[test]
    fn shared_category_appears_once() {
        let tax = load_taxonomy();
        let scene = Scene::from_names(0, &["bear", "cat"], &tax).unwrap();
        assert_eq!(
            names(&word_candidates(&scene, &tax), &tax),
            ["bear", "cat", "animal"]
        );
    }

    #[test]
    fn word_cap_never_binds() {
        let tax = load_taxonomy();
        let scene = Scene::from_names(
            0,
            &[
                "mike_run",
                "jenny_sit",
                "crown",
                "tent",
                "kite",
                "pie",
                "sun",
                "owl",
                "bench",
            ],
            &tax,
        )
        .unwrap();
        let set = word_candidates(&scene, &tax);
        assert_eq!(set.len(), 9 + 8);
        assert!(set.len() <= BEAM_SIZE);
    }

    #[test]
    fn sentence_templates() {
        let tax = load_taxonomy();
        let scene = Scene::from_names(0, &["pizza"], &tax).unwrap();
        assert_eq!(
            names(&sentence_candidates(&scene, &tax), &tax),
            [
                "there is a pizza",
                "there is a food",
                "there is a pizza and a food"
            ]
        );

        let scene = Scene::from_names(0, &["owl", "pizza", "bench"], &tax).unwrap();
        let set = sentence_candidates(&scene, &tax);
        let rendered = names(&set, &tax);
        assert!(rendered.contains(&"there is a pizza".to_string()));
        assert!(rendered.contains(&"there is a food".to_string()));
        assert!(set.is_grounded_in(&scene, &tax));
        assert!(set.len() <= BEAM_SIZE);
        let first_double = set.iter().position(|u| u.tokens.len() == 2).unwrap();
        assert!(set.candidates[first_double..]
            .iter()
            .all(|u| u.tokens.len() == 2));
        let distinct: HashSet<_> = set.iter().map(|u| u.tokens.clone()).collect();
        assert_eq!(distinct.len(), set.len());
    }

    #[test]
    fn large_scene_sentences_truncate_at_beam_size() {
        let tax = load_taxonomy();
        let scene =
            Scene::from_names(0, &["pie", "sun", "owl", "kite", "tent", "crown"], &tax).unwrap();
        let set = sentence_candidates(&scene, &tax);
        assert_eq!(set.len(), BEAM_SIZE);
        assert_eq!(set.iter().filter(|u| u.tokens.len() == 1).count(), 12);
    }
}
