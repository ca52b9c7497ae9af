//! The actual listener: what it perceives, which words it understands, and
//! how it picks a scene.
//!
//! Grounding is word matching. An object word matches that object; a
//! category word matches every perceived object of the category. The scene
//! with more matches wins and equal evidence is settled by a fair coin.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::SimRng;
use crate::scenes::{Scene, ScenePair};
use crate::speaker::Utterance;
use crate::taxonomy::{Taxonomy, TokenId, ANIMAL, UNK};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ListenerKind {
    Full,
    HypernymOnly,
    LimitedVisual,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ListenerProfile {
    kind: ListenerKind,
    blocked: BTreeSet<TokenId>,
}

impl ListenerProfile {
    pub fn full() -> Self {
        ListenerProfile {
            kind: ListenerKind::Full,
            blocked: BTreeSet::new(),
        }
    }

    pub fn hypernym_only() -> Self {
        ListenerProfile {
            kind: ListenerKind::HypernymOnly,
            blocked: BTreeSet::new(),
        }
    }

    /// Limited-visual listener that cannot see animals.
    pub fn limited_visual(tax: &Taxonomy) -> Self {
        Self::limited_visual_blocking(&[ANIMAL], tax).expect("animal is a category")
    }

    pub fn limited_visual_blocking<S: AsRef<str>>(
        categories: &[S],
        tax: &Taxonomy,
    ) -> Result<Self> {
        let blocked = categories
            .iter()
            .map(|c| tax.category_id(c.as_ref()))
            .collect::<Result<BTreeSet<_>>>()?;
        Ok(ListenerProfile {
            kind: ListenerKind::LimitedVisual,
            blocked,
        })
    }

    /// Builds a profile from its config form. `blocked_categories` must be
    /// empty unless `kind` is LimitedVisual; an empty list there means
    /// `{animal}`.
    pub fn from_parts<S: AsRef<str>>(
        kind: ListenerKind,
        blocked_categories: &[S],
        tax: &Taxonomy,
    ) -> Result<Self> {
        match kind {
            ListenerKind::LimitedVisual if blocked_categories.is_empty() => {
                Ok(Self::limited_visual(tax))
            }
            ListenerKind::LimitedVisual => Self::limited_visual_blocking(blocked_categories, tax),
            _ if !blocked_categories.is_empty() => Err(Error::config(
                "blocked_categories only apply to limited-visual listeners",
            )),
            ListenerKind::Full => Ok(Self::full()),
            ListenerKind::HypernymOnly => Ok(Self::hypernym_only()),
        }
    }

    pub fn kind(&self) -> ListenerKind {
        self.kind
    }

    pub fn blocked(&self) -> &BTreeSet<TokenId> {
        &self.blocked
    }

    fn is_blocked(&self, token: TokenId, tax: &Taxonomy) -> bool {
        self.blocked.contains(&tax.parent(token))
    }
}

/// A token as the listener hears it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Heard {
    Token(TokenId),
    Unk,
}

impl Heard {
    pub fn render(self, tax: &Taxonomy) -> &str {
        match self {
            Heard::Token(t) => tax.name(t),
            Heard::Unk => UNK,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct GroundingScore(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Choice {
    pub picked: usize,
    /// The scores were equal and `picked` came from a coin flip.
    pub tie: bool,
}

/// The listener's view of `scene`. May be empty.
pub fn perceive(scene: &Scene, profile: &ListenerProfile, tax: &Taxonomy) -> Scene {
    match profile.kind {
        ListenerKind::Full | ListenerKind::HypernymOnly => scene.clone(),
        ListenerKind::LimitedVisual => Scene::perceived(
            scene.id,
            scene
                .objects()
                .iter()
                .copied()
                .filter(|&o| !profile.is_blocked(o, tax))
                .collect(),
        ),
    }
}

pub fn interpret_token(token: TokenId, profile: &ListenerProfile, tax: &Taxonomy) -> Heard {
    let understood = match profile.kind {
        ListenerKind::Full => true,
        ListenerKind::HypernymOnly => tax.is_hypernym(token),
        ListenerKind::LimitedVisual => !profile.is_blocked(token, tax),
    };
    if understood {
        Heard::Token(token)
    } else {
        Heard::Unk
    }
}

/// String form of [`interpret_token`]; out-of-vocabulary words are heard as
/// `[UNK]`.
pub fn interpret_word(word: &str, profile: &ListenerProfile, tax: &Taxonomy) -> Heard {
    tax.id(word)
        .map_or(Heard::Unk, |t| interpret_token(t, profile, tax))
}

/// Matches of `tokens` against an already-perceived scene.
pub(crate) fn ground_perceived(
    tokens: &[TokenId],
    perceived: &Scene,
    profile: &ListenerProfile,
    tax: &Taxonomy,
) -> GroundingScore {
    let mut score = 0;
    for &w in tokens {
        let Heard::Token(w) = interpret_token(w, profile, tax) else {
            continue;
        };
        for &o in perceived.objects() {
            score += u32::from(o == w) + u32::from(tax.parent(o) == w);
        }
    }
    GroundingScore(score)
}

pub fn ground(
    utt: &Utterance,
    scene: &Scene,
    profile: &ListenerProfile,
    tax: &Taxonomy,
) -> GroundingScore {
    ground_perceived(&utt.tokens, &perceive(scene, profile, tax), profile, tax)
}

/// Picks the better-grounded scene; `rng` is consulted only on a tie.
pub fn choose(
    utt: &Utterance,
    pair: &ScenePair,
    profile: &ListenerProfile,
    tax: &Taxonomy,
    rng: &mut SimRng,
) -> Choice {
    let s0 = ground(utt, &pair.scene_a, profile, tax);
    let s1 = ground(utt, &pair.scene_b, profile, tax);
    match s0.cmp(&s1) {
        std::cmp::Ordering::Greater => Choice {
            picked: 0,
            tie: false,
        },
        std::cmp::Ordering::Less => Choice {
            picked: 1,
            tie: false,
        },
        std::cmp::Ordering::Equal => Choice {
            picked: usize::from(rng.random_bool(0.5)),
            tie: true,
        },
    }
}

pub fn reward(choice: Choice, target: usize) -> i32 {
    if choice.picked == target {
        1
    } else {
        -1
    }
}
