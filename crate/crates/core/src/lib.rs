//! Referential-game simulator built on a rational speaker/listener chain.
//!
//! A literal speaker proposes single-word or templated utterances for a
//! target scene, a rational speaker re-ranks them by simulating a listener,
//! and a pragmatic speaker adds a small learned per-token weight layer that
//! adapts the choice to listeners who only understand category words or who
//! cannot see some categories of objects.
//!
//! Module map:
//!
//! - [`taxonomy`]: the fixed 70-object inventory and its 8 category words.
//! - [`scenes`]: symbolic scenes, hard/easy scene pairs and split datasets.
//! - [`speaker`]: the literal speaker (candidate generation).
//! - [`listener`]: perception, token interpretation, grounding and choice.
//! - [`pragmatic`]: rational selection, the disparity policy and its
//!   policy-gradient training loop.
//! - [`harness`]: experiment orchestration, reports and export.

pub mod error;
pub mod harness;
pub mod listener;
pub mod pragmatic;
pub mod rng;
pub mod scenes;
pub mod speaker;
pub mod taxonomy;

pub use error::{Error, Result};
pub use listener::{Choice, GroundingScore, ListenerKind, ListenerProfile};
pub use pragmatic::{DisparityPolicy, ScoredCandidate, SelectMode, SimPick, SimulationResult};
pub use scenes::{Dataset, Difficulty, GenerationConfig, Scene, ScenePair};
pub use speaker::{CandidateSet, Mode, Utterance};
pub use taxonomy::{load_taxonomy, Taxonomy, TokenId};
