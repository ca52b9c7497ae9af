//! Symbolic scenes, scene pairs, and split datasets.
//!
//! A scene is a set of 1..=9 inventory objects. A pair is a target scene and
//! a distractor obtained by mutating it; pairs whose object sets differ by at
//! most four objects are Hard, the rest Easy. The distractor always drops at
//! least one target object, so every target has something unique to say.

use std::collections::{BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::{index, SliceRandom};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, SimRng};
use crate::taxonomy::{Taxonomy, TokenId};

/// Upper bound on objects per scene.
pub const MAX_OBJECTS: usize = 9;

/// Largest symmetric difference that still counts as Hard.
pub const HARD_MAX_DIFFERENCE: usize = 4;

pub const DATASET_FORMAT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Scene {
    pub id: u64,
    objects: Vec<TokenId>,
}

impl Scene {
    /// Builds a scene from object ids. Duplicates collapse; the result must
    /// hold between 1 and 9 objects, none of them category tokens.
    pub fn new(
        id: u64,
        objects: impl IntoIterator<Item = TokenId>,
        tax: &Taxonomy,
    ) -> Result<Self> {
        let set: BTreeSet<TokenId> = objects.into_iter().collect();
        if set.is_empty() || set.len() > MAX_OBJECTS {
            return Err(Error::config(format!(
                "scene must hold 1..={MAX_OBJECTS} objects, got {}",
                set.len()
            )));
        }
        if let Some(&h) = set.iter().find(|&&t| tax.is_hypernym(t)) {
            return Err(Error::UnknownToken(format!(
                "{} is a category, not an object",
                tax.name(h)
            )));
        }
        Ok(Scene {
            id,
            objects: set.into_iter().collect(),
        })
    }

    pub fn from_names<S: AsRef<str>>(id: u64, names: &[S], tax: &Taxonomy) -> Result<Self> {
        let ids = names
            .iter()
            .map(|n| tax.try_id(n.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        Scene::new(id, ids, tax)
    }

    /// Scene view without the size lower bound; used for what a listener
    /// actually perceives.
    pub(crate) fn perceived(id: u64, objects: Vec<TokenId>) -> Self {
        Scene { id, objects }
    }

    /// Sorted, duplicate-free object ids.
    pub fn objects(&self) -> &[TokenId] {
        &self.objects
    }

    pub fn contains(&self, token: TokenId) -> bool {
        self.objects.binary_search(&token).is_ok()
    }

    pub fn len(&self) -> usize {
        self.objects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    pub fn names<'t>(&self, tax: &'t Taxonomy) -> Vec<&'t str> {
        self.objects.iter().map(|&o| tax.name(o)).collect()
    }
}

/// `|A △ B|` over object sets.
pub fn symmetric_difference(a: &Scene, b: &Scene) -> usize {
    let shared = a.objects.iter().filter(|o| b.contains(**o)).count();
    a.len() + b.len() - 2 * shared
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Difficulty {
    Hard,
    Easy,
}

impl Difficulty {
    pub fn from_difference(d: usize) -> Result<Self> {
        match d {
            0 => Err(Error::InvalidPair("scenes are identical".into())),
            d if d <= HARD_MAX_DIFFERENCE => Ok(Difficulty::Hard),
            _ => Ok(Difficulty::Easy),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScenePair {
    pub id: u64,
    pub scene_a: Scene,
    pub scene_b: Scene,
    /// 0 → `scene_a` is the target, 1 → `scene_b`.
    pub target: usize,
    pub difficulty: Difficulty,
}

impl ScenePair {
    /// Builds a pair and classifies it.
    pub fn new(id: u64, scene_a: Scene, scene_b: Scene, target: usize) -> Result<Self> {
        if target > 1 {
            return Err(Error::InvalidPair(format!(
                "target index {target} not in {{0,1}}"
            )));
        }
        let difficulty = Difficulty::from_difference(symmetric_difference(&scene_a, &scene_b))?;
        Ok(ScenePair {
            id,
            scene_a,
            scene_b,
            target,
            difficulty,
        })
    }

    pub fn scene(&self, index: usize) -> &Scene {
        if index == 0 {
            &self.scene_a
        } else {
            &self.scene_b
        }
    }

    pub fn target_scene(&self) -> &Scene {
        self.scene(self.target)
    }

    pub fn distractor_scene(&self) -> &Scene {
        self.scene(1 - self.target)
    }

    pub fn distractor(&self) -> usize {
        1 - self.target
    }

    pub fn difference(&self) -> usize {
        symmetric_difference(&self.scene_a, &self.scene_b)
    }
}

/// Recomputes the difficulty from the object sets, ignoring the stored field.
pub fn classify_difficulty(pair: &ScenePair) -> Result<Difficulty> {
    Difficulty::from_difference(pair.difference())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationConfig {
    pub size_min: usize,
    pub size_max: usize,
}

impl Default for GenerationConfig {
    fn default() -> Self {
        GenerationConfig {
            size_min: 6,
            size_max: 7,
        }
    }
}

impl GenerationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.size_min < 1 || self.size_min > self.size_max {
            return Err(Error::config(format!(
                "scene size bounds must satisfy 1 <= min <= max, got {}..={}",
                self.size_min, self.size_max
            )));
        }
        if self.size_max > MAX_OBJECTS {
            return Err(Error::config(format!(
                "scene size max {} exceeds {MAX_OBJECTS}",
                self.size_max
            )));
        }
        Ok(())
    }

    /// Every target size in the band admits a distractor of this difficulty.
    pub fn validate_for(&self, difficulty: Difficulty) -> Result<()> {
        self.validate()?;
        if difficulty == Difficulty::Easy && self.size_min + self.size_max <= HARD_MAX_DIFFERENCE {
            return Err(Error::config(format!(
                "Easy pairs need a difference of at least {}, unreachable with scene sizes {}..={}",
                HARD_MAX_DIFFERENCE + 1,
                self.size_min,
                self.size_max
            )));
        }
        Ok(())
    }
}

pub fn generate_scene(
    rng: &mut SimRng,
    id: u64,
    size_min: usize,
    size_max: usize,
    tax: &Taxonomy,
) -> Result<Scene> {
    GenerationConfig { size_min, size_max }.validate()?;
    let n = rng.random_range(size_min..=size_max);
    let picked = index::sample(rng, tax.object_count(), n);
    let objects: Vec<TokenId> = tax.objects().collect();
    Scene::new(id, picked.iter().map(|i| objects[i]), tax)
}

/// Feasible `(removed, added)` counts for a distractor of a target with
/// `target_len` objects.
fn mutation_plans(
    target_len: usize,
    difficulty: Difficulty,
    config: &GenerationConfig,
    free_objects: usize,
) -> Vec<(usize, usize)> {
    let mut plans = Vec::new();
    for removed in 1..=target_len {
        for added in 0..=free_objects.min(MAX_OBJECTS) {
            let size = target_len - removed + added;
            if size < config.size_min || size > config.size_max {
                continue;
            }
            let d = removed + added;
            let ok = match difficulty {
                Difficulty::Hard => d <= HARD_MAX_DIFFERENCE,
                Difficulty::Easy => d > HARD_MAX_DIFFERENCE,
            };
            if ok {
                plans.push((removed, added));
            }
        }
    }
    plans
}

/// Generates a target scene and a mutated distractor of the requested
/// difficulty. The difference size is drawn uniformly over what is reachable
/// while keeping the distractor inside the size band; for a given size the
/// mutation prefers swaps (equal removals and additions).
pub fn generate_pair(
    rng: &mut SimRng,
    id: u64,
    difficulty: Difficulty,
    config: &GenerationConfig,
    tax: &Taxonomy,
) -> Result<ScenePair> {
    config.validate_for(difficulty)?;
    let target = generate_scene(rng, 2 * id, config.size_min, config.size_max, tax)?;
    let free = tax.object_count() - target.len();
    let plans = mutation_plans(target.len(), difficulty, config, free);
    let diffs: BTreeSet<usize> = plans.iter().map(|(r, a)| r + a).collect();
    let diffs: Vec<usize> = diffs.into_iter().collect();
    let Some(&d) = diffs.get(rng.random_range(0..diffs.len().max(1))) else {
        return Err(Error::config(format!(
            "no {difficulty:?} distractor reachable from a {}-object scene",
            target.len()
        )));
    };
    let best_balance = plans
        .iter()
        .filter(|(r, a)| r + a == d)
        .map(|(r, a)| r.abs_diff(*a))
        .min()
        .expect("d came from plans");
    let balanced: Vec<(usize, usize)> = plans
        .into_iter()
        .filter(|(r, a)| r + a == d && r.abs_diff(*a) == best_balance)
        .collect();
    let (removed, added) = balanced[rng.random_range(0..balanced.len())];

    let mut kept = target.objects().to_vec();
    kept.shuffle(rng);
    kept.truncate(target.len() - removed);
    let outside: Vec<TokenId> = tax.objects().filter(|o| !target.contains(*o)).collect();
    kept.extend(
        index::sample(rng, outside.len(), added)
            .iter()
            .map(|i| outside[i]),
    );
    let distractor = Scene::new(2 * id + 1, kept, tax)?;

    // Scene ids are positional: scene_a gets 2*id, scene_b 2*id+1.
    let target_index = usize::from(rng.random_bool(0.5));
    let (mut a, mut b) = (target, distractor);
    if target_index == 1 {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut a.id, &mut b.id);
    }
    let pair = ScenePair::new(id, a, b, target_index)?;
    debug_assert_eq!(pair.difficulty, difficulty);
    Ok(pair)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n_pairs: usize,
    pub hard_fraction: f64,
    pub generation: GenerationConfig,
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_pairs < 10 {
            return Err(Error::config(format!(
                "a dataset needs at least 10 pairs, got {}",
                self.n_pairs
            )));
        }
        if !(0.0..=1.0).contains(&self.hard_fraction) {
            return Err(Error::config(format!(
                "hard_fraction must lie in [0,1], got {}",
                self.hard_fraction
            )));
        }
        let n_hard = self.hard_count();
        if n_hard > 0 {
            self.generation.validate_for(Difficulty::Hard)?;
        }
        if n_hard < self.n_pairs {
            self.generation.validate_for(Difficulty::Easy)?;
        }
        Ok(())
    }

    pub fn hard_count(&self) -> usize {
        ((self.n_pairs as f64) * self.hard_fraction).round() as usize
    }

    /// `(train, val, test)` sizes: 8:1:1 with remainders going to train.
    pub fn split_sizes(&self) -> (usize, usize, usize) {
        let tenth = self.n_pairs / 10;
        (self.n_pairs - 2 * tenth, tenth, tenth)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Val,
    Test,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    pub seed: u64,
    pub config: DatasetConfig,
    pub train: Vec<ScenePair>,
    pub val: Vec<ScenePair>,
    pub test: Vec<ScenePair>,
}

impl Dataset {
    pub fn split(&self, split: Split) -> &[ScenePair] {
        match split {
            Split::Train => &self.train,
            Split::Val => &self.val,
            Split::Test => &self.test,
        }
    }

    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Split, &ScenePair)> {
        self.train
            .iter()
            .map(|p| (Split::Train, p))
            .chain(self.val.iter().map(|p| (Split::Val, p)))
            .chain(self.test.iter().map(|p| (Split::Test, p)))
    }
}

fn content_key(pair: &ScenePair) -> (Vec<TokenId>, Vec<TokenId>, usize) {
    (
        pair.scene_a.objects().to_vec(),
        pair.scene_b.objects().to_vec(),
        pair.target,
    )
}

/// Generates `n_pairs` distinct pairs with the requested Hard share and
/// splits them 8:1:1.
pub fn assemble_dataset(seed: u64, config: DatasetConfig, tax: &Taxonomy) -> Result<Dataset> {
    config.validate()?;
    let mut rng = rng::derived(seed, rng::stream::DATASET, 0);
    let n_hard = config.hard_count();
    let mut plan: Vec<Difficulty> = std::iter::repeat_n(Difficulty::Hard, n_hard)
        .chain(std::iter::repeat_n(
            Difficulty::Easy,
            config.n_pairs - n_hard,
        ))
        .collect();
    plan.shuffle(&mut rng);

    let mut seen = HashSet::new();
    let mut pairs = Vec::with_capacity(config.n_pairs);
    for difficulty in plan {
        let id = pairs.len() as u64;
        let mut attempts = 0;
        let pair = loop {
            let pair = generate_pair(&mut rng, id, difficulty, &config.generation, tax)?;
            if seen.insert(content_key(&pair)) {
                break pair;
            }
            attempts += 1;
            if attempts > 1000 {
                return Err(Error::config(
                    "scene space too small to draw distinct pairs".to_string(),
                ));
            }
        };
        pairs.push(pair);
    }

    let (n_train, n_val, _) = config.split_sizes();
    let test = pairs.split_off(n_train + n_val);
    let val = pairs.split_off(n_train);
    Ok(Dataset {
        seed,
        config,
        train: pairs,
        val,
        test,
    })
}

#[derive(Serialize, Deserialize)]
struct Header {
    format_version: u32,
    seed: u64,
    config: DatasetConfig,
}

#[derive(Serialize, Deserialize)]
struct PairRecord {
    id: u64,
    scene_a: Vec<String>,
    scene_b: Vec<String>,
    target: usize,
    difficulty: Difficulty,
    split: Split,
}

/// Writes the dataset as JSON lines: a header line, then one pair per line
/// in train, val, test order.
pub fn write_dataset(ds: &Dataset, tax: &Taxonomy, out: &mut impl Write) -> std::io::Result<()> {
    let header = Header {
        format_version: DATASET_FORMAT_VERSION,
        seed: ds.seed,
        config: ds.config,
    };
    serde_json::to_writer(&mut *out, &header)?;
    out.write_all(b"\n")?;
    for (split, pair) in ds.iter() {
        let record = PairRecord {
            id: pair.id,
            scene_a: pair
                .scene_a
                .names(tax)
                .into_iter()
                .map(String::from)
                .collect(),
            scene_b: pair
                .scene_b
                .names(tax)
                .into_iter()
                .map(String::from)
                .collect(),
            target: pair.target,
            difficulty: pair.difficulty,
            split,
        };
        serde_json::to_writer(&mut *out, &record)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn save_dataset(ds: &Dataset, path: impl AsRef<Path>, tax: &Taxonomy) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    write_dataset(ds, tax, &mut out).map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn read_dataset(reader: impl BufRead, path: &Path, tax: &Taxonomy) -> Result<Dataset> {
    let parse_err = |line: usize, reason: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut lines = reader.lines().enumerate();
    let header: Header = match lines.next() {
        None => return Err(parse_err(1, "empty file".into())),
        Some((_, line)) => {
            let line = line.map_err(|e| Error::io(path, e))?;
            serde_json::from_str(&line).map_err(|e| parse_err(1, format!("bad header: {e}")))?
        }
    };
    if header.format_version != DATASET_FORMAT_VERSION {
        return Err(parse_err(
            1,
            format!("unsupported format_version {}", header.format_version),
        ));
    }
    header
        .config
        .validate()
        .map_err(|e| parse_err(1, e.to_string()))?;

    let mut ds = Dataset {
        seed: header.seed,
        config: header.config,
        train: Vec::new(),
        val: Vec::new(),
        test: Vec::new(),
    };
    let mut last_line = 1;
    for (i, line) in lines {
        let lineno = i + 1;
        last_line = lineno;
        let line = line.map_err(|e| Error::io(path, e))?;
        let rec: PairRecord =
            serde_json::from_str(&line).map_err(|e| parse_err(lineno, e.to_string()))?;
        let a = Scene::from_names(2 * rec.id, &rec.scene_a, tax)
            .map_err(|e| parse_err(lineno, format!("scene_a: {e}")))?;
        let b = Scene::from_names(2 * rec.id + 1, &rec.scene_b, tax)
            .map_err(|e| parse_err(lineno, format!("scene_b: {e}")))?;
        let pair = ScenePair::new(rec.id, a, b, rec.target)
            .map_err(|e| parse_err(lineno, e.to_string()))?;
        if pair.difficulty != rec.difficulty {
            return Err(parse_err(
                lineno,
                format!(
                    "difficulty {:?} disagrees with object difference {}",
                    rec.difficulty,
                    pair.difference()
                ),
            ));
        }
        match rec.split {
            Split::Train => ds.train.push(pair),
            Split::Val => ds.val.push(pair),
            Split::Test => ds.test.push(pair),
        }
    }
    if ds.len() != ds.config.n_pairs {
        return Err(parse_err(
            last_line + 1,
            format!(
                "expected {} pairs, found {} (truncated file?)",
                ds.config.n_pairs,
                ds.len()
            ),
        ));
    }
    let mut ids = HashSet::new();
    if let Some(dup) = ds.iter().find(|(_, p)| !ids.insert(p.id)) {
        return Err(parse_err(
            last_line,
            format!("pair id {} appears twice", dup.1.id),
        ));
    }
    Ok(ds)
}

pub fn load_dataset(path: impl AsRef<Path>, tax: &Taxonomy) -> Result<Dataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(BufReader::new(file), path, tax)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::taxonomy::load_taxonomy;

    fn scene(names: &[&str], tax: &Taxonomy) -> Scene {
        Scene::from_names(0, names, tax).unwrap()
    }

    #[test]
    fn scene_size_and_determinism() {
        let tax = load_taxonomy();
        let s = generate_scene(&mut rng::seeded(7), 0, 6, 7, &tax).unwrap();
        assert!((6..=7).contains(&s.len()));
        let again = generate_scene(&mut rng::seeded(7), 0, 6, 7, &tax).unwrap();
        assert_eq!(s, again);
        for seed in 0..20 {
            let one = generate_scene(&mut rng::seeded(seed), 0, 1, 1, &tax).unwrap();
            assert_eq!(one.len(), 1);
        }
    }

    #[test]
    fn scene_bounds_are_config_errors() {
        let tax = load_taxonomy();
        assert!(generate_scene(&mut rng::seeded(1), 0, 6, 10, &tax)
            .unwrap_err()
            .is_config());
        assert!(generate_scene(&mut rng::seeded(1), 0, 0, 3, &tax).is_err());
        assert!(generate_scene(&mut rng::seeded(1), 0, 5, 3, &tax).is_err());
    }

    #[test]
    fn classification_thresholds() {
        let tax = load_taxonomy();
        let a = scene(&["pizza", "owl", "tree"], &tax);
        let b = scene(&["owl", "tree"], &tax);
        let pair = ScenePair::new(0, a, b, 0).unwrap();
        assert_eq!(pair.difference(), 1);
        assert_eq!(classify_difficulty(&pair).unwrap(), Difficulty::Hard);

        let base = scene(&["pie", "sun", "owl", "kite", "tent"], &tax);
        let four = scene(&["pie", "cat", "dog", "kite", "tent"], &tax);
        assert_eq!(symmetric_difference(&base, &four), 4);
        assert_eq!(Difficulty::from_difference(4).unwrap(), Difficulty::Hard);
        let five = scene(&["pie", "cat", "dog", "kite", "tent", "bench"], &tax);
        assert_eq!(symmetric_difference(&base, &five), 5);
        assert_eq!(Difficulty::from_difference(5).unwrap(), Difficulty::Easy);

        let same = ScenePair::new(0, base.clone(), base, 0);
        assert!(matches!(same, Err(Error::InvalidPair(_))));
    }

    #[test]
    fn generated_pairs_respect_their_difficulty() {
        let tax = load_taxonomy();
        let cfg = GenerationConfig::default();
        let mut rng = rng::seeded(3);
        for id in 0..500 {
            let hard = generate_pair(&mut rng, id, Difficulty::Hard, &cfg, &tax).unwrap();
            assert!((1..=4).contains(&hard.difference()));
            let easy = generate_pair(&mut rng, id, Difficulty::Easy, &cfg, &tax).unwrap();
            assert!(easy.difference() >= 5);
            for p in [&hard, &easy] {
                assert_eq!(classify_difficulty(p).unwrap(), p.difficulty);
                assert!((6..=7).contains(&p.scene_a.len()));
                assert!((6..=7).contains(&p.scene_b.len()));
                let unique = p
                    .target_scene()
                    .objects()
                    .iter()
                    .filter(|o| !p.distractor_scene().contains(**o))
                    .count();
                assert!(unique >= 1);
            }
        }
    }

    #[test]
    fn unreachable_easy_is_a_config_error() {
        let tax = load_taxonomy();
        let cfg = GenerationConfig {
            size_min: 1,
            size_max: 2,
        };
        let err = generate_pair(&mut rng::seeded(0), 0, Difficulty::Easy, &cfg, &tax).unwrap_err();
        assert!(err.is_config());
        // Single-object scenes still admit Hard pairs.
        let cfg = GenerationConfig {
            size_min: 1,
            size_max: 1,
        };
        let p = generate_pair(&mut rng::seeded(0), 0, Difficulty::Hard, &cfg, &tax).unwrap();
        assert_eq!(p.difference(), 2);
    }

    #[test]
    fn target_index_is_balanced() {
        let tax = load_taxonomy();
        let cfg = GenerationConfig::default();
        let mut rng = rng::seeded(11);
        let n = 2000;
        let zeros = (0..n)
            .filter(|&i| {
                generate_pair(&mut rng, i, Difficulty::Hard, &cfg, &tax)
                    .unwrap()
                    .target
                    == 0
            })
            .count();
        let frac = zeros as f64 / n as f64;
        assert!((0.45..=0.55).contains(&frac), "{frac}");
    }

    #[test]
    fn dataset_split_and_mix() {
        let tax = load_taxonomy();
        let cfg = DatasetConfig {
            n_pairs: 1000,
            hard_fraction: 0.58,
            generation: GenerationConfig::default(),
        };
        let ds = assemble_dataset(1, cfg, &tax).unwrap();
        assert_eq!(
            (ds.train.len(), ds.val.len(), ds.test.len()),
            (800, 100, 100)
        );
        let hard = ds
            .iter()
            .filter(|(_, p)| p.difficulty == Difficulty::Hard)
            .count();
        assert!(hard.abs_diff(580) <= 1);
        let ids: HashSet<u64> = ds.iter().map(|(_, p)| p.id).collect();
        assert_eq!(ids.len(), 1000);
        assert_eq!(assemble_dataset(1, cfg, &tax).unwrap(), ds);

        let all_hard = DatasetConfig {
            hard_fraction: 1.0,
            n_pairs: 50,
            ..cfg
        };
        let ds = assemble_dataset(2, all_hard, &tax).unwrap();
        assert!(ds
            .iter()
            .all(|(_, p)| classify_difficulty(p).unwrap() == Difficulty::Hard));
        assert_eq!(
            DatasetConfig { n_pairs: 13, ..cfg }.split_sizes(),
            (11, 1, 1)
        );
    }

    #[test]
    fn too_few_pairs_is_rejected() {
        let tax = load_taxonomy();
        let cfg = DatasetConfig {
            n_pairs: 9,
            hard_fraction: 0.5,
            generation: GenerationConfig::default(),
        };
        assert!(assemble_dataset(0, cfg, &tax).unwrap_err().is_config());
    }

    #[test]
    fn jsonl_round_trip_and_truncation() {
        let tax = load_taxonomy();
        let cfg = DatasetConfig {
            n_pairs: 40,
            hard_fraction: 0.58,
            generation: GenerationConfig::default(),
        };
        let ds = assemble_dataset(5, cfg, &tax).unwrap();
        let mut buf = Vec::new();
        write_dataset(&ds, &tax, &mut buf).unwrap();
        let back = read_dataset(&buf[..], Path::new("mem"), &tax).unwrap();
        assert_eq!(back, ds);

        let text = String::from_utf8(buf).unwrap();
        let cut = &text[..text.len() - 25];
        let err = read_dataset(cut.as_bytes(), Path::new("mem"), &tax).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 41, .. }), "{err}");

        let drop_last: String = text.lines().take(40).map(|l| format!("{l}\n")).collect();
        let err = read_dataset(drop_last.as_bytes(), Path::new("mem"), &tax).unwrap_err();
        assert!(matches!(err, Error::Parse { .. }), "{err}");

        let bad = text.replacen("\"hard\"", "\"easy\"", 1);
        if bad != text {
            assert!(read_dataset(bad.as_bytes(), Path::new("mem"), &tax).is_err());
        }
    }
}
