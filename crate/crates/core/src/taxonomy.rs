//! Object inventory and the object → category ("hypernym") mapping.
//!
//! The inventory ships as `data/taxonomy.tsv` (one `object<TAB>hypernym` row
//! per object) and is compiled into the binary verbatim. Tokens are interned
//! as [`TokenId`]s: object tokens first, then category tokens, each block in
//! lexicographic order, so sorting ids sorts names within a block.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};

/// The shipped taxonomy file, byte for byte.
pub const DEFAULT_TAXONOMY_TSV: &str = include_str!("../data/taxonomy.tsv");

/// The category that limited-visual listeners cannot see by default.
pub const ANIMAL: &str = "animal";

/// Reserved token for words a listener cannot interpret.
pub const UNK: &str = "[UNK]";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TokenId(u16);

impl TokenId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Taxonomy {
    names: Vec<String>,
    ids: HashMap<String, TokenId>,
    /// Category of each token; categories map to themselves.
    parent: Vec<TokenId>,
    n_objects: usize,
}

/// Parses the compiled-in taxonomy.
pub fn load_taxonomy() -> Taxonomy {
    Taxonomy::from_tsv(DEFAULT_TAXONOMY_TSV).expect("compiled-in taxonomy is well formed")
}

fn valid_token(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(char::is_whitespace)
}

impl Default for Taxonomy {
    fn default() -> Self {
        load_taxonomy()
    }
}

impl Taxonomy {
    /// Parses `object<TAB>hypernym` rows. Blank lines are rejected like any
    /// other malformed row; rows are numbered from 1.
    pub fn from_tsv(text: &str) -> Result<Self> {
        let mut pairs: Vec<(String, String)> = Vec::new();
        let mut seen = BTreeSet::new();
        for (i, line) in text.lines().enumerate() {
            let row = i + 1;
            let err = |reason: String| Error::TaxonomyLoad { row, reason };
            let mut fields = line.split('\t');
            let (Some(object), Some(hypernym), None) =
                (fields.next(), fields.next(), fields.next())
            else {
                return Err(err(format!("expected `object<TAB>hypernym`, got {line:?}")));
            };
            if !valid_token(object) || !valid_token(hypernym) {
                return Err(err(format!(
                    "empty or whitespace-bearing token in {line:?}"
                )));
            }
            if object != object.to_lowercase() || hypernym != hypernym.to_lowercase() {
                return Err(err(format!("tokens must be lowercase: {line:?}")));
            }
            if !seen.insert(object.to_string()) {
                return Err(err(format!("duplicate object `{object}`")));
            }
            pairs.push((object.to_string(), hypernym.to_string()));
        }
        if pairs.is_empty() {
            return Err(Error::TaxonomyLoad {
                row: 0,
                reason: "no rows".into(),
            });
        }
        let hypernyms: BTreeSet<&str> = pairs.iter().map(|(_, h)| h.as_str()).collect();
        if let Some(row) = pairs
            .iter()
            .position(|(o, _)| hypernyms.contains(o.as_str()))
        {
            return Err(Error::TaxonomyLoad {
                row: row + 1,
                reason: format!("`{}` is used both as object and hypernym", pairs[row].0),
            });
        }

        let mut objects: Vec<&(String, String)> = pairs.iter().collect();
        objects.sort_by(|a, b| a.0.cmp(&b.0));
        let n_objects = objects.len();
        let mut names: Vec<String> = objects.iter().map(|(o, _)| o.clone()).collect();
        names.extend(hypernyms.iter().map(|h| h.to_string()));
        if names.len() > u16::MAX as usize {
            return Err(Error::TaxonomyLoad {
                row: 0,
                reason: "vocabulary too large".into(),
            });
        }
        let ids: HashMap<String, TokenId> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.clone(), TokenId(i as u16)))
            .collect();
        let mut parent: Vec<TokenId> = objects.iter().map(|(_, h)| ids[h.as_str()]).collect();
        parent.extend((n_objects..names.len()).map(|i| TokenId(i as u16)));
        Ok(Taxonomy {
            names,
            ids,
            parent,
            n_objects,
        })
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_tsv(&text)
    }

    /// Renders the taxonomy in file format, rows in lexicographic object order.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (o, h) in self.mapping() {
            out.push_str(o);
            out.push('\t');
            out.push_str(h);
            out.push('\n');
        }
        out
    }

    pub fn vocab_len(&self) -> usize {
        self.names.len()
    }

    pub fn object_count(&self) -> usize {
        self.n_objects
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.ids.get(token).copied()
    }

    pub fn try_id(&self, token: &str) -> Result<TokenId> {
        self.id(token)
            .ok_or_else(|| Error::UnknownToken(token.to_string()))
    }

    pub fn name(&self, id: TokenId) -> &str {
        &self.names[id.index()]
    }

    pub fn is_hypernym(&self, id: TokenId) -> bool {
        id.index() >= self.n_objects
    }

    /// The category of `id`; categories are their own category.
    pub fn parent(&self, id: TokenId) -> TokenId {
        self.parent[id.index()]
    }

    /// Object ids in lexicographic order.
    pub fn objects(&self) -> impl ExactSizeIterator<Item = TokenId> + '_ {
        (0..self.n_objects).map(|i| TokenId(i as u16))
    }

    /// Category ids in lexicographic order.
    pub fn hypernyms(&self) -> impl ExactSizeIterator<Item = TokenId> + '_ {
        (self.n_objects..self.names.len()).map(|i| TokenId(i as u16))
    }

    /// Every token, objects first.
    pub fn vocabulary(&self) -> impl ExactSizeIterator<Item = TokenId> + '_ {
        (0..self.names.len()).map(|i| TokenId(i as u16))
    }

    pub fn members(&self, category: TokenId) -> impl Iterator<Item = TokenId> + '_ {
        self.objects().filter(move |&o| self.parent(o) == category)
    }

    /// `(object, hypernym)` pairs, objects in lexicographic order.
    pub fn mapping(&self) -> impl Iterator<Item = (&str, &str)> + '_ {
        self.objects()
            .map(|o| (self.name(o), self.name(self.parent(o))))
    }

    /// Objects of `category`, lexicographic.
    pub fn inverse(&self, category: &str) -> Result<Vec<&str>> {
        let c = self.category_id(category)?;
        Ok(self.members(c).map(|o| self.name(o)).collect())
    }

    pub fn hypernym_of(&self, token: &str) -> Result<&str> {
        let id = self.try_id(token)?;
        Ok(self.name(self.parent(id)))
    }

    pub fn category_id(&self, category: &str) -> Result<TokenId> {
        match self.id(category) {
            Some(id) if self.is_hypernym(id) => Ok(id),
            _ => Err(Error::UnknownCategory(category.to_string())),
        }
    }

    /// True iff `token` is `category` itself or an object in it. Unknown
    /// tokens are simply not members.
    pub fn in_category(&self, token: &str, category: &str) -> Result<bool> {
        let c = self.category_id(category)?;
        Ok(self.id(token).is_some_and(|t| self.parent(t) == c))
    }
}

impl fmt::Display for TokenId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}
