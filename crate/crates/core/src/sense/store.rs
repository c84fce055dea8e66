use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pos {
    Noun,
    Verb,
    Other,
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "noun" | "n" | "NOUN" => Ok(Pos::Noun),
            "verb" | "v" | "VERB" => Ok(Pos::Verb),
            "other" | "adj" | "adv" | "a" | "r" | "ADJ" | "ADV" => Ok(Pos::Other),
            _ => Err(format!("unknown part of speech {s:?}")),
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Other => "other",
        })
    }
}

/// Edge types of the sense graph. `RootSense` links a query word to one of
/// its synsets and never appears in a snapshot file.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    RootSense,
    Hypernym,
    Hyponym,
    Holonym,
    Meronym,
    Antonym,
}

impl Relation {
    pub const SEMANTIC: [Relation; 5] = [
        Relation::Hypernym,
        Relation::Hyponym,
        Relation::Holonym,
        Relation::Meronym,
        Relation::Antonym,
    ];

    pub fn inverse(self) -> Relation {
        match self {
            Relation::RootSense => Relation::RootSense,
            Relation::Hypernym => Relation::Hyponym,
            Relation::Hyponym => Relation::Hypernym,
            Relation::Holonym => Relation::Meronym,
            Relation::Meronym => Relation::Holonym,
            Relation::Antonym => Relation::Antonym,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Relation::RootSense => "root_sense",
            Relation::Hypernym => "hypernym",
            Relation::Hyponym => "hyponym",
            Relation::Holonym => "holonym",
            Relation::Meronym => "meronym",
            Relation::Antonym => "antonym",
        }
    }

    pub(crate) fn slot(self) -> Option<usize> {
        match self {
            Relation::RootSense => None,
            Relation::Hypernym => Some(0),
            Relation::Hyponym => Some(1),
            Relation::Holonym => Some(2),
            Relation::Meronym => Some(3),
            Relation::Antonym => Some(4),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "root_sense" => Ok(Relation::RootSense),
            "hypernym" => Ok(Relation::Hypernym),
            "hyponym" => Ok(Relation::Hyponym),
            "holonym" => Ok(Relation::Holonym),
            "meronym" => Ok(Relation::Meronym),
            "antonym" => Ok(Relation::Antonym),
            _ => Err(format!("unknown relation {s:?}")),
        }
    }
}

pub fn parse_relations(list: &str) -> std::result::Result<BTreeSet<Relation>, String> {
    let mut out = BTreeSet::new();
    for part in list.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let r: Relation = part.parse()?;
        if r == Relation::RootSense {
            return Err("root_sense is implicit and cannot be selected".into());
        }
        out.insert(r);
    }
    if out.is_empty() {
        return Err("at least one relation type is required".into());
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeKind {
    Root,
    Synset,
}

/// A node as seen by callers: a query root or a snapshot synset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SenseNode {
    /// Snapshot id for synsets, the query lemma for roots.
    pub id: String,
    pub kind: NodeKind,
    pub lemma: Option<String>,
    pub pos: Pos,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SenseEdge {
    pub from: String,
    pub to: String,
    pub relation: Relation,
}

#[derive(Debug, Clone)]
struct Synset {
    id: String,
    pos: Pos,
    // (lang, lemma) in file order
    lemmas: Vec<(String, String)>,
}

/// Immutable synset graph loaded from a snapshot.
///
/// Every stored edge `a -r-> b` implies `b -inverse(r)-> a`; both directions
/// are kept in the adjacency lists and counted in the per-node relation
/// degrees, so counts do not depend on which direction a snapshot happened
/// to record.
#[derive(Debug, Clone, Default)]
pub struct SenseGraphStore {
    version: Option<String>,
    synsets: Vec<Synset>,
    by_id: HashMap<String, usize>,
    out: Vec<Vec<(usize, Relation)>>,
    degree: Vec<[usize; 5]>,
    lemma_index: HashMap<(String, Pos), HashMap<String, Vec<usize>>>,
    edge_count: usize,
}

#[derive(Debug, Default)]
pub struct SenseGraphBuilder {
    version: Option<String>,
    synsets: Vec<Synset>,
    by_id: HashMap<String, usize>,
    edges: BTreeSet<(usize, usize, Relation)>,
}

impl SenseGraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn version(&mut self, version: impl Into<String>) -> &mut Self {
        self.version = Some(version.into());
        self
    }

    /// Adds a synset, or more lemmas to an existing one. A synset appearing
    /// once per language is the usual shape of a multilingual snapshot.
    pub fn synset<S: AsRef<str>>(&mut self, id: &str, pos: Pos, lang: &str, lemmas: &[S]) -> Result<&mut Self> {
        let idx = match self.by_id.get(id) {
            Some(&i) => {
                if self.synsets[i].pos != pos {
                    return Err(Error::Invariant(format!(
                        "synset {id} declared as both {} and {pos}",
                        self.synsets[i].pos
                    )));
                }
                i
            }
            None => {
                self.synsets.push(Synset {
                    id: id.to_string(),
                    pos,
                    lemmas: Vec::new(),
                });
                self.by_id.insert(id.to_string(), self.synsets.len() - 1);
                self.synsets.len() - 1
            }
        };
        for l in lemmas {
            let entry = (lang.to_string(), normalize_lemma(l.as_ref()));
            if !entry.1.is_empty() && !self.synsets[idx].lemmas.contains(&entry) {
                self.synsets[idx].lemmas.push(entry);
            }
        }
        Ok(self)
    }

    pub fn edge(&mut self, from: &str, to: &str, relation: Relation) -> Result<&mut Self> {
        if relation == Relation::RootSense {
            return Err(Error::Invariant("root_sense edges are implicit".into()));
        }
        let a = *self
            .by_id
            .get(from)
            .ok_or_else(|| Error::Invariant(format!("edge from unknown synset {from}")))?;
        let b = *self
            .by_id
            .get(to)
            .ok_or_else(|| Error::Invariant(format!("edge to unknown synset {to}")))?;
        if a == b {
            return Err(Error::Invariant(format!("self loop on {from}")));
        }
        self.edges.insert((a, b, relation));
        self.edges.insert((b, a, relation.inverse()));
        Ok(self)
    }

    pub fn build(self) -> SenseGraphStore {
        let n = self.synsets.len();
        let mut out = vec![Vec::new(); n];
        let mut degree = vec![[0usize; 5]; n];
        for &(a, b, r) in &self.edges {
            out[a].push((b, r));
            if let Some(slot) = r.slot() {
                degree[a][slot] += 1;
            }
        }
        let mut lemma_index: HashMap<(String, Pos), HashMap<String, Vec<usize>>> = HashMap::new();
        for (i, s) in self.synsets.iter().enumerate() {
            for (lang, lemma) in &s.lemmas {
                let ids = lemma_index
                    .entry((lang.clone(), s.pos))
                    .or_default()
                    .entry(lemma.clone())
                    .or_default();
                if !ids.contains(&i) {
                    ids.push(i);
                }
            }
        }
        SenseGraphStore {
            version: self.version,
            synsets: self.synsets,
            by_id: self.by_id,
            out,
            degree,
            lemma_index,
            edge_count: self.edges.len() / 2,
        }
    }
}

fn normalize_lemma(lemma: &str) -> String {
    lemma.trim().to_lowercase().replace(' ', "_")
}

impl SenseGraphStore {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    /// Parses the snapshot text format: `V`, `N` and `E` lines separated by
    /// tabs. Edges may refer to synsets declared later in the file.
    pub fn parse(text: &str) -> Result<Self> {
        let mut builder = SenseGraphBuilder::new();
        let mut edges = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim_end_matches('\r');
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split('\t').collect();
            let bad = |message: String| Error::Parse { line: line_no, message };
            match fields.as_slice() {
                ["V", version] => {
                    builder.version(*version);
                }
                ["N", id, pos, lang, lemmas] => {
                    let pos: Pos = pos.parse().map_err(bad)?;
                    let lemmas: Vec<&str> = lemmas.split('|').collect();
                    builder.synset(id, pos, lang, &lemmas).map_err(|e| bad(e.to_string()))?;
                }
                ["E", from, to, relation] => {
                    let relation: Relation = relation.parse().map_err(bad)?;
                    edges.push((line_no, *from, *to, relation));
                }
                _ => return Err(bad(format!("unrecognized line {line:?}"))),
            }
        }
        for (line, from, to, relation) in edges {
            builder.edge(from, to, relation).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
        }
        Ok(builder.build())
    }

    pub fn version(&self) -> Option<&str> {
        self.version.as_deref()
    }

    pub fn synset_count(&self) -> usize {
        self.synsets.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, id: &str) -> bool {
        self.by_id.contains_key(id)
    }

    /// Synset ids for a lemma. Only nouns and verbs are ever looked up.
    pub fn senses_of(&self, lemma: &str, lang: &str, pos: Pos) -> Vec<&str> {
        self.sense_indices(lemma, lang, pos)
            .iter()
            .map(|&i| self.synsets[i].id.as_str())
            .collect()
    }

    pub(crate) fn sense_indices(&self, lemma: &str, lang: &str, pos: Pos) -> &[usize] {
        if pos == Pos::Other {
            return &[];
        }
        self.lemma_index
            .get(&(lang.to_string(), pos))
            .and_then(|m| m.get(&normalize_lemma(lemma)))
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Number of `relation` edges leaving the synset, the `n_r` of the
    /// edge weighting. `None` for unknown ids.
    pub fn relation_count(&self, id: &str, relation: Relation) -> Option<usize> {
        let &i = self.by_id.get(id)?;
        Some(self.degree_of(i, relation))
    }

    pub(crate) fn degree_of(&self, node: usize, relation: Relation) -> usize {
        relation.slot().map_or(0, |s| self.degree[node][s])
    }

    pub(crate) fn outgoing(&self, node: usize) -> &[(usize, Relation)] {
        &self.out[node]
    }

    pub(crate) fn index_of(&self, id: &str) -> Option<usize> {
        self.by_id.get(id).copied()
    }

    pub(crate) fn id_of(&self, node: usize) -> &str {
        &self.synsets[node].id
    }

    pub(crate) fn node(&self, node: usize, lang: &str) -> SenseNode {
        let s = &self.synsets[node];
        let lemma = s
            .lemmas
            .iter()
            .find(|(l, _)| l == lang)
            .or(s.lemmas.first())
            .map(|(_, lemma)| lemma.clone());
        SenseNode {
            id: s.id.clone(),
            kind: NodeKind::Synset,
            lemma,
            pos: s.pos,
        }
    }

    /// All stored edges in both directions.
    pub fn edges(&self) -> impl Iterator<Item = SenseEdge> + '_ {
        self.out.iter().enumerate().flat_map(move |(a, list)| {
            list.iter().map(move |&(b, relation)| SenseEdge {
                from: self.synsets[a].id.clone(),
                to: self.synsets[b].id.clone(),
                relation,
            })
        })
    }
}
