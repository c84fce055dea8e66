//! Helpers shared by the integration tests: synthetic datasets and an
//! independent brute-force model of the sense-path search.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::path::{Path, PathBuf};

use bivert::corpus::{write_dataset, EmbeddingTable, SentencePairRecord, TokenizedSentence};
use bivert::sense::{Pos, Relation, SearchConfig};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const DIM: usize = 16;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// A fixed pseudo-random unit-free vector per word, so equal words embed
/// equally in every sentence.
pub fn word_vector(word: &str) -> Vec<f64> {
    let seed = word.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    });
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..DIM).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

pub fn record(id: &str, system: &str, src: &[&str], back: &[&str], human: Option<f64>) -> SentencePairRecord {
    let emb = |words: &[&str]| EmbeddingTable::new(words.iter().map(|w| word_vector(w)).collect()).unwrap();
    SentencePairRecord::new(
        id,
        system,
        TokenizedSentence::from_surfaces("eng", src).unwrap(),
        TokenizedSentence::from_surfaces("eng", back).unwrap(),
        emb(src),
        emb(back),
        human,
    )
    .unwrap()
}

const VOCAB: &[&str] = &[
    "the",
    "cat",
    "sat",
    "at",
    "on",
    "home",
    "running",
    "runs",
    "happy",
    "happiness",
    "challenge",
    "problem",
    "plan",
    "team",
    "quickly",
    "river",
    "old",
    "city",
    "bright",
    "music",
    "dog",
    "garden",
    "letter",
    "train",
];

const SWAPS: &[(&str, &str)] = &[
    ("running", "runs"),
    ("happy", "happiness"),
    ("challenge", "problem"),
    ("at", "on"),
    ("cat", "dog"),
    ("city", "river"),
];

/// `n` labelled records over three systems of decreasing quality. Every
/// edit to the back-translation lowers the human score.
pub fn synthetic_dataset(n: usize, seed: u64) -> Vec<SentencePairRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|i| {
            let system = i % 3;
            let len = rng.gen_range(4..=8);
            let src: Vec<&str> = (0..len).map(|_| *VOCAB.choose(&mut rng).unwrap()).collect();
            let mut back = src.clone();
            let edits = rng.gen_range(0..=1 + system);
            for _ in 0..edits {
                match rng.gen_range(0..3) {
                    0 if back.len() > 1 => {
                        let k = rng.gen_range(0..back.len());
                        back.remove(k);
                    }
                    1 => {
                        let k = rng.gen_range(0..=back.len());
                        back.insert(k, VOCAB.choose(&mut rng).unwrap());
                    }
                    _ => {
                        let (a, b) = *SWAPS.choose(&mut rng).unwrap();
                        let k = rng.gen_range(0..back.len());
                        back[k] = if back[k] == a { b } else { a };
                    }
                }
            }
            let human = 10.0 - 2.5 * edits as f64 + rng.gen_range(0.0..0.5);
            record(&format!("r{i:03}"), &format!("sys{system}"), &src, &back, Some(human))
        })
        .collect()
}

pub fn write_jsonl(path: &Path, records: &[SentencePairRecord]) {
    let mut buf = Vec::new();
    write_dataset(&mut buf, records).unwrap();
    std::fs::write(path, buf).unwrap();
}

/// Synsets and edges as lists, before any loader touches them.
#[derive(Debug, Clone)]
pub struct RawGraph {
    pub nodes: Vec<(Pos, Vec<String>)>,
    pub edges: Vec<(usize, usize, Relation)>,
}

pub const LEMMAS: &[&str] = &["ka", "ko", "mi", "mu", "te"];

impl RawGraph {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let n = rng.gen_range(2..=10);
        let nodes = (0..n)
            .map(|_| {
                let pos = if rng.gen_bool(0.75) { Pos::Noun } else { Pos::Verb };
                let k = rng.gen_range(1..=2);
                let lemmas = LEMMAS.choose_multiple(rng, k).map(|s| s.to_string()).collect();
                (pos, lemmas)
            })
            .collect();
        let m = rng.gen_range(0..=2 * n);
        let mut edges = Vec::new();
        for _ in 0..m {
            let a = rng.gen_range(0..n);
            let b = rng.gen_range(0..n);
            if a != b {
                edges.push((a, b, *Relation::SEMANTIC.choose(rng).unwrap()));
            }
        }
        Self { nodes, edges }
    }

    pub fn snapshot(&self) -> String {
        let mut s = String::from("V\t5.2\n");
        for (i, (pos, lemmas)) in self.nodes.iter().enumerate() {
            s.push_str(&format!("N\ts{i}\t{pos}\teng\t{}\n", lemmas.join("|")));
        }
        for (a, b, r) in &self.edges {
            s.push_str(&format!("E\ts{a}\ts{b}\t{r}\n"));
        }
        s
    }
}

fn inverse(r: Relation) -> Relation {
    match r {
        Relation::Hypernym => Relation::Hyponym,
        Relation::Hyponym => Relation::Hypernym,
        Relation::Holonym => Relation::Meronym,
        Relation::Meronym => Relation::Holonym,
        other => other,
    }
}

fn type_weight(r: Relation, n: usize) -> f64 {
    match r {
        Relation::Antonym => 2.5,
        _ => 2.0 - 1.0 / n as f64,
    }
}

const X: usize = usize::MAX - 1;
const Y: usize = usize::MAX;

fn oracle_for_pos(g: &RawGraph, x: &str, y: &str, pos: Pos, cfg: &SearchConfig) -> Option<f64> {
    let closure: BTreeSet<(usize, usize, Relation)> = g
        .edges
        .iter()
        .flat_map(|&(a, b, r)| [(a, b, r), (b, a, inverse(r))])
        .collect();
    let mut degree: HashMap<(usize, Relation), usize> = HashMap::new();
    for &(a, _, r) in &closure {
        *degree.entry((a, r)).or_default() += 1;
    }
    let senses = |lemma: &str| -> Vec<usize> {
        (0..g.nodes.len())
            .filter(|&i| g.nodes[i].0 == pos && g.nodes[i].1.iter().any(|l| l == lemma))
            .collect()
    };
    let (sx, sy) = (senses(x), senses(y));
    if sx.is_empty() || sy.is_empty() || cfg.max_depth == 0 {
        return None;
    }

    let mut depth: BTreeMap<usize, usize> = BTreeMap::from([(X, 0), (Y, 0)]);
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();
    let mut frontier = BTreeSet::new();
    for (root, list) in [(X, &sx), (Y, &sy)] {
        for &s in list {
            depth.insert(s, 1);
            frontier.insert(s);
            edges.push((root, s, 0.0));
        }
    }
    let mut level = 1;
    loop {
        if let Some(best) = cheapest_simple_path(&edges) {
            return Some(best);
        }
        if level >= cfg.max_depth || frontier.is_empty() {
            return None;
        }
        let mut next = BTreeSet::new();
        for &u in &frontier {
            for &(a, v, r) in closure.iter().filter(|e| e.0 == u) {
                if !cfg.allowed_relations.contains(&r) {
                    continue;
                }
                if let std::collections::btree_map::Entry::Vacant(slot) = depth.entry(v) {
                    slot.insert(level + 1);
                    next.insert(v);
                }
                let d = depth[&a].max(depth[&v]);
                let w = (type_weight(r, degree[&(a, r)]) + type_weight(inverse(r), degree[&(v, inverse(r))]))
                    / (2.0 * d as f64);
                edges.push((a, v, w));
            }
        }
        frontier = next;
        level += 1;
    }
}

/// Minimum weight over every simple path from `X` to `Y`, by exhaustive
/// depth-first enumeration.
fn cheapest_simple_path(edges: &[(usize, usize, f64)]) -> Option<f64> {
    let mut adj: BTreeMap<usize, Vec<(usize, f64)>> = BTreeMap::new();
    for &(a, b, w) in edges {
        adj.entry(a).or_default().push((b, w));
        adj.entry(b).or_default().push((a, w));
    }
    fn dfs(
        u: usize,
        acc: f64,
        adj: &BTreeMap<usize, Vec<(usize, f64)>>,
        seen: &mut BTreeSet<usize>,
        best: &mut Option<f64>,
    ) {
        if u == Y {
            if best.is_none_or(|b| acc < b) {
                *best = Some(acc);
            }
            return;
        }
        for &(v, w) in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
            if seen.insert(v) {
                dfs(v, acc + w, adj, seen, best);
                seen.remove(&v);
            }
        }
    }
    let mut best = None;
    let mut seen = BTreeSet::from([X]);
    dfs(X, 0.0, &adj, &mut seen, &mut best);
    best
}

/// Total weight the search should report: noun senses first, then verbs.
pub fn oracle_total(g: &RawGraph, x: &str, y: &str, cfg: &SearchConfig) -> Option<f64> {
    oracle_for_pos(g, x, y, Pos::Noun, cfg).or_else(|| oracle_for_pos(g, x, y, Pos::Verb, cfg))
}

pub fn random_search_config(rng: &mut ChaCha8Rng) -> SearchConfig {
    let mut allowed = BTreeSet::new();
    while allowed.is_empty() {
        for r in Relation::SEMANTIC {
            if rng.gen_bool(0.4) {
                allowed.insert(r);
            }
        }
    }
    SearchConfig {
        max_depth: rng.gen_range(1..=7),
        allowed_relations: allowed,
        ..SearchConfig::default()
    }
}
