//! Shortest weighted path between two query words through their senses.
//!
//! The search graph starts with two roots (depth 0) joined to their synsets
//! (depth 1). While the roots are disconnected, every synset on the current
//! frontier is expanded along the allowed relation types, which adds its
//! neighbours one level deeper together with the connecting edges. Edges are
//! only known once their source synset has been expanded. After each level
//! a Dijkstra search runs over the undirected graph; the first level that
//! connects the roots decides the answer.

use std::cmp::Ordering;
use std::collections::{BTreeSet, BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use super::store::{NodeKind, Pos, Relation, SenseGraphStore, SenseNode};
use super::weights::{edge_weight_by_index, RelationTypeParams};

pub const DEFAULT_MAX_DEPTH: usize = 7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_depth: usize,
    pub allowed_relations: BTreeSet<Relation>,
    #[serde(default)]
    pub params: RelationTypeParams,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            allowed_relations: BTreeSet::from([Relation::Hypernym]),
            params: RelationTypeParams::default(),
        }
    }
}

impl SearchConfig {
    pub fn fingerprint(&self) -> String {
        let rels: Vec<&str> = self.allowed_relations.iter().map(|r| r.name()).collect();
        let bounds: Vec<String> = Relation::SEMANTIC
            .iter()
            .filter_map(|&r| self.params.min_max(r).map(|(lo, hi)| format!("{lo:?}-{hi:?}")))
            .collect();
        format!(
            "depth={};relations={};bounds={}",
            self.max_depth,
            rels.join(","),
            bounds.join(",")
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathEdge {
    pub from: SenseNode,
    pub to: SenseNode,
    /// Relation in the direction of travel.
    pub relation: Relation,
    /// Depth of the deeper endpoint.
    pub depth: usize,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathResult {
    pub found: bool,
    pub edges: Vec<PathEdge>,
    pub total_weight: f64,
    /// Deepest level built before the search stopped.
    pub depth_reached: usize,
    pub pos: Option<Pos>,
}

impl PathResult {
    fn not_found(depth_reached: usize, pos: Pos) -> Self {
        Self {
            found: false,
            edges: Vec::new(),
            total_weight: 0.0,
            depth_reached,
            pos: Some(pos),
        }
    }

    /// Normalized score of a found path, clamped to `[0, 1]`.
    pub fn score(&self) -> Option<f64> {
        self.found.then(|| super::weights::score_from_total(self.total_weight))
    }
}

const ROOT_X: usize = 0;
const ROOT_Y: usize = 1;

#[derive(Debug, Clone, Copy)]
struct LocalEdge {
    to: usize,
    relation: Relation,
    weight: f64,
}

struct SearchGraph<'a> {
    store: &'a SenseGraphStore,
    params: &'a RelationTypeParams,
    // local index -> store index; None for the two roots
    global: Vec<Option<usize>>,
    local: HashMap<usize, usize>,
    depth: Vec<usize>,
    adj: Vec<Vec<LocalEdge>>,
}

impl<'a> SearchGraph<'a> {
    fn new(store: &'a SenseGraphStore, params: &'a RelationTypeParams) -> Self {
        Self {
            store,
            params,
            global: vec![None, None],
            local: HashMap::new(),
            depth: vec![0, 0],
            adj: vec![Vec::new(), Vec::new()],
        }
    }

    fn intern(&mut self, synset: usize, depth: usize) -> (usize, bool) {
        if let Some(&l) = self.local.get(&synset) {
            return (l, false);
        }
        let l = self.global.len();
        self.global.push(Some(synset));
        self.depth.push(depth);
        self.adj.push(Vec::new());
        self.local.insert(synset, l);
        (l, true)
    }

    fn connect(&mut self, a: usize, b: usize, relation: Relation, weight: f64) {
        self.adj[a].push(LocalEdge {
            to: b,
            relation,
            weight,
        });
        self.adj[b].push(LocalEdge {
            to: a,
            relation: relation.inverse(),
            weight,
        });
    }

    fn add_senses(&mut self, root: usize, senses: &[usize]) -> Vec<usize> {
        let mut fresh = Vec::new();
        for &s in senses {
            let (l, new) = self.intern(s, 1);
            if new {
                fresh.push(l);
            }
            self.connect(root, l, Relation::RootSense, 0.0);
        }
        fresh
    }

    fn expand(&mut self, frontier: &[usize], allowed: &BTreeSet<Relation>) -> Vec<usize> {
        let mut next = Vec::new();
        for &u in frontier {
            let gu = self.global[u].expect("frontier holds synsets");
            let du = self.depth[u];
            for &(gv, relation) in self.store.outgoing(gu) {
                if !allowed.contains(&relation) {
                    continue;
                }
                let (v, new) = self.intern(gv, du + 1);
                if new {
                    next.push(v);
                }
                let depth = du.max(self.depth[v]);
                // degrees come from the closed store, so both directions are non-zero
                let weight = edge_weight_by_index(self.store, gu, gv, relation, depth, self.params)
                    .expect("stored edges have non-zero degree in both directions");
                self.connect(u, v, relation, weight);
            }
        }
        next
    }

    fn node(&self, l: usize, x: &str, y: &str, lang: &str, pos: Pos) -> SenseNode {
        match self.global[l] {
            Some(g) => self.store.node(g, lang),
            None => {
                let lemma = if l == ROOT_X { x } else { y };
                SenseNode {
                    id: lemma.to_string(),
                    kind: NodeKind::Root,
                    lemma: Some(lemma.to_string()),
                    pos,
                }
            }
        }
    }

    // Dijkstra from root x to root y; the path as (node, edge taken to reach it).
    fn shortest(&self) -> Option<Vec<(usize, LocalEdge)>> {
        #[derive(PartialEq)]
        struct Item(f64, usize);
        impl Eq for Item {}
        impl Ord for Item {
            fn cmp(&self, other: &Self) -> Ordering {
                other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
            }
        }
        impl PartialOrd for Item {
            fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
                Some(self.cmp(other))
            }
        }

        let n = self.adj.len();
        let mut dist = vec![f64::INFINITY; n];
        let mut prev: Vec<Option<(usize, LocalEdge)>> = vec![None; n];
        let mut done = vec![false; n];
        let mut heap = BinaryHeap::new();
        dist[ROOT_X] = 0.0;
        heap.push(Item(0.0, ROOT_X));
        while let Some(Item(d, u)) = heap.pop() {
            if done[u] {
                continue;
            }
            done[u] = true;
            if u == ROOT_Y {
                break;
            }
            for e in &self.adj[u] {
                // the target root is only ever entered, never crossed
                if e.to == ROOT_X {
                    continue;
                }
                let nd = d + e.weight;
                if nd < dist[e.to] {
                    dist[e.to] = nd;
                    prev[e.to] = Some((u, *e));
                    heap.push(Item(nd, e.to));
                }
            }
        }
        if !done[ROOT_Y] {
            return None;
        }
        let mut path = Vec::new();
        let mut cur = ROOT_Y;
        while let Some((p, e)) = prev[cur] {
            path.push((p, e));
            cur = p;
        }
        path.reverse();
        Some(path)
    }
}

/// Shortest path between the senses of `x` and `y` restricted to one part
/// of speech.
pub fn shortest_path_for_pos(
    x: &str,
    y: &str,
    lang: &str,
    pos: Pos,
    store: &SenseGraphStore,
    config: &SearchConfig,
) -> PathResult {
    let x_senses = store.sense_indices(x, lang, pos);
    let y_senses = store.sense_indices(y, lang, pos);
    if x_senses.is_empty() || y_senses.is_empty() || config.max_depth == 0 {
        return PathResult::not_found(0, pos);
    }

    let mut graph = SearchGraph::new(store, &config.params);
    let mut frontier = graph.add_senses(ROOT_X, x_senses);
    frontier.extend(graph.add_senses(ROOT_Y, y_senses));

    let mut level = 1;
    loop {
        if let Some(path) = graph.shortest() {
            let mut edges = Vec::with_capacity(path.len());
            let mut total = 0.0;
            for (from, e) in path {
                total += e.weight;
                edges.push(PathEdge {
                    from: graph.node(from, x, y, lang, pos),
                    to: graph.node(e.to, x, y, lang, pos),
                    relation: e.relation,
                    depth: graph.depth[from].max(graph.depth[e.to]),
                    weight: e.weight,
                });
            }
            return PathResult {
                found: true,
                edges,
                total_weight: total,
                depth_reached: level,
                pos: Some(pos),
            };
        }
        if level >= config.max_depth || frontier.is_empty() {
            return PathResult::not_found(level, pos);
        }
        frontier = graph.expand(&frontier, &config.allowed_relations);
        level += 1;
    }
}

/// Noun senses first, then verb senses. Other parts of speech are never
/// searched.
pub fn shortest_sense_path(x: &str, y: &str, lang: &str, store: &SenseGraphStore, config: &SearchConfig) -> PathResult {
    let noun = shortest_path_for_pos(x, y, lang, Pos::Noun, store, config);
    if noun.found {
        return noun;
    }
    let verb = shortest_path_for_pos(x, y, lang, Pos::Verb, store, config);
    if verb.found {
        return verb;
    }
    if store.sense_indices(x, lang, Pos::Noun).is_empty() || store.sense_indices(y, lang, Pos::Noun).is_empty() {
        verb
    } else {
        noun
    }
}
