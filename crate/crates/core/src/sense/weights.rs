//! Sussna-style edge weights.
//!
//! A relation of type `r` leaving a node with `n` such relations weighs
//! `max_r - (max_r - min_r) / n`, so a node with many hyponyms spreads each
//! one thinner. An edge averages the weight in both directions and divides
//! by the depth of its deeper endpoint, making edges far from the query
//! words cheaper.

use serde::{Deserialize, Serialize};

use super::store::{Relation, SenseGraphStore};
use crate::error::{Error, Result};

/// `(min_r, max_r)` per semantic relation type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelationTypeParams {
    bounds: [(f64, f64); 5],
}

pub const ANTONYM_WEIGHT: f64 = 2.5;

impl Default for RelationTypeParams {
    fn default() -> Self {
        Self {
            bounds: [
                (1.0, 2.0),
                (1.0, 2.0),
                (1.0, 2.0),
                (1.0, 2.0),
                (ANTONYM_WEIGHT, ANTONYM_WEIGHT),
            ],
        }
    }
}

impl RelationTypeParams {
    pub fn min_max(&self, relation: Relation) -> Option<(f64, f64)> {
        relation.slot().map(|s| self.bounds[s])
    }

    pub fn with_bounds(mut self, relation: Relation, min: f64, max: f64) -> Self {
        if let Some(s) = relation.slot() {
            self.bounds[s] = (min, max);
        }
        self
    }
}

/// Weight of one directed relation given the count of same-typed relations
/// leaving its source node.
pub fn edge_type_weight(relation: Relation, n_r: usize, params: &RelationTypeParams) -> Result<f64> {
    let Some((min_r, max_r)) = params.min_max(relation) else {
        return Ok(0.0);
    };
    if n_r == 0 {
        return Err(Error::Degree {
            node: "?".into(),
            relation: relation.name().into(),
        });
    }
    Ok(max_r - (max_r - min_r) / n_r as f64)
}

/// Combines the two directed type weights of an edge at a given depth.
pub fn combine_edge_weight(forward: f64, inverse: f64, depth: usize) -> f64 {
    (forward + inverse) / (2.0 * depth as f64)
}

pub(crate) fn edge_weight_by_index(
    store: &SenseGraphStore,
    a: usize,
    b: usize,
    relation: Relation,
    depth: usize,
    params: &RelationTypeParams,
) -> Result<f64> {
    if relation == Relation::RootSense {
        return Ok(0.0);
    }
    let with_node = |node: usize, rel: Relation| {
        move |e: Error| match e {
            Error::Degree { .. } => Error::Degree {
                node: store.id_of(node).to_string(),
                relation: rel.name().into(),
            },
            other => other,
        }
    };
    let forward = edge_type_weight(relation, store.degree_of(a, relation), params).map_err(with_node(a, relation))?;
    let inv = relation.inverse();
    let inverse = edge_type_weight(inv, store.degree_of(b, inv), params).map_err(with_node(b, inv))?;
    Ok(combine_edge_weight(forward, inverse, depth))
}

/// Weight of the edge `a -relation-> b` whose deeper endpoint sits at
/// `depth`. Root-to-sense edges weigh nothing.
pub fn edge_weight(
    store: &SenseGraphStore,
    a: &str,
    b: &str,
    relation: Relation,
    depth: usize,
    params: &RelationTypeParams,
) -> Result<f64> {
    if relation == Relation::RootSense {
        return Ok(0.0);
    }
    let unknown = |id: &str| Error::Invariant(format!("unknown synset {id}"));
    let ai = store.index_of(a).ok_or_else(|| unknown(a))?;
    let bi = store.index_of(b).ok_or_else(|| unknown(b))?;
    if !store.outgoing(ai).contains(&(bi, relation)) {
        return Err(Error::Invariant(format!("no {relation} edge from {a} to {b}")));
    }
    edge_weight_by_index(store, ai, bi, relation, depth.max(1), params)
}

/// Normalized path score `2 * (0.5 - 1 / total)`, clamped to `[0, 1]`.
/// A zero total (the two words share a synset) scores 0.
pub fn score_from_total(total_weight: f64) -> f64 {
    if total_weight <= 0.0 {
        return 0.0;
    }
    (2.0 * (0.5 - 1.0 / total_weight)).clamp(0.0, 1.0)
}
