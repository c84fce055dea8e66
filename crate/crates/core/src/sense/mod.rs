//! Offline sense graph, bounded shortest-path search and sense costs.

mod scorer;
mod search;
mod store;
mod weights;

pub use scorer::{fallback_cost, sense_cost, GraphSenseScorer, SenseCache};
pub use search::{shortest_path_for_pos, shortest_sense_path, PathEdge, PathResult, SearchConfig, DEFAULT_MAX_DEPTH};
pub use store::{parse_relations, NodeKind, Pos, Relation, SenseEdge, SenseGraphBuilder, SenseGraphStore, SenseNode};
pub use weights::{
    combine_edge_weight, edge_type_weight, edge_weight, score_from_total, RelationTypeParams, ANTONYM_WEIGHT,
};

/// Normalized score of a search result, `None` when nothing was found.
pub fn path_score(result: &PathResult) -> Option<f64> {
    result.score()
}
