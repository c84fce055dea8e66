//! Sentence features, trained combination models and meta-evaluation.

mod features;
mod gbr;
mod labels;
mod linear;
mod meta;
mod model;

pub use features::{feature_index, featurize, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
pub use gbr::{train_gbr, train_gbr_with_trace, TreeNode};
pub use labels::{normalize_labels, LabelBounds};
pub use linear::train_linear;
pub use meta::{pearson, system_level_report, ScoredItem, SystemReport, SystemRow};
pub use model::{feature_importances, predict, Hyperparams, Mode, Model, TrainMeta};

/// Importance table: a header row of feature names and one row of shares.
pub fn render_importances(importances: &[f64; FEATURE_COUNT]) -> String {
    let values: Vec<String> = importances.iter().map(|v| format!("{v:.6}")).collect();
    format!("{}\n{}\n", FEATURE_NAMES.join("\t"), values.join("\t"))
}
