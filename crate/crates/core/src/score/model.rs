use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::features::{feature_index, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
use super::gbr::TreeNode;
use super::labels::LabelBounds;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    #[default]
    Gbr,
    Linear,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Gbr => "gbr",
            Mode::Linear => "linear",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "gbr" => Ok(Mode::Gbr),
            "linear" => Ok(Mode::Linear),
            other => Err(format!("unknown mode {other:?} (expected gbr or linear)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyperparams {
    pub n_estimators: usize,
    pub max_depth: usize,
    pub learning_rate: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_min_samples_leaf")]
    pub min_samples_leaf: usize,
}

fn default_min_samples_leaf() -> usize {
    5
}

impl Default for Hyperparams {
    fn default() -> Self {
        Self {
            n_estimators: 100,
            max_depth: 6,
            learning_rate: 0.1,
            seed: 0,
            min_samples_leaf: default_min_samples_leaf(),
        }
    }
}

impl Hyperparams {
    pub fn new(n_estimators: usize, max_depth: usize, learning_rate: f64) -> Self {
        Self {
            n_estimators,
            max_depth,
            learning_rate,
            ..Self::default()
        }
    }

    /// Tuned settings for the language pairs the method was evaluated on.
    pub fn preset(lang_pair: &str) -> Option<Self> {
        match lang_pair {
            "eng-deu" => Some(Self::new(100, 6, 0.1)),
            "eng-rus" => Some(Self::new(550, 7, 0.1)),
            "zho-eng" => Some(Self::new(1000, 6, 0.05)),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_estimators == 0 || self.max_depth == 0 || self.min_samples_leaf == 0 {
            return Err(Error::Invariant(
                "n_estimators, max_depth and min_samples_leaf must be positive".into(),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate > 0.0) {
            return Err(Error::Invariant(format!(
                "learning rate must be positive, got {}",
                self.learning_rate
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainMeta {
    pub hyperparams: Hyperparams,
    pub seed: u64,
    #[serde(default)]
    pub label_bounds: Option<LabelBounds>,
    pub n_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lang_pair: Option<String>,
}

/// A trained scorer. In `gbr` mode the prediction is
/// `init + lr * sum(trees)`; in `linear` mode it is `init - weights . x`
/// with non-negative weights, so every cost can only lower the score.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    pub mode: Mode,
    pub init: f64,
    pub lr: f64,
    pub feature_names: Vec<String>,
    pub trees: Vec<TreeNode>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<[f64; FEATURE_COUNT]>,
    pub train_meta: TrainMeta,
}

pub(super) fn feature_names() -> Vec<String> {
    FEATURE_NAMES.iter().map(|s| s.to_string()).collect()
}

impl Model {
    pub fn predict(&self, x: &FeatureVector) -> f64 {
        match self.mode {
            Mode::Gbr => {
                let v = x.to_array();
                let sum: f64 = self.trees.iter().map(|t| t.eval(&v)).sum();
                self.init + self.lr * sum
            }
            Mode::Linear => {
                let w = self.weights.unwrap_or_default();
                let dot: f64 = w.iter().zip(x.to_array()).map(|(w, f)| w * f).sum();
                self.init - dot
            }
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string(self).expect("model serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Model = serde_json::from_str(text).map_err(|e| Error::Model(e.to_string()))?;
        model.check()?;
        Ok(model)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_json()).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    fn check(&self) -> Result<()> {
        if self.feature_names != feature_names() {
            return Err(Error::Model(format!(
                "feature_names must be {:?}, got {:?}",
                FEATURE_NAMES, self.feature_names
            )));
        }
        if !self.init.is_finite() || !self.lr.is_finite() {
            return Err(Error::Model("init and lr must be finite".into()));
        }
        match self.mode {
            Mode::Gbr => {
                for tree in &self.trees {
                    tree.check()?;
                }
            }
            Mode::Linear => match self.weights {
                Some(w) if w.iter().all(|v| v.is_finite() && *v >= 0.0) => {}
                _ => return Err(Error::Model("linear model needs six non-negative weights".into())),
            },
        }
        Ok(())
    }
}

pub fn predict(model: &Model, x: &FeatureVector) -> f64 {
    model.predict(x)
}

/// Share of the total split gain credited to each feature, in
/// [`FEATURE_NAMES`] order. Linear models report their normalized weights.
/// A model with nothing to credit reports the uniform vector.
pub fn feature_importances(model: &Model) -> [f64; FEATURE_COUNT] {
    let mut totals = [0.0; FEATURE_COUNT];
    match model.mode {
        Mode::Gbr => {
            for tree in &model.trees {
                tree.visit_splits(&mut |feature, gain| {
                    if let Some(i) = feature_index(feature) {
                        totals[i] += gain.max(0.0);
                    }
                });
            }
        }
        Mode::Linear => totals = model.weights.unwrap_or_default(),
    }
    let sum: f64 = totals.iter().sum();
    if sum > 0.0 {
        totals.map(|t| t / sum)
    } else {
        [1.0 / FEATURE_COUNT as f64; FEATURE_COUNT]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stump_model() -> Model {
        Model {
            mode: Mode::Gbr,
            init: 0.0,
            lr: 1.0,
            feature_names: feature_names(),
            trees: vec![TreeNode::split(
                "extra",
                0.1,
                1.0,
                TreeNode::leaf(0.2),
                TreeNode::leaf(0.8),
            )],
            weights: None,
            train_meta: TrainMeta {
                hyperparams: Hyperparams::new(1, 1, 1.0),
                seed: 0,
                label_bounds: None,
                n_samples: 0,
                lang_pair: None,
            },
        }
    }

    #[test]
    fn presets() {
        assert_eq!(Hyperparams::preset("eng-deu"), Some(Hyperparams::new(100, 6, 0.1)));
        assert_eq!(Hyperparams::preset("eng-rus"), Some(Hyperparams::new(550, 7, 0.1)));
        assert_eq!(Hyperparams::preset("zho-eng"), Some(Hyperparams::new(1000, 6, 0.05)));
        assert_eq!(Hyperparams::preset("fra-eng"), None);
    }

    #[test]
    fn stump_prediction() {
        let m = stump_model();
        let x = |extra| FeatureVector {
            extra,
            ..FeatureVector::default()
        };
        assert_eq!(m.predict(&x(0.05)), 0.2);
        assert_eq!(m.predict(&x(0.3)), 0.8);
    }

    #[test]
    fn zero_tree_model_predicts_init() {
        let mut m = stump_model();
        m.trees.clear();
        m.init = 0.7;
        assert_eq!(m.predict(&FeatureVector::from_array([3.0; 6])), 0.7);
    }

    #[test]
    fn importances_of_a_single_feature_model() {
        let mut m = stump_model();
        m.trees[0] = TreeNode::split("sense", 0.5, 2.0, TreeNode::leaf(0.0), TreeNode::leaf(1.0));
        assert_eq!(feature_importances(&m), [0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        m.trees = vec![TreeNode::leaf(0.1)];
        assert_eq!(feature_importances(&m), [1.0 / 6.0; 6]);
    }

    #[test]
    fn json_round_trip_and_layout() {
        let m = stump_model();
        let json = m.to_json();
        let v: serde_json::Value = serde_json::from_str(&json).unwrap();
        for key in ["init", "lr", "feature_names", "trees", "mode", "train_meta"] {
            assert!(v.get(key).is_some(), "missing {key}");
        }
        assert_eq!(v["trees"][0]["feature"], "extra");
        assert_eq!(v["trees"][0]["left"]["value"], 0.2);
        assert_eq!(Model::from_json(&json).unwrap(), m);
    }

    #[test]
    fn rejects_unknown_features() {
        let mut m = stump_model();
        m.trees[0] = TreeNode::split("length", 0.5, 1.0, TreeNode::leaf(0.0), TreeNode::leaf(1.0));
        assert!(matches!(Model::from_json(&m.to_json()), Err(Error::Model(_))));
        assert!(matches!(Model::from_json("{"), Err(Error::Model(_))));
    }
}
