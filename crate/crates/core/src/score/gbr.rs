//! Least-squares gradient boosting over regression trees.
//!
//! Each round fits a depth-bounded tree to the current residuals with an
//! exact greedy splitter (every midpoint between distinct feature values is
//! a candidate, scored by the drop in squared error) and adds it with
//! learning-rate shrinkage.

use serde::{Deserialize, Serialize};

use super::features::{feature_index, FeatureVector, FEATURE_COUNT, FEATURE_NAMES};
use super::model::{feature_names, Hyperparams, Mode, Model, TrainMeta};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TreeNode {
    Split {
        feature: String,
        threshold: f64,
        /// Squared-error reduction achieved by this split.
        gain: f64,
        left: Box<TreeNode>,
        right: Box<TreeNode>,
    },
    Leaf {
        value: f64,
    },
}

impl TreeNode {
    pub fn leaf(value: f64) -> Self {
        TreeNode::Leaf { value }
    }

    pub fn split(feature: &str, threshold: f64, gain: f64, left: TreeNode, right: TreeNode) -> Self {
        TreeNode::Split {
            feature: feature.to_string(),
            threshold,
            gain,
            left: Box::new(left),
            right: Box::new(right),
        }
    }

    /// Samples with `x[feature] <= threshold` go left.
    pub fn eval(&self, x: &[f64; FEATURE_COUNT]) -> f64 {
        let mut node = self;
        loop {
            match node {
                TreeNode::Leaf { value } => return *value,
                TreeNode::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    let i = feature_index(feature).expect("feature names are checked on load");
                    node = if x[i] <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn visit_splits(&self, f: &mut impl FnMut(&str, f64)) {
        if let TreeNode::Split {
            feature,
            gain,
            left,
            right,
            ..
        } = self
        {
            f(feature, *gain);
            left.visit_splits(f);
            right.visit_splits(f);
        }
    }

    pub fn split_count(&self) -> usize {
        let mut n = 0;
        self.visit_splits(&mut |_, _| n += 1);
        n
    }

    pub(super) fn check(&self) -> Result<()> {
        match self {
            TreeNode::Leaf { value } if value.is_finite() => Ok(()),
            TreeNode::Leaf { .. } => Err(Error::Model("leaf value is not finite".into())),
            TreeNode::Split {
                feature,
                threshold,
                left,
                right,
                ..
            } => {
                if feature_index(feature).is_none() {
                    return Err(Error::Model(format!("unknown feature {feature:?} in tree")));
                }
                if !threshold.is_finite() {
                    return Err(Error::Model("split threshold is not finite".into()));
                }
                left.check()?;
                right.check()
            }
        }
    }
}

struct TreeFitter<'a> {
    x: &'a [[f64; FEATURE_COUNT]],
    residual: &'a [f64],
    max_depth: usize,
    min_samples_leaf: usize,
    go_left: Vec<bool>,
}

struct BestSplit {
    feature: usize,
    threshold: f64,
    gain: f64,
}

impl TreeFitter<'_> {
    /// `sorted[f]` lists the node's samples ordered by feature `f`.
    fn fit(&mut self, sorted: [Vec<usize>; FEATURE_COUNT], depth: usize) -> TreeNode {
        let n = sorted[0].len();
        let sum: f64 = sorted[0].iter().map(|&i| self.residual[i]).sum();
        let mean = sum / n as f64;
        if depth >= self.max_depth || n < 2 * self.min_samples_leaf {
            return TreeNode::leaf(mean);
        }
        let Some(best) = self.best_split(&sorted, sum) else {
            return TreeNode::leaf(mean);
        };

        for &i in &sorted[0] {
            self.go_left[i] = self.x[i][best.feature] <= best.threshold;
        }
        let mut left: [Vec<usize>; FEATURE_COUNT] = Default::default();
        let mut right: [Vec<usize>; FEATURE_COUNT] = Default::default();
        for (f, order) in sorted.into_iter().enumerate() {
            let (l, r): (Vec<usize>, Vec<usize>) = order.into_iter().partition(|&i| self.go_left[i]);
            left[f] = l;
            right[f] = r;
        }
        TreeNode::split(
            FEATURE_NAMES[best.feature],
            best.threshold,
            best.gain,
            self.fit(left, depth + 1),
            self.fit(right, depth + 1),
        )
    }

    fn best_split(&self, sorted: &[Vec<usize>; FEATURE_COUNT], sum: f64) -> Option<BestSplit> {
        let n = sorted[0].len();
        let msl = self.min_samples_leaf;
        let mut best: Option<BestSplit> = None;
        for (f, order) in sorted.iter().enumerate() {
            let mut left_sum = 0.0;
            for k in 0..n - 1 {
                left_sum += self.residual[order[k]];
                let (nl, nr) = (k + 1, n - k - 1);
                if nl < msl || nr < msl {
                    continue;
                }
                let (a, b) = (self.x[order[k]][f], self.x[order[k + 1]][f]);
                if a == b {
                    continue;
                }
                let diff = left_sum / nl as f64 - (sum - left_sum) / nr as f64;
                let gain = (nl * nr) as f64 / n as f64 * diff * diff;
                if gain > best.as_ref().map_or(0.0, |s| s.gain) {
                    let mid = a + (b - a) / 2.0;
                    best = Some(BestSplit {
                        feature: f,
                        threshold: if mid < b { mid } else { a },
                        gain,
                    });
                }
            }
        }
        best
    }
}

fn check_training_set(x: &[FeatureVector], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} feature vectors but {} labels",
            x.len(),
            y.len()
        )));
    }
    if x.len() < 2 {
        return Err(Error::Invariant("training needs at least two samples".into()));
    }
    if x.iter()
        .flat_map(|v| v.to_array())
        .chain(y.iter().copied())
        .any(|v| !v.is_finite())
    {
        return Err(Error::Invariant("training data contains non-finite values".into()));
    }
    Ok(())
}

pub(super) fn mean_squared_error(y: &[f64], pred: &[f64]) -> f64 {
    y.iter().zip(pred).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / y.len() as f64
}

/// Trains a boosted ensemble and returns it with the training MSE after
/// each round (index 0 is the constant initial model).
pub fn train_gbr_with_trace(x: &[FeatureVector], y: &[f64], hp: &Hyperparams) -> Result<(Model, Vec<f64>)> {
    check_training_set(x, y)?;
    hp.validate()?;
    let rows: Vec<[f64; FEATURE_COUNT]> = x.iter().map(FeatureVector::to_array).collect();
    let n = rows.len();

    let init = if y.iter().all(|&v| v == y[0]) {
        y[0]
    } else {
        y.iter().sum::<f64>() / n as f64
    };
    let mut pred = vec![init; n];
    let mut trace = Vec::with_capacity(hp.n_estimators + 1);
    trace.push(mean_squared_error(y, &pred));

    let presorted: [Vec<usize>; FEATURE_COUNT] = std::array::from_fn(|f| {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| rows[a][f].total_cmp(&rows[b][f]).then(a.cmp(&b)));
        idx
    });

    let mut residual = vec![0.0; n];
    let mut trees = Vec::with_capacity(hp.n_estimators);
    for _ in 0..hp.n_estimators {
        for i in 0..n {
            residual[i] = y[i] - pred[i];
        }
        let mut fitter = TreeFitter {
            x: &rows,
            residual: &residual,
            max_depth: hp.max_depth,
            min_samples_leaf: hp.min_samples_leaf,
            go_left: vec![false; n],
        };
        let tree = fitter.fit(presorted.clone(), 0);
        for (p, row) in pred.iter_mut().zip(&rows) {
            *p += hp.learning_rate * tree.eval(row);
        }
        trace.push(mean_squared_error(y, &pred));
        trees.push(tree);
    }

    let model = Model {
        mode: Mode::Gbr,
        init,
        lr: hp.learning_rate,
        feature_names: feature_names(),
        trees,
        weights: None,
        train_meta: TrainMeta {
            hyperparams: *hp,
            seed: hp.seed,
            label_bounds: None,
            n_samples: n,
            lang_pair: None,
        },
    };
    Ok((model, trace))
}

pub fn train_gbr(x: &[FeatureVector], y: &[f64], hp: &Hyperparams) -> Result<Model> {
    train_gbr_with_trace(x, y, hp).map(|(m, _)| m)
}
