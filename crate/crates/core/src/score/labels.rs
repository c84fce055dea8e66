use serde::{Deserialize, Serialize};

/// Range of the clamped training labels, kept with the model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LabelBounds {
    pub min: f64,
    pub max: f64,
}

impl LabelBounds {
    /// Bounds after clamping negatives to zero. `None` for empty input.
    pub fn fit(scores: &[f64]) -> Option<Self> {
        let mut it = scores.iter().map(|&s| s.max(0.0));
        let first = it.next()?;
        let (min, max) = it.fold((first, first), |(lo, hi), s| (lo.min(s), hi.max(s)));
        Some(Self { min, max })
    }

    pub fn apply(&self, score: f64) -> f64 {
        let s = score.max(0.0);
        if self.max == self.min {
            0.5
        } else {
            (s - self.min) / (self.max - self.min)
        }
    }
}

/// Clamps negative human scores to zero, then min-max scales to `[0, 1]`.
/// Constant input maps to 0.5 everywhere.
pub fn normalize_labels(scores: &[f64]) -> Vec<f64> {
    match LabelBounds::fit(scores) {
        Some(b) => scores.iter().map(|&s| b.apply(s)).collect(),
        None => Vec::new(),
    }
}
