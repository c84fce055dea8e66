use serde::{Deserialize, Serialize};

use crate::relation::{RelationCategory, RelationRecord};

pub const FEATURE_COUNT: usize = 6;

/// Column order of every feature array, model file and importance table.
pub const FEATURE_NAMES: [&str; FEATURE_COUNT] = ["extra", "missing", "stopword", "inflection", "derivation", "sense"];

/// Per-category cost sums of one sentence pair.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FeatureVector {
    pub extra: f64,
    pub missing: f64,
    pub stopword: f64,
    pub inflection: f64,
    pub derivation: f64,
    pub sense: f64,
}

impl FeatureVector {
    pub fn from_array(v: [f64; FEATURE_COUNT]) -> Self {
        Self {
            extra: v[0],
            missing: v[1],
            stopword: v[2],
            inflection: v[3],
            derivation: v[4],
            sense: v[5],
        }
    }

    pub fn to_array(&self) -> [f64; FEATURE_COUNT] {
        [
            self.extra,
            self.missing,
            self.stopword,
            self.inflection,
            self.derivation,
            self.sense,
        ]
    }

    pub fn get(&self, feature: usize) -> f64 {
        self.to_array()[feature]
    }

    pub fn is_zero(&self) -> bool {
        self.to_array().iter().all(|&v| v == 0.0)
    }
}

pub fn feature_index(name: &str) -> Option<usize> {
    FEATURE_NAMES.iter().position(|&n| n == name)
}

/// Sums pair costs by category. `Same` records carry no information.
pub fn featurize(records: &[RelationRecord]) -> FeatureVector {
    let mut f = FeatureVector::default();
    for r in records {
        let slot = match r.category {
            RelationCategory::Same => continue,
            RelationCategory::Extra => &mut f.extra,
            RelationCategory::Missing => &mut f.missing,
            RelationCategory::Stopword => &mut f.stopword,
            RelationCategory::Inflection => &mut f.inflection,
            RelationCategory::Derivation => &mut f.derivation,
            RelationCategory::Sense => &mut f.sense,
        };
        *slot += r.cost;
    }
    f
}
