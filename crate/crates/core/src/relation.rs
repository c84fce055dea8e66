//! Relation categories for aligned and unaligned words.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::lexicon::LexiconBundle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RelationCategory {
    Same,
    Extra,
    Missing,
    Stopword,
    Inflection,
    Derivation,
    Sense,
}

impl RelationCategory {
    pub const ALL: [RelationCategory; 7] = [
        RelationCategory::Same,
        RelationCategory::Extra,
        RelationCategory::Missing,
        RelationCategory::Stopword,
        RelationCategory::Inflection,
        RelationCategory::Derivation,
        RelationCategory::Sense,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RelationCategory::Same => "same",
            RelationCategory::Extra => "extra",
            RelationCategory::Missing => "missing",
            RelationCategory::Stopword => "stopword",
            RelationCategory::Inflection => "inflection",
            RelationCategory::Derivation => "derivation",
            RelationCategory::Sense => "sense",
        }
    }
}

impl fmt::Display for RelationCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RelationCategory {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown relation category {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationRecord {
    pub category: RelationCategory,
    pub src_word: Option<String>,
    pub back_word: Option<String>,
    pub cost: f64,
}

/// Prices a pair of content words that share no lemma or derivation.
/// Implementations must return a cost in `[0, 1]` and absorb their own
/// failures.
pub trait SenseCostFn {
    fn sense_cost(&self, src_word: &str, back_word: &str, lang: &str, similarity: f64) -> f64;
}

impl<F: Fn(&str, &str, &str, f64) -> f64> SenseCostFn for F {
    fn sense_cost(&self, src_word: &str, back_word: &str, lang: &str, similarity: f64) -> f64 {
        self(src_word, back_word, lang, similarity)
    }
}

/// Assigns the category and cost of one word pair.
///
/// The cascade runs in order: missing back word, missing source word,
/// identical surfaces, both stopwords, shared lemma, derivational pair, and
/// finally a sense lookup. `similarity` is the representative token
/// similarity of the pair.
///
/// # Panics
///
/// If both words are absent or `src_len` is zero.
pub fn classify_pair(
    src_word: Option<&str>,
    back_word: Option<&str>,
    src_len: usize,
    similarity: f64,
    lang: &str,
    lexicon: &LexiconBundle,
    sense: &dyn SenseCostFn,
) -> RelationRecord {
    assert!(src_len >= 1, "source sentence length must be positive");
    let unit = 1.0 / src_len as f64;
    let record = |category, cost| RelationRecord {
        category,
        src_word: src_word.map(str::to_string),
        back_word: back_word.map(str::to_string),
        cost,
    };

    let (s, b) = match (src_word, back_word) {
        (None, None) => panic!("classify_pair needs at least one word"),
        (Some(_), None) => return record(RelationCategory::Missing, unit),
        (None, Some(_)) => return record(RelationCategory::Extra, unit),
        (Some(s), Some(b)) => (s, b),
    };

    if s == b {
        return record(RelationCategory::Same, 0.0);
    }
    if lexicon.is_stopword(s, lang) && lexicon.is_stopword(b, lang) {
        return record(RelationCategory::Stopword, unit);
    }
    let embedding_cost = (1.0 - similarity).clamp(0.0, 2.0);
    let (ls, lb) = (lexicon.lemmatize(s, lang), lexicon.lemmatize(b, lang));
    if ls == lb {
        return record(RelationCategory::Inflection, embedding_cost);
    }
    if lexicon.are_derivations(ls, lb, lang) {
        return record(RelationCategory::Derivation, embedding_cost);
    }
    let cost = sense.sense_cost(s, b, lang, similarity).clamp(0.0, 1.0);
    record(RelationCategory::Sense, cost)
}
