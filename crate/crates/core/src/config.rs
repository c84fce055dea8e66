//! Run configuration: a TOML file whose values command-line flags override.
//!
//! ```toml
//! dataset = "data/dev.jsonl"
//! graph = "data/graph.tsv"
//! model = "model.json"
//! lang_pair = "eng-deu"
//! mode = "gbr"
//! seed = 0
//! jobs = 4
//!
//! [sense]
//! max_depth = 7
//! relations = ["hypernym"]
//!
//! [hyperparams]
//! n_estimators = 100
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::score::{Hyperparams, Mode};
use crate::sense::{parse_relations, SearchConfig, DEFAULT_MAX_DEPTH};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SenseSettings {
    pub max_depth: usize,
    pub relations: Vec<String>,
}

impl Default for SenseSettings {
    fn default() -> Self {
        Self {
            max_depth: DEFAULT_MAX_DEPTH,
            relations: vec!["hypernym".into()],
        }
    }
}

/// Explicit tree settings; anything left out comes from the language-pair
/// preset, or the generic defaults for other pairs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct HyperparamSettings {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_estimators: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_depth: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub learning_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_samples_leaf: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dataset: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub graph: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lexicons: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lang_pair: Option<String>,
    pub mode: Mode,
    pub seed: u64,
    /// Worker threads for sentence scoring; all cores when unset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub jobs: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exclude_system: Option<String>,
    /// Per-sentence scores, alignments and tables go here instead of stdout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    /// System-level report destination instead of stdout.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    pub sense: SenseSettings,
    pub hyperparams: HyperparamSettings,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Parse {
            line: e.span().map_or(0, |s| text[..s.start].lines().count().max(1)),
            message: e.message().to_string(),
        })
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Parse { line, message } => Error::Parse {
                line,
                message: format!("{}: {message}", path.display()),
            },
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn search_config(&self) -> Result<SearchConfig> {
        let allowed_relations = parse_relations(&self.sense.relations.join(",")).map_err(Error::Invariant)?;
        Ok(SearchConfig {
            max_depth: self.sense.max_depth,
            allowed_relations,
            ..SearchConfig::default()
        })
    }

    pub fn hyperparams(&self) -> Hyperparams {
        let base = self
            .lang_pair
            .as_deref()
            .and_then(Hyperparams::preset)
            .unwrap_or_default();
        let h = &self.hyperparams;
        Hyperparams {
            n_estimators: h.n_estimators.unwrap_or(base.n_estimators),
            max_depth: h.max_depth.unwrap_or(base.max_depth),
            learning_rate: h.learning_rate.unwrap_or(base.learning_rate),
            min_samples_leaf: h.min_samples_leaf.unwrap_or(base.min_samples_leaf),
            seed: self.seed,
        }
    }

    /// Language of source and back-translation: the first half of the
    /// pair tag, English when no tag is given.
    pub fn source_lang(&self) -> &str {
        self.lang_pair
            .as_deref()
            .and_then(|p| p.split('-').next())
            .filter(|s| !s.is_empty())
            .unwrap_or(crate::corpus::ENGLISH)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sense::Relation;

    #[test]
    fn defaults() {
        let c = RunConfig::parse("").unwrap();
        assert_eq!(c.mode, Mode::Gbr);
        assert_eq!(c.seed, 0);
        let s = c.search_config().unwrap();
        assert_eq!(s.max_depth, 7);
        assert_eq!(
            s.allowed_relations.iter().copied().collect::<Vec<_>>(),
            vec![Relation::Hypernym]
        );
        assert_eq!(c.hyperparams(), Hyperparams::default());
        assert_eq!(c.source_lang(), "eng");
    }

    #[test]
    fn presets_then_overrides() {
        let c = RunConfig::parse("lang_pair = \"eng-rus\"\nseed = 9\n[hyperparams]\nlearning_rate = 0.2\n").unwrap();
        let h = c.hyperparams();
        assert_eq!((h.n_estimators, h.max_depth, h.learning_rate, h.seed), (550, 7, 0.2, 9));
        let c = RunConfig::parse("lang_pair = \"zho-eng\"\n").unwrap();
        assert_eq!(c.source_lang(), "zho");
        assert_eq!(c.hyperparams().n_estimators, 1000);
    }

    #[test]
    fn round_trips_through_toml() {
        let c = RunConfig {
            dataset: Some("d.jsonl".into()),
            model: Some("m.json".into()),
            lang_pair: Some("eng-deu".into()),
            mode: Mode::Linear,
            seed: 3,
            jobs: Some(2),
            exclude_system: Some("refB".into()),
            sense: SenseSettings {
                max_depth: 4,
                relations: vec!["hypernym".into(), "antonym".into()],
            },
            hyperparams: HyperparamSettings {
                n_estimators: Some(10),
                ..Default::default()
            },
            ..Default::default()
        };
        assert_eq!(RunConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn rejects_unknown_keys_and_relations() {
        assert!(matches!(RunConfig::parse("datset = \"x\"\n"), Err(Error::Parse { .. })));
        let c = RunConfig::parse("[sense]\nrelations = [\"sibling\"]\n").unwrap();
        assert!(c.search_config().is_err());
    }
}
