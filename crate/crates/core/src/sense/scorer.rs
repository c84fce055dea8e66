use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use super::search::{shortest_sense_path, SearchConfig};
use super::store::SenseGraphStore;
use crate::error::{Error, Result};
use crate::lexicon::LexiconBundle;
use crate::relation::SenseCostFn;

/// Cost when no path is found: one minus the embedding similarity, where a
/// negative similarity counts as no similarity at all.
pub fn fallback_cost(similarity: f64) -> f64 {
    (1.0 - similarity.max(0.0)).clamp(0.0, 1.0)
}

/// Sense cost of a word pair: the normalized score of the shortest sense
/// path between the two lemmas, or the embedding fallback when the graph
/// does not connect them within the depth limit.
pub fn sense_cost(
    src_word: &str,
    back_word: &str,
    similarity: f64,
    lang: &str,
    store: &SenseGraphStore,
    lexicon: &LexiconBundle,
    config: &SearchConfig,
) -> f64 {
    let x = lexicon.lemmatize(src_word, lang);
    let y = lexicon.lemmatize(back_word, lang);
    shortest_sense_path(x, y, lang, store, config)
        .score()
        .unwrap_or_else(|| fallback_cost(similarity))
}

type CacheKey = (String, String, String);

/// Memo of path scores keyed by `(lang, lemma, lemma)`, with the lemmas in
/// sorted order since the search is symmetric. `None` records a search
/// that found nothing. Safe to share between worker threads.
#[derive(Debug, Default)]
pub struct SenseCache {
    fingerprint: String,
    entries: Mutex<HashMap<CacheKey, Option<f64>>>,
}

const CACHE_FILE: &str = "sense-cache.tsv";

impl SenseCache {
    pub fn new(fingerprint: impl Into<String>) -> Self {
        Self {
            fingerprint: fingerprint.into(),
            entries: Mutex::new(HashMap::new()),
        }
    }

    pub fn file_in(dir: &Path) -> PathBuf {
        dir.join(CACHE_FILE)
    }

    /// Loads entries written under the same fingerprint. A file written for
    /// another graph or configuration is ignored.
    pub fn load(dir: &Path, fingerprint: impl Into<String>) -> Result<Self> {
        let cache = Self::new(fingerprint);
        let path = Self::file_in(dir);
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(cache),
            Err(e) => return Err(Error::io(path, e)),
        };
        let mut lines = text.lines();
        if lines.next() != Some(format!("# {}", cache.fingerprint).as_str()) {
            return Ok(cache);
        }
        let mut map = HashMap::new();
        for (i, line) in lines.enumerate() {
            let cols: Vec<&str> = line.split('\t').collect();
            let [lang, a, b, value] = cols.as_slice() else {
                return Err(Error::Parse {
                    line: i + 2,
                    message: format!("{}: expected 4 columns", path.display()),
                });
            };
            let value = match *value {
                "-" => None,
                v => Some(v.parse::<f64>().map_err(|e| Error::Parse {
                    line: i + 2,
                    message: format!("{}: {e}", path.display()),
                })?),
            };
            map.insert((lang.to_string(), a.to_string(), b.to_string()), value);
        }
        *cache.entries.lock().expect("fresh mutex") = map;
        Ok(cache)
    }

    pub fn save(&self, dir: &Path) -> Result<()> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let path = Self::file_in(dir);
        let entries = self.entries.lock().expect("sense cache lock poisoned");
        let mut rows: Vec<_> = entries.iter().collect();
        rows.sort_by(|a, b| a.0.cmp(b.0));
        let tmp = path.with_extension("tsv.tmp");
        let mut out = String::new();
        out.push_str(&format!("# {}\n", self.fingerprint));
        for ((lang, a, b), v) in rows {
            let v = v.map_or_else(|| "-".to_string(), |x| format!("{x:?}"));
            out.push_str(&format!("{lang}\t{a}\t{b}\t{v}\n"));
        }
        let mut file = fs::File::create(&tmp).map_err(|e| Error::io(&tmp, e))?;
        file.write_all(out.as_bytes()).map_err(|e| Error::io(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))
    }

    pub fn len(&self) -> usize {
        self.entries.lock().expect("sense cache lock poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn get_or_insert_with(&self, key: CacheKey, compute: impl FnOnce() -> Option<f64>) -> Option<f64> {
        if let Some(v) = self.entries.lock().expect("sense cache lock poisoned").get(&key) {
            return *v;
        }
        // computed outside the lock; a racing duplicate computes the same value
        let v = compute();
        self.entries.lock().expect("sense cache lock poisoned").insert(key, v);
        v
    }
}

/// [`SenseCostFn`] backed by a sense graph, a lemmatizer and a memo cache.
pub struct GraphSenseScorer<'a> {
    store: &'a SenseGraphStore,
    lexicon: &'a LexiconBundle,
    config: SearchConfig,
    cache: SenseCache,
}

impl<'a> GraphSenseScorer<'a> {
    pub fn new(store: &'a SenseGraphStore, lexicon: &'a LexiconBundle, config: SearchConfig) -> Self {
        let cache = SenseCache::new(Self::fingerprint_for(store, &config));
        Self::with_cache(store, lexicon, config, cache)
    }

    pub fn with_cache(
        store: &'a SenseGraphStore,
        lexicon: &'a LexiconBundle,
        config: SearchConfig,
        cache: SenseCache,
    ) -> Self {
        Self {
            store,
            lexicon,
            config,
            cache,
        }
    }

    pub fn fingerprint_for(store: &SenseGraphStore, config: &SearchConfig) -> String {
        format!(
            "version={};synsets={};edges={};{}",
            store.version().unwrap_or("-"),
            store.synset_count(),
            store.edge_count(),
            config.fingerprint()
        )
    }

    pub fn cache(&self) -> &SenseCache {
        &self.cache
    }

    pub fn config(&self) -> &SearchConfig {
        &self.config
    }

    pub fn path_score(&self, src_word: &str, back_word: &str, lang: &str) -> Option<f64> {
        let x = self.lexicon.lemmatize(src_word, lang);
        let y = self.lexicon.lemmatize(back_word, lang);
        let (a, b) = if x <= y { (x, y) } else { (y, x) };
        let key = (lang.to_string(), a.to_string(), b.to_string());
        self.cache.get_or_insert_with(key, || {
            shortest_sense_path(x, y, lang, self.store, &self.config).score()
        })
    }
}

impl SenseCostFn for GraphSenseScorer<'_> {
    fn sense_cost(&self, src_word: &str, back_word: &str, lang: &str, similarity: f64) -> f64 {
        self.path_score(src_word, back_word, lang)
            .unwrap_or_else(|| fallback_cost(similarity))
    }
}
