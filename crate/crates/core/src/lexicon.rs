//! Stopword lists, lemma tables and derivational pairs, per language.
//!
//! On disk a lexicon directory holds
//!
//! ```text
//! stopwords/<lang>.txt     one token per line
//! lemmas/<lang>.tsv        surface<TAB>lemma
//! derivations/<lang>.tsv   lemma<TAB>lemma (order-insensitive)
//! ```
//!
//! Any file may be absent; lookups for that language then fall back to
//! identity lemmas and empty sets. Lines starting with `#` are comments.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default)]
pub struct LexiconBundle {
    stopwords: HashMap<String, HashSet<String>>,
    lemmas: HashMap<String, HashMap<String, String>>,
    derivations: HashMap<String, HashSet<(String, String)>>,
}

fn ordered(a: &str, b: &str) -> (String, String) {
    if a <= b {
        (a.to_string(), b.to_string())
    } else {
        (b.to_string(), a.to_string())
    }
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
}

fn two_columns(line: &str, lineno: usize) -> Result<(&str, &str)> {
    let mut cols = line.split('\t');
    match (cols.next(), cols.next(), cols.next()) {
        (Some(a), Some(b), None) if !a.trim().is_empty() && !b.trim().is_empty() => Ok((a.trim(), b.trim())),
        _ => Err(Error::Parse {
            line: lineno,
            message: format!("expected two tab-separated columns, got {line:?}"),
        }),
    }
}

impl LexiconBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self> {
        let dir = dir.as_ref();
        if !dir.is_dir() {
            return Err(Error::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "lexicon directory not found"),
            ));
        }
        let mut bundle = Self::new();
        for (sub, ext) in [("stopwords", "txt"), ("lemmas", "tsv"), ("derivations", "tsv")] {
            let path = dir.join(sub);
            let Ok(entries) = fs::read_dir(&path) else {
                continue;
            };
            let mut files: Vec<_> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|e| e == ext))
                .collect();
            files.sort();
            for file in files {
                let Some(lang) = file.file_stem().and_then(|s| s.to_str()).map(str::to_string) else {
                    continue;
                };
                let text = fs::read_to_string(&file).map_err(|e| Error::io(&file, e))?;
                let located = |e: Error| match e {
                    Error::Parse { line, message } => Error::Parse {
                        line,
                        message: format!("{}: {message}", file.display()),
                    },
                    other => other,
                };
                match sub {
                    "stopwords" => bundle.add_stopwords(&lang, &text),
                    "lemmas" => bundle.add_lemma_table(&lang, &text).map_err(located)?,
                    _ => bundle.add_derivation_table(&lang, &text).map_err(located)?,
                }
            }
        }
        Ok(bundle)
    }

    /// The lexicons shipped with the crate, compiled into the binary.
    pub fn bundled() -> Self {
        let mut bundle = Self::new();
        bundle.add_stopwords("eng", include_str!("../data/lexicons/stopwords/eng.txt"));
        bundle.add_stopwords("zho", include_str!("../data/lexicons/stopwords/zho.txt"));
        bundle
            .add_lemma_table("eng", include_str!("../data/lexicons/lemmas/eng.tsv"))
            .expect("bundled lemma table parses");
        bundle
            .add_derivation_table("eng", include_str!("../data/lexicons/derivations/eng.tsv"))
            .expect("bundled derivation table parses");
        bundle
    }

    pub fn add_stopwords(&mut self, lang: &str, text: &str) {
        let set = self.stopwords.entry(lang.to_string()).or_default();
        for (_, line) in content_lines(text) {
            set.insert(line.trim().to_string());
        }
    }

    pub fn add_lemma_table(&mut self, lang: &str, text: &str) -> Result<()> {
        let table = self.lemmas.entry(lang.to_string()).or_default();
        for (lineno, line) in content_lines(text) {
            let (surface, lemma) = two_columns(line, lineno)?;
            table.insert(surface.to_string(), lemma.to_string());
        }
        Ok(())
    }

    pub fn add_derivation_table(&mut self, lang: &str, text: &str) -> Result<()> {
        let set = self.derivations.entry(lang.to_string()).or_default();
        for (lineno, line) in content_lines(text) {
            let (a, b) = two_columns(line, lineno)?;
            set.insert(ordered(a, b));
        }
        Ok(())
    }

    pub fn is_stopword(&self, word: &str, lang: &str) -> bool {
        self.stopwords.get(lang).is_some_and(|s| s.contains(word))
    }

    /// Table lookup; the word itself when there is no entry.
    pub fn lemmatize<'a>(&'a self, word: &'a str, lang: &str) -> &'a str {
        self.lemmas
            .get(lang)
            .and_then(|t| t.get(word))
            .map(String::as_str)
            .unwrap_or(word)
    }

    pub fn are_derivations(&self, lemma_a: &str, lemma_b: &str, lang: &str) -> bool {
        self.derivations
            .get(lang)
            .is_some_and(|s| s.contains(&ordered(lemma_a, lemma_b)))
    }

    pub fn stopword_count(&self, lang: &str) -> usize {
        self.stopwords.get(lang).map_or(0, HashSet::len)
    }
}
