//! Sentence data model, language-specific preprocessing and the
//! line-delimited dataset format.
//!
//! Word boundaries and subword token indices are part of the input: they come
//! from whatever tokenizer produced the embeddings. This module only checks
//! that they are consistent.

mod contractions;

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::sync::OnceLock;

use regex::{Captures, Regex};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const ENGLISH: &str = "eng";
pub const CHINESE: &str = "zho";

#[derive(Debug, Clone, PartialEq)]
pub struct Word {
    pub surface: String,
    pub token_indices: Vec<usize>,
}

impl Word {
    pub fn new(surface: impl Into<String>, token_indices: Vec<usize>) -> Self {
        Self {
            surface: surface.into(),
            token_indices,
        }
    }
}

/// A preprocessed sentence split into words, each owning a contiguous run of
/// subword tokens.
#[derive(Debug, Clone, PartialEq)]
pub struct TokenizedSentence {
    lang: String,
    words: Vec<Word>,
    raw_text: String,
    token_count: usize,
}

impl TokenizedSentence {
    /// Builds a sentence after checking that the words' token indices are
    /// disjoint, contiguous and cover `0..T` in order.
    pub fn new(lang: impl Into<String>, raw_text: impl Into<String>, words: Vec<Word>) -> Result<Self> {
        let token_count = check_token_coverage(&words).map_err(Error::Invariant)?;
        Ok(Self {
            lang: lang.into(),
            words,
            raw_text: raw_text.into(),
            token_count,
        })
    }

    /// One token per word, numbered in order.
    pub fn from_surfaces<S: AsRef<str>>(lang: &str, surfaces: &[S]) -> Result<Self> {
        let words = surfaces
            .iter()
            .enumerate()
            .map(|(i, s)| Word::new(s.as_ref(), vec![i]))
            .collect::<Vec<_>>();
        let raw = surfaces.iter().map(AsRef::as_ref).collect::<Vec<_>>().join(" ");
        Self::new(lang, raw, words)
    }

    pub fn lang(&self) -> &str {
        &self.lang
    }

    pub fn words(&self) -> &[Word] {
        &self.words
    }

    pub fn raw_text(&self) -> &str {
        &self.raw_text
    }

    /// Word count, the `len(s)` that prices extra, missing and stopword pairs.
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn token_count(&self) -> usize {
        self.token_count
    }

    /// Maps every token index to the index of the word that owns it.
    pub fn word_of_token(&self) -> Vec<usize> {
        let mut owner = vec![0; self.token_count];
        for (w, word) in self.words.iter().enumerate() {
            for &t in &word.token_indices {
                owner[t] = w;
            }
        }
        owner
    }
}

fn check_token_coverage(words: &[Word]) -> std::result::Result<usize, String> {
    if words.is_empty() {
        return Err("sentence has no words".into());
    }
    let mut next = 0usize;
    for (w, word) in words.iter().enumerate() {
        if word.surface.is_empty() {
            return Err(format!("word {w} has an empty surface"));
        }
        if word.token_indices.is_empty() {
            return Err(format!("word {w} ({:?}) owns no tokens", word.surface));
        }
        for &t in &word.token_indices {
            if t != next {
                return Err(format!(
                    "word {w} ({:?}) has token {t} where token {next} was expected",
                    word.surface
                ));
            }
            next += 1;
        }
    }
    Ok(next)
}

/// Per-token dense vectors for one sentence.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    vectors: Vec<Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(vectors: Vec<Vec<f64>>) -> Result<Self> {
        let dim = vectors.first().map(Vec::len).unwrap_or(0);
        Self::with_dim(dim, vectors)
    }

    pub fn with_dim(dim: usize, vectors: Vec<Vec<f64>>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Invariant("embedding dimension must be positive".into()));
        }
        for (i, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "vector {i} has {} entries, expected {dim}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Invariant(format!("vector {i} has a non-finite entry")));
            }
        }
        Ok(Self { dim, vectors })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SentencePairRecord {
    pub id: String,
    pub system: String,
    pub source: TokenizedSentence,
    pub back: TokenizedSentence,
    pub source_emb: EmbeddingTable,
    pub back_emb: EmbeddingTable,
    pub human_score: Option<f64>,
}

impl SentencePairRecord {
    pub fn new(
        id: impl Into<String>,
        system: impl Into<String>,
        source: TokenizedSentence,
        back: TokenizedSentence,
        source_emb: EmbeddingTable,
        back_emb: EmbeddingTable,
        human_score: Option<f64>,
    ) -> Result<Self> {
        if source.lang() != back.lang() {
            return Err(Error::Invariant(format!(
                "source language {} differs from back-translation language {}",
                source.lang(),
                back.lang()
            )));
        }
        if source_emb.dim() != back_emb.dim() {
            return Err(Error::DimensionMismatch(format!(
                "source dim {} vs back dim {}",
                source_emb.dim(),
                back_emb.dim()
            )));
        }
        for (name, sentence, table) in [("src", &source, &source_emb), ("back", &back, &back_emb)] {
            if sentence.token_count() != table.len() {
                return Err(Error::Invariant(format!(
                    "{name} has {} tokens but {} embedding vectors",
                    sentence.token_count(),
                    table.len()
                )));
            }
        }
        if let Some(h) = human_score {
            if !h.is_finite() {
                return Err(Error::Invariant("human score is not finite".into()));
            }
        }
        Ok(Self {
            id: id.into(),
            system: system.into(),
            source,
            back,
            source_emb,
            back_emb,
            human_score,
        })
    }

    pub fn lang(&self) -> &str {
        self.source.lang()
    }
}

fn contraction_table() -> &'static HashMap<&'static str, &'static str> {
    static TABLE: OnceLock<HashMap<&'static str, &'static str>> = OnceLock::new();
    TABLE.get_or_init(|| contractions::CONTRACTIONS.iter().copied().collect())
}

fn word_run() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"[\p{L}\p{N}']+").expect("static regex"))
}

fn han_char() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"\p{Han}").expect("static regex"))
}

fn expand_contraction(run: &str) -> Option<String> {
    let table = contraction_table();
    if let Some(full) = table.get(run) {
        return Some((*full).to_string());
    }
    // quoted forms such as 'don't'
    let inner = run.trim_matches('\'');
    if inner.len() == run.len() || inner.is_empty() {
        return None;
    }
    let full = table.get(inner)?;
    let lead = &run[..run.find(inner)?];
    let trail = &run[lead.len() + inner.len()..];
    Some(format!("{lead}{full}{trail}"))
}

/// Language-specific normalization applied before alignment.
///
/// English is lowercased, contractions are expanded and whitespace is
/// collapsed. Chinese keeps only Han-script characters. Every other language
/// is lowercased.
pub fn preprocess(text: &str, lang: &str) -> Result<String> {
    let out = match lang {
        ENGLISH => {
            let lowered = text.to_lowercase().replace(['\u{2019}', '\u{2018}'], "'");
            let expanded = word_run().replace_all(&lowered, |caps: &Captures<'_>| {
                let run = &caps[0];
                expand_contraction(run).unwrap_or_else(|| run.to_string())
            });
            expanded.split_whitespace().collect::<Vec<_>>().join(" ")
        }
        CHINESE => han_char().find_iter(text).map(|m| m.as_str()).collect::<String>(),
        _ => text.to_lowercase(),
    };
    if out.trim().is_empty() {
        return Err(Error::DegenerateSentence(text.to_string()));
    }
    Ok(out)
}

#[derive(Debug, Serialize, Deserialize)]
struct WordLine {
    surface: String,
    tokens: Vec<usize>,
}

#[derive(Debug, Serialize, Deserialize)]
struct SentenceLine {
    text: String,
    words: Vec<WordLine>,
    emb: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RecordLine {
    id: String,
    system: String,
    lang: String,
    src: SentenceLine,
    back: SentenceLine,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    human_score: Option<f64>,
}

impl SentenceLine {
    fn from_parts(sentence: &TokenizedSentence, table: &EmbeddingTable) -> Self {
        Self {
            text: sentence.raw_text().to_string(),
            words: sentence
                .words()
                .iter()
                .map(|w| WordLine {
                    surface: w.surface.clone(),
                    tokens: w.token_indices.clone(),
                })
                .collect(),
            emb: table.vectors().to_vec(),
        }
    }

    fn into_parts(self, lang: &str, dim: usize) -> Result<(TokenizedSentence, EmbeddingTable)> {
        let words = self.words.into_iter().map(|w| Word::new(w.surface, w.tokens)).collect();
        let sentence = TokenizedSentence::new(lang, self.text, words)?;
        let table = EmbeddingTable::with_dim(dim, self.emb)?;
        Ok((sentence, table))
    }
}

fn schema(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Invariant(message) | Error::DimensionMismatch(message) => Error::Schema { line, message },
        other => other,
    }
}

/// Reads a line-delimited dataset. Blank lines are skipped; line numbers in
/// errors are 1-based.
pub fn load_dataset(path: impl AsRef<Path>) -> Result<Vec<SentencePairRecord>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_dataset(BufReader::new(file)).map_err(|e| match e {
        Error::Io { source, .. } => Error::io(path, source),
        other => other,
    })
}

pub fn read_dataset<R: BufRead>(reader: R) -> Result<Vec<SentencePairRecord>> {
    let mut records = Vec::new();
    let mut dim: Option<usize> = None;
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::io("<dataset>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let raw: RecordLine = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        let file_dim =
            *dim.get_or_insert_with(|| raw.src.emb.first().or(raw.back.emb.first()).map(Vec::len).unwrap_or(0));
        let (source, source_emb) = raw.src.into_parts(&raw.lang, file_dim).map_err(schema(lineno))?;
        let (back, back_emb) = raw.back.into_parts(&raw.lang, file_dim).map_err(schema(lineno))?;
        let record = SentencePairRecord::new(raw.id, raw.system, source, back, source_emb, back_emb, raw.human_score)
            .map_err(schema(lineno))?;
        records.push(record);
    }
    Ok(records)
}

pub fn write_dataset<W: Write>(mut writer: W, records: &[SentencePairRecord]) -> std::io::Result<()> {
    for r in records {
        let line = RecordLine {
            id: r.id.clone(),
            system: r.system.clone(),
            lang: r.lang().to_string(),
            src: SentenceLine::from_parts(&r.source, &r.source_emb),
            back: SentenceLine::from_parts(&r.back, &r.back_emb),
            human_score: r.human_score,
        };
        serde_json::to_writer(&mut writer, &line)?;
        writer.write_all(b"\n")?;
    }
    Ok(())
}
