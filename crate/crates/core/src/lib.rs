//! Reference-less machine translation evaluation.
//!
//! A translation is judged by comparing its source sentence with a
//! back-translation into the source language. Subword embeddings of both
//! sentences are aligned with an exact assignment solver, every aligned or
//! unaligned word is classified into one of seven relation categories, sense
//! relations are priced on a hypernym graph, and the per-category cost sums
//! are combined by a trained regression model.
//!
//! The stages map onto modules:
//!
//! - [`corpus`]: sentence data model, preprocessing and dataset files
//! - [`assignment`]: cosine cost matrices and the rectangular assignment solver
//! - [`align`]: token matches lifted to word pairs
//! - [`lexicon`] and [`relation`]: lexical tables and the category cascade
//! - [`sense`]: the offline sense graph, path search and path scoring
//! - [`score`]: features, boosted trees, label normalization, correlation
//! - [`pipeline`]: one sentence pair from embeddings to features
//! - [`cli`]: the command-line entry points

pub mod align;
pub mod assignment;
pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod lexicon;
pub mod pipeline;
pub mod relation;
pub mod score;
pub mod sense;

pub use error::{Error, Result};
