//! One sentence pair from embeddings to features.

use crate::align::{align_words, WordPairing};
use crate::corpus::SentencePairRecord;
use crate::error::Result;
use crate::lexicon::LexiconBundle;
use crate::relation::{classify_pair, RelationRecord, SenseCostFn};
use crate::score::{featurize, FeatureVector};

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredPair {
    pub pairing: WordPairing,
    /// Aligned pairs in source order, then missing source words, then extra
    /// back-translation words.
    pub relations: Vec<RelationRecord>,
    pub features: FeatureVector,
}

pub fn classify_record(
    record: &SentencePairRecord,
    lexicon: &LexiconBundle,
    sense: &dyn SenseCostFn,
) -> Result<(WordPairing, Vec<RelationRecord>)> {
    let pairing = align_words(&record.source, &record.back, &record.source_emb, &record.back_emb)?;
    let src_words = record.source.words();
    let back_words = record.back.words();
    let src_len = record.source.len();
    let lang = record.lang();

    let mut relations = Vec::with_capacity(pairing.pairs.len() + pairing.missing_src.len() + pairing.extra_back.len());
    for p in &pairing.pairs {
        relations.push(classify_pair(
            Some(&src_words[p.src].surface),
            Some(&back_words[p.back].surface),
            src_len,
            p.similarity,
            lang,
            lexicon,
            sense,
        ));
    }
    for &s in &pairing.missing_src {
        relations.push(classify_pair(
            Some(&src_words[s].surface),
            None,
            src_len,
            0.0,
            lang,
            lexicon,
            sense,
        ));
    }
    for &b in &pairing.extra_back {
        relations.push(classify_pair(
            None,
            Some(&back_words[b].surface),
            src_len,
            0.0,
            lang,
            lexicon,
            sense,
        ));
    }
    Ok((pairing, relations))
}

pub fn score_record(
    record: &SentencePairRecord,
    lexicon: &LexiconBundle,
    sense: &dyn SenseCostFn,
) -> Result<ScoredPair> {
    let (pairing, relations) = classify_record(record, lexicon, sense)?;
    Ok(ScoredPair {
        features: featurize(&relations),
        pairing,
        relations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{EmbeddingTable, TokenizedSentence};
    use crate::relation::RelationCategory;

    fn one_hot(n: usize, dim: usize) -> EmbeddingTable {
        EmbeddingTable::new(
            (0..n)
                .map(|i| (0..dim).map(|j| f64::from(u8::from(i == j))).collect())
                .collect(),
        )
        .unwrap()
    }

    fn never_called(_: &str, _: &str, _: &str, _: f64) -> f64 {
        panic!("sense lookup not expected")
    }

    #[test]
    fn identical_back_translation_has_zero_features() {
        let s = TokenizedSentence::from_surfaces("eng", &["the", "cat", "sat"]).unwrap();
        let r = SentencePairRecord::new("1", "sys", s.clone(), s, one_hot(3, 4), one_hot(3, 4), None).unwrap();
        let scored = score_record(&r, &LexiconBundle::bundled(), &never_called).unwrap();
        assert!(scored.features.is_zero());
        assert!(scored.relations.iter().all(|r| r.category == RelationCategory::Same));
        assert_eq!(scored.relations.len(), 3);
    }

    #[test]
    fn dropped_and_added_words() {
        let src = TokenizedSentence::from_surfaces("eng", &["cats", "sleep", "quietly", "now"]).unwrap();
        let back = TokenizedSentence::from_surfaces("eng", &["cats", "sleep", "now", "again", "today"]).unwrap();
        let src_emb = EmbeddingTable::new(vec![
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
        ])
        .unwrap();
        let back_emb = EmbeddingTable::new(vec![
            vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 1.0, 0.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 1.0, 0.0],
            vec![0.0, 0.0, 0.0, 0.0, 0.0, 1.0],
        ])
        .unwrap();
        let r = SentencePairRecord::new("2", "sys", src, back, src_emb, back_emb, None).unwrap();
        let scored = score_record(&r, &LexiconBundle::new(), &|_: &str, _: &str, _: &str, _: f64| 0.5).unwrap();
        // quietly is orthogonal to both spare back words and takes the first
        let f = scored.features;
        assert_eq!(f.to_array(), [0.25, 0.0, 0.0, 0.0, 0.0, 0.5]);
        let sense = scored
            .relations
            .iter()
            .find(|r| r.category == RelationCategory::Sense)
            .unwrap();
        assert_eq!(
            (sense.src_word.as_deref(), sense.back_word.as_deref()),
            (Some("quietly"), Some("again"))
        );
        assert_eq!(scored.pairing.extra_back, vec![4]);
    }
}
