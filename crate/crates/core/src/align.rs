//! Lifting token matches to word pairs.
//!
//! Tokens act as representatives of their words: the token-level assignment
//! is solved first and every token match votes for pairing the two words
//! that own the tokens. A source word takes the back word with the most
//! votes (ties go to the single most similar token match). Word pairs are
//! then granted one-to-one in order of descending similarity, so a source
//! word whose preferred back word is already taken becomes missing.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::assignment::{build_cost_matrix, solve_lsap};
use crate::corpus::{EmbeddingTable, TokenizedSentence};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WordPair {
    pub src: usize,
    pub back: usize,
    /// Cosine similarity of the winning token match.
    pub similarity: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct WordPairing {
    /// Sorted by source word index.
    pub pairs: Vec<WordPair>,
    pub missing_src: Vec<usize>,
    pub extra_back: Vec<usize>,
}

#[derive(Debug, Clone, Copy)]
struct Ballot {
    votes: usize,
    best_similarity: f64,
}

pub fn align_words(
    src: &TokenizedSentence,
    back: &TokenizedSentence,
    src_emb: &EmbeddingTable,
    back_emb: &EmbeddingTable,
) -> Result<WordPairing> {
    for (sentence, table) in [(src, src_emb), (back, back_emb)] {
        if sentence.token_count() != table.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} tokens but {} embedding vectors",
                sentence.token_count(),
                table.len()
            )));
        }
    }
    let costs = build_cost_matrix(src_emb, back_emb)?;
    let tokens = solve_lsap(&costs);

    let src_owner = src.word_of_token();
    let back_owner = back.word_of_token();

    let mut ballots: Vec<BTreeMap<usize, Ballot>> = vec![BTreeMap::new(); src.len()];
    for &(i, j) in &tokens.matches {
        let similarity = 1.0 - costs.get(i, j);
        let entry = ballots[src_owner[i]].entry(back_owner[j]).or_insert(Ballot {
            votes: 0,
            best_similarity: f64::NEG_INFINITY,
        });
        entry.votes += 1;
        entry.best_similarity = entry.best_similarity.max(similarity);
    }

    let mut candidates: Vec<WordPair> = ballots
        .iter()
        .enumerate()
        .filter_map(|(s, votes)| {
            // BTreeMap iteration is by back index, so equal ballots keep the lowest one
            let mut winner: Option<(usize, Ballot)> = None;
            for (&b, &ballot) in votes {
                let wins = match winner {
                    None => true,
                    Some((_, w)) => {
                        ballot.votes > w.votes
                            || (ballot.votes == w.votes && ballot.best_similarity > w.best_similarity)
                    }
                };
                if wins {
                    winner = Some((b, ballot));
                }
            }
            winner.map(|(b, ballot)| WordPair {
                src: s,
                back: b,
                similarity: ballot.best_similarity.clamp(-1.0, 1.0),
            })
        })
        .collect();

    candidates.sort_by(|a, b| b.similarity.total_cmp(&a.similarity).then(a.src.cmp(&b.src)));

    let mut back_taken = vec![false; back.len()];
    let mut src_paired = vec![false; src.len()];
    let mut pairs = Vec::with_capacity(candidates.len());
    for c in candidates {
        if !back_taken[c.back] {
            back_taken[c.back] = true;
            src_paired[c.src] = true;
            pairs.push(c);
        }
    }
    pairs.sort_by_key(|p| p.src);

    Ok(WordPairing {
        pairs,
        missing_src: (0..src.len()).filter(|&s| !src_paired[s]).collect(),
        extra_back: (0..back.len()).filter(|&b| !back_taken[b]).collect(),
    })
}

/// Human-readable alignment: one `src ↔ back similarity` line per pair,
/// then `MISSING` and `EXTRA` lines.
pub fn render_pairing(src: &TokenizedSentence, back: &TokenizedSentence, pairing: &WordPairing) -> String {
    let mut out = String::new();
    for p in &pairing.pairs {
        let _ = writeln!(
            out,
            "{}\t↔\t{}\t{:.6}",
            src.words()[p.src].surface,
            back.words()[p.back].surface,
            p.similarity
        );
    }
    for &s in &pairing.missing_src {
        let _ = writeln!(out, "MISSING\t{}", src.words()[s].surface);
    }
    for &b in &pairing.extra_back {
        let _ = writeln!(out, "EXTRA\t{}", back.words()[b].surface);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Word;
    use proptest::prelude::*;

    fn sentence(words: &[(&str, usize)]) -> TokenizedSentence {
        let mut t = 0;
        let words = words
            .iter()
            .map(|&(s, n)| {
                let w = Word::new(s, (t..t + n).collect());
                t += n;
                w
            })
            .collect();
        TokenizedSentence::new("eng", "", words).unwrap()
    }

    fn table(v: &[&[f64]]) -> EmbeddingTable {
        EmbeddingTable::new(v.iter().map(|r| r.to_vec()).collect()).unwrap()
    }

    #[test]
    fn identical_sentences_pair_diagonally() {
        let s = sentence(&[("a", 1), ("b", 1), ("c", 1)]);
        let e = table(&[&[1.0, 0.1, 0.0], &[0.0, 1.0, 0.2], &[0.3, 0.0, 1.0]]);
        let p = align_words(&s, &s, &e, &e).unwrap();
        assert_eq!(
            p.pairs.iter().map(|p| (p.src, p.back)).collect::<Vec<_>>(),
            [(0, 0), (1, 1), (2, 2)]
        );
        assert!(p.missing_src.is_empty() && p.extra_back.is_empty());
        assert!(p.pairs.iter().all(|p| (p.similarity - 1.0).abs() < 1e-12));
    }

    #[test]
    fn subword_tokens_represent_their_word() {
        // inconsequential = [in, con, sequential], unimportant = [un, important]
        let src = sentence(&[("inconsequential", 3)]);
        let back = sentence(&[("unimportant", 2)]);
        let src_emb = table(&[&[0.9, 0.1, 0.0], &[0.1, 0.2, 0.9], &[0.2, 0.9, 0.1]]);
        let back_emb = table(&[&[0.8, 0.2, 0.1], &[0.1, 0.95, 0.2]]);
        let p = align_words(&src, &back, &src_emb, &back_emb).unwrap();
        assert_eq!(p.pairs.len(), 1);
        assert_eq!((p.pairs[0].src, p.pairs[0].back), (0, 0));
        assert!(p.missing_src.is_empty() && p.extra_back.is_empty());
        // best of the two token matches: (in, un) and (sequential, important)
        let best = crate::assignment::cosine_similarity(&[0.2, 0.9, 0.1], &[0.1, 0.95, 0.2])
            .unwrap()
            .max(crate::assignment::cosine_similarity(&[0.9, 0.1, 0.0], &[0.8, 0.2, 0.1]).unwrap());
        assert!((p.pairs[0].similarity - best).abs() < 1e-12);
    }

    #[test]
    fn surplus_source_word_goes_missing() {
        let src = sentence(&[("a", 1), ("b", 1), ("c", 1), ("d", 1)]);
        let back = sentence(&[("a", 1), ("b", 1), ("c", 1)]);
        let src_emb = table(&[
            &[1.0, 0.0, 0.0, 0.0],
            &[0.0, 1.0, 0.0, 0.0],
            &[0.0, 0.0, 1.0, 0.0],
            &[0.0, 0.0, 0.05, 1.0],
        ]);
        let back_emb = table(&[&[1.0, 0.0, 0.0, 0.0], &[0.0, 1.0, 0.0, 0.0], &[0.0, 0.0, 1.0, 0.0]]);
        let p = align_words(&src, &back, &src_emb, &back_emb).unwrap();
        assert_eq!(p.missing_src, vec![3]);
        assert!(p.extra_back.is_empty());
        assert_eq!(
            p.pairs.iter().map(|p| (p.src, p.back)).collect::<Vec<_>>(),
            [(0, 0), (1, 1), (2, 2)]
        );
    }

    #[test]
    fn split_votes_lose_to_majority_and_free_words_become_extra() {
        // src word 0 has three tokens: two align into back word 0, one into back word 1
        let src = sentence(&[("abc", 3)]);
        let back = sentence(&[("ab", 2), ("c", 1)]);
        let src_emb = table(&[&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]]);
        let back_emb = table(&[&[1.0, 0.1, 0.0], &[0.0, 1.0, 0.1], &[0.1, 0.0, 1.0]]);
        let p = align_words(&src, &back, &src_emb, &back_emb).unwrap();
        assert_eq!(p.pairs.iter().map(|p| (p.src, p.back)).collect::<Vec<_>>(), [(0, 0)]);
        assert_eq!(p.extra_back, vec![1]);
    }

    #[test]
    fn contested_back_word_goes_to_the_more_similar_source() {
        let src = sentence(&[("x", 1), ("y", 1)]);
        let back = sentence(&[("xy", 2)]);
        let src_emb = table(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let back_emb = table(&[&[0.9, 0.1], &[0.3, 1.0]]);
        let p = align_words(&src, &back, &src_emb, &back_emb).unwrap();
        assert_eq!(p.pairs.len(), 1);
        let winner = p.pairs[0].src;
        let loser = 1 - winner;
        assert_eq!(p.missing_src, vec![loser]);
        let sims = [
            crate::assignment::cosine_similarity(&[1.0, 0.0], &[0.9, 0.1]).unwrap(),
            crate::assignment::cosine_similarity(&[0.0, 1.0], &[0.3, 1.0]).unwrap(),
        ];
        assert_eq!(winner, if sims[0] >= sims[1] { 0 } else { 1 });
    }

    #[test]
    fn render_lists_missing_and_extra() {
        let src = sentence(&[("a", 1), ("b", 1)]);
        let back = sentence(&[("a", 1)]);
        let e = table(&[&[1.0, 0.0], &[0.0, 1.0]]);
        let eb = table(&[&[1.0, 0.0]]);
        let p = align_words(&src, &back, &e, &eb).unwrap();
        let text = render_pairing(&src, &back, &p);
        assert_eq!(text, "a\t↔\ta\t1.000000\nMISSING\tb\n");
    }

    type Case = (Vec<usize>, Vec<usize>, Vec<Vec<f64>>, Vec<Vec<f64>>);

    fn arb_case() -> impl Strategy<Value = Case> {
        (
            prop::collection::vec(1usize..3, 1..5),
            prop::collection::vec(1usize..3, 1..5),
        )
            .prop_flat_map(|(s, b)| {
                let ts: usize = s.iter().sum();
                let tb: usize = b.iter().sum();
                (
                    Just(s),
                    Just(b),
                    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), ts),
                    prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), tb),
                )
            })
    }

    fn build(lens: &[usize]) -> TokenizedSentence {
        let names: Vec<String> = (0..lens.len()).map(|i| format!("w{i}")).collect();
        let parts: Vec<(&str, usize)> = names.iter().map(String::as_str).zip(lens.iter().copied()).collect();
        sentence(&parts)
    }

    proptest! {
        #[test]
        fn every_word_lands_in_exactly_one_bucket((s, b, es, eb) in arb_case()) {
            let src = build(&s);
            let back = build(&b);
            let p = align_words(&src, &back, &EmbeddingTable::new(es).unwrap(), &EmbeddingTable::new(eb).unwrap()).unwrap();
            prop_assert_eq!(p.pairs.len() + p.missing_src.len(), src.len());
            prop_assert_eq!(p.pairs.len() + p.extra_back.len(), back.len());
            let mut seen_back = vec![false; back.len()];
            for pair in &p.pairs {
                prop_assert!(!seen_back[pair.back]);
                seen_back[pair.back] = true;
                prop_assert!(!p.missing_src.contains(&pair.src));
                prop_assert!((-1.0..=1.0).contains(&pair.similarity));
            }
            for &e in &p.extra_back {
                prop_assert!(!seen_back[e]);
            }
        }

        #[test]
        fn permuting_back_words_permutes_output(
            (s, _b, es, _eb) in arb_case(),
            back_vecs in prop::collection::vec(prop::collection::vec(-1.0f64..1.0, 4), 1..5),
            seed in any::<u64>(),
        ) {
            // one token per back word keeps the permutation simple
            let n = back_vecs.len();
            let mut perm: Vec<usize> = (0..n).collect();
            let mut state = seed;
            for i in (1..n).rev() {
                state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                perm.swap(i, (state >> 33) as usize % (i + 1));
            }
            let src = build(&s);
            let back = build(&vec![1; n]);
            let src_emb = EmbeddingTable::new(es).unwrap();
            let p = align_words(&src, &back, &src_emb, &EmbeddingTable::new(back_vecs.clone()).unwrap()).unwrap();
            // permuted position k holds original back word perm[k]
            let permuted: Vec<Vec<f64>> = perm.iter().map(|&k| back_vecs[k].clone()).collect();
            let q = align_words(&src, &back, &src_emb, &EmbeddingTable::new(permuted).unwrap()).unwrap();
            let mut inverse = vec![0; n];
            for (k, &orig) in perm.iter().enumerate() {
                inverse[orig] = k;
            }
            let mapped: Vec<(usize, usize)> = p.pairs.iter().map(|x| (x.src, inverse[x.back])).collect();
            prop_assert_eq!(mapped, q.pairs.iter().map(|x| (x.src, x.back)).collect::<Vec<_>>());
            prop_assert_eq!(&p.missing_src, &q.missing_src);
        }

        #[test]
        fn diagonal_dominance_reproduces_token_assignment(n in 1usize..6, noise in prop::collection::vec(0.0f64..0.2, 36)) {
            let s = build(&vec![1; n]);
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|i| (0..n).map(|d| if d == i { 1.0 } else { noise[i * 6 + d] }).collect())
                .collect();
            let e = EmbeddingTable::new(rows).unwrap();
            let basis: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|d| if d == i { 1.0 } else { 0.0 }).collect()).collect();
            let eb = EmbeddingTable::new(basis).unwrap();
            let p = align_words(&s, &s, &e, &eb).unwrap();
            let tokens = solve_lsap(&build_cost_matrix(&e, &eb).unwrap());
            prop_assert_eq!(p.pairs.iter().map(|x| (x.src, x.back)).collect::<Vec<_>>(), tokens.matches);
        }
    }
}
