//! Corpus-level BLEU with one reference per hypothesis.
//!
//! Clipped n-gram matches and n-gram totals are summed over the whole corpus
//! before the geometric mean is taken; the brevity penalty uses corpus token
//! totals. Scores are on the 0–100 scale.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tokenize::{PunctSplitTokenizer, Token, Tokenizer};

pub const MAX_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Smoothing {
    /// Any zero precision makes the score 0.
    #[default]
    None,
    /// An order with zero matches uses `1 / (total + 1)` as its precision.
    AddOneOnZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BleuReport {
    pub bleu: f64,
    pub precisions: [f64; MAX_ORDER],
    pub brevity_penalty: f64,
    pub hyp_length: usize,
    pub ref_length: usize,
    pub matches: [u64; MAX_ORDER],
    pub totals: [u64; MAX_ORDER],
    /// Set when every hypothesis is empty; the score is then 0.
    pub empty_hypotheses: bool,
}

fn ngram_counts(tokens: &[Token], n: usize) -> HashMap<&[Token], u64> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

pub fn corpus_bleu<H: AsRef<str>, R: AsRef<str>>(
    hypotheses: &[H],
    references: &[R],
    smoothing: Smoothing,
) -> Result<BleuReport> {
    corpus_bleu_with(&PunctSplitTokenizer, hypotheses, references, smoothing)
}

pub fn corpus_bleu_with<H: AsRef<str>, R: AsRef<str>>(
    tokenizer: &dyn Tokenizer,
    hypotheses: &[H],
    references: &[R],
    smoothing: Smoothing,
) -> Result<BleuReport> {
    if hypotheses.len() != references.len() || hypotheses.is_empty() {
        return Err(Error::LengthMismatch {
            hyps: hypotheses.len(),
            refs: references.len(),
        });
    }
    let mut matches = [0u64; MAX_ORDER];
    let mut totals = [0u64; MAX_ORDER];
    let (mut hyp_length, mut ref_length) = (0usize, 0usize);

    for (h, r) in hypotheses.iter().zip(references) {
        let hyp = tokenizer.tokenize(h.as_ref());
        let rf = tokenizer.tokenize(r.as_ref());
        hyp_length += hyp.len();
        ref_length += rf.len();
        for n in 1..=MAX_ORDER {
            let ref_counts = ngram_counts(&rf, n);
            for (gram, count) in ngram_counts(&hyp, n) {
                let clip = ref_counts.get(gram).copied().unwrap_or(0);
                matches[n - 1] += count.min(clip);
            }
            totals[n - 1] += hyp.len().saturating_sub(n - 1) as u64;
        }
    }

    let mut precisions = [0.0; MAX_ORDER];
    for n in 0..MAX_ORDER {
        precisions[n] = match (matches[n], smoothing) {
            (0, Smoothing::AddOneOnZero) => 1.0 / (totals[n] + 1) as f64,
            (0, Smoothing::None) => 0.0,
            (m, _) => m as f64 / totals[n] as f64,
        };
    }

    let brevity_penalty = if hyp_length >= ref_length {
        1.0
    } else if hyp_length == 0 {
        0.0
    } else {
        (1.0 - ref_length as f64 / hyp_length as f64).exp()
    };

    let empty_hypotheses = hyp_length == 0;
    if empty_hypotheses {
        log::warn!("all hypotheses are empty; BLEU is 0");
    }
    let bleu = if empty_hypotheses || precisions.contains(&0.0) {
        0.0
    } else {
        let log_mean = precisions.iter().map(|p| p.ln()).sum::<f64>() / MAX_ORDER as f64;
        100.0 * brevity_penalty * log_mean.exp()
    };

    Ok(BleuReport {
        bleu,
        precisions,
        brevity_penalty,
        hyp_length,
        ref_length,
        matches,
        totals,
        empty_hypotheses,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_match() {
        let texts = ["the cat sat on the mat", "a quick brown fox jumps"];
        let r = corpus_bleu(&texts, &texts, Smoothing::None).unwrap();
        assert_eq!(r.bleu, 100.0);
        assert_eq!(r.brevity_penalty, 1.0);
        assert_eq!(r.precisions, [1.0; 4]);
    }

    #[test]
    fn missing_four_gram_zeroes_the_score() {
        let r = corpus_bleu(
            &["the cat is on the mat"],
            &["the cat sat on the mat"],
            Smoothing::None,
        )
        .unwrap();
        assert_eq!(r.matches, [5, 3, 1, 0]);
        assert_eq!(r.totals, [6, 5, 4, 3]);
        assert_eq!(r.precisions[0], 5.0 / 6.0);
        assert_eq!(r.precisions[1], 3.0 / 5.0);
        assert_eq!(r.precisions[2], 1.0 / 4.0);
        assert_eq!(r.precisions[3], 0.0);
        assert_eq!(r.bleu, 0.0);
    }

    #[test]
    fn add_one_smoothing_rescues_the_zero_order() {
        let r = corpus_bleu(
            &["the cat is on the mat"],
            &["the cat sat on the mat"],
            Smoothing::AddOneOnZero,
        )
        .unwrap();
        assert_eq!(r.precisions[3], 0.25);
        // (5/6 · 3/5 · 1/4 · 1/4)^(1/4) = (1/32)^(1/4)
        let expected = 100.0 * (1.0f64 / 32.0).powf(0.25);
        assert!((r.bleu - expected).abs() < 1e-9, "{}", r.bleu);
    }

    #[test]
    fn brevity_penalty_case() {
        let r = corpus_bleu(&["a b c d e"], &["a b c d e f"], Smoothing::None).unwrap();
        assert_eq!(r.precisions, [1.0; 4]);
        assert!((r.brevity_penalty - (1.0f64 - 6.0 / 5.0).exp()).abs() < 1e-12);
        assert!((r.bleu - 81.87).abs() < 0.01, "{}", r.bleu);
    }

    #[test]
    fn errors_and_degenerate_input() {
        assert!(matches!(
            corpus_bleu(&["a"], &["a", "b"], Smoothing::None),
            Err(Error::LengthMismatch { hyps: 1, refs: 2 })
        ));
        let empty: [&str; 0] = [];
        assert!(corpus_bleu(&empty, &empty, Smoothing::None).is_err());
        let r = corpus_bleu(&["", " "], &["a b", "c"], Smoothing::AddOneOnZero).unwrap();
        assert!(r.empty_hypotheses);
        assert_eq!(r.bleu, 0.0);
    }
}
