//! Switchout augmentation.
//!
//! A switchout corpus is the original corpus followed by `⌊p·N⌋` perturbed
//! copies of records taken from the head of a seeded shuffle. Inside a
//! perturbed copy each token is replaced independently with probability
//! `token_rate`, by a different token drawn from the designated vocabulary.

use std::ops::AddAssign;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{shuffled_indices, ParallelCorpus, Provenance, SentencePair, Side};
use crate::error::{Error, Result};
use crate::rate::Rate;
use crate::seed::{self, Purpose};
use crate::tokenize::{sample_token, PunctSplitTokenizer, SamplingMode, Tokenizer, Vocabulary};

pub const DEFAULT_TOKEN_RATE: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SwitchoutMode {
    /// Replacements come from the vocabulary of the side being perturbed.
    InLang,
    /// Replacements come from another language's vocabulary.
    OutLang,
}

/// Replacement domain for out-lang switchout.
#[derive(Debug, Clone)]
pub enum OutLangVocab {
    /// The opposite side of the same corpus: the target vocabulary perturbs
    /// sources and the source vocabulary perturbs targets.
    Paired,
    /// One external vocabulary for every perturbed side.
    External(Vocabulary),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PerturbSides {
    #[default]
    Both,
    Source,
    Target,
}

impl PerturbSides {
    fn includes(self, side: Side) -> bool {
        matches!(
            (self, side),
            (PerturbSides::Both, _)
                | (PerturbSides::Source, Side::Source)
                | (PerturbSides::Target, Side::Target)
        )
    }
}

#[derive(Debug, Clone)]
pub struct SwitchoutSpec {
    pub mode: SwitchoutMode,
    /// Fraction of the corpus size added as perturbed copies.
    pub rate: Rate,
    /// Per-token replacement probability inside a perturbed copy.
    pub token_rate: f64,
    pub seed: u64,
    /// Required iff `mode` is `OutLang`.
    pub out_lang_vocab: Option<OutLangVocab>,
    pub sides: PerturbSides,
    pub sampling: SamplingMode,
}

impl SwitchoutSpec {
    pub fn in_lang(rate: Rate, seed: u64) -> Self {
        SwitchoutSpec {
            mode: SwitchoutMode::InLang,
            rate,
            token_rate: DEFAULT_TOKEN_RATE,
            seed,
            out_lang_vocab: None,
            sides: PerturbSides::Both,
            sampling: SamplingMode::Uniform,
        }
    }

    pub fn out_lang(rate: Rate, seed: u64, vocab: OutLangVocab) -> Self {
        SwitchoutSpec {
            mode: SwitchoutMode::OutLang,
            out_lang_vocab: Some(vocab),
            ..SwitchoutSpec::in_lang(rate, seed)
        }
    }

    pub fn with_token_rate(mut self, token_rate: f64) -> Self {
        self.token_rate = token_rate;
        self
    }

    /// Resolves the replacement vocabulary for each side.
    pub fn domains<'a>(
        &'a self,
        src_vocab: &'a Vocabulary,
        tgt_vocab: &'a Vocabulary,
    ) -> Result<(&'a Vocabulary, &'a Vocabulary)> {
        if !(0.0..=1.0).contains(&self.token_rate) {
            return Err(Error::InvalidSpec(format!(
                "token rate {} is outside [0, 1]",
                self.token_rate
            )));
        }
        match (self.mode, &self.out_lang_vocab) {
            (SwitchoutMode::InLang, _) => Ok((src_vocab, tgt_vocab)),
            (SwitchoutMode::OutLang, None) => Err(Error::InvalidSpec(
                "out-lang switchout needs an out-lang vocabulary".into(),
            )),
            (SwitchoutMode::OutLang, Some(OutLangVocab::Paired)) => {
                if src_vocab.lang() == tgt_vocab.lang() {
                    return Err(Error::SameLanguage(src_vocab.lang().to_string()));
                }
                Ok((tgt_vocab, src_vocab))
            }
            (SwitchoutMode::OutLang, Some(OutLangVocab::External(v))) => {
                for (side, own) in [(Side::Source, src_vocab), (Side::Target, tgt_vocab)] {
                    if self.sides.includes(side) && v.lang() == own.lang() {
                        return Err(Error::InvalidSpec(format!(
                            "out-lang vocabulary is {}, the same language as the {} side",
                            v.lang(),
                            side.name()
                        )));
                    }
                }
                Ok((v, v))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SwitchoutStats {
    /// Tokens on perturbed sides.
    pub tokens: u64,
    pub replaced: u64,
    /// Tokens selected for replacement whose vocabulary had no alternative.
    pub skipped: u64,
}

impl SwitchoutStats {
    pub fn replaced_fraction(&self) -> f64 {
        if self.tokens == 0 {
            0.0
        } else {
            self.replaced as f64 / self.tokens as f64
        }
    }
}

impl AddAssign for SwitchoutStats {
    fn add_assign(&mut self, o: Self) {
        self.tokens += o.tokens;
        self.replaced += o.replaced;
        self.skipped += o.skipped;
    }
}

fn perturb_text<R: Rng + ?Sized>(
    tokenizer: &dyn Tokenizer,
    text: &str,
    domain: &Vocabulary,
    spec: &SwitchoutSpec,
    rng: &mut R,
    stats: &mut SwitchoutStats,
) -> String {
    let mut tokens = tokenizer.tokenize(text);
    let mut changed = false;
    for tok in tokens.iter_mut() {
        stats.tokens += 1;
        if rng.random::<f64>() >= spec.token_rate {
            continue;
        }
        match sample_token(domain, rng, Some(tok), spec.sampling) {
            Ok(new) => {
                *tok = new.clone();
                stats.replaced += 1;
                changed = true;
            }
            Err(_) => stats.skipped += 1,
        }
    }
    // untouched sides keep their original spacing
    if changed {
        tokenizer.detokenize(&tokens)
    } else {
        text.to_owned()
    }
}

/// Produces the switched-out copy of one record.
pub fn perturb_pair<R: Rng + ?Sized>(
    pair: &SentencePair,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
    spec: &SwitchoutSpec,
    rng: &mut R,
) -> Result<(SentencePair, SwitchoutStats)> {
    let (src_domain, tgt_domain) = spec.domains(src_vocab, tgt_vocab)?;
    Ok(perturb_with(
        &PunctSplitTokenizer,
        pair,
        src_domain,
        tgt_domain,
        spec,
        rng,
    ))
}

fn perturb_with<R: Rng + ?Sized>(
    tokenizer: &dyn Tokenizer,
    pair: &SentencePair,
    src_domain: &Vocabulary,
    tgt_domain: &Vocabulary,
    spec: &SwitchoutSpec,
    rng: &mut R,
) -> (SentencePair, SwitchoutStats) {
    let mut stats = SwitchoutStats::default();
    let mut side = |side: Side, domain: &Vocabulary| {
        let text = side.text(pair);
        if spec.sides.includes(side) {
            perturb_text(tokenizer, text, domain, spec, rng, &mut stats)
        } else {
            text.to_owned()
        }
    };
    let source = side(Side::Source, src_domain);
    let target = side(Side::Target, tgt_domain);
    (
        SentencePair::with_provenance(source, target, Provenance::SwitchedOut),
        stats,
    )
}

#[derive(Debug, Clone)]
pub struct SwitchoutOutput {
    pub corpus: ParallelCorpus,
    /// Input index of each perturbed record, in output order.
    pub perturbed_from: Vec<usize>,
    pub stats: SwitchoutStats,
}

pub fn augment_switchout(
    corpus: &ParallelCorpus,
    spec: &SwitchoutSpec,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
) -> Result<SwitchoutOutput> {
    augment_switchout_with(&PunctSplitTokenizer, corpus, spec, src_vocab, tgt_vocab)
}

/// Runs on the current rayon pool; output does not depend on its size.
pub fn augment_switchout_with(
    tokenizer: &dyn Tokenizer,
    corpus: &ParallelCorpus,
    spec: &SwitchoutSpec,
    src_vocab: &Vocabulary,
    tgt_vocab: &Vocabulary,
) -> Result<SwitchoutOutput> {
    corpus.ensure_augmentable()?;
    let (src_domain, tgt_domain) = spec.domains(src_vocab, tgt_vocab)?;
    let k = spec.rate.floor_of(corpus.len());
    let mut chosen = shuffled_indices(corpus.len(), spec.seed);
    chosen.truncate(k);

    let perturbed: Vec<(SentencePair, SwitchoutStats)> = chosen
        .par_iter()
        .map(|&i| {
            let mut rng = seed::stream(spec.seed, Purpose::Record, i as u64);
            perturb_with(
                tokenizer,
                &corpus.pairs[i],
                src_domain,
                tgt_domain,
                spec,
                &mut rng,
            )
        })
        .collect();

    let mut stats = SwitchoutStats::default();
    let mut pairs = Vec::with_capacity(corpus.len() + k);
    pairs.extend_from_slice(&corpus.pairs);
    for (pair, s) in perturbed {
        stats += s;
        pairs.push(pair);
    }
    Ok(SwitchoutOutput {
        corpus: corpus.with_pairs(pairs),
        perturbed_from: chosen,
        stats,
    })
}
