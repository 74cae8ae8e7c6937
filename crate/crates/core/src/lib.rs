//! Deterministic augmentation toolkit for low-resource parallel corpora.
//!
//! * [`switchout`]: in-language and out-language token replacement,
//!   adding `⌊p·N⌋` perturbed copies to a corpus of `N` records.
//! * [`concat`]: back-translated copy plus `⌊p·N⌋` concatenated pairs.
//! * [`bleu`]: corpus BLEU for scoring downstream translations.
//! * [`sweep`]: rate × seed grids, count-law verification, manifests.
//!
//! Every random choice is drawn from a stream keyed by the user seed and the
//! record index, so outputs are byte-identical across runs and thread counts.

pub mod bleu;
pub mod concat;
pub mod corpus;
pub mod error;
pub mod rate;
pub mod seed;
pub mod sweep;
pub mod switchout;
pub mod tokenize;

pub use bleu::{corpus_bleu, BleuReport, Smoothing};
pub use concat::{
    back_translate_corpus, concat_augment, BackTranslator, CommandTranslator, ConcatOutput,
    ConcatSpec, IdentityTranslator, LexiconTranslator, TranslatorSpec,
};
pub use corpus::{
    load_corpus, save_corpus, shuffle_corpus, validate_corpus, CorpusFormat, LanguageTag,
    ParallelCorpus, Provenance, SentencePair, Side, ValidationReport,
};
pub use error::{Error, Result};
pub use rate::Rate;
pub use sweep::{
    average_metrics, expected_count, run_sweep, verify_against_table, CountLaw, ExperimentManifest,
    SweepConfig, Technique, VerificationReport,
};
pub use switchout::{augment_switchout, perturb_pair, OutLangVocab, SwitchoutMode, SwitchoutSpec};
pub use tokenize::{
    build_vocab, detokenize, sample_token, tokenize, SamplingMode, Token, Tokenizer, Vocabulary,
};
