#![allow(dead_code)]

use paraug::{LanguageTag, ParallelCorpus, SentencePair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SYLLABLES: [&str; 16] = [
    "ba", "ko", "ri", "sa", "nu", "de", "wa", "li", "mo", "te", "ga", "yi", "fe", "zu", "ha", "po",
];
const PUNCT: [&str; 4] = [",", ".", "?", "!"];

fn word(rng: &mut ChaCha8Rng, prefix: &str) -> String {
    let n = rng.random_range(1..=3);
    let mut w = prefix.to_owned();
    for _ in 0..n {
        w.push_str(SYLLABLES[rng.random_range(0..SYLLABLES.len())]);
    }
    w
}

fn sentence(rng: &mut ChaCha8Rng, prefix: &str) -> String {
    let len = rng.random_range(3..=12);
    let mut words: Vec<String> = (0..len).map(|_| word(rng, prefix)).collect();
    if rng.random_bool(0.5) {
        let last = words.last_mut().unwrap();
        last.push_str(PUNCT[rng.random_range(0..PUNCT.len())]);
    }
    words.join(" ")
}

pub fn tag(code: &str) -> LanguageTag {
    LanguageTag::new(code).unwrap()
}

/// Deterministic synthetic corpus; source and target words use distinct
/// prefixes so the two vocabularies are disjoint.
pub fn synthetic_corpus(n: usize, seed: u64, src: &str, tgt: &str) -> ParallelCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (0..n)
        .map(|_| SentencePair::new(sentence(&mut rng, "s"), sentence(&mut rng, "t")))
        .collect();
    ParallelCorpus::new(tag(src), tag(tgt), pairs).unwrap()
}

/// `s{i}` / `t{i}` records.
pub fn indexed_corpus(n: usize) -> ParallelCorpus {
    let pairs = (0..n)
        .map(|i| SentencePair::new(format!("s{i}"), format!("t{i}")))
        .collect();
    ParallelCorpus::new(tag("en"), tag("hau"), pairs).unwrap()
}
