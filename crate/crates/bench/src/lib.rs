//! Synthetic corpora for the benchmarks.

use paraug::seed::mix64;
use paraug::{LanguageTag, ParallelCorpus, SentencePair};

const SYLLABLES: [&str; 16] = [
    "ba", "ko", "ri", "sa", "nu", "de", "wa", "li", "mo", "te", "ga", "yi", "fe", "zu", "ha", "po",
];

fn sentence(mut state: u64, prefix: char) -> String {
    let mut next = || {
        state = mix64(state);
        state
    };
    let len = 3 + next() % 20;
    let mut out = String::new();
    for w in 0..len {
        if w > 0 {
            out.push(' ');
        }
        out.push(prefix);
        for _ in 0..1 + next() % 3 {
            out.push_str(SYLLABLES[(next() % 16) as usize]);
        }
    }
    if next() % 2 == 0 {
        out.push('.');
    }
    out
}

/// `n` pairs of 3–22 word sentences over a few thousand word types per side.
pub fn corpus(n: usize, seed: u64) -> ParallelCorpus {
    let pairs = (0..n as u64)
        .map(|i| {
            let base = mix64(seed ^ i.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            SentencePair::new(sentence(base, 's'), sentence(base ^ 1, 't'))
        })
        .collect();
    ParallelCorpus::new(
        LanguageTag::new("en").unwrap(),
        LanguageTag::new("hau").unwrap(),
        pairs,
    )
    .unwrap()
}
