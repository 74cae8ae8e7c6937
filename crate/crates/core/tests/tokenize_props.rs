mod common;

use common::synthetic_corpus;
use paraug::{build_vocab, detokenize, tokenize, Side};
use proptest::prelude::*;

proptest! {
    #[test]
    fn retokenizing_a_detokenized_list_is_identity(s in "\\PC{0,60}") {
        let tokens = tokenize(&s);
        prop_assert!(tokens.iter().all(|t| !t.as_str().is_empty() && !t.as_str().chars().any(char::is_whitespace)));
        prop_assert_eq!(tokenize(&detokenize(&tokens)), tokens);
    }

    #[test]
    fn vocabulary_counts_sum_to_token_total(seed in any::<u64>(), n in 1usize..60) {
        let c = synthetic_corpus(n, seed, "en", "yor");
        for side in [Side::Source, Side::Target] {
            let v = build_vocab(&c, side).unwrap();
            let total: usize = c.pairs.iter().map(|p| tokenize(side.text(p)).len()).sum();
            prop_assert_eq!(v.total() as usize, total);
            prop_assert!(v.iter().all(|(_, count)| count >= 1));
            prop_assert_eq!(&build_vocab(&c, side).unwrap(), &v);
        }
    }
}

#[test]
fn en_swa_scale_vocabulary_is_stable() {
    let c = synthetic_corpus(30782, 11, "en", "swa");
    let a = build_vocab(&c, Side::Source).unwrap();
    let b = build_vocab(&c, Side::Source).unwrap();
    assert_eq!(a.len(), b.len());
    assert_eq!(a.tokens(), b.tokens());
}
