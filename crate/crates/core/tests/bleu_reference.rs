//! BLEU checked against frozen sacrebleu scores (tokenize=none,
//! smooth_method=none) and against a brute-force oracle written here.

use std::collections::BTreeMap;

use paraug::{corpus_bleu, Smoothing};
use proptest::prelude::*;
use serde::Deserialize;

#[derive(Deserialize)]
struct Case {
    hypotheses: Vec<String>,
    references: Vec<String>,
    bleu: f64,
    precisions: Vec<f64>,
    brevity_penalty: f64,
    hyp_length: usize,
    ref_length: usize,
}

#[derive(Deserialize)]
struct Fixture {
    cases: Vec<Case>,
}

fn fixture() -> Fixture {
    serde_json::from_str(include_str!("fixtures/bleu_reference.json")).unwrap()
}

/// Whitespace tokens, n-grams as joined strings.
fn oracle_bleu(hyps: &[String], refs: &[String]) -> f64 {
    let grams = |words: &[&str], n: usize| {
        let mut m: BTreeMap<String, i64> = BTreeMap::new();
        for start in 0..words.len() {
            if start + n <= words.len() {
                *m.entry(words[start..start + n].join(" ")).or_default() += 1;
            }
        }
        m
    };
    let mut hits = [0i64; 4];
    let mut tot = [0i64; 4];
    let (mut c, mut r) = (0f64, 0f64);
    for (h, rf) in hyps.iter().zip(refs) {
        let hw: Vec<&str> = h.split_whitespace().collect();
        let rw: Vec<&str> = rf.split_whitespace().collect();
        c += hw.len() as f64;
        r += rw.len() as f64;
        for n in 1..=4 {
            let rg = grams(&rw, n);
            for (g, k) in grams(&hw, n) {
                hits[n - 1] += k.min(*rg.get(&g).unwrap_or(&0));
                tot[n - 1] += k;
            }
        }
    }
    if hits.contains(&0) {
        return 0.0;
    }
    let logp: f64 = (0..4)
        .map(|i| (hits[i] as f64 / tot[i] as f64).ln())
        .sum::<f64>()
        / 4.0;
    let bp = if c > r { 1.0 } else { (1.0 - r / c).exp() };
    100.0 * bp * logp.exp()
}

#[test]
fn matches_sacrebleu_on_randomized_corpora() {
    let f = fixture();
    assert!(f.cases.len() >= 20);
    for (i, case) in f.cases.iter().enumerate() {
        let r = corpus_bleu(&case.hypotheses, &case.references, Smoothing::None).unwrap();
        assert!(
            (r.bleu - case.bleu).abs() < 0.01,
            "case {i}: {} vs {}",
            r.bleu,
            case.bleu
        );
        assert!(
            (r.brevity_penalty - case.brevity_penalty).abs() < 1e-6,
            "case {i}"
        );
        assert_eq!(
            (r.hyp_length, r.ref_length),
            (case.hyp_length, case.ref_length),
            "case {i}"
        );
        for (a, b) in r.precisions.iter().zip(&case.precisions) {
            assert!((a - b).abs() < 1e-6, "case {i}");
        }
    }
}

#[test]
fn matches_oracle_on_fixture_corpora() {
    for case in fixture().cases {
        let r = corpus_bleu(&case.hypotheses, &case.references, Smoothing::None).unwrap();
        assert!((r.bleu - oracle_bleu(&case.hypotheses, &case.references)).abs() < 1e-9);
    }
}

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(prop::sample::select(vec!["a", "b", "c", "d", "e"]), 1..10)
        .prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn agrees_with_oracle(rows in prop::collection::vec((sentence(), sentence()), 1..8)) {
        let (h, r): (Vec<String>, Vec<String>) = rows.into_iter().unzip();
        let report = corpus_bleu(&h, &r, Smoothing::None).unwrap();
        prop_assert!((report.bleu - oracle_bleu(&h, &r)).abs() < 1e-9);
        prop_assert!(report.precisions.iter().all(|&p| (0.0..=1.0).contains(&p)));
        prop_assert!(report.brevity_penalty > 0.0 && report.brevity_penalty <= 1.0);
        prop_assert!((0.0..=100.0).contains(&report.bleu));
    }

    #[test]
    fn joint_permutation_leaves_report_unchanged(
        rows in prop::collection::vec((sentence(), sentence()), 1..8),
        rot in 0usize..8,
    ) {
        let (h, r): (Vec<String>, Vec<String>) = rows.iter().cloned().unzip();
        let mut rotated = rows.clone();
        rotated.rotate_left(rot % rows.len());
        rotated.reverse();
        let (h2, r2): (Vec<String>, Vec<String>) = rotated.into_iter().unzip();
        for smoothing in [Smoothing::None, Smoothing::AddOneOnZero] {
            let a = corpus_bleu(&h, &r, smoothing).unwrap();
            let b = corpus_bleu(&h2, &r2, smoothing).unwrap();
            prop_assert_eq!(a.matches, b.matches);
            prop_assert_eq!(a.totals, b.totals);
            prop_assert!((a.bleu - b.bleu).abs() < 1e-9);
        }
    }

    #[test]
    fn dropping_a_token_never_lengthens(rows in prop::collection::vec((sentence(), sentence()), 1..6)) {
        let (mut h, r): (Vec<String>, Vec<String>) = rows.into_iter().unzip();
        let before = corpus_bleu(&h, &r, Smoothing::None).unwrap().hyp_length;
        let mut words: Vec<&str> = h[0].split(' ').collect();
        words.pop();
        h[0] = words.join(" ");
        prop_assert!(corpus_bleu(&h, &r, Smoothing::None).unwrap().hyp_length <= before);
    }
}
