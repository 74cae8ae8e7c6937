mod common;

use std::fs;
use std::path::PathBuf;

use common::{indexed_corpus, synthetic_corpus, tag};
use paraug::corpus::{corpus_bytes, shuffled_indices};
use paraug::{
    load_corpus, save_corpus, shuffle_corpus, CorpusFormat, Error, ParallelCorpus, Provenance,
    SentencePair,
};
use proptest::prelude::*;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

#[test]
fn loads_en_tsn_sized_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("en-tsn.tsv");
    let c = synthetic_corpus(2100, 7, "en", "tsn");
    save_corpus(&c, &path, CorpusFormat::Tsv).unwrap();
    let back = load_corpus(&path, CorpusFormat::Tsv, Some((tag("en"), tag("tsn")))).unwrap();
    assert_eq!(back.len(), 2100);
}

#[test]
fn tsv_round_trip_at_en_swa_scale() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("en-swa.tsv");
    let c = synthetic_corpus(30782, 11, "en", "swa");
    save_corpus(&c, &path, CorpusFormat::Tsv).unwrap();
    // language tags come back from the sidecar
    let back = load_corpus(&path, CorpusFormat::Tsv, None).unwrap();
    assert_eq!(back, c);
}

#[test]
fn three_records_and_a_blank_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.tsv");
    fs::write(&path, "a b\tx y\n\nc\tz\nd e f\tw\n").unwrap();
    let c = load_corpus(&path, CorpusFormat::Tsv, Some((tag("en"), tag("yor")))).unwrap();
    assert_eq!(c.len(), 3);
    assert_eq!(c.pairs[1], SentencePair::new("c", "z"));
}

#[test]
fn empty_file_and_missing_tags() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("empty.tsv");
    fs::write(&path, "").unwrap();
    let err = load_corpus(&path, CorpusFormat::Tsv, Some((tag("en"), tag("yor")))).unwrap_err();
    assert!(err.to_string().ends_with("no records"), "{err}");

    fs::write(&path, "a\tb\n").unwrap();
    assert!(matches!(
        load_corpus(&path, CorpusFormat::Tsv, None),
        Err(Error::MissingLanguageTags(_))
    ));
    assert!(load_corpus(
        &dir.path().join("nope.tsv"),
        CorpusFormat::Tsv,
        Some((tag("en"), tag("yor")))
    )
    .is_err());
}

#[test]
fn unwritable_destination() {
    let c = indexed_corpus(3);
    let err = save_corpus(
        &c,
        &PathBuf::from("/nonexistent-dir/x.tsv"),
        CorpusFormat::Tsv,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn jsonl_keeps_provenance_and_escapes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.jsonl");
    let c = ParallelCorpus::new(
        tag("fr"),
        tag("wol"),
        vec![
            SentencePair::new("a\tb", "line\nbreak"),
            SentencePair::with_provenance("x", "y", Provenance::SwitchedOut),
            SentencePair::with_provenance("q \"uote\"", "y", Provenance::BackTranslated),
            SentencePair::with_provenance("c", "d", Provenance::Concatenated),
            SentencePair::new("é", "ñ"),
        ],
    )
    .unwrap();
    save_corpus(&c, &path, CorpusFormat::Jsonl).unwrap();
    assert_eq!(load_corpus(&path, CorpusFormat::Jsonl, None).unwrap(), c);
    let first = fs::read_to_string(&path)
        .unwrap()
        .lines()
        .next()
        .unwrap()
        .to_owned();
    assert_eq!(
        first,
        r#"{"src":"a\tb","tgt":"line\nbreak","provenance":"original"}"#
    );
}

#[test]
fn shuffle_permutations_match_golden_files() {
    let c = indexed_corpus(100);
    for seed in [1u64, 2] {
        let order = shuffled_indices(100, seed);
        let rendered: String = order.iter().map(|i| format!("{i}\n")).collect();
        let path = fixture(&format!("shuffle_100_seed{seed}.txt"));
        if std::env::var_os("PARAUG_BLESS").is_some() {
            fs::write(&path, &rendered).unwrap();
        }
        assert_eq!(fs::read_to_string(&path).unwrap(), rendered, "seed {seed}");
        let shuffled = shuffle_corpus(&c, seed);
        for (pair, &i) in shuffled.pairs.iter().zip(&order) {
            assert_eq!(pair.source, format!("s{i}"));
        }
    }
    assert_ne!(shuffled_indices(100, 1), shuffled_indices(100, 2));
}

fn text() -> impl Strategy<Value = String> {
    "[a-zA-Zàéɓƙ.,!? '-]{0,12}[a-zɓ]".prop_map(|s| s)
}

fn corpus_strategy() -> impl Strategy<Value = ParallelCorpus> {
    prop::collection::vec((text(), text()), 1..40).prop_map(|rows| {
        ParallelCorpus::new(
            tag("en"),
            tag("hau"),
            rows.into_iter()
                .map(|(s, t)| SentencePair::new(s, t))
                .collect(),
        )
        .unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn save_then_load_is_identity(c in corpus_strategy(), jsonl in any::<bool>()) {
        let format = if jsonl { CorpusFormat::Jsonl } else { CorpusFormat::Tsv };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c");
        save_corpus(&c, &path, format).unwrap();
        prop_assert_eq!(load_corpus(&path, format, None).unwrap(), c);
    }

    #[test]
    fn shuffle_is_a_seeded_permutation(n in 1usize..500, seed in any::<u64>()) {
        let c = indexed_corpus(n);
        let a = shuffle_corpus(&c, seed);
        let b = shuffle_corpus(&c, seed);
        prop_assert_eq!(corpus_bytes(&a, CorpusFormat::Jsonl).unwrap(), corpus_bytes(&b, CorpusFormat::Jsonl).unwrap());
        let mut sorted = shuffled_indices(n, seed);
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        let mut orig = c.pairs.clone();
        let mut shuf = a.pairs.clone();
        orig.sort_by(|x, y| x.source.cmp(&y.source));
        shuf.sort_by(|x, y| x.source.cmp(&y.source));
        prop_assert_eq!(orig, shuf);
    }
}
