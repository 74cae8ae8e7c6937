//! Parallel corpora: types, TSV/JSONL persistence, seeded shuffling and
//! validation.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{self, Purpose};

/// Short lowercase language code such as `en`, `hau` or `fr`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct LanguageTag(String);

impl LanguageTag {
    pub fn new(code: &str) -> Result<Self> {
        let ok = (2..=3).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_lowercase());
        if ok {
            Ok(LanguageTag(code.to_owned()))
        } else {
            Err(Error::InvalidLanguageTag(code.to_owned()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LanguageTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for LanguageTag {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        LanguageTag::new(s)
    }
}

impl TryFrom<String> for LanguageTag {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        LanguageTag::new(&s)
    }
}

impl From<LanguageTag> for String {
    fn from(tag: LanguageTag) -> String {
        tag.0
    }
}

/// Where a record came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    #[default]
    Original,
    BackTranslated,
    Concatenated,
    SwitchedOut,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SentencePair {
    pub source: String,
    pub target: String,
    pub provenance: Provenance,
}

impl SentencePair {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Self::with_provenance(source, target, Provenance::Original)
    }

    pub fn with_provenance(
        source: impl Into<String>,
        target: impl Into<String>,
        provenance: Provenance,
    ) -> Self {
        SentencePair {
            source: source.into(),
            target: target.into(),
            provenance,
        }
    }

    /// Both sides non-empty after trimming.
    pub fn is_well_formed(&self) -> bool {
        !self.source.trim().is_empty() && !self.target.trim().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Source,
    Target,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Source => "source",
            Side::Target => "target",
        }
    }

    pub fn text(self, pair: &SentencePair) -> &str {
        match self {
            Side::Source => &pair.source,
            Side::Target => &pair.target,
        }
    }
}

impl FromStr for Side {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "source" | "src" => Ok(Side::Source),
            "target" | "tgt" => Ok(Side::Target),
            _ => Err(Error::InvalidSpec(format!("unknown side {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParallelCorpus {
    pub src_lang: LanguageTag,
    pub tgt_lang: LanguageTag,
    pub pairs: Vec<SentencePair>,
}

impl ParallelCorpus {
    pub fn new(
        src_lang: LanguageTag,
        tgt_lang: LanguageTag,
        pairs: Vec<SentencePair>,
    ) -> Result<Self> {
        if src_lang == tgt_lang {
            return Err(Error::SameLanguage(src_lang.0));
        }
        Ok(ParallelCorpus {
            src_lang,
            tgt_lang,
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `"en-hau"` style label.
    pub fn pair_label(&self) -> String {
        format!("{}-{}", self.src_lang, self.tgt_lang)
    }

    pub fn lang(&self, side: Side) -> &LanguageTag {
        match side {
            Side::Source => &self.src_lang,
            Side::Target => &self.tgt_lang,
        }
    }

    /// Same language tags, different records.
    pub fn with_pairs(&self, pairs: Vec<SentencePair>) -> ParallelCorpus {
        ParallelCorpus {
            src_lang: self.src_lang.clone(),
            tgt_lang: self.tgt_lang.clone(),
            pairs,
        }
    }

    /// Rejects corpora an augmenter cannot work on.
    pub fn ensure_augmentable(&self) -> Result<()> {
        if self.pairs.is_empty() {
            return Err(Error::EmptyCorpus);
        }
        for (index, pair) in self.pairs.iter().enumerate() {
            if pair.source.trim().is_empty() {
                return Err(Error::EmptySide {
                    index,
                    side: "source",
                });
            }
            if pair.target.trim().is_empty() {
                return Err(Error::EmptySide {
                    index,
                    side: "target",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    Tsv,
    Jsonl,
}

impl CorpusFormat {
    pub fn extension(self) -> &'static str {
        match self {
            CorpusFormat::Tsv => "tsv",
            CorpusFormat::Jsonl => "jsonl",
        }
    }
}

impl FromStr for CorpusFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tsv" => Ok(CorpusFormat::Tsv),
            "jsonl" => Ok(CorpusFormat::Jsonl),
            _ => Err(Error::InvalidSpec(format!("unknown corpus format {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct JsonRecord {
    src: String,
    tgt: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    provenance: Option<Provenance>,
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    src_lang: LanguageTag,
    tgt_lang: LanguageTag,
}

/// `corpus.tsv` → `corpus.tsv.meta.json`.
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".meta.json");
    PathBuf::from(name)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LoadStats {
    pub records: usize,
    pub blank_lines: usize,
}

/// Loads a corpus. Language tags come from `langs` when given, otherwise from
/// the `.meta.json` sidecar next to `path`.
pub fn load_corpus(
    path: &Path,
    format: CorpusFormat,
    langs: Option<(LanguageTag, LanguageTag)>,
) -> Result<ParallelCorpus> {
    load_corpus_with_stats(path, format, langs).map(|(corpus, _)| corpus)
}

pub fn load_corpus_with_stats(
    path: &Path,
    format: CorpusFormat,
    langs: Option<(LanguageTag, LanguageTag)>,
) -> Result<(ParallelCorpus, LoadStats)> {
    let (src_lang, tgt_lang) = match langs {
        Some(langs) => langs,
        None => {
            let meta = sidecar_path(path);
            if !meta.exists() {
                return Err(Error::MissingLanguageTags(path.to_owned()));
            }
            let file = File::open(&meta).map_err(|e| Error::io(&meta, e))?;
            let sidecar: Sidecar = serde_json::from_reader(BufReader::new(file))?;
            (sidecar.src_lang, sidecar.tgt_lang)
        }
    };
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let (pairs, stats) = read_pairs(BufReader::new(file), format, path)?;
    if stats.blank_lines > 0 {
        log::warn!(
            "{}: skipped {} blank lines",
            path.display(),
            stats.blank_lines
        );
    }
    Ok((ParallelCorpus::new(src_lang, tgt_lang, pairs)?, stats))
}

/// Parses records from any reader; `origin` is only used in error messages.
pub fn read_pairs<R: BufRead>(
    reader: R,
    format: CorpusFormat,
    origin: &Path,
) -> Result<(Vec<SentencePair>, LoadStats)> {
    let mut pairs = Vec::new();
    let mut stats = LoadStats::default();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| match e.kind() {
            std::io::ErrorKind::InvalidData => Error::Malformed {
                path: origin.to_owned(),
                line: lineno,
                message: "invalid UTF-8".into(),
            },
            _ => Error::io(origin, e),
        })?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        if line.trim().is_empty() {
            stats.blank_lines += 1;
            continue;
        }
        let malformed = |message: String| Error::Malformed {
            path: origin.to_owned(),
            line: lineno,
            message,
        };
        let pair = match format {
            CorpusFormat::Tsv => {
                let cols: Vec<&str> = line.split('\t').collect();
                if cols.len() != 2 {
                    return Err(malformed(format!(
                        "expected 2 tab-separated columns, found {}",
                        cols.len()
                    )));
                }
                SentencePair::new(cols[0], cols[1])
            }
            CorpusFormat::Jsonl => {
                let rec: JsonRecord =
                    serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
                SentencePair::with_provenance(rec.src, rec.tgt, rec.provenance.unwrap_or_default())
            }
        };
        pairs.push(pair);
    }
    stats.records = pairs.len();
    if pairs.is_empty() {
        return Err(Error::NoRecords(origin.to_owned()));
    }
    Ok((pairs, stats))
}

/// Serializes the records exactly as `save_corpus` writes them.
pub fn write_pairs<W: Write>(mut w: W, pairs: &[SentencePair], format: CorpusFormat) -> Result<()> {
    let io = |e| Error::io("<output>", e);
    for (index, pair) in pairs.iter().enumerate() {
        match format {
            CorpusFormat::Tsv => {
                for text in [&pair.source, &pair.target] {
                    if text.contains('\t') {
                        return Err(Error::TabInTsv { index });
                    }
                    if text.contains(['\n', '\r']) {
                        return Err(Error::NewlineInTsv { index });
                    }
                }
                writeln!(w, "{}\t{}", pair.source, pair.target).map_err(io)?;
            }
            CorpusFormat::Jsonl => {
                let rec = JsonRecord {
                    src: pair.source.clone(),
                    tgt: pair.target.clone(),
                    provenance: Some(pair.provenance),
                };
                serde_json::to_writer(&mut w, &rec)?;
                w.write_all(b"\n").map_err(io)?;
            }
        }
    }
    w.flush().map_err(io)
}

pub fn corpus_bytes(corpus: &ParallelCorpus, format: CorpusFormat) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_pairs(&mut buf, &corpus.pairs, format)?;
    Ok(buf)
}

/// Writes the corpus and its language sidecar. Nothing is written if the
/// records cannot be represented in `format`.
pub fn save_corpus(corpus: &ParallelCorpus, path: &Path, format: CorpusFormat) -> Result<()> {
    let bytes = corpus_bytes(corpus, format)?;
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(&bytes).map_err(|e| Error::io(path, e))?;
    w.flush().map_err(|e| Error::io(path, e))?;
    let meta = sidecar_path(path);
    let sidecar = Sidecar {
        src_lang: corpus.src_lang.clone(),
        tgt_lang: corpus.tgt_lang.clone(),
    };
    std::fs::write(&meta, serde_json::to_vec(&sidecar)?).map_err(|e| Error::io(&meta, e))
}

/// Seeded permutation of `0..n`.
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    shuffled_indices_for(n, seed, Purpose::Shuffle)
}

pub(crate) fn shuffled_indices_for(n: usize, seed: u64, purpose: Purpose) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = seed::stream(seed, purpose, n as u64);
    order.shuffle(&mut rng);
    order
}

pub fn shuffle_corpus(corpus: &ParallelCorpus, seed: u64) -> ParallelCorpus {
    let pairs = shuffled_indices(corpus.len(), seed)
        .into_iter()
        .map(|i| corpus.pairs[i].clone())
        .collect();
    corpus.with_pairs(pairs)
}

pub const DEFAULT_MAX_CHARS: usize = 1000;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub records: usize,
    /// Records with a side that is empty after trimming.
    pub empty: Vec<usize>,
    /// Later occurrences of an exact (source, target) pair seen before.
    pub duplicates: Vec<usize>,
    /// Records with a side longer than the character limit.
    pub oversized: Vec<usize>,
}

impl ValidationReport {
    pub fn violations(&self) -> usize {
        self.empty.len() + self.duplicates.len() + self.oversized.len()
    }

    pub fn is_clean(&self) -> bool {
        self.violations() == 0
    }
}

pub fn validate_corpus(corpus: &ParallelCorpus) -> ValidationReport {
    validate_corpus_with_limit(corpus, DEFAULT_MAX_CHARS)
}

pub fn validate_corpus_with_limit(corpus: &ParallelCorpus, max_chars: usize) -> ValidationReport {
    let mut report = ValidationReport {
        records: corpus.len(),
        ..Default::default()
    };
    let mut seen: HashMap<(&str, &str), usize> = HashMap::new();
    for (i, pair) in corpus.pairs.iter().enumerate() {
        if !pair.is_well_formed() {
            report.empty.push(i);
        }
        if pair.source.chars().count() > max_chars || pair.target.chars().count() > max_chars {
            report.oversized.push(i);
        }
        if seen.insert((&pair.source, &pair.target), i).is_some() {
            report.duplicates.push(i);
        }
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tag(s: &str) -> LanguageTag {
        LanguageTag::new(s).unwrap()
    }

    fn corpus(pairs: &[(&str, &str)]) -> ParallelCorpus {
        ParallelCorpus::new(
            tag("en"),
            tag("hau"),
            pairs
                .iter()
                .map(|(s, t)| SentencePair::new(*s, *t))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn language_tags() {
        for ok in ["en", "hau", "fr", "wol"] {
            assert!(LanguageTag::new(ok).is_ok());
        }
        for bad in ["", "e", "engl", "EN", "e1", "é"] {
            assert!(LanguageTag::new(bad).is_err(), "{bad:?}");
        }
        assert!(ParallelCorpus::new(tag("en"), tag("en"), vec![]).is_err());
    }

    #[test]
    fn tsv_skips_blank_lines() {
        let text = "a\tx\n\nb\ty\nc\tz\n";
        let (pairs, stats) =
            read_pairs(text.as_bytes(), CorpusFormat::Tsv, Path::new("t")).unwrap();
        assert_eq!(pairs.len(), 3);
        assert_eq!(stats.blank_lines, 1);
        assert!(pairs.iter().all(|p| p.provenance == Provenance::Original));
    }

    #[test]
    fn malformed_line_is_named() {
        let text = "a\tx\nb\n";
        let err = read_pairs(text.as_bytes(), CorpusFormat::Tsv, Path::new("t")).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
        let text = "{\"src\":\"a\",\"tgt\":\"b\"}\n{\"src\":\"a\"}\n";
        let err = read_pairs(text.as_bytes(), CorpusFormat::Jsonl, Path::new("t")).unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err}");
    }

    #[test]
    fn empty_input_has_no_records() {
        let err = read_pairs("".as_bytes(), CorpusFormat::Tsv, Path::new("t")).unwrap_err();
        assert_eq!(err.to_string(), "t: no records");
        let err = read_pairs("\n \n".as_bytes(), CorpusFormat::Jsonl, Path::new("t")).unwrap_err();
        assert!(matches!(err, Error::NoRecords(_)));
    }

    #[test]
    fn tab_in_tsv_is_rejected() {
        let c = corpus(&[("ok", "ok"), ("bad\tsource", "x")]);
        let err = corpus_bytes(&c, CorpusFormat::Tsv).unwrap_err();
        assert!(matches!(err, Error::TabInTsv { index: 1 }));
        assert!(err.to_string().contains("jsonl"));
        assert!(corpus_bytes(&c, CorpusFormat::Jsonl).is_ok());
    }

    #[test]
    fn shuffle_singleton_and_determinism() {
        let one = corpus(&[("a", "b")]);
        assert_eq!(shuffle_corpus(&one, 99), one);
        let rows: Vec<(String, String)> = (0..100)
            .map(|i| (format!("s{i}"), format!("t{i}")))
            .collect();
        let refs: Vec<(&str, &str)> = rows.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        let c = corpus(&refs);
        assert_eq!(shuffle_corpus(&c, 1), shuffle_corpus(&c, 1));
        assert_ne!(shuffle_corpus(&c, 1), shuffle_corpus(&c, 2));
    }

    #[test]
    fn validation_flags_indices() {
        let clean: Vec<(String, String)> = (0..10)
            .map(|i| (format!("s{i}"), format!("t{i}")))
            .collect();
        let refs: Vec<(&str, &str)> = clean
            .iter()
            .map(|(a, b)| (a.as_str(), b.as_str()))
            .collect();
        assert!(validate_corpus(&corpus(&refs)).is_clean());

        let r = validate_corpus(&corpus(&[("a", "x"), ("b", "  "), ("c", "z")]));
        assert_eq!(r.empty, vec![1]);
        assert_eq!(r.violations(), 1);

        let r = validate_corpus(&corpus(&[("a", "x"), ("b", "y"), ("a", "x")]));
        assert_eq!(r.duplicates, vec![2]);
        assert_eq!(r.duplicates.len(), 1);

        let long = "w".repeat(11);
        let r = validate_corpus_with_limit(&corpus(&[("a", "x"), (&long, "y")]), 10);
        assert_eq!(r.oversized, vec![1]);
    }
}
