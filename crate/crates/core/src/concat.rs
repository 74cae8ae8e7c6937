//! Sentence concatenation with back-translation.
//!
//! Output layout for an input of `N` records at rate `p`:
//!
//! ```text
//! [0, N)          original records
//! [N, 2N)         back-translated copy: (translate(target_i), target_i)
//! [2N, 2N + K)    K = ⌊p·N⌋ concatenations (src_i ⊕ sep ⊕ bt_src_j, tgt_i ⊕ sep ⊕ tgt_j)
//! ```
//!
//! `i` runs over the seeded shuffle order of the corpus and `j` over a second,
//! independently seeded order, both without replacement.

use std::collections::HashMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};
use std::str::FromStr;
use std::thread;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{shuffled_indices_for, ParallelCorpus, Provenance, SentencePair};
use crate::error::{Error, Result};
use crate::rate::Rate;
use crate::seed::Purpose;
use crate::tokenize::{PunctSplitTokenizer, Token, Tokenizer};

pub const DEFAULT_SEPARATOR: &str = " ";

/// Translates target-language text into the source language.
pub trait BackTranslator: Send + Sync {
    /// Recorded in manifests.
    fn name(&self) -> String;

    fn translate(&self, text: &str) -> std::result::Result<String, String>;

    /// Translates every text, preserving order. The default runs
    /// `translate` on the rayon pool.
    fn translate_all(&self, texts: &[&str]) -> Result<Vec<String>> {
        texts
            .par_iter()
            .enumerate()
            .map(|(index, t)| {
                self.translate(t)
                    .map_err(|message| Error::Translation { index, message })
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityTranslator;

impl BackTranslator for IdentityTranslator {
    fn name(&self) -> String {
        "identity".into()
    }

    fn translate(&self, text: &str) -> std::result::Result<String, String> {
        Ok(text.to_owned())
    }
}

/// Token-by-token dictionary lookup; unknown tokens pass through.
#[derive(Debug, Clone)]
pub struct LexiconTranslator {
    origin: String,
    entries: HashMap<String, String>,
}

impl LexiconTranslator {
    pub fn new(origin: impl Into<String>, entries: HashMap<String, String>) -> Self {
        LexiconTranslator {
            origin: origin.into(),
            entries,
        }
    }

    /// Reads `target_word<TAB>source_word` lines. Blank lines are ignored.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut entries = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let (from, to) = line.split_once('\t').ok_or_else(|| Error::Malformed {
                path: path.to_owned(),
                line: i + 1,
                message: "expected two tab-separated columns".into(),
            })?;
            entries.insert(from.trim().to_owned(), to.trim().to_owned());
        }
        Ok(LexiconTranslator::new(path.display().to_string(), entries))
    }
}

impl BackTranslator for LexiconTranslator {
    fn name(&self) -> String {
        format!("lexicon:{}", self.origin)
    }

    fn translate(&self, text: &str) -> std::result::Result<String, String> {
        let tokenizer = PunctSplitTokenizer;
        let mapped: Vec<Token> = tokenizer
            .tokenize(text)
            .into_iter()
            .flat_map(|t| match self.entries.get(t.as_str()) {
                Some(to) => tokenizer.tokenize(to),
                None => vec![t],
            })
            .collect();
        Ok(tokenizer.detokenize(&mapped))
    }
}

/// Spawns an external program speaking a line protocol: one sentence per
/// line on stdin, exactly one translated line per input on stdout.
#[derive(Debug, Clone)]
pub struct CommandTranslator {
    program: String,
    args: Vec<String>,
}

impl CommandTranslator {
    /// Splits `command` on whitespace into program and arguments.
    pub fn parse(command: &str) -> Result<Self> {
        let mut parts = command.split_whitespace().map(str::to_owned);
        let program = parts
            .next()
            .ok_or_else(|| Error::InvalidSpec("empty translator command".into()))?;
        Ok(CommandTranslator {
            program,
            args: parts.collect(),
        })
    }

    fn command_line(&self) -> String {
        std::iter::once(self.program.as_str())
            .chain(self.args.iter().map(String::as_str))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl BackTranslator for CommandTranslator {
    fn name(&self) -> String {
        format!("command:{}", self.command_line())
    }

    fn translate(&self, text: &str) -> std::result::Result<String, String> {
        let mut out = self.translate_all(&[text]).map_err(|e| e.to_string())?;
        Ok(out.remove(0))
    }

    fn translate_all(&self, texts: &[&str]) -> Result<Vec<String>> {
        let proto_err = |index: usize, message: String| Error::Translation { index, message };
        if let Some(index) = texts.iter().position(|t| t.contains(['\n', '\r'])) {
            return Err(proto_err(index, "text contains a line break".into()));
        }
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::inherit())
            .spawn()
            .map_err(|e| proto_err(0, format!("cannot start {}: {e}", self.program)))?;

        let mut stdin = child.stdin.take().expect("piped stdin");
        let stdout = child.stdout.take().expect("piped stdout");
        let payload: Vec<String> = texts.iter().map(|t| (*t).to_owned()).collect();
        // writer on its own thread so a chatty child cannot deadlock on a full pipe
        let writer = thread::spawn(move || -> std::io::Result<()> {
            for t in &payload {
                stdin.write_all(t.as_bytes())?;
                stdin.write_all(b"\n")?;
            }
            stdin.flush()
        });

        let mut out = Vec::with_capacity(texts.len());
        for line in BufReader::new(stdout).lines() {
            let line =
                line.map_err(|e| proto_err(out.len(), format!("reading translator output: {e}")))?;
            out.push(line.strip_suffix('\r').map(str::to_owned).unwrap_or(line));
        }
        let status = child
            .wait()
            .map_err(|e| proto_err(0, format!("waiting for translator: {e}")))?;
        let write_result = writer.join().expect("writer thread panicked");
        if !status.success() {
            return Err(proto_err(
                out.len().min(texts.len().saturating_sub(1)),
                format!("translator exited with {status}"),
            ));
        }
        if let Err(e) = write_result {
            return Err(proto_err(out.len(), format!("writing to translator: {e}")));
        }
        if out.len() != texts.len() {
            let index = out.len().min(texts.len());
            return Err(proto_err(
                index,
                format!(
                    "translator returned {} lines for {} inputs",
                    out.len(),
                    texts.len()
                ),
            ));
        }
        Ok(out)
    }
}

/// Translator selection as written on the command line and in sweep configs:
/// `identity`, `lexicon:FILE` or `command:PROG ARGS`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TranslatorSpec {
    Identity,
    Lexicon(PathBuf),
    Command(String),
}

impl TranslatorSpec {
    pub fn build(&self) -> Result<Box<dyn BackTranslator>> {
        Ok(match self {
            TranslatorSpec::Identity => Box::new(IdentityTranslator),
            TranslatorSpec::Lexicon(path) => Box::new(LexiconTranslator::load(path)?),
            TranslatorSpec::Command(cmd) => Box::new(CommandTranslator::parse(cmd)?),
        })
    }
}

impl FromStr for TranslatorSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if s == "identity" {
            return Ok(TranslatorSpec::Identity);
        }
        if let Some(path) = s.strip_prefix("lexicon:") {
            return Ok(TranslatorSpec::Lexicon(PathBuf::from(path)));
        }
        if let Some(cmd) = s.strip_prefix("command:") {
            CommandTranslator::parse(cmd)?;
            return Ok(TranslatorSpec::Command(cmd.to_owned()));
        }
        Err(Error::InvalidSpec(format!(
            "unknown translator {s:?}: expected identity, lexicon:FILE or command:\"PROG ARGS\""
        )))
    }
}

impl TryFrom<String> for TranslatorSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<TranslatorSpec> for String {
    fn from(t: TranslatorSpec) -> String {
        match t {
            TranslatorSpec::Identity => "identity".into(),
            TranslatorSpec::Lexicon(p) => format!("lexicon:{}", p.display()),
            TranslatorSpec::Command(c) => format!("command:{c}"),
        }
    }
}

/// `(translate(target_i), target_i)` for every record, in order.
pub fn back_translate_corpus(
    corpus: &ParallelCorpus,
    translator: &dyn BackTranslator,
) -> Result<ParallelCorpus> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let targets: Vec<&str> = corpus.pairs.iter().map(|p| p.target.as_str()).collect();
    let sources = translator.translate_all(&targets)?;
    if sources.len() != targets.len() {
        return Err(Error::Translation {
            index: sources.len().min(targets.len()),
            message: format!(
                "{} translations for {} inputs",
                sources.len(),
                targets.len()
            ),
        });
    }
    let pairs = sources
        .into_iter()
        .zip(&corpus.pairs)
        .enumerate()
        .map(|(index, (src, pair))| {
            if src.trim().is_empty() && !pair.target.trim().is_empty() {
                return Err(Error::Translation {
                    index,
                    message: "empty translation".into(),
                });
            }
            Ok(SentencePair::with_provenance(
                src,
                pair.target.clone(),
                Provenance::BackTranslated,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(corpus.with_pairs(pairs))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcatSpec {
    pub rate: Rate,
    pub seed: u64,
    pub separator: String,
}

impl ConcatSpec {
    pub fn new(rate: Rate, seed: u64) -> Self {
        ConcatSpec {
            rate,
            seed,
            separator: DEFAULT_SEPARATOR.to_owned(),
        }
    }

    pub fn with_separator(mut self, separator: impl Into<String>) -> Self {
        self.separator = separator.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.separator.is_empty() {
            return Err(Error::InvalidSpec("separator is empty".into()));
        }
        let line_break = |c: char| {
            matches!(
                c,
                '\n' | '\r' | '\u{0b}' | '\u{0c}' | '\u{85}' | '\u{2028}' | '\u{2029}'
            )
        };
        if self.separator.contains(line_break) {
            return Err(Error::InvalidSpec("separator contains a line break".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ConcatOutput {
    pub corpus: ParallelCorpus,
    /// `(i, j)` for each concatenated record: original index `i`, back-translated index `j`.
    pub pairings: Vec<(usize, usize)>,
}

/// Seeded `(original, back-translated)` index pairs.
pub fn pairing(n: usize, k: usize, seed: u64) -> Vec<(usize, usize)> {
    let left = shuffled_indices_for(n, seed, Purpose::Shuffle);
    let right = shuffled_indices_for(n, seed, Purpose::PairRight);
    // k ≤ n because rates never exceed 1
    left.into_iter().zip(right).take(k).collect()
}

pub fn concat_augment(
    corpus: &ParallelCorpus,
    spec: &ConcatSpec,
    translator: &dyn BackTranslator,
) -> Result<ConcatOutput> {
    spec.validate()?;
    corpus.ensure_augmentable()?;
    let bt = back_translate_corpus(corpus, translator)?;
    concat_with_back_translation(corpus, &bt, spec)
}

/// Assembles the output from a precomputed back-translated copy, so one
/// translation pass can serve many `(rate, seed)` runs.
pub fn concat_with_back_translation(
    corpus: &ParallelCorpus,
    back_translated: &ParallelCorpus,
    spec: &ConcatSpec,
) -> Result<ConcatOutput> {
    spec.validate()?;
    corpus.ensure_augmentable()?;
    let n = corpus.len();
    if back_translated.len() != n {
        return Err(Error::InvalidSpec(format!(
            "back-translated copy has {} records, corpus has {n}",
            back_translated.len()
        )));
    }
    let k = spec.rate.floor_of(n);
    let pairings = pairing(n, k, spec.seed);
    let sep = &spec.separator;

    let mut pairs = Vec::with_capacity(2 * n + k);
    pairs.extend_from_slice(&corpus.pairs);
    pairs.extend_from_slice(&back_translated.pairs);
    pairs.extend(pairings.iter().map(|&(i, j)| {
        let (orig, bt) = (&corpus.pairs[i], &back_translated.pairs[j]);
        SentencePair::with_provenance(
            format!("{}{sep}{}", orig.source, bt.source),
            format!("{}{sep}{}", orig.target, bt.target),
            Provenance::Concatenated,
        )
    }));
    Ok(ConcatOutput {
        corpus: corpus.with_pairs(pairs),
        pairings,
    })
}
