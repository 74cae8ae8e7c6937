//! Tokenization and per-language vocabularies.
//!
//! The default tokenizer splits on whitespace and then peels leading and
//! trailing Unicode punctuation off each chunk, one character per token.
//! Internal punctuation (`don't`, `e-mail`) stays inside the word.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::Rng;
use serde::{Deserialize, Serialize};
use unicode_general_category::{get_general_category, GeneralCategory};

use crate::corpus::{LanguageTag, ParallelCorpus, Side};
use crate::error::{Error, Result};

/// Non-empty text without whitespace.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) {
            return Err(Error::InvalidSpec(format!("invalid token {text:?}")));
        }
        Ok(Token(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for Token {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        Token::new(s)
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

impl PartialEq<str> for Token {
    fn eq(&self, other: &str) -> bool {
        self.0 == other
    }
}

impl PartialEq<&str> for Token {
    fn eq(&self, other: &&str) -> bool {
        self.0 == *other
    }
}

/// Pluggable tokenizer. Implementations must satisfy
/// `tokenize(detokenize(tokenize(s))) == tokenize(s)`.
pub trait Tokenizer: Send + Sync {
    fn tokenize(&self, text: &str) -> Vec<Token>;

    fn detokenize(&self, tokens: &[Token]) -> String {
        let mut out = String::new();
        for (i, t) in tokens.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(t.as_str());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PunctSplitTokenizer;

pub fn is_punctuation(c: char) -> bool {
    matches!(
        get_general_category(c),
        GeneralCategory::ConnectorPunctuation
            | GeneralCategory::DashPunctuation
            | GeneralCategory::OpenPunctuation
            | GeneralCategory::ClosePunctuation
            | GeneralCategory::InitialPunctuation
            | GeneralCategory::FinalPunctuation
            | GeneralCategory::OtherPunctuation
    )
}

fn push_chars(out: &mut Vec<Token>, s: &str) {
    out.extend(s.chars().map(|c| Token(c.to_string())));
}

impl Tokenizer for PunctSplitTokenizer {
    fn tokenize(&self, text: &str) -> Vec<Token> {
        let mut out = Vec::new();
        for chunk in text.split_whitespace() {
            let core = chunk.trim_start_matches(is_punctuation);
            let lead = &chunk[..chunk.len() - core.len()];
            push_chars(&mut out, lead);
            if core.is_empty() {
                continue;
            }
            let word = core.trim_end_matches(is_punctuation);
            out.push(Token(word.to_owned()));
            push_chars(&mut out, &core[word.len()..]);
        }
        out
    }
}

pub fn tokenize(text: &str) -> Vec<Token> {
    PunctSplitTokenizer.tokenize(text)
}

pub fn detokenize(tokens: &[Token]) -> String {
    PunctSplitTokenizer.detokenize(tokens)
}

/// How `sample_token` weighs token types.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SamplingMode {
    /// Every type equally likely.
    #[default]
    Uniform,
    /// Types weighted by corpus occurrence count.
    Frequency,
}

/// Token types of one language side with occurrence counts, in first
/// occurrence order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocabulary {
    lang: LanguageTag,
    tokens: Vec<Token>,
    counts: Vec<u64>,
    /// Inclusive prefix sums of `counts`.
    cumulative: Vec<u64>,
    index: HashMap<Token, usize>,
}

impl Vocabulary {
    /// Builds from `(token, count)` entries; repeated tokens are merged.
    pub fn from_counts<I>(lang: LanguageTag, entries: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Token, u64)>,
    {
        let mut tokens = Vec::new();
        let mut counts: Vec<u64> = Vec::new();
        let mut index = HashMap::new();
        for (token, count) in entries {
            if count == 0 {
                return Err(Error::InvalidSpec(format!("token {token} has count 0")));
            }
            match index.get(&token) {
                Some(&i) => counts[i] += count,
                None => {
                    index.insert(token.clone(), tokens.len());
                    tokens.push(token);
                    counts.push(count);
                }
            }
        }
        if tokens.is_empty() {
            return Err(Error::InvalidSpec("vocabulary has no entries".into()));
        }
        let cumulative = counts
            .iter()
            .scan(0u64, |acc, &c| {
                *acc += c;
                Some(*acc)
            })
            .collect();
        Ok(Vocabulary {
            lang,
            tokens,
            counts,
            cumulative,
            index,
        })
    }

    pub fn lang(&self) -> &LanguageTag {
        &self.lang
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn tokens(&self) -> &[Token] {
        &self.tokens
    }

    pub fn contains(&self, token: &Token) -> bool {
        self.index.contains_key(token)
    }

    pub fn contains_str(&self, token: &str) -> bool {
        Token::new(token).is_ok_and(|t| self.contains(&t))
    }

    pub fn count(&self, token: &Token) -> u64 {
        self.index.get(token).map_or(0, |&i| self.counts[i])
    }

    /// Sum of all occurrence counts.
    pub fn total(&self) -> u64 {
        self.cumulative.last().copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Token, u64)> {
        self.tokens.iter().zip(self.counts.iter().copied())
    }

    /// `token<TAB>count` per line, in canonical order.
    pub fn write_to<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        for (t, c) in self.iter() {
            writeln!(w, "{t}\t{c}")?;
        }
        w.flush()
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|e| Error::io(path, e))?;
        self.write_to(BufWriter::new(file))
            .map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path, lang: LanguageTag) -> Result<Self> {
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut entries = Vec::new();
        for (i, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.is_empty() {
                continue;
            }
            let malformed = |message: &str| Error::Malformed {
                path: path.to_owned(),
                line: i + 1,
                message: message.to_owned(),
            };
            let (tok, count) = line
                .split_once('\t')
                .ok_or_else(|| malformed("expected token<TAB>count"))?;
            let token = Token::new(tok).map_err(|_| malformed("invalid token"))?;
            let count: u64 = count.parse().map_err(|_| malformed("invalid count"))?;
            if count == 0 {
                return Err(malformed("count must be positive"));
            }
            entries.push((token, count));
        }
        if entries.is_empty() {
            return Err(Error::NoRecords(path.to_owned()));
        }
        Vocabulary::from_counts(lang, entries)
    }
}

pub fn build_vocab(corpus: &ParallelCorpus, side: Side) -> Result<Vocabulary> {
    build_vocab_with(&PunctSplitTokenizer, corpus, side)
}

pub fn build_vocab_with(
    tokenizer: &dyn Tokenizer,
    corpus: &ParallelCorpus,
    side: Side,
) -> Result<Vocabulary> {
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let tokens = corpus
        .pairs
        .iter()
        .flat_map(|p| tokenizer.tokenize(side.text(p)))
        .map(|t| (t, 1));
    let tokens: Vec<_> = tokens.collect();
    if tokens.is_empty() {
        return Err(Error::EmptyVocabulary(side.name()));
    }
    Vocabulary::from_counts(corpus.lang(side).clone(), tokens)
}

/// Draws a token type, never returning `exclude`.
pub fn sample_token<'v, R: Rng + ?Sized>(
    vocab: &'v Vocabulary,
    rng: &mut R,
    exclude: Option<&Token>,
    mode: SamplingMode,
) -> Result<&'v Token> {
    let excluded = exclude.and_then(|t| vocab.index.get(t).copied());
    if let Some(e) = excluded {
        if vocab.len() == 1 {
            return Err(Error::VocabularyTooSmall(vocab.tokens[e].0.clone()));
        }
    }
    let idx = match mode {
        SamplingMode::Uniform => match excluded {
            None => rng.random_range(0..vocab.len()),
            Some(e) => {
                let r = rng.random_range(0..vocab.len() - 1);
                if r >= e {
                    r + 1
                } else {
                    r
                }
            }
        },
        SamplingMode::Frequency => {
            let (skip_from, skip_len) = match excluded {
                None => (u64::MAX, 0),
                Some(e) => (vocab.cumulative[e] - vocab.counts[e], vocab.counts[e]),
            };
            let mut u = rng.random_range(0..vocab.total() - skip_len);
            if u >= skip_from {
                u += skip_len;
            }
            // first i with cumulative[i] > u
            vocab.cumulative.partition_point(|&c| c <= u)
        }
    };
    Ok(&vocab.tokens[idx])
}
