use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use paraug::concat::{concat_augment, TranslatorSpec};
use paraug::corpus::{
    corpus_bytes, load_corpus, shuffle_corpus, validate_corpus, CorpusFormat, LanguageTag,
    ParallelCorpus,
};
use paraug::sweep::{
    expected_count, load_table, parse_table, run_sweep, sha256_hex, verify_against_table,
    CellStatus, ExperimentManifest, SweepConfig, Technique, BUILTIN_TABLE, MANIFEST_FILE,
};
use paraug::switchout::{
    augment_switchout, OutLangVocab, PerturbSides, SwitchoutSpec, DEFAULT_TOKEN_RATE,
};
use paraug::tokenize::{build_vocab, SamplingMode, Vocabulary};
use paraug::{corpus_bleu, ConcatSpec, Rate, Side, Smoothing};
use serde_json::json;

#[derive(Parser)]
#[command(
    name = "paraug",
    version,
    about = "Deterministic parallel-corpus augmentation for low-resource MT"
)]
struct Cli {
    /// Worker threads (default: all cores). Outputs do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write an augmented corpus.
    #[command(subcommand)]
    Augment(Augment),
    /// Run a rate × seed grid described by a JSON config.
    Sweep {
        #[arg(long)]
        config: PathBuf,
    },
    /// Check parallel-sample counts against the count laws.
    VerifyCounts {
        /// Sweep manifests whose inputs and runs should be checked too.
        #[arg(long)]
        manifest: Vec<PathBuf>,
        /// Count table (pair, technique, rate, samples). Defaults to the bundled table.
        #[arg(long)]
        table: Option<PathBuf>,
        /// Print the full report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Corpus BLEU of a hypothesis file against a reference file, one sentence per line.
    Bleu {
        #[arg(long)]
        hyp: PathBuf,
        #[arg(long = "ref")]
        reference: PathBuf,
        /// Add-one smoothing for orders without matches.
        #[arg(long)]
        smooth: bool,
    },
    /// Export one side's vocabulary as token<TAB>count lines.
    BuildVocab {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long, value_enum)]
        side: SideArg,
        #[arg(long)]
        output: PathBuf,
    },
    /// Write a seeded permutation of a corpus.
    Shuffle {
        #[command(flatten)]
        input: InputArgs,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Report empty, duplicate and oversized records as JSON.
    Validate {
        #[command(flatten)]
        input: InputArgs,
    },
}

#[derive(Subcommand)]
enum Augment {
    /// Append ⌊p·N⌋ switched-out copies.
    Switchout {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long, value_enum)]
        mode: ModeArg,
        #[arg(long)]
        rate: Rate,
        #[arg(long, default_value_t = DEFAULT_TOKEN_RATE)]
        token_rate: f64,
        #[arg(long)]
        seed: u64,
        /// External out-lang vocabulary (token<TAB>count). Defaults to the paired side.
        #[arg(long, requires = "out_vocab_lang")]
        out_vocab: Option<PathBuf>,
        #[arg(long)]
        out_vocab_lang: Option<LanguageTag>,
        #[arg(long, value_enum, default_value = "both")]
        sides: SidesArg,
        #[arg(long, value_enum, default_value = "uniform")]
        sampling: SamplingArg,
    },
    /// Append a back-translated copy and ⌊p·N⌋ concatenated pairs.
    ConcatBt {
        #[command(flatten)]
        io: IoArgs,
        #[arg(long)]
        rate: Rate,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value = " ")]
        separator: String,
        /// identity, lexicon:FILE or command:"PROG ARGS"
        #[arg(long)]
        translator: TranslatorSpec,
    },
}

#[derive(Args)]
struct InputArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "tsv")]
    format: FormatArg,
    /// Required unless the input has a .meta.json sidecar.
    #[arg(long, requires = "tgt_lang")]
    src_lang: Option<LanguageTag>,
    #[arg(long, requires = "src_lang")]
    tgt_lang: Option<LanguageTag>,
}

impl InputArgs {
    fn load(&self) -> Result<ParallelCorpus> {
        let langs = self.src_lang.clone().zip(self.tgt_lang.clone());
        load_corpus(&self.input, self.format.into(), langs)
            .with_context(|| format!("loading {}", self.input.display()))
    }
}

#[derive(Args)]
struct IoArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    output: PathBuf,
    /// Defaults to the input format.
    #[arg(long, value_enum)]
    output_format: Option<FormatArg>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Tsv,
    Jsonl,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Tsv => CorpusFormat::Tsv,
            FormatArg::Jsonl => CorpusFormat::Jsonl,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    In,
    Out,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Source,
    Target,
}

#[derive(Clone, Copy, ValueEnum)]
enum SidesArg {
    Both,
    Source,
    Target,
}

#[derive(Clone, Copy, ValueEnum)]
enum SamplingArg {
    Uniform,
    Frequency,
}

fn write_output(corpus: &ParallelCorpus, io: &IoArgs) -> Result<String> {
    let format: CorpusFormat = io.output_format.unwrap_or(io.input.format).into();
    let bytes = corpus_bytes(corpus, format)?;
    fs::write(&io.output, &bytes).with_context(|| format!("writing {}", io.output.display()))?;
    let mut meta = io.output.as_os_str().to_owned();
    meta.push(".meta.json");
    let sidecar = json!({ "src_lang": corpus.src_lang, "tgt_lang": corpus.tgt_lang });
    fs::write(PathBuf::from(meta), serde_json::to_vec(&sidecar)?)?;
    Ok(sha256_hex(&bytes))
}

fn augment(cmd: Augment) -> Result<()> {
    match cmd {
        Augment::Switchout {
            io,
            mode,
            rate,
            token_rate,
            seed,
            out_vocab,
            out_vocab_lang,
            sides,
            sampling,
        } => {
            let corpus = io.input.load()?;
            let src_vocab = build_vocab(&corpus, Side::Source)?;
            let tgt_vocab = build_vocab(&corpus, Side::Target)?;
            let mut spec = match mode {
                ModeArg::In => SwitchoutSpec::in_lang(rate, seed),
                ModeArg::Out => {
                    let vocab = match (out_vocab, out_vocab_lang) {
                        (Some(path), Some(lang)) => OutLangVocab::External(
                            Vocabulary::load(&path, lang)
                                .with_context(|| format!("loading {}", path.display()))?,
                        ),
                        _ => OutLangVocab::Paired,
                    };
                    SwitchoutSpec::out_lang(rate, seed, vocab)
                }
            };
            spec.token_rate = token_rate;
            spec.sides = match sides {
                SidesArg::Both => PerturbSides::Both,
                SidesArg::Source => PerturbSides::Source,
                SidesArg::Target => PerturbSides::Target,
            };
            spec.sampling = match sampling {
                SamplingArg::Uniform => SamplingMode::Uniform,
                SamplingArg::Frequency => SamplingMode::Frequency,
            };
            let out = augment_switchout(&corpus, &spec, &src_vocab, &tgt_vocab)?;
            let technique = match mode {
                ModeArg::In => Technique::SwitchoutIn,
                ModeArg::Out => Technique::SwitchoutOut,
            };
            let checksum = write_output(&out.corpus, &io)?;
            let summary = json!({
                "technique": technique,
                "input_records": corpus.len(),
                "records": out.corpus.len(),
                "expected": expected_count(corpus.len(), technique.law(), rate),
                "checksum": checksum,
                "switchout": out.stats,
            });
            println!("{summary}");
        }
        Augment::ConcatBt {
            io,
            rate,
            seed,
            separator,
            translator,
        } => {
            let translator = translator.build()?;
            let corpus = io.input.load()?;
            let spec = ConcatSpec::new(rate, seed).with_separator(separator);
            let out = concat_augment(&corpus, &spec, translator.as_ref())?;
            let checksum = write_output(&out.corpus, &io)?;
            let summary = json!({
                "technique": Technique::ConcatBt,
                "translator": translator.name(),
                "input_records": corpus.len(),
                "records": out.corpus.len(),
                "expected": expected_count(corpus.len(), Technique::ConcatBt.law(), rate),
                "checksum": checksum,
            });
            println!("{summary}");
        }
    }
    Ok(())
}

fn verify_counts(manifests: &[PathBuf], table: Option<&Path>, as_json: bool) -> Result<bool> {
    let manifests = manifests
        .iter()
        .map(|p| {
            // accept a sweep output directory as well as the manifest file
            let p = if p.is_dir() {
                p.join(MANIFEST_FILE)
            } else {
                p.clone()
            };
            ExperimentManifest::load(&p).with_context(|| format!("loading {}", p.display()))
        })
        .collect::<Result<Vec<_>>>()?;
    let cells = match table {
        Some(path) => load_table(path).with_context(|| format!("loading {}", path.display()))?,
        None => parse_table(BUILTIN_TABLE)?,
    };
    let report = verify_against_table(&manifests, &cells)?;
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        for c in &report.cells {
            let status = match c.status {
                CellStatus::Match => "match",
                CellStatus::KnownDeviation => "known-deviation",
                CellStatus::Mismatch => "MISMATCH",
            };
            let technique = serde_json::to_value(c.technique)?;
            println!(
                "{:<16} {}\t{}\t{}%\tprinted {}\tlaw {}\tdelta {:+}",
                status,
                c.pair,
                technique.as_str().unwrap_or_default(),
                c.rate_percent,
                c.printed,
                c.law,
                c.delta
            );
        }
        println!(
            "{} cells: {} match, {} known deviations, {} mismatches",
            report.cells.len(),
            report.matches,
            report.known_deviations,
            report.mismatches
        );
    }
    Ok(report.success())
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(str::to_owned).collect())
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Augment(cmd) => augment(cmd)?,
        Command::Sweep { config } => {
            let config = SweepConfig::load(&config)
                .with_context(|| format!("loading {}", config.display()))?;
            let manifest = run_sweep(&config)?;
            for r in &manifest.runs {
                println!("{}\t{}\t{}", r.output, r.records, r.checksum);
            }
            println!(
                "manifest: {}",
                config.output_dir.join(MANIFEST_FILE).display()
            );
        }
        Command::VerifyCounts {
            manifest,
            table,
            json,
        } => {
            if !verify_counts(&manifest, table.as_deref(), json)? {
                return Ok(ExitCode::FAILURE);
            }
        }
        Command::Bleu {
            hyp,
            reference,
            smooth,
        } => {
            let smoothing = if smooth {
                Smoothing::AddOneOnZero
            } else {
                Smoothing::None
            };
            let report = corpus_bleu(&read_lines(&hyp)?, &read_lines(&reference)?, smoothing)?;
            println!("{}", serde_json::to_string(&report)?);
        }
        Command::BuildVocab {
            input,
            side,
            output,
        } => {
            let corpus = input.load()?;
            let side = match side {
                SideArg::Source => Side::Source,
                SideArg::Target => Side::Target,
            };
            let vocab = build_vocab(&corpus, side)?;
            vocab.save(&output)?;
            println!(
                "{}",
                json!({ "lang": vocab.lang(), "types": vocab.len(), "tokens": vocab.total() })
            );
        }
        Command::Shuffle {
            input,
            seed,
            output,
        } => {
            let corpus = shuffle_corpus(&input.load()?, seed);
            let io = IoArgs {
                input,
                output,
                output_format: None,
            };
            write_output(&corpus, &io)?;
        }
        Command::Validate { input } => {
            let report = validate_corpus(&input.load()?);
            println!("{}", serde_json::to_string(&report)?);
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
