//! Command line interface for quotation speaker and addressee
//! identification in novels.
//!
//! Exit codes: 0 success, 2 configuration problem (bad flags, bad config
//! file, missing credentials), 3 data problem (unreadable or inconsistent
//! corpus, guideline violations, malformed predictions), 4 backend failure
//! (transport or model errors during prediction, including partial ones).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use colloquy_core::backend::{
    exemplar_from_segment, Backend, CommandModel, LlmBackend, LlmClientConfig, Mode, Prediction,
    ReplayModel, RuleBackend, Seq2SeqBackend, TemplateSet,
};
use colloquy_core::corpus::{
    build_segments, corpus_stats, load_corpus, save_canonical, split_corpus, validate_guidelines,
    Corpus, Dialect, ImportOptions, Segment, SplitRatios, WindowSpec,
};
use colloquy_core::eval::{
    cohens_kappa, diff_report, pairwise_f1, render_diff, score, AddresseePolicy, EvalReport,
};
use colloquy_core::network::{build_network, NetworkOptions, Smoothing};
use colloquy_core::prompt::PromptTemplate;
use colloquy_core::text::Lang;

#[derive(Debug)]
enum CliError {
    Config(String),
    Data(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) | CliError::Data(m) => f.write_str(m),
        }
    }
}

fn config_err(e: impl fmt::Display) -> CliError {
    CliError::Config(e.to_string())
}

fn data_err(e: impl fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

#[derive(Parser)]
#[command(
    name = "colloquy",
    version,
    about = "Speaker and addressee identification for quoted dialogue in novels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Convert a corpus into the canonical directory layout.
    Import(ImportArgs),
    /// Check a corpus against the annotation guidelines.
    Validate(ValidateArgs),
    /// Print occurrence statistics for the annotated elements.
    Stats(StatsArgs),
    /// Split a corpus into train/dev/test subdirectories.
    Split(SplitArgs),
    /// Run an identification backend and write predictions.
    Predict(PredictArgs),
    /// Score predictions against gold annotations.
    Eval(EvalArgs),
    /// Inter-annotator agreement between two annotation files.
    Iaa(IaaArgs),
    /// Build and export the character dialogue network.
    Network(NetworkArgs),
    /// List every disagreement between predictions and gold annotations.
    Report(ReportArgs),
    /// Export prompt/answer training pairs for fine-tuning.
    ExportTraining(ExportTrainingArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DialectArg {
    Canonical,
    Riqua,
    Jyq,
}

impl From<DialectArg> for Dialect {
    fn from(value: DialectArg) -> Self {
        match value {
            DialectArg::Canonical => Dialect::Canonical,
            DialectArg::Riqua => Dialect::Riqua,
            DialectArg::Jyq => Dialect::Jyq,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum OutputFormat {
    #[default]
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BackendKind {
    Rule,
    Llm,
    Seq2seq,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum GraphFormat {
    #[default]
    Dot,
    Graphml,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
enum SmoothingArg {
    #[default]
    Log1p,
    None,
}

impl From<SmoothingArg> for Smoothing {
    fn from(value: SmoothingArg) -> Self {
        match value {
            SmoothingArg::Log1p => Smoothing::Log1p,
            SmoothingArg::None => Smoothing::None,
        }
    }
}

/// `sent[:BEFORE:AFTER]` or `token[:BEFORE:AFTER]`.
fn parse_window(s: &str) -> Result<WindowSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let usage = "window must be sent[:BEFORE:AFTER] or token[:BEFORE:AFTER]";
    let pair = |b: &str, a: &str| -> Result<(usize, usize), String> {
        let before = b.parse().map_err(|_| usage.to_string())?;
        let after = a.parse().map_err(|_| usage.to_string())?;
        Ok((before, after))
    };
    match parts.as_slice() {
        ["sent"] => Ok(WindowSpec::SENTENCE_DEFAULT),
        ["token"] => Ok(WindowSpec::TOKEN_DEFAULT),
        ["sent", b, a] => pair(b, a).map(|(before, after)| WindowSpec::Sentence { before, after }),
        ["token", b, a] => pair(b, a).map(|(before, after)| WindowSpec::Token { before, after }),
        _ => Err(usage.to_string()),
    }
}

/// `TRAIN:DEV:TEST` as positive weights, normalized to sum 1 (so `8:1:1`
/// and `0.8:0.1:0.1` are the same split).
fn parse_ratios(s: &str) -> Result<SplitRatios, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [train, dev, test] = parts.as_slice() else {
        return Err("ratios must be TRAIN:DEV:TEST".to_string());
    };
    let parse = |p: &str| p.trim().parse::<f64>().map_err(|_| "ratios must be numbers".to_string());
    let (train, dev, test) = (parse(train)?, parse(dev)?, parse(test)?);
    let sum = train + dev + test;
    if sum.is_nan() || sum <= 0.0 {
        return Err("ratios must be positive".to_string());
    }
    SplitRatios::new(train / sum, dev / sum, test / sum).map_err(|e| e.to_string())
}

#[derive(Args)]
struct ImportArgs {
    /// Directory holding the source corpus files.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum)]
    dialect: DialectArg,
    /// Directory to write the canonical corpus into.
    #[arg(long)]
    output: PathBuf,
    /// Drop cue spans during conversion.
    #[arg(long)]
    drop_cues: bool,
    /// Keep source records that name no addressee.
    #[arg(long)]
    keep_missing_addressees: bool,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
struct StatsArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
struct SplitArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Directory receiving train/, dev/, and test/ subdirectories.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_parser = parse_ratios, default_value = "8:1:1")]
    ratios: SplitRatios,
    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Args)]
struct PredictArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum)]
    backend: BackendKind,
    /// Predictions file (JSONL); failures become error records.
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_parser = parse_window, default_value = "sent:5:5")]
    window: WindowSpec,
    /// Client settings TOML, required for the llm backend.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Recorded generations JSONL; selects the replay model.
    #[arg(long)]
    replay: Option<PathBuf>,
    /// Program run as the model, reading stdin and writing stdout.
    #[arg(long)]
    model_command: Option<String>,
    /// Extra argument for --model-command (repeatable; leading hyphens
    /// pass through).
    #[arg(long = "model-arg", allow_hyphen_values = true)]
    model_args: Vec<String>,
    /// Input truncation for seq2seq models, in surface tokens (0 = off).
    #[arg(long, default_value_t = 512)]
    max_text_length: usize,
    /// Number of few-shot exemplars taken from --exemplar-corpus.
    #[arg(long, default_value_t = 0)]
    few_shot: usize,
    /// Corpus supplying few-shot exemplars (its first segments are used).
    #[arg(long)]
    exemplar_corpus: Option<PathBuf>,
    /// Prompt template TOML replacing the built-in for its language
    /// (repeatable).
    #[arg(long)]
    template: Vec<PathBuf>,
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, value_parser = parse_window, default_value = "sent:5:5")]
    window: WindowSpec,
    /// Require the full gold addressee set instead of a non-empty subset.
    #[arg(long)]
    strict: bool,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
struct IaaArgs {
    /// Reference annotator's file (JSONL of record_id/speaker/addressees;
    /// prediction files are accepted as-is).
    #[arg(long = "a")]
    annotations_a: PathBuf,
    /// Second annotator's file.
    #[arg(long = "b")]
    annotations_b: PathBuf,
    #[arg(long, value_enum, default_value_t)]
    format: OutputFormat,
}

#[derive(Args)]
struct NetworkArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t)]
    format: GraphFormat,
    /// Characters retained, ranked by quotations spoken.
    #[arg(long, default_value_t = 10)]
    top_k: usize,
    #[arg(long, value_enum, default_value_t)]
    smoothing: SmoothingArg,
    /// Restrict to one novel's quotations.
    #[arg(long)]
    novel: Option<String>,
}

#[derive(Args)]
struct ReportArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long)]
    predictions: PathBuf,
    #[arg(long, value_parser = parse_window, default_value = "sent:5:5")]
    window: WindowSpec,
    #[arg(long)]
    strict: bool,
    /// Output file; stdout when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ExportTrainingArgs {
    #[arg(long)]
    corpus: PathBuf,
    /// Training pairs file (JSONL of prompt/target).
    #[arg(long)]
    output: PathBuf,
    #[arg(long, value_parser = parse_window, default_value = "sent:5:5")]
    window: WindowSpec,
    /// Hyperparameter preset to write alongside the pairs.
    #[arg(long, value_enum)]
    preset: Option<PresetArg>,
    /// Where to write the preset as JSON; stdout when omitted.
    #[arg(long)]
    train_config: Option<PathBuf>,
    #[arg(long)]
    template: Vec<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PresetArg {
    RiquaT5,
    JyqPromptclue,
}

fn main() -> ExitCode {
    reset_sigpipe();
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

// The Rust runtime ignores SIGPIPE, which turns every print into a
// potential panic once a downstream `head` or `less` closes the pipe.
// Restore the default so the process dies quietly like other line tools.
#[cfg(unix)]
fn reset_sigpipe() {
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
}

#[cfg(not(unix))]
fn reset_sigpipe() {}

fn run(command: Command) -> Result<u8, CliError> {
    match command {
        Command::Import(args) => cmd_import(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Stats(args) => cmd_stats(args),
        Command::Split(args) => cmd_split(args),
        Command::Predict(args) => cmd_predict(args),
        Command::Eval(args) => cmd_eval(args),
        Command::Iaa(args) => cmd_iaa(args),
        Command::Network(args) => cmd_network(args),
        Command::Report(args) => cmd_report(args),
        Command::ExportTraining(args) => cmd_export_training(args),
    }
}

fn load_canonical(dir: &Path) -> Result<Corpus, CliError> {
    load_corpus(dir, Dialect::Canonical, &ImportOptions::default()).map_err(data_err)
}

fn segments_for(corpus: &Corpus, window: &WindowSpec) -> Result<Vec<Segment>, CliError> {
    build_segments(corpus, window).map_err(data_err)
}

fn template_set(paths: &[PathBuf]) -> Result<TemplateSet, CliError> {
    let mut set = TemplateSet::default();
    for path in paths {
        let template = PromptTemplate::load(path).map_err(config_err)?;
        match template.lang {
            Lang::Zh => set.zh = template,
            Lang::En => set.en = template,
        }
    }
    Ok(set)
}

fn write_text(path: Option<&Path>, content: &str) -> Result<(), CliError> {
    match path {
        Some(path) => fs::write(path, content)
            .map_err(|e| data_err(format!("writing {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn cmd_import(args: ImportArgs) -> Result<u8, CliError> {
    let options = ImportOptions {
        drop_cues: args.drop_cues,
        keep_missing_addressees: args.keep_missing_addressees,
    };
    let corpus = load_corpus(&args.input, args.dialect.into(), &options).map_err(data_err)?;
    save_canonical(&corpus, &args.output).map_err(data_err)?;
    println!(
        "imported {} quotations, {} novels, {} characters into {}",
        corpus.len(),
        corpus.novels().count(),
        corpus.roster().len(),
        args.output.display()
    );
    Ok(0)
}

fn cmd_validate(args: ValidateArgs) -> Result<u8, CliError> {
    let corpus = load_canonical(&args.corpus)?;
    let violations = validate_guidelines(&corpus);
    match args.format {
        OutputFormat::Text => {
            for v in &violations {
                println!("{}\t{}\t{}", v.record_id, v.rule, v.message);
            }
            if violations.is_empty() {
                println!("no violations in {} records", corpus.len());
            } else {
                println!("{} violations in {} records", violations.len(), corpus.len());
            }
        }
        OutputFormat::Json => {
            let items: Vec<serde_json::Value> = violations
                .iter()
                .map(|v| {
                    serde_json::json!({
                        "record_id": v.record_id,
                        "rule": v.rule.as_str(),
                        "message": v.message,
                    })
                })
                .collect();
            println!("{}", serde_json::to_string_pretty(&items).expect("violations serialize"));
        }
    }
    Ok(if violations.is_empty() { 0 } else { 3 })
}

fn cmd_stats(args: StatsArgs) -> Result<u8, CliError> {
    let corpus = load_canonical(&args.corpus)?;
    let stats = corpus_stats(&corpus).map_err(data_err)?;
    match args.format {
        OutputFormat::Text => {
            let row = |name: &str, present: usize, rate: f64| {
                println!("{name:<10} {present:>8} ({:.2}%)", rate * 100.0);
            };
            println!("quotations {:>8}", stats.total);
            row("speaker", stats.speaker.present, stats.speaker.rate);
            row("addressee", stats.addressee.present, stats.addressee.rate);
            row("cue", stats.cue.present, stats.cue.rate);
            row("mode", stats.mode.present, stats.mode.rate);
        }
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&stats).expect("stats serialize"));
        }
    }
    Ok(0)
}

fn cmd_split(args: SplitArgs) -> Result<u8, CliError> {
    let corpus = load_canonical(&args.corpus)?;
    let split = split_corpus(&corpus, &args.ratios, args.seed).map_err(data_err)?;
    for (name, part) in [
        ("train", &split.train),
        ("dev", &split.dev),
        ("test", &split.test),
    ] {
        save_canonical(part, &args.output.join(name)).map_err(data_err)?;
        println!("{name}: {} records", part.len());
    }
    Ok(0)
}

fn build_backend(args: &PredictArgs) -> Result<Box<dyn Backend>, CliError> {
    let templates = template_set(&args.template)?;
    match args.backend {
        BackendKind::Rule => Ok(Box::new(RuleBackend::new())),
        BackendKind::Llm => {
            let Some(config_path) = &args.config else {
                return Err(CliError::Config(
                    "the llm backend needs --config pointing at a client settings TOML".into(),
                ));
            };
            let raw = fs::read_to_string(config_path)
                .map_err(|e| config_err(format!("reading {}: {e}", config_path.display())))?;
            let config: LlmClientConfig = toml::from_str(&raw)
                .map_err(|e| config_err(format!("{}: {e}", config_path.display())))?;
            if config.endpoint.is_empty() {
                return Err(CliError::Config(format!(
                    "{}: endpoint must not be empty",
                    config_path.display()
                )));
            }
            if let Some(env) = &config.api_key_env {
                if std::env::var(env).is_err() {
                    return Err(CliError::Config(format!(
                        "environment variable {env} named by api_key_env is not set"
                    )));
                }
            }
            Ok(Box::new(LlmBackend::new(config).with_templates(templates)))
        }
        BackendKind::Seq2seq => {
            let backend: Box<dyn Backend> = match (&args.replay, &args.model_command) {
                (Some(replay), None) => {
                    let model = ReplayModel::from_jsonl(replay).map_err(data_err)?;
                    Box::new(
                        Seq2SeqBackend::new(model)
                            .with_templates(templates)
                            .with_max_text_length(args.max_text_length),
                    )
                }
                (None, Some(command)) => {
                    let model = CommandModel::new(command.clone(), args.model_args.clone());
                    Box::new(
                        Seq2SeqBackend::new(model)
                            .with_templates(templates)
                            .with_max_text_length(args.max_text_length),
                    )
                }
                _ => {
                    return Err(CliError::Config(
                        "the seq2seq backend needs exactly one of --replay or --model-command"
                            .into(),
                    ))
                }
            };
            Ok(backend)
        }
    }
}

fn cmd_predict(args: PredictArgs) -> Result<u8, CliError> {
    let corpus = load_canonical(&args.corpus)?;
    let segments = segments_for(&corpus, &args.window)?;

    let mode = if args.few_shot == 0 {
        Mode::ZeroShot
    } else {
        let Some(dir) = &args.exemplar_corpus else {
            return Err(CliError::Config(
                "--few-shot needs --exemplar-corpus to draw exemplars from".into(),
            ));
        };
        let exemplar_corpus = load_canonical(dir)?;
        let exemplar_segments = segments_for(&exemplar_corpus, &args.window)?;
        if exemplar_segments.len() < args.few_shot {
            return Err(CliError::Config(format!(
                "--few-shot {} asks for more exemplars than {} provides ({})",
                args.few_shot,
                dir.display(),
                exemplar_segments.len()
            )));
        }
        Mode::FewShot(
            exemplar_segments[..args.few_shot]
                .iter()
                .map(exemplar_from_segment)
                .collect(),
        )
    };

    let backend = build_backend(&args)?;
    let results = backend.identify_batch(&segments, &mode);

    let file = fs::File::create(&args.output)
        .map_err(|e| data_err(format!("writing {}: {e}", args.output.display())))?;
    let mut out = BufWriter::new(file);
    let mut failures = 0usize;
    for result in &results {
        let line = match result {
            Ok(prediction) => {
                serde_json::to_string(prediction).expect("prediction serializes")
            }
            Err(e) => {
                failures += 1;
                serde_json::json!({
                    "segment_id": e.segment_id,
                    "error": e.to_string(),
                })
                .to_string()
            }
        };
        writeln!(out, "{line}").map_err(|e| data_err(format!("writing {}: {e}", args.output.display())))?;
    }
    out.flush()
        .map_err(|e| data_err(format!("writing {}: {e}", args.output.display())))?;

    println!(
        "{}: {} predictions, {} failures -> {}",
        backend.name(),
        results.len() - failures,
        failures,
        args.output.display()
    );
    Ok(if failures == 0 { 0 } else { 4 })
}

/// Read a predictions file. Error records (lines carrying an `error`
/// field) count as absent predictions and are reported to stderr.
fn read_predictions(path: &Path) -> Result<Vec<Prediction>, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| data_err(format!("reading {}: {e}", path.display())))?;
    let mut predictions = Vec::new();
    let mut error_records = 0usize;
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| data_err(format!("reading {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let value: serde_json::Value = serde_json::from_str(&line)
            .map_err(|e| data_err(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if value.get("error").is_some() {
            error_records += 1;
            continue;
        }
        let prediction: Prediction = serde_json::from_value(value)
            .map_err(|e| data_err(format!("{}:{}: {e}", path.display(), i + 1)))?;
        predictions.push(prediction);
    }
    if error_records > 0 {
        eprintln!("{error_records} error records in {} score as missing", path.display());
    }
    Ok(predictions)
}

fn policy_for(strict: bool) -> AddresseePolicy {
    if strict {
        AddresseePolicy::Strict
    } else {
        AddresseePolicy::Lenient
    }
}

fn scored_report(
    corpus_dir: &Path,
    predictions_path: &Path,
    window: &WindowSpec,
    strict: bool,
) -> Result<(Vec<Segment>, Vec<Prediction>, EvalReport), CliError> {
    let corpus = load_canonical(corpus_dir)?;
    let segments = segments_for(&corpus, window)?;
    let predictions = read_predictions(predictions_path)?;
    let report = score(&segments, &predictions, policy_for(strict)).map_err(data_err)?;
    Ok((segments, predictions, report))
}

fn cmd_eval(args: EvalArgs) -> Result<u8, CliError> {
    let (_, _, report) = scored_report(&args.corpus, &args.predictions, &args.window, args.strict)?;
    match args.format {
        OutputFormat::Text => {
            println!("overall: {}", report.overall.summary());
            for (novel, tally) in &report.per_novel {
                println!("{novel}: {}", tally.summary());
            }
        }
        OutputFormat::Json => {
            println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
        }
    }
    Ok(0)
}

#[derive(Deserialize)]
struct AnnotationRecord {
    // Prediction files key rows by segment_id, so two backend runs can
    // be compared without rewriting them.
    #[serde(alias = "segment_id")]
    record_id: String,
    speaker: String,
    #[serde(default)]
    addressees: Vec<String>,
}

fn read_annotations(path: &Path) -> Result<BTreeMap<String, AnnotationRecord>, CliError> {
    let file = fs::File::open(path)
        .map_err(|e| data_err(format!("reading {}: {e}", path.display())))?;
    let mut records = BTreeMap::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| data_err(format!("reading {}: {e}", path.display())))?;
        if line.trim().is_empty() {
            continue;
        }
        let record: AnnotationRecord = serde_json::from_str(&line)
            .map_err(|e| data_err(format!("{}:{}: {e}", path.display(), i + 1)))?;
        if records.insert(record.record_id.clone(), record).is_some() {
            return Err(data_err(format!(
                "{}:{}: duplicate record id",
                path.display(),
                i + 1
            )));
        }
    }
    Ok(records)
}

fn cmd_iaa(args: IaaArgs) -> Result<u8, CliError> {
    let a = read_annotations(&args.annotations_a)?;
    let b = read_annotations(&args.annotations_b)?;
    let ids_a: BTreeSet<&String> = a.keys().collect();
    let ids_b: BTreeSet<&String> = b.keys().collect();
    if ids_a != ids_b {
        let missing = ids_a.symmetric_difference(&ids_b).next();
        return Err(data_err(format!(
            "annotation files cover different records (e.g. '{}')",
            missing.map_or("", |s| s.as_str())
        )));
    }

    let mut speakers_a = Vec::new();
    let mut speakers_b = Vec::new();
    let mut addressees_a: Vec<BTreeSet<String>> = Vec::new();
    let mut addressees_b: Vec<BTreeSet<String>> = Vec::new();
    let mut addressee_labels_a = Vec::new();
    let mut addressee_labels_b = Vec::new();
    for (id, annotation_a) in &a {
        let annotation_b = &b[id];
        speakers_a.push(annotation_a.speaker.clone());
        speakers_b.push(annotation_b.speaker.clone());
        let set_a: BTreeSet<String> = annotation_a.addressees.iter().cloned().collect();
        let set_b: BTreeSet<String> = annotation_b.addressees.iter().cloned().collect();
        addressee_labels_a.push(set_a.iter().cloned().collect::<Vec<_>>().join("|"));
        addressee_labels_b.push(set_b.iter().cloned().collect::<Vec<_>>().join("|"));
        addressees_a.push(set_a);
        addressees_b.push(set_b);
    }

    let speaker_kappa = cohens_kappa(&speakers_a, &speakers_b).map_err(data_err)?;
    let addressee_kappa =
        cohens_kappa(&addressee_labels_a, &addressee_labels_b).map_err(data_err)?;
    let addressee_f1 = pairwise_f1(&addressees_a, &addressees_b).map_err(data_err)?;

    match args.format {
        OutputFormat::Text => {
            println!("records: {}", a.len());
            println!("speaker kappa: {speaker_kappa:.4}");
            println!("addressee kappa: {addressee_kappa:.4}");
            println!("addressee f1 (a as reference): {addressee_f1:.4}");
        }
        OutputFormat::Json => {
            let value = serde_json::json!({
                "records": a.len(),
                "speaker_kappa": speaker_kappa,
                "addressee_kappa": addressee_kappa,
                "addressee_f1": addressee_f1,
            });
            println!("{}", serde_json::to_string_pretty(&value).expect("iaa serializes"));
        }
    }
    Ok(0)
}

fn cmd_network(args: NetworkArgs) -> Result<u8, CliError> {
    let mut corpus = load_canonical(&args.corpus)?;
    if let Some(novel_id) = &args.novel {
        if corpus.novel(novel_id).is_none() {
            return Err(data_err(format!("novel '{novel_id}' is not in the corpus")));
        }
        let keep: BTreeSet<String> = corpus
            .quotations()
            .iter()
            .filter(|q| &q.novel_id == novel_id)
            .map(|q| q.id.clone())
            .collect();
        corpus = corpus.filtered(&keep);
    }
    let options = NetworkOptions {
        top_k: args.top_k,
        smoothing: args.smoothing.into(),
    };
    let network = build_network(&corpus, &options);
    let rendered = match args.format {
        GraphFormat::Dot => network.to_dot(),
        GraphFormat::Graphml => network.to_graphml(),
        GraphFormat::Json => {
            let mut json = network.to_json();
            json.push('\n');
            json
        }
    };
    write_text(args.output.as_deref(), &rendered)?;
    Ok(0)
}

fn cmd_report(args: ReportArgs) -> Result<u8, CliError> {
    let corpus = load_canonical(&args.corpus)?;
    let segments = segments_for(&corpus, &args.window)?;
    let predictions = read_predictions(&args.predictions)?;
    let entries =
        diff_report(&segments, &predictions, policy_for(args.strict)).map_err(data_err)?;
    let mut rendered = render_diff(&entries);
    rendered.push_str(&format!(
        "{} disagreements in {} segments\n",
        entries.len(),
        segments.len()
    ));
    write_text(args.output.as_deref(), &rendered)?;
    Ok(0)
}

fn cmd_export_training(args: ExportTrainingArgs) -> Result<u8, CliError> {
    use colloquy_core::backend::{training_pairs, write_training_jsonl, TrainConfig};

    // Reject inconsistent flags before anything is written to disk.
    if args.preset.is_none() && args.train_config.is_some() {
        return Err(CliError::Config(
            "--train-config needs --preset to choose the hyperparameters".into(),
        ));
    }

    let corpus = load_canonical(&args.corpus)?;
    let segments = segments_for(&corpus, &args.window)?;
    let templates = template_set(&args.template)?;
    let pairs = training_pairs(&segments, &templates).map_err(config_err)?;
    write_training_jsonl(&args.output, &pairs).map_err(data_err)?;
    println!("{} training pairs -> {}", pairs.len(), args.output.display());

    if let Some(preset) = args.preset {
        let config = match preset {
            PresetArg::RiquaT5 => TrainConfig::riqua_t5(),
            PresetArg::JyqPromptclue => TrainConfig::jyq_promptclue(),
        };
        let mut json =
            serde_json::to_string_pretty(&config).expect("train config serializes");
        json.push('\n');
        write_text(args.train_config.as_deref(), &json)?;
    }
    Ok(0)
}
