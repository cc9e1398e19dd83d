//! `xpro`: train toy black boxes, explain predictions, evaluate and stress-test explanations.

mod config;

use std::fs;
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use xpro::blackbox::{serve_classifier, BuiltinKind, BuiltinModel, ExternalClassifier};
use xpro::eval::{
    auto_select_words, case_pairs, evaluate_instance, parse_metrics, stability_case, EvalRecord, EvalReport, Metric,
    StabilityReport, WordLists, TEMPLATES,
};
use xpro::explain::{render_html, Explainer, GeneratorFactory};
use xpro::text::{read_labeled, read_texts_lenient, Corpus, CorpusRole, TfIdfModel};
use xpro::xproa::{serve_generator, ExternalGenerator, Generator, ReferenceGenerator};
use xpro::{BlackBox, Error, Method, Result};

use config::{Knobs, RunConfig};

const EXIT_USAGE: u8 = 2;
const EXIT_NO_COUNTERFACTUALS: u8 = 3;
const EXIT_RECONSTRUCTION: u8 = 4;
const EXIT_PARTIAL: u8 = 5;

#[derive(Debug, Parser)]
#[command(name = "xpro", version, about = "Explain binary text classifiers with realistic synthetic neighborhoods")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a built-in black box on label<TAB>text data.
    Train(TrainArgs),
    /// Explain one prediction.
    Explain(ExplainArgs),
    /// Explain every text of a file and compute evaluation metrics.
    Evaluate(EvaluateArgs),
    /// Template-based stability suite.
    Stability(StabilityArgs),
    /// Serve a built-in model over the JSON-lines classifier protocol on stdio.
    #[command(hide = true)]
    ServeClassifier {
        #[arg(long)]
        model: PathBuf,
    },
    /// Serve the reference generator over the JSON-lines generator protocol on stdio.
    #[command(hide = true)]
    ServeGenerator {
        #[arg(long)]
        corpus: PathBuf,
    },
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "nb", value_parser = parse_kind)]
    kind: BuiltinKind,
    #[arg(long)]
    out: PathBuf,
    /// Held-out labeled data for an accuracy report.
    #[arg(long)]
    test: Option<PathBuf>,
}

fn parse_kind(s: &str) -> std::result::Result<BuiltinKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args)]
struct Resources {
    /// Built-in model JSON produced by `train`.
    #[arg(long, group = "blackbox")]
    model: Option<PathBuf>,
    /// Command line of an external classifier speaking the JSON-lines protocol on stdio.
    #[arg(long, group = "blackbox")]
    classifier_cmd: Option<String>,
    /// host:port of an external classifier.
    #[arg(long, group = "blackbox")]
    classifier_addr: Option<String>,
    /// Prototype/landmark corpus, one text per line (labeled TSV accepted, labels ignored).
    #[arg(long)]
    corpus: PathBuf,
    /// Use the in-memory reference generator over the corpus (xproa).
    #[arg(long, group = "generator")]
    reference_generator: bool,
    /// Command line of an external generator (xproa); one process per explanation job.
    #[arg(long, group = "generator")]
    generator_cmd: Option<String>,
    /// host:port of an external generator (xproa); one connection per explanation job.
    #[arg(long, group = "generator")]
    generator_addr: Option<String>,
}

#[derive(Debug, Args)]
struct ExplainArgs {
    #[command(flatten)]
    resources: Resources,
    #[command(flatten)]
    knobs: Knobs,
    #[arg(long)]
    text: String,
    /// Explanation JSON destination; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Saliency report destination.
    #[arg(long)]
    html: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    resources: Resources,
    #[command(flatten)]
    knobs: Knobs,
    /// Texts to explain, one per line (labeled TSV accepted, labels ignored).
    #[arg(long)]
    input: PathBuf,
    /// Comma-separated subset of r2,fidelity,confidence_drop,dpm,aopc.
    #[arg(long, default_value = "r2,fidelity,confidence_drop,dpm,aopc")]
    metrics: String,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Record per-instance runtimes (makes the report run-dependent).
    #[arg(long)]
    timings: bool,
}

#[derive(Debug, Args)]
struct StabilityArgs {
    #[command(flatten)]
    resources: Resources,
    #[command(flatten)]
    knobs: Knobs,
    /// Adjective list, one word per line; the built-in table when absent.
    #[arg(long)]
    adjectives: Option<PathBuf>,
    /// Noun list, one word per line; the built-in table when absent.
    #[arg(long)]
    nouns: Option<PathBuf>,
    /// Templates with <ADJ> and <NOUN> placeholders, one per line.
    #[arg(long)]
    templates: Option<PathBuf>,
    /// Pick words by scoring the corpus vocabulary with the black box.
    #[arg(long, conflicts_with_all = ["adjectives", "nouns"])]
    auto_words: bool,
    #[arg(long, default_value_t = 10)]
    auto_adjectives: usize,
    #[arg(long, default_value_t = 10)]
    auto_nouns: usize,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::NoCounterfactuals { .. } => EXIT_NO_COUNTERFACTUALS,
        Error::ReconstructionFailure { .. } => EXIT_RECONSTRUCTION,
        Error::Config(_) | Error::Io(_) | Error::Json(_) => EXIT_USAGE,
        _ => 1,
    }
}

fn with_path<T>(path: &Path, r: io::Result<T>) -> Result<T> {
    r.map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    with_path(path, fs::write(path, content))
}

fn read_words(path: &Path) -> Result<Vec<String>> {
    let content = with_path(path, fs::read_to_string(path))?;
    Ok(content.lines().map(str::trim).filter(|l| !l.is_empty()).map(String::from).collect())
}

fn load_blackbox(r: &Resources) -> Result<BlackBox> {
    if let Some(path) = &r.model {
        return Ok(BlackBox::new(with_path(path, BuiltinModel::load(path).map_err(io_of))?));
    }
    if let Some(cmd) = &r.classifier_cmd {
        return Ok(BlackBox::new(ExternalClassifier::spawn(cmd)?));
    }
    if let Some(addr) = &r.classifier_addr {
        return Ok(BlackBox::new(ExternalClassifier::connect(addr.as_str())?));
    }
    Err(Error::Config("one of --model, --classifier-cmd or --classifier-addr is required".into()))
}

// keeps the path in I/O messages while passing other errors through
fn io_of(e: Error) -> io::Error {
    match e {
        Error::Io(e) => e,
        other => io::Error::new(io::ErrorKind::InvalidData, other.to_string()),
    }
}

fn load_corpus(path: &Path) -> Result<Corpus> {
    let loaded = with_path(path, read_texts_lenient(path).map_err(io_of))?;
    let corpus = Corpus::from_texts(loaded.data, CorpusRole::Landmark);
    corpus.require_non_empty()?;
    Ok(corpus)
}

fn build_explainer(r: &Resources, run: &RunConfig) -> Result<Explainer> {
    let blackbox = Arc::new(load_blackbox(r)?);
    let corpus = load_corpus(&r.corpus)?;
    let explainer = Explainer::new(blackbox, corpus, run.explain.clone())?;
    let factory: Option<GeneratorFactory> = if let Some(cmd) = r.generator_cmd.clone() {
        Some(Arc::new(move || Ok(Box::new(ExternalGenerator::spawn(&cmd)?) as Box<dyn Generator>)))
    } else if let Some(addr) = r.generator_addr.clone() {
        Some(Arc::new(move || Ok(Box::new(ExternalGenerator::connect(addr.as_str())?) as Box<dyn Generator>)))
    } else {
        None
    };
    match (factory, r.reference_generator) {
        (Some(f), _) => Ok(explainer.with_generator(f)),
        (None, true) => explainer.with_reference_generator(),
        (None, false) if run.explain.engine == Method::Xproa => Err(Error::Config(
            "engine xproa needs --reference-generator, --generator-cmd or --generator-addr".into(),
        )),
        (None, false) => Ok(explainer),
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool> {
    if jobs == 0 {
        return Err(Error::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new().num_threads(jobs).build().map_err(|e| Error::Config(e.to_string()))
}

fn to_json_pretty<T: serde::Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn cmd_train(args: TrainArgs) -> Result<u8> {
    let train = with_path(&args.data, read_labeled(&args.data, CorpusRole::Train).map_err(io_of))?;
    let model = BuiltinModel::train(&train.data, args.kind)?;
    with_path(&args.out, model.save(&args.out).map_err(io_of))?;
    println!("train accuracy {:.4} on {} records", model.accuracy(&train.data), train.data.len());
    if let Some(test) = &args.test {
        let test = with_path(test, read_labeled(test, CorpusRole::Test).map_err(io_of))?;
        println!("test accuracy {:.4} on {} records", model.accuracy(&test.data), test.data.len());
    }
    Ok(0)
}

fn cmd_explain(args: ExplainArgs) -> Result<u8> {
    let run = args.knobs.resolve()?;
    let explainer = build_explainer(&args.resources, &run)?;
    let explanation = explainer.explain(&args.text)?;
    let json = to_json_pretty(&explanation)?;
    match &args.out {
        Some(path) => write_file(path, &json)?,
        None => io::stdout().write_all(json.as_bytes())?,
    }
    if let Some(path) = &args.html {
        write_file(path, &render_html(&explanation))?;
    }
    Ok(0)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn records_csv(records: &[EvalRecord]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let header =
        ["index", "query", "label", "score", "r2", "fidelity", "confidence_drop", "dpm", "aopc", "plan_len", "flags", "runtime_ms", "error"];
    let csv_err = |e: csv::Error| Error::Config(e.to_string());
    w.write_record(header).map_err(csv_err)?;
    for r in records {
        let flags: Vec<String> =
            r.flags.iter().map(|f| serde_json::to_value(f).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default()).collect();
        w.write_record([
            r.index.to_string(),
            r.query.clone(),
            r.label.map(|l| l.as_u8().to_string()).unwrap_or_default(),
            fmt_opt(r.score),
            fmt_opt(r.r2),
            fmt_opt(r.fidelity),
            fmt_opt(r.confidence_drop),
            fmt_opt(r.dpm),
            fmt_opt(r.aopc),
            r.plan_len.map(|n| n.to_string()).unwrap_or_default(),
            flags.join(";"),
            fmt_opt(r.runtime_ms),
            r.error.as_ref().map(|e| e.message.clone()).unwrap_or_default(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<u8> {
    let run = args.knobs.resolve()?;
    let metrics: Vec<Metric> = parse_metrics(&args.metrics)?;
    let texts = with_path(&args.input, read_texts_lenient(&args.input).map_err(io_of))?.data;
    if texts.is_empty() {
        return Err(Error::Config(format!("{} holds no text", args.input.display())));
    }
    let explainer = build_explainer(&args.resources, &run)?;
    let records: Vec<EvalRecord> = pool(args.jobs)?.install(|| {
        texts
            .par_iter()
            .enumerate()
            .map(|(i, t)| evaluate_instance(&explainer, i, t, &metrics, run.eta, args.timings))
            .collect()
    });
    let report = EvalReport::new(&run.explain, run.eta, &metrics, records);
    write_file(&args.out, &to_json_pretty(&report)?)?;
    if let Some(path) = &args.csv {
        write_file(path, &records_csv(&report.records)?)?;
    }
    eprintln!("{} instances, {} failed", report.records.len(), report.failures);
    Ok(if report.failures > 0 { EXIT_PARTIAL } else { 0 })
}

fn stability_csv(report: &StabilityReport) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| Error::Config(e.to_string());
    w.write_record([
        "adjective", "noun", "prediction_std", "adjective_mean", "adjective_std", "noun_mean", "noun_std", "set_similarity",
    ])
    .map_err(csv_err)?;
    for c in &report.cases {
        w.write_record([
            c.adjective.clone(),
            c.noun.clone(),
            c.prediction_std.to_string(),
            c.adjective_mean.to_string(),
            c.adjective_std.to_string(),
            c.noun_mean.to_string(),
            c.noun_std.to_string(),
            c.set_similarity.to_string(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Config(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv of utf-8 fields"))
}

fn cmd_stability(args: StabilityArgs) -> Result<u8> {
    let run = args.knobs.resolve()?;
    let explainer = build_explainer(&args.resources, &run)?;
    let templates: Vec<String> = match &args.templates {
        Some(path) => read_words(path)?,
        None => TEMPLATES.iter().map(|s| s.to_string()).collect(),
    };
    if templates.iter().any(|t| !t.contains("<ADJ>") || !t.contains("<NOUN>")) {
        return Err(Error::Config("every template needs <ADJ> and <NOUN> placeholders".into()));
    }
    let words = if args.auto_words {
        let vocabulary = TfIdfModel::fit(explainer.corpus())?.vocabulary().to_vec();
        auto_select_words(explainer.blackbox(), &vocabulary, args.auto_adjectives, args.auto_nouns)?
    } else {
        let defaults = WordLists::default();
        WordLists {
            adjectives: args.adjectives.as_deref().map(read_words).transpose()?.unwrap_or(defaults.adjectives),
            nouns: args.nouns.as_deref().map(read_words).transpose()?.unwrap_or(defaults.nouns),
        }
    };
    let pairs = case_pairs(&words);
    let results = pool(args.jobs)?.install(|| {
        pairs
            .into_par_iter()
            .map(|(a, n)| {
                let r = stability_case(&explainer, &a, &n, &templates);
                ((a, n), r)
            })
            .collect()
    });
    let report = StabilityReport::new(&run.explain, &templates, &words, results);
    write_file(&args.out, &to_json_pretty(&report)?)?;
    if let Some(path) = &args.csv {
        write_file(path, &stability_csv(&report)?)?;
    }
    eprintln!(
        "{} cases, {} failed, set similarity {:.4}",
        report.summary.cases, report.summary.failed, report.summary.set_similarity
    );
    Ok(if report.summary.failed > 0 { EXIT_PARTIAL } else { 0 })
}

fn serve_model(path: &Path) -> Result<u8> {
    let model = with_path(path, BuiltinModel::load(path).map_err(io_of))?;
    serve_classifier(&model, BufReader::new(io::stdin()), io::stdout())?;
    Ok(0)
}

fn serve_reference(path: &Path) -> Result<u8> {
    let generator = ReferenceGenerator::new(&load_corpus(path)?)?;
    serve_generator(&generator, BufReader::new(io::stdin()), io::stdout())?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Train(a) => cmd_train(a),
        Command::Explain(a) => cmd_explain(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Stability(a) => cmd_stability(a),
        Command::ServeClassifier { model } => serve_model(&model),
        Command::ServeGenerator { corpus } => serve_reference(&corpus),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
