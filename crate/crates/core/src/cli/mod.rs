//! The `blockmorph` command line front end.
//!
//! Exit codes: 0 success, 1 usage error, 2 input or parse error,
//! 3 computation error. Diagnostics go to standard error as
//! `level=... code=... msg="..."` lines.

mod config;
mod logger;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use log::Level;

use crate::error::{Error, ErrorClass, Result};
use crate::evaluation::{compare_sets, load_trained_sets, write_report_dir};
use crate::ingest::{ingest_files, Corpus, IngestConfig};
use crate::metrics::{compute_corpus_metrics, normalize, pearson_matrix, select_set, write_csv, MetricsFile};
use crate::retrieval::{retrieve, write_results, Query, QuerySource};
use crate::service::{serve, AppState};
use crate::som::{EncodingsFile, SomConfig, SomModel, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_COMPUTATION: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "blockmorph", version, about = "Block-scale urban morphology metrics, SOM encoding and retrieval")]
#[command(args_override_self = true)]
struct Cli {
    /// TOML or JSON file with flag values; explicit flags take precedence.
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Only report warnings and errors.
    #[arg(long, short, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Slice blocks out of the road network and attach buildings.
    Ingest(IngestArgs),
    /// Compute the 15 indicators and their correlation matrix.
    Metrics(MetricsArgs),
    /// Train a SOM for one metric set and encode every block.
    Train(TrainArgs),
    /// Rank stored blocks against a block or a set of indicator values.
    Retrieve(RetrieveArgs),
    /// Compare retrievals across all trained metric sets for some targets.
    Compare(CompareArgs),
    /// Serve the read-only JSON API.
    Serve(ServeArgs),
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(long, value_name = "FILE")]
    buildings: PathBuf,
    #[arg(long, value_name = "FILE")]
    roads: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Smallest face kept as a block, in m².
    #[arg(long, value_name = "M2", default_value_t = IngestConfig::default().min_block_area)]
    min_block_area: f64,
    /// Neighbour search radius for missing heights, in m.
    #[arg(long, value_name = "M", default_value_t = IngestConfig::default().impute_radius)]
    impute_radius: f64,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Also write the records as CSV.
    #[arg(long, value_name = "FILE")]
    csv: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[arg(long, value_name = "FILE")]
    metrics: PathBuf,
    /// Spacemate, BlockShape, OneBMC or AllBlockMetric.
    #[arg(long, value_name = "NAME")]
    set: String,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
    /// Corpus encodings; defaults to the model path with `.encodings.json`.
    #[arg(long, value_name = "FILE")]
    encodings_out: Option<PathBuf>,
    #[arg(long, value_name = "RxC", default_value = "10x10", value_parser = parse_grid)]
    grid: (usize, usize),
    #[arg(long, value_name = "N", default_value_t = 1000)]
    iters: usize,
    #[arg(long, value_name = "A", default_value_t = 0.5)]
    alpha: f64,
    /// Initial neighbourhood radius; defaults to half the longer grid side.
    #[arg(long, value_name = "S")]
    sigma: Option<f64>,
    #[arg(long, value_name = "N", default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Args, Debug)]
#[command(group = clap::ArgGroup::new("source").required(true).args(["block", "values"]))]
struct RetrieveArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    encodings: PathBuf,
    /// Query with a stored block.
    #[arg(long, value_name = "ID")]
    block: Option<String>,
    /// Query with indicator values: a JSON object, or @FILE holding one.
    #[arg(long, value_name = "JSON")]
    values: Option<String>,
    #[arg(short, long, value_name = "N", default_value_t = 5)]
    k: usize,
    #[arg(long)]
    exclude_self: bool,
    /// Reject out-of-range values instead of clamping them.
    #[arg(long)]
    strict: bool,
    #[arg(long, value_name = "FILE")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct CompareArgs {
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    metrics: PathBuf,
    /// Directory of `*.model.json` files.
    #[arg(long, value_name = "DIR")]
    models: PathBuf,
    #[arg(long, value_name = "ID,ID,...", value_delimiter = ',', required = true)]
    targets: Vec<String>,
    #[arg(short, long, value_name = "N", default_value_t = 5)]
    k: usize,
    #[arg(long)]
    exclude_self: bool,
    #[arg(long, value_name = "DIR")]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct ServeArgs {
    #[arg(long, value_name = "FILE")]
    corpus: PathBuf,
    #[arg(long, value_name = "FILE")]
    metrics: PathBuf,
    #[arg(long, value_name = "DIR")]
    models: PathBuf,
    #[arg(long, value_name = "P", default_value_t = 8080)]
    port: u16,
    #[arg(long, value_name = "ADDR", default_value = "127.0.0.1")]
    host: IpAddr,
    /// Serve files from this directory for paths outside /api.
    #[arg(long, value_name = "DIR")]
    r#static: Option<PathBuf>,
}

fn parse_grid(s: &str) -> std::result::Result<(usize, usize), String> {
    let (r, c) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected ROWSxCOLS, got {s:?}"))?;
    let r = r.trim().parse().map_err(|_| format!("bad row count in {s:?}"))?;
    let c = c.trim().parse().map_err(|_| format!("bad column count in {s:?}"))?;
    Ok((r, c))
}

/// Parses `argv` (program name first), runs the subcommand and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let argv = match with_config(argv) {
        Ok(a) => a,
        Err(e) => return report(&e),
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
        }
    };
    logger::init(cli.quiet);
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

fn report(e: &Error) -> i32 {
    logger::line(Level::Error, e.code(), &e.to_string());
    match e.class() {
        ErrorClass::Input => EXIT_INPUT,
        ErrorClass::Computation => EXIT_COMPUTATION,
    }
}

/// Splices flags from `--config FILE` in right after the subcommand name.
fn with_config(mut argv: Vec<OsString>) -> Result<Vec<OsString>> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        let s = a.to_string_lossy();
        if s == "--" {
            break;
        }
        if s == "--config" {
            path = argv.get(i + 1).map(PathBuf::from);
        } else if let Some(p) = s.strip_prefix("--config=") {
            path = Some(PathBuf::from(p));
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let table = config::read_table(&path)?;
    let cmd = Cli::command();
    let Some((pos, sub)) = argv
        .iter()
        .enumerate()
        .skip(1)
        .find_map(|(i, a)| cmd.find_subcommand(a).map(|s| (i, s)))
    else {
        return Ok(argv);
    };
    let flags = config::flags_for(sub, &table)?;
    argv.splice(pos + 1..pos + 1, flags);
    Ok(argv)
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Ingest(a) => ingest(a),
        Command::Metrics(a) => metrics(a),
        Command::Train(a) => train(a),
        Command::Retrieve(a) => retrieve_cmd(a),
        Command::Compare(a) => compare(a),
        Command::Serve(a) => serve_cmd(a),
    }
}

fn ingest(a: IngestArgs) -> Result<()> {
    let cfg = IngestConfig {
        min_block_area: a.min_block_area,
        impute_radius: a.impute_radius,
    };
    if !(cfg.min_block_area >= 0.0 && cfg.impute_radius >= 0.0) {
        return Err(Error::InvalidConfig("--min-block-area and --impute-radius must be non-negative".into()));
    }
    let corpus = ingest_files(&a.buildings, &a.roads, &cfg)?;
    corpus.write(&a.out)?;
    let buildings: usize = corpus.blocks.iter().map(|b| b.buildings.len()).sum();
    log::info!(target: "ingest", "{} blocks, {buildings} buildings -> {}", corpus.blocks.len(), a.out.display());
    Ok(())
}

fn metrics(a: MetricsArgs) -> Result<()> {
    let corpus = Corpus::read(&a.corpus)?;
    let (records, skipped) = compute_corpus_metrics(&corpus);
    for e in &skipped {
        log::warn!(target: "metrics.skipped", "{e}");
    }
    if records.is_empty() {
        return Err(Error::TooFewBlocks { needed: 1, found: 0 });
    }
    let pearson = match pearson_matrix(&records) {
        Ok(p) => Some(p),
        Err(e) => {
            log::warn!(target: "metrics.pearson", "correlation matrix omitted: {e}");
            None
        }
    };
    let file = MetricsFile::new(records, pearson);
    file.write(&a.out)?;
    if let Some(csv) = &a.csv {
        write_csv(&file.records, csv)?;
    }
    log::info!(target: "metrics", "{} records -> {}", file.records.len(), a.out.display());
    Ok(())
}

/// `x.model.json` → `x.encodings.json`; any other name gets the suffix swapped.
pub fn default_encodings_path(model: &Path) -> PathBuf {
    let name = model.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let stem = name
        .strip_suffix(".model.json")
        .or_else(|| name.strip_suffix(".json"))
        .unwrap_or(&name);
    model.with_file_name(format!("{stem}.encodings.json"))
}

fn train(a: TrainArgs) -> Result<()> {
    let file = MetricsFile::read(&a.metrics)?;
    let set = select_set(&a.set)?;
    let features = normalize(&file.records, &set)?;
    let (rows, cols) = a.grid;
    let cfg = SomConfig {
        iterations: a.iters,
        alpha0: a.alpha,
        sigma0: a.sigma.unwrap_or(rows.max(cols) as f64 / 2.0),
        seed: a.seed,
        ..SomConfig::with_grid(rows, cols)
    };
    cfg.validate()?;
    let initial = SomModel::initialize(&features, &cfg)?.quantization_error(&features)?;
    let model = SomModel::train(&features, &cfg)?;
    let qe = model.quantization_error(&features)?;
    model.write(&a.out)?;
    let enc_path = a.encodings_out.unwrap_or_else(|| default_encodings_path(&a.out));
    EncodingsFile::new(&model, model.encode_all(&features)?).write(&enc_path)?;
    log::info!(
        target: "train",
        "{} on {} blocks, quantization error {initial:.6} -> {qe:.6}; model {}, encodings {}",
        set.name,
        features.len(),
        a.out.display(),
        enc_path.display()
    );
    Ok(())
}

fn parse_values(arg: &str) -> Result<BTreeMap<String, f64>> {
    let (text, source) = match arg.strip_prefix('@') {
        Some(p) => (std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?, p.to_string()),
        None => (arg.to_string(), "--values".to_string()),
    };
    serde_json::from_str(&text).map_err(|e| Error::parse(source, e.to_string()))
}

fn retrieve_cmd(a: RetrieveArgs) -> Result<()> {
    let model = SomModel::read(&a.model)?;
    let encodings = EncodingsFile::read(&a.encodings)?;
    let source = match (a.block, a.values) {
        (Some(id), _) => QuerySource::block(id),
        (None, Some(v)) => QuerySource::Values { values: parse_values(&v)? },
        (None, None) => unreachable!("clap enforces one query source"),
    };
    let query = Query {
        set: model.set_name,
        source,
        k: a.k,
        exclude_self: a.exclude_self,
    };
    let (_, results) = retrieve(&query, &model, &encodings, a.strict)?;
    write_results(&results, &a.out)?;
    log::info!(target: "retrieve", "{} results -> {}", results.len(), a.out.display());
    Ok(())
}

fn compare(a: CompareArgs) -> Result<()> {
    let corpus = Corpus::read(&a.corpus)?;
    let metrics = MetricsFile::read(&a.metrics)?;
    let sets = load_trained_sets(&a.models, &metrics.records)?;
    if sets.len() < 4 {
        log::warn!(target: "compare.sets", "only {} of 4 metric sets have models", sets.len());
    }
    let report = compare_sets(&a.targets, a.k, a.exclude_self, &sets, &metrics)?;
    write_report_dir(&a.out, &report, &sets, &corpus, &metrics)?;
    log::info!(target: "compare", "{} targets x {} sets -> {}", a.targets.len(), sets.len(), a.out.display());
    Ok(())
}

fn serve_cmd(a: ServeArgs) -> Result<()> {
    let state = AppState::load(&a.corpus, &a.metrics, &a.models)?;
    let runtime = tokio::runtime::Builder::new_multi_thread()
        .enable_all()
        .build()
        .map_err(|e| Error::io("tokio runtime", e))?;
    runtime.block_on(serve(state, SocketAddr::new(a.host, a.port), a.r#static))
}
