//! Command-line front end.
//!
//! Exit codes: 0 success, 1 validation error, 2 parse error, 3 resource
//! guard abort. Diagnostics go to stderr; only command results go to
//! stdout or the output directory.

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::export::{export_dot, export_graphml, export_radar_csv, export_report_json, format_number};
use crate::export::report::load_rankings;
use crate::graph::Weighting;
use crate::ingest::{parse_scan, InputFormat, ScanDocument, EDGE_CSV_APP};
use crate::metrics::{Metric, MetricVector};
use crate::pipeline::{analyze, compute_metrics, prepare_graph, AnalysisOptions};
use crate::prioritize::{capture_at_k, parse_foi, rank, PriorityProfile};
use crate::structure::{segment_entropy, walktrap_communities, DEFAULT_WALK_LENGTH};

#[derive(Debug, Parser)]
#[command(name = "vdfrank", version, about = "Rank files for remediation from SAST taint flows")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline and write the report and exports.
    Analyze(AnalyzeArgs),
    /// Print the top rows of one ranking from a report.
    Rank(RankArgs),
    /// Print walktrap communities of the scan graph.
    Communities(CommunitiesArgs),
    /// Print substructure entropy per vulnerability island.
    Entropy(InputArgs),
    /// Write GraphML / DOT views of the scan graph.
    Export(ExportArgs),
    /// Print capture-at-k of every metric against a files-of-interest list.
    Evaluate(EvaluateArgs),
}

#[derive(Debug, Args)]
struct InputArgs {
    /// Scan document to read.
    #[arg(long)]
    input: PathBuf,
    /// vivid-json or edge-csv; guessed from the extension when omitted.
    #[arg(long)]
    format: Option<String>,
    /// count or severity.
    #[arg(long, default_value = "count")]
    weighting: String,
    /// Keep loop-only and isolated files.
    #[arg(long)]
    no_noise_filter: bool,
}

#[derive(Debug, Args)]
struct MetricArgs {
    /// Comma-separated metric names (default: all).
    #[arg(long, value_delimiter = ',')]
    metrics: Vec<String>,
    /// Abort cross-clique enumeration past this many maximal cliques.
    #[arg(long, default_value_t = crate::metrics::DEFAULT_CLIQUE_CAP)]
    clique_cap: usize,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    /// Built-in profile name (placement, sink-audit) or a profile JSON file.
    #[arg(long, default_value = "placement")]
    profile: String,
    /// Files-of-interest list, one path per line.
    #[arg(long)]
    foi: Option<PathBuf>,
    #[arg(long, default_value_t = 5)]
    k: usize,
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    walk_length: usize,
    #[arg(long)]
    out_dir: PathBuf,
    /// Comma-separated subset of json, graphml, dot, radar-csv.
    #[arg(long, value_delimiter = ',', default_value = "json,graphml,dot,radar-csv")]
    export: Vec<String>,
    /// Metric that sizes DOT nodes.
    #[arg(long, default_value = "betweenness")]
    size_by: String,
}

#[derive(Debug, Args)]
struct RankArgs {
    #[arg(long)]
    report: PathBuf,
    #[arg(long)]
    metric: String,
    #[arg(long = "top", default_value_t = 10)]
    top_n: usize,
}

#[derive(Debug, Args)]
struct CommunitiesArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = DEFAULT_WALK_LENGTH)]
    walk_length: usize,
}

#[derive(Debug, Args)]
struct ExportArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    #[arg(long)]
    out_dir: PathBuf,
    /// Comma-separated subset of graphml, dot.
    #[arg(long, value_delimiter = ',', default_value = "graphml,dot")]
    export: Vec<String>,
    #[arg(long, default_value = "betweenness")]
    size_by: String,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[command(flatten)]
    input: InputArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    #[arg(long)]
    foi: PathBuf,
    #[arg(long, default_value_t = 5)]
    k: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum ExportFormat {
    Json,
    GraphMl,
    Dot,
    RadarCsv,
}

impl ExportFormat {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(ExportFormat::Json),
            "graphml" => Ok(ExportFormat::GraphMl),
            "dot" => Ok(ExportFormat::Dot),
            "radar-csv" => Ok(ExportFormat::RadarCsv),
            other => Err(Error::validation(format!("unknown export format {other:?}"))),
        }
    }

    fn file_name(self) -> &'static str {
        match self {
            ExportFormat::Json => "report.json",
            ExportFormat::GraphMl => "graph.graphml",
            ExportFormat::Dot => "graph.dot",
            ExportFormat::RadarCsv => "radar.csv",
        }
    }
}

/// Parse arguments and run; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let outcome = match cli.command {
        Command::Analyze(a) => cmd_analyze(&a),
        Command::Rank(a) => cmd_rank(&a),
        Command::Communities(a) => cmd_communities(&a),
        Command::Entropy(a) => cmd_entropy(&a),
        Command::Export(a) => cmd_export(&a),
        Command::Evaluate(a) => cmd_evaluate(&a),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn read_file(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::validation(format!("cannot read {}: {e}", path.display())))
}

fn load_scan(args: &InputArgs) -> Result<ScanDocument> {
    let format = match &args.format {
        Some(f) => f.parse()?,
        None => match args.input.extension().and_then(|e| e.to_str()) {
            Some("csv") => InputFormat::EdgeCsv,
            _ => InputFormat::VividJson,
        },
    };
    let bytes = read_file(&args.input)?;
    let parsed = parse_scan(bytes.as_slice(), format).map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse {
            line,
            column,
            message: format!("{}: {message}", args.input.display()),
        },
        other => other,
    })?;
    let mut doc = parsed.document;
    if format == InputFormat::EdgeCsv && doc.app_name == EDGE_CSV_APP {
        if let Some(stem) = args.input.file_stem().and_then(|s| s.to_str()) {
            doc.app_name = stem.to_string();
        }
    }
    log::info!(
        "read {} vulnerabilities from {} ({format})",
        doc.records.len(),
        args.input.display()
    );
    Ok(doc)
}

fn options_for(input: &InputArgs, metrics: &MetricArgs) -> Result<AnalysisOptions> {
    let mut options = AnalysisOptions {
        weighting: input.weighting.parse::<Weighting>()?,
        noise_filter: !input.no_noise_filter,
        clique_cap: metrics.clique_cap,
        ..AnalysisOptions::default()
    };
    if !metrics.metrics.is_empty() {
        options.metrics = metrics
            .metrics
            .iter()
            .map(|m| m.trim().parse::<Metric>())
            .collect::<Result<BTreeSet<_>>>()?;
    }
    Ok(options)
}

fn load_profile(arg: &str) -> Result<PriorityProfile> {
    if let Some(p) = PriorityProfile::builtin(arg) {
        return Ok(p);
    }
    let path = Path::new(arg);
    if !path.exists() {
        return Err(Error::validation(format!(
            "profile {arg:?} is neither a built-in profile nor a file"
        )));
    }
    PriorityProfile::from_json(&read_file(path)?)
}

fn load_foi(path: &Path) -> Result<BTreeSet<String>> {
    let bytes = read_file(path)?;
    let text = String::from_utf8(bytes)
        .map_err(|_| Error::validation(format!("{} is not UTF-8", path.display())))?;
    parse_foi(&text)
}

fn export_formats(names: &[String]) -> Result<BTreeSet<ExportFormat>> {
    names.iter().map(|n| ExportFormat::parse(n.trim())).collect()
}

fn dot_size_metric<'a>(metrics: &'a [MetricVector], wanted: &'a str) -> &'a str {
    if metrics.iter().any(|m| m.name == wanted) {
        wanted
    } else {
        // Explicit choices are validated by export_dot; the default falls
        // back to any computed metric.
        metrics.first().map_or(wanted, |m| m.name.as_str())
    }
}

/// Write every output through a temp file in `dir`, then rename.
fn write_outputs(dir: &Path, outputs: &[(&str, Vec<u8>)]) -> Result<()> {
    fs::create_dir_all(dir)?;
    let mut staged = Vec::with_capacity(outputs.len());
    for (name, bytes) in outputs {
        let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
        tmp.write_all(bytes)?;
        tmp.as_file().sync_all()?;
        staged.push((tmp, dir.join(name)));
    }
    for (tmp, target) in staged {
        tmp.persist(&target).map_err(|e| Error::Io(e.error))?;
        log::info!("wrote {}", target.display());
    }
    Ok(())
}

fn cmd_analyze(args: &AnalyzeArgs) -> Result<()> {
    if args.k == 0 {
        return Err(Error::validation("--k must be at least 1"));
    }
    if args.walk_length == 0 {
        return Err(Error::validation("--walk-length must be at least 1"));
    }
    let formats = export_formats(&args.export)?;
    let mut options = options_for(&args.input, &args.metrics)?;
    options.profile = load_profile(&args.profile)?;
    options.k = args.k;
    options.walk_length = args.walk_length;
    options.foi = args.foi.as_deref().map(load_foi).transpose()?;
    let doc = load_scan(&args.input)?;

    let analysis = analyze(&doc, &options)?;
    let report = &analysis.report;

    let mut outputs: Vec<(&str, Vec<u8>)> = Vec::new();
    for format in &formats {
        let bytes = match format {
            ExportFormat::Json => export_report_json(report)?,
            ExportFormat::GraphMl => export_graphml(&analysis.graph, &report.metrics),
            ExportFormat::Dot => {
                let size_by = if args.size_by == "betweenness" {
                    dot_size_metric(&report.metrics, &args.size_by)
                } else {
                    &args.size_by
                };
                export_dot(&analysis.graph, &report.metrics, size_by)?
            }
            ExportFormat::RadarCsv => match &options.foi {
                Some(foi) => export_radar_csv(&report.rankings, foi),
                None => {
                    log::warn!("radar-csv needs --foi; skipped");
                    continue;
                }
            },
        };
        outputs.push((format.file_name(), bytes));
    }
    for c in &report.captures {
        log::info!(
            "{}: captured {}/{} files of interest in top {}",
            c.metric_name,
            c.captured.len(),
            c.files_of_interest.len(),
            c.k
        );
    }
    write_outputs(&args.out_dir, &outputs)
}

fn cmd_rank(args: &RankArgs) -> Result<()> {
    let bytes = read_file(&args.report)?;
    let rankings = load_rankings(&bytes)?;
    let table = rankings
        .iter()
        .find(|t| t.metric_name == args.metric)
        .ok_or_else(|| Error::validation(format!("report has no ranking for {:?}", args.metric)))?;
    let mut out = String::new();
    for row in table.rows.iter().take(args.top_n) {
        out.push_str(&format!("{}\t{}\t{}\n", row.rank, row.file, format_number(row.value)));
    }
    print_stdout(&out)
}

fn print_stdout(text: &str) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(text.as_bytes())?;
    stdout.flush()?;
    Ok(())
}

fn cmd_communities(args: &CommunitiesArgs) -> Result<()> {
    if args.walk_length == 0 {
        return Err(Error::validation("--walk-length must be at least 1"));
    }
    let weighting = args.input.weighting.parse::<Weighting>()?;
    let doc = load_scan(&args.input)?;
    let (graph, _) = prepare_graph(&doc, weighting, !args.input.no_noise_filter);
    let partition = walktrap_communities(&graph, args.walk_length);
    let mut out = format!(
        "# communities={} modularity_q={}\n",
        partition.communities.len(),
        format_number(partition.modularity_q)
    );
    for (i, c) in partition.communities.iter().enumerate() {
        for v in c {
            out.push_str(&format!("{}\t{}\n", i + 1, graph.file(*v)));
        }
    }
    print_stdout(&out)
}

fn cmd_entropy(args: &InputArgs) -> Result<()> {
    let weighting = args.weighting.parse::<Weighting>()?;
    let doc = load_scan(args)?;
    let (graph, partition) = prepare_graph(&doc, weighting, !args.no_noise_filter);
    let mut out = String::from("segment\tnodes\tedges\tentropy_bits\tmax_entropy_bits\tnormalized\tband\n");
    for (i, seg) in partition.segments.iter().enumerate() {
        let r = segment_entropy(&graph, seg);
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
            i + 1,
            r.files.len(),
            r.edge_count,
            format_number(r.entropy_bits),
            format_number(r.max_entropy_bits),
            format_number(r.normalized),
            r.band
        ));
    }
    print_stdout(&out)
}

fn cmd_export(args: &ExportArgs) -> Result<()> {
    let formats = export_formats(&args.export)?;
    let options = options_for(&args.input, &args.metrics)?;
    let doc = load_scan(&args.input)?;
    let (graph, _) = prepare_graph(&doc, options.weighting, options.noise_filter);
    let metrics = compute_metrics(&graph, &options)?;
    let mut outputs: Vec<(&str, Vec<u8>)> = Vec::new();
    for format in &formats {
        let bytes = match format {
            ExportFormat::GraphMl => export_graphml(&graph, &metrics),
            ExportFormat::Dot => {
                let size_by = if args.size_by == "betweenness" {
                    dot_size_metric(&metrics, &args.size_by)
                } else {
                    &args.size_by
                };
                export_dot(&graph, &metrics, size_by)?
            }
            other => {
                return Err(Error::validation(format!(
                    "{} is produced by `analyze`, not `export`",
                    other.file_name()
                )))
            }
        };
        outputs.push((format.file_name(), bytes));
    }
    write_outputs(&args.out_dir, &outputs)
}

fn cmd_evaluate(args: &EvaluateArgs) -> Result<()> {
    if args.k == 0 {
        return Err(Error::validation("--k must be at least 1"));
    }
    let options = options_for(&args.input, &args.metrics)?;
    let foi = load_foi(&args.foi)?;
    let doc = load_scan(&args.input)?;
    let (graph, _) = prepare_graph(&doc, options.weighting, options.noise_filter);
    let metrics = compute_metrics(&graph, &options)?;
    let mut out = String::from("metric\tk\tcaptured\ttotal\tfraction\n");
    for m in &metrics {
        let c = capture_at_k(&rank(m), &foi, args.k)?;
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\n",
            c.metric_name,
            c.k,
            c.captured.len(),
            c.files_of_interest.len(),
            format_number(c.capture_fraction)
        ));
    }
    print_stdout(&out)
}
