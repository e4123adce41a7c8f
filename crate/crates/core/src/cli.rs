//! Command-line front end. Exit codes: 0 success, 1 embedding or
//! certification failure, 2 input or usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::cert::CertReport;
use crate::embedding::{run_pipeline, Outcome, PipelineConfig};
use crate::error::{Error, Result};
use crate::generate::{generate_guest, sample_gnp, GuestSpec};
use crate::graph::Graph;
use crate::harness::{estimate_threshold, run_sweep, sweep_csv, ExperimentConfig, ThresholdSearch};
use crate::janson::{
    delta_upper_canonical, janson_tail_bound, mu_canonical_copies, mu_cycle_family, JansonParams, LogValue,
};
use crate::partition::{build_f_partition, pad_with_isolated, validate_f_partition, FPartition, PartitionParams};
use crate::rng::Seed;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "universal-embed", version, about = "Embed bounded-degree graphs into random graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a seeded sweep over p and write one CSV row per trial.
    Sweep(SweepArgs),
    /// Bisect for the smallest p reaching a target success rate.
    Threshold(ThresholdArgs),
    /// Embed a guest graph file into a host graph file.
    Embed(EmbedArgs),
    /// Build and certify the ordered partition of a guest.
    Partition(PartitionArgs),
    /// Print expectation, correlation bound and lower-tail bound as CSV.
    Janson(JansonArgs),
    /// Generate a graph file.
    #[command(subcommand)]
    Gen(GenCommand),
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the base seed of the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Overrides the output path of the config; stdout when neither is set.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct ThresholdArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    target: f64,
    #[arg(long)]
    lo: f64,
    #[arg(long, default_value_t = 1.0)]
    hi: f64,
    #[arg(long, default_value_t = 0.1)]
    resolution: f64,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Args)]
struct EmbedArgs {
    #[arg(long)]
    host: PathBuf,
    #[arg(long)]
    guest: PathBuf,
    /// Pipeline config as JSON; the flags below override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long)]
    eps: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Debug, Args)]
struct PartitionArgs {
    #[arg(long)]
    guest: PathBuf,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 0.25)]
    eps: f64,
    /// Pad with isolated vertices up to this many vertices.
    #[arg(long)]
    target: Option<usize>,
    /// Number of BFS layers; defaults to the padded vertex count.
    #[arg(long)]
    q: Option<usize>,
}

#[derive(Debug, Args)]
struct JansonArgs {
    /// Pattern graph file; must be connected.
    #[arg(long)]
    pattern: PathBuf,
    #[arg(long)]
    part_size: usize,
    #[arg(long)]
    p: f64,
    #[arg(long, default_value_t = 3)]
    max_degree: usize,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Also report the cycle-family expectation for `k` cycles of length `g`.
    #[arg(long, requires = "cycle_g")]
    cycle_k: Option<usize>,
    #[arg(long, requires = "cycle_k")]
    cycle_g: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum GenCommand {
    /// Random host G(n, p).
    Gnp {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Guest assembled from a JSON component spec.
    Guest {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure of a subcommand, mapped to an exit code.
enum Failure {
    Input(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Input(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

type CmdResult = std::result::Result<i32, Failure>;

fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::parse(&read_text(path)?)
}

fn emit(text: &str, path: Option<&Path>, out: &mut dyn Write) -> std::io::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text),
        None => out.write_all(text.as_bytes()),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn sweep(args: SweepArgs, out: &mut dyn Write) -> CmdResult {
    let mut cfg = ExperimentConfig::from_json(&read_text(&args.config)?)?;
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    let records = run_sweep(&cfg, args.threads)?;
    let csv = sweep_csv(&cfg, &records)?;
    emit(&csv, args.out.as_deref().or(cfg.output.as_deref()), out)?;
    Ok(EXIT_OK)
}

fn threshold(args: ThresholdArgs, out: &mut dyn Write) -> CmdResult {
    let mut cfg = ExperimentConfig::from_json(&read_text(&args.config)?)?;
    if let Some(s) = args.seed {
        cfg.base_seed = s;
    }
    let search = ThresholdSearch { target: args.target, lo: args.lo, hi: args.hi, resolution: args.resolution };
    let est = estimate_threshold(&cfg, &search, args.threads)?;
    out.write_all(to_json(&est)?.as_bytes())?;
    Ok(EXIT_OK)
}

fn embed(args: EmbedArgs, out: &mut dyn Write) -> CmdResult {
    let host = read_graph(&args.host)?;
    let guest = read_graph(&args.guest)?;
    let mut cfg = match &args.config {
        Some(p) => serde_json::from_str::<PipelineConfig>(&read_text(p)?).map_err(Error::from)?,
        None => PipelineConfig::default(),
    };
    if let Some(d) = args.max_degree {
        cfg.max_degree = d;
    }
    if let Some(e) = args.eps {
        cfg.eps = e;
    }
    let result = run_pipeline(&host, &guest, &cfg, Seed(args.seed));
    out.write_all(to_json(&result)?.as_bytes())?;
    Ok(match result.outcome {
        Outcome::Success => EXIT_OK,
        Outcome::RejectedInput => EXIT_INPUT,
        _ => EXIT_FAILURE,
    })
}

#[derive(Serialize)]
struct PartitionOutput {
    partition: FPartition,
    report: CertReport,
}

fn partition(args: PartitionArgs, out: &mut dyn Write) -> CmdResult {
    let guest = read_graph(&args.guest)?;
    let target = args.target.unwrap_or(guest.vertex_count());
    let padded = pad_with_isolated(&guest, target)?;
    let q = args.q.unwrap_or(padded.vertex_count()).max(1);
    let params = PartitionParams::new(q, args.max_degree, args.eps)?;
    let part = build_f_partition(&padded, &params)?;
    let report = validate_f_partition(&padded, &part);
    let ok = report.is_ok();
    out.write_all(to_json(&PartitionOutput { partition: part, report })?.as_bytes())?;
    Ok(if ok { EXIT_OK } else { EXIT_FAILURE })
}

fn csv_row(name: &str, v: LogValue) -> String {
    let plain = if v.ln() >= 1e-300f64.ln() && v.ln().is_finite() { format!("{:e}", v.value()) } else { String::new() };
    format!("{name},{},{plain}\n", v.ln())
}

fn janson(args: JansonArgs, out: &mut dyn Write) -> CmdResult {
    let pattern = read_graph(&args.pattern)?;
    let mu = mu_canonical_copies(&pattern, args.part_size, args.p)?;
    let delta = delta_upper_canonical(&pattern, args.part_size, args.p, args.max_degree)?;
    let bound = janson_tail_bound(&JansonParams { mu, delta, gamma: args.gamma })?;
    let mut text = String::from("quantity,ln,value\n");
    text += &csv_row("mu", mu);
    text += &csv_row("delta_upper", delta);
    text += &csv_row("tail_bound", bound);
    if let (Some(k), Some(g)) = (args.cycle_k, args.cycle_g) {
        text += &csv_row("mu_cycle_family", mu_cycle_family(k, g, args.part_size, args.p, args.max_degree)?);
    }
    out.write_all(text.as_bytes())?;
    Ok(EXIT_OK)
}

fn gen(cmd: GenCommand, out: &mut dyn Write) -> CmdResult {
    let (graph, path) = match cmd {
        GenCommand::Gnp { n, p, seed, out } => (sample_gnp(n, p, Seed(seed))?, out),
        GenCommand::Guest { spec, seed, out } => {
            let spec: GuestSpec = serde_json::from_str(&read_text(&spec)?).map_err(Error::from)?;
            (generate_guest(&spec, Seed(seed))?, out)
        }
    };
    emit(&graph.to_text(), path.as_deref(), out)?;
    Ok(EXIT_OK)
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run_cli<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = err.write_all(text.as_bytes());
                EXIT_INPUT
            } else {
                let _ = out.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    let result = match cli.command {
        Command::Sweep(a) => sweep(a, out),
        Command::Threshold(a) => threshold(a, out),
        Command::Embed(a) => embed(a, out),
        Command::Partition(a) => partition(a, out),
        Command::Janson(a) => janson(a, out),
        Command::Gen(c) => gen(c, out),
    };
    match result {
        Ok(code) => code,
        Err(Failure::Input(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
        Err(Failure::Io(e)) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INPUT
        }
    }
}
