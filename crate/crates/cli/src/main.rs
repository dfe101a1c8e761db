//! `dpiov`: a workbench for differentially private query strategies over
//! histogram data and a vehicle-fleet data-sharing emulator.
//!
//! Subcommands: `gen` (synthetic dataset fixtures), `query-bench` (mechanism
//! error sweeps), `emulate` (GDP/LDP pipelines, in-process or over loopback
//! TCP), `noise-image` (per-pixel ε sweeps and montage), `report` (SVG charts
//! from result CSVs). All commands are deterministic given `--seed` (or the
//! `DPIOV_SEED` environment variable) and echo their resolved configuration
//! into `meta.json` next to their outputs.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "dpiov",
    version,
    about = "Differential-privacy query workbench and fleet emulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic table CSV + schema JSON fixture.
    Gen(GenArgs),
    /// Sweep mechanisms x workloads x epsilon and write error CSVs and charts.
    QueryBench(BenchArgs),
    /// Run the GDP/LDP sharing pipelines, in-process or over loopback TCP.
    Emulate(EmulateArgs),
    /// Apply per-pixel noise at several epsilon values and build a montage.
    NoiseImage(ImageArgs),
    /// Render SVG charts from a results CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct GenArgs {
    /// Output directory.
    #[arg(long, default_value = "out/gen")]
    out: PathBuf,
    /// Number of records.
    #[arg(long)]
    records: Option<u64>,
    /// Domain shape, e.g. 4x8.
    #[arg(long)]
    domain: Option<String>,
    /// Dirichlet concentration of the cell distribution.
    #[arg(long)]
    concentration: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    /// JSON config file mirroring these flags (flags win).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Preset grid: `relative` (4 mechanisms, 4x8, eps sweep) or `absolute`
    /// (eps fixed to 0.5, dimension-setting sweep, data cube excluded).
    #[arg(long)]
    preset: Option<String>,
    /// Comma-separated mechanisms (identity,fourier,wavelet,datacube,hierarchical).
    #[arg(long)]
    mechanisms: Option<String>,
    /// Comma-separated workloads (all-range,one-way).
    #[arg(long)]
    workloads: Option<String>,
    /// Comma-separated epsilon values.
    #[arg(long)]
    eps: Option<String>,
    /// Comma-separated dimension settings, e.g. 4x8,4x4x2.
    #[arg(long)]
    dims: Option<String>,
    #[arg(long)]
    trials: Option<u32>,
    #[arg(long)]
    seed: Option<u64>,
    /// Disable noise (diagnostic only; results are NOT private).
    #[arg(long)]
    no_noise: bool,
    /// Table CSV fixture (with --schema) instead of synthetic data.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Schema JSON for --data.
    #[arg(long)]
    schema: Option<PathBuf>,
    #[arg(long, default_value = "out/bench")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct EmulateArgs {
    /// gdp or ldp.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    nodes: Option<u32>,
    /// Feature-noise epsilon; accepts a comma-separated sweep.
    #[arg(long)]
    eps_img: Option<String>,
    /// Label-noise epsilon (randomized response); omit for no label noise.
    #[arg(long)]
    eps_txt: Option<f64>,
    /// inproc or tcp (tcp spawns one aggregator and N node processes on loopback).
    #[arg(long)]
    net: Option<String>,
    /// TCP port for the aggregator (0 picks a free port).
    #[arg(long)]
    port: Option<u16>,
    #[arg(long)]
    per_node: Option<usize>,
    #[arg(long)]
    features: Option<usize>,
    #[arg(long)]
    classes: Option<u32>,
    #[arg(long)]
    heterogeneity: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out/emulate")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Internal: run as a vehicle-node subprocess (hidden).
    #[arg(long, hide = true)]
    internal_role: Option<String>,
    /// Internal: node id for --internal-role node.
    #[arg(long, hide = true)]
    node_id: Option<u32>,
    /// Internal: aggregator address to connect to.
    #[arg(long, hide = true)]
    connect: Option<String>,
}

#[derive(Args)]
struct ImageArgs {
    /// Input PGM (P5) or PPM (P6) image.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Comma-separated epsilon values; defaults to the canonical sweep.
    #[arg(long)]
    eps_list: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value = "out/noise-image")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Results CSV produced by query-bench.
    #[arg(long = "in")]
    input: Option<PathBuf>,
    #[arg(long, default_value = "out/charts")]
    out: PathBuf,
    #[arg(long)]
    config: Option<PathBuf>,
}

fn error_kind(e: &dpiov_core::Error) -> &'static str {
    use dpiov_core::Error::*;
    match e {
        MalformedRow { .. } => "malformed_row",
        ValueOutsideBins { .. } => "value_outside_bins",
        DimensionMismatch(_) => "dimension_mismatch",
        DomainMismatch(_) => "domain_mismatch",
        NonBinarizableDomain(_) => "non_binarizable_domain",
        NonMarginalWorkload(_) => "non_marginal_workload",
        InvalidParameter(_) => "invalid_parameter",
        InsufficientSamples { .. } => "insufficient_samples",
        NonPrivateBypass => "non_private_bypass",
        IncompatibleConfig(_) => "incompatible_config",
        ImageFormat { .. } => "image_format",
        Protocol(_) => "protocol",
        Io(_) => "io",
        Json(_) => "json",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::QueryBench(args) => commands::bench::run(args),
        Command::Emulate(args) => commands::emulate::run(args),
        Command::NoiseImage(args) => commands::image::run(args),
        Command::Report(args) => commands::report::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let payload = serde_json::json!({ "error": e.to_string(), "kind": error_kind(&e) });
            eprintln!("{payload}");
            ExitCode::FAILURE
        }
    }
}
