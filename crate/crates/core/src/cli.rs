//! Command-line front end: `ptd`, `project` and `attn`.
//!
//! Every command renders to a `String` so the same code path serves the
//! binary and the tests. Validation failures map to exit code 2, anything
//! else to 1.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::geometry::{cip_stages, dual_frame_fusion, CipConfig, IndexPoint, RadiusStrategy};
use crate::harness::{make_schedule, run_experiments, ScheduleStrategy};
use crate::metrics::{distance_matrix_with, ptd, DistanceConvention};
use crate::rope::{RotaryParams, DEFAULT_BASE};
use crate::schemes::{parse_layout, SchemeKind, Segment, SequenceLayout};

pub const SEED_ENV: &str = "CIRCLE_ROPE_SEED";

#[derive(Debug, Parser)]
#[command(name = "circle-rope", version, about = "Cone-structured positional indices for vision-language RoPE")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Per-Token Distance of a layout under one or more schemes.
    Ptd(PtdArgs),
    /// Dump one stage of the circular projection for every image token.
    Project(ProjectArgs),
    /// Run the toy attention probe and emit its report.
    Attn(AttnArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stage {
    Centered,
    Circle2d,
    Projected,
    Fused,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConventionArg {
    Auto,
    Scalar,
    Planar,
    Euclidean,
}

#[derive(Debug, Clone, Default, Args)]
pub struct CipArgs {
    /// Angle mix weight on the spatial-origin angle, in [0, 1].
    #[arg(long)]
    pub alpha: Option<f64>,
    /// `fixed:<R>` or `auto:<k>`.
    #[arg(long)]
    pub radius: Option<String>,
    /// Fusion weight on the projected coordinates, in [0, 1].
    #[arg(long)]
    pub beta: Option<f64>,
    /// Plane normal as `a,b,c`.
    #[arg(long)]
    pub text_direction: Option<String>,
    /// TOML file with default values; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct PtdArgs {
    #[arg(long)]
    pub layout: String,
    /// Comma-separated subset of hard,unordered,spatial,circle.
    #[arg(long, default_value = "hard,unordered,spatial,circle")]
    pub schemes: String,
    /// Override the per-scheme distance convention.
    #[arg(long, value_enum, default_value_t = ConventionArg::Auto)]
    pub convention: ConventionArg,
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub cip: CipArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    #[arg(long)]
    pub layout: String,
    #[arg(long, value_enum)]
    pub stage: Stage,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub cip: CipArgs,
}

#[derive(Debug, Clone, Args)]
pub struct AttnArgs {
    #[arg(long)]
    pub layout: String,
    /// Comma-separated subset of hard,unordered,spatial,circle.
    #[arg(long, alias = "scheme")]
    pub schemes: Option<String>,
    /// all, upper, lower or alt.
    #[arg(long)]
    pub schedule: Option<String>,
    #[arg(long)]
    pub layers: Option<usize>,
    /// Falls back to $CIRCLE_ROPE_SEED, then the config file, then 0.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub head_dim: Option<usize>,
    /// Pairs per axis as `a,b,c`; must sum to head_dim/2.
    #[arg(long)]
    pub sections: Option<String>,
    #[arg(long)]
    pub base: Option<f64>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,
    #[command(flatten)]
    pub cip: CipArgs,
}

/// Keys accepted in a `--config` file.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub radius: Option<String>,
    pub beta: Option<f64>,
    pub text_direction: Option<[f64; 3]>,
    pub schemes: Option<String>,
    pub schedule: Option<String>,
    pub layers: Option<usize>,
    pub seed: Option<u64>,
    pub head_dim: Option<usize>,
    pub sections: Option<[usize; 3]>,
    pub base: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn load_file(cip: &CipArgs) -> CliResult<FileConfig> {
    cip.config.as_deref().map(FileConfig::load).transpose().map(Option::unwrap_or_default)
}

fn parse_triple<T: std::str::FromStr>(s: &str, what: &str) -> CliResult<[T; 3]> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let bad = || CliError::Usage(format!("{what} `{s}` must be three comma-separated numbers"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(3);
    for p in parts {
        out.push(p.parse::<T>().map_err(|_| bad())?);
    }
    out.try_into().map_err(|_| bad())
}

/// Merges flags over file values over `default`.
fn resolve_cip(cip: &CipArgs, file: &FileConfig, default: CipConfig) -> CliResult<CipConfig> {
    let radius = match cip.radius.as_deref().or(file.radius.as_deref()) {
        Some(s) => s.parse::<RadiusStrategy>()?,
        None => default.radius,
    };
    let text_direction = match &cip.text_direction {
        Some(s) => parse_triple(s, "text direction")?,
        None => file.text_direction.unwrap_or(default.text_direction),
    };
    let config = CipConfig {
        alpha: cip.alpha.or(file.alpha).unwrap_or(default.alpha),
        radius,
        beta: cip.beta.or(file.beta).unwrap_or(default.beta),
        text_direction,
    };
    config.validate()?;
    Ok(config)
}

fn parse_schemes(s: &str) -> CliResult<Vec<SchemeKind>> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let kind: SchemeKind = part.parse()?;
        if !out.contains(&kind) {
            out.push(kind);
        }
    }
    Ok(out)
}

pub fn run(cli: &Cli) -> CliResult<String> {
    match &cli.command {
        Command::Ptd(args) => cmd_ptd(args),
        Command::Project(args) => cmd_project(args),
        Command::Attn(args) => cmd_attn(args),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PtdRow {
    pub scheme: SchemeKind,
    pub ptd: f64,
    pub convention: DistanceConvention,
    /// Segment start counters, e.g. `i3x3@0,t5@3`.
    pub arrangement: String,
}

/// PTD per scheme. The circle scheme defaults to `beta = 1`, the pure
/// projection; pass `--beta` to measure a fused variant.
pub fn cmd_ptd(args: &PtdArgs) -> CliResult<String> {
    let file = load_file(&args.cip)?;
    let segments = parse_layout(&args.layout)?;
    let config = resolve_cip(&args.cip, &file, CipConfig { beta: 1.0, ..CipConfig::default() })?;
    let mut rows = Vec::new();
    for kind in parse_schemes(&args.schemes)? {
        let layout = SequenceLayout::new(segments.clone(), kind.with_config(config))?;
        let seq = layout.assign()?;
        let convention = match args.convention {
            ConventionArg::Auto => DistanceConvention::for_scheme(kind),
            ConventionArg::Scalar => DistanceConvention::Scalar,
            ConventionArg::Planar => DistanceConvention::Planar,
            ConventionArg::Euclidean => DistanceConvention::Euclidean,
        };
        let value = ptd(&distance_matrix_with(&seq, convention)?);
        rows.push(PtdRow { scheme: kind, ptd: value, convention, arrangement: seq.describe(&segments) });
    }
    let header = ["scheme", "ptd", "convention", "arrangement"];
    let cells = rows
        .iter()
        .map(|r| vec![r.scheme.to_string(), fmt_num(r.ptd), r.convention.to_string(), r.arrangement.clone()])
        .collect::<Vec<_>>();
    render(args.format, &header, &cells, &rows)
}

#[derive(Debug, Clone, Serialize)]
pub struct PointRow {
    pub token_id: usize,
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

/// Coordinates of one projection stage for each image token, in raster
/// order. `token_id` is the token's position in the whole sequence.
/// `circle2d` rows are working-plane `(x, y, 0)`; the other stages use
/// index axes 0, 1, 2 as `x, y, z`.
pub fn cmd_project(args: &ProjectArgs) -> CliResult<String> {
    let file = load_file(&args.cip)?;
    let segments = parse_layout(&args.layout)?;
    let config = resolve_cip(&args.cip, &file, CipConfig::default())?;
    let mut rows = Vec::new();
    let mut token_id = 0usize;
    for seg in &segments {
        let grid = match seg {
            Segment::Text(n) => {
                token_id += n;
                continue;
            }
            Segment::Image(g) => *g,
        };
        let stages = cip_stages(grid, &config)?;
        let points: Vec<IndexPoint> = match args.stage {
            Stage::Centered => stages.centered,
            Stage::Circle2d => stages.circle,
            Stage::Projected => stages.projected,
            Stage::Fused => dual_frame_fusion(&stages.projected, &stages.centered, config.beta)?,
        };
        for p in points {
            let [x, y, z] = p.coords;
            rows.push(PointRow { token_id, x, y, z });
            token_id += 1;
        }
    }
    let header = ["token_id", "x", "y", "z"];
    let cells =
        rows.iter().map(|r| vec![r.token_id.to_string(), fmt_num(r.x), fmt_num(r.y), fmt_num(r.z)]).collect::<Vec<_>>();
    render(args.format, &header, &cells, &rows)
}

pub fn cmd_attn(args: &AttnArgs) -> CliResult<String> {
    let file = load_file(&args.cip)?;
    let segments = parse_layout(&args.layout)?;
    let config = resolve_cip(&args.cip, &file, CipConfig::default())?;
    let schemes =
        parse_schemes(args.schemes.as_deref().or(file.schemes.as_deref()).unwrap_or("hard,unordered,spatial,circle"))?;
    let strategy: ScheduleStrategy = args.schedule.as_deref().or(file.schedule.as_deref()).unwrap_or("alt").parse()?;
    let layers = args.layers.or(file.layers).unwrap_or(36);
    let schedule = make_schedule(layers, strategy)?;

    let head_dim = args.head_dim.or(file.head_dim).unwrap_or(64);
    let sections = match &args.sections {
        Some(s) => parse_triple(s, "sections")?,
        None => file.sections.unwrap_or_else(|| RotaryParams::default_sections(head_dim)),
    };
    let base = args.base.or(file.base).unwrap_or(DEFAULT_BASE);
    let params = RotaryParams::new(head_dim, base, sections)?;
    let seed = match args.seed {
        Some(s) => s,
        None => match std::env::var(SEED_ENV) {
            Ok(v) => {
                v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}=`{v}` is not an unsigned integer")))?
            }
            Err(_) => file.seed.unwrap_or(0),
        },
    };

    let report = run_experiments(&segments, &schemes, &config, &schedule, &params, seed)?;
    match args.format {
        OutputFormat::Json => to_json(&report),
        fmt => {
            let header = ["scheme", "layer", "variant", "mean", "std", "spread", "mean_spread", "angle_spread", "ptd"];
            let mut cells = Vec::new();
            for (scheme, layers) in &report.schemes {
                for (layer, s) in layers {
                    cells.push(vec![
                        scheme.to_string(),
                        layer.to_string(),
                        format!("{:?}", s.variant).to_lowercase(),
                        fmt_num(s.mean),
                        fmt_num(s.std),
                        fmt_num(s.spread),
                        fmt_num(s.mean_spread),
                        fmt_num(s.angle_spread),
                        fmt_num(s.ptd),
                    ]);
                }
            }
            render(fmt, &header, &cells, &())
        }
    }
}

/// Shortest representation that round-trips to the same `f64`.
fn fmt_num(x: f64) -> String {
    format!("{x}")
}

fn to_json<T: Serialize + ?Sized>(value: &T) -> CliResult<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| CliError::Internal(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render<T: Serialize + ?Sized>(
    format: OutputFormat,
    header: &[&str],
    cells: &[Vec<String>],
    json: &T,
) -> CliResult<String> {
    match format {
        OutputFormat::Json => to_json(json),
        OutputFormat::Csv => {
            let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
            let internal = |e: csv::Error| CliError::Internal(e.to_string());
            w.write_record(header).map_err(internal)?;
            for row in cells {
                w.write_record(row).map_err(internal)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Internal(e.to_string()))?;
            String::from_utf8(bytes).map_err(|e| CliError::Internal(e.to_string()))
        }
        OutputFormat::Table => {
            let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
            for row in cells {
                for (w, c) in widths.iter_mut().zip(row) {
                    *w = (*w).max(c.len());
                }
            }
            let line = |row: Vec<&str>| -> String {
                row.iter()
                    .zip(&widths)
                    .map(|(c, w)| format!("{c:<w$}"))
                    .collect::<Vec<_>>()
                    .join("  ")
                    .trim_end()
                    .to_string()
            };
            let mut out = line(header.to_vec());
            out.push('\n');
            out.push_str(&widths.iter().map(|w| "-".repeat(*w)).collect::<Vec<_>>().join("  "));
            out.push('\n');
            for row in cells {
                out.push_str(&line(row.iter().map(String::as_str).collect()));
                out.push('\n');
            }
            Ok(out)
        }
    }
}
