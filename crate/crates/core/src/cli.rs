//! `prepush` command-line front end.
//!
//! ```text
//! prepush gen    --output trace.csv [--config synth.conf] [generator flags]
//! prepush stats  --input trace.csv --output DIR [--max-rank 5]
//! prepush plan   --input trace.csv --output DIR --mode perfect|assumed|limited
//! prepush sweep  --input trace.csv --output DIR [--titles 1,10,100,1000]
//! ```
//!
//! `gen` writes a single trace file. The other commands write several tables
//! into the output directory, as CSV or (with `--format json`) as JSON arrays
//! of objects keyed by the CSV column names.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::placement;
use crate::plan::{self, CostBreakdown, PlanMode};
use crate::stats::{self, EntityKind};
use crate::synth::{self, SynthParams};
use crate::trace::{self, TraceDataset, TraceFormat};
use crate::{Error, Result};

/// Popularity ranks swept when `--titles` is not given.
pub const DEFAULT_SWEEP_RANKS: [usize; 4] = [1, 10, 100, 1000];

#[derive(Debug, Parser)]
#[command(
    name = "prepush",
    version,
    about = "Cost model for cellular content pre-push broadcasting"
)]
pub struct RunConfig {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded synthetic trace
    Gen(GenArgs),
    /// Concentration curves and the per-user geographic profile
    Stats(StatsArgs),
    /// Per-title costs and the traffic-vs-broadcast-ratio curve
    Plan(PlanArgs),
    /// Per-title cost as a function of user coverage
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl OutputFormat {
    fn extension(self) -> &'static str {
        match self {
            OutputFormat::Csv => "csv",
            OutputFormat::Json => "json",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Perfect,
    Assumed,
    Limited,
}

impl From<ModeArg> for PlanMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Perfect => PlanMode::Perfect,
            ModeArg::Assumed => PlanMode::AssumedLocation,
            ModeArg::Limited => PlanMode::LimitedCoverage,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Trace file to write
    #[arg(long)]
    pub output: PathBuf,
    /// key=value file with generator parameters; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n_users: Option<usize>,
    #[arg(long)]
    pub n_titles: Option<usize>,
    #[arg(long)]
    pub n_cells: Option<usize>,
    #[arg(long)]
    pub n_visits: Option<usize>,
    #[arg(long)]
    pub title_zipf_exponent: Option<f64>,
    #[arg(long)]
    pub user_zipf_exponent: Option<f64>,
    /// Comma-separated per-rank cell shares, e.g. 0.58,0.22,0.09,0.05,0.02
    #[arg(long, value_delimiter = ',')]
    pub geo_profile: Option<Vec<f64>>,
    #[arg(long)]
    pub max_cells_per_user: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory
    #[arg(long)]
    pub output: PathBuf,
    /// Number of cell ranks in the geographic profile
    #[arg(long, default_value_t = 5)]
    pub max_rank: usize,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct PlanArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Perfect)]
    pub mode: ModeArg,
    /// User coverage for `--mode limited`
    #[arg(long, default_value_t = PlanMode::DEFAULT_LIMITED_COVERAGE)]
    pub coverage: f64,
    /// Broadcast ratios for the traffic curve (default 0, 0.01, ..., 1)
    #[arg(long, value_delimiter = ',')]
    pub ratio_grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Output directory
    #[arg(long)]
    pub output: PathBuf,
    /// Popularity ranks (integers) or title ids; prefix `=` forces an id
    #[arg(long, value_delimiter = ',')]
    pub titles: Option<Vec<String>>,
    /// Coverage grid (default 0.05, 0.10, ..., 1.00)
    #[arg(long, value_delimiter = ',')]
    pub coverage_grid: Option<Vec<f64>>,
    #[arg(long, value_enum, default_value_t = OutputFormat::Csv)]
    pub format: OutputFormat,
}

impl RunConfig {
    /// Parses a full argument vector (program name first).
    pub fn from_args<I, T>(args: I) -> std::result::Result<Self, clap::Error>
    where
        I: IntoIterator<Item = T>,
        T: Into<std::ffi::OsString> + Clone,
    {
        Self::try_parse_from(args)
    }
}

pub fn run(config: &RunConfig) -> Result<()> {
    match &config.command {
        Command::Gen(args) => run_gen(args),
        Command::Stats(args) => run_stats(args),
        Command::Plan(args) => run_plan(args),
        Command::Sweep(args) => run_sweep(args),
    }
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn parse_synth_config(
    text: &str,
    source: &Path,
    mut params: SynthParams,
) -> Result<SynthParams> {
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let err = |message: String| Error::Parse {
            path: source.to_owned(),
            line: i as u64 + 1,
            message,
        };
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(format!("expected key=value, found `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String> {
            v.parse().map_err(|_| format!("invalid number `{v}`"))
        }
        let parsed: std::result::Result<(), String> = (|| {
            match key {
                "n_users" => params.n_users = num(value)?,
                "n_titles" => params.n_titles = num(value)?,
                "n_cells" => params.n_cells = num(value)?,
                "n_visits" => params.n_visits = num(value)?,
                "title_zipf_exponent" => params.title_zipf_exponent = num(value)?,
                "user_zipf_exponent" => params.user_zipf_exponent = num(value)?,
                "max_cells_per_user" => params.max_cells_per_user = num(value)?,
                "seed" => params.seed = num(value)?,
                "geo_profile" => {
                    params.geo_profile = value
                        .split(',')
                        .map(str::trim)
                        .filter(|s| !s.is_empty())
                        .map(num)
                        .collect::<std::result::Result<_, _>>()?
                }
                other => return Err(format!("unknown key `{other}`")),
            }
            Ok(())
        })();
        parsed.map_err(err)?;
    }
    Ok(params)
}

impl GenArgs {
    pub fn synth_params(&self) -> Result<SynthParams> {
        let mut p = SynthParams::default();
        if let Some(path) = &self.config {
            let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
            p = parse_synth_config(&text, path, p)?;
        }
        macro_rules! set {
            ($($f:ident),*) => { $( if let Some(v) = &self.$f { p.$f = v.clone(); } )* };
        }
        set!(
            n_users,
            n_titles,
            n_cells,
            n_visits,
            title_zipf_exponent,
            user_zipf_exponent,
            geo_profile,
            max_cells_per_user,
            seed
        );
        Ok(p)
    }
}

fn run_gen(args: &GenArgs) -> Result<()> {
    let dataset = synth::generate(&args.synth_params()?)?;
    trace::write_trace(&dataset, &args.output)
}

fn load(input: &Path) -> Result<TraceDataset> {
    trace::parse_trace(input, TraceFormat::Csv)
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `rows` to `dir/<stem>.<ext>`.
fn write_table<T: Serialize>(
    dir: &Path,
    stem: &str,
    format: OutputFormat,
    rows: &[T],
) -> Result<()> {
    let path = dir.join(format!("{stem}.{}", format.extension()));
    let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
    let mut out = BufWriter::new(file);
    match format {
        OutputFormat::Csv => {
            let mut w = csv::Writer::from_writer(&mut out);
            for row in rows {
                w.serialize(row).map_err(|source| Error::Csv {
                    path: path.clone(),
                    source,
                })?;
            }
            w.flush().map_err(|e| Error::io(&path, e))?;
        }
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut out, rows).map_err(|source| Error::Json {
                path: path.clone(),
                source,
            })?;
            writeln!(out).map_err(|e| Error::io(&path, e))?;
        }
    }
    out.flush().map_err(|e| Error::io(&path, e))
}

#[derive(Serialize)]
struct GeoRow {
    rank: usize,
    mean_share: f64,
    cumulative: f64,
}

#[derive(Serialize)]
struct MetricRow {
    metric: String,
    value: f64,
}

fn run_stats(args: &StatsArgs) -> Result<()> {
    let dataset = load(&args.input)?;
    create_dir(&args.output)?;
    let mut metrics = vec![
        ("total_visits".to_owned(), dataset.total_visits() as f64),
        ("users".to_owned(), dataset.user_count() as f64),
        ("titles".to_owned(), dataset.title_count() as f64),
        ("cells".to_owned(), dataset.cell_count() as f64),
    ];
    for kind in [EntityKind::User, EntityKind::Title, EntityKind::Cell] {
        let curve = stats::concentration_curve(&dataset, kind)?;
        write_table(
            &args.output,
            &format!("{}_curve", kind.name()),
            args.format,
            &curve.points,
        )?;
        for f in [0.001, 0.01, 0.05, 0.1, 0.2] {
            metrics.push((
                format!("{}_top_{}_share", kind.name(), f),
                stats::top_fraction_share(&curve, f)?,
            ));
        }
    }
    let geo = stats::geo_concentration_profile(&dataset, args.max_rank)?;
    let rows: Vec<GeoRow> = geo
        .mean_share_by_rank
        .iter()
        .zip(&geo.cumulative_by_rank)
        .enumerate()
        .map(|(i, (&mean_share, &cumulative))| GeoRow {
            rank: i + 1,
            mean_share,
            cumulative,
        })
        .collect();
    write_table(&args.output, "geo_profile", args.format, &rows)?;
    metrics.push(("mean_active_cells".to_owned(), geo.mean_active_cells));
    let metrics: Vec<MetricRow> = metrics
        .into_iter()
        .map(|(metric, value)| MetricRow { metric, value })
        .collect();
    write_table(&args.output, "summary", args.format, &metrics)
}

/// `0, 0.01, ..., 1`.
pub fn default_ratio_grid() -> Vec<f64> {
    (0..=100).map(|i| i as f64 / 100.0).collect()
}

#[derive(Serialize)]
struct BreakdownRow<'a> {
    title_id: &'a str,
    case: &'static str,
    coverage: f64,
    broadcast_transmissions: u64,
    missed_visits: u64,
    total_transmissions: u64,
    unicast_transmissions: u64,
}

fn run_plan(args: &PlanArgs) -> Result<()> {
    let dataset = load(&args.input)?;
    let mode = PlanMode::from(args.mode);
    let ratios = args.ratio_grid.clone().unwrap_or_else(default_ratio_grid);
    let curve = plan::traffic_vs_broadcast_ratio(&dataset, mode, args.coverage, &ratios)?;
    let breakdowns: Vec<CostBreakdown> = plan::plan_all(&dataset, mode, args.coverage)?;
    create_dir(&args.output)?;

    write_table(&args.output, "traffic", args.format, &curve.points)?;

    let rows: Vec<BreakdownRow> = breakdowns
        .iter()
        .map(|b| BreakdownRow {
            title_id: &b.title_id,
            case: b.case.name(),
            coverage: b.coverage,
            broadcast_transmissions: b.broadcast_transmissions,
            missed_visits: b.missed_visits,
            total_transmissions: b.total_transmissions,
            unicast_transmissions: dataset
                .title_visits(dataset.title_ix(&b.title_id).expect("planned title")),
        })
        .collect();
    write_table(&args.output, "breakdown", args.format, &rows)?;

    let coverage = mode.effective_coverage(args.coverage);
    let partitions = plan::titles_by_popularity(&dataset)
        .into_iter()
        .map(|t| {
            let id = dataset.title_id(t);
            let estimated = match mode {
                PlanMode::Perfect => dataset.title_cell_visits(t).keys().copied().collect(),
                _ => placement::estimate_target_cells(&dataset, id, coverage)?,
            };
            Ok(placement::partition_cells(&dataset, id, &estimated)?.summary(id))
        })
        .collect::<Result<Vec<_>>>()?;
    write_table(&args.output, "partitions", args.format, &partitions)
}

/// Resolves `--titles` tokens: positive integers are popularity ranks,
/// anything else (or a token starting with `=`) is a title id.
pub fn resolve_titles(
    dataset: &TraceDataset,
    tokens: Option<&[String]>,
) -> Result<Vec<(usize, String)>> {
    let ranked = plan::titles_by_popularity(dataset);
    let by_rank = |rank: usize| {
        ranked
            .get(rank - 1)
            .map(|&t| (rank, dataset.title_id(t).to_owned()))
    };
    let Some(tokens) = tokens else {
        return Ok(DEFAULT_SWEEP_RANKS
            .iter()
            .filter_map(|&r| by_rank(r))
            .collect());
    };
    tokens
        .iter()
        .map(|token| {
            if let Some(id) = token.strip_prefix('=') {
                let t = dataset.require_title(id)?;
                let rank = ranked.iter().position(|&x| x == t).expect("ranked") + 1;
                return Ok((rank, id.to_owned()));
            }
            match token.parse::<usize>() {
                Ok(0) => Err(Error::invalid("popularity ranks start at 1")),
                Ok(rank) => by_rank(rank).ok_or_else(|| {
                    Error::invalid(format!(
                        "rank {rank} exceeds the {} titles in the trace",
                        ranked.len()
                    ))
                }),
                Err(_) => {
                    let t = dataset.require_title(token)?;
                    let rank = ranked.iter().position(|&x| x == t).expect("ranked") + 1;
                    Ok((rank, token.clone()))
                }
            }
        })
        .collect()
}

#[derive(Serialize)]
struct SweepRow {
    coverage: f64,
    total_transmissions: u64,
}

#[derive(Serialize)]
struct SweepSummaryRow {
    title_id: String,
    popularity_rank: usize,
    unicast_baseline: u64,
    optimal_coverage: f64,
    optimal_cost: u64,
}

fn run_sweep(args: &SweepArgs) -> Result<()> {
    let dataset = load(&args.input)?;
    let grid = args
        .coverage_grid
        .clone()
        .unwrap_or_else(plan::default_coverage_grid);
    let targets = resolve_titles(&dataset, args.titles.as_deref())?;
    let sweeps = targets
        .iter()
        .map(|(_, id)| plan::sweep_coverage(&dataset, id, &grid))
        .collect::<Result<Vec<_>>>()?;
    create_dir(&args.output)?;

    let mut summary = Vec::with_capacity(sweeps.len());
    for ((rank, _), sweep) in targets.iter().zip(&sweeps) {
        let rows: Vec<SweepRow> = sweep
            .grid
            .iter()
            .zip(&sweep.costs)
            .map(|(&coverage, &total_transmissions)| SweepRow {
                coverage,
                total_transmissions,
            })
            .collect();
        write_table(
            &args.output,
            &format!("sweep_{}", sweep.title_id),
            args.format,
            &rows,
        )?;
        summary.push(SweepSummaryRow {
            title_id: sweep.title_id.clone(),
            popularity_rank: *rank,
            unicast_baseline: sweep.unicast_baseline,
            optimal_coverage: sweep.optimal_coverage,
            optimal_cost: sweep.optimal_cost,
        });
    }
    write_table(&args.output, "sweep_summary", args.format, &summary)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_file_overrides_defaults() {
        let text = "# synthetic run\nn_users = 10\nseed=42\ngeo_profile = 0.6, 0.3\n\n";
        let p = parse_synth_config(text, Path::new("x.conf"), SynthParams::default()).unwrap();
        assert_eq!(p.n_users, 10);
        assert_eq!(p.seed, 42);
        assert_eq!(p.geo_profile, vec![0.6, 0.3]);
        assert_eq!(p.n_titles, SynthParams::default().n_titles);
    }

    #[test]
    fn config_errors_carry_line() {
        let err = parse_synth_config(
            "n_users=5\nbogus=1\n",
            Path::new("x.conf"),
            SynthParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_synth_config(
            "n_users five\n",
            Path::new("x.conf"),
            SynthParams::default(),
        )
        .unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
    }

    #[test]
    fn flags_override_config() {
        let cfg = RunConfig::try_parse_from([
            "prepush",
            "gen",
            "--output",
            "o.csv",
            "--n-users",
            "7",
            "--geo-profile",
            "0.5,0.5",
        ])
        .unwrap();
        let Command::Gen(g) = cfg.command else {
            panic!()
        };
        let p = g.synth_params().unwrap();
        assert_eq!(p.n_users, 7);
        assert_eq!(p.geo_profile, vec![0.5, 0.5]);
    }

    #[test]
    fn bad_mode_is_usage_error() {
        let err = RunConfig::try_parse_from([
            "prepush", "plan", "--input", "a", "--output", "b", "--mode", "psychic",
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
