//! `taugraph` command line.
//!
//! ```text
//! taugraph plot --input data.csv --x a --y b --style segments,clock --out fig.svg
//! taugraph tau --worldbank military.csv rnd.csv --year 2020
//! taugraph generate --m 46 --tau 0.911 --seed 7 --out gen.csv
//! taugraph serve --port 8080 --store-dir ./datasets
//! ```
//!
//! Exit codes: 0 success, 1 data or I/O error, 2 usage error. Relative
//! output paths resolve against `TAUGRAPH_OUT_DIR` when it is set.

use std::ffi::OsString;
use std::io::Write;
use std::net::{IpAddr, SocketAddr};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;

use taugraph::dataset::{parse_csv, parse_worldbank_pair, write_csv, ColumnSpec, DatasetError, RankedDataset};
use taugraph::geometry::{AnchorPolicy, ClockMode, GeometryDocument, GeometryError, TransformConfig, TransformMode};
use taugraph::kendall::{
    generate_permutation_with_target_tau, tau_b_brute_with_tolerance, tau_b_fast, KendallError, TauResult,
};
use taugraph::render::{plot, PlotStyle, RenderConfig, RenderError};

pub const OUT_DIR_ENV: &str = "TAUGRAPH_OUT_DIR";

#[derive(Debug, Parser)]
#[command(name = "taugraph", version, about = "Kendall's tau-b as a picture")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Render an SVG plot and optionally the geometry as JSON.
    Plot(PlotArgs),
    /// Print tau-b and the pair counts.
    Tau(TauArgs),
    /// Write a permutation dataset with a chosen tau-b.
    Generate(GenerateArgs),
    /// Run the HTTP service.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
#[group(id = "source", required = true, multiple = false)]
struct Source {
    /// CSV file with a header row.
    #[arg(long, group = "source")]
    input: Option<PathBuf>,
    /// Two World Bank indicator exports: x first, then y.
    #[arg(long, num_args = 2, value_names = ["X_FILE", "Y_FILE"], group = "source", requires = "year")]
    worldbank: Option<Vec<PathBuf>>,
}

#[derive(Debug, Args)]
struct Ingest {
    #[command(flatten)]
    source: Source,
    /// x column, by header name or 0-based index.
    #[arg(long, requires = "input")]
    x: Option<String>,
    /// y column, by header name or 0-based index.
    #[arg(long, requires = "input")]
    y: Option<String>,
    /// Label column, by header name or 0-based index.
    #[arg(long, requires = "input")]
    label: Option<String>,
    /// Year column of the World Bank exports.
    #[arg(long, requires = "worldbank")]
    year: Option<i32>,
}

#[derive(Debug, Args)]
struct TransformArgs {
    #[arg(long, default_value = "translate-rotate", value_parser = parse_token::<TransformMode>)]
    mode: TransformMode,
    #[arg(long, default_value = "min-x", value_parser = parse_token::<AnchorPolicy>)]
    anchor: AnchorPolicy,
    /// Differences with magnitude at or below this count as ties.
    #[arg(long, default_value_t = 0.0, value_parser = parse_epsilon)]
    epsilon: f64,
}

impl TransformArgs {
    fn config(&self) -> TransformConfig {
        TransformConfig {
            mode: self.mode,
            anchor_policy: self.anchor,
            tie_epsilon: self.epsilon,
        }
    }
}

#[derive(Debug, Args)]
struct PlotArgs {
    #[command(flatten)]
    ingest: Ingest,
    /// Comma-joined layers: lines, segments, points, density, clock, heatmap.
    #[arg(long, default_value = "segments", value_parser = parse_style)]
    style: PlotStyle,
    #[command(flatten)]
    transform: TransformArgs,
    #[arg(long, default_value = "calibrated", value_parser = parse_token::<ClockMode>)]
    clock_mode: ClockMode,
    /// SVG output path.
    #[arg(long, default_value = "plot.svg")]
    out: PathBuf,
    /// Also write the geometry document to this path.
    #[arg(long)]
    json: Option<PathBuf>,
    #[arg(long, default_value_t = 640)]
    width: u32,
    #[arg(long, default_value_t = 640)]
    height: u32,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Method {
    Fast,
    Brute,
}

#[derive(Debug, Args)]
struct TauArgs {
    #[command(flatten)]
    ingest: Ingest,
    #[arg(long, value_enum, default_value = "fast")]
    method: Method,
    /// Tie tolerance; any value above zero implies brute force.
    #[arg(long, default_value_t = 0.0, value_parser = parse_epsilon)]
    epsilon: f64,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Number of observations.
    #[arg(long)]
    m: usize,
    /// Target tau-b in [-1, 1].
    #[arg(long, allow_negative_numbers = true, value_parser = parse_target)]
    tau: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "generated.csv")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ServeArgs {
    #[arg(long, env = "TAUGRAPH_HOST", default_value = "127.0.0.1")]
    host: IpAddr,
    #[arg(long, env = "TAUGRAPH_PORT", default_value_t = 8080)]
    port: u16,
    /// Persist uploads to this directory.
    #[arg(long, env = "TAUGRAPH_STORE_DIR")]
    store_dir: Option<PathBuf>,
    /// Allowed CORS origin; repeatable. Any origin when omitted.
    #[arg(long = "cors-origin")]
    cors_origins: Vec<String>,
    /// Upload limit in bytes.
    #[arg(long, default_value_t = taugraph_service::DEFAULT_BODY_LIMIT)]
    body_limit: usize,
}

fn parse_token<T: std::str::FromStr<Err = String>>(s: &str) -> Result<T, String> {
    s.parse()
}

fn parse_style(s: &str) -> Result<PlotStyle, String> {
    let style = PlotStyle::from_tokens(s).map_err(|e| e.to_string())?;
    if !style.has_any_layer() {
        return Err(RenderError::EmptyStyle.to_string());
    }
    Ok(style)
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if v.is_finite() && v >= 0.0 => Ok(v),
        _ => Err(format!("expected a non-negative number, got {s:?}")),
    }
}

fn parse_target(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(v) if (-1.0..=1.0).contains(&v) => Ok(v),
        _ => Err(format!("expected a number in [-1, 1], got {s:?}")),
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("--x and --y are required with --input")]
    MissingColumns,
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Kendall(#[from] KendallError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Render(#[from] RenderError),
    #[error("service: {0}")]
    Service(#[from] taugraph_service::ServiceError),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingColumns | CliError::Render(RenderError::EmptyStyle | RenderError::UnknownStyle(_)) => 2,
            _ => 1,
        }
    }
}

/// Where relative output paths go.
#[derive(Debug, Clone, Default)]
pub struct Context {
    pub out_dir: Option<PathBuf>,
}

impl Context {
    pub fn from_env() -> Self {
        Self {
            out_dir: std::env::var_os(OUT_DIR_ENV).filter(|v| !v.is_empty()).map(PathBuf::from),
        }
    }

    fn resolve(&self, path: &Path) -> PathBuf {
        match &self.out_dir {
            Some(dir) if path.is_relative() => dir.join(path),
            _ => path.to_path_buf(),
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Output goes to the process's stdout and stderr.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(argv, &Context::from_env(), &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(argv: I, ctx: &Context, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { write!(out, "{text}") } else { write!(err, "{text}") };
            return code;
        }
    };
    match execute(cli.command, ctx, out) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    let io = |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    std::fs::write(path, contents).map_err(io)
}

fn load(ingest: &Ingest) -> Result<RankedDataset, CliError> {
    if let Some(input) = &ingest.source.input {
        let (Some(x), Some(y)) = (ingest.x.as_deref(), ingest.y.as_deref()) else {
            return Err(CliError::MissingColumns);
        };
        let mut spec = ColumnSpec::new(x, y);
        if let Some(label) = ingest.label.as_deref() {
            spec = spec.with_label(label);
        }
        return Ok(parse_csv(&read(input)?, &spec)?.dataset);
    }
    let files = ingest.source.worldbank.as_ref().expect("clap enforces one source");
    let year = ingest.year.expect("clap requires --year with --worldbank");
    Ok(parse_worldbank_pair(&read(&files[0])?, &read(&files[1])?, year)?)
}

fn tau_of(dataset: &RankedDataset, epsilon: f64, method: Method) -> Result<TauResult, CliError> {
    Ok(match method {
        Method::Fast if epsilon == 0.0 => tau_b_fast(dataset)?,
        _ => tau_b_brute_with_tolerance(dataset, epsilon)?,
    })
}

fn execute(command: Command, ctx: &Context, out: &mut dyn Write) -> Result<(), CliError> {
    let stdout = |out: &mut dyn Write, line: &str| {
        let _ = writeln!(out, "{line}");
    };
    match command {
        Command::Plot(args) => {
            let dataset = load(&args.ingest)?;
            let transform = args.transform.config();
            let style = args
                .style
                .with_transform(transform)
                .with_clock_mode(args.clock_mode);
            let config = RenderConfig {
                width: args.width,
                height: args.height,
                ..RenderConfig::default()
            };
            let svg = plot(&dataset, &style, &config)?;
            let doc = args
                .json
                .as_ref()
                .map(|_| GeometryDocument::build(&dataset, &transform))
                .transpose()?;
            write(&ctx.resolve(&args.out), &svg)?;
            if let (Some(path), Some(doc)) = (&args.json, doc) {
                write(&ctx.resolve(path), &doc.to_json())?;
            }
            let tau = tau_of(&dataset, transform.tie_epsilon, Method::Fast)?;
            stdout(out, &tau.summary_line());
        }
        Command::Tau(args) => {
            let dataset = load(&args.ingest)?;
            let tau = tau_of(&dataset, args.epsilon, args.method)?;
            stdout(out, &tau.summary_line());
        }
        Command::Generate(args) => {
            let dataset = generate_permutation_with_target_tau(args.m, args.tau, args.seed)?;
            write(&ctx.resolve(&args.out), &write_csv(&dataset))?;
            stdout(out, &tau_b_fast(&dataset)?.summary_line());
        }
        Command::Serve(args) => {
            let addr = SocketAddr::new(args.host, args.port);
            let config = taugraph_service::ServiceConfig {
                body_limit: args.body_limit,
                store_dir: args.store_dir,
                cors_origins: args.cors_origins,
                render: RenderConfig::default(),
            };
            let runtime = tokio::runtime::Runtime::new().map_err(|source| CliError::Io {
                path: PathBuf::from("<runtime>"),
                source,
            })?;
            stdout(out, &format!("listening on http://{addr}"));
            let _ = out.flush();
            runtime.block_on(taugraph_service::serve(addr, config))?;
        }
    }
    Ok(())
}
