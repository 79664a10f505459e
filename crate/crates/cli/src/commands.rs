use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use integral_balance::integral_map::{build_table, integral_closed};
use integral_balance::multidim::integral_grid;
use integral_balance::recovery::{
    noise_sweep, recover_binary, recover_match, recover_spline, recover_threshold, Method, RecoveryResult,
};
use integral_balance::{CoefficientFamily, EncoderConfig, Mode, MultiEncoderConfig, TransitionFunction};
use serde::Serialize;

use crate::persistence::{self, TableFormat};
use crate::{fmt_f64, CliError};

#[derive(Debug, Parser)]
#[command(name = "ibal", version, about = "Integer encoding by integral balance of Gaussian bumps")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate I(N) for N = 1..=n-max.
    Table(TableArgs),
    /// Recover N from an observed integral using a table file.
    Recover(RecoverArgs),
    /// Emit (x, y) CSV data for plotting.
    PlotData(PlotArgs),
    /// Measure recovery accuracy under additive noise.
    Sweep(SweepArgs),
    /// Emit the separable multidimensional integral over a grid as CSV.
    Multidim(MultidimArgs),
}

#[derive(Debug, clap::Args)]
pub struct TableArgs {
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub delta: f64,
    /// canonical | trig | exp-poly:P | generalized:A,B,G
    #[arg(long, default_value = "canonical")]
    pub family: String,
    #[arg(long)]
    pub n_max: u64,
    /// Output file; the table goes to standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Defaults to the output extension, else json.
    #[arg(long, value_enum)]
    pub format: Option<TableFormat>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RecoverMethod {
    Match,
    Binary,
    Spline,
    Threshold,
}

#[derive(Debug, clap::Args)]
pub struct RecoverArgs {
    #[arg(long)]
    pub table: PathBuf,
    /// Observed integral I*; not used by `threshold`.
    #[arg(long, allow_negative_numbers = true)]
    pub target: Option<f64>,
    /// Match tolerance (root tolerance for `spline`).
    #[arg(long, default_value_t = 0.005, allow_negative_numbers = true)]
    pub epsilon: f64,
    #[arg(long, value_enum, default_value_t = RecoverMethod::Match)]
    pub method: RecoverMethod,
    /// Threshold method: also require |I(k)| to be a local minimum.
    #[arg(long)]
    pub local_min: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PlotWhat {
    /// f_N(t) against t.
    Counter,
    /// I(N) against integer N.
    Imap,
    /// S(N) against integer N.
    Partials,
    /// Smooth I(N) against real N.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CounterMode {
    Discrete,
    Fractional,
    Smooth,
}

#[derive(Debug, clap::Args)]
pub struct PlotArgs {
    #[arg(long, value_enum)]
    pub what: PlotWhat,
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value = "canonical")]
    pub family: String,
    /// N for `counter`; upper N for `imap`, `partials` and (default range) `smooth`.
    #[arg(long, allow_negative_numbers = true)]
    pub n: Option<f64>,
    #[arg(long, default_value_t = 10.0, allow_negative_numbers = true)]
    pub sharpness: f64,
    /// `lo:hi` sample range for `counter` and `smooth`.
    #[arg(long, allow_hyphen_values = true)]
    pub range: Option<String>,
    #[arg(long, default_value_t = 1000)]
    pub points: usize,
    /// Encoder mode for `counter`.
    #[arg(long, value_enum, default_value_t = CounterMode::Discrete)]
    pub mode: CounterMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub table: PathBuf,
    #[arg(long)]
    pub true_n: u64,
    #[arg(long, default_value_t = 0.005, allow_negative_numbers = true)]
    pub epsilon: f64,
    /// Comma-separated noise amplitudes.
    #[arg(long, allow_hyphen_values = true)]
    pub amplitudes: String,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, clap::Args)]
pub struct MultidimArgs {
    #[arg(long, default_value_t = 0.2, allow_negative_numbers = true)]
    pub delta: f64,
    #[arg(long, default_value = "canonical")]
    pub family: String,
    /// Comma-separated per-axis maxima, e.g. `30,30`.
    #[arg(long)]
    pub n_max: String,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// JSON report printed by `recover`.
#[derive(Debug, Serialize)]
pub struct RecoverReport {
    pub n: f64,
    pub rounded: u64,
    pub residual: f64,
    pub method: Method,
    pub stable: bool,
    pub degraded: bool,
}

impl From<RecoveryResult> for RecoverReport {
    fn from(r: RecoveryResult) -> Self {
        Self {
            n: r.n,
            rounded: r.rounded(),
            residual: r.residual,
            method: r.method,
            stable: r.stable,
            degraded: r.degraded,
        }
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_family(s: &str) -> Result<CoefficientFamily, CliError> {
    s.parse().map_err(|e: integral_balance::Error| usage(e.to_string()))
}

fn encoder(family: &str, delta: f64) -> Result<EncoderConfig, CliError> {
    Ok(EncoderConfig::new(parse_family(family)?, delta, Mode::Discrete)?)
}

fn parse_range(s: &str) -> Result<(f64, f64), CliError> {
    let bad = || usage(format!("range must look like lo:hi, got {s:?}"));
    let (lo, hi) = s.split_once(':').ok_or_else(bad)?;
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    if !(lo < hi) {
        return Err(usage(format!("range needs lo < hi, got {s:?}")));
    }
    Ok((lo, hi))
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, CliError> {
    s.split(',')
        .map(|v| v.trim().parse().map_err(|_| usage(format!("bad {what} value {v:?}"))))
        .collect()
}

fn xy_csv(rows: impl IntoIterator<Item = (f64, f64)>) -> String {
    let mut out = String::from("x,y\n");
    for (x, y) in rows {
        out.push_str(&format!("{},{}\n", fmt_f64(x), fmt_f64(y)));
    }
    out
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display()))),
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Io(e.to_string())),
    }
}

/// Runs one command. Every argument is validated and every result computed
/// before anything is written.
pub fn run(cli: Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Table(args) => cmd_table(args, stdout, stderr),
        Command::Recover(args) => cmd_recover(args, stdout),
        Command::PlotData(args) => cmd_plotdata(args, stdout),
        Command::Sweep(args) => cmd_sweep(args, stdout),
        Command::Multidim(args) => cmd_multidim(args, stdout),
    }
}

fn cmd_table(args: TableArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let cfg = encoder(&args.family, args.delta)?;
    if args.n_max == 0 {
        return Err(usage("--n-max must be at least 1"));
    }
    let format = args
        .format
        .or_else(|| args.out.as_deref().and_then(TableFormat::from_path))
        .unwrap_or(TableFormat::Json);
    let table = build_table(&cfg, args.n_max)?;
    let text = persistence::render(&table, format);
    let report = format!("{}\n", table.n_max());
    match &args.out {
        Some(path) => {
            emit(&text, Some(path), stdout)?;
            stdout.write_all(report.as_bytes())
        }
        None => {
            emit(&text, None, stdout)?;
            stderr.write_all(report.as_bytes())
        }
    }
    .map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_recover(args: RecoverArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
        return Err(usage(format!("--epsilon must be positive, got {}", args.epsilon)));
    }
    let target = match (args.method, args.target) {
        (RecoverMethod::Threshold, _) => 0.0,
        (_, Some(t)) => t,
        (_, None) => return Err(usage("--target is required for this method")),
    };
    let table = persistence::load(&args.table)?;
    let eps = args.epsilon;
    let result = match args.method {
        RecoverMethod::Match => recover_match(&table, target, eps)?,
        RecoverMethod::Binary => recover_binary(&table, target, eps)?,
        RecoverMethod::Spline => recover_spline(&table, target, eps)?,
        RecoverMethod::Threshold => recover_threshold(&table, eps, args.local_min)?,
    };
    let result = result.ok_or_else(|| CliError::NotFound(format!("no table row within {eps} of the target")))?;
    let json = serde_json::to_string(&RecoverReport::from(result)).expect("report serializes");
    writeln!(stdout, "{json}").map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_plotdata(args: PlotArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let cfg = encoder(&args.family, args.delta)?;
    let transition = TransitionFunction::sigmoid(args.sharpness)?;
    if args.points < 2 {
        return Err(usage("--points must be at least 2"));
    }
    let upper_n = |default: f64| -> Result<f64, CliError> {
        let n = args.n.unwrap_or(default);
        if !(n >= 0.0 && n.is_finite()) {
            return Err(usage(format!("--n must be non-negative, got {n}")));
        }
        Ok(n)
    };
    let integer_n = |default: f64| -> Result<u64, CliError> {
        let n = upper_n(default)?;
        if n.fract() != 0.0 || n < 1.0 {
            return Err(usage(format!("--n must be a positive integer here, got {n}")));
        }
        Ok(n as u64)
    };
    let range = args.range.as_deref().map(parse_range).transpose()?;

    let rows: Vec<(f64, f64)> = match args.what {
        PlotWhat::Counter => {
            let n = upper_n(5.0)?;
            let mode = match args.mode {
                CounterMode::Discrete => Mode::Discrete,
                CounterMode::Fractional => Mode::Fractional,
                CounterMode::Smooth => Mode::Smooth { transition },
            };
            let (lo, hi) = range.unwrap_or((0.0, n.ceil() + 3.0));
            cfg.with_mode(mode).counter_grid(n, lo, hi, args.points)?
        }
        PlotWhat::Imap => {
            let n = integer_n(30.0)?;
            build_table(&cfg, n)?.rows().iter().map(|&(k, v)| (k as f64, v)).collect()
        }
        PlotWhat::Partials => {
            let n = integer_n(30.0)?;
            let sums = cfg.family().partial_sums(n);
            sums.into_iter().enumerate().map(|(i, s)| ((i + 1) as f64, s)).collect()
        }
        PlotWhat::Smooth => {
            let n = upper_n(10.0)?;
            let (lo, hi) = range.unwrap_or((0.0, n));
            if lo < 0.0 {
                return Err(usage("smooth range must start at N >= 0"));
            }
            let smooth = cfg.with_mode(Mode::Smooth { transition });
            let step = (hi - lo) / (args.points - 1) as f64;
            (0..args.points)
                .map(|i| {
                    let x = if i + 1 == args.points { hi } else { lo + i as f64 * step };
                    Ok((x, integral_closed(&smooth, x)?))
                })
                .collect::<Result<_, integral_balance::Error>>()?
        }
    };
    emit(&xy_csv(rows), args.out.as_deref(), stdout)
}

fn cmd_sweep(args: SweepArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let amplitudes: Vec<f64> = parse_list(&args.amplitudes, "amplitude")?;
    if !(args.epsilon > 0.0 && args.epsilon.is_finite()) {
        return Err(usage(format!("--epsilon must be positive, got {}", args.epsilon)));
    }
    let table = persistence::load(&args.table)?;
    let points = noise_sweep(&table, args.true_n, args.epsilon, &amplitudes, args.trials, args.seed)?;
    let mut text = String::from("amplitude,accuracy\n");
    for p in points {
        text.push_str(&format!("{},{}\n", fmt_f64(p.amplitude), fmt_f64(p.accuracy)));
    }
    emit(&text, args.out.as_deref(), stdout)
}

fn cmd_multidim(args: MultidimArgs, stdout: &mut dyn Write) -> Result<(), CliError> {
    let n_max: Vec<u64> = parse_list(&args.n_max, "n-max")?;
    let cfg = MultiEncoderConfig::isotropic(parse_family(&args.family)?, n_max.len(), args.delta)?;
    if n_max.contains(&0) {
        return Err(usage("every --n-max component must be at least 1"));
    }
    let grid = integral_grid(&cfg, &n_max)?;
    let mut text: String = (1..=n_max.len()).map(|i| format!("N{i},")).collect();
    text.push_str("I\n");
    for (idx, v) in grid {
        for c in idx.components() {
            text.push_str(&format!("{c},"));
        }
        text.push_str(&fmt_f64(v));
        text.push('\n');
    }
    emit(&text, args.out.as_deref(), stdout)
}
