//! Batch front end: evaluates scenarios, runs parameter sweeps and figure
//! reproductions, and emits deterministic CSV or JSON tables.

mod figures;
mod report;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hybridnet::absorption::{load_line_catalog, molecular_absorption_coefficient, AbsorptionMedium};
use hybridnet::coverage::BlockageModel;
use hybridnet::model::Scenario;
use hybridnet::montecarlo::SimConfig;
use hybridnet::Error;

use report::{
    analytic_report, montecarlo_report, strict_mismatches, EvalOptions, Metric, ALL_METRICS,
};
use table::{Cell, Table};

#[derive(Parser)]
#[command(name = "hybridnet", version, about = "Hybrid RF/THz network performance tables")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct Common {
    /// Base RNG seed for Monte-Carlo runs.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Monte-Carlo trials per estimate.
    #[arg(long, global = true, default_value_t = 100_000)]
    trials: u64,
    /// Worker threads for the simulator; 0 keeps the runtime default.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    /// Exit nonzero when analytic and simulated values disagree beyond the
    /// sampling CI plus the documented model residual.
    #[arg(long, global = true)]
    strict: bool,
    /// Emit JSON instead of CSV.
    #[arg(long, global = true)]
    json: bool,
    /// Write the table to a file instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the molecular absorption coefficient over a frequency range.
    Absorption {
        /// Spectral line catalog CSV.
        #[arg(long)]
        catalog: PathBuf,
        /// Lower frequency bound, Hz.
        #[arg(long)]
        f_lo: f64,
        /// Upper frequency bound, Hz.
        #[arg(long)]
        f_hi: f64,
        /// Number of log-spaced sample points.
        #[arg(long, default_value_t = 50)]
        points: usize,
    },
    /// Evaluate every metric for one scenario file.
    Evaluate {
        /// Scenario TOML file.
        #[arg(long)]
        scenario: PathBuf,
        /// Append a Monte-Carlo row and a 95% CI row.
        #[arg(long)]
        validate: bool,
    },
    /// Sweep one scenario variable and tabulate selected metrics.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// One of: velocity, ka, lambda_T, lambda_R, rate_threshold,
        /// blocker_intensity.
        #[arg(long)]
        variable: String,
        /// Comma-separated, strictly increasing values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        /// Comma-separated metric subset; defaults to all metrics.
        #[arg(long, value_delimiter = ',')]
        metrics: Vec<String>,
        /// Add a Monte-Carlo row per sweep value.
        #[arg(long)]
        validate: bool,
    },
    /// Emit the data behind one of the published-figure presets.
    Reproduce {
        /// One of: fig3a, fig3b, fig4, fig5, fig6, fig7, fig8, fig9.
        #[arg(long)]
        figure: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.common.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.common.threads)
            .build_global()
        {
            eprintln!("error: cannot configure {} threads: {e}", cli.common.threads);
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("error: {failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}

enum Failure {
    /// Bad inputs: scenario, sweep arguments, catalog, unknown figure.
    Input(String),
    /// The numerical core could not produce a trustworthy value.
    Numerical(String),
    /// Strict mode: analytic and simulated tables disagree.
    Mismatch(Vec<String>),
    Io(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Input(_) | Failure::Io(_) => 2,
            Failure::Numerical(_) => 3,
            Failure::Mismatch(_) => 4,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Input(m) | Failure::Io(m) | Failure::Numerical(m) => write!(f, "{m}"),
            Failure::Mismatch(items) => {
                writeln!(f, "strict validation failed:")?;
                for item in items {
                    writeln!(f, "  {item}")?;
                }
                Ok(())
            }
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::ConvergenceFailure { .. } | Error::BracketError { .. } => {
                Failure::Numerical(e.to_string())
            }
            _ => Failure::Input(e.to_string()),
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let sim = SimConfig {
        trials: cli.common.trials,
        seed: cli.common.seed,
        ..SimConfig::default()
    };
    sim.validate()?;
    let (table, mismatches) = match &cli.command {
        Command::Absorption {
            catalog,
            f_lo,
            f_hi,
            points,
        } => (cmd_absorption(catalog, *f_lo, *f_hi, *points)?, Vec::new()),
        Command::Evaluate { scenario, validate } => {
            cmd_evaluate(scenario, *validate, &sim)?
        }
        Command::Sweep {
            scenario,
            variable,
            values,
            metrics,
            validate,
        } => cmd_sweep(scenario, variable, values, metrics, *validate, &sim)?,
        Command::Reproduce { figure } => figures::reproduce(figure, &sim, true)
            .ok_or_else(|| {
                Failure::Input(format!(
                    "unknown figure `{figure}`; expected one of {}",
                    figures::known_figures().join(", ")
                ))
            })??,
    };
    emit(cli, &table)?;
    if cli.common.strict && !mismatches.is_empty() {
        return Err(Failure::Mismatch(mismatches));
    }
    Ok(())
}

fn emit(cli: &Cli, table: &Table) -> Result<(), Failure> {
    let rendered = if cli.common.json {
        table.to_json()
    } else {
        table.to_csv()
    };
    match &cli.common.out {
        Some(path) => std::fs::write(path, rendered)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

fn load_scenario(path: &PathBuf) -> Result<Scenario, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Ok(Scenario::from_toml_str(&text)?)
}

fn cmd_absorption(
    catalog: &PathBuf,
    f_lo: f64,
    f_hi: f64,
    points: usize,
) -> Result<Table, Failure> {
    if !(f_lo > 0.0 && f_hi >= f_lo) {
        return Err(Failure::Input(format!(
            "invalid frequency range [{f_lo}, {f_hi}]"
        )));
    }
    if points == 0 {
        return Err(Failure::Input("points must be >= 1".into()));
    }
    let lines = load_line_catalog(catalog)?;
    let medium = AbsorptionMedium::new(lines, Default::default());
    let mut table = Table::new(&["frequency_hz", "absorption_per_m"]);
    table.note(format!("catalog: {} lines", medium.lines.len()));
    for i in 0..points {
        let f = if points == 1 {
            f_lo
        } else {
            f_lo * (f_hi / f_lo).powf(i as f64 / (points - 1) as f64)
        };
        let ka = molecular_absorption_coefficient(&medium, f)?;
        table.push(vec![Cell::Num(f), Cell::Num(ka)]);
    }
    Ok(table)
}

fn cmd_evaluate(
    path: &PathBuf,
    validate: bool,
    sim: &SimConfig,
) -> Result<(Table, Vec<String>), Failure> {
    let scenario = load_scenario(path)?;
    let opts = EvalOptions::default();
    let mut columns = vec!["method"];
    columns.extend(ALL_METRICS.iter().map(|m| m.name()));
    let mut table = Table::new(&columns);
    let analytic = analytic_report(&scenario, &ALL_METRICS, &opts)?;
    let mut row = vec![Cell::from("analytic")];
    row.extend(analytic.cells(&ALL_METRICS));
    table.push(row);
    let mut mismatches = Vec::new();
    if validate {
        table.note(format!("montecarlo: {} trials, seed {}", sim.trials, sim.seed));
        table.note(format!(
            "strict band: 1.96 * binomial SE + {} model residual",
            report::MODEL_RESIDUAL
        ));
        let simulated = montecarlo_report(&scenario, &ALL_METRICS, &opts, sim)?;
        let mut row = vec![Cell::from("montecarlo")];
        row.extend(simulated.cells(&ALL_METRICS));
        table.push(row);
        let mut row = vec![Cell::from("ci95")];
        row.extend(ALL_METRICS.iter().map(|m| simulated.get(*m).ci_cell()));
        table.push(row);
        mismatches = strict_mismatches("evaluate", &analytic, &simulated, &ALL_METRICS);
    }
    Ok((table, mismatches))
}

/// Apply one sweep value to a copy of the base scenario. Blockage sweeps
/// leave the scenario itself untouched and widen the evaluation options.
fn apply_variable(
    base: &Scenario,
    variable: &str,
    value: f64,
) -> Option<(Scenario, EvalOptions)> {
    let mut s = *base;
    let mut opts = EvalOptions::default();
    match variable {
        "velocity" => s.mobility.speed = value,
        "ka" => s.thz.absorption = value,
        "lambda_T" => s.thz.intensity = value,
        "lambda_R" => s.rf.intensity = value,
        "rate_threshold" => s.rate_threshold = value,
        "blocker_intensity" => {
            opts.blockage = Some(BlockageModel {
                blocker_intensity: value,
                mean_length: 2.0,
                mean_width: 1.0,
            });
        }
        _ => return None,
    }
    Some((s, opts))
}

fn cmd_sweep(
    path: &PathBuf,
    variable: &str,
    values: &[f64],
    metric_names: &[String],
    validate: bool,
    sim: &SimConfig,
) -> Result<(Table, Vec<String>), Failure> {
    let base = load_scenario(path)?;
    if values.is_empty() {
        return Err(Failure::Input("sweep needs at least one value".into()));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Input(
            "sweep values must be strictly increasing".into(),
        ));
    }
    let metrics: Vec<Metric> = if metric_names.is_empty() {
        ALL_METRICS.to_vec()
    } else {
        metric_names
            .iter()
            .map(|name| {
                Metric::parse(name)
                    .ok_or_else(|| Failure::Input(format!("unknown metric `{name}`")))
            })
            .collect::<Result<_, _>>()?
    };
    let mut columns = vec![variable];
    columns.extend(metrics.iter().map(|m| m.name()));
    columns.push("method");
    let mut table = Table::new(&columns);
    if variable == "blocker_intensity" {
        table.note("blockers: mean length 2 m, mean width 1 m");
    }
    let mut mismatches = Vec::new();
    for &value in values {
        let (scenario, opts) = apply_variable(&base, variable, value).ok_or_else(|| {
            Failure::Input(format!(
                "unknown sweep variable `{variable}`; expected velocity, ka, lambda_T, \
                 lambda_R, rate_threshold or blocker_intensity"
            ))
        })?;
        let analytic = analytic_report(&scenario, &metrics, &opts)?;
        let mut row = vec![Cell::Num(value)];
        row.extend(analytic.cells(&metrics));
        row.push("analytic".into());
        table.push(row);
        if validate {
            let simulated = montecarlo_report(&scenario, &metrics, &opts, sim)?;
            let mut row = vec![Cell::Num(value)];
            row.extend(simulated.cells(&metrics));
            row.push("montecarlo".into());
            table.push(row);
            mismatches.extend(strict_mismatches(
                &format!("{variable}={value}"),
                &analytic,
                &simulated,
                &metrics,
            ));
        }
    }
    Ok((table, mismatches))
}
