use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sisfront::commands::{self, Loaded, R0Mode, Report};
use sisfront::output::OutputDir;
use sisfront::{CliError, RunConfig};

const CONFIG_HELP: &str = "\
Config (JSON, unknown keys rejected):
  required: d_I, alpha, mu, n_star, h0, beta_expr, gamma_expr, beta_inf, gamma_inf, i0_expr
  numerics:    dt 0.01, n 200, t_end 20, output_stride 100, r0_stride 10,
               newton_tol 1e-10, newton_max_iter 25, outer_tol 1e-9, outer_max_iter 20,
               clip_tol 1e-8, max_halvings 10
  spectral:    cells_per_unit 20, min_cells 200, max_cells 8000, eigen_rtol 1e-12,
               r0_rtol 1e-10, max_sweeps 10000
  classify:    trailing_fraction 0.2, front_tolerance 1e-6, mass_tolerance 1e-5, min_horizon 0
  threshold:   bracket [1, 6], width 0.25, horizon 20, max_horizon 160, workers 0 (= all cores)
  equilibrium: L 50, cells 2000, tol 1e-10, max_iter 100, window 5
  semiwave:    epsilon 1e-8, rtol 1e-10, atol 1e-12, root_rtol 1e-9, bracket_margin 1e-6,
               scan_points 64, max_steps 1000000
Expressions use x, pi, + - * / ^, and sin cos tan exp log sqrt abs tanh.
`sisfront default-config` prints a complete reference config.

Exit codes: 0 success, 1 invalid config or model, 2 numerical failure, 3 inconclusive.";

#[derive(Debug, Parser)]
#[command(name = "sisfront", version, about = "Free-boundary SIS epidemic laboratory", after_help = CONFIG_HELP)]
struct Cli {
    /// Directory for CSV/JSON artifacts and manifest.json.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ConfigArg {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate the free-boundary problem and export fronts, profiles and R0F(t).
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        /// Overrides numerics.t_end.
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Reproduction number on an interval, along a run, or a property probe.
    R0 {
        #[command(flatten)]
        config: ConfigArg,
        /// Interval ends; defaults to (-h0, h0).
        #[arg(long, num_args = 2, value_names = ["G", "H"], allow_negative_numbers = true)]
        interval: Option<Vec<f64>>,
        /// Sample R0F(t) along a simulation instead.
        #[arg(long, conflicts_with = "probe")]
        series: bool,
        /// Sample R0 along ladders in alpha, d_I and nested intervals.
        #[arg(long)]
        probe: bool,
    },
    /// Semi-wave speeds of both fronts.
    Semiwave {
        #[command(flatten)]
        config: ConfigArg,
        /// Also write the (z, q) profiles.
        #[arg(long)]
        profile: bool,
    },
    /// Endemic equilibrium on [-L, L].
    Equilibrium {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long = "L", value_name = "L")]
        l: Option<f64>,
        #[arg(long)]
        cells: Option<usize>,
    },
    /// Simulate and classify as spreading, vanishing or undetermined.
    Classify {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Enclose the threshold mu* by concurrent bisection.
    Threshold {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, num_args = 2, value_names = ["LO", "HI"])]
        bracket: Option<Vec<f64>>,
        #[arg(long)]
        width: Option<f64>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Run the reference examples: mu in {1, 6} with alpha = +-1.5.
    #[command(name = "reproduce-paper")]
    Reproduce {
        /// Base config; the reference heterogeneous set when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        t_end: Option<f64>,
    },
    /// Print the reference configuration with every default filled in.
    DefaultConfig,
}

fn load(arg: &ConfigArg) -> Result<Loaded, CliError> {
    let (config, bytes) = RunConfig::load(&arg.config)?;
    Ok(Loaded::from_bytes(config, &bytes))
}

fn pair(v: Option<Vec<f64>>) -> Option<(f64, f64)> {
    v.map(|v| (v[0], v[1]))
}

fn name(command: &Command) -> &'static str {
    match command {
        Command::Simulate { .. } => "simulate",
        Command::R0 { .. } => "r0",
        Command::Semiwave { .. } => "semiwave",
        Command::Equilibrium { .. } => "equilibrium",
        Command::Classify { .. } => "classify",
        Command::Threshold { .. } => "threshold",
        Command::Reproduce { .. } => "reproduce-paper",
        Command::DefaultConfig => "default-config",
    }
}

fn dispatch(command: Command, out: &mut OutputDir) -> Result<Report, CliError> {
    match command {
        Command::Simulate { config, t_end } => commands::simulate(&load(&config)?, out, t_end),
        Command::R0 {
            config,
            interval,
            series,
            probe,
        } => {
            let mode = if series {
                R0Mode::Series
            } else if probe {
                R0Mode::Probe
            } else {
                R0Mode::Interval
            };
            commands::r0(&load(&config)?, out, mode, pair(interval))
        }
        Command::Semiwave { config, profile } => commands::semiwave(&load(&config)?, out, profile),
        Command::Equilibrium { config, l, cells } => commands::equilibrium(&load(&config)?, out, l, cells),
        Command::Classify { config, t_end } => commands::classify(&load(&config)?, out, t_end),
        Command::Threshold {
            config,
            bracket,
            width,
            workers,
        } => commands::threshold(&load(&config)?, out, pair(bracket), width, workers),
        Command::Reproduce { config, t_end } => {
            let base = match config {
                Some(path) => RunConfig::load(&path)?.0,
                None => RunConfig::reference(6.0, 1.5),
            };
            commands::reproduce_reference(&base, out, t_end)
        }
        Command::DefaultConfig => unreachable!("handled before the output directory is created"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Command::DefaultConfig = cli.command {
        let text = serde_json::to_string_pretty(&RunConfig::reference(6.0, 1.5)).expect("config serialises");
        println!("{text}");
        return ExitCode::SUCCESS;
    }
    let command = name(&cli.command);
    let mut out = match OutputDir::create(&cli.out) {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = dispatch(cli.command, &mut out);
    if !out.artifacts().is_empty() {
        if let Err(e) = out.finish(command) {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    }
    match result {
        Ok(report) => {
            for line in &report.lines {
                println!("{line}");
            }
            match report.inconclusive {
                Some(msg) => {
                    eprintln!("inconclusive: {msg}");
                    ExitCode::from(3)
                }
                None => ExitCode::SUCCESS,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
