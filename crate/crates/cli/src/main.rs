use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use cogcap::commands::{self, EXIT_INVALID_CONFIG};
use cogcap::figures;
use cogcap::spec::{ExperimentSpec, SweepSpec};
use cogcap_core::analytic::{CrossPowerMode, ScalingVariable};
use cogcap_core::scenario::Regime;

/// Transmission-capacity experiments for a multi-antenna secondary network
/// sharing spectrum with a primary ad-hoc network.
#[derive(Parser)]
#[command(name = "cogcap", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON experiment spec; command-line flags override its fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Field override, e.g. --set lambda_p=0.005 (repeatable).
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    set: Vec<String>,

    /// Output directory for CSV/JSON/SVG artifacts.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Monte Carlo trials per estimate.
    #[arg(long, global = true)]
    trials: Option<u64>,

    /// Master seed; every trial generator derives from it. The COGCAP_SEED
    /// environment variable overrides this.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Cross-power form of the single-antenna intensity expression.
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,

    /// Antenna regime.
    #[arg(long, global = true, value_enum)]
    regime: Option<RegimeArg>,

    /// Worker threads for trial execution (results are identical for any
    /// count).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Record measured wall time in result rows (breaks byte-level
    /// reproducibility).
    #[arg(long, global = true)]
    timings: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    PaperLiteral,
    Corrected,
}

#[derive(Clone, Copy, ValueEnum)]
enum RegimeArg {
    Baseline,
    Siso,
    Miso,
    Mimo,
}

#[derive(Clone, Copy, ValueEnum)]
enum VariableArg {
    N,
    M,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic maximum secondary intensity and capacity, with an optional
    /// Monte Carlo cross-check.
    Capacity {
        /// Also bisect the intensity by Monte Carlo.
        #[arg(long)]
        mc: bool,
    },
    /// Evaluate the capacity along one scenario axis.
    Sweep {
        /// Scenario field to sweep.
        #[arg(long)]
        axis: Option<String>,
        /// Comma-separated axis values.
        #[arg(long, value_delimiter = ',')]
        values: Vec<f64>,
        #[arg(long)]
        mc: bool,
    },
    /// Run the distributional validation suites (beamformer/combiner gain
    /// laws, nulling residuals, field equivalences).
    Validate,
    /// Measure the intensity scaling in the antenna count and fit the
    /// log-log exponent.
    Scaling {
        /// Antenna counts to probe.
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Fraction of DOF spent on nulling / cancelation.
        #[arg(long)]
        theta: Option<f64>,
        /// Which antenna count grows.
        #[arg(long, value_enum, default_value = "n")]
        variable: VariableArg,
        /// Relative tolerance of the bisection.
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Reproduce the reference experiment shapes (fig3..fig6 or all).
    Figures {
        #[arg(default_value = "all")]
        which: String,
    },
}

fn build_spec(cli: &Cli) -> cogcap_core::Result<ExperimentSpec> {
    let mut spec = match &cli.config {
        Some(path) => ExperimentSpec::from_file(path)?,
        None => ExperimentSpec::default(),
    };
    for kv in &cli.set {
        let (key, value) = kv.split_once('=').ok_or_else(|| {
            cogcap_core::Error::InvalidParameter(format!("--set needs KEY=VALUE, got {kv:?}"))
        })?;
        spec.apply_set(key.trim(), value.trim())?;
    }
    if let Some(out) = &cli.out {
        spec.out_dir = Some(out.clone());
    }
    if let Some(trials) = cli.trials {
        spec.plan.trials = trials;
    }
    if let Some(seed) = cli.seed {
        spec.plan.master_seed = seed;
    }
    if let Some(mode) = cli.mode {
        spec.mode = Some(match mode {
            ModeArg::PaperLiteral => CrossPowerMode::PaperLiteral,
            ModeArg::Corrected => CrossPowerMode::Corrected,
        });
    }
    if let Some(regime) = cli.regime {
        spec.regime = Some(match regime {
            RegimeArg::Baseline => Regime::Baseline,
            RegimeArg::Siso => Regime::Siso,
            RegimeArg::Miso => Regime::Miso,
            RegimeArg::Mimo => Regime::Mimo,
        });
    }
    if cli.timings {
        spec.timings = true;
    }
    if let Ok(env_seed) = std::env::var("COGCAP_SEED") {
        spec.plan.master_seed = env_seed.parse().map_err(|_| {
            cogcap_core::Error::InvalidParameter(format!(
                "COGCAP_SEED must be an integer, got {env_seed:?}"
            ))
        })?;
    }
    Ok(spec)
}

fn run(cli: Cli) -> cogcap_core::Result<i32> {
    if let Some(workers) = cli.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build_global()
            .map_err(|e| cogcap_core::Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    let mut spec = build_spec(&cli)?;
    match &cli.command {
        Command::Capacity { mc } => {
            if *mc {
                spec.mc = true;
            }
            commands::run_capacity(&spec)
        }
        Command::Sweep { axis, values, mc } => {
            if *mc {
                spec.mc = true;
            }
            if let Some(axis) = axis {
                spec.sweep = Some(SweepSpec { axis: axis.clone(), values: values.clone() });
            } else if !values.is_empty() {
                if let Some(sw) = &mut spec.sweep {
                    sw.values = values.clone();
                }
            }
            commands::run_sweep(&spec)
        }
        Command::Validate => commands::run_validate(&spec),
        Command::Scaling { sizes, theta, variable, tolerance } => {
            if !sizes.is_empty() {
                spec.sizes = Some(sizes.clone());
            }
            if let Some(theta) = theta {
                spec.theta = Some(*theta);
            }
            if let Some(tol) = tolerance {
                spec.search_tolerance = Some(*tol);
            }
            let variable = match variable {
                VariableArg::N => ScalingVariable::N,
                VariableArg::M => ScalingVariable::M,
            };
            commands::run_scaling(&spec, variable)
        }
        Command::Figures { which } => figures::run_figures(&spec, which),
    }
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = commands::exit_code_for(&e);
            if code == EXIT_INVALID_CONFIG {
                // distinguishes config errors in logs
                eprintln!("hint: check the config file and --set overrides");
            }
            code
        }
    };
    std::process::exit(code);
}
