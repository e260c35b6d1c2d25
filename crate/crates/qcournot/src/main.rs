use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qcournot::analysis::GridSpec;
use qcournot::cli::{
    cmd_classical, cmd_loss_check, cmd_nash, cmd_payoff, cmd_regions, cmd_sweep,
    parse_distribution, ClassicalOp, NashMethod, PayoffMethod, RunConfig,
};
use qcournot::error::Result;
use qcournot::quantum::GamePoint;

/// Asymmetric Cournot duopoly with mixed measurement schemes: payoffs,
/// equilibria, transition boundary, and figure-grade sweep data.
#[derive(Parser)]
#[command(name = "qcournot", version, about)]
struct Cli {
    /// Config file path (overrides the QCOURNOT_CONFIG environment variable
    /// and ./qcournot.conf).
    #[arg(long, global = true, value_name = "FILE")]
    config: Option<PathBuf>,

    /// Write output to a file instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct PointArgs {
    /// Demand-minus-cost scale, k >= 1.
    #[arg(long)]
    k: Option<f64>,

    /// Beam-splitter angle in radians, in [0, pi/4).
    #[arg(long)]
    gamma: Option<f64>,

    /// Interpret --gamma (and sweep bounds) as fractions of pi/4.
    #[arg(long, default_value_t = false)]
    gamma_frac: bool,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long, default_value_t = 1.0)]
    k_min: f64,
    #[arg(long, default_value_t = 20.0)]
    k_max: f64,
    #[arg(long, default_value_t = 25)]
    k_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    gamma_min: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4 - 1e-6)]
    gamma_max: f64,
    #[arg(long, default_value_t = 25)]
    gamma_steps: usize,
    /// Interpret the gamma bounds as fractions of pi/4.
    #[arg(long, default_value_t = false)]
    gamma_frac: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum PayoffMethodArg {
    Closed,
    Series,
    Mc,
}

#[derive(Clone, Copy, ValueEnum)]
enum NashMethodArg {
    Closed,
    Numeric,
}

#[derive(Subcommand)]
enum Command {
    /// Expected payoffs at given squared strategies.
    Payoff {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long)]
        x1_sq: f64,
        #[arg(long)]
        x2_sq: f64,
        #[arg(long, value_enum, default_value_t = PayoffMethodArg::Closed)]
        method: PayoffMethodArg,
        /// Monte Carlo sample count (mc method).
        #[arg(long)]
        samples: Option<u64>,
        /// Monte Carlo seed (mc method).
        #[arg(long)]
        seed: Option<u64>,
        /// Neglected Poisson tail mass (series method).
        #[arg(long)]
        tail_tol: Option<f64>,
    },
    /// Nash equilibrium strategies and payoffs.
    Nash {
        #[command(flatten)]
        point: PointArgs,
        #[arg(long, value_enum, default_value_t = NashMethodArg::Closed)]
        method: NashMethodArg,
        /// Successive-change tolerance for the numeric method.
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Equilibrium sweep over a (k, gamma) grid, as CSV.
    Sweep {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Sweep restricted to the region-classification columns.
    Regions {
        #[command(flatten)]
        grid: GridArgs,
    },
    /// Verify payoff invariance under compensated photon loss.
    LossCheck {
        #[command(flatten)]
        point: PointArgs,
        /// Firm 1 displacement magnitude (not squared).
        #[arg(long)]
        x1: f64,
        /// Firm 2 displacement magnitude (not squared).
        #[arg(long)]
        x2: f64,
        /// Loss exponent kappa*t, >= 0.
        #[arg(long)]
        kappa_t: f64,
    },
    /// Classical-game computations.
    Classical {
        #[command(subcommand)]
        op: ClassicalCommand,
    },
}

#[derive(Subcommand)]
enum ClassicalCommand {
    /// Expected payoffs at given quantities.
    Payoffs {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long)]
        q1: f64,
        #[arg(long)]
        q2: f64,
        /// deterministic | poisson | const:<sigma2>
        #[arg(long, default_value = "poisson")]
        dist: String,
    },
    /// Mandel-Q parameter and g2(0) of the noise law at mean q2.
    MandelQ {
        #[arg(long)]
        q2: f64,
        #[arg(long, default_value = "poisson")]
        dist: String,
    },
    /// Nash equilibrium for an arbitrary noise law.
    Nash {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value = "poisson")]
        dist: String,
    },
    /// Closed-form Poisson-noise equilibrium.
    PoissonEq {
        #[arg(long)]
        k: Option<f64>,
    },
    /// Whether firm 2 out-earns firm 1 at equilibrium.
    Advantage {
        #[arg(long)]
        k: Option<f64>,
        #[arg(long, default_value = "poisson")]
        dist: String,
    },
}

fn resolve_gamma(gamma: Option<f64>, frac: bool, cfg: &RunConfig) -> f64 {
    let raw = gamma.unwrap_or(cfg.default_gamma);
    if frac {
        raw * std::f64::consts::FRAC_PI_4
    } else {
        raw
    }
}

fn game_point(point: &PointArgs, cfg: &RunConfig) -> Result<GamePoint> {
    GamePoint::new(
        point.k.unwrap_or(cfg.default_k),
        resolve_gamma(point.gamma, point.gamma_frac, cfg),
    )
}

fn grids(grid: &GridArgs) -> Result<(GridSpec, GridSpec)> {
    let scale = if grid.gamma_frac {
        std::f64::consts::FRAC_PI_4
    } else {
        1.0
    };
    Ok((
        GridSpec::new(grid.k_min, grid.k_max, grid.k_steps)?,
        GridSpec::new(
            grid.gamma_min * scale,
            grid.gamma_max * scale,
            grid.gamma_steps,
        )?,
    ))
}

fn run(cli: Cli, out: &mut dyn Write) -> Result<bool> {
    let cfg = RunConfig::load(cli.config.as_deref())?;
    match cli.command {
        Command::Payoff {
            point,
            x1_sq,
            x2_sq,
            method,
            samples,
            seed,
            tail_tol,
        } => {
            let g = game_point(&point, &cfg)?;
            let cfg = RunConfig {
                mc_samples: samples.unwrap_or(cfg.mc_samples),
                mc_seed: seed.unwrap_or(cfg.mc_seed),
                series_tail_tol: tail_tol.unwrap_or(cfg.series_tail_tol),
                ..cfg
            };
            let method = match method {
                PayoffMethodArg::Closed => PayoffMethod::Closed,
                PayoffMethodArg::Series => PayoffMethod::Series,
                PayoffMethodArg::Mc => PayoffMethod::Mc,
            };
            cmd_payoff(g, x1_sq, x2_sq, method, &cfg, out)?;
        }
        Command::Nash { point, method, tol } => {
            let g = game_point(&point, &cfg)?;
            let method = match method {
                NashMethodArg::Closed => NashMethod::Closed,
                NashMethodArg::Numeric => NashMethod::Numeric,
            };
            cmd_nash(g, method, tol, &cfg, out)?;
        }
        Command::Sweep { grid } => {
            let (k_grid, gamma_grid) = grids(&grid)?;
            cmd_sweep(k_grid, gamma_grid, &cfg, out)?;
        }
        Command::Regions { grid } => {
            let (k_grid, gamma_grid) = grids(&grid)?;
            cmd_regions(k_grid, gamma_grid, &cfg, out)?;
        }
        Command::LossCheck {
            point,
            x1,
            x2,
            kappa_t,
        } => {
            let g = game_point(&point, &cfg)?;
            return cmd_loss_check(g, x1, x2, kappa_t, &cfg, out);
        }
        Command::Classical { op } => {
            let (op, dist, k) = match op {
                ClassicalCommand::Payoffs { k, q1, q2, dist } => (
                    ClassicalOp::Payoffs { q1, q2 },
                    parse_distribution(&dist)?,
                    k.unwrap_or(cfg.default_k),
                ),
                ClassicalCommand::MandelQ { q2, dist } => (
                    ClassicalOp::MandelQ { q2 },
                    parse_distribution(&dist)?,
                    cfg.default_k,
                ),
                ClassicalCommand::Nash { k, dist } => (
                    ClassicalOp::Nash,
                    parse_distribution(&dist)?,
                    k.unwrap_or(cfg.default_k),
                ),
                ClassicalCommand::PoissonEq { k } => (
                    ClassicalOp::PoissonEq,
                    qcournot::classical::CountDistribution::Poisson,
                    k.unwrap_or(cfg.default_k),
                ),
                ClassicalCommand::Advantage { k, dist } => (
                    ClassicalOp::Advantage,
                    parse_distribution(&dist)?,
                    k.unwrap_or(cfg.default_k),
                ),
            };
            cmd_classical(op, &dist, k, &cfg, out)?;
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let out_path = cli.out.clone();

    let result = match &out_path {
        Some(path) => {
            let file = match File::create(path) {
                Ok(f) => f,
                Err(e) => {
                    eprintln!("error: cannot write {}: {e}", path.display());
                    return ExitCode::FAILURE;
                }
            };
            let mut writer = BufWriter::new(file);
            run(cli, &mut writer).and_then(|ok| {
                writer.flush()?;
                Ok(ok)
            })
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            run(cli, &mut lock)
        }
    };

    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
