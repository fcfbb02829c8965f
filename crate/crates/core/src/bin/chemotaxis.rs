use std::path::{Path, PathBuf};
use std::process::ExitCode;

use chemotaxis_ap::experiment::run::level_sizes;
use chemotaxis_ap::experiment::{
    blowup_histories, converge, eps_convergence, run_scenario, scenario, scenario_names, sweep_mass,
    ExperimentConfig, ModelKind, RunStatus,
};
use chemotaxis_ap::macro_ks::{detect_blowup, BlowupCriterion};
use chemotaxis_ap::Error;
use clap::{Args, Parser, Subcommand};

/// Kinetic chemotaxis simulations and their Keller-Segel limits.
#[derive(Parser)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Config file or scenario name (see `list-scenarios`).
    config: String,
    /// Override a config field, e.g. `--set n_x=800`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Output directory for the CSV files.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one configuration to t_max.
    Run(Common),
    /// Grid convergence table at t_max on n, 2n, 4n, ... cells.
    Converge {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 4)]
        levels: usize,
    },
    /// Distance to the local equilibrium and to the Keller-Segel density
    /// for several ε.
    EpsSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        eps: Vec<f64>,
    },
    /// One run per total mass.
    SweepMass {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        masses: Vec<f64>,
    },
    ListScenarios,
}

fn load(common: &Common) -> chemotaxis_ap::Result<ExperimentConfig> {
    let path = Path::new(&common.config);
    let mut config = if path.is_file() {
        ExperimentConfig::from_file(path)?
    } else {
        scenario(&common.config)?
    };
    config.apply_overrides(&common.overrides)?;
    if let Some(out) = &common.out {
        config.output = Some(out.clone());
    }
    config.validate()?;
    Ok(config)
}

fn execute(command: Command) -> chemotaxis_ap::Result<ExitCode> {
    match command {
        Command::ListScenarios => {
            for (name, summary) in scenario_names() {
                println!("{name:<24} {summary}");
            }
        }
        Command::Run(common) => {
            let config = load(&common)?;
            let summary = run_scenario(&config)?;
            let f = summary.final_record;
            println!(
                "{}: t = {}, max rho = {:.6e}, mass = {:.12}, refinements = {}",
                config.name,
                f.t,
                f.max_rho,
                f.total_mass,
                summary.refinements.len()
            );
            if let Some(s) = &summary.selfsim {
                println!("self-similar: final tau = {:.4}", s.tau.last().copied().unwrap_or(0.0));
            }
            if summary.status == RunStatus::RefinementCap {
                eprintln!("refinement cap of {} levels reached: blow-up suspected", config.max_levels);
                return Ok(ExitCode::from(4));
            }
        }
        Command::Converge { common, levels } => {
            let config = load(&common)?;
            let rows = converge(&config, levels)?;
            println!("{:>14} {:>14} {:>8}", "dx", "e1", "order");
            for r in &rows {
                let order = r.order.map_or_else(|| "-".to_string(), |o| format!("{o:.3}"));
                println!("{:>14.6e} {:>14.6e} {:>8}", r.dx, r.e1, order);
            }
            if config.model == ModelKind::Ks1D {
                let hist = blowup_histories(&config, &level_sizes(&config, levels))?;
                let report = detect_blowup(&hist, config.mass, config.x_max - config.x_min, &BlowupCriterion::default())?;
                println!("blow-up: {:?}, t_b = {:?}", report.status, report.t_b);
            }
        }
        Command::EpsSweep { common, eps } => {
            let config = load(&common)?;
            let sweep = eps_convergence(&config, &eps)?;
            println!("{:>10} {:>16} {:>16}", "eps", "|f - rho F|_2", "|rho - rho0|_1");
            for r in &sweep.rows {
                println!("{:>10} {:>16.6e} {:>16.6e}", r.eps, r.dist_f_rho_f, r.dist_rho_rho0);
            }
            if let Some(p) = sweep.order_f {
                println!("fitted order in eps: {p:.3}");
            }
        }
        Command::SweepMass { common, masses } => {
            let config = load(&common)?;
            let rows = sweep_mass(&config, &masses)?;
            println!("{:>8} {:>10} {:>14} {:>14} {:>14}", "mass", "t_end", "max/M start", "max/M end", "max/M peak");
            for r in &rows {
                println!(
                    "{:>8} {:>10.4} {:>14.6e} {:>14.6e} {:>14.6e}",
                    r.mass, r.t_end, r.initial, r.last, r.peak
                );
            }
            if rows.iter().any(|r| r.status == RunStatus::RefinementCap) {
                return Ok(ExitCode::from(4));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Config(_) | Error::InvalidParameter(_) => ExitCode::from(2),
                Error::NonFinite { .. } => ExitCode::from(3),
                Error::RefinementCap { .. } => ExitCode::from(4),
                _ => ExitCode::from(1),
            }
        }
    }
}
