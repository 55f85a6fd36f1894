//! Thin command-line front end over the experiment harness. All heavy
//! lifting lives in the library; each subcommand loads a JSON config,
//! applies flag overrides, runs, and prints a short summary.

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

use minsi::geometry::SubArrayKind;
use minsi::harness::{
    run_beampattern, run_gen_channel, run_optimize, run_sweep, ExperimentConfig, Overrides,
};
use minsi::metric::capped_db;

/// Worker-count override, e.g. `MINSI_WORKERS=8`.
const WORKERS_ENV: &str = "MINSI_WORKERS";

#[derive(Parser)]
#[command(
    name = "minsi",
    version,
    about = "Min-SI beamforming with sub-array selection for full-duplex massive MIMO"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Lin4,
    Lin8,
}

impl From<KindArg> for SubArrayKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Lin4 => SubArrayKind::Lin4,
            KindArg::Lin8 => SubArrayKind::Lin8,
        }
    }
}

#[derive(Args)]
struct Common {
    /// Experiment config JSON; built-in defaults when omitted.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Seed override: the swarm seed, or the channel seed for gen-channel.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
    /// Output directory override.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Tensor file to load instead of the configured channel source.
    #[arg(long, value_name = "PATH")]
    channel: Option<PathBuf>,
    /// Bandwidth override in Hz.
    #[arg(long, value_name = "HZ")]
    bandwidth_hz: Option<f64>,
    /// Sub-array kind override.
    #[arg(long, value_enum)]
    kind: Option<KindArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Generate the configured synthetic SI channel tensor file.
    GenChannel(Common),
    /// Run one min-SI optimization with its DBF baseline.
    Optimize(Common),
    /// Compare DBF and min-SI over the full angle grid.
    Sweep(Common),
    /// Export DBF beampatterns for both sub-array kinds.
    Beampattern(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::GenChannel(c)
            | Command::Optimize(c)
            | Command::Sweep(c)
            | Command::Beampattern(c) => c,
        }
    }
}

fn workers_from_env() -> minsi::Result<Option<usize>> {
    match std::env::var(WORKERS_ENV) {
        Err(_) => Ok(None),
        Ok(raw) if raw.trim().is_empty() => Ok(None),
        Ok(raw) => raw.trim().parse::<usize>().map(Some).map_err(|_| {
            minsi::Error::Config(format!("{WORKERS_ENV}={raw:?} is not a worker count"))
        }),
    }
}

fn resolve_config(cmd: &Command) -> minsi::Result<ExperimentConfig> {
    let common = cmd.common();
    let mut cfg = ExperimentConfig::load(common.config.as_deref())?;
    cfg.apply_overrides(&Overrides {
        seed: common.seed,
        out_dir: common.out.clone(),
        channel_path: common.channel.clone(),
        bandwidth_hz: common.bandwidth_hz,
        kind: common.kind.map(SubArrayKind::from),
        workers: workers_from_env()?,
        seed_targets_channel: matches!(cmd, Command::GenChannel(_)),
    });
    Ok(cfg)
}

fn run(cli: Cli) -> minsi::Result<()> {
    let cfg = resolve_config(&cli.command)?;
    match cli.command {
        Command::GenChannel(_) => {
            let report = run_gen_channel(&cfg)?;
            println!(
                "wrote {} ({}x{}x{} entries, {} bytes)",
                report.path.display(),
                report.rx_count,
                report.tx_count,
                report.freq_count,
                report.file_bytes
            );
            println!("sidecar {}", report.sidecar_path.display());
            println!("sha256 {}", report.sha256);
        }
        Command::Optimize(_) => {
            let report = run_optimize(&cfg)?;
            let sol = &report.outcome.solution;
            let dbf = &report.outcome.dbf;
            println!(
                "dbf    [{}]: a_si {:.2} dB (pair tx {}, rx {})",
                dbf.policy,
                capped_db(dbf.a_si_db),
                dbf.tx_index,
                dbf.rx_index
            );
            println!(
                "min-si: a_si {:.2} dB at ({:.2} deg, {:.2} deg), pair (tx {}, rx {}), degradation {:.3}/{:.3} dB",
                capped_db(sol.a_si_db),
                sol.perturb_d_deg,
                sol.perturb_u_deg,
                sol.tx_index,
                sol.rx_index,
                sol.degradation_d_db,
                sol.degradation_u_db
            );
            println!(
                "gain over dbf {:.2} dB over {} samples",
                capped_db(sol.a_si_db - dbf.a_si_db),
                report.num_samples
            );
            if let Some(oracle) = &report.oracle {
                println!(
                    "oracle: a_si {:.2} dB at ({:.2} deg, {:.2} deg), pair (tx {}, rx {}), {} evaluations",
                    capped_db(oracle.a_si_db),
                    oracle.theta_d_deg,
                    oracle.theta_u_deg,
                    oracle.tx_index,
                    oracle.rx_index,
                    oracle.evaluations
                );
            }
            println!("solution {}", report.solution_path.display());
            println!("trace    {}", report.trace_path.display());
        }
        Command::Sweep(_) => {
            let report = run_sweep(&cfg)?;
            println!(
                "{} cells: dbf {:.1}..{:.1} dB (mean {:.1}), min-si {:.1}..{:.1} dB (mean {:.1})",
                report.cells.len(),
                report.dbf_stats.min_db,
                report.dbf_stats.max_db,
                report.dbf_stats.mean_db,
                report.min_si_stats.min_db,
                report.min_si_stats.max_db,
                report.min_si_stats.mean_db
            );
            println!(
                "gain over dbf: mean {:.1} dB, max {:.1} dB",
                report.gain_stats.mean_db, report.gain_stats.max_db
            );
            println!("matrix  {}", report.csv_path.display());
            println!("summary {}", report.summary_path.display());
        }
        Command::Beampattern(_) => {
            let report = run_beampattern(&cfg)?;
            for c in &report.curves {
                println!(
                    "{} steer {:6.1} deg: peak {:.2} dB, first-null beamwidth {:.2} deg",
                    c.kind, c.steer_deg, c.peak_gain_db, c.first_null_beamwidth_deg
                );
            }
            println!("patterns {}", report.csv_path.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
