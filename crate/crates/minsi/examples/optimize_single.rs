//! One full min-SI optimization at the default directions (downlink
//! 105 degrees, uplink 45 degrees) on a synthetic channel: DBF baseline,
//! swarm search, convergence trace, and the solution artifacts.
//!
//! ```sh
//! cargo run --release --example optimize_single
//! ```

use minsi::channel::{FrequencyGrid, SyntheticParams};
use minsi::geometry::ArrayGeometry;
use minsi::harness::{run_optimize, ChannelSource, ExperimentConfig, PsoParams};
use minsi::metric::capped_db;

fn main() -> minsi::Result<()> {
    let cfg = ExperimentConfig {
        channel: ChannelSource::Synthetic {
            geometry: ArrayGeometry::default(),
            grid: FrequencyGrid::new(3.45e9, 3.55e9, 161)?,
            params: SyntheticParams::default(),
            seed: 7,
        },
        bandwidth_hz: 20e6,
        theta_d_deg: 105.0,
        theta_u_deg: 45.0,
        pso: PsoParams {
            seed: 1,
            ..PsoParams::default()
        },
        out_dir: "examples_out/optimize_single".into(),
        ..ExperimentConfig::default()
    };

    let report = run_optimize(&cfg)?;
    let dbf = &report.outcome.dbf;
    let sol = &report.outcome.solution;

    println!(
        "desired directions: downlink {} deg, uplink {} deg; {} samples over {} MHz",
        cfg.theta_d_deg,
        cfg.theta_u_deg,
        report.num_samples,
        cfg.bandwidth_hz / 1e6
    );
    println!(
        "dbf [{}]  : {:.2} dB suppression, beams exactly on target",
        dbf.policy,
        capped_db(dbf.a_si_db)
    );
    println!(
        "min-si    : {:.2} dB suppression at ({:.2}, {:.2}) deg, sub-arrays (tx {}, rx {})",
        capped_db(sol.a_si_db),
        sol.perturb_d_deg,
        sol.perturb_u_deg,
        sol.tx_index,
        sol.rx_index
    );
    println!(
        "            perturbations ({:+.2}, {:+.2}) deg cost only {:.3} / {:.3} dB of directivity",
        sol.perturb_d_deg - cfg.theta_d_deg,
        sol.perturb_u_deg - cfg.theta_u_deg,
        sol.degradation_d_db,
        sol.degradation_u_db
    );
    println!(
        "gain over dbf: {:.2} dB",
        capped_db(sol.a_si_db - dbf.a_si_db)
    );

    let trace = &report.outcome.trace;
    println!("convergence (global best, dB):");
    for t in [0, 5, 10, 20, 40, 60, 80, 100] {
        if t < trace.len() {
            println!("  iteration {t:3}: {:.2}", capped_db(trace[t]));
        }
    }
    println!(
        "artifacts: {} and {}",
        report.solution_path.display(),
        report.trace_path.display()
    );
    Ok(())
}
