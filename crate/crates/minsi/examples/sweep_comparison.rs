//! Full angle-grid comparison: DBF versus
//! min-SI with sub-array selection on every (downlink, uplink) pair of the
//! 15:30:165 degree grid, printed as matrices plus summary statistics.
//!
//! ```sh
//! cargo run --release --example sweep_comparison
//! ```

use minsi::channel::{FrequencyGrid, SyntheticParams};
use minsi::geometry::ArrayGeometry;
use minsi::harness::{run_sweep, ChannelSource, ExperimentConfig, PsoParams, SweepCell};
use minsi::metric::capped_db;

fn print_matrix(label: &str, cells: &[SweepCell], value: impl Fn(&SweepCell) -> f64) {
    let mut thetas: Vec<f64> = cells.iter().map(|c| c.theta_d_deg).collect();
    thetas.dedup();
    println!("{label} (rows: downlink deg, cols: uplink deg):");
    print!("        ");
    for t in &thetas {
        print!("{t:8.0}");
    }
    println!();
    for &td in &thetas {
        print!("  {td:5.0} |");
        for &tu in &thetas {
            let cell = cells
                .iter()
                .find(|c| c.theta_d_deg == td && c.theta_u_deg == tu)
                .expect("full grid");
            print!("{:8.1}", capped_db(value(cell)));
        }
        println!();
    }
}

fn main() -> minsi::Result<()> {
    let cfg = ExperimentConfig {
        channel: ChannelSource::Synthetic {
            geometry: ArrayGeometry::default(),
            grid: FrequencyGrid::new(3.45e9, 3.55e9, 161)?,
            params: SyntheticParams::default(),
            seed: 7,
        },
        bandwidth_hz: 20e6,
        pso: PsoParams {
            num_iterations: 60,
            seed: 1,
            ..PsoParams::default()
        },
        out_dir: "examples_out/sweep_comparison".into(),
        ..ExperimentConfig::default()
    };

    let report = run_sweep(&cfg)?;
    print_matrix("DBF suppression, dB", &report.cells, |c| c.dbf.a_si_db);
    println!();
    print_matrix("min-SI suppression, dB", &report.cells, |c| {
        c.min_si.a_si_db
    });
    println!();
    println!(
        "dbf   : {:.1}..{:.1} dB, mean {:.1} dB",
        report.dbf_stats.min_db, report.dbf_stats.max_db, report.dbf_stats.mean_db
    );
    println!(
        "min-si: {:.1}..{:.1} dB, mean {:.1} dB",
        report.min_si_stats.min_db, report.min_si_stats.max_db, report.min_si_stats.mean_db
    );
    println!(
        "gain  : mean {:.1} dB, max {:.1} dB (never negative: the swarm is seeded from DBF)",
        report.gain_stats.mean_db, report.gain_stats.max_db
    );
    println!(
        "artifacts: {} and {}",
        report.csv_path.display(),
        report.summary_path.display()
    );
    Ok(())
}
