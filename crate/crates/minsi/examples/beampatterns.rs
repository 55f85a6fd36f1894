//! Exports DBF beampatterns for the six default grid directions, for both the
//! 1x4 and 1x8 sub-arrays, and prints each curve's peak and first-null
//! beamwidth together with its 2 dB feasible steering window.
//!
//! ```sh
//! cargo run --release --example beampatterns
//! ```

use minsi::beam::{feasible_window, Link};
use minsi::geometry::SubArrayKind;
use minsi::harness::{run_beampattern, ExperimentConfig};

fn main() -> minsi::Result<()> {
    let cfg = ExperimentConfig {
        out_dir: "examples_out/beampatterns".into(),
        ..ExperimentConfig::default()
    };
    let report = run_beampattern(&cfg)?;

    println!(
        "curve summaries (patterns in {}):",
        report.csv_path.display()
    );
    for c in &report.curves {
        let m = c.kind.elements_per_subarray();
        let w = feasible_window(Link::Downlink, m, c.steer_deg, cfg.spacing_wl(), 2.0)?;
        println!(
            "{} steered {:5.1} deg: peak {:.2} dB, first-null beamwidth {:5.2} deg, 2 dB window [{:7.3}, {:7.3}] deg",
            c.kind, c.steer_deg, c.peak_gain_db, c.first_null_beamwidth_deg, w.lo_deg, w.hi_deg
        );
    }

    let avg = |kind: SubArrayKind| {
        let widths: Vec<f64> = report
            .curves
            .iter()
            .filter(|c| c.kind == kind)
            .map(|c| c.first_null_beamwidth_deg)
            .collect();
        widths.iter().sum::<f64>() / widths.len() as f64
    };
    println!(
        "mean first-null beamwidth: lin8 {:.1} deg vs lin4 {:.1} deg (narrower beams from the larger sub-array)",
        avg(SubArrayKind::Lin8),
        avg(SubArrayKind::Lin4)
    );
    Ok(())
}
