//! Shows how channel bandwidth affects achievable suppression: the same
//! optimization run over 5, 20, and 100 MHz slices of one tensor. Wider
//! bands average the residual over more frequency samples, so a single
//! phase-shifter beam pair cannot null all of them at once and the achieved
//! suppression drops.
//!
//! ```sh
//! cargo run --release --example bandwidth_tradeoff
//! ```

use minsi::baseline::{dbf, PairPolicy};
use minsi::channel::{FrequencyGrid, SiChannelTensor, SyntheticParams};
use minsi::geometry::{ArrayGeometry, SubArrayKind};
use minsi::metric::capped_db;
use minsi::pso::{optimize, PsoConfig};

fn main() -> minsi::Result<()> {
    let grid = FrequencyGrid::new(3.4e9, 3.6e9, 321)?;
    // A little scattered energy on top of the line-of-sight coupling keeps
    // the nulls frequency-selective, the way measured channels behave.
    let params = SyntheticParams {
        l_iso_db: 30.0,
        diffuse_ratio: 0.01,
    };
    let full = SiChannelTensor::generate_synthetic(&ArrayGeometry::default(), grid, &params, 7)?;

    for kind in [SubArrayKind::Lin4, SubArrayKind::Lin8] {
        println!("{kind} sub-arrays, downlink 105 deg / uplink 45 deg:");
        for bandwidth_hz in [5e6, 20e6, 100e6] {
            let sliced = full.slice_bandwidth(3.5e9, bandwidth_hz)?;
            let cfg = PsoConfig {
                seed: 11,
                ..PsoConfig::new(kind, 105.0, 45.0)
            };
            let outcome = optimize(&sliced, &cfg)?;
            let baseline = dbf(
                &sliced,
                105.0,
                45.0,
                kind,
                PairPolicy::Fixed(1, 1),
                0.5,
                None,
            )?;
            println!(
                "  {:5.0} MHz ({:3} samples): dbf {:6.2} dB, min-si {:6.2} dB at ({:6.2}, {:5.2}) deg pair (tx {}, rx {})",
                bandwidth_hz / 1e6,
                sliced.grid().num_points,
                capped_db(baseline.a_si_db),
                capped_db(outcome.solution.a_si_db),
                outcome.solution.perturb_d_deg,
                outcome.solution.perturb_u_deg,
                outcome.solution.tx_index,
                outcome.solution.rx_index
            );
        }
    }
    println!(
        "the wider the band, the more samples one phase-shifter beam pair must compromise across"
    );
    Ok(())
}
