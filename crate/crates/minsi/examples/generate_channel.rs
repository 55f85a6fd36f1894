//! Generates a synthetic self-interference coupling tensor between the two
//! 8x8 panels and writes it to disk with its JSON sidecar, printing the
//! checksum and a few physical sanity figures.
//!
//! ```sh
//! cargo run --release --example generate_channel
//! ```

use minsi::channel::{FrequencyGrid, SiChannelTensor, SyntheticParams};
use minsi::geometry::{ArrayGeometry, Panel};

fn main() -> minsi::Result<()> {
    let geometry = ArrayGeometry::default();
    // Native measurement-style grid: 1 GHz span at 0.625 MHz spacing. The
    // full 64 x 64 x 1601 tensor is ~100 MB; trim num_points for a quick run.
    let grid = FrequencyGrid::new(3.0e9, 4.0e9, 1601)?;
    let params = SyntheticParams::default();
    let seed = 7;

    println!(
        "panels: {}x{} elements at {} wavelength pitch ({:.4} m), {} m edge gap",
        geometry.rows,
        geometry.cols,
        geometry.spacing_wl,
        geometry.pitch_m(),
        geometry.tx_rx_gap_m
    );
    let tx_corner = geometry.element_position(Panel::Tx, 64)?;
    let rx_corner = geometry.element_position(Panel::Rx, 1)?;
    println!(
        "closest coupling path: {:.3} m (Tx 64 at x={:.3} to Rx 1 at x={:.3})",
        rx_corner[0] - tx_corner[0],
        tx_corner[0],
        rx_corner[0]
    );

    let tensor = SiChannelTensor::generate_synthetic(&geometry, grid, &params, seed)?;
    let strongest = tensor
        .data()
        .iter()
        .map(|h| h.norm())
        .fold(f64::NEG_INFINITY, f64::max);
    println!(
        "tensor {}x{}x{}: strongest coupling {:.1} dB",
        tensor.rx_count(),
        tensor.tx_count(),
        tensor.grid().num_points,
        20.0 * strongest.log10()
    );

    let out_dir = std::path::Path::new("examples_out/generate_channel");
    std::fs::create_dir_all(out_dir).expect("create output directory");
    let path = out_dir.join("si_channel.sich");
    let checksum = tensor.save(&path)?;
    println!("wrote {} (sha256 {checksum})", path.display());

    // Round-trip check: loading reproduces the tensor bit for bit.
    let reloaded = SiChannelTensor::load(&path)?;
    assert_eq!(tensor, reloaded);
    println!("reload verified bit-exact");
    Ok(())
}
