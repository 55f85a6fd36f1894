//! Self-interference suppression for full-duplex massive-MIMO base stations
//! by RF beamforming alone: deliberately perturbed Tx/Rx beam directions and
//! joint sub-array selection, searched with a particle swarm, against a
//! frequency-sampled SI coupling channel.
//!
//! The crate models an 8x8 transmit and an 8x8 receive panel separated by an
//! isolation gap. Both sides activate one vertical linear sub-array (1x4 or
//! 1x8) driven by a single RF chain. Steering both beams exactly at the user
//! directions (directivity-based beamforming, DBF) leaves whatever SI the
//! geometry happens to give; trading up to `eps` dB of directivity for
//! freedom in the steering angles and choosing which sub-arrays to activate
//! buys large additional suppression.
//!
//! Main entry points:
//!
//! * [`channel::SiChannelTensor`]: the (rx, tx, frequency) coupling tensor,
//!   synthetic line-of-sight generation, a binary file format, bandwidth
//!   slicing, sub-array extraction.
//! * [`beam`]: phase responses, steering vectors, directivity and its
//!   degradation, feasible steering windows, beampatterns.
//! * [`metric::a_si`]: achieved SI suppression of a beam pair over a band.
//! * [`pso::optimize`]: the min-SI search with sub-array selection.
//! * [`baseline`]: the DBF reference and a brute-force oracle.
//! * [`harness`]: config-driven experiment runners behind the CLI and the
//!   examples: channel generation, single runs, angle-grid sweeps,
//!   beampattern export.
//!
//! Runnable walkthroughs live in `examples/`; `cargo run --example` each of
//! them, or drive the same flows from the `minsi` binary.

pub mod baseline;
pub mod beam;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod metric;
pub mod pso;

pub use error::{Error, Result};

/// Serializes a dB value with the `+inf` sentinel capped, keeping JSON finite.
pub(crate) fn ser_capped_db<S: serde::Serializer>(
    v: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(crate::metric::capped_db(*v))
}
