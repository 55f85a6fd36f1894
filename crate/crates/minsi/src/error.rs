//! Error type shared across the crate, with process exit codes for the CLI.

use std::path::PathBuf;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{what} index {index} out of range, valid span is 1..={max}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        max: usize,
    },

    #[error("invalid geometry: {0}")]
    Geometry(String),

    #[error("overlapping panels: Tx element {tx} and Rx element {rx} are at zero distance")]
    OverlappingPanels { tx: usize, rx: usize },

    #[error("invalid frequency grid: {0}")]
    Grid(String),

    #[error(
        "band [{lo_hz:.3} Hz, {hi_hz:.3} Hz] outside grid span [{grid_lo_hz:.3} Hz, {grid_hi_hz:.3} Hz]"
    )]
    BandOutsideGrid {
        lo_hz: f64,
        hi_hz: f64,
        grid_lo_hz: f64,
        grid_hi_hz: f64,
    },

    #[error(
        "degenerate band: bandwidth {bandwidth_hz:.3} Hz is below grid spacing {step_hz:.3} Hz"
    )]
    DegenerateBand { bandwidth_hz: f64, step_hz: f64 },

    #[error(
        "band of {bandwidth_hz:.3} Hz is not aligned to the grid: nearest sample span is {snapped_hz:.3} Hz (> half a grid step away)"
    )]
    BandMisaligned { bandwidth_hz: f64, snapped_hz: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("format error at byte {offset}: {message}")]
    Format { offset: u64, message: String },

    #[error("truncated tensor file: expected {expected} bytes of payload, found {actual}")]
    Truncated { expected: u64, actual: u64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("infeasible search window: {0}")]
    InfeasibleWindow(String),

    #[error("oracle grid of {estimated} evaluations exceeds cap of {cap}")]
    GridCapExceeded { estimated: u64, cap: u64 },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 0 is success, each failure class is distinct.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_)
            | Error::Geometry(_)
            | Error::Grid(_)
            | Error::IndexOutOfRange { .. }
            | Error::DimensionMismatch(_) => 2,
            Error::Io { .. } | Error::Json(_) | Error::Format { .. } | Error::Truncated { .. } => 3,
            Error::InfeasibleWindow(_) => 4,
            Error::GridCapExceeded { .. } => 5,
            Error::OverlappingPanels { .. } => 6,
            Error::BandOutsideGrid { .. }
            | Error::DegenerateBand { .. }
            | Error::BandMisaligned { .. } => 7,
        }
    }
}
