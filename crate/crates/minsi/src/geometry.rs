//! Panel geometry: the 8x8 Tx/Rx uniform rectangular arrays, their element
//! positions in space, and the linear sub-array index mappings.
//!
//! Antenna indexing is 1-based and row-major over the 8x8 grid: index 1 is the
//! top-left element and indices increase along a row. Sub-arrays are vertical
//! uniform linear arrays (columns or column halves), enumerated column-major:
//!
//! * `Lin4`: 16 sub-arrays of 4 elements. Sub-array `s` covers column
//!   `((s-1) mod 8) + 1`; sub-arrays 1..=8 take the top half of each column,
//!   9..=16 the bottom half. Sub-array 1 is elements {1, 9, 17, 25}.
//! * `Lin8`: 8 sub-arrays of 8 elements, one full column each. Sub-array 1 is
//!   elements {1, 9, 17, 25, 33, 41, 49, 57}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Number of columns in the panel grid; also the row stride of antenna indices.
pub const PANEL_COLS: usize = 8;
/// Number of rows in the panel grid.
pub const PANEL_ROWS: usize = 8;
/// Elements per panel. The sub-array mappings are defined for this panel size.
pub const PANEL_ELEMENTS: usize = PANEL_ROWS * PANEL_COLS;

/// Which side of the base station an element or beamformer belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Panel {
    Tx,
    Rx,
}

/// Physical layout of the transmit and receive panels.
///
/// Both panels use the same grid and pitch. The Tx panel sits at the origin;
/// the Rx panel is displaced along the x-axis by one panel width plus the
/// edge-to-edge isolation gap.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub rows: usize,
    pub cols: usize,
    /// Element spacing `d` in carrier wavelengths.
    pub spacing_wl: f64,
    /// Edge-to-edge separation between the Tx and Rx panels, meters.
    pub tx_rx_gap_m: f64,
    /// Nominal carrier frequency, Hz. Sets the physical pitch.
    pub carrier_hz: f64,
}

impl Default for ArrayGeometry {
    fn default() -> Self {
        ArrayGeometry {
            rows: PANEL_ROWS,
            cols: PANEL_COLS,
            spacing_wl: 0.5,
            tx_rx_gap_m: 0.3,
            carrier_hz: 3.5e9,
        }
    }
}

impl ArrayGeometry {
    pub fn new(
        rows: usize,
        cols: usize,
        spacing_wl: f64,
        tx_rx_gap_m: f64,
        carrier_hz: f64,
    ) -> Result<Self> {
        let geom = ArrayGeometry {
            rows,
            cols,
            spacing_wl,
            tx_rx_gap_m,
            carrier_hz,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.rows < 1 || self.cols < 1 {
            return Err(Error::Geometry(format!(
                "panel must have at least one row and column, got {}x{}",
                self.rows, self.cols
            )));
        }
        if !self.spacing_wl.is_finite() || self.spacing_wl <= 0.0 {
            return Err(Error::Geometry(format!(
                "element spacing must be positive, got {} wavelengths",
                self.spacing_wl
            )));
        }
        if !self.tx_rx_gap_m.is_finite() || self.tx_rx_gap_m < 0.0 {
            return Err(Error::Geometry(format!(
                "Tx-Rx gap must be non-negative, got {} m",
                self.tx_rx_gap_m
            )));
        }
        if !self.carrier_hz.is_finite() || self.carrier_hz <= 0.0 {
            return Err(Error::Geometry(format!(
                "carrier frequency must be positive, got {} Hz",
                self.carrier_hz
            )));
        }
        Ok(())
    }

    pub fn num_elements(&self) -> usize {
        self.rows * self.cols
    }

    /// Physical element pitch in meters: `spacing_wl` carrier wavelengths.
    pub fn pitch_m(&self) -> f64 {
        self.spacing_wl * SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Position of an antenna element in meters, `[x, y, z]`.
    ///
    /// Grid placement is row-major: columns advance along +x, rows go down
    /// along -z. The Rx panel is shifted by one panel width plus the gap.
    pub fn element_position(&self, panel: Panel, antenna_index: usize) -> Result<[f64; 3]> {
        let n = self.num_elements();
        if antenna_index < 1 || antenna_index > n {
            return Err(Error::IndexOutOfRange {
                what: "antenna",
                index: antenna_index,
                max: n,
            });
        }
        let row = (antenna_index - 1) / self.cols;
        let col = (antenna_index - 1) % self.cols;
        let pitch = self.pitch_m();
        let x_panel = match panel {
            Panel::Tx => 0.0,
            Panel::Rx => (self.cols - 1) as f64 * pitch + self.tx_rx_gap_m,
        };
        Ok([x_panel + col as f64 * pitch, 0.0, -(row as f64) * pitch])
    }
}

/// Linear sub-array configuration of the fixed 8x8 panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubArrayKind {
    /// 1x4 vertical sub-arrays, 16 per panel.
    Lin4,
    /// 1x8 vertical sub-arrays (full columns), 8 per panel.
    Lin8,
}

impl SubArrayKind {
    /// Number of sub-arrays `S` per panel for this configuration.
    pub fn count(self) -> usize {
        match self {
            SubArrayKind::Lin4 => 16,
            SubArrayKind::Lin8 => 8,
        }
    }

    /// Elements per sub-array, `M`.
    pub fn elements_per_subarray(self) -> usize {
        match self {
            SubArrayKind::Lin4 => 4,
            SubArrayKind::Lin8 => 8,
        }
    }
}

impl std::fmt::Display for SubArrayKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SubArrayKind::Lin4 => write!(f, "lin4"),
            SubArrayKind::Lin8 => write!(f, "lin8"),
        }
    }
}

impl std::str::FromStr for SubArrayKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lin4" | "1x4" => Ok(SubArrayKind::Lin4),
            "lin8" | "1x8" => Ok(SubArrayKind::Lin8),
            other => Err(Error::Config(format!(
                "unknown sub-array kind {other:?}, expected \"lin4\" or \"lin8\""
            ))),
        }
    }
}

/// One concrete sub-array: its kind, 1-based index, and the ordered 1-based
/// antenna indices it activates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubArraySpec {
    pub kind: SubArrayKind,
    pub index: usize,
    pub elements: Vec<usize>,
}

impl SubArraySpec {
    pub fn new(kind: SubArrayKind, index: usize) -> Result<Self> {
        Ok(SubArraySpec {
            kind,
            index,
            elements: subarray_elements(kind, index)?,
        })
    }
}

/// Ordered antenna indices of sub-array `index` (1-based) for `kind`.
///
/// Deterministic column-major enumeration; see the module docs for the layout.
pub fn subarray_elements(kind: SubArrayKind, index: usize) -> Result<Vec<usize>> {
    let count = kind.count();
    if index < 1 || index > count {
        return Err(Error::IndexOutOfRange {
            what: "sub-array",
            index,
            max: count,
        });
    }
    let elements = match kind {
        SubArrayKind::Lin4 => {
            let col = (index - 1) % PANEL_COLS + 1;
            let half = (index - 1) / PANEL_COLS;
            (0..4).map(|r| col + PANEL_COLS * (4 * half + r)).collect()
        }
        SubArrayKind::Lin8 => (0..PANEL_ROWS).map(|r| index + PANEL_COLS * r).collect(),
    };
    Ok(elements)
}
