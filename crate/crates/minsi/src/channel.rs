//! Frequency-sampled self-interference coupling tensor between the Tx and Rx
//! panels: synthetic line-of-sight generation, bandwidth slicing, and
//! sub-array extraction.
//!
//! Tensor entries are dimensionless complex voltage coupling gains indexed by
//! (rx element, tx element, frequency sample). Data is stored frequency-major
//! with the rx index fastest, matching the on-disk layout.

pub mod io;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{ArrayGeometry, Panel, SubArraySpec, SPEED_OF_LIGHT};

/// Uniformly sampled frequency axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub f_start_hz: f64,
    pub f_stop_hz: f64,
    pub num_points: usize,
}

impl FrequencyGrid {
    pub fn new(f_start_hz: f64, f_stop_hz: f64, num_points: usize) -> Result<Self> {
        if num_points == 0 {
            return Err(Error::Grid("grid needs at least one sample".into()));
        }
        if !f_start_hz.is_finite() || f_start_hz <= 0.0 {
            return Err(Error::Grid(format!(
                "start frequency must be positive, got {f_start_hz} Hz"
            )));
        }
        if num_points == 1 {
            if f_stop_hz != f_start_hz {
                return Err(Error::Grid(
                    "single-sample grid must have equal start and stop frequencies".into(),
                ));
            }
        } else if !f_stop_hz.is_finite() || f_stop_hz <= f_start_hz {
            return Err(Error::Grid(format!(
                "stop frequency {f_stop_hz} Hz must exceed start {f_start_hz} Hz"
            )));
        }
        Ok(FrequencyGrid {
            f_start_hz,
            f_stop_hz,
            num_points,
        })
    }

    /// Degenerate single-tone grid. Useful for single-sample tensors; it
    /// cannot be bandwidth-sliced.
    pub fn single(f_hz: f64) -> Self {
        FrequencyGrid {
            f_start_hz: f_hz,
            f_stop_hz: f_hz,
            num_points: 1,
        }
    }

    /// Sample spacing; zero for a single-sample grid.
    pub fn step_hz(&self) -> f64 {
        if self.num_points < 2 {
            0.0
        } else {
            (self.f_stop_hz - self.f_start_hz) / (self.num_points - 1) as f64
        }
    }

    pub fn freq_at(&self, idx: usize) -> f64 {
        self.f_start_hz + idx as f64 * self.step_hz()
    }
}

/// Parameters of the synthetic line-of-sight channel generator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SyntheticParams {
    /// Extra isolation loss applied on top of free-space spreading, dB.
    pub l_iso_db: f64,
    /// Power of the seeded diffuse component relative to the LoS term.
    pub diffuse_ratio: f64,
}

impl Default for SyntheticParams {
    fn default() -> Self {
        SyntheticParams {
            l_iso_db: 30.0,
            diffuse_ratio: 0.0,
        }
    }
}

impl SyntheticParams {
    fn validate(&self) -> Result<()> {
        if !self.l_iso_db.is_finite() || self.l_iso_db < 0.0 {
            return Err(Error::Config(format!(
                "isolation loss must be non-negative, got {} dB",
                self.l_iso_db
            )));
        }
        if !self.diffuse_ratio.is_finite() || self.diffuse_ratio < 0.0 {
            return Err(Error::Config(format!(
                "diffuse power ratio must be non-negative, got {}",
                self.diffuse_ratio
            )));
        }
        Ok(())
    }
}

/// Where a tensor's data came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    Synthetic {
        seed: u64,
        params: SyntheticParams,
        geometry: ArrayGeometry,
    },
    File {
        path: String,
        checksum: String,
    },
}

/// Complex SI coupling tensor over (rx element, tx element, frequency sample).
#[derive(Debug, Clone, PartialEq)]
pub struct SiChannelTensor {
    rx_count: usize,
    tx_count: usize,
    grid: FrequencyGrid,
    /// Layout: `data[n * rx_count * tx_count + m * rx_count + u]`.
    data: Vec<Complex64>,
    provenance: Provenance,
}

impl SiChannelTensor {
    /// Builds a tensor from raw sample data in the native layout
    /// (frequency-major, tx middle, rx fastest).
    pub fn from_parts(
        rx_count: usize,
        tx_count: usize,
        grid: FrequencyGrid,
        data: Vec<Complex64>,
        provenance: Provenance,
    ) -> Result<Self> {
        if rx_count == 0 || tx_count == 0 {
            return Err(Error::DimensionMismatch(
                "tensor must have at least one rx and tx element".into(),
            ));
        }
        let expected = rx_count * tx_count * grid.num_points;
        if data.len() != expected {
            return Err(Error::DimensionMismatch(format!(
                "tensor data has {} entries, expected {} for {}x{}x{}",
                data.len(),
                expected,
                rx_count,
                tx_count,
                grid.num_points
            )));
        }
        if let Some(bad) = data
            .iter()
            .position(|v| !v.re.is_finite() || !v.im.is_finite())
        {
            return Err(Error::DimensionMismatch(format!(
                "tensor entry {bad} is not finite"
            )));
        }
        Ok(SiChannelTensor {
            rx_count,
            tx_count,
            grid,
            data,
            provenance,
        })
    }

    /// Synthetic spherical-wave LoS channel between the two panels.
    ///
    /// Entry `(u, m, n)` is the free-space gain
    /// `c / (4 pi f_n r_um) * exp(-j 2 pi f_n r_um / c)` attenuated by the
    /// configured isolation loss, where `r_um` is the Euclidean distance from
    /// Tx element `m` to Rx element `u`. A nonzero `diffuse_ratio` adds a
    /// seeded complex Gaussian term with that power relative to the LoS gain.
    /// Deterministic for a fixed seed, independent of worker count.
    pub fn generate_synthetic(
        geometry: &ArrayGeometry,
        grid: FrequencyGrid,
        params: &SyntheticParams,
        seed: u64,
    ) -> Result<Self> {
        geometry.validate()?;
        params.validate()?;
        let n_elem = geometry.num_elements();
        let tx_pos: Vec<[f64; 3]> = (1..=n_elem)
            .map(|i| geometry.element_position(Panel::Tx, i))
            .collect::<Result<_>>()?;
        let rx_pos: Vec<[f64; 3]> = (1..=n_elem)
            .map(|i| geometry.element_position(Panel::Rx, i))
            .collect::<Result<_>>()?;

        // Distances, rx-fastest to match the tensor layout.
        let mut dist = vec![0.0f64; n_elem * n_elem];
        for (m, t) in tx_pos.iter().enumerate() {
            for (u, r) in rx_pos.iter().enumerate() {
                let d =
                    ((t[0] - r[0]).powi(2) + (t[1] - r[1]).powi(2) + (t[2] - r[2]).powi(2)).sqrt();
                if d == 0.0 {
                    return Err(Error::OverlappingPanels {
                        tx: m + 1,
                        rx: u + 1,
                    });
                }
                dist[m * n_elem + u] = d;
            }
        }

        let iso = 10f64.powf(-params.l_iso_db / 20.0);
        let diffuse_amp = params.diffuse_ratio.sqrt();
        let stride = n_elem * n_elem;
        let mut data = vec![Complex64::default(); stride * grid.num_points];
        data.par_chunks_mut(stride)
            .enumerate()
            .for_each(|(n, chunk)| {
                let f = grid.freq_at(n);
                let k = SPEED_OF_LIGHT / (4.0 * PI * f);
                for (idx, (entry, &r)) in chunk.iter_mut().zip(&dist).enumerate() {
                    let amp = k / r * iso;
                    let phase = -2.0 * PI * f * r / SPEED_OF_LIGHT;
                    let mut h = Complex64::from_polar(amp, phase);
                    if diffuse_amp > 0.0 {
                        let u = idx % n_elem;
                        let m = idx / n_elem;
                        h += complex_gaussian(seed, u, m, n) * (diffuse_amp * amp);
                    }
                    *entry = h;
                }
            });

        Ok(SiChannelTensor {
            rx_count: n_elem,
            tx_count: n_elem,
            grid,
            data,
            provenance: Provenance::Synthetic {
                seed,
                params: *params,
                geometry: geometry.clone(),
            },
        })
    }

    pub fn rx_count(&self) -> usize {
        self.rx_count
    }

    pub fn tx_count(&self) -> usize {
        self.tx_count
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    /// Entry at 0-based (rx, tx, sample).
    pub fn at(&self, rx: usize, tx: usize, n: usize) -> Complex64 {
        self.data[n * self.rx_count * self.tx_count + tx * self.rx_count + rx]
    }

    /// Retains the samples inside `center +- bandwidth/2`.
    ///
    /// The band edges must land on grid samples to within half a grid step;
    /// the retained count is `round(bandwidth / step) + 1`.
    pub fn slice_bandwidth(&self, center_hz: f64, bandwidth_hz: f64) -> Result<Self> {
        let step = self.grid.step_hz();
        if step <= 0.0 {
            return Err(Error::Grid(
                "cannot slice a single-sample frequency grid".into(),
            ));
        }
        if bandwidth_hz < step {
            return Err(Error::DegenerateBand {
                bandwidth_hz,
                step_hz: step,
            });
        }
        let lo_hz = center_hz - bandwidth_hz / 2.0;
        let hi_hz = center_hz + bandwidth_hz / 2.0;
        let lo_idx = ((lo_hz - self.grid.f_start_hz) / step).round();
        let hi_idx = ((hi_hz - self.grid.f_start_hz) / step).round();
        if lo_idx < 0.0 || hi_idx > (self.grid.num_points - 1) as f64 {
            return Err(Error::BandOutsideGrid {
                lo_hz,
                hi_hz,
                grid_lo_hz: self.grid.f_start_hz,
                grid_hi_hz: self.grid.f_stop_hz,
            });
        }
        let lo_idx = lo_idx as usize;
        let hi_idx = hi_idx as usize;
        let snapped_hz = (hi_idx - lo_idx) as f64 * step;
        if (snapped_hz - bandwidth_hz).abs() > step / 2.0 + 1e-6 * step {
            return Err(Error::BandMisaligned {
                bandwidth_hz,
                snapped_hz,
            });
        }
        let count = hi_idx - lo_idx + 1;
        let stride = self.rx_count * self.tx_count;
        let data = self.data[lo_idx * stride..(hi_idx + 1) * stride].to_vec();
        Ok(SiChannelTensor {
            rx_count: self.rx_count,
            tx_count: self.tx_count,
            grid: FrequencyGrid {
                f_start_hz: self.grid.freq_at(lo_idx),
                f_stop_hz: self.grid.freq_at(hi_idx),
                num_points: count,
            },
            data,
            provenance: self.provenance.clone(),
        })
    }

    /// Gathers the coupling sub-tensor between one Tx and one Rx sub-array,
    /// keeping every frequency sample.
    pub fn extract_subchannel(
        &self,
        tx_sub: &SubArraySpec,
        rx_sub: &SubArraySpec,
    ) -> Result<SubChannel> {
        let need = |elements: &[usize], count: usize, what: &str| -> Result<()> {
            match elements.iter().max() {
                Some(&max) if max > count => Err(Error::DimensionMismatch(format!(
                    "{what} sub-array element {max} exceeds the tensor's {count} elements"
                ))),
                _ => Ok(()),
            }
        };
        need(&tx_sub.elements, self.tx_count, "tx")?;
        need(&rx_sub.elements, self.rx_count, "rx")?;

        let m_d = tx_sub.elements.len();
        let m_u = rx_sub.elements.len();
        let n_samples = self.grid.num_points;
        let mut data = Vec::with_capacity(m_u * m_d * n_samples);
        for n in 0..n_samples {
            for &tx in &tx_sub.elements {
                for &rx in &rx_sub.elements {
                    data.push(self.at(rx - 1, tx - 1, n));
                }
            }
        }
        Ok(SubChannel {
            rx_size: m_u,
            tx_size: m_d,
            num_samples: n_samples,
            data,
            tx_sub: tx_sub.clone(),
            rx_sub: rx_sub.clone(),
            freq_indices: (0..n_samples).collect(),
        })
    }
}

/// Coupling sub-tensor for one (Tx, Rx) sub-array pair, `M_U x M_D x N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubChannel {
    pub rx_size: usize,
    pub tx_size: usize,
    pub num_samples: usize,
    /// Layout: `data[n * rx_size * tx_size + m * rx_size + u]`.
    pub data: Vec<Complex64>,
    pub tx_sub: SubArraySpec,
    pub rx_sub: SubArraySpec,
    /// Sample indices retained from the source tensor.
    pub freq_indices: Vec<usize>,
}

impl SubChannel {
    /// Builds a sub-channel directly from sample data in the native layout.
    pub fn from_data(
        rx_size: usize,
        tx_size: usize,
        num_samples: usize,
        data: Vec<Complex64>,
        tx_sub: SubArraySpec,
        rx_sub: SubArraySpec,
    ) -> Result<Self> {
        if data.len() != rx_size * tx_size * num_samples {
            return Err(Error::DimensionMismatch(format!(
                "sub-channel data has {} entries, expected {}",
                data.len(),
                rx_size * tx_size * num_samples
            )));
        }
        Ok(SubChannel {
            rx_size,
            tx_size,
            num_samples,
            data,
            tx_sub,
            rx_sub,
            freq_indices: (0..num_samples).collect(),
        })
    }

    /// Entry at 0-based (rx, tx, sample).
    pub fn at(&self, rx: usize, tx: usize, n: usize) -> Complex64 {
        self.data[n * self.rx_size * self.tx_size + tx * self.rx_size + rx]
    }
}

/// Splitmix64 finalizer.
fn mix(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Deterministic per-entry complex Gaussian with unit mean-square magnitude.
/// Counter-based so generation order and worker count cannot affect it.
fn complex_gaussian(seed: u64, u: usize, m: usize, n: usize) -> Complex64 {
    const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;
    let mut s = seed;
    for k in [u as u64, m as u64, n as u64] {
        s = mix(s
            .wrapping_add(GOLDEN)
            .wrapping_add(k.wrapping_mul(0xD134_2543_DE82_EF95)));
    }
    let a = mix(s.wrapping_add(GOLDEN));
    let b = mix(s.wrapping_add(GOLDEN.wrapping_mul(2)));
    let u1 = ((a >> 11) as f64 / (1u64 << 53) as f64).max(f64::MIN_POSITIVE);
    let u2 = (b >> 11) as f64 / (1u64 << 53) as f64;
    let r = (-2.0 * u1.ln()).sqrt();
    let phase = 2.0 * PI * u2;
    Complex64::new(r * phase.cos(), r * phase.sin()) * std::f64::consts::FRAC_1_SQRT_2
}
