//! Binary on-disk format for SI channel tensors.
//!
//! Little-endian layout:
//!
//! | offset | size | field                                  |
//! |--------|------|----------------------------------------|
//! | 0      | 8    | magic `"SICHTNSR"`                     |
//! | 8      | 4    | u32 version (= 1)                      |
//! | 12     | 4    | u32 rx element count                   |
//! | 16     | 4    | u32 tx element count                   |
//! | 20     | 4    | u32 frequency sample count             |
//! | 24     | 8    | f64 grid start, Hz                     |
//! | 32     | 8    | f64 grid stop, Hz                      |
//! | 40     | ...  | payload: (f64 re, f64 im) per entry    |
//!
//! The payload is frequency-major, then tx, with the rx index fastest, so a
//! bandwidth slice is a contiguous byte range. `save` also writes a JSON
//! sidecar at `<path>.json` carrying the sha256 checksum and provenance;
//! `load` restores provenance from the sidecar when one is present.

use sha2::{Digest, Sha256};
use std::fs;
use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{FrequencyGrid, Provenance, SiChannelTensor};
use crate::error::{Error, Result};

pub const MAGIC: &[u8; 8] = b"SICHTNSR";
pub const FORMAT_VERSION: u32 = 1;
pub const HEADER_LEN: usize = 40;

/// Exact file size in bytes for a tensor of the given dimensions.
pub fn file_size_bytes(rx_count: usize, tx_count: usize, freq_count: usize) -> u64 {
    HEADER_LEN as u64 + 16 * rx_count as u64 * tx_count as u64 * freq_count as u64
}

#[derive(Debug, Serialize, Deserialize)]
struct Sidecar {
    format: String,
    version: u32,
    rx_count: usize,
    tx_count: usize,
    freq_count: usize,
    f_start_hz: f64,
    f_stop_hz: f64,
    sha256: String,
    provenance: Provenance,
}

impl SiChannelTensor {
    /// Writes the tensor and its JSON sidecar; returns the hex sha256 of the
    /// binary file. `load(save(t))` reproduces `t` bit-exactly.
    pub fn save(&self, path: &Path) -> Result<String> {
        let mut header = Vec::with_capacity(HEADER_LEN);
        header.extend_from_slice(MAGIC);
        header.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        header.extend_from_slice(&(self.rx_count as u32).to_le_bytes());
        header.extend_from_slice(&(self.tx_count as u32).to_le_bytes());
        header.extend_from_slice(&(self.grid.num_points as u32).to_le_bytes());
        header.extend_from_slice(&self.grid.f_start_hz.to_le_bytes());
        header.extend_from_slice(&self.grid.f_stop_hz.to_le_bytes());

        let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut writer = std::io::BufWriter::new(file);
        let mut hasher = Sha256::new();
        hasher.update(&header);
        writer.write_all(&header).map_err(|e| Error::io(path, e))?;

        let mut block = Vec::with_capacity(1 << 20);
        for chunk in self.data.chunks(1 << 16) {
            block.clear();
            for v in chunk {
                block.extend_from_slice(&v.re.to_le_bytes());
                block.extend_from_slice(&v.im.to_le_bytes());
            }
            hasher.update(&block);
            writer.write_all(&block).map_err(|e| Error::io(path, e))?;
        }
        writer.flush().map_err(|e| Error::io(path, e))?;
        let checksum = hex(&hasher.finalize());

        let sidecar = Sidecar {
            format: "si-channel-tensor".into(),
            version: FORMAT_VERSION,
            rx_count: self.rx_count,
            tx_count: self.tx_count,
            freq_count: self.grid.num_points,
            f_start_hz: self.grid.f_start_hz,
            f_stop_hz: self.grid.f_stop_hz,
            sha256: checksum.clone(),
            provenance: self.provenance.clone(),
        };
        let sidecar_path = sidecar_path(path);
        fs::write(
            &sidecar_path,
            serde_json::to_string_pretty(&sidecar)? + "\n",
        )
        .map_err(|e| Error::io(&sidecar_path, e))?;
        Ok(checksum)
    }

    /// Reads a tensor file, validating the header and payload length before
    /// any data is interpreted. No partial tensor is ever returned.
    pub fn load(path: &Path) -> Result<Self> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        if bytes.len() < HEADER_LEN {
            return Err(Error::Format {
                offset: bytes.len() as u64,
                message: format!(
                    "file is {} bytes, too short for the {HEADER_LEN}-byte header",
                    bytes.len()
                ),
            });
        }
        if &bytes[0..8] != MAGIC {
            return Err(Error::Format {
                offset: 0,
                message: format!("bad magic {:?}, expected {:?}", &bytes[0..8], MAGIC),
            });
        }
        let version = u32::from_le_bytes(bytes[8..12].try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(Error::Format {
                offset: 8,
                message: format!("unsupported version {version}, expected {FORMAT_VERSION}"),
            });
        }
        let rx_count = u32::from_le_bytes(bytes[12..16].try_into().unwrap()) as usize;
        let tx_count = u32::from_le_bytes(bytes[16..20].try_into().unwrap()) as usize;
        let freq_count = u32::from_le_bytes(bytes[20..24].try_into().unwrap()) as usize;
        for (offset, count) in [(12u64, rx_count), (16, tx_count), (20, freq_count)] {
            if count == 0 {
                return Err(Error::Format {
                    offset,
                    message: "dimension must be nonzero".into(),
                });
            }
        }
        let f_start_hz = f64::from_le_bytes(bytes[24..32].try_into().unwrap());
        let f_stop_hz = f64::from_le_bytes(bytes[32..40].try_into().unwrap());
        let grid =
            FrequencyGrid::new(f_start_hz, f_stop_hz, freq_count).map_err(|e| Error::Format {
                offset: 24,
                message: e.to_string(),
            })?;

        let expected = 16 * (rx_count as u64) * (tx_count as u64) * (freq_count as u64);
        let actual = (bytes.len() - HEADER_LEN) as u64;
        if actual < expected {
            return Err(Error::Truncated { expected, actual });
        }
        if actual > expected {
            return Err(Error::Format {
                offset: HEADER_LEN as u64 + expected,
                message: format!("{} trailing bytes after the payload", actual - expected),
            });
        }

        let mut data = Vec::with_capacity(rx_count * tx_count * freq_count);
        for (i, pair) in bytes[HEADER_LEN..].chunks_exact(16).enumerate() {
            let re = f64::from_le_bytes(pair[0..8].try_into().unwrap());
            let im = f64::from_le_bytes(pair[8..16].try_into().unwrap());
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::Format {
                    offset: (HEADER_LEN + 16 * i) as u64,
                    message: "non-finite tensor entry".into(),
                });
            }
            data.push(Complex64::new(re, im));
        }

        let checksum = hex(&Sha256::digest(&bytes));
        let provenance = read_sidecar(path, &checksum).unwrap_or(Provenance::File {
            path: path.display().to_string(),
            checksum,
        });

        Ok(SiChannelTensor {
            rx_count,
            tx_count,
            grid,
            data,
            provenance,
        })
    }
}

fn sidecar_path(path: &Path) -> std::path::PathBuf {
    let mut os = path.as_os_str().to_os_string();
    os.push(".json");
    os.into()
}

/// Provenance from the sidecar, if one exists, parses, and its checksum
/// matches the loaded file.
fn read_sidecar(path: &Path, checksum: &str) -> Option<Provenance> {
    let text = fs::read_to_string(sidecar_path(path)).ok()?;
    let sidecar: Sidecar = serde_json::from_str(&text).ok()?;
    (sidecar.sha256 == checksum).then_some(sidecar.provenance)
}

fn hex(digest: &[u8]) -> String {
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SyntheticParams;
    use crate::geometry::ArrayGeometry;

    fn small_tensor() -> SiChannelTensor {
        let geom = ArrayGeometry::new(2, 2, 0.5, 0.4, 3.5e9).unwrap();
        let grid = FrequencyGrid::new(3.4e9, 3.6e9, 3).unwrap();
        let params = SyntheticParams {
            l_iso_db: 10.0,
            diffuse_ratio: 0.2,
        };
        SiChannelTensor::generate_synthetic(&geom, grid, &params, 42).unwrap()
    }

    #[test]
    fn round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sich");
        let t = small_tensor();
        let checksum = t.save(&path).unwrap();
        assert_eq!(checksum.len(), 64);
        let loaded = SiChannelTensor::load(&path).unwrap();
        assert_eq!(t, loaded);

        let meta = std::fs::metadata(&path).unwrap();
        assert_eq!(meta.len(), file_size_bytes(4, 4, 3));
        assert_eq!(meta.len(), 40 + 16 * 4 * 4 * 3);
    }

    #[test]
    fn save_is_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.sich");
        let b = dir.path().join("b.sich");
        let t = small_tensor();
        let ca = t.save(&a).unwrap();
        let cb = t.save(&b).unwrap();
        assert_eq!(ca, cb);
        assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    }

    #[test]
    fn corrupted_magic_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sich");
        small_tensor().save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[0] = b'X';
        std::fs::write(&path, &bytes).unwrap();
        match SiChannelTensor::load(&path).unwrap_err() {
            Error::Format { offset: 0, .. } => {}
            other => panic!("expected magic error, got {other:?}"),
        }
    }

    #[test]
    fn unsupported_version_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sich");
        small_tensor().save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[8] = 9;
        std::fs::write(&path, &bytes).unwrap();
        match SiChannelTensor::load(&path).unwrap_err() {
            Error::Format { offset: 8, .. } => {}
            other => panic!("expected version error, got {other:?}"),
        }
    }

    #[test]
    fn zero_dimension_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sich");
        small_tensor().save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes[16..20].copy_from_slice(&0u32.to_le_bytes());
        std::fs::write(&path, &bytes).unwrap();
        match SiChannelTensor::load(&path).unwrap_err() {
            Error::Format { offset: 16, .. } => {}
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn truncation_reports_expected_and_actual() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sich");
        small_tensor().save(&path).unwrap();
        let bytes = std::fs::read(&path).unwrap();
        std::fs::write(&path, &bytes[..bytes.len() - 24]).unwrap();
        match SiChannelTensor::load(&path).unwrap_err() {
            Error::Truncated { expected, actual } => {
                assert_eq!(expected, 16 * 4 * 4 * 3);
                assert_eq!(actual, expected - 24);
            }
            other => panic!("expected truncation error, got {other:?}"),
        }
    }

    #[test]
    fn trailing_bytes_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sich");
        small_tensor().save(&path).unwrap();
        let mut bytes = std::fs::read(&path).unwrap();
        bytes.extend_from_slice(&[0u8; 8]);
        std::fs::write(&path, &bytes).unwrap();
        assert!(matches!(
            SiChannelTensor::load(&path).unwrap_err(),
            Error::Format { .. }
        ));
    }

    #[test]
    fn missing_sidecar_falls_back_to_file_provenance() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.sich");
        let t = small_tensor();
        let checksum = t.save(&path).unwrap();
        std::fs::remove_file(sidecar_path(&path)).unwrap();
        let loaded = SiChannelTensor::load(&path).unwrap();
        match loaded.provenance() {
            Provenance::File { checksum: c, .. } => assert_eq!(c, &checksum),
            other => panic!("expected file provenance, got {other:?}"),
        }
    }
}
