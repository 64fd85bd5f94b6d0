use super::SimState;
use crate::error::{Error, Result};
use crate::spectral::{SpectralField, SpectralGrid};
use crate::{Complex, Real};
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::{Path, PathBuf};

/// Sidecar describing a binary snapshot `<name>.bin`.
///
/// The binary holds `ω̂` then `θ̂`, each as `len` complex numbers stored
/// `re, im` interleaved in little-endian `f64`, row-major over `(k, j)` with
/// index `(k + K)(2J + 1) + (j + J)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotHeader {
    #[serde(rename = "K")]
    pub k_max: usize,
    #[serde(rename = "J")]
    pub j_max: usize,
    #[serde(rename = "Ly")]
    pub ly: f64,
    pub nx: usize,
    pub ny: usize,
    pub t: f64,
    pub endianness: String,
    pub dtype: String,
    pub layout: String,
    pub fields: Vec<String>,
}

fn io(e: std::io::Error) -> Error {
    Error::Format(e.to_string())
}

fn paths(dir: &Path, name: &str) -> (PathBuf, PathBuf) {
    (dir.join(format!("{name}.json")), dir.join(format!("{name}.bin")))
}

/// Writes `<dir>/<name>.json` and `<dir>/<name>.bin`.
pub fn write_snapshot<T: Real>(state: &SimState<T>, dir: &Path, name: &str) -> Result<SnapshotHeader> {
    let g = state.grid();
    let header = SnapshotHeader {
        k_max: g.k_max(),
        j_max: g.j_max(),
        ly: g.ly().to_f64_lossy(),
        nx: g.nx(),
        ny: g.ny(),
        t: state.t.to_f64_lossy(),
        endianness: "little".into(),
        dtype: "f64".into(),
        layout: "row-major (k, j), re/im interleaved".into(),
        fields: vec!["omega".into(), "theta".into()],
    };
    let mut bytes = Vec::with_capacity(32 * g.len());
    for f in [&state.omega, &state.theta] {
        for c in f.as_slice() {
            bytes.extend_from_slice(&c.re.to_f64_lossy().to_le_bytes());
            bytes.extend_from_slice(&c.im.to_f64_lossy().to_le_bytes());
        }
    }
    fs::create_dir_all(dir).map_err(io)?;
    let (jp, bp) = paths(dir, name);
    let text = serde_json::to_string_pretty(&header).map_err(|e| Error::Format(e.to_string()))?;
    fs::write(&bp, bytes).map_err(io)?;
    fs::write(&jp, text).map_err(io)?;
    Ok(header)
}

pub fn read_snapshot<T: Real>(dir: &Path, name: &str) -> Result<SimState<T>> {
    let (jp, bp) = paths(dir, name);
    let text = fs::read_to_string(&jp).map_err(io)?;
    let h: SnapshotHeader = serde_json::from_str(&text).map_err(|e| Error::Format(e.to_string()))?;
    if h.endianness != "little" || h.dtype != "f64" {
        return Err(Error::Format(format!("unsupported encoding {} {}", h.endianness, h.dtype)));
    }
    let grid = SpectralGrid::with_transform(h.k_max, h.j_max, T::lit(h.ly), h.nx, h.ny)?;
    let bytes = fs::read(&bp).map_err(io)?;
    let n = grid.len();
    if bytes.len() != 32 * n {
        return Err(Error::Format(format!("expected {} bytes, found {}", 32 * n, bytes.len())));
    }
    let val = |i: usize| {
        let mut b = [0u8; 8];
        b.copy_from_slice(&bytes[8 * i..8 * i + 8]);
        T::lit(f64::from_le_bytes(b))
    };
    let field = |off: usize| {
        let data = (0..n).map(|i| Complex::new(val(2 * (off + i)), val(2 * (off + i) + 1))).collect();
        SpectralField::from_vec(grid, data)
    };
    SimState::new(field(0)?, field(n)?, T::lit(h.t))
}
