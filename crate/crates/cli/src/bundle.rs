//! Run-bundle layout and the manifest that makes a bundle self-describing.
//!
//! A bundle is a directory with fixed file names; the manifest records every
//! parameter of the run so `simulate` and `read` need no flags beyond the
//! directory itself.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use spinmem::{AcqParams, Harmonic};

pub const SYSTEM_FILE: &str = "system.json";
pub const PULSE_FILE: &str = "pulse.json";
pub const SHAPE_FILE: &str = "pulse.shape";
pub const MANIFEST_FILE: &str = "manifest.json";
pub const FID_FILE: &str = "fid.csv";
pub const SPECTRUM_FILE: &str = "spectrum.csv";
pub const REFERENCE_FILE: &str = "reference.csv";
pub const PLOT_FILE: &str = "spectrum.svg";

/// Where the bundle's spin system came from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "snake_case")]
pub enum SystemSource {
    Generated {
        geometry: String,
        spins: usize,
        d_nn_hz: f64,
        spread_hz: f64,
        seed: u64,
    },
    File {
        origin: String,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PayloadRecord {
    /// The stored bit array, most-significant first, as a 0/1 string.
    pub bits: String,
    /// Text form when the payload was given as text.
    pub text: Option<String>,
    /// Decimal form when the payload was given as a number.
    pub number: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CombRecord {
    pub base_offset_hz: f64,
    pub spacing_hz: f64,
    pub amplitude_hz: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PulseRecord {
    pub duration_s: f64,
    /// Explicit propagation step; `null` means the accuracy policy decides.
    pub dt_s: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AcqRecord {
    pub points: usize,
    pub dwell_s: f64,
    pub delay_s: f64,
    /// Damping constant; `null` disables damping.
    pub t2star_s: Option<f64>,
    pub noise_sigma: f64,
    pub transients: u32,
    pub seed: u64,
}

/// Everything needed to reproduce a run, stored as `manifest.json`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub payload: PayloadRecord,
    pub system: SystemSource,
    pub comb: CombRecord,
    pub pulse: PulseRecord,
    pub acquisition: AcqRecord,
    pub zero_fill: usize,
}

impl Manifest {
    pub fn payload_bits(&self) -> Result<Vec<u8>> {
        parse_bits(&self.payload.bits)
    }

    /// The payload comb implied by the manifest.
    pub fn comb_harmonics(&self) -> Result<Vec<Harmonic>> {
        let bits = self.payload_bits()?;
        Ok(spinmem::bits_to_harmonics(
            &bits,
            self.comb.base_offset_hz,
            self.comb.spacing_hz,
            self.comb.amplitude_hz,
        )?)
    }

    pub fn acq_params(&self) -> AcqParams {
        AcqParams {
            n_points: self.acquisition.points,
            dwell_s: self.acquisition.dwell_s,
            acq_delay_s: self.acquisition.delay_s,
            t2star_s: self.acquisition.t2star_s,
            noise_sigma: self.acquisition.noise_sigma,
            transients: self.acquisition.transients,
            seed: self.acquisition.seed,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("manifest serializes")
    }
}

pub fn parse_bits(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .map(|c| match c {
            '0' => Ok(0u8),
            '1' => Ok(1u8),
            other => anyhow::bail!("bit strings may contain only 0 and 1, found {other:?}"),
        })
        .collect()
}

pub fn bits_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// Write a file atomically: the content lands under a temporary name in the
/// same directory and is renamed into place, so readers never see a partial
/// file.
pub fn atomic_write(path: &Path, contents: &str) -> Result<()> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut tmp: PathBuf = path.to_path_buf();
    let mut name = path
        .file_name()
        .map(|n| n.to_os_string())
        .unwrap_or_default();
    name.push(".tmp");
    tmp.set_file_name(name);
    fs::write(&tmp, contents).with_context(|| format!("writing {}", tmp.display()))?;
    fs::rename(&tmp, path)
        .with_context(|| format!("renaming {} into place", path.display()))?;
    Ok(())
}

pub fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

pub fn load_manifest(out_dir: &Path) -> Result<Manifest> {
    let path = out_dir.join(MANIFEST_FILE);
    let text = read_file(&path)
        .with_context(|| format!("bundle incomplete: no {MANIFEST_FILE} in {}", out_dir.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}
