//! Multi-frequency pulse construction: map a bit array to a comb of signed
//! circularly polarized harmonics, evaluate the complex RF waveform, and
//! export/import a normalized shape file.
//!
//! Each harmonic contributes `a·exp(i·(2π·offset·t + phase))`; the real part
//! drives Ix and the imaginary part drives Iy, so a single harmonic is a
//! rotating field with no counter-rotating component.

use crate::linalg::C64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PulseError {
    #[error("bit array is empty")]
    EmptyBits,
    #[error("entry at position {pos} is {value}, not a bit")]
    NotABit { pos: usize, value: u8 },
    #[error("comb spacing must be positive and finite, got {0}")]
    BadSpacing(f64),
    #[error("harmonic amplitude must be non-negative and finite, got {0}")]
    BadAmplitude(f64),
    #[error("harmonic parameter is not finite")]
    NonFinite,
    #[error("pulse duration must be positive and finite, got {0}")]
    BadDuration(f64),
    #[error("harmonic offsets must be pairwise distinct ({0} Hz occurs twice)")]
    DuplicateOffset(f64),
    #[error("sample step {step}s exceeds the bound {bound}s = 1/(10·max|offset|)")]
    StepTooCoarse { step: f64, bound: f64 },
    #[error("time {t}s is outside the pulse window [0, {duration}]s")]
    TimeOutOfRange { t: f64, duration: f64 },
    #[error("pulse has no harmonics")]
    NoHarmonics,
    #[error("shape file line {line}: {reason}")]
    ShapeParse { line: usize, reason: String },
}

/// One circularly polarized component of the comb. The amplitude is signed:
/// its sign carries the stored bit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Harmonic {
    pub offset_hz: f64,
    pub amplitude_hz: f64,
    pub phase_rad: f64,
}

/// A finite-duration multi-frequency pulse plus the sampling step used for
/// waveform export. The step obeys `sample_step ≤ 1/(10·max|offset|)` so the
/// fastest harmonic is oversampled at least tenfold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseProgram {
    pub harmonics: Vec<Harmonic>,
    pub duration_s: f64,
    pub sample_step_s: f64,
}

fn max_offset(harmonics: &[Harmonic]) -> f64 {
    harmonics
        .iter()
        .map(|h| h.offset_hz.abs())
        .fold(0.0, f64::max)
}

fn step_bound(harmonics: &[Harmonic], duration_s: f64) -> f64 {
    let fmax = max_offset(harmonics);
    if fmax > 0.0 {
        duration_s.min(1.0 / (10.0 * fmax))
    } else {
        duration_s
    }
}

impl PulseProgram {
    /// Build a pulse with the default sample step, the oversampling bound
    /// itself capped at the duration.
    pub fn new(harmonics: Vec<Harmonic>, duration_s: f64) -> Result<Self, PulseError> {
        let step = step_bound(&harmonics, duration_s);
        Self::with_sample_step(harmonics, duration_s, step)
    }

    /// Build a pulse with an explicit sample step.
    pub fn with_sample_step(
        harmonics: Vec<Harmonic>,
        duration_s: f64,
        sample_step_s: f64,
    ) -> Result<Self, PulseError> {
        let pulse = PulseProgram {
            harmonics,
            duration_s,
            sample_step_s,
        };
        pulse.validate()?;
        Ok(pulse)
    }

    pub fn validate(&self) -> Result<(), PulseError> {
        if self.harmonics.is_empty() {
            return Err(PulseError::NoHarmonics);
        }
        for h in &self.harmonics {
            if !h.offset_hz.is_finite() || !h.phase_rad.is_finite() {
                return Err(PulseError::NonFinite);
            }
            if !h.amplitude_hz.is_finite() {
                return Err(PulseError::BadAmplitude(h.amplitude_hz));
            }
        }
        if !self.duration_s.is_finite() || self.duration_s <= 0.0 {
            return Err(PulseError::BadDuration(self.duration_s));
        }
        let mut offsets: Vec<f64> = self.harmonics.iter().map(|h| h.offset_hz).collect();
        offsets.sort_by(|a, b| a.partial_cmp(b).expect("offsets are finite"));
        for pair in offsets.windows(2) {
            if pair[0] == pair[1] {
                return Err(PulseError::DuplicateOffset(pair[0]));
            }
        }
        let bound = step_bound(&self.harmonics, self.duration_s);
        if !(self.sample_step_s > 0.0) || self.sample_step_s > bound * (1.0 + 1e-12) {
            return Err(PulseError::StepTooCoarse {
                step: self.sample_step_s,
                bound,
            });
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("pulse program serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, PulseError> {
        let pulse: PulseProgram = serde_json::from_str(text).map_err(|e| PulseError::ShapeParse {
            line: 0,
            reason: e.to_string(),
        })?;
        pulse.validate()?;
        Ok(pulse)
    }
}

/// Centered comb base offset: `-(K-1)/2 · spacing`, so K slots straddle the
/// carrier symmetrically with no harmonic at frequency zero for even K.
pub fn default_base_offset(bit_count: usize, spacing_hz: f64) -> f64 {
    -((bit_count as f64 - 1.0) / 2.0) * spacing_hz
}

/// Map a bit array onto a harmonic comb: harmonic `k` sits at
/// `base_offset + k·spacing` with amplitude `+amplitude` for bit 1 and
/// `-amplitude` for bit 0, phase zero.
///
/// A zero amplitude is accepted and produces a silent comb.
pub fn bits_to_harmonics(
    bits: &[u8],
    base_offset_hz: f64,
    spacing_hz: f64,
    amplitude_hz: f64,
) -> Result<Vec<Harmonic>, PulseError> {
    if bits.is_empty() {
        return Err(PulseError::EmptyBits);
    }
    for (pos, &value) in bits.iter().enumerate() {
        if value > 1 {
            return Err(PulseError::NotABit { pos, value });
        }
    }
    if !spacing_hz.is_finite() || spacing_hz <= 0.0 {
        return Err(PulseError::BadSpacing(spacing_hz));
    }
    if !amplitude_hz.is_finite() || amplitude_hz < 0.0 {
        return Err(PulseError::BadAmplitude(amplitude_hz));
    }
    if !base_offset_hz.is_finite() {
        return Err(PulseError::NonFinite);
    }
    Ok(bits
        .iter()
        .enumerate()
        .map(|(k, &b)| Harmonic {
            offset_hz: base_offset_hz + k as f64 * spacing_hz,
            amplitude_hz: if b == 1 { amplitude_hz } else { -amplitude_hz },
            phase_rad: 0.0,
        })
        .collect())
}

/// Complex RF field of the pulse at time `t` (seconds from pulse start):
/// Σ_k a_k · exp(i·(2π·offset_k·t + phase_k)). Errors outside [0, duration].
pub fn rf_field(pulse: &PulseProgram, t: f64) -> Result<C64, PulseError> {
    if !(0.0..=pulse.duration_s).contains(&t) {
        return Err(PulseError::TimeOutOfRange {
            t,
            duration: pulse.duration_s,
        });
    }
    let mut f = C64::new(0.0, 0.0);
    for h in &pulse.harmonics {
        let arg = 2.0 * std::f64::consts::PI * h.offset_hz * t + h.phase_rad;
        f += C64::from_polar(h.amplitude_hz, arg);
    }
    Ok(f)
}

/// A parsed shape file: midpoint-sampled waveform rows normalized to unit
/// peak amplitude, plus the absolute scale in Hz.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeFile {
    pub points: usize,
    pub step_us: f64,
    pub scale_hz: f64,
    /// (relative amplitude in [0,1], phase in degrees in [0,360)) per sample.
    pub rows: Vec<(f64, f64)>,
}

fn fmt9(x: f64) -> String {
    format!("{:.8e}", x)
}

/// Render the pulse as a normalized amplitude/phase shape file.
///
/// The waveform is sampled at interval midpoints (`points` intervals of
/// `duration/points`, sample at `(m+0.5)·step`), amplitudes are divided by
/// the peak |field| which is recorded in the `scale_hz` header, and phases
/// are degrees in [0, 360). All numbers use nine significant digits.
pub fn export_shape(pulse: &PulseProgram) -> Result<String, PulseError> {
    pulse.validate()?;
    let points = (pulse.duration_s / pulse.sample_step_s).ceil() as usize;
    let step = pulse.duration_s / points as f64;
    let samples: Vec<C64> = (0..points)
        .map(|m| rf_field(pulse, (m as f64 + 0.5) * step))
        .collect::<Result<_, _>>()?;
    let scale = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut out = String::new();
    out.push_str(&format!("# points: {points}\n"));
    out.push_str(&format!("# step_us: {}\n", fmt9(step * 1e6)));
    out.push_str(&format!("# scale_hz: {}\n", fmt9(scale)));
    for z in &samples {
        let rel = if scale > 0.0 { z.norm() / scale } else { 0.0 };
        let mut deg = z.arg().to_degrees();
        if deg < 0.0 {
            deg += 360.0;
        }
        if deg >= 360.0 {
            deg -= 360.0;
        }
        out.push_str(&format!("{},{}\n", fmt9(rel), fmt9(deg)));
    }
    Ok(out)
}

/// Parse a shape file produced by [`export_shape`].
pub fn parse_shape(text: &str) -> Result<ShapeFile, PulseError> {
    let err = |line: usize, reason: &str| PulseError::ShapeParse {
        line,
        reason: reason.to_string(),
    };
    let mut lines = text.lines().enumerate();
    let mut header = |key: &str| -> Result<(usize, String), PulseError> {
        let (idx, line) = lines
            .next()
            .ok_or_else(|| err(0, &format!("missing \"# {key}:\" header")))?;
        let rest = line
            .strip_prefix(&format!("# {key}:"))
            .ok_or_else(|| err(idx + 1, &format!("expected \"# {key}:\" header")))?;
        Ok((idx + 1, rest.trim().to_string()))
    };
    let (pl, points_s) = header("points")?;
    let points: usize = points_s.parse().map_err(|_| err(pl, "bad point count"))?;
    let (sl, step_s) = header("step_us")?;
    let step_us: f64 = step_s.parse().map_err(|_| err(sl, "bad step"))?;
    let (cl, scale_s) = header("scale_hz")?;
    let scale_hz: f64 = scale_s.parse().map_err(|_| err(cl, "bad scale"))?;
    let mut rows = Vec::with_capacity(points);
    for (idx, line) in lines {
        if line.trim().is_empty() {
            continue;
        }
        let (a, p) = line
            .split_once(',')
            .ok_or_else(|| err(idx + 1, "expected \"amplitude_rel,phase_deg\""))?;
        let amp: f64 = a.trim().parse().map_err(|_| err(idx + 1, "bad amplitude"))?;
        let phase: f64 = p.trim().parse().map_err(|_| err(idx + 1, "bad phase"))?;
        if !(0.0..=1.0 + 1e-9).contains(&amp) {
            return Err(err(idx + 1, "relative amplitude outside [0, 1]"));
        }
        if !(0.0..360.0).contains(&phase) {
            return Err(err(idx + 1, "phase outside [0, 360) degrees"));
        }
        rows.push((amp, phase));
    }
    if rows.len() != points {
        return Err(err(
            0,
            &format!("header says {points} points but file has {}", rows.len()),
        ));
    }
    Ok(ShapeFile {
        points,
        step_us,
        scale_hz,
        rows,
    })
}
