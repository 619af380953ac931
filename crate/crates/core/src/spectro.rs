//! Spectral processing: FID → complex spectrum → per-slot phase-sensitive
//! peak amplitudes → bits.
//!
//! The spectrum is the zero-filled forward DFT of the FID, frequency axis
//! ascending and centered on the carrier, with the first-order phase ramp
//! `exp(+i·2π·f·acq_delay)` applied per bin. Readout is phase-sensitive: an
//! all-ones reference run fixes a per-slot phase, and each payload bit is
//! the sign of the real part of its slot peak rotated by that calibration
//! phase. Any per-bin phase convention common to reference and payload
//! cancels in that rotation; this ramp is the one under which off-peak bins
//! inside a crowded search window stay closest to the calibrated phase, so
//! a noise-induced jump of the window maximum rarely corrupts the sign.

use crate::dynamics::Fid;
use crate::linalg::C64;
use crate::pulse::Harmonic;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectroError {
    #[error("FID is empty")]
    EmptyFid,
    #[error("zero-fill factor must be at least 1")]
    BadZeroFill,
    #[error("frequency {f} Hz is outside the spectral window [{lo}, {hi}] Hz")]
    OutOfWindow { f: f64, lo: f64, hi: f64 },
    #[error("search window ±{half_window} Hz spans {bins} bins, need at least 3")]
    WindowTooNarrow { half_window: f64, bins: usize },
    #[error("half-window must be positive and finite, got {0}")]
    BadWindow(f64),
    #[error(
        "weak reference at {offset} Hz: peak magnitude {peak:.3e} is below 10x the \
         off-comb floor {floor:.3e}"
    )]
    WeakReference { offset: f64, peak: f64, floor: f64 },
    #[error("no calibration entry for the harmonic at {offset} Hz")]
    MissingCalibration { offset: f64 },
    #[error("comb is empty")]
    EmptyComb,
    #[error("spectrum has no off-comb bins to estimate the floor from")]
    NoFloorBins,
    #[error("spectrum CSV line {line}: {reason}")]
    CsvParse { line: usize, reason: String },
}

/// A complex spectrum on a uniform ascending frequency grid; frequency zero
/// is the carrier.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub freqs_hz: Vec<f64>,
    pub values: Vec<C64>,
    /// Grid spacing, 1/(n_fft·dwell).
    pub resolution_hz: f64,
}

/// Forward-transform an FID into a [`Spectrum`].
///
/// The samples are zero-padded to `zero_fill × len`, transformed, reordered
/// to an ascending centered frequency axis, and bin f is multiplied by the
/// first-order ramp `exp(+i·2π·f·acq_delay)`. A tone at f sampled from
/// t = acq_delay carries the dead-time phase `+2π·f·acq_delay`, so this
/// ramp doubles it rather than cancelling it; the convention is fixed
/// pipeline-wide and drops out of the calibrated readout (see the module
/// docs for why it is the preferred one).
pub fn spectrum(fid: &Fid, zero_fill: usize) -> Result<Spectrum, SpectroError> {
    if fid.samples.is_empty() {
        return Err(SpectroError::EmptyFid);
    }
    if zero_fill < 1 {
        return Err(SpectroError::BadZeroFill);
    }
    let n_fft = fid.samples.len() * zero_fill;
    let mut buf: Vec<C64> = Vec::with_capacity(n_fft);
    buf.extend_from_slice(&fid.samples);
    buf.resize(n_fft, C64::new(0.0, 0.0));
    FftPlanner::new().plan_fft_forward(n_fft).process(&mut buf);

    let resolution = 1.0 / (n_fft as f64 * fid.dwell_s);
    let half = n_fft / 2;
    let mut freqs = Vec::with_capacity(n_fft);
    let mut values = Vec::with_capacity(n_fft);
    for k in 0..n_fft {
        let src = (k + n_fft - half) % n_fft;
        let f = (k as f64 - half as f64) * resolution;
        let ramp = C64::from_polar(1.0, 2.0 * std::f64::consts::PI * f * fid.acq_delay_s);
        freqs.push(f);
        values.push(buf[src] * ramp);
    }
    Ok(Spectrum {
        freqs_hz: freqs,
        values,
        resolution_hz: resolution,
    })
}

/// A picked peak: the complex bin value and the bin's frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub value: C64,
    pub freq_hz: f64,
}

/// Return the maximum-magnitude bin within ±`half_window_hz` of `f_hz`.
///
/// The window must cover at least 3 bins (comb slots are assumed at least
/// that wide) and `f_hz` must lie inside the spectral window.
pub fn pick_peak(spec: &Spectrum, f_hz: f64, half_window_hz: f64) -> Result<Peak, SpectroError> {
    if !half_window_hz.is_finite() || half_window_hz <= 0.0 {
        return Err(SpectroError::BadWindow(half_window_hz));
    }
    let (lo, hi) = (
        *spec.freqs_hz.first().ok_or(SpectroError::EmptyFid)?,
        *spec.freqs_hz.last().ok_or(SpectroError::EmptyFid)?,
    );
    if !f_hz.is_finite() || f_hz < lo || f_hz > hi {
        return Err(SpectroError::OutOfWindow { f: f_hz, lo, hi });
    }
    let mut best: Option<(f64, usize)> = None;
    let mut bins = 0usize;
    // The grid is uniform and ascending: scan the index range of the window.
    let start = ((f_hz - half_window_hz - lo) / spec.resolution_hz).ceil().max(0.0) as usize;
    for k in start..spec.freqs_hz.len() {
        let df = spec.freqs_hz[k] - f_hz;
        if df > half_window_hz {
            break;
        }
        if df.abs() <= half_window_hz {
            bins += 1;
            let mag = spec.values[k].norm();
            if best.map_or(true, |(m, _)| mag > m) {
                best = Some((mag, k));
            }
        }
    }
    if bins < 3 {
        return Err(SpectroError::WindowTooNarrow {
            half_window: half_window_hz,
            bins,
        });
    }
    let (_, k) = best.expect("window contains bins");
    Ok(Peak {
        value: spec.values[k],
        freq_hz: spec.freqs_hz[k],
    })
}

/// Per-slot reference phases captured from an all-ones run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseCalibration {
    /// (harmonic offset Hz, reference peak phase rad), one per comb slot.
    pub entries: Vec<(f64, f64)>,
}

impl PhaseCalibration {
    /// Phase stored for the slot at `offset_hz`, if any.
    pub fn phase_for(&self, offset_hz: f64) -> Option<f64> {
        self.entries
            .iter()
            .find(|(off, _)| (off - offset_hz).abs() < 1e-9)
            .map(|&(_, phase)| phase)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("calibration serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SpectroError> {
        serde_json::from_str(text).map_err(|e| SpectroError::CsvParse {
            line: 0,
            reason: e.to_string(),
        })
    }
}

/// Peak-search half-window for a comb: a quarter of the smallest slot gap,
/// so neighbouring slots can never capture each other's peaks. A
/// single-harmonic comb falls back to a quarter of the default slot spacing.
pub fn comb_half_window_hz(comb: &[Harmonic]) -> f64 {
    let mut offsets: Vec<f64> = comb.iter().map(|h| h.offset_hz).collect();
    offsets.sort_by(|a, b| a.partial_cmp(b).expect("offsets are finite"));
    let min_gap = offsets
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(f64::INFINITY, f64::min);
    if min_gap.is_finite() {
        min_gap / 4.0
    } else {
        crate::defaults::SPACING_HZ / 4.0
    }
}

/// Median magnitude of the bins farther than `half` from every comb slot —
/// the noise-plus-clutter floor a usable peak must clear.
pub fn off_comb_floor(
    spec: &Spectrum,
    comb: &[Harmonic],
    half: f64,
) -> Result<f64, SpectroError> {
    let mut mags: Vec<f64> = spec
        .freqs_hz
        .iter()
        .zip(&spec.values)
        .filter(|(f, _)| comb.iter().all(|h| (h.offset_hz - **f).abs() > half))
        .map(|(_, v)| v.norm())
        .collect();
    if mags.is_empty() {
        return Err(SpectroError::NoFloorBins);
    }
    mags.sort_by(|a, b| a.partial_cmp(b).expect("magnitudes are finite"));
    Ok(mags[mags.len() / 2])
}

/// Capture per-slot phases from the spectrum of an all-ones reference run.
///
/// Errors if any reference peak sits below 10× the median off-comb
/// magnitude: such a slot has no usable signal and readout against it would
/// be noise.
pub fn calibrate(
    reference: &Spectrum,
    comb: &[Harmonic],
) -> Result<PhaseCalibration, SpectroError> {
    if comb.is_empty() {
        return Err(SpectroError::EmptyComb);
    }
    let half = comb_half_window_hz(comb);
    let floor = off_comb_floor(reference, comb, half)?;
    let mut entries = Vec::with_capacity(comb.len());
    for h in comb {
        let peak = pick_peak(reference, h.offset_hz, half)?;
        let mag = peak.value.norm();
        if mag < 10.0 * floor || mag == 0.0 {
            return Err(SpectroError::WeakReference {
                offset: h.offset_hz,
                peak: mag,
                floor,
            });
        }
        entries.push((h.offset_hz, peak.value.arg()));
    }
    Ok(PhaseCalibration { entries })
}

/// One decoded comb slot: the raw peak and its phase-rotated real part, the
/// sign of which is the stored bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlotReading {
    pub offset_hz: f64,
    pub peak: Peak,
    /// Re[peak · exp(−i·cal_phase)], the signed decoded amplitude.
    pub rotated_re: f64,
    pub bit: u8,
}

/// Read every comb slot against its calibration phase.
pub fn slot_readings(
    spec: &Spectrum,
    comb: &[Harmonic],
    cal: &PhaseCalibration,
) -> Result<Vec<SlotReading>, SpectroError> {
    if comb.is_empty() {
        return Err(SpectroError::EmptyComb);
    }
    let half = comb_half_window_hz(comb);
    let mut readings = Vec::with_capacity(comb.len());
    for h in comb {
        let phase = cal
            .phase_for(h.offset_hz)
            .ok_or(SpectroError::MissingCalibration { offset: h.offset_hz })?;
        let peak = pick_peak(spec, h.offset_hz, half)?;
        let rotated_re = (peak.value * C64::from_polar(1.0, -phase)).re;
        readings.push(SlotReading {
            offset_hz: h.offset_hz,
            peak,
            rotated_re,
            bit: u8::from(rotated_re > 0.0),
        });
    }
    Ok(readings)
}

/// Decode bits from a payload spectrum: bit k is 1 exactly when the slot-k
/// peak, rotated by the reference phase, has positive real part.
pub fn read_bits(
    spec: &Spectrum,
    comb: &[Harmonic],
    cal: &PhaseCalibration,
) -> Result<Vec<u8>, SpectroError> {
    Ok(slot_readings(spec, comb, cal)?
        .into_iter()
        .map(|r| r.bit)
        .collect())
}

/// Multiply the FID by exp(−t/t_decay) (time measured like the damping in
/// acquisition, from pulse end including the delay). Display smoothing only;
/// nothing in the decode path applies it.
pub fn apodize(fid: &Fid, t_decay_s: f64) -> Fid {
    let mut out = fid.clone();
    for (k, s) in out.samples.iter_mut().enumerate() {
        let t = fid.acq_delay_s + k as f64 * fid.dwell_s;
        *s *= (-t / t_decay_s).exp();
    }
    out
}

fn fmt17(x: f64) -> String {
    // 17 significant digits: every f64 parses back to the identical bits,
    // which the uniform-grid check on the frequency column relies on.
    format!("{:.16e}", x)
}

impl Spectrum {
    /// Render as CSV with header `freq_hz,re,im,mag`, full double
    /// precision.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("freq_hz,re,im,mag\n");
        for (f, v) in self.freqs_hz.iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt17(*f),
                fmt17(v.re),
                fmt17(v.im),
                fmt17(v.norm())
            ));
        }
        out
    }

    /// Parse a CSV produced by [`Spectrum::to_csv`]; the grid must be
    /// uniform and ascending.
    pub fn from_csv(text: &str) -> Result<Spectrum, SpectroError> {
        let err = |line: usize, reason: &str| SpectroError::CsvParse {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "freq_hz,re,im,mag" => {}
            _ => return Err(err(1, "expected header \"freq_hz,re,im,mag\"")),
        }
        let mut freqs = Vec::new();
        let mut values = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(err(idx + 1, "expected 4 comma-separated fields"));
            }
            let f: f64 = fields[0].trim().parse().map_err(|_| err(idx + 1, "bad freq"))?;
            let re: f64 = fields[1].trim().parse().map_err(|_| err(idx + 1, "bad re"))?;
            let im: f64 = fields[2].trim().parse().map_err(|_| err(idx + 1, "bad im"))?;
            freqs.push(f);
            values.push(C64::new(re, im));
        }
        if freqs.len() < 2 {
            return Err(err(0, "need at least two rows"));
        }
        let res = freqs[1] - freqs[0];
        if !(res > 0.0) {
            return Err(err(0, "frequency grid is not ascending"));
        }
        for (k, &f) in freqs.iter().enumerate() {
            let expect = freqs[0] + k as f64 * res;
            if (f - expect).abs() > 1e-6 * res {
                return Err(err(k + 2, "frequency grid is not uniform"));
            }
        }
        Ok(Spectrum {
            freqs_hz: freqs,
            values,
            resolution_hz: res,
        })
    }
}
