//! Density-matrix propagation and FID acquisition.
//!
//! The deviation density matrix starts as Σ Iz / n, evolves under the
//! piecewise-constant midpoint-sampled Hamiltonian H(t) = H_dd + H_z +
//! Re[f(t)]·Ix + Im[f(t)]·Iy (all in Hz; the propagator applies the single
//! 2π), and is then read out as s(t) = Tr[ρ(t)·I+] on a uniform time grid
//! after the acquisition delay, with optional exponential damping and
//! transient-averaged complex Gaussian noise.

use crate::linalg::{self, adjoint, eigh, C64};
use crate::pulse::{rf_field, PulseError, PulseProgram};
use crate::spin::{
    collective_operator, dipolar_hamiltonian, zeeman_hamiltonian, CollectiveAxis, SpinError,
    SpinSystem,
};
use ndarray::{Array1, Array2};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DynamicsError {
    #[error(transparent)]
    Spin(#[from] SpinError),
    #[error(transparent)]
    Pulse(#[from] PulseError),
    #[error(transparent)]
    Linalg(#[from] linalg::LinalgError),
    #[error("density matrix is {got}x{got} but the system needs {expected}x{expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("time step must be positive and finite, got {0}")]
    BadStep(f64),
    #[error("acquisition needs at least one point")]
    NoPoints,
    #[error("dwell time must be positive and finite, got {0}")]
    BadDwell(f64),
    #[error("acquisition delay must be non-negative and finite, got {0}")]
    BadDelay(f64),
    #[error("damping constant must be positive and finite, got {0}")]
    BadDamping(f64),
    #[error("noise sigma must be non-negative and finite, got {0}")]
    BadSigma(f64),
    #[error("transient count must be at least 1")]
    NoTransients,
    #[error("FID CSV line {line}: {reason}")]
    FidParse { line: usize, reason: String },
}

/// High-temperature deviation density matrix Σ_i Iz_i / n (traceless; the
/// identity part carries no dynamics and is dropped).
pub fn thermal_state(sys: &SpinSystem) -> Result<Array2<C64>, DynamicsError> {
    let z = collective_operator(sys.n, CollectiveAxis::Z)?;
    Ok(z.mapv(|v| v / sys.n as f64))
}

/// Unitary for one step of constant Hamiltonian: U = exp(−i·2π·H·dt),
/// H in Hz, computed by eigendecomposition.
pub fn step_propagator(h: &Array2<C64>, dt: f64) -> Result<Array2<C64>, DynamicsError> {
    if !dt.is_finite() || dt <= 0.0 {
        return Err(DynamicsError::BadStep(dt));
    }
    let (w, v) = eigh(h)?;
    let phases: Array1<C64> =
        w.mapv(|x| C64::from_polar(1.0, -2.0 * std::f64::consts::PI * x * dt));
    // U = V · diag(phases) · V†, with the diagonal folded into V's columns.
    let vp = &v * &phases;
    Ok(vp.dot(&adjoint(&v)))
}

/// Default propagation step: the pulse sample step, tightened to
/// 1/(20·W) where W = max|offset| + max row-sum of |couplings| bounds the
/// system's spectral spread in Hz.
pub fn default_dt(sys: &SpinSystem, pulse: &PulseProgram) -> f64 {
    let max_offset = sys.offsets_hz.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let max_row = sys
        .couplings_hz
        .iter()
        .map(|row| row.iter().map(|d| d.abs()).sum())
        .fold(0.0f64, f64::max);
    let w = max_offset + max_row;
    if w > 0.0 {
        pulse.sample_step_s.min(1.0 / (20.0 * w))
    } else {
        pulse.sample_step_s
    }
}

/// Evolve a density matrix through the pulse: the Hamiltonian is sampled at
/// each step midpoint and exponentiated exactly, and the accumulated unitary
/// is applied once at the end. `dt` falls back to [`default_dt`].
pub fn evolve_pulse(
    rho0: &Array2<C64>,
    sys: &SpinSystem,
    pulse: &PulseProgram,
    dt: Option<f64>,
) -> Result<Array2<C64>, DynamicsError> {
    sys.validate()?;
    pulse.validate()?;
    let dim = sys.dim();
    if rho0.dim() != (dim, dim) {
        return Err(DynamicsError::DimensionMismatch {
            expected: dim,
            got: rho0.nrows(),
        });
    }
    let dt = dt.unwrap_or_else(|| default_dt(sys, pulse));
    if !dt.is_finite() || dt <= 0.0 {
        return Err(DynamicsError::BadStep(dt));
    }
    let steps = (pulse.duration_s / dt).ceil().max(1.0) as usize;
    let dt = pulse.duration_s / steps as f64;

    let h0 = dipolar_hamiltonian(sys)? + zeeman_hamiltonian(sys)?;
    let ix = collective_operator(sys.n, CollectiveAxis::X)?;
    let iy = collective_operator(sys.n, CollectiveAxis::Y)?;
    let mut u = Array2::<C64>::eye(dim);
    let mut h = Array2::<C64>::zeros((dim, dim));
    for k in 0..steps {
        let t_mid = (k as f64 + 0.5) * dt;
        let f = rf_field(pulse, t_mid.min(pulse.duration_s))?;
        h.assign(&h0);
        h.scaled_add(C64::new(f.re, 0.0), &ix);
        h.scaled_add(C64::new(f.im, 0.0), &iy);
        let us = step_propagator(&h, dt)?;
        u = us.dot(&u);
    }
    Ok(u.dot(rho0).dot(&adjoint(&u)))
}

/// Acquisition settings for [`acquire_fid`].
#[derive(Debug, Clone, PartialEq)]
pub struct AcqParams {
    pub n_points: usize,
    pub dwell_s: f64,
    /// Dead time between pulse end and the first sample.
    pub acq_delay_s: f64,
    /// Exponential damping constant; `None` disables damping.
    pub t2star_s: Option<f64>,
    /// Per-transient noise standard deviation on each quadrature.
    pub noise_sigma: f64,
    pub transients: u32,
    pub seed: u64,
}

impl Default for AcqParams {
    fn default() -> Self {
        AcqParams {
            n_points: crate::defaults::POINTS,
            dwell_s: crate::defaults::DWELL_S,
            acq_delay_s: crate::defaults::ACQ_DELAY_S,
            t2star_s: Some(crate::defaults::T2_STAR_S),
            noise_sigma: 0.0,
            transients: crate::defaults::TRANSIENTS,
            seed: 0,
        }
    }
}

/// A complex free-induction-decay record on the uniform grid
/// t_k = acq_delay + k·dwell (times measured from pulse end).
#[derive(Debug, Clone, PartialEq)]
pub struct Fid {
    pub samples: Vec<C64>,
    pub dwell_s: f64,
    pub acq_delay_s: f64,
    pub transients: u32,
}

/// Record the FID s(t_k) = Tr[ρ(t_k)·I+] under free evolution of the
/// system Hamiltonian.
///
/// The deterministic signal is synthesized once from the eigenbasis
/// expansion of ρ; damping multiplies it by exp(−t_k/t2star); noise adds
/// the average of `transients` independent complex Gaussian draws per
/// sample (σ per quadrature per transient), reproducible from `seed`.
pub fn acquire_fid(
    rho: &Array2<C64>,
    sys: &SpinSystem,
    params: &AcqParams,
) -> Result<Fid, DynamicsError> {
    sys.validate()?;
    let dim = sys.dim();
    if rho.dim() != (dim, dim) {
        return Err(DynamicsError::DimensionMismatch {
            expected: dim,
            got: rho.nrows(),
        });
    }
    if params.n_points == 0 {
        return Err(DynamicsError::NoPoints);
    }
    if !params.dwell_s.is_finite() || params.dwell_s <= 0.0 {
        return Err(DynamicsError::BadDwell(params.dwell_s));
    }
    if !params.acq_delay_s.is_finite() || params.acq_delay_s < 0.0 {
        return Err(DynamicsError::BadDelay(params.acq_delay_s));
    }
    if let Some(t2) = params.t2star_s {
        if !t2.is_finite() || t2 <= 0.0 {
            return Err(DynamicsError::BadDamping(t2));
        }
    }
    if !params.noise_sigma.is_finite() || params.noise_sigma < 0.0 {
        return Err(DynamicsError::BadSigma(params.noise_sigma));
    }
    if params.transients == 0 {
        return Err(DynamicsError::NoTransients);
    }

    let h0 = dipolar_hamiltonian(sys)? + zeeman_hamiltonian(sys)?;
    let (w, v) = eigh(&h0)?;
    let vdag = adjoint(&v);
    let rho_e = vdag.dot(rho).dot(&v);
    let iplus = collective_operator(sys.n, CollectiveAxis::Plus)?;
    let ip_e = vdag.dot(&iplus).dot(&v);

    // s(t) = Σ_ab ρ̃[a,b]·Ĩ+[b,a]·exp(−i·2π·(w_a−w_b)·t); keep only terms
    // that contribute above double precision.
    let mut amps: Vec<C64> = Vec::new();
    let mut freqs: Vec<f64> = Vec::new();
    let mut peak = 0.0f64;
    for a in 0..dim {
        for b in 0..dim {
            let amp = rho_e[(a, b)] * ip_e[(b, a)];
            peak = peak.max(amp.norm());
            amps.push(amp);
            freqs.push(w[a] - w[b]);
        }
    }
    let keep: Vec<usize> = (0..amps.len())
        .filter(|&k| amps[k].norm() > 1e-14 * peak)
        .collect();

    let mut samples = Vec::with_capacity(params.n_points);
    for k in 0..params.n_points {
        let t = params.acq_delay_s + k as f64 * params.dwell_s;
        let mut s = C64::new(0.0, 0.0);
        for &idx in &keep {
            s += amps[idx] * C64::from_polar(1.0, -2.0 * std::f64::consts::PI * freqs[idx] * t);
        }
        if let Some(t2) = params.t2star_s {
            s *= (-t / t2).exp();
        }
        samples.push(s);
    }

    if params.noise_sigma > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        let normal = StandardNormal;
        let scale = params.noise_sigma / params.transients as f64;
        for _ in 0..params.transients {
            for s in samples.iter_mut() {
                let re: f64 = normal.sample(&mut rng);
                let im: f64 = normal.sample(&mut rng);
                *s += C64::new(re * scale, im * scale);
            }
        }
    }

    Ok(Fid {
        samples,
        dwell_s: params.dwell_s,
        acq_delay_s: params.acq_delay_s,
        transients: params.transients,
    })
}

fn fmt12(x: f64) -> String {
    format!("{:.11e}", x)
}

impl Fid {
    /// Render as CSV with header `index,time_s,re,im`; the time column
    /// includes the acquisition delay. Twelve significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("index,time_s,re,im\n");
        for (k, s) in self.samples.iter().enumerate() {
            let t = self.acq_delay_s + k as f64 * self.dwell_s;
            out.push_str(&format!("{k},{},{},{}\n", fmt12(t), fmt12(s.re), fmt12(s.im)));
        }
        out
    }

    /// Parse a CSV produced by [`Fid::to_csv`]. The time grid must be
    /// uniform; the transient count is not stored in the file and is
    /// restored as 1.
    pub fn from_csv(text: &str) -> Result<Fid, DynamicsError> {
        let err = |line: usize, reason: &str| DynamicsError::FidParse {
            line,
            reason: reason.to_string(),
        };
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, h)) if h.trim() == "index,time_s,re,im" => {}
            _ => return Err(err(1, "expected header \"index,time_s,re,im\"")),
        }
        let mut times = Vec::new();
        let mut samples = Vec::new();
        for (idx, line) in lines {
            if line.trim().is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').collect();
            if fields.len() != 4 {
                return Err(err(idx + 1, "expected 4 comma-separated fields"));
            }
            let k: usize = fields[0].trim().parse().map_err(|_| err(idx + 1, "bad index"))?;
            if k != samples.len() {
                return Err(err(idx + 1, "index column is not consecutive"));
            }
            let t: f64 = fields[1].trim().parse().map_err(|_| err(idx + 1, "bad time"))?;
            let re: f64 = fields[2].trim().parse().map_err(|_| err(idx + 1, "bad re"))?;
            let im: f64 = fields[3].trim().parse().map_err(|_| err(idx + 1, "bad im"))?;
            times.push(t);
            samples.push(C64::new(re, im));
        }
        if samples.len() < 2 {
            return Err(err(0, "need at least two samples to recover the time grid"));
        }
        let dwell = times[1] - times[0];
        if !(dwell > 0.0) {
            return Err(err(0, "time column is not increasing"));
        }
        for (k, &t) in times.iter().enumerate() {
            let expect = times[0] + k as f64 * dwell;
            if (t - expect).abs() > 1e-9 * dwell.max(1.0) {
                return Err(err(k + 2, "time grid is not uniform"));
            }
        }
        Ok(Fid {
            samples,
            dwell_s: dwell,
            acq_delay_s: times[0],
            transients: 1,
        })
    }
}
