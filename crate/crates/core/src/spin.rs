//! Spin-system representation and Hamiltonian construction.
//!
//! A cluster of `n` spin-1/2 nuclei lives in a dense 2^n-dimensional product
//! basis. Basis index convention: spin `i` maps to bit `n-1-i` of the basis
//! index (spin 0 is the most significant bit) and a cleared bit means
//! spin-up (m = +1/2), so index 0 is the all-up state.
//!
//! All operator entries are dimensionless; Hamiltonian entries are in Hz.

use crate::linalg::C64;
use ndarray::Array2;
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::str::FromStr;
use thiserror::Error;

/// Largest spin count simulated densely (64 M complex entries per matrix).
pub const DENSE_LIMIT: usize = 12;

#[derive(Debug, Error)]
pub enum SpinError {
    #[error("spin index {i} out of range for {n} spins")]
    IndexOutOfRange { i: usize, n: usize },
    #[error("{n} spins exceeds the dense-simulation limit of {max}")]
    DenseLimit { n: usize, max: usize },
    #[error("spin count must be at least 1")]
    EmptySystem,
    #[error("coupling matrix must be symmetric with zero diagonal")]
    AsymmetricCouplings,
    #[error("offsets/couplings shape does not match n = {n}")]
    ShapeMismatch { n: usize },
    #[error("spin system contains a non-finite entry")]
    NonFinite,
    #[error("nearest-neighbour coupling must be non-negative")]
    NegativeCoupling,
    #[error("unknown geometry \"{0}\" (expected \"chain\" or \"ring\")")]
    UnknownGeometry(String),
    #[error("spin system JSON: {0}")]
    Json(#[from] serde_json::Error),
}

/// A cluster of spin-1/2 nuclei: per-spin resonance offsets and the
/// symmetric dipolar coupling matrix, both in Hz. Offsets are relative to
/// the rotating-frame carrier at the comb center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinSystem {
    pub n: usize,
    pub offsets_hz: Vec<f64>,
    pub couplings_hz: Vec<Vec<f64>>,
}

impl SpinSystem {
    pub fn new(offsets_hz: Vec<f64>, couplings_hz: Vec<Vec<f64>>) -> Result<Self, SpinError> {
        let sys = SpinSystem {
            n: offsets_hz.len(),
            offsets_hz,
            couplings_hz,
        };
        sys.validate()?;
        Ok(sys)
    }

    /// Hilbert-space dimension 2^n.
    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn validate(&self) -> Result<(), SpinError> {
        if self.n == 0 {
            return Err(SpinError::EmptySystem);
        }
        if self.n > DENSE_LIMIT {
            return Err(SpinError::DenseLimit {
                n: self.n,
                max: DENSE_LIMIT,
            });
        }
        if self.offsets_hz.len() != self.n
            || self.couplings_hz.len() != self.n
            || self.couplings_hz.iter().any(|row| row.len() != self.n)
        {
            return Err(SpinError::ShapeMismatch { n: self.n });
        }
        let finite = self.offsets_hz.iter().all(|x| x.is_finite())
            && self
                .couplings_hz
                .iter()
                .all(|row| row.iter().all(|x| x.is_finite()));
        if !finite {
            return Err(SpinError::NonFinite);
        }
        for i in 0..self.n {
            if self.couplings_hz[i][i] != 0.0 {
                return Err(SpinError::AsymmetricCouplings);
            }
            for j in 0..i {
                if self.couplings_hz[i][j] != self.couplings_hz[j][i] {
                    return Err(SpinError::AsymmetricCouplings);
                }
            }
        }
        Ok(())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spin system serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, SpinError> {
        let sys: SpinSystem = serde_json::from_str(text)?;
        sys.validate()?;
        Ok(sys)
    }
}

/// Single-spin operator axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    X,
    Y,
    Z,
}

/// Collective operator axis; `Plus`/`Minus` are the raising and lowering
/// combinations I± = Ix ± i·Iy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectiveAxis {
    X,
    Y,
    Z,
    Plus,
    Minus,
}

fn check_size(n: usize) -> Result<(), SpinError> {
    if n == 0 {
        return Err(SpinError::EmptySystem);
    }
    if n > DENSE_LIMIT {
        return Err(SpinError::DenseLimit { n, max: DENSE_LIMIT });
    }
    Ok(())
}

/// The operator (1/2)·σ_axis acting on spin `i`, identity on all others.
///
/// Hermitian and traceless; entries are 0, ±1/2 or ±i/2.
pub fn single_spin_operator(n: usize, i: usize, axis: Axis) -> Result<Array2<C64>, SpinError> {
    check_size(n)?;
    if i >= n {
        return Err(SpinError::IndexOutOfRange { i, n });
    }
    let dim = 1usize << n;
    let mask = 1usize << (n - 1 - i);
    let mut op = Array2::<C64>::zeros((dim, dim));
    for b in 0..dim {
        let up = b & mask == 0;
        match axis {
            Axis::Z => op[(b, b)] = C64::new(if up { 0.5 } else { -0.5 }, 0.0),
            Axis::X => op[(b ^ mask, b)] = C64::new(0.5, 0.0),
            Axis::Y => {
                // ⟨up|Iy|down⟩ = -i/2, ⟨down|Iy|up⟩ = +i/2.
                op[(b ^ mask, b)] = C64::new(0.0, if up { 0.5 } else { -0.5 });
            }
        }
    }
    Ok(op)
}

/// Sum of [`single_spin_operator`] over all spins; `Plus`/`Minus` give the
/// collective raising/lowering operators used for detection.
pub fn collective_operator(n: usize, axis: CollectiveAxis) -> Result<Array2<C64>, SpinError> {
    check_size(n)?;
    let dim = 1usize << n;
    let mut op = Array2::<C64>::zeros((dim, dim));
    for i in 0..n {
        let mask = 1usize << (n - 1 - i);
        for b in 0..dim {
            let up = b & mask == 0;
            match axis {
                CollectiveAxis::Z => {
                    op[(b, b)] += C64::new(if up { 0.5 } else { -0.5 }, 0.0);
                }
                CollectiveAxis::X => {
                    op[(b ^ mask, b)] += C64::new(0.5, 0.0);
                }
                CollectiveAxis::Y => {
                    op[(b ^ mask, b)] += C64::new(0.0, if up { 0.5 } else { -0.5 });
                }
                // ⟨up|I+|down⟩ = 1: the raising operator flips a down spin up.
                CollectiveAxis::Plus => {
                    if !up {
                        op[(b ^ mask, b)] += C64::new(1.0, 0.0);
                    }
                }
                CollectiveAxis::Minus => {
                    if up {
                        op[(b ^ mask, b)] += C64::new(1.0, 0.0);
                    }
                }
            }
        }
    }
    Ok(op)
}

/// Secular homonuclear dipolar Hamiltonian, Hz:
///
/// H_dd = Σ_{i<j} d_ij · (2·Iz_i·Iz_j − Ix_i·Ix_j − Iy_i·Iy_j)
///
/// Hermitian, and commutes with the total Iz (it only mixes basis states of
/// equal magnetization through flip-flop terms).
pub fn dipolar_hamiltonian(sys: &SpinSystem) -> Result<Array2<C64>, SpinError> {
    sys.validate()?;
    let dim = sys.dim();
    let mut h = Array2::<C64>::zeros((dim, dim));
    for i in 0..sys.n {
        for j in (i + 1)..sys.n {
            let d = sys.couplings_hz[i][j];
            if d == 0.0 {
                continue;
            }
            let mi = 1usize << (sys.n - 1 - i);
            let mj = 1usize << (sys.n - 1 - j);
            for b in 0..dim {
                let same = (b & mi == 0) == (b & mj == 0);
                // 2·Iz_i·Iz_j is diagonal: +d/2 for aligned pairs, −d/2 otherwise.
                h[(b, b)] += C64::new(if same { 0.5 * d } else { -0.5 * d }, 0.0);
                // −(Ix_i·Ix_j + Iy_i·Iy_j) = −(I+_i·I−_j + I−_i·I+_j)/2 exchanges
                // anti-aligned pairs.
                if !same {
                    h[(b ^ mi ^ mj, b)] += C64::new(-0.5 * d, 0.0);
                }
            }
        }
    }
    Ok(h)
}

/// Zeeman offset Hamiltonian Σ_i ν_i·Iz_i, Hz; diagonal.
pub fn zeeman_hamiltonian(sys: &SpinSystem) -> Result<Array2<C64>, SpinError> {
    sys.validate()?;
    let dim = sys.dim();
    let mut h = Array2::<C64>::zeros((dim, dim));
    for i in 0..sys.n {
        let nu = sys.offsets_hz[i];
        if nu == 0.0 {
            continue;
        }
        let mask = 1usize << (sys.n - 1 - i);
        for b in 0..dim {
            let s = if b & mask == 0 { 0.5 } else { -0.5 };
            h[(b, b)] += C64::new(nu * s, 0.0);
        }
    }
    Ok(h)
}

/// Cluster geometry for [`generate_spin_system`]: spins at unit spacing on a
/// line or on a circle whose nearest-neighbour chord is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Geometry {
    Chain,
    Ring,
}

impl FromStr for Geometry {
    type Err = SpinError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "chain" => Ok(Geometry::Chain),
            "ring" => Ok(Geometry::Ring),
            other => Err(SpinError::UnknownGeometry(other.to_string())),
        }
    }
}

/// Deterministically generate a cluster: couplings fall off as
/// d_ij = d_nn / r_ij³ with distances from the geometry, and offsets are
/// drawn uniformly over ±spread/2 from a seeded generator.
pub fn generate_spin_system(
    geometry: Geometry,
    n: usize,
    d_nn: f64,
    spread: f64,
    seed: u64,
) -> Result<SpinSystem, SpinError> {
    check_size(n)?;
    if !(d_nn >= 0.0) || !spread.is_finite() {
        return Err(if d_nn.is_finite() {
            SpinError::NegativeCoupling
        } else {
            SpinError::NonFinite
        });
    }
    let distance = |i: usize, j: usize| -> f64 {
        let k = i.abs_diff(j);
        match geometry {
            Geometry::Chain => k as f64,
            Geometry::Ring => {
                let r = 0.5 / (std::f64::consts::PI / n as f64).sin();
                2.0 * r * (std::f64::consts::PI * k as f64 / n as f64).sin()
            }
        }
    };
    let mut couplings = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                couplings[i][j] = d_nn / distance(i, j).powi(3);
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let offsets = (0..n)
        .map(|_| (rng.random::<f64>() - 0.5) * spread)
        .collect();
    SpinSystem::new(offsets, couplings)
}

/// Number of allowed single-quantum transitions of an n-spin cluster,
/// binomial(2n, n+1), exact.
pub fn count_transitions(n: usize) -> BigUint {
    // C(2n, n+1) = C(2n, n-1) accumulated as a product of integer-valued
    // partial binomials, so every intermediate division is exact.
    let mut acc = BigUint::from(1u32);
    for k in 1..n {
        acc = acc * BigUint::from(n + 1 + k) / BigUint::from(k);
    }
    acc
}
