//! Independent reference implementations used to cross-check the library:
//! operators built by explicit Kronecker products, a Runge-Kutta integrator
//! for the equation of motion, and a factorial-based binomial. None of this
//! shares code with the crate under test.

#![allow(dead_code)]

use ndarray::linalg::kron;
use ndarray::Array2;
use num_bigint::BigUint;
use spinmem::{C64, Harmonic, SpinSystem};

fn pauli_half(axis: char) -> Array2<C64> {
    let z = C64::new(0.0, 0.0);
    let (a, b, c, d) = match axis {
        'x' => (z, C64::new(0.5, 0.0), C64::new(0.5, 0.0), z),
        'y' => (z, C64::new(0.0, -0.5), C64::new(0.0, 0.5), z),
        'z' => (C64::new(0.5, 0.0), z, z, C64::new(-0.5, 0.0)),
        _ => panic!("axis must be x, y, or z"),
    };
    Array2::from_shape_vec((2, 2), vec![a, b, c, d]).unwrap()
}

/// Spin-i operator on an n-spin register as I ⊗ … ⊗ σ/2 ⊗ … ⊗ I, spin 0
/// leftmost.
pub fn kron_single(n: usize, i: usize, axis: char) -> Array2<C64> {
    let mut op = Array2::<C64>::eye(1);
    for k in 0..n {
        let factor = if k == i { pauli_half(axis) } else { Array2::eye(2) };
        op = kron(&op, &factor);
    }
    op
}

pub fn kron_collective(n: usize, axis: char) -> Array2<C64> {
    let mut op = Array2::<C64>::zeros((1 << n, 1 << n));
    for i in 0..n {
        op += &kron_single(n, i, axis);
    }
    op
}

/// Raising operator Σᵢ (Ix_i + i·Iy_i) built from the Kronecker singles.
pub fn kron_raising(n: usize) -> Array2<C64> {
    let x = kron_collective(n, 'x');
    let y = kron_collective(n, 'y');
    x + y.mapv(|v| v * C64::new(0.0, 1.0))
}

/// Static Hamiltonian Σ_{i<j} d_ij (2 Iz_i Iz_j − Ix_i Ix_j − Iy_i Iy_j)
/// + Σᵢ νᵢ Iz_i assembled by matrix products of Kronecker operators.
pub fn kron_static_hamiltonian(sys: &SpinSystem) -> Array2<C64> {
    let n = sys.n;
    let dim = 1 << n;
    let mut h = Array2::<C64>::zeros((dim, dim));
    for i in 0..n {
        for j in (i + 1)..n {
            let d = C64::new(sys.couplings_hz[i][j], 0.0);
            let zz = kron_single(n, i, 'z').dot(&kron_single(n, j, 'z'));
            let xx = kron_single(n, i, 'x').dot(&kron_single(n, j, 'x'));
            let yy = kron_single(n, i, 'y').dot(&kron_single(n, j, 'y'));
            h.scaled_add(d * 2.0, &zz);
            h.scaled_add(-d, &xx);
            h.scaled_add(-d, &yy);
        }
        h.scaled_add(C64::new(sys.offsets_hz[i], 0.0), &kron_single(n, i, 'z'));
    }
    h
}

/// Complex RF envelope Σ_k a_k·exp(i(2π·off_k·t + φ_k)) evaluated directly.
pub fn envelope(harmonics: &[Harmonic], t: f64) -> C64 {
    harmonics
        .iter()
        .map(|h| {
            C64::new(h.amplitude_hz, 0.0)
                * C64::from_polar(
                    1.0,
                    2.0 * std::f64::consts::PI * h.offset_hz * t + h.phase_rad,
                )
        })
        .sum()
}

fn commutator_rhs(h: &Array2<C64>, rho: &Array2<C64>) -> Array2<C64> {
    let c = h.dot(rho) - rho.dot(h);
    c.mapv(|v| v * C64::new(0.0, -2.0 * std::f64::consts::PI))
}

/// Fourth-order Runge-Kutta integration of ρ̇ = −i·2π·[H(t), ρ] from t0
/// over `steps` steps of `dt`, H supplied as a closure of absolute time.
pub fn rk4_evolve<F>(rho0: &Array2<C64>, h_of_t: F, t0: f64, dt: f64, steps: usize) -> Array2<C64>
where
    F: Fn(f64) -> Array2<C64>,
{
    let mut rho = rho0.clone();
    for k in 0..steps {
        let t = t0 + k as f64 * dt;
        let h1 = h_of_t(t);
        let hm = h_of_t(t + dt / 2.0);
        let h2 = h_of_t(t + dt);
        let k1 = commutator_rhs(&h1, &rho);
        let k2 = commutator_rhs(&hm, &(&rho + &k1.mapv(|v| v * 0.5 * dt)));
        let k3 = commutator_rhs(&hm, &(&rho + &k2.mapv(|v| v * 0.5 * dt)));
        let k4 = commutator_rhs(&h2, &(&rho + &k3.mapv(|v| v * dt)));
        rho = rho
            + k1.mapv(|v| v * (dt / 6.0))
            + k2.mapv(|v| v * (dt / 3.0))
            + k3.mapv(|v| v * (dt / 3.0))
            + k4.mapv(|v| v * (dt / 6.0));
    }
    rho
}

pub fn factorial(n: usize) -> BigUint {
    let mut acc = BigUint::from(1u32);
    for k in 2..=n {
        acc *= BigUint::from(k);
    }
    acc
}

/// C(n, k) as n!/(k!(n−k)!), the direct factorial form.
pub fn factorial_binomial(n: usize, k: usize) -> BigUint {
    factorial(n) / (factorial(k) * factorial(n - k))
}

pub fn frobenius_distance(a: &Array2<C64>, b: &Array2<C64>) -> f64 {
    (a - b).iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

pub fn trace(m: &Array2<C64>) -> C64 {
    m.diag().iter().sum()
}
