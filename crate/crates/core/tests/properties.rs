//! Randomized invariants: algebraic identities of the operators, the RF
//! synthesizer, the transform chain, and the codec.

mod common;

use ndarray::Array2;
use num_bigint::BigUint;
use proptest::collection::vec;
use proptest::prelude::*;
use spinmem::dynamics::Fid;
use spinmem::linalg::{hermiticity_defect, unitarity_defect};
use spinmem::pulse::parse_shape;
use spinmem::spin::{
    dipolar_hamiltonian, single_spin_operator, zeeman_hamiltonian, Axis,
};
use spinmem::{
    bits_to_harmonics, calibrate, read_bits, rf_field, spectrum, step_propagator, thermal_state,
    C64, Harmonic, PulseProgram, SpinSystem, Spectrum,
};

fn harmonic_strategy() -> impl Strategy<Value = Harmonic> {
    (-1200.0..1200.0f64, 0.5..6.0f64, 0.0..std::f64::consts::TAU)
        .prop_map(|(offset_hz, amplitude_hz, phase_rad)| Harmonic {
            offset_hz,
            amplitude_hz,
            phase_rad,
        })
}

fn small_system_strategy() -> impl Strategy<Value = SpinSystem> {
    (1usize..=4)
        .prop_flat_map(|n| {
            (
                vec(-400.0..400.0f64, n),
                vec(vec(0.0..900.0f64, n), n),
            )
        })
        .prop_map(|(offsets, raw)| {
            let n = offsets.len();
            let mut couplings = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in (i + 1)..n {
                    couplings[i][j] = raw[i][j];
                    couplings[j][i] = raw[i][j];
                }
            }
            SpinSystem::new(offsets, couplings).unwrap()
        })
}

proptest! {
    /// The synthesizer is additive: the field of a concatenated harmonic
    /// list is the sum of the fields.
    #[test]
    fn rf_field_is_additive(
        a in vec(harmonic_strategy(), 1..5),
        b in vec(harmonic_strategy(), 1..5),
        t in 0.0..0.3f64,
    ) {
        let dur = 0.3;
        let fa = rf_field(&PulseProgram::with_sample_step(a.clone(), dur, 1e-5).unwrap(), t).unwrap();
        let fb = rf_field(&PulseProgram::with_sample_step(b.clone(), dur, 1e-5).unwrap(), t).unwrap();
        let mut joined = a;
        joined.extend(b);
        // Concatenation may duplicate offsets; evaluate directly instead of
        // constructing a (possibly invalid) program.
        let fj = common::envelope(&joined, t);
        prop_assert!((fj - (fa + fb)).norm() < 1e-9 * (1.0 + fj.norm()));
    }

    /// Negating an amplitude is the same field as advancing its phase by π.
    #[test]
    fn sign_flip_equals_phase_shift(h in harmonic_strategy(), t in 0.0..0.3f64) {
        let dur = 0.3;
        let negated = Harmonic { amplitude_hz: -h.amplitude_hz, ..h };
        let shifted = Harmonic { phase_rad: h.phase_rad + std::f64::consts::PI, ..h };
        let f_neg = rf_field(&PulseProgram::with_sample_step(vec![negated], dur, 1e-5).unwrap(), t).unwrap();
        let f_shift = rf_field(&PulseProgram::with_sample_step(vec![shifted], dur, 1e-5).unwrap(), t).unwrap();
        prop_assert!((f_neg - f_shift).norm() < 1e-9 * (1.0 + f_neg.norm()));
    }

    /// A comb whose offsets are integer multiples of the spacing repeats
    /// with period 1/spacing.
    #[test]
    fn aligned_comb_is_periodic(
        bits in vec(0u8..=1, 2..12),
        spacing in 50.0..400.0f64,
        t in 0.0..0.1f64,
        amp in 0.5..5.0f64,
    ) {
        let k = bits.len() as f64;
        // Integer-aligned base: offsets sit at integer multiples of spacing.
        let base = -(k - 1.0).floor() * spacing;
        let comb = bits_to_harmonics(&bits, base, spacing, amp).unwrap();
        let dur = 0.5;
        let pulse = PulseProgram::with_sample_step(comb, dur, 1e-5).unwrap();
        let f0 = rf_field(&pulse, t).unwrap();
        let f1 = rf_field(&pulse, t + 1.0 / spacing).unwrap();
        prop_assert!((f0 - f1).norm() < 1e-6 * (1.0 + f0.norm()));
    }

    /// Energy is preserved by the transform when no padding, and the ramp
    /// is modulus-preserving for any delay.
    #[test]
    fn parseval_energy_balance(
        res in vec(-1.0..1.0f64, 64),
        ims in vec(-1.0..1.0f64, 64),
        delay in 0.0..2e-3f64,
    ) {
        let samples: Vec<C64> = res.iter().zip(&ims).map(|(&r, &i)| C64::new(r, i)).collect();
        let fid = Fid { samples, dwell_s: 1e-4, acq_delay_s: delay, transients: 1 };
        let spec = spectrum(&fid, 1).unwrap();
        let time_sum: f64 = fid.samples.iter().map(|s| s.norm_sqr()).sum();
        let freq_sum: f64 =
            spec.values.iter().map(|v| v.norm_sqr()).sum::<f64>() / spec.values.len() as f64;
        prop_assert!((time_sum - freq_sum).abs() <= 1e-9 * time_sum.max(1e-30));
    }

    /// An on-grid tone peaks at exactly its own bin.
    #[test]
    fn on_grid_tone_peaks_at_its_bin(bin in -120i32..120, mag in 0.1..10.0f64) {
        let n = 256usize;
        let dwell = 1e-3;
        let freq = bin as f64 / (n as f64 * dwell);
        let samples: Vec<C64> = (0..n)
            .map(|k| C64::from_polar(mag, 2.0 * std::f64::consts::PI * freq * k as f64 * dwell))
            .collect();
        let fid = Fid { samples, dwell_s: dwell, acq_delay_s: 0.0, transients: 1 };
        let spec = spectrum(&fid, 1).unwrap();
        let best = spec
            .freqs_hz
            .iter()
            .zip(&spec.values)
            .max_by(|a, b| a.1.norm().partial_cmp(&b.1.norm()).unwrap())
            .unwrap();
        prop_assert!((best.0 - freq).abs() < 1e-9);
    }

    /// Readout depends only on peak signs relative to the reference, not on
    /// any positive overall scale.
    #[test]
    fn read_bits_ignores_positive_scaling(
        signs in vec(prop::bool::ANY, 2..6),
        mags in vec(1.0..10.0f64, 6),
        phase in 0.0..std::f64::consts::TAU,
        scale in prop::sample::select(vec![1e-6, 0.03, 1.0, 40.0, 1e6]),
    ) {
        let k = signs.len();
        let comb: Vec<Harmonic> = (0..k)
            .map(|i| Harmonic {
                offset_hz: (i as f64 - (k as f64 - 1.0) / 2.0) * 100.0,
                amplitude_hz: 3.0,
                phase_rad: 0.0,
            })
            .collect();
        let grid: Vec<f64> = (0..512).map(|i| (i as f64 - 256.0) * 2.0).collect();
        let make = |flip: bool| -> Spectrum {
            let values: Vec<C64> = grid
                .iter()
                .map(|f| {
                    for (i, h) in comb.iter().enumerate() {
                        if (f - h.offset_hz).abs() < 1.0 {
                            let sign = if !flip || signs[i] { 1.0 } else { -1.0 };
                            return C64::from_polar(mags[i], phase) * sign;
                        }
                    }
                    C64::new(0.0, 0.0)
                })
                .collect();
            Spectrum { freqs_hz: grid.clone(), values, resolution_hz: 2.0 }
        };
        let reference = make(false);
        let cal = calibrate(&reference, &comb).unwrap();
        let payload = make(true);
        let scaled = Spectrum {
            freqs_hz: payload.freqs_hz.clone(),
            values: payload.values.iter().map(|v| v * scale).collect(),
            resolution_hz: payload.resolution_hz,
        };
        let expected: Vec<u8> = signs.iter().map(|&s| u8::from(s)).collect();
        prop_assert_eq!(read_bits(&payload, &comb, &cal).unwrap(), expected.clone());
        prop_assert_eq!(read_bits(&scaled, &comb, &cal).unwrap(), expected);
    }

    /// Static Hamiltonians are Hermitian and the thermal state is a valid
    /// traceless Hermitian start for any system.
    #[test]
    fn static_operators_are_well_formed(sys in small_system_strategy()) {
        let h = dipolar_hamiltonian(&sys).unwrap() + zeeman_hamiltonian(&sys).unwrap();
        prop_assert!(hermiticity_defect(&h) < 1e-12);
        let rho = thermal_state(&sys).unwrap();
        prop_assert!(hermiticity_defect(&rho) < 1e-12);
        prop_assert!(common::trace(&rho).norm() < 1e-12);
    }

    /// Spin operators obey [Ix_i, Iy_i] = i·Iz_i on the same site and
    /// commute across sites.
    #[test]
    fn operator_algebra_holds(n in 2usize..=4, i in 0usize..4, j in 0usize..4) {
        let (i, j) = (i % n, j % n);
        let x_i = single_spin_operator(n, i, Axis::X).unwrap();
        let y_i = single_spin_operator(n, i, Axis::Y).unwrap();
        let z_i = single_spin_operator(n, i, Axis::Z).unwrap();
        let comm = x_i.dot(&y_i) - y_i.dot(&x_i);
        let expect = z_i.mapv(|v| v * C64::new(0.0, 1.0));
        prop_assert!(common::frobenius_distance(&comm, &expect) < 1e-12);
        if i != j {
            let y_j = single_spin_operator(n, j, Axis::Y).unwrap();
            let cross = x_i.dot(&y_j) - y_j.dot(&x_i);
            prop_assert!(cross.iter().all(|v| v.norm() < 1e-12));
        }
    }

    /// Propagators of random Hermitian generators are unitary.
    #[test]
    fn propagators_are_unitary(
        entries in vec((-1000.0..1000.0f64, -1000.0..1000.0f64), 16),
        dt in 1e-6..1e-3f64,
    ) {
        let a = Array2::from_shape_vec(
            (4, 4),
            entries.iter().map(|&(r, i)| C64::new(r, i)).collect(),
        )
        .unwrap();
        let h = (&a + &a.t().mapv(|v| v.conj())).mapv(|v| v * 0.5);
        let u = step_propagator(&h, dt).unwrap();
        prop_assert!(unitarity_defect(&u) < 1e-10);
    }

    /// Text over the 27-symbol alphabet survives the bit codec.
    #[test]
    fn text_round_trips(text in "[ a-z]{1,40}") {
        let bits = spinmem::codec::text_to_bits(&text).unwrap();
        prop_assert_eq!(bits.len(), 5 * text.len());
        prop_assert_eq!(spinmem::codec::bits_to_text(&bits).unwrap(), text);
    }

    /// Any number below 2^len survives number → bits → number.
    #[test]
    fn numbers_round_trip(words in vec(0u32..u32::MAX, 1..5), extra in 0usize..16) {
        let value = words
            .iter()
            .fold(BigUint::from(0u32), |acc, &w| (acc << 32) | BigUint::from(w));
        let len = value.bits() as usize + extra + 1;
        let bits = spinmem::codec::number_to_bits(&value, len).unwrap();
        prop_assert_eq!(bits.len(), len);
        prop_assert_eq!(spinmem::codec::bits_to_number(&bits).unwrap(), value);
    }

    /// Exported shape files parse back to the same sample table.
    #[test]
    fn shape_export_parses_back(
        harmonics in vec(harmonic_strategy(), 1..6),
        duration in 0.01..0.2f64,
    ) {
        let pulse = match PulseProgram::new(harmonics, duration) {
            Ok(p) => p,
            Err(_) => return Ok(()), // duplicate random offsets: picked again
        };
        let text = spinmem::pulse::export_shape(&pulse).unwrap();
        let shape = parse_shape(&text).unwrap();
        prop_assert_eq!(shape.rows.len(), shape.points);
        prop_assert!(shape.rows.iter().all(|&(a, p)| (0.0..=1.0).contains(&a)
            && (0.0..360.0).contains(&p)));
        prop_assert!(shape.scale_hz > 0.0);
    }
}
