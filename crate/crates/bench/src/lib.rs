//! Benchmark-only crate; see `benches/pipeline.rs`.
//!
//! Shared fixtures for the benchmarks live here so the bench target stays a
//! thin harness.

use spinmem::{Geometry, Harmonic, PulseProgram, SpinSystem};

/// The default 6-spin chain used across benchmarks.
pub fn chain6() -> SpinSystem {
    spinmem::generate_spin_system(Geometry::Chain, 6, 800.0, 0.0, 7).expect("valid system")
}

/// A 12-slot comb at the default spacing and amplitude, all bits set.
pub fn comb12() -> Vec<Harmonic> {
    let bits = vec![1u8; 12];
    let base = spinmem::pulse::default_base_offset(bits.len(), 200.0);
    spinmem::bits_to_harmonics(&bits, base, 200.0, 3.0).expect("valid comb")
}

/// The default write pulse over `comb12`.
pub fn pulse12() -> PulseProgram {
    PulseProgram::new(comb12(), 0.3).expect("valid pulse")
}
