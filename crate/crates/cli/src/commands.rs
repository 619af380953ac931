//! The five pipeline stages plus the end-to-end round trip.

use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use num_bigint::BigUint;
use spinmem::pulse::{default_base_offset, export_shape};
use spinmem::spectro::{comb_half_window_hz, off_comb_floor};
use spinmem::{
    acquire_fid, bits_to_harmonics, calibrate, evolve_pulse, pick_peak, slot_readings, spectrum,
    thermal_state, Geometry, PulseProgram, SpinSystem, Spectrum,
};

use crate::args::{GenArgs, PlotArgs, ReadArgs, RunArgs, SimulateArgs};
use crate::bundle::{
    atomic_write, bits_string, load_manifest, parse_bits, read_file, AcqRecord, CombRecord,
    Manifest, PayloadRecord, PulseRecord, SystemSource, FID_FILE, MANIFEST_FILE, PLOT_FILE,
    PULSE_FILE, REFERENCE_FILE, SHAPE_FILE, SPECTRUM_FILE, SYSTEM_FILE,
};
use crate::plot::render_spectrum_svg;

/// Generate a spin system and store it as `system.json` in the bundle.
pub fn cmd_gen(args: &GenArgs) -> Result<i32> {
    let geometry = Geometry::from_str(&args.geometry)?;
    let sys = spinmem::generate_spin_system(
        geometry,
        args.spins,
        args.d_nn_hz,
        args.spread_hz,
        args.seed,
    )?;
    let path = args.out_dir.join(SYSTEM_FILE);
    atomic_write(&path, &sys.to_json())?;
    println!(
        "wrote {} ({} spins, {}, d_nn {} Hz, spread {} Hz, seed {})",
        path.display(),
        args.spins,
        args.geometry,
        args.d_nn_hz,
        args.spread_hz,
        args.seed
    );
    Ok(0)
}

/// Resolved payload: the bit array plus the human-readable forms that
/// produced it.
struct Payload {
    bits: Vec<u8>,
    text: Option<String>,
    number: Option<String>,
}

fn resolve_payload(args: &RunArgs) -> Result<Payload> {
    if let Some(text) = &args.text {
        let folded = text.to_ascii_lowercase();
        let bits = spinmem::codec::text_to_bits(&folded)?;
        return Ok(Payload {
            bits,
            text: Some(folded),
            number: None,
        });
    }
    if let Some(bit_text) = &args.bits {
        return Ok(Payload {
            bits: parse_bits(bit_text)?,
            text: None,
            number: None,
        });
    }
    let decimal = args
        .number
        .as_ref()
        .expect("clap enforces exactly one payload flag");
    let value = BigUint::from_str(decimal)
        .map_err(|e| anyhow!("--number must be a decimal integer: {e}"))?;
    let len = args.bit_len.unwrap_or_else(|| value.bits().max(1) as usize);
    let bits = spinmem::codec::number_to_bits(&value, len)?;
    Ok(Payload {
        bits,
        text: None,
        number: Some(value.to_string()),
    })
}

fn build_system(args: &RunArgs) -> Result<(SpinSystem, SystemSource)> {
    if let Some(path) = &args.system {
        let sys = SpinSystem::from_json(&read_file(path)?)?;
        return Ok((
            sys,
            SystemSource::File {
                origin: path.display().to_string(),
            },
        ));
    }
    let geometry = Geometry::from_str(&args.geometry)?;
    let sys = spinmem::generate_spin_system(
        geometry,
        args.spins,
        args.d_nn_hz,
        args.spread_hz,
        args.gen_seed,
    )?;
    Ok((
        sys,
        SystemSource::Generated {
            geometry: args.geometry.clone(),
            spins: args.spins,
            d_nn_hz: args.d_nn_hz,
            spread_hz: args.spread_hz,
            seed: args.gen_seed,
        },
    ))
}

/// Encode the payload into a pulse program and lay down the bundle:
/// system, pulse, shape export, and manifest.
pub fn cmd_write(args: &RunArgs) -> Result<i32> {
    let payload = resolve_payload(args)?;
    if let Some(expected) = args.harmonics {
        if expected != payload.bits.len() {
            bail!(
                "payload is {} bits but {} harmonics were configured; \
                 one harmonic stores exactly one bit",
                payload.bits.len(),
                expected
            );
        }
    }
    let base = args
        .base_offset_hz
        .unwrap_or_else(|| default_base_offset(payload.bits.len(), args.spacing_hz));
    let comb = bits_to_harmonics(&payload.bits, base, args.spacing_hz, args.amp_hz)?;
    let nyquist = 0.5 / args.dwell_s;
    let f_max = comb.iter().map(|h| h.offset_hz.abs()).fold(0.0, f64::max);
    if f_max >= nyquist {
        bail!(
            "comb extends to {f_max} Hz but the acquisition window ends at \
             {nyquist} Hz; shrink --spacing-hz or --dwell-s"
        );
    }
    let pulse = PulseProgram::new(comb, args.duration_s)?;
    let (sys, source) = build_system(args)?;

    let manifest = Manifest {
        payload: PayloadRecord {
            bits: bits_string(&payload.bits),
            text: payload.text,
            number: payload.number,
        },
        system: source,
        comb: CombRecord {
            base_offset_hz: base,
            spacing_hz: args.spacing_hz,
            amplitude_hz: args.amp_hz,
        },
        pulse: PulseRecord {
            duration_s: args.duration_s,
            dt_s: args.dt_s,
        },
        acquisition: AcqRecord {
            points: args.points,
            dwell_s: args.dwell_s,
            delay_s: args.delay_s,
            t2star_s: (args.t2star_s > 0.0).then_some(args.t2star_s),
            noise_sigma: args.noise,
            transients: args.transients,
            seed: args.seed,
        },
        zero_fill: args.zero_fill,
    };

    atomic_write(&args.out_dir.join(SYSTEM_FILE), &sys.to_json())?;
    atomic_write(&args.out_dir.join(PULSE_FILE), &pulse.to_json())?;
    atomic_write(&args.out_dir.join(SHAPE_FILE), &export_shape(&pulse)?)?;
    atomic_write(&args.out_dir.join(MANIFEST_FILE), &manifest.to_json())?;
    println!(
        "wrote bundle {} ({} bits, {} harmonics at {} Hz spacing)",
        args.out_dir.display(),
        manifest.payload.bits.len(),
        pulse.harmonics.len(),
        args.spacing_hz
    );
    Ok(0)
}

/// Run the physics: thermal state, pulse propagation, acquisition, FFT —
/// once for the payload and once for the all-ones reference.
pub fn cmd_simulate(args: &SimulateArgs) -> Result<i32> {
    simulate_bundle(&args.out_dir)?;
    Ok(0)
}

pub fn simulate_bundle(out_dir: &Path) -> Result<()> {
    let manifest = load_manifest(out_dir)?;
    let sys = SpinSystem::from_json(&read_file(&out_dir.join(SYSTEM_FILE)).with_context(
        || format!("bundle incomplete: no {SYSTEM_FILE} in {}", out_dir.display()),
    )?)?;
    let pulse = PulseProgram::from_json(&read_file(&out_dir.join(PULSE_FILE)).with_context(
        || format!("bundle incomplete: no {PULSE_FILE} in {}", out_dir.display()),
    )?)?;
    let bits = manifest.payload_bits()?;
    let acq = manifest.acq_params();

    let rho0 = thermal_state(&sys)?;
    let rho = evolve_pulse(&rho0, &sys, &pulse, manifest.pulse.dt_s).map_err(|e| {
        anyhow!("{e}; shorten --duration-s or pass a smaller --dt-s")
    })?;
    let fid = acquire_fid(&rho, &sys, &acq)?;
    atomic_write(&out_dir.join(FID_FILE), &fid.to_csv())?;
    let spec = spectrum(&fid, manifest.zero_fill)?;
    atomic_write(&out_dir.join(SPECTRUM_FILE), &spec.to_csv())?;

    // Reference run: same comb geometry with every bit set, acquired
    // noise-free so the calibration phases carry no random error.
    let ones = vec![1u8; bits.len()];
    let ref_comb = bits_to_harmonics(
        &ones,
        manifest.comb.base_offset_hz,
        manifest.comb.spacing_hz,
        manifest.comb.amplitude_hz,
    )?;
    let ref_pulse =
        PulseProgram::with_sample_step(ref_comb, pulse.duration_s, pulse.sample_step_s)?;
    let ref_rho = evolve_pulse(&rho0, &sys, &ref_pulse, manifest.pulse.dt_s).map_err(|e| {
        anyhow!("{e}; shorten --duration-s or pass a smaller --dt-s")
    })?;
    let mut ref_acq = acq.clone();
    ref_acq.noise_sigma = 0.0;
    let ref_fid = acquire_fid(&ref_rho, &sys, &ref_acq)?;
    let ref_spec = spectrum(&ref_fid, manifest.zero_fill)?;
    atomic_write(&out_dir.join(REFERENCE_FILE), &ref_spec.to_csv())?;

    println!(
        "wrote {}, {} and {} in {}",
        FID_FILE,
        SPECTRUM_FILE,
        REFERENCE_FILE,
        out_dir.display()
    );
    Ok(())
}

/// Decode a spectrum against the bundle's reference and report per peak.
pub fn cmd_read(args: &ReadArgs) -> Result<i32> {
    let manifest = load_manifest(&args.out_dir)?;
    let spectrum_path = args
        .spectrum
        .clone()
        .unwrap_or_else(|| args.out_dir.join(SPECTRUM_FILE));
    let spec = Spectrum::from_csv(&read_file(&spectrum_path)?)?;
    let reference = Spectrum::from_csv(&read_file(&args.out_dir.join(REFERENCE_FILE)).context(
        "bundle incomplete: no reference spectrum; run `spinmem simulate` first",
    )?)?;
    let comb = manifest.comb_harmonics()?;
    let half = comb_half_window_hz(&comb);

    // Check every slot of the reference before calibrating, so a weak
    // calibration is reported per peak rather than at the first failure.
    let ref_floor = off_comb_floor(&reference, &comb, half)?;
    let mut weak = Vec::new();
    for h in &comb {
        let peak = pick_peak(&reference, h.offset_hz, half)?;
        if peak.value.norm() < 10.0 * ref_floor || peak.value.norm() == 0.0 {
            weak.push((h.offset_hz, peak.value.norm()));
        }
    }
    if !weak.is_empty() {
        for (offset, mag) in &weak {
            eprintln!(
                "calibration failure at {offset:+} Hz: reference peak {mag:.3e} \
                 below 10x floor {ref_floor:.3e}"
            );
        }
        bail!("{} of {} reference slots unusable", weak.len(), comb.len());
    }

    let cal = calibrate(&reference, &comb)?;
    let readings = slot_readings(&spec, &comb, &cal)?;
    let floor = off_comb_floor(&spec, &comb, half)?;

    println!(
        "{:>11} {:>13} {:>11} {:>4} {:>11}",
        "offset_hz", "magnitude", "phase_deg", "bit", "margin"
    );
    for r in &readings {
        let margin = if floor > 0.0 {
            r.rotated_re.abs() / floor
        } else {
            f64::INFINITY
        };
        let flag = if margin < 10.0 { "  LOW" } else { "" };
        println!(
            "{:>11.2} {:>13.4e} {:>11.2} {:>4} {:>11.2}{}",
            r.offset_hz,
            r.peak.value.norm(),
            r.peak.value.arg().to_degrees(),
            r.bit,
            margin,
            flag
        );
    }

    let bits: Vec<u8> = readings.iter().map(|r| r.bit).collect();
    println!("bits: {}", bits_string(&bits));
    if bits.len() % 5 == 0 {
        match spinmem::codec::bits_to_text(&bits) {
            Ok(text) => println!("text: {text:?}"),
            Err(e) => println!("text: (not a valid character encoding: {e})"),
        }
    }
    println!("number: {}", spinmem::codec::bits_to_number(&bits)?);

    // A bundle read checks the decode against the manifest; an explicit
    // --spectrum is an ad-hoc inspection and is not judged.
    if args.spectrum.is_none() {
        let expected = manifest.payload.bits.as_str();
        let decoded = bits_string(&bits);
        if decoded == expected {
            println!("payload matches the manifest");
        } else {
            println!("decode mismatch: manifest has {expected}, read {decoded}");
            return Ok(1);
        }
    }
    Ok(0)
}

/// Render the spectrum CSV as an SVG plot.
pub fn cmd_plot(args: &PlotArgs) -> Result<i32> {
    let spectrum_path = args
        .spectrum
        .clone()
        .unwrap_or_else(|| args.out_dir.join(SPECTRUM_FILE));
    let spec = Spectrum::from_csv(&read_file(&spectrum_path)?)?;
    let offsets: Vec<f64> = match load_manifest(&args.out_dir) {
        Ok(manifest) => manifest
            .comb_harmonics()?
            .iter()
            .map(|h| h.offset_hz)
            .collect(),
        Err(_) => Vec::new(),
    };
    let svg = render_spectrum_svg(&spec, &offsets)?;
    let out = args
        .out
        .clone()
        .unwrap_or_else(|| args.out_dir.join(PLOT_FILE));
    atomic_write(&out, &svg)?;
    println!("wrote {} ({} comb markers)", out.display(), offsets.len());
    Ok(0)
}

/// Chain write → simulate → read and assert the payload survived.
pub fn cmd_roundtrip(args: &RunArgs) -> Result<i32> {
    cmd_write(args)?;
    simulate_bundle(&args.out_dir)?;
    let code = cmd_read(&ReadArgs {
        out_dir: args.out_dir.clone(),
        spectrum: None,
    })?;
    if code == 0 {
        println!("roundtrip: payload recovered");
    } else {
        println!("roundtrip: payload corrupted");
    }
    Ok(code)
}
