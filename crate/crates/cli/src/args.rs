//! Command-line surface. Every flag is long-form; physics defaults come
//! from the core crate so the CLI and the library never disagree.

use std::path::PathBuf;

use clap::{ArgGroup, Args, Parser, Subcommand};
use spinmem::defaults;

#[derive(Parser)]
#[command(
    name = "spinmem",
    version,
    about = "Store a bit array in the spectral response of a simulated spin cluster",
    long_about = "Pipeline: encode a payload as a multi-frequency comb pulse, propagate a \
                  dipolar-coupled spin cluster under it, acquire the free induction decay, \
                  and read the bits back from the signs of the phased spectral peaks."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a spin system and save it as system.json.
    Gen(GenArgs),
    /// Encode a payload into a pulse bundle (system, pulse, shape, manifest).
    Write(RunArgs),
    /// Propagate the cluster and emit fid.csv, spectrum.csv and reference.csv.
    Simulate(SimulateArgs),
    /// Decode a spectrum against the bundle reference and print a per-peak report.
    Read(ReadArgs),
    /// Render a spectrum CSV as an SVG plot.
    Plot(PlotArgs),
    /// Run write, simulate and read in sequence and verify the payload.
    Roundtrip(RunArgs),
}

#[derive(Args)]
pub struct GenArgs {
    /// Number of spins in the cluster.
    #[arg(long, default_value_t = defaults::SPINS)]
    pub spins: usize,
    /// Cluster geometry: chain or ring.
    #[arg(long, default_value = "chain")]
    pub geometry: String,
    /// Nearest-neighbour dipolar coupling in Hz.
    #[arg(long, default_value_t = defaults::D_NN_HZ)]
    pub d_nn_hz: f64,
    /// Chemical-shift offset spread in Hz (offsets drawn over ±spread/2).
    #[arg(long, default_value_t = defaults::SPREAD_HZ)]
    pub spread_hz: f64,
    /// Generator seed.
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    /// Bundle directory to write into.
    #[arg(long)]
    pub out_dir: PathBuf,
}

/// Full run configuration, shared by `write` and `roundtrip`.
#[derive(Args)]
#[command(group(ArgGroup::new("payload").required(true).multiple(false)))]
pub struct RunArgs {
    /// Payload as text over the 27-symbol alphabet (space plus a-z).
    #[arg(long, group = "payload")]
    pub text: Option<String>,
    /// Payload as a bit string, e.g. 101100111000.
    #[arg(long, group = "payload")]
    pub bits: Option<String>,
    /// Payload as a decimal integer.
    #[arg(long, group = "payload")]
    pub number: Option<String>,
    /// Bit-array length for --number payloads (default: minimal).
    #[arg(long, requires = "number")]
    pub bit_len: Option<usize>,
    /// Expected harmonic count; errors if the payload length differs.
    #[arg(long)]
    pub harmonics: Option<usize>,

    /// Spin-system JSON to load instead of generating one.
    #[arg(long)]
    pub system: Option<PathBuf>,
    /// Number of spins for the generated system.
    #[arg(long, default_value_t = defaults::SPINS)]
    pub spins: usize,
    /// Geometry for the generated system: chain or ring.
    #[arg(long, default_value = "chain")]
    pub geometry: String,
    /// Nearest-neighbour dipolar coupling in Hz.
    #[arg(long, default_value_t = defaults::D_NN_HZ)]
    pub d_nn_hz: f64,
    /// Chemical-shift offset spread in Hz.
    #[arg(long, default_value_t = defaults::SPREAD_HZ)]
    pub spread_hz: f64,
    /// Seed for the system generator.
    #[arg(long, default_value_t = defaults::SEED)]
    pub gen_seed: u64,

    /// Comb base offset in Hz (default: comb centered on the carrier).
    #[arg(long)]
    pub base_offset_hz: Option<f64>,
    /// Comb slot spacing in Hz.
    #[arg(long, default_value_t = defaults::SPACING_HZ)]
    pub spacing_hz: f64,
    /// Harmonic amplitude in Hz; the sign per slot carries the bit.
    #[arg(long, default_value_t = defaults::AMPLITUDE_HZ)]
    pub amp_hz: f64,
    /// Write-pulse duration in seconds.
    #[arg(long, default_value_t = defaults::DURATION_S)]
    pub duration_s: f64,
    /// Propagation step in seconds (default: accuracy policy).
    #[arg(long)]
    pub dt_s: Option<f64>,

    /// FID record length in points.
    #[arg(long, default_value_t = defaults::POINTS)]
    pub points: usize,
    /// Dwell time in seconds.
    #[arg(long, default_value_t = defaults::DWELL_S)]
    pub dwell_s: f64,
    /// Dead time between pulse end and first sample, seconds.
    #[arg(long, default_value_t = defaults::ACQ_DELAY_S)]
    pub delay_s: f64,
    /// FID damping constant in seconds; 0 disables damping.
    #[arg(long, default_value_t = defaults::T2_STAR_S)]
    pub t2star_s: f64,
    /// Per-transient noise standard deviation on each quadrature.
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    /// Number of averaged transients.
    #[arg(long, default_value_t = defaults::TRANSIENTS)]
    pub transients: u32,
    /// Acquisition noise seed.
    #[arg(long, default_value_t = defaults::SEED)]
    pub seed: u64,
    /// Spectrum zero-fill factor.
    #[arg(long, default_value_t = defaults::ZERO_FILL)]
    pub zero_fill: usize,

    /// Bundle directory to write into.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Bundle directory holding manifest.json, system.json and pulse.json.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Args)]
pub struct ReadArgs {
    /// Bundle directory holding the manifest and reference spectrum.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Spectrum CSV to decode instead of the bundle's own spectrum.csv;
    /// with this flag the decode is not checked against the manifest.
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
}

#[derive(Args)]
pub struct PlotArgs {
    /// Bundle directory; supplies the comb markers and the default paths.
    #[arg(long)]
    pub out_dir: PathBuf,
    /// Spectrum CSV to plot (default: spectrum.csv in the bundle).
    #[arg(long)]
    pub spectrum: Option<PathBuf>,
    /// Output SVG path (default: spectrum.svg in the bundle).
    #[arg(long)]
    pub out: Option<PathBuf>,
}
