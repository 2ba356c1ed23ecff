//! Command-line surface.

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser)]
#[command(
    name = "mw-hilbert",
    about = "Coupler-resonator Hilbert transformer: model evaluation, characterization, transient simulation, ideal-transform oracles, application demos and Touchstone ingestion",
    version
)]
pub struct Cli {
    /// Key = value file supplying defaults for the chosen command; explicit
    /// flags override it. Keys are the long option names.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<std::path::PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the steady-state transfer function over a band and write
    /// magnitude.csv, phase.csv and group_delay.csv.
    Model(ModelArgs),
    /// Sweep coupling values and write the trade-off table (rotated phase,
    /// transition bandwidth, peak delay, half-delay bandwidth).
    Characterize(CharacterizeArgs),
    /// Run the discrete-time flow-graph simulator and compare its steady
    /// state against the analytic response.
    Transient(TransientArgs),
    /// Evaluate the ideal Hilbert transform of a test pulse by closed form
    /// and by principal-value quadrature.
    Hilbert(HilbertArgs),
    /// Application demos: edge detection, peak clipping, SSB modulation.
    Demo(DemoArgs),
    /// Parse a Touchstone .s2p file, report its figures of merit and write
    /// the resampled S21.
    Touchstone(TouchstoneArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ModelArgs {
    /// Coupling magnitude |C| of each unit.
    #[arg(long, default_value_t = 0.3)]
    pub coupling: f64,
    /// Center (resonance) frequency in GHz.
    #[arg(long, default_value_t = 10.0)]
    pub center_freq_ghz: f64,
    /// Uncoupled loop delay in ns.
    #[arg(long, default_value_t = 0.15)]
    pub loop_delay_ns: f64,
    /// Coupled-section (through path) delay in ns; default 1/(2 f0).
    #[arg(long)]
    pub coupled_delay_ns: Option<f64>,
    /// Number of identical units in cascade.
    #[arg(long, default_value_t = 1)]
    pub units: usize,
    /// Evaluation band in GHz.
    #[arg(long, default_value_t = 8.0)]
    pub band_lo_ghz: f64,
    #[arg(long, default_value_t = 12.0)]
    pub band_hi_ghz: f64,
    /// Minimum number of grid points across the band.
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    #[arg(long, default_value = "out")]
    pub out_dir: std::path::PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct CharacterizeArgs {
    /// Comma-separated coupling values; default covers the trade-off curve
    /// including the design points 0.71 and 0.87.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.71,0.8,0.87,0.9"
    )]
    pub couplings: Vec<f64>,
    /// Slope-departure factor for the transition bandwidth.
    #[arg(long, default_value_t = 0.35)]
    pub alpha: f64,
    #[arg(long, default_value_t = 10.0)]
    pub center_freq_ghz: f64,
    #[arg(long, default_value_t = 0.15)]
    pub loop_delay_ns: f64,
    #[arg(long)]
    pub coupled_delay_ns: Option<f64>,
    #[arg(long, default_value = "out")]
    pub out_dir: std::path::PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct TransientArgs {
    #[arg(long, default_value_t = 0.5)]
    pub coupling: f64,
    #[arg(long, default_value_t = 10.0)]
    pub center_freq_ghz: f64,
    #[arg(long, default_value_t = 0.15)]
    pub loop_delay_ns: f64,
    #[arg(long)]
    pub coupled_delay_ns: Option<f64>,
    /// Drive frequency in GHz; default is the center frequency.
    #[arg(long)]
    pub drive_ghz: Option<f64>,
    /// Run length in ns; default covers 8x the steady-state group delay.
    #[arg(long)]
    pub duration_ns: Option<f64>,
    /// Samples per carrier cycle (sets the time step).
    #[arg(long, default_value_t = 64)]
    pub samples_per_cycle: u32,
    #[arg(long, default_value = "out")]
    pub out_dir: std::path::PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct HilbertArgs {
    /// Test pulse shape.
    #[arg(long, value_enum, default_value_t = PulseArg::Rect)]
    pub pulse: PulseArg,
    /// Evaluation range and sampling.
    #[arg(long, default_value_t = -3.0, allow_negative_numbers = true)]
    pub t_min: f64,
    #[arg(long, default_value_t = 3.0, allow_negative_numbers = true)]
    pub t_max: f64,
    #[arg(long, default_value_t = 601)]
    pub points: usize,
    /// Initial principal-value window width.
    #[arg(long, default_value_t = 0.05)]
    pub epsilon: f64,
    #[arg(long, default_value = "out")]
    pub out_dir: std::path::PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseArg {
    Rect,
    Tri,
}

#[derive(Debug, Args, Serialize)]
pub struct DemoArgs {
    /// Which application to run.
    #[arg(long, value_enum)]
    pub app: AppArg,
    /// Device driving the Hilbert branch: "ideal", "model", or
    /// "touchstone:<path>".
    #[arg(long, default_value = "model")]
    pub source: String,
    /// Carrier frequency in GHz. Defaults to the device center frequency,
    /// or to 0 (baseband) for the ideal source on edge/peak demos.
    #[arg(long)]
    pub carrier_ghz: Option<f64>,
    #[arg(long, default_value_t = 10.0)]
    pub center_freq_ghz: f64,
    /// Stimulus shape for edge/peak demos.
    #[arg(long, default_value_t = 2.0)]
    pub pulse_width_ns: f64,
    #[arg(long, default_value_t = 6.0)]
    pub period_ns: f64,
    #[arg(long, default_value_t = 4)]
    pub periods: usize,
    /// Sample rate as a multiple of the carrier (or of the center frequency
    /// for baseband runs).
    #[arg(long, default_value_t = 32)]
    pub oversampling: u32,
    /// Model-source parameters: per-unit coupling and number of units.
    #[arg(long, default_value_t = 0.71)]
    pub coupling: f64,
    #[arg(long, default_value_t = 2)]
    pub units: usize,
    /// SSB demo: tone offset from the carrier, in GHz.
    #[arg(long, default_value_t = 0.5)]
    pub tone_offset_ghz: f64,
    /// SSB demo: nominal delay-branch length in ns; default is half a beat
    /// period of the two tones, 1/(2 * tone spacing).
    #[arg(long)]
    pub delay_ns: Option<f64>,
    /// SSB demo: which sideband to keep.
    #[arg(long, value_enum, default_value_t = SidebandArg::Upper)]
    pub sideband: SidebandArg,
    #[arg(long, default_value = "out")]
    pub out_dir: std::path::PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum AppArg {
    Edge,
    Peak,
    Ssb,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SidebandArg {
    Upper,
    Lower,
}

#[derive(Debug, Args, Serialize)]
pub struct TouchstoneArgs {
    /// Input .s2p path.
    #[arg(long)]
    pub input: std::path::PathBuf,
    /// Center frequency for the figures of merit, in GHz.
    #[arg(long, default_value_t = 10.0)]
    pub center_freq_ghz: f64,
    #[arg(long, default_value_t = 0.35)]
    pub alpha: f64,
    /// Resampling grid size.
    #[arg(long, default_value_t = 2001)]
    pub points: usize,
    #[arg(long, default_value = "out")]
    pub out_dir: std::path::PathBuf,
}
