//! Command implementations.

use std::fs;
use std::path::Path;

use serde_json::json;

use mw_hilbert::apps::{
    self, generate_pulse_train, DeviceSource, ModulatedPulseTrain, PulseKind, Sideband, SsbSpec,
};
use mw_hilbert::characterize::{self, rotated_phase, transition_bandwidth};
use mw_hilbert::hilbert::{
    hilbert_pv_many, rect_hilbert_closed_form, tri_hilbert_closed_form, AnalyticPulse,
};
use mw_hilbert::model::{
    cascade_transfer, peak_delay_and_bandwidth, refined_cascade_phase, CascadeSpec,
    CouplerResonatorParams,
};
use mw_hilbert::phase::{group_delay, unwrap_phase};
use mw_hilbert::time::TimeSignal;
use mw_hilbert::touchstone::{parse_touchstone, to_response};
use mw_hilbert::{ComplexResponse, Error, FrequencyGrid};

use crate::args::*;
use crate::write::{write_atomic, Csv};

/// Failure classes mapped onto process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Exit 2: the request itself is invalid.
    Validation(String),
    /// Exit 3: the computation could not produce the requested result.
    Numerical(String),
    /// Exit 4: filesystem trouble.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 4,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Validation(m) | CliError::Numerical(m) | CliError::Io(m) => m,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidInput(_) | Error::Config(_) | Error::Parse { .. } | Error::OutOfRange(_) => {
                CliError::Validation(e.to_string())
            }
            Error::SingularSample { .. }
            | Error::UnwrapAmbiguous { .. }
            | Error::ModelSingularity { .. }
            | Error::NotFound(_)
            | Error::NoConvergence { .. } => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn validated(issues: Vec<String>) -> Result<(), CliError> {
    if issues.is_empty() {
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "invalid configuration:\n  - {}",
            issues.join("\n  - ")
        )))
    }
}

fn unit_params(
    coupling: f64,
    center_freq_ghz: f64,
    loop_delay_ns: f64,
    coupled_delay_ns: Option<f64>,
) -> Result<CouplerResonatorParams, CliError> {
    let f0 = center_freq_ghz * 1e9;
    let coupled = coupled_delay_ns.map(|ns| ns * 1e-9).unwrap_or(0.5 / f0);
    Ok(CouplerResonatorParams::new(coupling, f0, loop_delay_ns * 1e-9, coupled)?)
}

const RAD_TO_DEG: f64 = 180.0 / std::f64::consts::PI;

pub fn run_model(args: &ModelArgs) -> Result<(), CliError> {
    let mut issues = Vec::new();
    if !(0.0..=1.0).contains(&args.coupling) {
        issues.push(format!("coupling must be in [0, 1], got {}", args.coupling));
    }
    if args.center_freq_ghz <= 0.0 {
        issues.push("center frequency must be > 0".into());
    }
    if args.units == 0 {
        issues.push("need at least one unit".into());
    }
    if args.points < 3 {
        issues.push("need at least 3 grid points".into());
    }
    if !(args.band_lo_ghz < args.center_freq_ghz && args.center_freq_ghz < args.band_hi_ghz) {
        issues.push(format!(
            "band [{}, {}] GHz must straddle the center frequency {} GHz",
            args.band_lo_ghz, args.band_hi_ghz, args.center_freq_ghz
        ));
    }
    validated(issues)?;

    let unit = unit_params(args.coupling, args.center_freq_ghz, args.loop_delay_ns, args.coupled_delay_ns)?;
    let spec = CascadeSpec::identical(unit, args.units)?;
    let (curve, response) =
        refined_cascade_phase(&spec, args.band_lo_ghz * 1e9, args.band_hi_ghz * 1e9, args.points)?;
    let delays = group_delay(&curve)?;
    let grid = curve.grid();

    let mut mag = Csv::new("frequency_ghz,magnitude,magnitude_db");
    for (k, v) in response.values().iter().enumerate() {
        mag.row(&[grid.value(k) / 1e9, v.norm(), 20.0 * v.norm().log10()]);
    }
    let mut phase = Csv::new("frequency_ghz,phase_deg");
    for (k, p) in curve.phase_rad().iter().enumerate() {
        phase.row(&[grid.value(k) / 1e9, p * RAD_TO_DEG]);
    }
    let mut gd = Csv::new("frequency_ghz,group_delay_ns");
    for (k, d) in delays.iter().enumerate() {
        gd.row(&[grid.value(k) / 1e9, d * 1e9]);
    }
    write_atomic(&args.out_dir, "magnitude.csv", &mag.finish())?;
    write_atomic(&args.out_dir, "phase.csv", &phase.finish())?;
    write_atomic(&args.out_dir, "group_delay.csv", &gd.finish())?;
    println!("wrote magnitude.csv, phase.csv, group_delay.csv to {}", args.out_dir.display());
    Ok(())
}

pub fn run_characterize(args: &CharacterizeArgs) -> Result<(), CliError> {
    let mut issues = Vec::new();
    if args.couplings.is_empty() {
        issues.push("coupling list is empty".into());
    }
    for &c in &args.couplings {
        if !(c > 0.0 && c < 1.0) {
            issues.push(format!("sweep couplings must lie in (0, 1), got {c}"));
        }
    }
    if args.alpha <= 0.0 {
        issues.push("alpha must be > 0".into());
    }
    validated(issues)?;

    let base = unit_params(0.5, args.center_freq_ghz, args.loop_delay_ns, args.coupled_delay_ns)?;
    let reports = characterize::coupling_sweep(&args.couplings, &base, args.alpha)?;

    let mut csv = Csv::new(
        "coupling,rotated_phase_deg,transition_bw_ghz,transition_bw_fraction,f_lower_ghz,f_upper_ghz,peak_delay_ns,half_delay_bw_ghz",
    );
    for r in &reports {
        csv.row(&[
            r.coupling_mag.unwrap_or(f64::NAN),
            r.rotated_phase_rad * RAD_TO_DEG,
            r.transition_bandwidth_hz / 1e9,
            r.transition_bandwidth_hz / (args.center_freq_ghz * 1e9),
            r.omega_l_hz / 1e9,
            r.omega_r_hz / 1e9,
            r.peak_delay_s * 1e9,
            r.half_delay_bandwidth_hz / 1e9,
        ]);
    }
    write_atomic(&args.out_dir, "tradeoff.csv", &csv.finish())?;
    let meta = json!({ "config": args, "reports": reports });
    write_atomic(&args.out_dir, "tradeoff.json", &serde_json::to_string_pretty(&meta).unwrap())?;
    println!("wrote tradeoff.csv, tradeoff.json to {}", args.out_dir.display());
    Ok(())
}

pub fn run_transient(args: &TransientArgs) -> Result<(), CliError> {
    let mut issues = Vec::new();
    if !(0.0..=1.0).contains(&args.coupling) {
        issues.push(format!("coupling must be in [0, 1], got {}", args.coupling));
    }
    if args.samples_per_cycle < 8 {
        issues.push("need at least 8 samples per carrier cycle".into());
    }
    validated(issues)?;

    let unit = unit_params(args.coupling, args.center_freq_ghz, args.loop_delay_ns, args.coupled_delay_ns)?;
    let f0 = unit.center_freq_hz;
    let drive = args.drive_ghz.map(|g| g * 1e9).unwrap_or(f0);
    let dt = 1.0 / (args.samples_per_cycle as f64 * f0);
    let peak = peak_delay_and_bandwidth(&unit)?;
    let duration = args
        .duration_ns
        .map(|ns| ns * 1e-9)
        .unwrap_or((8.0 * peak.peak_delay_s).max(200.0 / f0));

    let waveform = mw_hilbert::transient::transient_simulate(&unit, drive, duration, dt)?;
    let steady = mw_hilbert::transient::steady_state(&waveform, drive, 0.1)?;
    let s21 = unit.response_at(drive)?;

    let mut csv = Csv::new("time_ns,re,im,envelope");
    for (k, s) in waveform.samples().iter().enumerate() {
        csv.row(&[waveform.time_at(k) * 1e9, s.re, s.im, s.norm()]);
    }
    write_atomic(&args.out_dir, "waveform.csv", &csv.finish())?;

    let phase_err = {
        let d = (steady.phase_rad - s21.arg()).rem_euclid(std::f64::consts::TAU);
        d.min(std::f64::consts::TAU - d)
    };
    let metrics = json!({
        "config": args,
        "steady_amplitude": steady.amplitude,
        "steady_phase_deg": steady.phase_rad * RAD_TO_DEG,
        "settle_time_ns": steady.settle_time_s * 1e9,
        "analytic_s21_mag": s21.norm(),
        "analytic_s21_phase_deg": s21.arg() * RAD_TO_DEG,
        "amplitude_error": (steady.amplitude - s21.norm()).abs(),
        "phase_error_deg": phase_err * RAD_TO_DEG,
        "group_delay_ns": peak.peak_delay_s * 1e9,
    });
    write_atomic(&args.out_dir, "metrics.json", &serde_json::to_string_pretty(&metrics).unwrap())?;
    println!("wrote waveform.csv, metrics.json to {}", args.out_dir.display());
    Ok(())
}

pub fn run_hilbert(args: &HilbertArgs) -> Result<(), CliError> {
    let mut issues = Vec::new();
    if args.points < 2 {
        issues.push("need at least 2 points".into());
    }
    if !(args.t_min < args.t_max) {
        issues.push("t range must be increasing".into());
    }
    if args.epsilon <= 0.0 {
        issues.push("epsilon must be > 0".into());
    }
    validated(issues)?;

    let pulse = match args.pulse {
        PulseArg::Rect => AnalyticPulse::Rect,
        PulseArg::Tri => AnalyticPulse::Tri,
    };
    let ts: Vec<f64> = (0..args.points)
        .map(|k| args.t_min + (args.t_max - args.t_min) * k as f64 / (args.points - 1) as f64)
        .collect();
    let closed: Vec<f64> = ts
        .iter()
        .map(|&t| match pulse {
            AnalyticPulse::Rect => rect_hilbert_closed_form(t),
            AnalyticPulse::Tri => tri_hilbert_closed_form(t),
        })
        .collect();
    // Quadrature diverges at the closed-form poles; those points are
    // reported as NaN rather than aborting the sweep.
    let pv: Vec<f64> = match hilbert_pv_many(&pulse, &ts, args.epsilon) {
        Ok(v) => v,
        Err(_) => ts
            .iter()
            .map(|&t| mw_hilbert::hilbert::hilbert_pv_quadrature(&pulse, t, args.epsilon).unwrap_or(f64::NAN))
            .collect(),
    };

    let mut csv = Csv::new("t,closed_form,pv_quadrature,abs_error");
    let mut worst: f64 = 0.0;
    for ((&t, &cf), &q) in ts.iter().zip(&closed).zip(&pv) {
        let err = (cf - q).abs();
        if err.is_finite() {
            worst = worst.max(err);
        }
        csv.row(&[t, cf, q, err]);
    }
    write_atomic(&args.out_dir, "hilbert.csv", &csv.finish())?;
    let metrics = json!({
        "config": args,
        "max_abs_disagreement": worst,
        "unevaluated_points": pv.iter().filter(|v| v.is_nan()).count(),
    });
    write_atomic(&args.out_dir, "metrics.json", &serde_json::to_string_pretty(&metrics).unwrap())?;
    println!("wrote hilbert.csv, metrics.json to {}", args.out_dir.display());
    Ok(())
}

enum ResolvedSource {
    Ideal,
    Response(ComplexResponse),
}

fn resolve_source(args: &DemoArgs) -> Result<ResolvedSource, CliError> {
    let f0 = args.center_freq_ghz * 1e9;
    if args.source == "ideal" {
        return Ok(ResolvedSource::Ideal);
    }
    if args.source == "model" {
        let unit = CouplerResonatorParams::with_defaults(args.coupling, f0)?;
        let spec = CascadeSpec::identical(unit, args.units)?;
        let grid = FrequencyGrid::spanning_snapped(0.75 * f0, 1.25 * f0, 4001, f0)?;
        return Ok(ResolvedSource::Response(cascade_transfer(&spec, &grid)?));
    }
    if let Some(path) = args.source.strip_prefix("touchstone:") {
        let text = fs::read_to_string(path)?;
        let record = parse_touchstone(&text)?;
        let (lo, hi) = record.span_hz();
        let band_lo = lo.max(0.75 * f0);
        let band_hi = hi.min(1.25 * f0);
        if !(band_lo < band_hi) {
            return Err(CliError::Validation(format!(
                "touchstone span [{lo}, {hi}] Hz does not overlap the band around {f0} Hz"
            )));
        }
        return Ok(ResolvedSource::Response(to_response(&record, band_lo, band_hi, 2001)?));
    }
    Err(CliError::Validation(format!(
        "unknown source {:?}; expected \"ideal\", \"model\" or \"touchstone:<path>\"",
        args.source
    )))
}

fn write_waveform(dir: &Path, name: &str, signal: &TimeSignal) -> Result<(), CliError> {
    let mut csv = Csv::new("time_ns,re,im,envelope");
    for (k, s) in signal.samples().iter().enumerate() {
        csv.row(&[signal.time_at(k) * 1e9, s.re, s.im, s.norm()]);
    }
    write_atomic(dir, name, &csv.finish())?;
    Ok(())
}

pub fn run_demo(args: &DemoArgs) -> Result<(), CliError> {
    let mut issues = Vec::new();
    if args.periods == 0 {
        issues.push("need at least one pulse period".into());
    }
    if args.center_freq_ghz <= 0.0 {
        issues.push("center frequency must be > 0".into());
    }
    if args.oversampling < 8 {
        issues.push("oversampling must be at least 8x".into());
    }
    if !(0.0..=1.0).contains(&args.coupling) {
        issues.push(format!("coupling must be in [0, 1], got {}", args.coupling));
    }
    validated(issues)?;

    let f0 = args.center_freq_ghz * 1e9;
    let source = resolve_source(args)?;
    match args.app {
        AppArg::Edge | AppArg::Peak => {
            // Ideal-source runs default to the baseband pulse where the
            // closed-form pole/zero behavior lives; device runs modulate at
            // the device center.
            let carrier = args
                .carrier_ghz
                .map(|g| g * 1e9)
                .unwrap_or(if matches!(source, ResolvedSource::Ideal) { 0.0 } else { f0 });
            let train = ModulatedPulseTrain {
                pulse_kind: if args.app == AppArg::Edge { PulseKind::Rect } else { PulseKind::Tri },
                carrier_hz: carrier,
                pulse_width_s: args.pulse_width_ns * 1e-9,
                period_s: args.period_ns * 1e-9,
                num_periods: args.periods,
                sample_rate_hz: args.oversampling as f64 * f0,
            };
            let input = generate_pulse_train(&train)?;
            let run = match &source {
                ResolvedSource::Ideal => apps::run_device(&input, &DeviceSource::Ideal)?,
                ResolvedSource::Response(r) => apps::run_device(&input, &DeviceSource::Response(r))?,
            };
            write_waveform(&args.out_dir, "input.csv", &run.input)?;
            write_waveform(&args.out_dir, "output.csv", &run.output)?;
            let metrics = if args.app == AppArg::Edge {
                let report = apps::edge_detection_metric(&run.input, &run.output, &train, run.bulk_delay_s)?;
                json!({
                    "config": args,
                    "app": "edge",
                    "report": report,
                    "bulk_delay_ns": run.bulk_delay_s * 1e9,
                    "zeroed_energy_fraction": run.zeroed_energy_fraction,
                })
            } else {
                let report = apps::peak_clipping_metric(&run.input, &run.output, &train, run.bulk_delay_s)?;
                json!({
                    "config": args,
                    "app": "peak",
                    "report": report,
                    "bulk_delay_ns": run.bulk_delay_s * 1e9,
                    "zeroed_energy_fraction": run.zeroed_energy_fraction,
                })
            };
            write_atomic(&args.out_dir, "metrics.json", &serde_json::to_string_pretty(&metrics).unwrap())?;
        }
        AppArg::Ssb => {
            let carrier = args.carrier_ghz.map(|g| g * 1e9).unwrap_or(f0);
            if carrier <= 0.0 {
                return Err(CliError::Validation("SSB needs a positive carrier".into()));
            }
            let delta = args.tone_offset_ghz * 1e9;
            if !(delta > 0.0 && delta < carrier) {
                return Err(CliError::Validation(format!(
                    "tone offset {} GHz must be in (0, carrier)",
                    args.tone_offset_ghz
                )));
            }
            let fs = args.oversampling as f64 * carrier;
            let duration = 2.0 / delta;
            let n = (duration * fs).round() as usize;
            let samples: Vec<f64> = (0..n)
                .map(|k| {
                    let t = k as f64 / fs;
                    (std::f64::consts::TAU * (carrier - delta) * t).cos()
                        + (std::f64::consts::TAU * (carrier + delta) * t).cos()
                })
                .collect();
            let input = TimeSignal::from_real(0.0, fs, samples)?;
            let spec = SsbSpec {
                delay_branch_s: args.delay_ns.map(|ns| ns * 1e-9).unwrap_or(1.0 / (4.0 * delta)),
                sideband: match args.sideband {
                    SidebandArg::Upper => Sideband::Upper,
                    SidebandArg::Lower => Sideband::Lower,
                },
            };
            let (output, report) = match &source {
                ResolvedSource::Ideal => apps::ssb_modulate(&input, &DeviceSource::Ideal, &spec, carrier)?,
                ResolvedSource::Response(r) => {
                    apps::ssb_modulate(&input, &DeviceSource::Response(r), &spec, carrier)?
                }
            };
            write_waveform(&args.out_dir, "input.csv", &input)?;
            write_waveform(&args.out_dir, "output.csv", &output)?;
            let (lower, upper) = apps::sideband_powers(&output, carrier);
            let metrics = json!({
                "config": args,
                "app": "ssb",
                "report": report,
                "lower_sideband_power": lower,
                "upper_sideband_power": upper,
            });
            write_atomic(&args.out_dir, "metrics.json", &serde_json::to_string_pretty(&metrics).unwrap())?;
        }
    }
    println!("wrote input.csv, output.csv, metrics.json to {}", args.out_dir.display());
    Ok(())
}

pub fn run_touchstone(args: &TouchstoneArgs) -> Result<(), CliError> {
    let mut issues = Vec::new();
    if args.points < 3 {
        issues.push("need at least 3 resampling points".into());
    }
    if args.center_freq_ghz <= 0.0 {
        issues.push("center frequency must be > 0".into());
    }
    validated(issues)?;

    let text = fs::read_to_string(&args.input)?;
    let record = parse_touchstone(&text)?;
    let (lo, hi) = record.span_hz();
    let response = to_response(&record, lo, hi, args.points)?;

    let mut csv = Csv::new("frequency_ghz,s21_re,s21_im,s21_mag_db,s21_phase_deg");
    for (k, v) in response.values().iter().enumerate() {
        csv.row(&[
            response.grid().value(k) / 1e9,
            v.re,
            v.im,
            20.0 * v.norm().log10(),
            v.arg() * RAD_TO_DEG,
        ]);
    }
    write_atomic(&args.out_dir, "s21.csv", &csv.finish())?;

    // Figures of merit when the record covers the characterization band,
    // on a grid whose step divides f0 so the 80%/100%/120% points land on
    // samples.
    let f0 = args.center_freq_ghz * 1e9;
    let figures = {
        let step = f0 / 5000.0;
        let start = (lo / step).ceil() * step;
        let count = ((hi - start) / step).floor() as usize + 1;
        FrequencyGrid::new(start, step, count.max(2))
            .ok()
            .and_then(|grid| to_response(&record, grid.start_hz(), grid.stop_hz(), grid.count()).ok())
            .and_then(|resp| unwrap_phase(&resp).ok())
            .and_then(|curve| {
                let rot = rotated_phase(&curve, f0).ok()?;
                let tb = transition_bandwidth(&curve, f0, args.alpha).ok();
                Some(json!({
                    "rotated_phase_deg": rot * RAD_TO_DEG,
                    "transition_bandwidth_ghz": tb.map(|(df, _, _)| df / 1e9),
                    "band_edges_ghz": tb.map(|(_, l, r)| [l / 1e9, r / 1e9]),
                }))
            })
    };
    let metrics = json!({
        "config": args,
        "freq_unit": record.freq_unit,
        "format": record.format,
        "reference_ohms": record.reference_ohms,
        "rows": record.rows.len(),
        "span_ghz": [lo / 1e9, hi / 1e9],
        "warnings": record.warnings,
        "figures_of_merit": figures,
    });
    write_atomic(&args.out_dir, "metrics.json", &serde_json::to_string_pretty(&metrics).unwrap())?;
    println!("wrote s21.csv, metrics.json to {}", args.out_dir.display());
    Ok(())
}
