//! Discrete-time transient simulation of the coupler-resonator flow graph.
//!
//! The flow graph is realized as a recurrence with integer-sample delay
//! lines. Crossing the coupled section contributes coefficient `-j |C|` and
//! one section delay; staying on the through path (or staying in the ring
//! past the coupled section) contributes `|T|` and the same delay; the
//! uncoupled part of the ring is a pure delay. Writing `g[n]` for the wave
//! just past the ring side of the coupled section:
//!
//! ```text
//! g[n] = -j c * u[n - da]  +  t * g[n - da - dl]
//! y[n] =    t * u[n - da]  + (-j c) * g[n - da - dl]
//! ```
//!
//! whose transfer function is exactly the steady-state composition
//! `T + C^2 D / (1 - T D)` at every frequency the sample grid represents.
//!
//! The drive is a complex phasor `exp(j 2 pi f t)` switched on at t = 0, so
//! the coupler's broadband -90 degree coupling phase is exact and the output
//! envelope is just the sample magnitude.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::model::CouplerResonatorParams;
use crate::time::TimeSignal;
use crate::{Error, Result};

/// Default simulation time step: 64 samples per carrier cycle.
pub fn default_dt_s(params: &CouplerResonatorParams) -> f64 {
    1.0 / (64.0 * params.center_freq_hz)
}

/// Simulate the output-port waveform for a phasor drive at `drive_freq_hz`
/// switched on at t = 0.
///
/// `dt_s` must divide both the coupled-section delay and the uncoupled loop
/// delay to within 0.1% so the delay lines are integer sample shifts, and
/// `duration_s` should cover several times the steady-state group delay for
/// the output to settle.
pub fn transient_simulate(
    params: &CouplerResonatorParams,
    drive_freq_hz: f64,
    duration_s: f64,
    dt_s: f64,
) -> Result<TimeSignal> {
    if !(drive_freq_hz > 0.0) || !(duration_s > 0.0) || !(dt_s > 0.0) {
        return Err(Error::Config(format!(
            "drive {drive_freq_hz} Hz, duration {duration_s} s and dt {dt_s} s must all be > 0"
        )));
    }
    let da = delay_steps(params.coupled_section_delay_s, dt_s, "coupled-section delay")?;
    let dl = delay_steps(params.loop_delay_s, dt_s, "loop delay")?;
    let n = (duration_s / dt_s).round() as usize;
    if n < 2 {
        return Err(Error::Config("duration shorter than two samples".into()));
    }

    let c = params.coupling_mag;
    let t = params.through_mag();
    let couple = Complex64::new(0.0, -c);
    let loop_len = da + dl;

    // Ring state g and output y, indexed by sample; the drive is evaluated
    // on the fly. Everything before t = 0 is zero.
    let mut ring = vec![Complex64::new(0.0, 0.0); n];
    let mut out = Vec::with_capacity(n);
    let drive = |k: isize| -> Complex64 {
        if k < 0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::from_polar(1.0, TAU * drive_freq_hz * (k as f64) * dt_s)
        }
    };

    for k in 0..n {
        let ki = k as isize;
        let u_delayed = drive(ki - da as isize);
        let g_fed_back = if k >= loop_len { ring[k - loop_len] } else { Complex64::new(0.0, 0.0) };
        ring[k] = couple * u_delayed + t * g_fed_back;
        out.push(t * u_delayed + couple * g_fed_back);
    }

    TimeSignal::new(0.0, 1.0 / dt_s, out)
}

fn delay_steps(delay_s: f64, dt_s: f64, what: &str) -> Result<usize> {
    if delay_s == 0.0 {
        return Ok(0);
    }
    let steps = delay_s / dt_s;
    let rounded = steps.round();
    if rounded < 1.0 || (steps - rounded).abs() > 1e-3 * steps {
        return Err(Error::Config(format!(
            "{what} of {delay_s} s is not an integer number of {dt_s} s samples (got {steps})"
        )));
    }
    Ok(rounded as usize)
}

/// Steady-state amplitude, phase and settle time extracted from a transient
/// run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SteadyState {
    /// Mean output magnitude over the analysis tail.
    pub amplitude: f64,
    /// Output phase relative to the drive phasor, radians in (-pi, pi].
    pub phase_rad: f64,
    /// First time the output envelope reaches 90% of the steady amplitude
    /// and stays there, in seconds.
    pub settle_time_s: f64,
}

/// Analyze a transient waveform produced by [`transient_simulate`].
///
/// The steady amplitude and phase come from the last `tail_fraction` of the
/// run (phase by correlating against the drive phasor); the settle time is
/// the earliest instant after which the envelope never drops below 90% of
/// the steady amplitude.
pub fn steady_state(signal: &TimeSignal, drive_freq_hz: f64, tail_fraction: f64) -> Result<SteadyState> {
    if !(0.0 < tail_fraction && tail_fraction < 1.0) {
        return Err(Error::invalid("tail fraction must be in (0, 1)"));
    }
    let n = signal.len();
    let tail_start = ((1.0 - tail_fraction) * n as f64) as usize;
    if n - tail_start < 8 {
        return Err(Error::invalid("tail too short for steady-state analysis"));
    }

    let samples = signal.samples();
    let amplitude =
        samples[tail_start..].iter().map(|s| s.norm()).sum::<f64>() / (n - tail_start) as f64;

    let mut corr = Complex64::new(0.0, 0.0);
    for (k, s) in samples.iter().enumerate().skip(tail_start) {
        let drive = Complex64::from_polar(1.0, TAU * drive_freq_hz * signal.time_at(k));
        corr += s * drive.conj();
    }
    let phase_rad = corr.arg();

    let threshold = 0.9 * amplitude;
    let mut settle_idx = 0;
    for k in (0..n).rev() {
        if samples[k].norm() < threshold {
            settle_idx = k + 1;
            break;
        }
    }
    Ok(SteadyState {
        amplitude,
        phase_rad,
        settle_time_s: signal.time_at(settle_idx.min(n - 1)) - signal.start_s(),
    })
}
