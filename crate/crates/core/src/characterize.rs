//! Figures of merit of a modeled or measured response: rotated phase,
//! transition bandwidth, and the coupling trade-off sweep.
//!
//! The rotated phase is the vertical gap between the tangents to the phase
//! curve at 80% and 120% of the center frequency,
//!
//! ```text
//! dphi = phi(0.8 w0) - phi(1.2 w0) + 0.4 w0 * (dphi/dw at 0.8 w0)
//! ```
//!
//! which subtracts any affine (nondispersive-delay) trend and leaves the net
//! rotation the resonance adds. The transition bandwidth is the symmetric
//! band `[w_L, w_R]` around the center where the phase slope departs from
//! the 80%/120% reference slopes by more than a factor `alpha`.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::freq::{FrequencyGrid, PhaseCurve};
use crate::model::{self, CouplerResonatorParams};
use crate::par;
use crate::phase::{group_delay, unwrap_phase};
use crate::{Error, Result};

/// Default slope-departure factor for the transition bandwidth.
pub const DEFAULT_ALPHA: f64 = 0.35;

/// Figures of merit for one device (one coupling value when modeled).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    /// Coupling magnitude the report was computed for; absent for measured
    /// responses where the coupling is not a known parameter.
    pub coupling_mag: Option<f64>,
    /// Rotated phase in radians (positive magnitude of the phase fall).
    pub rotated_phase_rad: f64,
    /// Slope-departure factor used for the transition band.
    pub alpha: f64,
    /// Transition bandwidth in Hz.
    pub transition_bandwidth_hz: f64,
    /// Lower and upper transition band edges in Hz.
    pub omega_l_hz: f64,
    pub omega_r_hz: f64,
    /// Group delay at the resonance, seconds.
    pub peak_delay_s: f64,
    /// Width of the delay-above-half-peak band, Hz.
    pub half_delay_bandwidth_hz: f64,
}

/// Rotated phase of an unwrapped curve around `center_hz`, in radians.
///
/// The grid must cover `[0.8, 1.2] * center_hz` with at least 100 samples in
/// that span and with both band edges landing on grid samples. The
/// derivative at the 80% point is the same central-difference operator used
/// for group delay, so modeled and measured curves go through one code path.
pub fn rotated_phase(phase: &PhaseCurve, center_hz: f64) -> Result<f64> {
    let (i_lo, _, i_hi) = band_indices(phase.grid(), center_hz)?;
    let tau = group_delay(phase)?;
    let p = phase.phase_rad();
    let slope_lo = -tau[i_lo];
    Ok(p[i_lo] - p[i_hi] + 0.4 * TAU * center_hz * slope_lo)
}

/// Transition bandwidth `(df_hz, f_l_hz, f_r_hz)` for slope-departure factor
/// `alpha`.
///
/// Scans outward-in: from the 80% point up toward the center for the first
/// crossing of the departure through `alpha` (that's `f_l`), and from the
/// 120% point down for `f_r`. Crossings are localized by linear
/// interpolation between the bracketing samples.
pub fn transition_bandwidth(phase: &PhaseCurve, center_hz: f64, alpha: f64) -> Result<(f64, f64, f64)> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::invalid(format!("alpha must be > 0, got {alpha}")));
    }
    let grid = phase.grid();
    let (i_lo, i_center, i_hi) = band_indices(grid, center_hz)?;
    let tau = group_delay(phase)?;

    let f_l = scan_departure(grid, &tau, i_lo, i_center, alpha)?;
    let f_r = scan_departure(grid, &tau, i_hi, i_center, alpha)?;
    let df = f_r - f_l;
    if df <= 0.0 {
        return Err(Error::NotFound(format!(
            "transition edges inverted: f_l {f_l} Hz, f_r {f_r} Hz"
        )));
    }
    // Eq-style symmetric width: both half-widths must agree to a grid step.
    let asym = ((center_hz - f_l) - (f_r - center_hz)).abs();
    if asym > grid.step_hz() {
        return Err(Error::NotFound(format!(
            "transition band asymmetric about the center by {asym} Hz (> one grid step)"
        )));
    }
    Ok((df, f_l, f_r))
}

/// Walk from `from` toward `toward` until the relative slope departure from
/// the reference slope at `from` first reaches `alpha`.
fn scan_departure(
    grid: &FrequencyGrid,
    tau: &[f64],
    from: usize,
    toward: usize,
    alpha: f64,
) -> Result<f64> {
    let tau_ref = tau[from];
    if tau_ref == 0.0 {
        return Err(Error::invalid("reference slope at the 80%/120% point is zero"));
    }
    let departure = |k: usize| (tau[k] - tau_ref) / tau_ref;
    let step: isize = if toward >= from { 1 } else { -1 };
    let mut k = from as isize;
    let mut prev = departure(from);
    while k != toward as isize {
        let next = k + step;
        let d = departure(next as usize);
        if d >= alpha {
            // Linear interpolation inside the bracketing interval.
            let f_prev = grid.value(k as usize);
            let f_next = grid.value(next as usize);
            let t = if (d - prev).abs() > 0.0 { (alpha - prev) / (d - prev) } else { 1.0 };
            return Ok(f_prev + (f_next - f_prev) * t);
        }
        prev = d;
        k = next;
    }
    Err(Error::NotFound(format!(
        "slope departure never reaches alpha = {alpha} between {} and {} Hz",
        grid.value(from),
        grid.value(toward)
    )))
}

/// Locate the 80%, 100% and 120% samples and check coverage.
fn band_indices(grid: &FrequencyGrid, center_hz: f64) -> Result<(usize, usize, usize)> {
    if !(center_hz > 0.0) {
        return Err(Error::invalid(format!("center frequency must be > 0, got {center_hz}")));
    }
    let lo = 0.8 * center_hz;
    let hi = 1.2 * center_hz;
    if !grid.contains(lo) || !grid.contains(hi) {
        return Err(Error::OutOfRange(format!(
            "phase grid [{}, {}] Hz does not cover [0.8, 1.2] * {center_hz} Hz",
            grid.start_hz(),
            grid.stop_hz()
        )));
    }
    let i_lo = grid.exact_index(lo, 1e-3)?;
    let i_center = grid.exact_index(center_hz, 1e-3)?;
    let i_hi = grid.exact_index(hi, 1e-3)?;
    if i_hi - i_lo + 1 < 100 {
        return Err(Error::invalid(format!(
            "need at least 100 samples across [0.8, 1.2] * center, got {}",
            i_hi - i_lo + 1
        )));
    }
    Ok((i_lo, i_center, i_hi))
}

/// Phase of the unit model on a characterization grid: span
/// `[0.75, 1.25] * f0` with the 80%/100%/120% points landing on samples,
/// density-doubled until the unwrap is trustworthy.
pub fn characterization_phase(params: &CouplerResonatorParams) -> Result<PhaseCurve> {
    let f0 = params.center_freq_hz;
    // Steps per f0 chosen so 0.75, 0.8, 1.0, 1.2, 1.25 * f0 are all samples.
    let mut per_f0: usize = 5000;
    let mut previous_span: Option<f64> = None;
    const MAX_PER_F0: usize = 1 << 24;

    loop {
        let step = f0 / per_f0 as f64;
        let count = per_f0 / 2 + 1; // spans 0.5 * f0
        let grid = FrequencyGrid::new(0.75 * f0, step, count)?;
        let response = model::unit_transfer(params, &grid)?;
        match unwrap_phase(&response) {
            Ok(curve) => {
                let p = curve.phase_rad();
                let span = p[p.len() - 1] - p[0];
                let max_step = p.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
                let stable = previous_span.map(|s| (s - span).abs() < 1e-6).unwrap_or(false);
                if stable && max_step < 0.9 * std::f64::consts::PI {
                    return Ok(curve);
                }
                previous_span = Some(span);
            }
            Err(Error::UnwrapAmbiguous { .. }) => previous_span = None,
            Err(e) => return Err(e),
        }
        per_f0 = per_f0
            .checked_mul(2)
            .filter(|&p| p <= MAX_PER_F0)
            .ok_or(Error::NoConvergence { requested: 1e-6, achieved: f64::NAN })?;
    }
}

/// Rotated phase of the unit model at one coupling value.
pub fn model_rotated_phase(params: &CouplerResonatorParams) -> Result<f64> {
    let curve = characterization_phase(params)?;
    rotated_phase(&curve, params.center_freq_hz)
}

/// Full report for the unit model at one coupling value.
pub fn characterize_unit(params: &CouplerResonatorParams, alpha: f64) -> Result<CharacterizationReport> {
    let c = params.coupling_mag;
    if !(c > 0.0 && c < 1.0) {
        return Err(Error::invalid(format!(
            "characterization figures are undefined at the limit couplings, got |C| = {c}"
        )));
    }
    let curve = characterization_phase(params)?;
    let rotated = rotated_phase(&curve, params.center_freq_hz)?;
    let (df, f_l, f_r) = transition_bandwidth(&curve, params.center_freq_hz, alpha)?;
    let peak = model::peak_delay_and_bandwidth(params)?;
    Ok(CharacterizationReport {
        coupling_mag: Some(c),
        rotated_phase_rad: rotated,
        alpha,
        transition_bandwidth_hz: df,
        omega_l_hz: f_l,
        omega_r_hz: f_r,
        peak_delay_s: peak.peak_delay_s,
        half_delay_bandwidth_hz: peak.half_delay_bandwidth_hz,
    })
}

/// One report per coupling value, order preserved. Elements evaluate in
/// parallel under the `parallel` feature.
pub fn coupling_sweep(
    coupling_values: &[f64],
    base_params: &CouplerResonatorParams,
    alpha: f64,
) -> Result<Vec<CharacterizationReport>> {
    for &c in coupling_values {
        if !(c > 0.0 && c < 1.0) {
            return Err(Error::invalid(format!("sweep couplings must lie in (0, 1), got {c}")));
        }
    }
    let reports = par::map_slice(coupling_values, |&c| {
        base_params
            .with_coupling(c)
            .and_then(|p| characterize_unit(&p, alpha))
    });
    reports.into_iter().collect()
}

/// Invert the monotone rotated-phase curve: find the coupling in
/// (0.05, 0.95) whose rotated phase equals `target_rad`, to 1e-4 in
/// coupling.
pub fn find_coupling_for_rotated_phase(
    target_rad: f64,
    base_params: &CouplerResonatorParams,
) -> Result<f64> {
    let eval = |c: f64| -> Result<f64> { model_rotated_phase(&base_params.with_coupling(c)?) };
    let (mut lo, mut hi) = (0.05, 0.95);
    let at_lo = eval(lo)?;
    let at_hi = eval(hi)?;
    // Rotated phase falls as coupling grows.
    if !(target_rad <= at_lo && target_rad >= at_hi) {
        return Err(Error::OutOfRange(format!(
            "target {target_rad} rad outside the achievable range [{at_hi}, {at_lo}] rad for couplings in (0.05, 0.95)"
        )));
    }
    while hi - lo > 1e-4 {
        let mid = 0.5 * (lo + hi);
        if eval(mid)? >= target_rad {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
