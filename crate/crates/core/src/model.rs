//! Steady-state transfer function of a coupler-resonator all-pass unit and
//! cascades of such units.
//!
//! One unit is a through line coupled to a transmission-line loop. The
//! coupler is described by a transmission coefficient `T` and a coupling
//! coefficient `C` with `|T|^2 + |C|^2 = 1` and `angle(C) = angle(T) - pi/2`;
//! the loop (minus the coupled section) is a pure delay `D = exp(-j w tau0)`.
//! Summing the through path and the multiple loop round trips gives
//!
//! ```text
//! S21(w) = T + C^2 D / (1 - T D)
//! ```
//!
//! which is lossless (|S21| = 1 everywhere) and carries all of its action in
//! the phase: a sharp delay peak at every loop resonance.
//!
//! The through-path phase is modeled as a true line phase,
//! `angle(T) = -w * coupled_section_delay`, rather than a constant. With the
//! default half-wave coupled section this puts a resonance exactly at the
//! design center frequency and reproduces the limit delays of the uncoupled
//! (|C|=0) and fully-coupled (|C|=1) device.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::freq::{ComplexResponse, FrequencyGrid, PhaseCurve};
use crate::par;
use crate::phase::{group_delay, unwrap_phase};
use crate::{Error, Result};

/// Minimum model-evaluation grid density (points across the band of
/// interest) before automatic refinement kicks in.
pub const DEFAULT_GRID_POINTS: usize = 2001;

/// Parameters of one coupler-resonator unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplerResonatorParams {
    /// Coupling magnitude |C| in [0, 1].
    pub coupling_mag: f64,
    /// Design center frequency f0 in Hz (resonance of the loop).
    pub center_freq_hz: f64,
    /// Delay of the uncoupled part of the loop, tau0, in seconds.
    pub loop_delay_s: f64,
    /// Group delay of the coupled section (the through path), in seconds.
    pub coupled_section_delay_s: f64,
}

impl CouplerResonatorParams {
    /// Unit with the half-wave coupled section and the shortest resonant
    /// loop: `coupled_section_delay = 1/(2 f0)` and `loop_delay = 3/(2 f0)`,
    /// i.e. a two-wavelength loop resonant at `center_freq_hz`.
    pub fn with_defaults(coupling_mag: f64, center_freq_hz: f64) -> Result<Self> {
        Self::new(
            coupling_mag,
            center_freq_hz,
            1.5 / center_freq_hz,
            0.5 / center_freq_hz,
        )
    }

    pub fn new(
        coupling_mag: f64,
        center_freq_hz: f64,
        loop_delay_s: f64,
        coupled_section_delay_s: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&coupling_mag) {
            return Err(Error::invalid(format!(
                "coupling magnitude must be in [0, 1], got {coupling_mag}"
            )));
        }
        if !(center_freq_hz > 0.0) || !center_freq_hz.is_finite() {
            return Err(Error::invalid(format!("center frequency must be > 0, got {center_freq_hz}")));
        }
        if !(loop_delay_s > 0.0) || !loop_delay_s.is_finite() {
            return Err(Error::invalid(format!("loop delay must be > 0, got {loop_delay_s}")));
        }
        if loop_delay_s < 0.0 || !coupled_section_delay_s.is_finite() || coupled_section_delay_s < 0.0 {
            return Err(Error::invalid(format!(
                "coupled-section delay must be >= 0, got {coupled_section_delay_s}"
            )));
        }
        Ok(Self {
            coupling_mag,
            center_freq_hz,
            loop_delay_s,
            coupled_section_delay_s,
        })
    }

    /// Same unit with a different coupling magnitude.
    pub fn with_coupling(&self, coupling_mag: f64) -> Result<Self> {
        Self::new(
            coupling_mag,
            self.center_freq_hz,
            self.loop_delay_s,
            self.coupled_section_delay_s,
        )
    }

    /// |T| = sqrt(1 - |C|^2), from power conservation.
    pub fn through_mag(&self) -> f64 {
        (1.0 - self.coupling_mag * self.coupling_mag).max(0.0).sqrt()
    }

    /// Through-path phase angle(T) at frequency `freq_hz`.
    pub fn theta(&self, freq_hz: f64) -> f64 {
        -TAU * freq_hz * self.coupled_section_delay_s
    }

    /// Loop round-trip delay seen by the resonance (coupled section plus
    /// uncoupled line).
    pub fn round_trip_delay_s(&self) -> f64 {
        self.loop_delay_s + self.coupled_section_delay_s
    }

    /// S21 at a single frequency, composed literally from the flow-graph
    /// expression `T + C^2 D / (1 - T D)` with `C^2 = T^2 - exp(j 2 theta)`.
    pub fn response_at(&self, freq_hz: f64) -> Result<Complex64> {
        let t_mag = self.through_mag();
        let theta = self.theta(freq_hz);
        let t = Complex64::from_polar(t_mag, theta);
        let d = Complex64::from_polar(1.0, -TAU * freq_hz * self.loop_delay_s);
        // With |C| = 0 the identity C^2 = T^2 - exp(2j theta) is exactly zero;
        // taking it through two polar evaluations would leave ~1e-16 residue
        // that blows up against the near-zero loop denominator at resonance.
        let c_sq = if self.coupling_mag == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            t * t - Complex64::from_polar(1.0, 2.0 * theta)
        };

        let denom = Complex64::new(1.0, 0.0) - t * d;
        if denom.norm() == 0.0 {
            // |C| = 0 with T D landing exactly on 1: the degenerate resonance
            // of an uncoupled lossless loop. For |C| > 0, |T D| < 1 keeps the
            // denominator away from zero.
            return Err(Error::ModelSingularity { freq_hz });
        }
        Ok(t + c_sq * d / denom)
    }

    /// Pointwise numerical group delay at `freq_hz`, from the symmetric
    /// phase difference across a small step. Used by searches that need the
    /// delay off-grid.
    pub fn delay_at(&self, freq_hz: f64) -> Result<f64> {
        let h = (self.center_freq_hz * 1e-7).max(1.0);
        let lo = self.response_at(freq_hz - h)?;
        let hi = self.response_at(freq_hz + h)?;
        // Principal-value phase difference; valid because tau * 2h is kept
        // far below half a cycle for every coupling this model can produce.
        let dphi = (hi / lo).arg();
        Ok(-dphi / (TAU * 2.0 * h))
    }
}

/// Ordered list of units evaluated as a cascade.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CascadeSpec {
    units: Vec<CouplerResonatorParams>,
}

impl CascadeSpec {
    pub fn new(units: Vec<CouplerResonatorParams>) -> Result<Self> {
        if units.is_empty() {
            return Err(Error::invalid("cascade needs at least one unit"));
        }
        Ok(Self { units })
    }

    /// Cascade of `n` identical units.
    pub fn identical(unit: CouplerResonatorParams, n: usize) -> Result<Self> {
        Self::new(vec![unit; n])
    }

    pub fn units(&self) -> &[CouplerResonatorParams] {
        &self.units
    }

    /// Product of the unit responses at a single frequency.
    pub fn response_at(&self, freq_hz: f64) -> Result<Complex64> {
        let mut acc = Complex64::new(1.0, 0.0);
        for u in &self.units {
            acc *= u.response_at(freq_hz)?;
        }
        Ok(acc)
    }
}

/// Evaluate one unit's transfer function over a grid.
pub fn unit_transfer(params: &CouplerResonatorParams, grid: &FrequencyGrid) -> Result<ComplexResponse> {
    let values = par::map_indices(grid.count(), |k| params.response_at(grid.value(k)));
    let values: Result<Vec<Complex64>> = values.into_iter().collect();
    ComplexResponse::new(grid.clone(), values?)
}

/// Evaluate a cascade's transfer function over a grid (pointwise product of
/// the unit responses).
pub fn cascade_transfer(spec: &CascadeSpec, grid: &FrequencyGrid) -> Result<ComplexResponse> {
    let values = par::map_indices(grid.count(), |k| spec.response_at(grid.value(k)));
    let values: Result<Vec<Complex64>> = values.into_iter().collect();
    ComplexResponse::new(grid.clone(), values?)
}

/// Model phase over `[lo_hz, hi_hz]`, on a grid snapped to the resonance and
/// refined (point count doubling) until the unwrap is trustworthy.
///
/// Aliasing (a true inter-sample phase change above pi that wraps into an
/// innocent-looking small step) cannot be detected from one grid alone, so
/// refinement continues until the end-to-end unwrapped span agrees between
/// consecutive densities and every step stays clear of pi.
pub fn refined_cascade_phase(
    spec: &CascadeSpec,
    lo_hz: f64,
    hi_hz: f64,
    min_points: usize,
) -> Result<(PhaseCurve, ComplexResponse)> {
    let center = spec.units()[0].center_freq_hz;
    let mut points = min_points.max(DEFAULT_GRID_POINTS);
    let mut previous_span: Option<f64> = None;
    const MAX_POINTS: usize = 1 << 22;

    loop {
        let grid = FrequencyGrid::spanning_snapped(lo_hz, hi_hz, points, center)?;
        let response = cascade_transfer(spec, &grid)?;
        match unwrap_phase(&response) {
            Ok(curve) => {
                let p = curve.phase_rad();
                let span = p[p.len() - 1] - p[0];
                let max_step = p.windows(2).map(|w| (w[1] - w[0]).abs()).fold(0.0, f64::max);
                let stable = previous_span
                    .map(|s| (s - span).abs() < 1e-6)
                    .unwrap_or(false);
                if stable && max_step < 0.9 * std::f64::consts::PI {
                    return Ok((curve, response));
                }
                previous_span = Some(span);
            }
            Err(Error::UnwrapAmbiguous { .. }) => {
                previous_span = None;
            }
            Err(e) => return Err(e),
        }
        // Double the interval count (not the sample count) so frequencies
        // that land on the coarse grid stay on every refined grid.
        points = (points - 1)
            .checked_mul(2)
            .map(|p| p + 1)
            .filter(|&p| p <= MAX_POINTS)
            .ok_or(Error::NoConvergence {
                requested: 1e-6,
                achieved: f64::NAN,
            })?;
    }
}

/// Single-unit convenience wrapper around [`refined_cascade_phase`].
pub fn refined_unit_phase(
    params: &CouplerResonatorParams,
    lo_hz: f64,
    hi_hz: f64,
    min_points: usize,
) -> Result<(PhaseCurve, ComplexResponse)> {
    refined_cascade_phase(&CascadeSpec::new(vec![*params])?, lo_hz, hi_hz, min_points)
}

/// Peak group delay and half-delay bandwidth of one unit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeakDelay {
    /// Group delay at the resonance, in seconds.
    pub peak_delay_s: f64,
    /// Width of the band where the delay stays at or above half its peak,
    /// in Hz. Infinite for the flat-delay limit couplings 0 and 1.
    pub half_delay_bandwidth_hz: f64,
}

/// Group-delay maximum tau(w0) and the half-delay bandwidth of one unit.
///
/// The peak is read from the numerical group delay at the resonance sample
/// of a grid that is refined until the value stabilizes; the band edges are
/// then located by bisection on the model to 1e-6 relative.
pub fn peak_delay_and_bandwidth(params: &CouplerResonatorParams) -> Result<PeakDelay> {
    let f0 = params.center_freq_hz;
    let peak = converged_peak_delay(params)?;

    if params.coupling_mag == 0.0 || params.coupling_mag == 1.0 {
        // Flat delay: the "band" where delay >= peak/2 is unbounded.
        return Ok(PeakDelay {
            peak_delay_s: peak,
            half_delay_bandwidth_hz: f64::INFINITY,
        });
    }

    let half = peak / 2.0;
    // Free spectral range of the loop; the delay is periodic with this
    // period, so the half-delay region around f0 is bracketed inside it.
    let fsr = 1.0 / params.round_trip_delay_s();
    let above = find_half_crossing(params, f0, f0 + 0.5 * fsr, half)?;
    let below = find_half_crossing(params, f0, f0 - 0.5 * fsr, half)?;
    Ok(PeakDelay {
        peak_delay_s: peak,
        half_delay_bandwidth_hz: above - below,
    })
}

/// Refine the evaluation grid (doubling) until the delay at the resonance
/// sample stabilizes. Narrow peaks at small coupling need fine sampling
/// before central differences stop averaging the peak away.
fn converged_peak_delay(params: &CouplerResonatorParams) -> Result<f64> {
    let f0 = params.center_freq_hz;
    let (lo, hi) = (0.8 * f0, 1.2 * f0);
    let mut points = DEFAULT_GRID_POINTS;
    let mut previous: Option<f64> = None;
    const MAX_POINTS: usize = 1 << 22;

    loop {
        let grid = FrequencyGrid::spanning_snapped(lo, hi, points, f0)?;
        let response = unit_transfer(params, &grid)?;
        if let Ok(curve) = unwrap_phase(&response) {
            let tau = group_delay(&curve)?;
            let peak = tau[grid.exact_index(f0, 0.5)?];
            if let Some(prev) = previous {
                if (peak - prev).abs() <= 1e-5 * peak.abs().max(1e-18) {
                    return Ok(peak);
                }
            }
            previous = Some(peak);
        }
        points = (points - 1)
            .checked_mul(2)
            .map(|p| p + 1)
            .filter(|&p| p <= MAX_POINTS)
            .ok_or(Error::NoConvergence {
                requested: 1e-5,
                achieved: previous.unwrap_or(f64::NAN),
            })?;
    }
}

/// Bisect between the resonance and `outer` for the frequency where the
/// pointwise delay crosses `level`, to 1e-6 relative.
fn find_half_crossing(
    params: &CouplerResonatorParams,
    resonance: f64,
    outer: f64,
    level: f64,
) -> Result<f64> {
    let mut inner = resonance;
    let mut outer = outer;
    if params.delay_at(outer)? >= level {
        return Err(Error::NotFound(format!(
            "delay never falls below half peak between {resonance} and {outer} Hz"
        )));
    }
    loop {
        let mid = 0.5 * (inner + outer);
        // Bracket width relative to the crossing's offset from resonance;
        // closing it below 1e-6 of that offset makes the reported bandwidth
        // accurate to 1e-6 relative.
        let offset = (mid - resonance).abs().max(f64::MIN_POSITIVE);
        if (outer - inner).abs() <= 1e-6 * offset {
            return Ok(mid);
        }
        if params.delay_at(mid)? >= level {
            inner = mid;
        } else {
            outer = mid;
        }
    }
}
