//! Phase unwrapping and numerical group delay.

use std::f64::consts::{PI, TAU};

use crate::freq::{ComplexResponse, PhaseCurve};
use crate::{Error, Result};

/// How close to pi an adjacent phase step may come before the unwrap is
/// declared ambiguous.
const UNWRAP_MARGIN: f64 = 1e-9;

/// Unwrap the argument of a sampled response into a continuous phase curve.
///
/// Each raw step between adjacent samples is reduced to its principal value
/// in (-pi, pi]; steps that land at pi within rounding are rejected as
/// ambiguous, which is the signal to refine the grid.
pub fn unwrap_phase(response: &ComplexResponse) -> Result<PhaseCurve> {
    let grid = response.grid().clone();
    let values = response.values();
    let mut phase = Vec::with_capacity(values.len());
    let mut prev_raw = 0.0;

    for (k, v) in values.iter().enumerate() {
        if v.norm() == 0.0 {
            return Err(Error::SingularSample { freq_hz: grid.value(k) });
        }
        let raw = v.arg();
        if k == 0 {
            phase.push(raw);
        } else {
            let mut delta = raw - prev_raw;
            delta -= TAU * (delta / TAU).round();
            if delta.abs() >= PI * (1.0 - UNWRAP_MARGIN) {
                return Err(Error::UnwrapAmbiguous { freq_hz: grid.value(k) });
            }
            phase.push(phase[k - 1] + delta);
        }
        prev_raw = raw;
    }

    PhaseCurve::new(grid, phase)
}

/// Group delay tau = -dphi/domega, sampled in seconds on the phase grid.
///
/// Interior points use 2nd-order central differences; the endpoints use
/// first-order one-sided differences. The result is exact (to rounding) for
/// affine phase curves.
pub fn group_delay(phase: &PhaseCurve) -> Result<Vec<f64>> {
    let p = phase.phase_rad();
    let n = p.len();
    if n < 3 {
        return Err(Error::invalid("group delay needs at least 3 samples"));
    }
    let domega = TAU * phase.grid().step_hz();
    let mut tau = Vec::with_capacity(n);
    tau.push(-(p[1] - p[0]) / domega);
    for k in 1..n - 1 {
        tau.push(-(p[k + 1] - p[k - 1]) / (2.0 * domega));
    }
    tau.push(-(p[n - 1] - p[n - 2]) / domega);
    Ok(tau)
}
