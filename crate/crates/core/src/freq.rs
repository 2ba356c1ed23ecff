//! Frequency grids, sampled complex responses and unwrapped phase curves.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Uniform frequency grid in Hz.
///
/// Samples are exactly `start_hz + k * step_hz` for `k in 0..count`. All
/// public interfaces of the crate work in ordinary frequency (Hz); the
/// conversion to angular frequency happens inside the operations that need
/// it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    start_hz: f64,
    step_hz: f64,
    count: usize,
}

impl FrequencyGrid {
    /// Build a grid from its start, step and sample count.
    pub fn new(start_hz: f64, step_hz: f64, count: usize) -> Result<Self> {
        if !start_hz.is_finite() || !step_hz.is_finite() {
            return Err(Error::invalid("grid start and step must be finite"));
        }
        if step_hz <= 0.0 {
            return Err(Error::invalid(format!("grid step must be > 0, got {step_hz}")));
        }
        if count < 2 {
            return Err(Error::invalid(format!("grid needs at least 2 samples, got {count}")));
        }
        if start_hz < 0.0 {
            return Err(Error::invalid(format!("grid frequencies must be nonnegative, start {start_hz}")));
        }
        Ok(Self { start_hz, step_hz, count })
    }

    /// Grid spanning `[start_hz, stop_hz]` with `count` samples.
    pub fn spanning(start_hz: f64, stop_hz: f64, count: usize) -> Result<Self> {
        if count < 2 {
            return Err(Error::invalid("spanning grid needs at least 2 samples"));
        }
        if !(stop_hz > start_hz) {
            return Err(Error::invalid(format!("span must be increasing, got [{start_hz}, {stop_hz}]")));
        }
        let step = (stop_hz - start_hz) / (count - 1) as f64;
        Self::new(start_hz, step, count)
    }

    /// Grid spanning `[start_hz, stop_hz]` with at least `min_count` samples,
    /// with the step adjusted so that `snap_hz` lands exactly on a sample.
    ///
    /// Used for model evaluation where the resonance frequency must be a grid
    /// sample: a narrow delay peak between samples would otherwise be missed.
    pub fn spanning_snapped(start_hz: f64, stop_hz: f64, min_count: usize, snap_hz: f64) -> Result<Self> {
        if !(start_hz < snap_hz && snap_hz < stop_hz) {
            return Err(Error::invalid(format!(
                "snap frequency {snap_hz} Hz must lie strictly inside [{start_hz}, {stop_hz}]"
            )));
        }
        let count = min_count.max(2);
        let raw_step = (stop_hz - start_hz) / (count - 1) as f64;
        // Choose the step so that (snap - start) is an integer number of steps.
        let k = ((snap_hz - start_hz) / raw_step).round().max(1.0);
        let step = (snap_hz - start_hz) / k;
        let total = ((stop_hz - start_hz) / step).ceil() as usize + 1;
        Self::new(start_hz, step, total)
    }

    pub fn start_hz(&self) -> f64 {
        self.start_hz
    }

    pub fn step_hz(&self) -> f64 {
        self.step_hz
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn stop_hz(&self) -> f64 {
        self.value(self.count - 1)
    }

    /// Frequency of sample `k`.
    pub fn value(&self, k: usize) -> f64 {
        self.start_hz + k as f64 * self.step_hz
    }

    /// Iterator over all sample frequencies.
    pub fn iter(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.count).map(move |k| self.value(k))
    }

    /// All sample frequencies as a vector.
    pub fn to_vec(&self) -> Vec<f64> {
        self.iter().collect()
    }

    /// Index of the sample closest to `freq_hz`.
    pub fn nearest_index(&self, freq_hz: f64) -> usize {
        let k = ((freq_hz - self.start_hz) / self.step_hz).round();
        (k.max(0.0) as usize).min(self.count - 1)
    }

    /// Index of the sample at `freq_hz`, requiring it to land on the grid
    /// within `tol` fractions of a step.
    pub fn exact_index(&self, freq_hz: f64, tol: f64) -> Result<usize> {
        let idx = self.nearest_index(freq_hz);
        if (self.value(idx) - freq_hz).abs() > tol * self.step_hz {
            return Err(Error::OutOfRange(format!(
                "{freq_hz} Hz does not land on the grid (nearest sample {} Hz)",
                self.value(idx)
            )));
        }
        Ok(idx)
    }

    pub fn contains(&self, freq_hz: f64) -> bool {
        freq_hz >= self.start_hz - 1e-9 * self.step_hz && freq_hz <= self.stop_hz() + 1e-9 * self.step_hz
    }
}

/// Sampled complex transfer function over a frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexResponse {
    grid: FrequencyGrid,
    values: Vec<Complex64>,
}

impl ComplexResponse {
    pub fn new(grid: FrequencyGrid, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != grid.count() {
            return Err(Error::invalid(format!(
                "value count {} does not match grid count {}",
                values.len(),
                grid.count()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.re.is_finite() || !v.im.is_finite()) {
            return Err(Error::invalid(format!(
                "non-finite response value at {} Hz",
                grid.value(k)
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// Pointwise product with another response on the identical grid.
    pub fn pointwise_mul(&self, other: &ComplexResponse) -> Result<ComplexResponse> {
        if self.grid != other.grid {
            return Err(Error::invalid("responses are sampled on different grids"));
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a * b)
            .collect();
        ComplexResponse::new(self.grid.clone(), values)
    }

    /// Response value at an arbitrary in-span frequency, interpolating the
    /// real and imaginary parts linearly between grid samples.
    pub fn interpolate(&self, freq_hz: f64) -> Result<Complex64> {
        if !self.grid.contains(freq_hz) {
            return Err(Error::OutOfRange(format!(
                "{freq_hz} Hz outside response span [{}, {}] Hz",
                self.grid.start_hz(),
                self.grid.stop_hz()
            )));
        }
        let pos = (freq_hz - self.grid.start_hz()) / self.grid.step_hz();
        let lo = (pos.floor().max(0.0) as usize).min(self.grid.count() - 2);
        let frac = (pos - lo as f64).clamp(0.0, 1.0);
        let a = self.values[lo];
        let b = self.values[lo + 1];
        Ok(a + (b - a) * frac)
    }
}

/// Unwrapped phase samples over a frequency grid, in radians.
///
/// Adjacent samples differ by strictly less than pi, which is what makes the
/// unwrapping on the chosen grid unambiguous.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCurve {
    grid: FrequencyGrid,
    phase_rad: Vec<f64>,
}

impl PhaseCurve {
    /// Wrap an already-unwrapped phase vector, checking the step invariant.
    pub fn new(grid: FrequencyGrid, phase_rad: Vec<f64>) -> Result<Self> {
        if phase_rad.len() != grid.count() {
            return Err(Error::invalid(format!(
                "phase count {} does not match grid count {}",
                phase_rad.len(),
                grid.count()
            )));
        }
        if let Some(k) = phase_rad.iter().position(|p| !p.is_finite()) {
            return Err(Error::invalid(format!("non-finite phase at {} Hz", grid.value(k))));
        }
        for k in 1..phase_rad.len() {
            if (phase_rad[k] - phase_rad[k - 1]).abs() >= std::f64::consts::PI {
                return Err(Error::UnwrapAmbiguous { freq_hz: grid.value(k) });
            }
        }
        Ok(Self { grid, phase_rad })
    }

    pub fn grid(&self) -> &FrequencyGrid {
        &self.grid
    }

    pub fn phase_rad(&self) -> &[f64] {
        &self.phase_rad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn grid_samples_are_exact_affine() {
        let g = FrequencyGrid::new(8e9, 2e6, 2001).unwrap();
        assert_eq!(g.value(0), 8e9);
        assert_eq!(g.value(2000), 8e9 + 2000.0 * 2e6);
        assert_eq!(g.count(), 2001);
    }

    #[test]
    fn grid_rejects_bad_parameters() {
        assert!(FrequencyGrid::new(1.0, 0.0, 10).is_err());
        assert!(FrequencyGrid::new(1.0, -1.0, 10).is_err());
        assert!(FrequencyGrid::new(1.0, 1.0, 1).is_err());
        assert!(FrequencyGrid::new(-5.0, 1.0, 4).is_err());
        assert!(FrequencyGrid::new(f64::NAN, 1.0, 4).is_err());
    }

    #[test]
    fn snapped_grid_hits_the_snap_frequency() {
        let g = FrequencyGrid::spanning_snapped(8e9, 12e9, 2001, 10e9).unwrap();
        let idx = g.nearest_index(10e9);
        assert!((g.value(idx) - 10e9).abs() < 1e-3, "snap missed by {}", g.value(idx) - 10e9);
        assert!(g.stop_hz() >= 12e9 - 1.0);
        assert!(g.count() >= 2001);
    }

    #[test]
    fn response_rejects_non_finite_and_mismatched() {
        let g = FrequencyGrid::new(1e9, 1e6, 3).unwrap();
        assert!(ComplexResponse::new(g.clone(), vec![Complex64::new(1.0, 0.0); 2]).is_err());
        let bad = vec![
            Complex64::new(1.0, 0.0),
            Complex64::new(f64::NAN, 0.0),
            Complex64::new(1.0, 0.0),
        ];
        assert!(ComplexResponse::new(g, bad).is_err());
    }

    #[test]
    fn interpolation_is_linear_between_samples() {
        let g = FrequencyGrid::new(0.0, 1.0, 3).unwrap();
        let r = ComplexResponse::new(
            g,
            vec![
                Complex64::new(0.0, 0.0),
                Complex64::new(2.0, -2.0),
                Complex64::new(4.0, -4.0),
            ],
        )
        .unwrap();
        let v = r.interpolate(0.5).unwrap();
        assert!((v.re - 1.0).abs() < 1e-15 && (v.im + 1.0).abs() < 1e-15);
        assert!(r.interpolate(2.5).is_err());
    }

    #[test]
    fn phase_curve_enforces_step_invariant() {
        let g = FrequencyGrid::new(0.0, 1.0, 3).unwrap();
        assert!(PhaseCurve::new(g.clone(), vec![0.0, 1.0, 2.0]).is_ok());
        assert!(PhaseCurve::new(g, vec![0.0, 4.0, 8.0]).is_err());
    }
}
