//! Uniformly sampled waveforms.

use num_complex::Complex64;

use crate::{Error, Result};

/// Uniformly sampled waveform with sample rate and start time.
///
/// Samples are complex so the same type carries real stimuli, analytic
/// signals and phasor-simulation outputs. Real signals simply have zero
/// imaginary parts (see [`TimeSignal::from_real`]).
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSignal {
    start_s: f64,
    sample_rate_hz: f64,
    samples: Vec<Complex64>,
}

impl TimeSignal {
    pub fn new(start_s: f64, sample_rate_hz: f64, samples: Vec<Complex64>) -> Result<Self> {
        if !start_s.is_finite() || !sample_rate_hz.is_finite() {
            return Err(Error::invalid("signal start and sample rate must be finite"));
        }
        if sample_rate_hz <= 0.0 {
            return Err(Error::invalid(format!("sample rate must be > 0, got {sample_rate_hz}")));
        }
        if samples.len() < 2 {
            return Err(Error::invalid(format!("signal needs at least 2 samples, got {}", samples.len())));
        }
        if samples.iter().any(|s| !s.re.is_finite() || !s.im.is_finite()) {
            return Err(Error::invalid("signal contains non-finite samples"));
        }
        Ok(Self { start_s, sample_rate_hz, samples })
    }

    pub fn from_real(start_s: f64, sample_rate_hz: f64, samples: Vec<f64>) -> Result<Self> {
        let samples = samples.into_iter().map(|x| Complex64::new(x, 0.0)).collect();
        Self::new(start_s, sample_rate_hz, samples)
    }

    pub fn start_s(&self) -> f64 {
        self.start_s
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn dt_s(&self) -> f64 {
        1.0 / self.sample_rate_hz
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    /// Time of sample `k`.
    pub fn time_at(&self, k: usize) -> f64 {
        self.start_s + k as f64 / self.sample_rate_hz
    }

    /// True when every sample has negligible imaginary part relative to the
    /// signal's peak magnitude.
    pub fn is_real(&self) -> bool {
        let peak = self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return true;
        }
        self.samples.iter().all(|s| s.im.abs() <= 1e-9 * peak)
    }

    /// Real parts of all samples.
    pub fn real_samples(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.re).collect()
    }

    /// Sum of squared magnitudes.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|s| s.norm_sqr()).sum()
    }

    /// Largest sample magnitude.
    pub fn peak(&self) -> f64 {
        self.samples.iter().map(|s| s.norm()).fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_degenerate_signals() {
        assert!(TimeSignal::from_real(0.0, 0.0, vec![1.0, 2.0]).is_err());
        assert!(TimeSignal::from_real(0.0, 1.0, vec![1.0]).is_err());
        assert!(TimeSignal::from_real(0.0, 1.0, vec![1.0, f64::INFINITY]).is_err());
    }

    #[test]
    fn time_axis_and_realness() {
        let s = TimeSignal::from_real(1.0, 10.0, vec![0.0, 1.0, 0.5]).unwrap();
        assert_eq!(s.time_at(0), 1.0);
        assert!((s.time_at(2) - 1.2).abs() < 1e-15);
        assert!(s.is_real());
        let c = TimeSignal::new(0.0, 10.0, vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]).unwrap();
        assert!(!c.is_real());
    }
}
