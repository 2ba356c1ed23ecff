//! FFT contract between time signals and sampled spectra.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::time::TimeSignal;
use crate::{Error, Result};

/// Discrete spectrum of a uniformly sampled signal.
///
/// Bin `k` holds the component at frequency `k * sample_rate / n` for
/// `k <= n/2` and `(k - n) * sample_rate / n` above (the usual FFT layout).
/// The forward transform is unnormalized; the inverse divides by `n`, so a
/// round trip reproduces the input.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    start_s: f64,
    sample_rate_hz: f64,
    bins: Vec<Complex64>,
}

impl ComplexSpectrum {
    pub fn len(&self) -> usize {
        self.bins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bins.is_empty()
    }

    pub fn sample_rate_hz(&self) -> f64 {
        self.sample_rate_hz
    }

    pub fn bins(&self) -> &[Complex64] {
        &self.bins
    }

    pub fn bins_mut(&mut self) -> &mut [Complex64] {
        &mut self.bins
    }

    /// Signed frequency of bin `k` (negative for the upper half).
    pub fn bin_freq_hz(&self, k: usize) -> f64 {
        let n = self.bins.len();
        let signed = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
        signed * self.sample_rate_hz / n as f64
    }

    /// Sum of squared bin magnitudes divided by n (time-domain energy by
    /// Parseval).
    pub fn energy(&self) -> f64 {
        self.bins.iter().map(|b| b.norm_sqr()).sum::<f64>() / self.bins.len() as f64
    }
}

/// Forward FFT of a uniformly sampled signal.
pub fn fft_forward(signal: &TimeSignal) -> ComplexSpectrum {
    let mut bins = signal.samples().to_vec();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(bins.len());
    fft.process(&mut bins);
    ComplexSpectrum {
        start_s: signal.start_s(),
        sample_rate_hz: signal.sample_rate_hz(),
        bins,
    }
}

/// Inverse FFT back to a time signal.
pub fn fft_inverse(spectrum: &ComplexSpectrum) -> Result<TimeSignal> {
    let n = spectrum.bins.len();
    if n < 2 {
        return Err(Error::invalid("spectrum needs at least 2 bins"));
    }
    let mut samples = spectrum.bins.clone();
    let mut planner = FftPlanner::new();
    let ifft = planner.plan_fft_inverse(n);
    ifft.process(&mut samples);
    let scale = 1.0 / n as f64;
    for s in &mut samples {
        *s *= scale;
    }
    TimeSignal::new(spectrum.start_s, spectrum.sample_rate_hz, samples)
}
