//! Ideal Hilbert transform: spectral multiplier, principal-value quadrature,
//! and closed-form transforms of the rectangular and triangular pulses.
//!
//! The two numerical realizations are deliberately independent. The spectral
//! path multiplies the FFT by `-j sgn(w)`; the quadrature path evaluates the
//! defining convolution
//!
//! ```text
//! y(t) = (1/pi) P.V. integral x(tau) / (t - tau) dtau
//! ```
//!
//! with a symmetric window around the singularity, adaptive quadrature
//! outside it, and Richardson extrapolation of the window width to zero.
//! Each validates the other, and both are checked against the closed forms.

use num_complex::Complex64;

use crate::fft::{fft_forward, fft_inverse};
use crate::par;
use crate::time::TimeSignal;
use crate::{Error, Result};

use std::f64::consts::PI;

/// Unit-half-width test pulses with exact closed-form transforms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AnalyticPulse {
    /// 1 for |t| <= 1, 0 elsewhere.
    Rect,
    /// t+1 on [-1, 0), 1-t on [0, 1], 0 elsewhere.
    Tri,
}

impl AnalyticPulse {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            AnalyticPulse::Rect => {
                if t.abs() <= 1.0 {
                    1.0
                } else {
                    0.0
                }
            }
            AnalyticPulse::Tri => {
                if (-1.0..0.0).contains(&t) {
                    t + 1.0
                } else if (0.0..=1.0).contains(&t) {
                    1.0 - t
                } else {
                    0.0
                }
            }
        }
    }
}

/// Hilbert transform of the rectangular pulse: `(1/pi) ln|(t+1)/(t-1)|`.
///
/// The poles at t = +/-1 are reported as signed infinities so downstream
/// consumers clip knowingly instead of seeing an arbitrarily large float.
pub fn rect_hilbert_closed_form(t: f64) -> f64 {
    if t == 1.0 {
        return f64::INFINITY;
    }
    if t == -1.0 {
        return f64::NEG_INFINITY;
    }
    ((t + 1.0) / (t - 1.0)).abs().ln() / PI
}

/// Hilbert transform of the triangular pulse:
/// `-(1/pi) (ln|(t-1)/(t+1)| + t ln|t^2/(t^2-1)|)`.
///
/// The literal formula is indeterminate at t = 0 (a `0 * ln 0` product whose
/// limit is 0) and at |t| = 1, where the transform itself stays finite with
/// value `sign(t) * 2 ln(2) / pi`; those limits are supplied explicitly.
pub fn tri_hilbert_closed_form(t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if t == 1.0 {
        return 2.0 * std::f64::consts::LN_2 / PI;
    }
    if t == -1.0 {
        return -2.0 * std::f64::consts::LN_2 / PI;
    }
    let a = ((t - 1.0) / (t + 1.0)).abs().ln();
    let b = t * (t * t / (t * t - 1.0)).abs().ln();
    -(a + b) / PI
}

/// Spectral Hilbert transform: multiply the spectrum by `-j sgn(w)` with the
/// DC bin zeroed, and the Nyquist bin zeroed too for even lengths (it has no
/// conjugate partner for the odd multiplier).
///
/// Real input produces real output.
pub fn hilbert_spectral(signal: &TimeSignal) -> Result<TimeSignal> {
    let was_real = signal.is_real();
    let mut spectrum = fft_forward(signal);
    let n = spectrum.len();
    let pos_limit = n.div_ceil(2); // bins 1..pos_limit are positive frequencies
    for (k, bin) in spectrum.bins_mut().iter_mut().enumerate() {
        if k == 0 || (n.is_multiple_of(2) && k == n / 2) {
            *bin = Complex64::new(0.0, 0.0);
        } else if k < pos_limit {
            *bin *= Complex64::new(0.0, -1.0);
        } else {
            *bin *= Complex64::new(0.0, 1.0);
        }
    }
    let out = fft_inverse(&spectrum)?;
    if was_real {
        let cleaned = out.samples().iter().map(|s| Complex64::new(s.re, 0.0)).collect();
        TimeSignal::new(out.start_s(), out.sample_rate_hz(), cleaned)
    } else {
        Ok(out)
    }
}

/// Anything the principal-value quadrature can transform: an evaluable
/// amplitude with compact support and optional interior kinks where the
/// integrand should be split.
pub trait PvSource {
    fn eval(&self, t: f64) -> f64;
    /// Interval outside which the source is identically zero.
    fn support(&self) -> (f64, f64);
    /// Interior points where the source is not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

impl PvSource for AnalyticPulse {
    fn eval(&self, t: f64) -> f64 {
        AnalyticPulse::eval(self, t)
    }

    fn support(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }

    fn breakpoints(&self) -> Vec<f64> {
        match self {
            AnalyticPulse::Rect => vec![],
            AnalyticPulse::Tri => vec![0.0],
        }
    }
}

/// A sampled real waveform acts as a piecewise-linear source.
impl PvSource for TimeSignal {
    fn eval(&self, t: f64) -> f64 {
        let pos = (t - self.start_s()) * self.sample_rate_hz();
        if pos < 0.0 || pos > (self.len() - 1) as f64 {
            return 0.0;
        }
        let lo = (pos.floor() as usize).min(self.len() - 2);
        let frac = pos - lo as f64;
        let a = self.samples()[lo].re;
        let b = self.samples()[lo + 1].re;
        a + (b - a) * frac
    }

    fn support(&self) -> (f64, f64) {
        (self.start_s(), self.time_at(self.len() - 1))
    }
}

/// Principal-value quadrature of the Hilbert integral at a single point.
///
/// Integrates `x(tau) / (t - tau) / pi` with the symmetric window
/// `(t - eps, t + eps)` excluded, for window widths `eps`, `eps/2` and
/// `eps/4`, then Richardson-extrapolates the width to zero (the window error
/// is `c1*eps + c3*eps^3 + ...`, so two stages cancel both terms). Errors if
/// the extrapolation has not settled to 1e-8 absolute.
pub fn hilbert_pv_quadrature(source: &impl PvSource, t: f64, epsilon: f64) -> Result<f64> {
    if !(epsilon > 0.0) || !epsilon.is_finite() {
        return Err(Error::invalid(format!("epsilon must be > 0, got {epsilon}")));
    }
    let i_full = windowed_pv(source, t, epsilon)?;
    let i_half = windowed_pv(source, t, epsilon / 2.0)?;
    let i_quarter = windowed_pv(source, t, epsilon / 4.0)?;

    let r1a = 2.0 * i_half - i_full;
    let r1b = 2.0 * i_quarter - i_half;
    let r2 = (8.0 * r1b - r1a) / 7.0;

    let achieved = (r2 - r1b).abs();
    if achieved > 1e-8 {
        return Err(Error::NoConvergence { requested: 1e-8, achieved });
    }
    Ok(r2)
}

/// Quadrature at many points; the points are independent and evaluate in
/// parallel under the `parallel` feature.
pub fn hilbert_pv_many<S>(source: &S, points: &[f64], epsilon: f64) -> Result<Vec<f64>>
where
    S: PvSource + Sync,
{
    par::map_slice(points, |&t| hilbert_pv_quadrature(source, t, epsilon))
        .into_iter()
        .collect()
}

/// The windowed integral `(1/pi) int x(tau)/(t-tau) dtau` over the support
/// minus `(t-eps, t+eps)`.
fn windowed_pv(source: &impl PvSource, t: f64, eps: f64) -> Result<f64> {
    let (lo, hi) = source.support();
    // Segment boundaries: support edges, interior kinks, and window edges.
    let mut cuts = vec![lo, hi];
    for b in source.breakpoints() {
        if b > lo && b < hi {
            cuts.push(b);
        }
    }
    for w in [t - eps, t + eps] {
        if w > lo && w < hi {
            cuts.push(w);
        }
    }
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let integrand = |tau: f64| source.eval(tau) / (t - tau);
    let mut total = 0.0;
    for pair in cuts.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        // Skip the excluded window.
        if a >= t - eps && b <= t + eps {
            continue;
        }
        total += adaptive_simpson(&integrand, a, b, 1e-12)?;
    }
    Ok(total / PI)
}

/// Standard recursive adaptive Simpson with absolute tolerance.
fn adaptive_simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<f64> {
    if b <= a {
        return Ok(0.0);
    }
    let c = 0.5 * (a + b);
    let fa = f(a);
    let fb = f(b);
    let fc = f(c);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fc + fb);
    simpson_step(f, a, b, fa, fb, fc, whole, tol, 52)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step(
    f: &impl Fn(f64) -> f64,
    a: f64,
    b: f64,
    fa: f64,
    fb: f64,
    fc: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64> {
    let c = 0.5 * (a + b);
    let d = 0.5 * (a + c);
    let e = 0.5 * (c + b);
    let fd = f(d);
    let fe = f(e);
    let left = (c - a) / 6.0 * (fa + 4.0 * fd + fc);
    let right = (b - c) / 6.0 * (fc + 4.0 * fe + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 {
        return Err(Error::NoConvergence { requested: tol, achieved: delta.abs() / 15.0 });
    }
    let lv = simpson_step(f, a, c, fa, fc, fd, left, tol / 2.0, depth - 1)?;
    let rv = simpson_step(f, c, b, fc, fb, fe, right, tol / 2.0, depth - 1)?;
    Ok(lv + rv)
}
