//! Modeling and signal-processing toolkit for coupler-resonator all-pass
//! Hilbert transformers.
//!
//! The crate models a microwave Hilbert transformer built from a directional
//! coupler closed on itself by a transmission-line loop. It provides:
//!
//! - frequency grids, sampled complex responses and time signals with an FFT
//!   contract, phase unwrapping and numerical group delay ([`freq`], [`time`],
//!   [`fft`], [`phase`]);
//! - the analytic steady-state transfer function of one coupler-resonator
//!   unit, unit cascades, and a discrete-time transient simulator of the same
//!   flow graph ([`model`], [`transient`]);
//! - figures of merit (rotated phase, transition bandwidth, delay/bandwidth
//!   trade-off sweeps) for modeled or measured responses ([`characterize`]);
//! - an ideal Hilbert-transform engine with two independent realizations
//!   (spectral multiplier and principal-value quadrature) plus closed-form
//!   transforms of rectangular and triangular pulses ([`hilbert`]);
//! - application pipelines: edge detection, peak clipping and single-sideband
//!   modulation ([`apps`]);
//! - Touchstone v1 two-port ingestion so measured S-parameters can drive the
//!   same pipelines ([`touchstone`]).
//!
//! Grid evaluations and sweeps run data-parallel via rayon when the default
//! `parallel` feature is enabled; disabling it falls back to equivalent
//! sequential loops.

// Negated partial-order comparisons are used on purpose: `!(x > 0.0)`
// rejects NaN where `x <= 0.0` would let it through.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod apps;
pub mod characterize;
mod error;
pub mod fft;
pub mod freq;
pub mod hilbert;
pub mod model;
mod par;
pub mod phase;
pub mod time;
pub mod touchstone;
pub mod transient;

pub use error::{Error, Result};
pub use freq::{ComplexResponse, FrequencyGrid, PhaseCurve};
pub use time::TimeSignal;
