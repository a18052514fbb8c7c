//! Simulation and analysis of the transmission capacity of a multi-antenna
//! secondary (cognitive) ad-hoc network sharing spectrum with a primary
//! network.
//!
//! The crate is organized around the pipeline of a capacity experiment:
//!
//! * [`geometry`] — Poisson point processes on a disc, thinning, receiver
//!   displacement and nearest-neighbor queries;
//! * [`channel`] — Rayleigh fading draws, null-space transmit beamformers
//!   and receive interference-canceling combiners;
//! * [`sir`] — full deployment realizations and the SIR at the typical
//!   primary / secondary receiver for every antenna regime, plus the
//!   distribution-equivalent fast sampler used for large trial counts;
//! * [`analytic`] — closed-form outage and capacity expressions and the
//!   antenna scaling exponents;
//! * [`mc`] — the Monte Carlo harness: outage estimation with confidence
//!   intervals, maximum-intensity bisection with common random numbers, and
//!   the statistical validation suites.

pub mod analytic;
pub mod channel;
pub mod error;
pub mod geometry;
pub mod mc;
pub mod scenario;
pub mod sir;
pub mod stats;

pub use error::{Error, Result};
