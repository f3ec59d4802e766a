//! Numerical toolkit for the M/G/∞ queue.
//!
//! The number of busy servers `Q(t)` in an infinite-server queue with
//! Poisson arrivals is Poisson-distributed at every time point, with a
//! time-dependent mean that converges to the offered load. This crate
//! computes that transient law exactly, bounds its distance to the
//! stationary regime for light- and heavy-tailed service laws, tabulates
//! the busy-period and regeneration-cycle distributions through a
//! convolution series, and cross-validates everything against a
//! discrete-event simulator.
//!
//! Modules:
//! - [`dist`]: the service-time catalog (survival, mean, tail integral,
//!   inverse-CDF sampling, tail classification).
//! - [`transient`]: `P(Q(t)=k)`, the sup-distance `phi(t)` to
//!   stationarity, and its explicit tail-integral bound.
//! - [`busy`]: busy-period tail via the convolution series, the
//!   regeneration-cycle tail, and the integral quantities `V(t)`, `u(t)`.
//! - [`rates`]: decay-rate root for light tails, Karamata tail
//!   asymptotics and the heavy-tail bound, plus a consolidated report.
//! - [`sim`]: discrete-event simulation oracle with deterministic
//!   substream RNG.

pub mod busy;
pub mod dist;
mod error;
mod quad;
pub mod rates;
pub mod sim;
pub mod streams;
pub mod transient;

pub use error::{Error, Result};
