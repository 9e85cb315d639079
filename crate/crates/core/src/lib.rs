//! Stochastic-geometry simulator and closed-form bounds for single-transmit,
//! multi-receive-antenna links in Poisson ad hoc networks.
//!
//! The crate is organised bottom-up:
//!
//! * [`mathkit`] special functions, chi-square sampling and small complex
//!   linear algebra.
//! * [`field`] interferer geometries (Poisson and square grid) with Rayleigh
//!   vector channels.
//! * [`receivers`] MRC / partial zero forcing / MMSE filters and SINR.
//! * [`bounds`] interference moments and the Markov and Chebyshev outage and
//!   density bounds.
//! * [`experiments`] Monte Carlo outage, maximum-density search and the
//!   figure-level experiments.
//! * [`efp`] expected forward progress under ALOHA with opportunistic relaying.

pub mod bounds;
pub mod efp;
mod error;
pub mod experiments;
pub mod field;
pub mod mathkit;
pub mod receivers;

pub use error::{Error, Result};
pub use field::NetworkConfig;
pub use receivers::ReceiverSpec;
