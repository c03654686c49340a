//! Frequency-domain simulator and design optimizer for a four-mode
//! "diamond" coupled-mode network.
//!
//! Four bosonic modes sit on the corners of a square: modes 1 and 3 resonate
//! at `omega1`, modes 2 and 4 at `omega2`. The edges of the square carry
//! beamsplitter-type (hopping) couplings with controlled phases; the two
//! diagonals carry parametric (two-mode-squeezing) couplings of real rate
//! `gamma`. Because the parametric terms mix annihilation and creation
//! operators, the dynamics live in the doubled 8-component basis
//! `{a1..a4, a1*..a4*}`.
//!
//! The library computes the 8x8 scattering matrix of this network at a probe
//! frequency, the intrinsic and pump-dressed (extrinsic) non-reciprocity
//! measures, and directional-amplifier gains, and provides parameter sweeps,
//! derivative-free optimization, and an independent time-domain integration
//! oracle for cross-validation.

pub mod cli;
pub mod error;
pub mod linalg;
pub mod model;
pub mod optimize;
pub mod sweep;
pub mod timedomain;

pub use error::{Error, Result};
