//! Markovian decay of classical correlations, quantum discord and mutual
//! information for two-spin reduced states of the transverse-field XY chain.
//!
//! - [`xy_model`]: magnetization, `G_r` coefficients and Toeplitz correlators.
//! - [`xstate`]: two-qubit X states, entropies, analytic and brute-force discord.
//! - [`channels`]: bit-flip, bit-phase-flip and phase-flip evolution.
//! - [`analysis`]: trajectories, sudden-change points and their derivatives.
//! - [`cli`]: the `xy-discord` command-line front end.

pub mod analysis;
pub mod channels;
pub mod cli;
pub mod error;
pub mod quadrature;
pub mod xstate;
pub mod xy_model;

pub use channels::{Channel, ParamTime};
pub use error::{Error, Result};
pub use quadrature::QuadratureConfig;
pub use xstate::{Branch, CCoeffs, XState};
pub use xy_model::{Axis, Beta, ModelParams};
