//! Numerical audits for hypothetical quantum signalling devices.
//!
//! The crate works on small, labeled tensor-product Hilbert spaces (dimension
//! at most 64) and provides:
//!
//! - [`qcore`]: pure states, Born probabilities, subsystem marginals and
//!   Schmidt decomposition.
//! - [`linmaps`]: linear maps given by basis images, Gram-matrix isometry
//!   audits with constructive refutations, and locality factorization.
//! - [`disentangler`]: the coefficients a one-sided map would need to turn a
//!   balanced Bell state into `α|HH⟩ + β|VV⟩`, and the unitarity check on them.
//! - [`entangler`]: the basis-map Entangler under every sign reading, audited
//!   for unitarity and locality.
//! - [`tunnel`]: two-box (and spin exchange) two-level dynamics with a
//!   blockable coupling.
//! - [`sigstat`]: exact binomial decision errors, sample-size inversion and a
//!   seeded Monte Carlo channel.
//! - [`cli`]: the `nosignal` command-line front end.

#![forbid(unsafe_code)]

pub mod cli;
pub mod disentangler;
pub mod entangler;
mod error;
pub mod json;
pub mod linmaps;
pub mod qcore;
pub mod sigstat;
pub mod tunnel;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
