//! Numerics for squeezed-light control of a levitated nanoparticle.
//!
//! A trapped dielectric particle (or an anisotropic rotor) scatters laser
//! photons, and the shot noise of that scattering heats every mechanical
//! mode. Shining squeezed vacuum onto the particle changes the statistics of
//! the electromagnetic modes the motion couples to. This crate evaluates the
//! consequences:
//!
//! - [`angular`]: angular/polarization distributions on the unit sphere and
//!   the quadrature engine behind every overlap integral.
//! - [`physics`]: trap parameters to mechanical frequencies, zero-point
//!   amplitudes and bare recoil rates.
//! - [`squeeze`]: squeezing-modified recoil heating and cross rates.
//! - [`scatter`]: scattering amplitudes, differential cross sections and
//!   information radiation patterns.
//! - [`detect`]: input spectra, minimum detectable signal relative to the
//!   standard quantum limit, and Gaussian Wigner data.
//! - [`optimize`]: derivative-free search over beam parameters.
//!
//! All spectra are exchanged pre-multiplied by 2π, so vacuum noise is 1.

pub mod angular;
pub mod constants;
pub mod detect;
mod error;
pub mod optimize;
pub mod output;
pub mod phase;
pub mod physics;
pub mod scatter;
pub mod squeeze;

pub use error::{Error, Result};
pub use num_complex::Complex64;
