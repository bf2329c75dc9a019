//! Modal-space simulator and impedance-tuning toolkit for square plates damped
//! by a uniform grid of piezoelectric actuators interconnected through a
//! membrane-like electric network.
//!
//! The crate works almost entirely in dimensionless variables: [`params`]
//! converts a physical plate/network description into the four dimensionless
//! numbers driving the coupled dynamics, [`basis`] builds the mechanical and
//! electrical eigenbases on the unit square, [`coupling`] measures their modal
//! energy-exchange capability, [`tuning`] derives optimal net-impedances from
//! the characteristic polynomials, and [`dynamics`] integrates the coupled
//! modal equations, evaluates the closed-form beat solution, and assembles
//! frequency-response and impulse-response studies.
//!
//! [`config`] and [`scenario`] tie the pieces into reproducible, file-driven
//! runs used by the `piezonet` command-line tool.

pub mod basis;
pub mod config;
pub mod coupling;
pub mod dynamics;
mod error;
pub mod ode;
pub mod params;
pub mod quadrature;
pub mod scenario;
pub mod tuning;

pub use error::{Error, Result};
