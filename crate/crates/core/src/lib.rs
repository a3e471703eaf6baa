//! Flexural strength, failure-mode and ductility analysis for mild-steel
//! reinforced and prestressed UHPC beams.
//!
//! The crate is organised bottom-up:
//!
//! - [`materials`]: uniaxial UHPC, rebar and strand laws with damage-based unloading.
//! - [`section`]: cross-section profiles, reinforcement rows and beam definitions.
//! - [`sectional`]: fiber-section equilibrium, moment–curvature sweeps and the
//!   closed-form localization and ultimate moments.
//! - [`design`]: the ω failure-mode classifier, threshold reinforcing ratio,
//!   reinforcement proportioning and displacement ductility.
//! - [`sim`]: displacement-controlled four-point-bending simulation with a
//!   weakened midspan band.
//! - [`bench`]: beam database ingestion, batch validation and parametric sweeps.

pub mod bench;
pub mod design;
pub mod error;
pub mod materials;
pub mod roots;
pub mod section;
pub mod sectional;
pub mod sim;

pub use error::{Error, Result};
