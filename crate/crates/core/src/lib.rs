//! Classical and quantum generalized Kepler-map dynamics of light dark-matter
//! particles (DMP) in rotating binary systems.
//!
//! The crate is organized around the map description of a test particle that
//! receives one energy kick per perihelion passage from the binary's rotating
//! companion:
//!
//! - [`binary`]: physical constants, binary presets, and every derived scale
//!   (dimensionless kick, chaos border, dark-matter-atom units, quantum kick
//!   strength `k`, photon numbers).
//! - [`classical`]: the dimensionless symplectic map, ensemble Monte Carlo,
//!   diffusion and escape-time measurement, Poincaré sections.
//! - [`quantum`]: unitary evolution on a photon lattice with continuum
//!   absorption, steady-state distributions, and localization-length fitting.
//! - [`regime`]: analytic regime classification, localization lengths,
//!   piecewise ionization lifetimes, and the summary table generators.
//! - [`capture`]: capture cross-section, quantum energy border, Maxwell-flow
//!   captured-mass estimate, halo extent.
//! - [`io`] / [`checkpoint`]: deterministic table emission and resumable
//!   binary checkpoints.
//!
//! All classical dynamics use the dimensionless energy `w = 2E/(m_d v_p^2)`;
//! bound states have `w < 0` and escape happens at `w >= 0`. Conversions to
//! years and grams happen only at the reporting edge.

pub mod bessel;
pub mod binary;
pub mod capture;
pub mod checkpoint;
pub mod classical;
pub mod constants;
pub mod error;
pub mod io;
pub mod quantum;
pub mod regime;

pub use binary::{AtomicScales, BinarySystem, DmpSpec, Harmonic};
pub use constants::PhysicalConstants;
pub use error::{Error, Result};
