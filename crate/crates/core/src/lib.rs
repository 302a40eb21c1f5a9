//! Loss of atoms from a single-mode matter-wave cavity into a 1-D continuum:
//! exact memory-kernel dynamics compared against the Born-Markov and
//! Born-only master equations, plus a position-space model with gravity and
//! mean-field interactions.
//!
//! The crate is organised around the reservoir correlation function
//! ([`model::KernelSpec`]): the exact decay amplitude solves a Volterra
//! equation driven by it ([`exact`]), the master-equation moments replace it
//! by its integral or keep only its real part ([`master`]), the timescale
//! report quantifies when those replacements are justified ([`timescales`]),
//! and the spatial model re-derives the same physics in the position basis
//! with gravity and interactions added ([`spatial`]). The [`scenario`]
//! module reproduces the reference figures as CSV.

pub mod cubic;
pub mod error;
pub mod exact;
pub mod master;
pub mod model;
pub mod quadrature;
pub mod scenario;
pub mod series;
pub mod spatial;
pub mod special;
pub mod timescales;
pub mod volterra;

pub use error::{Error, Result};
pub use exact::{AmplitudeTrajectory, TimeGrid};
pub use model::{CouplingSpec, Dispersion, KernelSpec, PhysicalConstants, SystemParams};
pub use series::SeriesTable;
pub use timescales::TimescaleReport;
