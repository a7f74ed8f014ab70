//! Steady-state and collisional simulation of a three-level autonomous
//! thermal machine whose three reservoirs are streams of qubit units that
//! may carry a small amount of coherence.
//!
//! The crate is organised bottom-up:
//!
//! - [`linalg`]: dense complex matrices (Kronecker products, exponentials,
//!   logarithms, null vectors).
//! - [`model`]: parameters, Hamiltonians, reservoir unit states and rates.
//! - [`lindblad`]: continuous-limit generator, steady state and integration.
//! - [`collision`]: exact repeated-interaction map with per-collision
//!   energetic and entropic bookkeeping.
//! - [`thermo`]: steady heat currents, coherent powers, entropy production.
//! - [`regimes`]: thermal closed forms, operating-regime classification and
//!   coherent transition curves.
//! - [`efficiency`]: the free-energy based multi-task efficiency and its
//!   regime-specific forms.
//! - [`sweep`]: parameter grids, regime diagrams and power/efficiency curves.

pub mod collision;
pub mod efficiency;
mod error;
pub mod linalg;
pub mod lindblad;
pub mod model;
pub mod regimes;
pub mod sweep;
pub mod thermo;

pub use error::{Error, Result};
pub use lindblad::{solve_ness, DensityMatrix, Superoperator};
pub use model::{Bath, MachineParams};
pub use regimes::Regime;
pub use thermo::{currents_report, steady_currents, CurrentsReport};
