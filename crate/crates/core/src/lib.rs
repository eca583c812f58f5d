//! Analysis and simulation toolkit for one-degree-of-freedom series elastic
//! actuators (SEAs).
//!
//! The crate builds rendered-stiffness and interaction-impedance transfer
//! functions for any mix of transmission compliance and linear control,
//! certifies passivity of the interaction port (numerically and through
//! closed-form per-configuration conditions), and simulates step responses
//! against a pure-mass load.
//!
//! Modules, bottom-up:
//!
//! * [`lti`] — polynomials, rational transfer functions, Routh–Hurwitz,
//!   root isolation.
//! * [`model`] — physical parameters, controllers, presets, and transfer
//!   function construction.
//! * [`passivity`] — positive-real test, closed-form catalog, maximum
//!   passive gain search.
//! * [`sim`] — fixed-step RK4 simulation and step-response metrics.
//! * [`experiments`] — gain sweeps, tuning, and the scripted reproductions.

pub mod experiments;
pub mod lti;
pub mod model;
pub mod passivity;
pub mod sim;

pub use lti::{LtiError, Polynomial, RationalTF};
pub use model::{
    impedance_tf, stiffness_tf, ComplianceElement, LinearController, ModelError, ParamPath,
    PresetId, SeaConfig,
};
pub use passivity::{check_positive_real, ClosedFormVerdict, PassivityVerdict};
pub use sim::{Metrics, PlantState, SimError, SimScenario, Trajectory};

/// Crate version, recorded in report provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
