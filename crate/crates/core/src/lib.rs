//! Finite-difference simulation of an attraction-repulsion chemotaxis system
//! with a nonlocal logistic source and power-law signal production.

pub mod config;
pub mod diagnostics;
pub mod error;
pub mod grid;
pub mod io;
pub mod mms;
pub mod model;
pub mod power;
pub mod scenarios;
pub mod stepper;
pub mod sweep;
pub mod verify;

pub use error::{Error, ImaginaryState, Result};
pub use grid::{chemo_divergence, integrate, laplacian, Field, Grid};
pub use model::{mass_envelope_check, nonlocal_source, production, theorem1_predicate, MassEnvelope, ModelParams};
pub use stepper::{Event, EventKind, SimState, StepPolicy, Stepper};
