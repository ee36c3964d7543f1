//! Analysis toolkit for a three-variable ODE model coupling available land,
//! bushfire intensity and prescribed burning.
//!
//! - [`model`]: parameters, vector field, equilibrium and viability window
//! - [`cubic`]: monic cubics, discriminant, classified roots
//! - [`stability`]: Jacobian, characteristic cubic, reactive / proactive
//!   classification and the critical proactive strength
//! - [`feedback`]: Schur-coordinate dynamic feedback for the reactive regime
//! - [`simulate`]: integrators, boundary events, ensembles, streamlines
//! - [`atlas`]: parameter sweeps, Hopf-boundary search, discriminant witnesses
//! - [`io`]: CSV encodings

pub mod atlas;
pub mod cubic;
pub mod feedback;
pub mod io;
pub mod model;
pub mod simulate;
pub mod stability;

pub use model::{
    equilibrium, feasibility, vector_field, Equilibrium, FeasibilityReport, Params, State,
};
pub use stability::{classify, critical_theta, Regime, StabilityVerdict};
