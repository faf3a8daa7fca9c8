//! Weak-sense integrators for underdamped Langevin dynamics confined to a
//! domain by specular reflection, with exact reference solutions and a
//! Monte Carlo harness for measuring convergence order.

pub mod error;
pub mod geometry;
pub mod harness;
pub mod models;
pub mod schemes;
pub mod sir;
pub mod study;

pub use error::{Error, Result};
pub use geometry::{reflect, Domain, RayHit};
pub use schemes::{
    CollisionLimit, DynamicsSpec, Integrator, NoiseLaw, PhaseState, Potential, SchemeId, StepOutcome,
};
