//! Concrete test problems: observables, exact reference values and the named
//! experiment presets.

mod observables;
mod oracles;
pub mod quadrature;
pub mod registry;

pub use observables::{ObservableKind, ObservableSpec};
pub use oracles::{
    damped_oscillator_u, disk_exponential_moment, fp_image_density, funnel_mean_potential, gibbs_average,
    inverse_drift_u, rational_drift_u, unstable_ou_u,
};
