use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::schemes::{DynamicsSpec, Potential, PotentialField};

type Eval = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// A named test function `φ(q, p)`.
#[derive(Clone)]
pub struct ObservableSpec {
    pub name: String,
    eval: Arc<Eval>,
}

impl ObservableSpec {
    pub fn new(name: impl Into<String>, f: impl Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static) -> Self {
        Self { name: name.into(), eval: Arc::new(f) }
    }

    #[inline]
    pub fn eval(&self, q: &[f64], p: &[f64]) -> f64 {
        (self.eval)(q, p)
    }
}

impl fmt::Debug for ObservableSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ObservableSpec({})", self.name)
    }
}

/// Observables that can be named in a config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum ObservableKind {
    Constant { value: f64 },
    /// `|q|²`.
    SquaredNorm,
    /// `|q|²/2`.
    HalfSquaredNorm,
    /// `q[index]`.
    Coordinate { index: usize },
    /// The potential of the simulated dynamics.
    Potential,
    /// `U(q) + |p|²/2`.
    Energy,
    /// `exp(−β(|p|²/2 + U(q)))`.
    GibbsWeight { beta: f64 },
}

fn sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

impl ObservableKind {
    /// Binds the observable to the potential of `dynamics` where needed.
    pub fn build(&self, dynamics: &DynamicsSpec) -> ObservableSpec {
        let u: Potential = dynamics.potential().cloned().unwrap_or(Potential::Zero);
        match *self {
            ObservableKind::Constant { value } => ObservableSpec::new("constant", move |_, _| value),
            ObservableKind::SquaredNorm => ObservableSpec::new("squared_norm", |q, _| sq(q)),
            ObservableKind::HalfSquaredNorm => ObservableSpec::new("half_squared_norm", |q, _| 0.5 * sq(q)),
            ObservableKind::Coordinate { index } => {
                ObservableSpec::new(format!("q{index}"), move |q, _| q[index])
            }
            ObservableKind::Potential => ObservableSpec::new("potential", move |q, _| u.value(q)),
            ObservableKind::Energy => ObservableSpec::new("energy", move |q, p| u.value(q) + 0.5 * sq(p)),
            ObservableKind::GibbsWeight { beta } => {
                ObservableSpec::new("gibbs_weight", move |q, p| (-beta * (0.5 * sq(p) + u.value(q))).exp())
            }
        }
    }
}
