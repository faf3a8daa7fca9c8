use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A potential energy `U` with its gradient.
pub trait PotentialField: Send + Sync {
    fn value(&self, q: &[f64]) -> f64;
    fn gradient(&self, q: &[f64], out: &mut [f64]);
}

/// A momentum drift `b(q, p)`.
pub trait DriftField: Send + Sync {
    fn drift(&self, q: &[f64], p: &[f64], out: &mut [f64]);
}

/// Built-in potentials, selectable by name in config files.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum Potential {
    Zero,
    /// `coef·|q|²`.
    Quadratic { coef: f64 },
    /// Planar double well `½(q₁−q₂)² + q₁²(q₁²−12)/12 + q₂²(q₂²−24)/12`.
    CoupledQuartic,
    /// Neal-type funnel `θ²/18 + 4θ + ½e^{−θ}Σxᵢ²` with `θ = q[0]`, `x = q[1..]`.
    Funnel,
    #[serde(skip)]
    Custom(Arc<dyn PotentialField>),
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Potential::Zero => write!(f, "Zero"),
            Potential::Quadratic { coef } => write!(f, "Quadratic {{ coef: {coef} }}"),
            Potential::CoupledQuartic => write!(f, "CoupledQuartic"),
            Potential::Funnel => write!(f, "Funnel"),
            Potential::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl PotentialField for Potential {
    fn value(&self, q: &[f64]) -> f64 {
        match self {
            Potential::Zero => 0.0,
            Potential::Quadratic { coef } => coef * q.iter().map(|x| x * x).sum::<f64>(),
            Potential::CoupledQuartic => {
                let (a, b) = (q[0], q[1]);
                0.5 * (a - b).powi(2) + a * a * (a * a - 12.0) / 12.0 + b * b * (b * b - 24.0) / 12.0
            }
            Potential::Funnel => {
                let t = q[0];
                let x2: f64 = q[1..].iter().map(|x| x * x).sum();
                t * t / 18.0 + 4.0 * t + 0.5 * (-t).exp() * x2
            }
            Potential::Custom(u) => u.value(q),
        }
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        match self {
            Potential::Zero => out.iter_mut().for_each(|g| *g = 0.0),
            Potential::Quadratic { coef } => {
                out.iter_mut().zip(q).for_each(|(g, x)| *g = 2.0 * coef * x);
            }
            Potential::CoupledQuartic => {
                let (a, b) = (q[0], q[1]);
                out[0] = (a - b) + a * a * a / 3.0 - 2.0 * a;
                out[1] = (b - a) + b * b * b / 3.0 - 4.0 * b;
            }
            Potential::Funnel => {
                let t = q[0];
                let w = (-t).exp();
                let x2: f64 = q[1..].iter().map(|x| x * x).sum();
                out[0] = t / 9.0 + 4.0 - 0.5 * w * x2;
                for i in 1..q.len() {
                    out[i] = w * q[i];
                }
            }
            Potential::Custom(u) => u.gradient(q, out),
        }
    }
}

/// Built-in general drifts for the first-order schemes.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case")]
pub enum DriftForm {
    Zero,
    /// `b = 1/(q+c) + p` on the half-line.
    ShiftedInverse { c: f64 },
    /// `b = −(q·cos|q|² + 2(d+2)p) / (2|p|² + 1)`.
    RationalDamping,
    /// `b = −p`.
    LinearDamping,
    #[serde(skip)]
    Custom(Arc<dyn DriftField>),
}

impl fmt::Debug for DriftForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DriftForm::Zero => write!(f, "Zero"),
            DriftForm::ShiftedInverse { c } => write!(f, "ShiftedInverse {{ c: {c} }}"),
            DriftForm::RationalDamping => write!(f, "RationalDamping"),
            DriftForm::LinearDamping => write!(f, "LinearDamping"),
            DriftForm::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl DriftField for DriftForm {
    fn drift(&self, q: &[f64], p: &[f64], out: &mut [f64]) {
        match self {
            DriftForm::Zero => out.iter_mut().for_each(|b| *b = 0.0),
            DriftForm::ShiftedInverse { c } => {
                for i in 0..out.len() {
                    out[i] = 1.0 / (q[i] + c) + p[i];
                }
            }
            DriftForm::RationalDamping => {
                let d = q.len() as f64;
                let q2: f64 = q.iter().map(|x| x * x).sum();
                let p2: f64 = p.iter().map(|x| x * x).sum();
                let (cq, den) = (q2.cos(), 2.0 * p2 + 1.0);
                for i in 0..out.len() {
                    out[i] = -(q[i] * cq + 2.0 * (d + 2.0) * p[i]) / den;
                }
            }
            DriftForm::LinearDamping => out.iter_mut().zip(p).for_each(|(b, pi)| *b = -pi),
            DriftForm::Custom(b) => b.drift(q, p, out),
        }
    }
}

/// The SDE being integrated: `dQ = P dt`, `dP = b(Q,P) dt + σ dW`, with
/// specular reflection at the boundary.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DynamicsSpec {
    /// Arbitrary drift; only the Euler-momentum schemes apply.
    General { drift: DriftForm, sigma: f64 },
    /// `b = −∇U − γp`, `σ = √(2γ/β)`.
    Langevin { potential: Potential, gamma: f64, beta: f64 },
    /// `b = −∇U + αp` with explicit `σ`.
    UnstableOu { potential: Potential, alpha: f64, sigma: f64 },
}

impl DynamicsSpec {
    pub fn langevin(potential: Potential, gamma: f64, beta: f64) -> Self {
        DynamicsSpec::Langevin { potential, gamma, beta }
    }

    pub fn sigma(&self) -> f64 {
        match self {
            DynamicsSpec::General { sigma, .. } | DynamicsSpec::UnstableOu { sigma, .. } => *sigma,
            DynamicsSpec::Langevin { gamma, beta, .. } => (2.0 * gamma / beta).sqrt(),
        }
    }

    /// Coefficient `a` of the linear momentum term `a·p` (`−γ` or `+α`).
    pub fn linear_rate(&self) -> Option<f64> {
        match self {
            DynamicsSpec::General { .. } => None,
            DynamicsSpec::Langevin { gamma, .. } => Some(-gamma),
            DynamicsSpec::UnstableOu { alpha, .. } => Some(*alpha),
        }
    }

    pub fn potential(&self) -> Option<&Potential> {
        match self {
            DynamicsSpec::General { .. } => None,
            DynamicsSpec::Langevin { potential, .. } | DynamicsSpec::UnstableOu { potential, .. } => {
                Some(potential)
            }
        }
    }

    /// Full drift `b(q, p)`.
    pub fn drift(&self, q: &[f64], p: &[f64], out: &mut [f64]) {
        match self {
            DynamicsSpec::General { drift, .. } => drift.drift(q, p, out),
            _ => {
                let a = self.linear_rate().unwrap_or(0.0);
                if let Some(u) = self.potential() {
                    u.gradient(q, out);
                }
                out.iter_mut().zip(p).for_each(|(b, pi)| *b = -*b + a * pi);
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::Config(m.to_string()));
        match self {
            DynamicsSpec::General { sigma, .. } | DynamicsSpec::UnstableOu { sigma, .. }
                if !(sigma.is_finite() && *sigma >= 0.0) =>
            {
                bad("sigma must be finite and non-negative")
            }
            DynamicsSpec::UnstableOu { alpha, .. } if !alpha.is_finite() => bad("alpha must be finite"),
            DynamicsSpec::Langevin { gamma, beta, .. } => {
                if !(gamma.is_finite() && *gamma >= 0.0) {
                    bad("gamma must be finite and non-negative")
                } else if !(beta.is_finite() && *beta > 0.0) {
                    bad("beta must be positive")
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(u: &Potential, q: &[f64]) {
        let mut g = vec![0.0; q.len()];
        u.gradient(q, &mut g);
        for i in 0..q.len() {
            let (mut a, mut b) = (q.to_vec(), q.to_vec());
            a[i] += 1e-6;
            b[i] -= 1e-6;
            let fd = (u.value(&a) - u.value(&b)) / 2e-6;
            assert!((fd - g[i]).abs() < 1e-6 * (1.0 + g[i].abs()), "{u:?} axis {i}: {fd} vs {}", g[i]);
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        fd_check(&Potential::Quadratic { coef: -5.0 }, &[0.3, -1.2]);
        fd_check(&Potential::CoupledQuartic, &[1.0, -0.7]);
        fd_check(&Potential::Funnel, &[-0.4, 0.1, 0.2, -0.3, 0.5, 0.0, 1.0, -1.0, 0.25]);
    }

    #[test]
    fn langevin_noise_amplitude() {
        let d = DynamicsSpec::langevin(Potential::Zero, 1.0, 1.0);
        assert_eq!(d.sigma(), 2f64.sqrt());
        assert_eq!(d.linear_rate(), Some(-1.0));
    }

    #[test]
    fn composed_drift() {
        let d = DynamicsSpec::UnstableOu { potential: Potential::Quadratic { coef: -1.0 }, alpha: 0.25, sigma: 0.5f64.sqrt() };
        let mut b = [0.0; 2];
        d.drift(&[1.0, 1.0], &[-0.1, -0.1], &mut b);
        assert!((b[0] - (2.0 - 0.025)).abs() < 1e-15);
    }

    #[test]
    fn config_schema() {
        let d: DynamicsSpec = serde_json::from_str(
            r#"{"kind": "langevin", "potential": {"form": "quadratic", "coef": 0.5}, "gamma": 1.0, "beta": 1.0}"#,
        )
        .unwrap();
        assert!(matches!(d, DynamicsSpec::Langevin { gamma, .. } if gamma == 1.0));
        assert!(DynamicsSpec::langevin(Potential::Zero, -1.0, 1.0).validate().is_err());
    }
}
