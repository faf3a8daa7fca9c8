//! Named, fully specified studies.

use serde::Serialize;

use super::{disk_exponential_moment, funnel_mean_potential, gibbs_average, unstable_ou_u, ObservableKind};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::harness::{EnergyDriftConfig, InitialCondition, MomentumInit, PositionInit, Reference, SimulationConfig};
use crate::schemes::{DynamicsSpec, Potential, SchemeId};
use crate::sir::SirConfig;
use crate::study::{ConvergenceSpec, EnergyDriftSpec, JacobianSpec, Study, TauSpec};

/// One row of [`list_presets`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PresetInfo {
    pub name: &'static str,
    pub description: &'static str,
    /// The experiment the preset reproduces.
    pub anchor: &'static str,
}

const PRESETS: [PresetInfo; 10] = [
    PresetInfo {
        name: "exp1",
        description: "anti-damped OU in the disk of radius 2, finite-time weight at T=4",
        anchor: "finite-time weak order, exact backward solution",
    },
    PresetInfo {
        name: "exp2",
        description: "harmonic potential on (1, inf), ergodic mean of q^2/2",
        anchor: "ergodic limit on a half-line",
    },
    PresetInfo {
        name: "exp3",
        description: "coupled quartic double well in the disk of radius 2, ergodic mean of U",
        anchor: "ergodic limit, two-dimensional double well",
    },
    PresetInfo {
        name: "exp4",
        description: "repulsive quadratic U=-5|q|^2 in the disk of radius 2, ergodic mean of |q|^2",
        anchor: "ergodic limit concentrated on the boundary",
    },
    PresetInfo {
        name: "exp5",
        description: "nine-dimensional funnel with the neck coordinate confined to (-3, 1)",
        anchor: "ergodic limit, funnel distribution",
    },
    PresetInfo {
        name: "tau-stats",
        description: "first in-step collision times for U=q^2/2 on (0, inf)",
        anchor: "collision-time moments",
    },
    PresetInfo {
        name: "hamiltonian-fixed",
        description: "Verlet energy drift in the unit square from a fixed momentum",
        anchor: "energy drift with boundary, deterministic start",
    },
    PresetInfo {
        name: "hamiltonian-random",
        description: "Verlet energy drift in the unit square from Gaussian momenta",
        anchor: "energy drift with boundary, random start",
    },
    PresetInfo {
        name: "sir",
        description: "posterior sampling of SIR infection and recovery rates",
        anchor: "Bayesian SIR inference",
    },
    PresetInfo {
        name: "jacobian-check",
        description: "finite-difference Jacobian of one OBAcBO step on (0, inf)",
        anchor: "one-step Jacobian determinant and sign",
    },
];

pub fn presets() -> &'static [PresetInfo] {
    &PRESETS
}

/// Presets whose name contains `filter` (all when `None`).
pub fn list_presets(filter: Option<&str>) -> Vec<PresetInfo> {
    PRESETS.iter().filter(|p| filter.is_none_or(|f| p.name.contains(f))).cloned().collect()
}

fn sim(
    scheme: SchemeId,
    domain: Domain,
    dynamics: DynamicsSpec,
    t_final: f64,
    h: f64,
    m: usize,
    initial: InitialCondition,
) -> SimulationConfig {
    SimulationConfig {
        scheme,
        domain,
        dynamics,
        t_final,
        h,
        m,
        seed: 1,
        burn_in: 0.0,
        collisions: Default::default(),
        noise: Default::default(),
        initial,
    }
}

/// `h = 5/N` for about 200 log-spaced `N` between 100 and 100000.
pub fn dense_drift_steps() -> Vec<f64> {
    let mut n: Vec<u64> = (0..200).map(|k| (100.0 * 1000f64.powf(k as f64 / 199.0)).round() as u64).collect();
    n.dedup();
    n.into_iter().map(|n| 5.0 / n as f64).collect()
}

pub fn preset(name: &str) -> Result<Study> {
    let langevin = |u: Potential, gamma: f64| DynamicsSpec::langevin(u, gamma, 1.0);
    let start2 = || InitialCondition::fixed(vec![1.0, 1.0], vec![-0.1, -0.1]);
    Ok(match name {
        "exp1" => {
            let u = Potential::Quadratic { coef: -1.0 };
            let (alpha, beta, t) = (0.25, 1.0, 4.0);
            let dynamics = DynamicsSpec::UnstableOu { potential: u.clone(), alpha, sigma: (2.0 * alpha / beta).sqrt() };
            let exact = unstable_ou_u(0.0, &[1.0, 1.0], &[-0.1, -0.1], alpha, beta, &u, t);
            Study::Convergence(ConvergenceSpec {
                sim: sim(SchemeId::OBAcBO, Domain::ball(2.0, 2), dynamics, t, 0.01, 1_000_000, start2()),
                observable: ObservableKind::GibbsWeight { beta },
                reference: Reference::FiniteTime(exact),
                h_list: vec![0.08, 0.04, 0.02, 0.01],
            })
        }
        "exp2" => {
            let u = Potential::Quadratic { coef: 0.5 };
            let domain = Domain::half_line(1.0);
            let exact = gibbs_average(&u, 1.0, &domain, &|q| 0.5 * q[0] * q[0])?;
            Study::Convergence(ConvergenceSpec {
                sim: sim(
                    SchemeId::BAcOAcB,
                    domain,
                    langevin(u, 1.0),
                    20.0,
                    0.08,
                    1_000_000,
                    InitialCondition::fixed(vec![2.0], vec![-0.1]),
                ),
                observable: ObservableKind::HalfSquaredNorm,
                reference: Reference::Ergodic(exact),
                h_list: vec![0.5, 0.4, 0.2, 0.1, 0.08],
            })
        }
        "exp3" => {
            let u = Potential::CoupledQuartic;
            let domain = Domain::ball(2.0, 2);
            let exact = gibbs_average(&u, 1.0, &domain, &|q| u_value(&Potential::CoupledQuartic, q))?;
            Study::Convergence(ConvergenceSpec {
                sim: sim(SchemeId::OBAcBO, domain, DynamicsSpec::langevin(u, 4.0, 1.0), 12.0, 0.04, 1_000_000, start2()),
                observable: ObservableKind::Potential,
                reference: Reference::Ergodic(exact),
                h_list: vec![0.2, 0.1, 0.05, 0.04],
            })
        }
        "exp4" => Study::Convergence(ConvergenceSpec {
            sim: sim(
                SchemeId::OBAcBO,
                Domain::ball(2.0, 2),
                langevin(Potential::Quadratic { coef: -5.0 }, 1.0),
                20.0,
                0.004,
                100_000,
                InitialCondition::fixed(vec![0.0, 0.0], vec![-0.1, -0.1]),
            ),
            observable: ObservableKind::SquaredNorm,
            reference: Reference::Ergodic(disk_exponential_moment(5.0, 2.0)),
            h_list: vec![0.016, 0.008, 0.004],
        }),
        "exp5" => Study::Convergence(ConvergenceSpec {
            sim: sim(
                SchemeId::OBAcBO,
                Domain::Product { dim: 9, axis: 0, a: -3.0, b: 1.0 },
                langevin(Potential::Funnel, 1.0),
                60.0,
                0.05,
                100_000,
                InitialCondition::fixed(vec![0.0; 9], vec![0.0; 9]),
            ),
            observable: ObservableKind::Potential,
            reference: Reference::Ergodic(funnel_mean_potential()?),
            h_list: vec![0.2, 0.1, 0.05],
        }),
        "tau-stats" => Study::TauStats(TauSpec {
            sim: sim(
                SchemeId::OBAcBO,
                Domain::half_line(0.0),
                langevin(Potential::Quadratic { coef: 0.5 }, 1.0),
                8.0,
                0.01,
                1_200_000,
                InitialCondition { q: PositionInit::HalfNormal { lo: 0.0, scale: 0.1 }, p: MomentumInit::Gaussian { std: 1.0 } },
            ),
            h_list: vec![],
        }),
        "hamiltonian-fixed" => Study::EnergyDrift(EnergyDriftSpec {
            config: EnergyDriftConfig {
                potential: Potential::Quadratic { coef: 0.5 },
                domain: Some(Domain::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] }),
                initial: InitialCondition::fixed(vec![0.1, 0.5], vec![1.5, 1.5]),
                t_final: 5.0,
                m: 1,
                seed: 1,
                collisions: Default::default(),
            },
            h_list: dense_drift_steps(),
        }),
        "hamiltonian-random" => Study::EnergyDrift(EnergyDriftSpec {
            config: EnergyDriftConfig {
                potential: Potential::Quadratic { coef: 0.5 },
                domain: Some(Domain::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] }),
                initial: InitialCondition {
                    q: PositionInit::Fixed { value: vec![0.1, 0.5] },
                    p: MomentumInit::Gaussian { std: 1.0 },
                },
                t_final: 1.0,
                m: 100_000,
                seed: 1,
                collisions: Default::default(),
            },
            h_list: vec![0.25, 0.125, 0.0625],
        }),
        "sir" => Study::Sir(SirConfig::new(SchemeId::BAcOAcB, 0.001, 100.0, 1)),
        "jacobian-check" => Study::Jacobian(JacobianSpec {
            potential: Potential::Quadratic { coef: 0.5 },
            gamma: 1.0,
            beta: 1.0,
            h: 0.1,
            samples: 100,
            seed: 1,
        }),
        other => return Err(Error::UnknownPreset(other.to_string())),
    })
}

fn u_value(u: &Potential, q: &[f64]) -> f64 {
    use crate::schemes::PotentialField;
    u.value(q)
}
