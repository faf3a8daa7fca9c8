use confined_langevin::harness::{fit_slope, run_time_average, InitialCondition, SimulationConfig};
use confined_langevin::models::registry::preset;
use confined_langevin::models::{gibbs_average, ObservableKind};
use confined_langevin::schemes::{o_step, trajectory_rng};
use confined_langevin::study::{Outcome, Study};
use confined_langevin::{Domain, DynamicsSpec, Error, Potential, SchemeId};
use rand::Rng;
use rand_distr::StandardNormal;

#[test]
fn exact_ou_step_moments() {
    let (h, p0) = (0.1, 1.0);
    let (gamma, sigma) = (1.0f64, 2f64.sqrt());
    let mean = p0 * (-gamma * h).exp();
    let var = -(-2.0 * gamma * h).exp_m1();
    let n = 10_000_000usize;
    let mut rng = trajectory_rng(99, 0);
    let (mut s1, mut s2) = (0.0, 0.0);
    for _ in 0..n {
        let xi: f64 = rng.sample(StandardNormal);
        let p = o_step(&[p0], h, -gamma, sigma, &[xi])[0];
        s1 += p;
        s2 += (p - mean) * (p - mean);
    }
    let m = s1 / n as f64;
    let v = s2 / n as f64;
    assert!((m - mean).abs() < 3.0 * (var / n as f64).sqrt(), "mean {m} vs {mean}");
    // Var of the sample variance of a Gaussian is 2σ⁴/n.
    assert!((v - var).abs() < 3.0 * var * (2.0 / n as f64).sqrt(), "var {v} vs {var}");
    let unit = o_step(&[p0], h, -gamma, sigma, &[1.0])[0];
    assert!((unit - (mean + var.sqrt())).abs() < 1e-15);
    assert!((unit - 1.3305946).abs() < 1e-7);
}

#[test]
fn finite_time_error_small_at_fine_step() {
    let Study::Convergence(mut c) = preset("exp1").unwrap() else { unreachable!() };
    c.sim.h = 0.01;
    c.h_list = vec![0.01];
    let out = Study::Convergence(c).run().unwrap();
    let Outcome::Estimates(rows) = out else { unreachable!() };
    let r = &rows[0];
    assert_eq!(r.total, 1_000_000);
    assert!(r.error.unwrap().abs() < 3.0 * r.half_width + 0.002, "{r:?}");
}

#[test]
fn long_trajectory_time_average_matches_gibbs() {
    let u = Potential::Quadratic { coef: 0.5 };
    let domain = Domain::half_line(1.0);
    let exact = gibbs_average(&u, 1.0, &domain, &|q| 0.5 * q[0] * q[0]).unwrap();
    let sim = SimulationConfig {
        scheme: SchemeId::BAcOAcB,
        domain,
        dynamics: DynamicsSpec::langevin(u, 1.0, 1.0),
        t_final: 2000.0,
        h: 0.05,
        m: 1,
        seed: 4,
        burn_in: 20.0,
        collisions: Default::default(),
        noise: Default::default(),
        initial: InitialCondition::fixed(vec![2.0], vec![-0.1]),
    };
    let phi = ObservableKind::HalfSquaredNorm.build(&sim.dynamics);
    let r = run_time_average(&sim, &phi, None).unwrap();
    assert!((r.report.mean - exact).abs() < 0.02, "{} vs {exact}", r.report.mean);
    assert!((exact - 1.2626).abs() < 5e-5);
}

#[test]
fn noise_only_errors_are_underpowered() {
    // An exact "scheme": every error sits inside its half-width.
    let pts = [(0.1, 1e-4, 1e-3), (0.05, -2e-4, 1e-3), (0.025, 5e-5, 1e-3)];
    assert!(matches!(fit_slope(&pts), Err(Error::Underpowered { usable: 0, total: 3 })));
}
