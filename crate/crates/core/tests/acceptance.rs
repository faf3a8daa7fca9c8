//! End-to-end acceptance run. Prints one line per criterion and exits
//! non-zero if any fails.

use std::process::ExitCode;
use std::time::Instant;

use confined_langevin::harness::{
    self, simulate, with_threads, EnergyDriftConfig, InitialCondition, Reference, SimulationConfig,
};
use confined_langevin::models::quadrature::integrate_2d;
use confined_langevin::models::registry::preset;
use confined_langevin::models::{disk_exponential_moment, fp_image_density, unstable_ou_u, ObservableKind};
use confined_langevin::schemes::{step, trajectory_rng, PotentialField, RandomNoise};
use confined_langevin::sir::{run_sir_inference, SirConfig};
use confined_langevin::study::{jacobian_check, Study};
use confined_langevin::{reflect, Domain, DynamicsSpec, Potential, SchemeId};
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

struct Tally {
    failed: usize,
    total: usize,
}

impl Tally {
    fn check(&mut self, id: &str, pass: bool, detail: String) {
        self.total += 1;
        if !pass {
            self.failed += 1;
        }
        println!("[{}] {id}: {detail}", if pass { "PASS" } else { "FAIL" });
    }

    fn error(&mut self, id: &str, e: impl std::fmt::Display) {
        self.check(id, false, format!("error: {e}"));
    }
}

fn convergence(name: &str) -> confined_langevin::study::ConvergenceSpec {
    match preset(name).expect("preset exists") {
        Study::Convergence(c) => c,
        other => panic!("{name} is a {} study", other.kind()),
    }
}

fn within(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn criterion_1(t: &mut Tally) {
    let u = Potential::Quadratic { coef: -1.0 };
    let v = unstable_ou_u(0.0, &[1.0, 1.0], &[-0.1, -0.1], 0.25, 1.0, &u, 4.0);
    t.check("1 finite-time oracle", (v - 0.99005).abs() <= 5e-6, format!("u = {v:.8}, target 0.99005 ± 5e-6"));
}

fn criteria_2_3(t: &mut Tally) {
    let spec = convergence("exp1");
    let phi = spec.observable.build(&spec.sim.dynamics);
    for (scheme, lo, hi) in [(SchemeId::OBAcBO, 1.7, 2.3), (SchemeId::BAcOAcB, 1.7, 2.3), (SchemeId::PAc, 0.8, 1.6)] {
        let sim = SimulationConfig { scheme, ..spec.sim.clone() };
        let id = format!("2 finite-time order {}", scheme.short_name());
        match harness::convergence_study(&sim, &spec.h_list, &phi, spec.reference) {
            Ok(r) => {
                let errs: Vec<String> = r.rows.iter().map(|x| format!("{:.2e}", x.error.unwrap_or(f64::NAN))).collect();
                t.check(
                    &id,
                    within(r.slope, lo, hi),
                    format!("slope {:.3} from {} points in [{lo}, {hi}]; errors {}", r.slope, r.used, errs.join(" ")),
                );
                let c: Vec<f64> = r.rows.iter().map(|x| x.mean_collisions).collect();
                let (mn, mx) = c.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &x| (a.0.min(x), a.1.max(x)));
                let mean = c.iter().sum::<f64>() / c.len() as f64;
                t.check(
                    &format!("3 collision counts {}", scheme.short_name()),
                    mn >= 3.4 && mx <= 4.0 && (mx - mn) / mean < 0.05,
                    format!("mean collisions {mn:.3}..{mx:.3}, spread {:.2}% (< 5%)", 100.0 * (mx - mn) / mean),
                );
            }
            Err(e) => t.error(&id, e),
        }
    }
}

fn ergodic_at(spec: &confined_langevin::study::ConvergenceSpec, h: f64) -> confined_langevin::Result<harness::EstimatorReport> {
    let phi = spec.observable.build(&spec.sim.dynamics);
    harness::estimate(&spec.sim.with_h(h), &phi, spec.reference)
}

fn criterion_4(t: &mut Tally) {
    let exp2 = convergence("exp2");
    let Reference::Ergodic(r2) = exp2.reference else { unreachable!() };
    t.check("4 half-line Gibbs reference", (r2 - 1.2626).abs() < 5e-5, format!("{r2:.8} vs 1.2626"));
    match ergodic_at(&exp2, 0.08) {
        Ok(r) => {
            let e = r.error.unwrap();
            t.check("4 half-line BAcOAcB h=0.08", e.abs() < 0.01, format!("error {e:.5} ± {:.5} (< 0.01)", r.half_width))
        }
        Err(e) => t.error("4 half-line BAcOAcB h=0.08", e),
    }

    let closed = (19.0 * 20f64.exp() + 1.0) / (5.0 * 20f64.exp_m1());
    let m = disk_exponential_moment(5.0, 2.0);
    t.check(
        "4 disk moment reference",
        (m - closed).abs() < 1e-12 && (m - 3.8).abs() < 5e-5,
        format!("{m:.10} vs closed form {closed:.10}"),
    );
    let exp4 = convergence("exp4");
    let phi = exp4.observable.build(&exp4.sim.dynamics);
    match harness::convergence_study(&exp4.sim, &exp4.h_list, &phi, exp4.reference) {
        Ok(r) => {
            let last = r.rows.iter().find(|x| x.h == 0.004).expect("h=0.004 in sweep");
            let e = last.error.unwrap();
            t.check("4 disk h=0.004", e.abs() < 0.01, format!("error {e:.5} ± {:.5} (< 0.01)", last.half_width));
            t.check("4 disk slope", within(r.slope, 1.6, 2.4), format!("slope {:.3} ± {:.3} in [1.6, 2.4]", r.slope, r.slope_ci.unwrap_or(f64::NAN)));
        }
        Err(e) => t.error("4 disk sweep", e),
    }

    let exp3 = convergence("exp3");
    let Reference::Ergodic(r3) = exp3.reference else { unreachable!() };
    let u = Potential::CoupledQuartic;
    // Polar coordinates, independent of the Cartesian quadrature behind the preset.
    let w = |r: f64, th: f64| {
        let q = [r * th.cos(), r * th.sin()];
        r * (-(u.value(&q) + 5.0)).exp()
    };
    let tau = 2.0 * std::f64::consts::PI;
    let polar = integrate_2d(|r, th| w(r, th) * u.value(&[r * th.cos(), r * th.sin()]), 0.0, 2.0, |_| 0.0, |_| tau, 1e-10)
        .and_then(|num| integrate_2d(w, 0.0, 2.0, |_| 0.0, |_| tau, 1e-10).map(|z| num / z));
    match polar {
        Ok(p) => t.check(
            "4 double-well reference",
            (p - r3).abs() < 1e-6 && (r3 + 4.18006).abs() < 1e-6,
            format!("cartesian {r3:.9}, polar {p:.9}, target -4.18006"),
        ),
        Err(e) => t.error("4 double-well reference", e),
    }
    match ergodic_at(&exp3, 0.04) {
        Ok(r) => {
            let e = r.error.unwrap();
            t.check("4 double-well OBAcBO h=0.04", e.abs() < 0.015, format!("error {e:.5} ± {:.5} (< 0.015)", r.half_width))
        }
        Err(e) => t.error("4 double-well OBAcBO h=0.04", e),
    }
}

fn criterion_5(t: &mut Tally) {
    let Study::TauStats(spec) = preset("tau-stats").unwrap() else { unreachable!() };
    match harness::tau_sweep(&spec.sim, &[0.04, 0.02, 0.01, 0.005]) {
        Ok(s) => {
            let l2: Vec<f64> = s.rows.iter().map(|r| r.lambda2).collect();
            let (mn, mx) = l2.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &x| (a.0.min(x), a.1.max(x)));
            let mean = l2.iter().sum::<f64>() / l2.len() as f64;
            let fewest = s.rows.iter().map(|r| r.count).min().unwrap_or(0);
            t.check("5 first-collision events", fewest >= 1_000_000, format!("fewest {fewest} per step size (≥ 1e6)"));
            t.check("5 lambda1 slope", within(s.lambda1_slope, 1.6, 2.4), format!("slope {:.3} in [1.6, 2.4]", s.lambda1_slope));
            t.check(
                "5 lambda2 constant",
                (mx - mn) / mean < 0.05,
                format!("lambda2 {mn:.4}..{mx:.4}, spread {:.2}% (< 5%)", 100.0 * (mx - mn) / mean),
            );
        }
        Err(e) => t.error("5 tau sweep", e),
    }
}

fn drift(t: &mut Tally, id: &str, cfg: &EnergyDriftConfig, hs: &[f64], target: f64) {
    match harness::energy_drift_study(cfg, hs) {
        Ok(r) => t.check(id, (r.slope - target).abs() <= 0.3, format!("slope {:.3} from {} step sizes, target {target} ± 0.3", r.slope, r.used)),
        Err(e) => t.error(id, e),
    }
}

fn criterion_6(t: &mut Tally) {
    let Study::EnergyDrift(fixed) = preset("hamiltonian-fixed").unwrap() else { unreachable!() };
    let free = EnergyDriftConfig { domain: None, ..fixed.config.clone() };
    drift(t, "6 energy drift, no boundary", &free, &[0.1, 0.05, 0.025, 0.0125], 2.0);
    drift(t, "6 energy drift, box, fixed momentum", &fixed.config, &fixed.h_list, 1.0);
    let Study::EnergyDrift(random) = preset("hamiltonian-random").unwrap() else { unreachable!() };
    drift(t, "6 energy drift, box, random momentum", &random.config, &random.h_list, 2.0);
}

fn criterion_7(t: &mut Tally) {
    let Study::Jacobian(spec) = preset("jacobian-check").unwrap() else { unreachable!() };
    match jacobian_check(&spec) {
        Ok(r) => {
            t.check(
                "7 Jacobian magnitude",
                r.tested == 100 && r.max_relative_error < 1e-5,
                format!("{} configurations ({} colliding), max relative error {:.2e} (< 1e-5)", r.tested, r.colliding, r.max_relative_error),
            );
            t.check(
                "7 Jacobian sign",
                r.sign_mismatches == 0 && r.det_below * r.det_above < 0.0,
                format!("{} sign mismatches; det {:.4e} / {:.4e} across z1 = {:.6}", r.sign_mismatches, r.det_below, r.det_above, r.switch_z1),
            );
        }
        Err(e) => t.error("7 Jacobian", e),
    }
}

const FP_T: f64 = 0.5;
const FP_Q0: f64 = 0.5;
const FP_P0: f64 = 0.5;
const FP_IMAGES: usize = 10;

fn fp(q: f64, p: f64) -> f64 {
    fp_image_density(FP_T, q, p, FP_Q0, FP_P0, 1.0, FP_IMAGES).expect("t > 0")
}

fn criterion_8(t: &mut Tally) {
    match integrate_2d(fp, 0.0, 1.0, |_| f64::NEG_INFINITY, |_| f64::INFINITY, 1e-9) {
        Ok(z) => t.check("8 image density normalisation", (z - 1.0).abs() < 1e-6, format!("mass {z:.12} (1 ± 1e-6)")),
        Err(e) => t.error("8 image density normalisation", e),
    }
    let mut worst = 0.0f64;
    for q in [0.0, 1.0] {
        for k in 1..=400 {
            let p = k as f64 * 0.01;
            worst = worst.max((fp(q, p) - fp(q, -p)).abs());
        }
    }
    t.check("8 specular boundary condition", worst <= 1e-9, format!("max |rho(p) - rho(-p)| on walls {worst:.2e} (≤ 1e-9)"));

    let (nq, np, pmax) = (10usize, 16usize, 4.0);
    let sim = SimulationConfig {
        scheme: SchemeId::OBAcBO,
        domain: Domain::interval(0.0, 1.0),
        dynamics: DynamicsSpec::langevin(Potential::Zero, 1.0, 1.0),
        t_final: FP_T,
        h: 1e-3,
        m: 1_000_000,
        seed: 8,
        burn_in: 0.0,
        collisions: Default::default(),
        noise: Default::default(),
        initial: InitialCondition::fixed(vec![FP_Q0], vec![FP_P0]),
    };
    let run = || -> confined_langevin::Result<Vec<u64>> {
        let integ = sim.integrator()?;
        let n = sim.steps()?;
        let parts: Vec<confined_langevin::Result<Vec<u64>>> = (0..sim.m.div_ceil(4096))
            .into_par_iter()
            .map(|c| {
                let mut hist = vec![0u64; nq * np];
                let mut ws = integ.workspace();
                for k in c * 4096..((c + 1) * 4096).min(sim.m) {
                    let (s, _, rejected) = simulate(&sim, &integ, n, k as u64, &mut ws)?;
                    let (q, p) = (s.q[0], s.p[0]);
                    if rejected || p.abs() >= pmax {
                        continue;
                    }
                    let i = ((q * nq as f64) as usize).min(nq - 1);
                    let j = (((p + pmax) / (2.0 * pmax) * np as f64) as usize).min(np - 1);
                    hist[i * np + j] += 1;
                }
                Ok(hist)
            })
            .collect();
        let mut total = vec![0u64; nq * np];
        for p in parts {
            total.iter_mut().zip(p?).for_each(|(a, b)| *a += b);
        }
        Ok(total)
    };
    let hist = match run() {
        Ok(h) => h,
        Err(e) => return t.error("8 OBAcBO histogram", e),
    };
    let (dq, dp) = (1.0 / nq as f64, 2.0 * pmax / np as f64);
    let mut l1 = 0.0;
    for i in 0..nq {
        for j in 0..np {
            let (q0, p0) = (i as f64 * dq, -pmax + j as f64 * dp);
            let mass = match integrate_2d(fp, q0, q0 + dq, |_| p0, |_| p0 + dp, 1e-10) {
                Ok(v) => v,
                Err(e) => return t.error("8 OBAcBO histogram", e),
            };
            l1 += (hist[i * np + j] as f64 / sim.m as f64 - mass).abs();
        }
    }
    t.check("8 OBAcBO histogram", l1 <= 0.02, format!("L1 distance {l1:.4} over {nq}x{np} bins (≤ 0.02)"));
}

fn criterion_9(t: &mut Tally) {
    for seed in 1..=3u64 {
        let id = format!("9 SIR seed {seed}");
        match run_sir_inference(&SirConfig::new(SchemeId::BAcOAcB, 0.001, 100.0, seed)) {
            Ok(run) => {
                let s = &run.summary;
                let (eta, alpha, r0) = (s.eta.mean, s.alpha.mean, s.r0_ratio);
                t.check(
                    &id,
                    (eta - 0.7).abs() < 0.05 && (alpha - 0.2).abs() < 0.03 && (r0 - 3.5).abs() < 0.3,
                    format!("eta {eta:.4} (±0.05), alpha {alpha:.4} (±0.03), R0 {r0:.3} (±0.3)"),
                );
            }
            Err(e) => t.error(&id, e),
        }
    }
}

fn random_unit<R: Rng>(rng: &mut R, d: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

fn property_domains() -> Vec<Domain> {
    vec![
        Domain::interval(-1.0, 2.0),
        Domain::half_line(0.0),
        Domain::ball(1.5, 2),
        Domain::ball(1.0, 3),
        Domain::annulus(0.5, 2.0),
        Domain::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 2.0] },
        Domain::Product { dim: 3, axis: 1, a: -1.0, b: 1.0 },
        Domain::Polytope { normals: vec![vec![-1.0, 1.5], vec![0.0, -1.0], vec![1.0, 0.0]], offsets: vec![0.0, 0.0, 2.0] },
    ]
}

fn interior_point<R: Rng>(d: &Domain, rng: &mut R) -> Vec<f64> {
    loop {
        let q: Vec<f64> = (0..d.dim()).map(|_| 4.0 * rng.random::<f64>() - 2.0).collect();
        if d.clearance(&q) > 1e-3 && d.contains(&q).unwrap_or(false) {
            return q;
        }
    }
}

fn criterion_10(t: &mut Tally) {
    let mut rng = trajectory_rng(10, 0);
    let mut bad_reflect = 0;
    for _ in 0..100_000 {
        let d = rng.random_range(1..=4);
        let n = random_unit(&mut rng, d);
        let p: Vec<f64> = (0..d).map(|_| 3.0 * rng.sample::<f64, _>(StandardNormal)).collect();
        let r = reflect(&p, &n).unwrap();
        let rr = reflect(&r, &n).unwrap();
        let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let scale = norm(&p).max(1.0);
        if p.iter().zip(&rr).any(|(a, b)| (a - b).abs() > 1e-12 * scale) || (norm(&r) - norm(&p)).abs() > 1e-12 * scale {
            bad_reflect += 1;
        }
    }
    t.check("10 reflection involution and norm", bad_reflect == 0, format!("{bad_reflect} violations in 1e5 draws"));

    let mut bad_hit = 0;
    let ds = 1e-4;
    for d in property_domains() {
        for _ in 0..200 {
            let q = interior_point(&d, &mut rng);
            let v = random_unit(&mut rng, d.dim());
            let hit = d.first_hit(&q, &v, 4.0).unwrap();
            let mut march = None;
            for k in 1..=(4.0 / ds) as usize {
                let s = k as f64 * ds;
                let x: Vec<f64> = q.iter().zip(&v).map(|(a, b)| a + s * b).collect();
                if !d.contains(&x).unwrap_or(true) {
                    march = Some(s);
                    break;
                }
            }
            let agree = match (&hit, march) {
                (Some(h), Some(s)) => h.tau <= s + 1e-12 && h.tau > s - ds - 1e-12,
                (None, None) => true,
                (Some(h), None) => h.tau > 4.0 - ds,
                (None, Some(_)) => false,
            };
            bad_hit += (!agree) as usize;
        }
    }
    t.check("10 first hit vs brute force", bad_hit == 0, format!("{bad_hit} disagreements in 1600 rays"));

    let mut steps = 0usize;
    let mut escaped = 0usize;
    let schemes = [SchemeId::OBAcBO, SchemeId::BAcOAcB, SchemeId::BOAcOB, SchemeId::OAcBAcO];
    let domains = property_domains();
    while steps < 1_000_000 {
        let d = &domains[rng.random_range(0..domains.len())];
        let scheme = schemes[rng.random_range(0..schemes.len())];
        let dynamics = DynamicsSpec::langevin(Potential::Quadratic { coef: 0.5 }, 1.0, 1.0);
        let h = 0.01 + 0.2 * rng.random::<f64>();
        let mut state = confined_langevin::PhaseState::new(interior_point(d, &mut rng), vec![0.0; d.dim()]);
        let mut noise = RandomNoise::new(trajectory_rng(steps as u64, 1), Default::default());
        for _ in 0..1000 {
            let out = step(scheme, d, &dynamics, &state, h, &mut noise).unwrap();
            steps += 1;
            if !out.rejected {
                state = out.state;
            }
            if !d.in_closure(&state.q) {
                escaped += 1;
            }
        }
    }
    t.check("10 confinement", escaped == 0, format!("{escaped} states outside the closure in {steps} steps"));

    let mut spec = convergence("exp1");
    spec.sim.m = 20_000;
    spec.sim.h = 0.04;
    let phi = ObservableKind::GibbsWeight { beta: 1.0 }.build(&spec.sim.dynamics);
    let runs: Vec<_> = [1, 2, 4]
        .into_iter()
        .map(|n| with_threads(Some(n), || harness::run_finite_time(&spec.sim, &phi, 0.99)).and_then(|r| r))
        .collect();
    match runs.into_iter().collect::<Result<Vec<_>, _>>() {
        Ok(r) => t.check(
            "10 thread-count determinism",
            r.windows(2).all(|w| w[0] == w[1]),
            format!("means {:?} with 1, 2, 4 threads", r.iter().map(|x| x.mean).collect::<Vec<_>>()),
        ),
        Err(e) => t.error("10 thread-count determinism", e),
    }
}

fn main() -> ExitCode {
    let mut t = Tally { failed: 0, total: 0 };
    let sections: [(&str, fn(&mut Tally)); 9] = [
        ("1", criterion_1),
        ("2-3", criteria_2_3),
        ("4", criterion_4),
        ("5", criterion_5),
        ("6", criterion_6),
        ("7", criterion_7),
        ("8", criterion_8),
        ("9", criterion_9),
        ("10", criterion_10),
    ];
    for (name, f) in sections {
        let start = Instant::now();
        f(&mut t);
        eprintln!("  criterion {name} took {:.1}s", start.elapsed().as_secs_f64());
    }
    println!("{} of {} checks passed", t.total - t.failed, t.total);
    if t.failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
