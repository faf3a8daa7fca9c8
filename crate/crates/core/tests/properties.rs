use confined_langevin::harness::{run_finite_time, with_threads, InitialCondition, SimulationConfig};
use confined_langevin::models::ObservableKind;
use confined_langevin::schemes::{step, trajectory_rng, RandomNoise};
use confined_langevin::{reflect, Domain, DynamicsSpec, PhaseState, Potential, SchemeId};
use proptest::prelude::*;

fn domains() -> Vec<Domain> {
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

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Maps a point of `[-1, 1]^d` into the domain by rejection on a scaled
/// copy, so every proptest case has a usable start.
fn inside(d: &Domain, raw: &[f64]) -> Option<Vec<f64>> {
    let q: Vec<f64> = raw[..d.dim()].iter().map(|x| 2.0 * x).collect();
    (d.contains(&q).ok()? && d.clearance(&q) > 1e-3).then_some(q)
}

prop_compose! {
    fn unit(d: usize)(v in prop::collection::vec(-1.0f64..1.0, d)
        .prop_filter("non-degenerate", |v| norm(v) > 1e-3)) -> Vec<f64> {
        let n = norm(&v);
        v.into_iter().map(|x| x / n).collect()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn reflection_is_an_isometric_involution(
        (n, p) in (1usize..5).prop_flat_map(|d| (unit(d), prop::collection::vec(-10.0f64..10.0, d)))
    ) {
        let r = reflect(&p, &n).unwrap();
        let rr = reflect(&r, &n).unwrap();
        let scale = norm(&p).max(1.0);
        prop_assert!((norm(&r) - norm(&p)).abs() <= 1e-12 * scale);
        for (a, b) in p.iter().zip(&rr) {
            prop_assert!((a - b).abs() <= 1e-12 * scale);
        }
        let pn: f64 = p.iter().zip(&n).map(|(a, b)| a * b).sum();
        let rn: f64 = r.iter().zip(&n).map(|(a, b)| a * b).sum();
        prop_assert!((pn + rn).abs() <= 1e-12 * scale);
    }

    #[test]
    fn first_hit_matches_marching(
        which in 0usize..8,
        raw in prop::collection::vec(-1.0f64..1.0, 3),
        dir in unit(3),
    ) {
        let d = &domains()[which];
        let Some(q) = inside(d, &raw) else { return Ok(()) };
        let v: Vec<f64> = dir[..d.dim()].to_vec();
        prop_assume!(norm(&v) > 1e-2);
        let s_max = 4.0;
        let ds = 1e-4;
        let hit = d.first_hit(&q, &v, s_max).unwrap();
        let mut march = None;
        for k in 1..=(s_max / ds) as usize {
            let s = k as f64 * ds;
            let x: Vec<f64> = q.iter().zip(&v).map(|(a, b)| a + s * b).collect();
            if !d.contains(&x).unwrap() {
                march = Some(s);
                break;
            }
        }
        match (&hit, march) {
            (Some(h), Some(s)) => {
                prop_assert!(h.tau <= s + 1e-12 && h.tau > s - ds - 1e-12, "hit {} vs march {}", h.tau, s);
                prop_assert!(d.in_closure(&h.point));
                prop_assert!((norm(&h.normal) - 1.0).abs() < 1e-12);
            }
            (None, None) => {}
            (Some(h), None) => prop_assert!(h.tau > s_max - ds),
            (None, Some(s)) => prop_assert!(false, "missed exit at {}", s),
        }
    }

    #[test]
    fn schemes_stay_in_the_closure(
        which in 0usize..8,
        scheme in prop::sample::select(vec![SchemeId::OBAcBO, SchemeId::BAcOAcB, SchemeId::OAcBAcO, SchemeId::BOAcOB, SchemeId::AcBOBAc, SchemeId::AcOBOAc]),
        raw in prop::collection::vec(-1.0f64..1.0, 3),
        h in 0.005f64..0.3,
        seed in any::<u64>(),
    ) {
        let d = &domains()[which];
        let Some(q) = inside(d, &raw) else { return Ok(()) };
        let dynamics = DynamicsSpec::langevin(Potential::Quadratic { coef: 0.5 }, 1.0, 1.0);
        let mut state = PhaseState::new(q, vec![0.0; d.dim()]);
        let mut noise = RandomNoise::new(trajectory_rng(seed, 0), Default::default());
        for _ in 0..200 {
            let out = step(scheme, d, &dynamics, &state, h, &mut noise).unwrap();
            if !out.rejected {
                state = out.state;
            }
            prop_assert!(d.in_closure(&state.q), "{:?} left {:?}", state.q, d);
        }
    }
}

#[test]
fn results_do_not_depend_on_thread_count() {
    let sim = SimulationConfig {
        scheme: SchemeId::OBAcBO,
        domain: Domain::ball(2.0, 2),
        dynamics: DynamicsSpec::langevin(Potential::CoupledQuartic, 4.0, 1.0),
        t_final: 2.0,
        h: 0.05,
        m: 5000,
        seed: 11,
        burn_in: 0.0,
        collisions: Default::default(),
        noise: Default::default(),
        initial: InitialCondition::fixed(vec![1.0, 1.0], vec![-0.1, -0.1]),
    };
    let phi = ObservableKind::Potential.build(&sim.dynamics);
    let reports: Vec<_> = [1, 2, 3, 8].iter().map(|&n| with_threads(Some(n), || run_finite_time(&sim, &phi, 0.0)).unwrap().unwrap()).collect();
    for r in &reports[1..] {
        assert_eq!(r, &reports[0]);
        assert_eq!(r.mean.to_bits(), reports[0].mean.to_bits());
    }
}
