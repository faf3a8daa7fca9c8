//! Shortened chains for the secondary samplers; the full-length BAcOAcB runs
//! live in the acceptance target.

use confined_langevin::sir::{run_sir_inference, SirConfig};
use confined_langevin::SchemeId;

#[test]
fn obabo_recovers_parameters() {
    let cfg = SirConfig::new(SchemeId::OBAcBO, 0.002, 50.0, 1);
    let s = run_sir_inference(&cfg).unwrap().summary;
    assert!((s.eta.mean - 0.7).abs() < 0.05, "{:?}", s.eta);
    assert!((s.alpha.mean - 0.2).abs() < 0.05, "{:?}", s.alpha);
    assert!(s.eta.lower < s.eta.mean && s.eta.mean < s.eta.upper);
}

#[test]
fn projected_euler_recovers_r0() {
    let cfg = SirConfig::new(SchemeId::Pla, 0.0005, 30.0, 2);
    let s = run_sir_inference(&cfg).unwrap().summary;
    assert!((s.r0_ratio - 3.5).abs() < 0.6, "R0 {}", s.r0_ratio);
    assert_eq!(s.rejected_steps, 0);
}

#[test]
fn reflected_euler_stays_feasible() {
    let cfg = SirConfig::new(SchemeId::Rla, 0.0005, 12.0, 3);
    let run = run_sir_inference(&cfg).unwrap();
    for [eta, alpha] in &run.chain {
        assert!(*alpha >= 0.0 && 1.5 * alpha <= *eta + 1e-12, "({eta}, {alpha})");
    }
}
