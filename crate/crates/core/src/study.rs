//! Runnable studies: what a config file or preset describes, how command-line
//! overrides apply to it, and how its results are written out.

use std::str::FromStr;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::harness::{
    self, convergence_csv, energy_drift_row, estimator_csv, tau_histogram_csv, tau_sweep_csv, ConvergenceReport,
    EnergyDriftConfig, EstimatorReport, Reference, SimulationConfig, TauStats, TauSweep, TimeAverageReport,
};
use crate::models::ObservableKind;
use crate::schemes::{
    obabo_jacobian_1d, step, trajectory_rng, DynamicsSpec, FixedNoise, PhaseState, Potential, SchemeId,
};
use crate::sir::{self, SirConfig, SirRun};

/// Monte Carlo estimate of `E φ` at one or more step sizes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ConvergenceSpec {
    pub sim: SimulationConfig,
    pub observable: ObservableKind,
    pub reference: Reference,
    /// Step sizes to sweep; `sim.h` alone when empty.
    #[serde(default)]
    pub h_list: Vec<f64>,
}

/// Single-trajectory (or few-trajectory) time average after burn-in.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimeAverageSpec {
    pub sim: SimulationConfig,
    pub observable: ObservableKind,
    #[serde(default)]
    pub reference: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TauSpec {
    pub sim: SimulationConfig,
    #[serde(default)]
    pub h_list: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyDriftSpec {
    pub config: EnergyDriftConfig,
    pub h_list: Vec<f64>,
}

fn default_jacobian_potential() -> Potential {
    Potential::Quadratic { coef: 0.5 }
}

/// Finite-difference check of the one-step `OBAcBO` Jacobian on `(0, ∞)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct JacobianSpec {
    #[serde(default = "default_jacobian_potential")]
    pub potential: Potential,
    pub gamma: f64,
    pub beta: f64,
    pub h: f64,
    /// Non-switching configurations to test.
    pub samples: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "study", rename_all = "snake_case")]
pub enum Study {
    Convergence(ConvergenceSpec),
    TimeAverage(TimeAverageSpec),
    TauStats(TauSpec),
    EnergyDrift(EnergyDriftSpec),
    Sir(SirConfig),
    Jacobian(JacobianSpec),
}

/// Command-line replacements for individual config values.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub scheme: Option<SchemeId>,
    pub h: Option<f64>,
    pub t_final: Option<f64>,
    pub m: Option<usize>,
    pub seed: Option<u64>,
}

fn not_applicable(key: &str, study: &str) -> Error {
    Error::Config(format!("`{key}` cannot be overridden for a {study} study"))
}

fn override_sim(sim: &mut SimulationConfig, o: &Overrides) {
    if let Some(s) = o.scheme {
        sim.scheme = s;
    }
    if let Some(h) = o.h {
        sim.h = h;
    }
    if let Some(t) = o.t_final {
        sim.t_final = t;
    }
    if let Some(m) = o.m {
        sim.m = m;
    }
    if let Some(s) = o.seed {
        sim.seed = s;
    }
}

impl Study {
    pub fn kind(&self) -> &'static str {
        match self {
            Study::Convergence(_) => "convergence",
            Study::TimeAverage(_) => "time_average",
            Study::TauStats(_) => "tau_stats",
            Study::EnergyDrift(_) => "energy_drift",
            Study::Sir(_) => "sir",
            Study::Jacobian(_) => "jacobian",
        }
    }

    /// Applies `o`. Setting `h` on a sweep replaces the sweep by that one step.
    pub fn apply(&mut self, o: &Overrides) -> Result<()> {
        match self {
            Study::Convergence(c) => {
                override_sim(&mut c.sim, o);
                if let Some(h) = o.h {
                    c.h_list = vec![h];
                }
            }
            Study::TimeAverage(c) => override_sim(&mut c.sim, o),
            Study::TauStats(c) => {
                override_sim(&mut c.sim, o);
                if o.h.is_some() {
                    c.h_list.clear();
                }
            }
            Study::EnergyDrift(c) => {
                if let Some(s) = o.scheme {
                    if s != SchemeId::BAcB {
                        return Err(Error::Config("energy drift studies run `bab` only".into()));
                    }
                }
                if let Some(h) = o.h {
                    c.h_list = vec![h];
                }
                if let Some(t) = o.t_final {
                    c.config.t_final = t;
                }
                if let Some(m) = o.m {
                    c.config.m = m;
                }
                if let Some(s) = o.seed {
                    c.config.seed = s;
                }
            }
            Study::Sir(c) => {
                if o.m.is_some() {
                    return Err(not_applicable("M", "sir"));
                }
                if let Some(s) = o.scheme {
                    c.scheme = s;
                }
                if let Some(h) = o.h {
                    c.h = h;
                }
                if let Some(t) = o.t_final {
                    c.t_final = t;
                }
                if let Some(s) = o.seed {
                    c.seed = s;
                }
            }
            Study::Jacobian(c) => {
                if o.scheme.is_some_and(|s| s != SchemeId::OBAcBO) {
                    return Err(Error::Config("the Jacobian check is defined for `obabo` only".into()));
                }
                if o.t_final.is_some() {
                    return Err(not_applicable("T", "jacobian"));
                }
                if let Some(h) = o.h {
                    c.h = h;
                }
                if let Some(m) = o.m {
                    c.samples = m;
                }
                if let Some(s) = o.seed {
                    c.seed = s;
                }
            }
        }
        Ok(())
    }

    /// Every problem that would stop the study from running; empty if none.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        let h_checks = |t: f64, hs: &[f64], out: &mut Vec<String>| {
            for &h in hs {
                if let Err(e) = harness::step_count(t, h) {
                    out.push(e.to_string());
                }
            }
        };
        match self {
            Study::Convergence(c) => {
                out.extend(c.sim.diagnostics());
                h_checks(c.sim.t_final, &c.h_list, &mut out);
                if let (Reference::Ergodic(_), false) =
                    (c.reference, matches!(c.sim.dynamics, DynamicsSpec::Langevin { .. }))
                {
                    out.push("ergodic references need Langevin dynamics".into());
                }
                if let ObservableKind::Coordinate { index } = c.observable {
                    if index >= c.sim.domain.dim() {
                        out.push(format!("coordinate {index} is out of range"));
                    }
                }
            }
            Study::TimeAverage(c) => {
                out.extend(c.sim.diagnostics());
                if c.sim.burn_in >= c.sim.t_final {
                    out.push("burn-in must be below T".into());
                }
            }
            Study::TauStats(c) => {
                out.extend(c.sim.diagnostics());
                h_checks(c.sim.t_final, &c.h_list, &mut out);
            }
            Study::EnergyDrift(c) => {
                let d = &c.config;
                if let Some(dom) = &d.domain {
                    if let Err(e) = dom.validate() {
                        out.push(e.to_string());
                    }
                }
                h_checks(d.t_final, &c.h_list, &mut out);
                if c.h_list.is_empty() {
                    out.push("energy drift needs at least one step size".into());
                }
            }
            Study::Sir(c) => {
                if let Err(e) = c.validate() {
                    out.push(e.to_string());
                }
            }
            Study::Jacobian(c) => {
                if !(c.h > 0.0 && c.gamma > 0.0 && c.beta > 0.0) {
                    out.push("h, gamma and beta must be positive".into());
                }
                if c.samples == 0 {
                    out.push("at least one sample is needed".into());
                }
            }
        }
        out
    }

    pub fn run(&self) -> Result<Outcome> {
        let diags = self.diagnostics();
        if let Some(first) = diags.into_iter().next() {
            return Err(Error::Config(first));
        }
        Ok(match self {
            Study::Convergence(c) => {
                let phi = c.observable.build(&c.sim.dynamics);
                if c.h_list.len() >= 3 {
                    Outcome::Convergence(harness::convergence_study(&c.sim, &c.h_list, &phi, c.reference)?)
                } else {
                    let hs = if c.h_list.is_empty() { vec![c.sim.h] } else { c.h_list.clone() };
                    let rows = hs
                        .iter()
                        .map(|&h| harness::estimate(&c.sim.with_h(h), &phi, c.reference))
                        .collect::<Result<Vec<_>>>()?;
                    Outcome::Estimates(rows)
                }
            }
            Study::TimeAverage(c) => {
                let phi = c.observable.build(&c.sim.dynamics);
                let mut r = harness::run_time_average(&c.sim, &phi, None)?;
                r.report.error = c.reference.map(|v| r.report.mean - v);
                Outcome::TimeAverage(r)
            }
            Study::TauStats(c) => {
                if c.h_list.len() >= 3 {
                    Outcome::TauSweep(harness::tau_sweep(&c.sim, &c.h_list)?)
                } else {
                    Outcome::Tau(harness::tau_statistics(&c.sim)?)
                }
            }
            Study::EnergyDrift(c) => {
                if c.h_list.len() >= 3 {
                    Outcome::Convergence(harness::energy_drift_study(&c.config, &c.h_list)?)
                } else {
                    let rows =
                        c.h_list.iter().map(|&h| energy_drift_row(&c.config, h)).collect::<Result<Vec<_>>>()?;
                    Outcome::Estimates(rows)
                }
            }
            Study::Sir(c) => Outcome::Sir(Box::new(sir::run_sir_inference(c)?)),
            Study::Jacobian(c) => Outcome::Jacobian(jacobian_check(c)?),
        })
    }
}

/// Result of [`jacobian_check`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub h: f64,
    /// `h Γ²`, with `Γ²` the momentum variance added by one O half-step.
    pub expected: f64,
    pub tested: usize,
    pub colliding: usize,
    /// Draws discarded because the stencil straddled a switching point.
    pub skipped: usize,
    pub max_relative_error: f64,
    /// Configurations whose determinant sign disagrees with `(−1)^collisions`.
    pub sign_mismatches: usize,
    /// `z₁` at which the step starts to collide for the fixed probe
    /// configuration, with the determinant just below and above it.
    pub switch_z1: f64,
    pub det_below: f64,
    pub det_above: f64,
}

const PROBE: (f64, f64, f64) = (0.05, -0.2, 0.0);

/// Tests `|det J| = hΓ²` at random non-switching configurations and the sign
/// change across the switching point.
pub fn jacobian_check(spec: &JacobianSpec) -> Result<JacobianReport> {
    let dynamics = DynamicsSpec::langevin(spec.potential.clone(), spec.gamma, spec.beta);
    let domain = Domain::half_line(0.0);
    let h = spec.h;
    let expected = h * (-(-spec.gamma * h).exp_m1()) / spec.beta;
    let collides = |q: f64, p: f64, z1: f64, z2: f64| -> Result<bool> {
        let out = step(SchemeId::OBAcBO, &domain, &dynamics, &PhaseState::new(vec![q], vec![p]), h, &mut FixedNoise::new(vec![z1, z2]))?;
        Ok(out.collisions > 0)
    };

    let (mut tested, mut colliding, mut skipped, mut mismatches) = (0, 0, 0, 0);
    let mut worst = 0.0f64;
    let mut k = 0u64;
    while tested < spec.samples {
        if k > 100 * spec.samples as u64 + 100 {
            return Err(Error::EstimationFailure("too many draws landed on switching points".into()));
        }
        let mut rng = trajectory_rng(spec.seed, k);
        k += 1;
        let q = 0.3 * rng.random::<f64>() + 1e-3;
        let p: f64 = rng.sample(StandardNormal);
        let z1: f64 = rng.sample(StandardNormal);
        let z2: f64 = rng.sample(StandardNormal);
        let det = match obabo_jacobian_1d(&dynamics, &domain, q, p, h, z1, z2) {
            Ok(d) => d,
            Err(Error::SingularConfiguration(_)) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let hit = collides(q, p, z1, z2)?;
        tested += 1;
        colliding += hit as usize;
        worst = worst.max((det.abs() - expected).abs() / expected);
        if (det < 0.0) != hit {
            mismatches += 1;
        }
    }

    let (q, p, z2) = PROBE;
    let (mut lo, mut hi) = (-20.0, 20.0);
    if collides(q, p, hi, z2)? || !collides(q, p, lo, z2)? {
        return Err(Error::EstimationFailure("probe configuration never switches".into()));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if collides(q, p, mid, z2)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let z = 0.5 * (lo + hi);
    let det_below = obabo_jacobian_1d(&dynamics, &domain, q, p, h, z - 1e-3, z2)?;
    let det_above = obabo_jacobian_1d(&dynamics, &domain, q, p, h, z + 1e-3, z2)?;
    Ok(JacobianReport {
        h,
        expected,
        tested,
        colliding,
        skipped,
        max_relative_error: worst,
        sign_mismatches: mismatches,
        switch_z1: z,
        det_below,
        det_above,
    })
}

/// What a study produced.
#[derive(Debug, Clone)]
pub enum Outcome {
    Convergence(ConvergenceReport),
    /// Rows at fewer than three step sizes, so without a fit.
    Estimates(Vec<EstimatorReport>),
    TimeAverage(TimeAverageReport),
    Tau(TauStats),
    TauSweep(TauSweep),
    Sir(Box<SirRun>),
    Jacobian(JacobianReport),
}

/// Output flavour of report files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Config(format!("unknown format `{other}` (csv or json)"))),
        }
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialise");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct SirJson<'a> {
    summary: &'a sir::PosteriorSummary,
    observed_infected: &'a [f64],
}

impl Outcome {
    /// Report files as `(file name, contents)`. CSV output gets a JSON
    /// sidecar with the full report; JSON output is the sidecar alone.
    pub fn files(&self, stem: &str, kind: &str, format: Format) -> Vec<(String, String)> {
        let base = format!("{stem}_{kind}");
        let mut out = Vec::new();
        let mut csv = |name: String, body: String| {
            if format == Format::Csv {
                out.push((name, body));
            }
        };
        let sidecar = match self {
            Outcome::Convergence(r) => {
                csv(format!("{base}.csv"), convergence_csv(r));
                json(r)
            }
            Outcome::Estimates(r) => {
                csv(format!("{base}.csv"), estimator_csv(r));
                json(r)
            }
            Outcome::TimeAverage(r) => {
                csv(format!("{base}.csv"), estimator_csv(std::slice::from_ref(&r.report)));
                json(r)
            }
            Outcome::Tau(t) => {
                csv(format!("{base}_histogram.csv"), tau_histogram_csv(t));
                json(t)
            }
            Outcome::TauSweep(s) => {
                csv(format!("{base}.csv"), tau_sweep_csv(s));
                for t in &s.rows {
                    csv(format!("{base}_histogram_h{}.csv", t.h), tau_histogram_csv(t));
                }
                json(s)
            }
            Outcome::Sir(run) => {
                csv(format!("{base}_chain.csv"), sir::chain_csv(run));
                csv(format!("{base}_band.csv"), sir::band_csv(run));
                let s = &run.summary;
                let grid: Vec<f64> = (0..=500).map(|k| k as f64 * 0.1).collect();
                let start = run.posterior.data.start;
                let est = sir::SirParams::new(s.eta.mean, s.alpha.mean);
                if let Ok(c) = sir::curves_csv(est, start, &grid) {
                    csv(format!("{base}_curves.csv"), c);
                }
                json(&SirJson { summary: s, observed_infected: &run.posterior.data.observed_infected })
            }
            Outcome::Jacobian(j) => json(j),
        };
        out.push((format!("{base}.json"), sidecar));
        out
    }
}

/// A fully resolved run: enough to reproduce its report files exactly.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Stamp {
    pub version: String,
    /// Stem of the report file names.
    pub name: String,
    pub study: Study,
}

/// Reads either a [`Stamp`] or a bare [`Study`]; the name is the stamp's.
pub fn parse_config(text: &str) -> Result<(Study, Option<String>)> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Config(format!("config is not valid JSON: {e}")))?;
    if value.get("study").is_some_and(|s| s.is_object()) {
        let s: Stamp = serde_json::from_value(value).map_err(|e| Error::Config(format!("bad stamp: {e}")))?;
        Ok((s.study, Some(s.name)))
    } else {
        let s: Study = serde_json::from_value(value).map_err(|e| Error::Config(format!("bad config: {e}")))?;
        Ok((s, None))
    }
}
