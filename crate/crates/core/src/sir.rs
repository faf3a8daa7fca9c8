//! Parameter inference for the SIR epidemic model: forward solver, synthetic
//! observations, a finite-difference posterior gradient, and samplers that
//! keep `(η, α)` inside a convex constraint set.

use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::harness::{num, step_count};
use crate::schemes::{
    trajectory_rng, CollisionLimit, DynamicsSpec, Integrator, NoiseLaw, PhaseState, Potential, PotentialField,
    RandomNoise, SchemeId,
};

/// Internal step of the forward solver.
pub const ODE_STEP: f64 = 0.01;
/// Probe size of the forward-difference gradient.
pub const FD_EPS: f64 = 1e-8;
const DATA_STREAM: u64 = u64::MAX;

/// Transmission and recovery rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SirParams {
    pub eta: f64,
    pub alpha: f64,
}

impl SirParams {
    pub fn new(eta: f64, alpha: f64) -> Self {
        Self { eta, alpha }
    }

    pub fn r0(&self) -> f64 {
        self.eta / self.alpha
    }
}

/// Susceptible, infected and recovered counts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compartments {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

impl Compartments {
    pub fn total(&self) -> f64 {
        self.s + self.i + self.r
    }
}

#[inline]
fn rhs(eta: f64, alpha: f64, n: f64, x: [f64; 3]) -> [f64; 3] {
    let inf = eta * x[0] * x[1] / n;
    let rec = alpha * x[1];
    [-inf, inf - rec, rec]
}

#[inline]
fn rk4(eta: f64, alpha: f64, n: f64, x: [f64; 3], dt: f64) -> [f64; 3] {
    let add = |a: [f64; 3], k: [f64; 3], s: f64| [a[0] + s * k[0], a[1] + s * k[1], a[2] + s * k[2]];
    let k1 = rhs(eta, alpha, n, x);
    let k2 = rhs(eta, alpha, n, add(x, k1, 0.5 * dt));
    let k3 = rhs(eta, alpha, n, add(x, k2, 0.5 * dt));
    let k4 = rhs(eta, alpha, n, add(x, k3, dt));
    let w = dt / 6.0;
    [
        x[0] + w * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]),
        x[1] + w * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]),
        x[2] + w * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]),
    ]
}

/// Compartments at every time in `t_grid`, which must start at 0 and
/// ascend. Classical RK4 with step at most `dt`.
pub fn sir_curves_with_step(params: SirParams, start: Compartments, t_grid: &[f64], dt: f64) -> Result<Vec<Compartments>> {
    let SirParams { eta, alpha } = params;
    if !(eta >= 0.0 && alpha >= 0.0 && eta.is_finite() && alpha.is_finite()) {
        return Err(Error::Integration(format!("rates must be finite and non-negative, got η = {eta}, α = {alpha}")));
    }
    let n = start.total();
    if !(n > 0.0) || start.s < 0.0 || start.i < 0.0 || start.r < 0.0 {
        return Err(Error::Integration(format!("bad initial compartments {start:?}")));
    }
    match t_grid.first() {
        Some(&t) if t == 0.0 => {}
        _ => return Err(Error::Integration("time grid must start at 0".into())),
    }
    let mut out = Vec::with_capacity(t_grid.len());
    let mut x = [start.s, start.i, start.r];
    out.push(start);
    for w in t_grid.windows(2) {
        let span = w[1] - w[0];
        if !(span >= 0.0) {
            return Err(Error::Integration("time grid must ascend".into()));
        }
        let steps = (span / dt - 1e-9).ceil().max(0.0) as usize;
        if steps > 0 {
            let sub = span / steps as f64;
            for _ in 0..steps {
                x = rk4(eta, alpha, n, x, sub);
            }
        }
        if x.iter().any(|v| *v < -1e-9 || !v.is_finite()) {
            return Err(Error::Integration(format!("compartment left [0, N] at t = {}: {x:?}", w[1])));
        }
        out.push(Compartments { s: x[0], i: x[1], r: x[2] });
    }
    let drift = (x[0] + x[1] + x[2] - n).abs();
    if drift > 1e-9 * n {
        return Err(Error::Integration(format!("population drifted by {drift:e}")));
    }
    Ok(out)
}

/// [`sir_curves_with_step`] at the default step.
pub fn sir_curves(params: SirParams, start: Compartments, t_grid: &[f64]) -> Result<Vec<Compartments>> {
    sir_curves_with_step(params, start, t_grid, ODE_STEP)
}

/// Infected counts on `t_grid`.
pub fn sir_solve(params: SirParams, start: Compartments, t_grid: &[f64]) -> Result<Vec<f64>> {
    Ok(sir_curves(params, start, t_grid)?.into_iter().map(|c| c.i).collect())
}

/// Noisy infected counts at integer times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SirData {
    pub times: Vec<f64>,
    pub observed_infected: Vec<f64>,
    pub start: Compartments,
    pub obs_noise_std: f64,
}

impl SirData {
    /// Solves at `truth` on `0, 1, …, horizon` and adds `N(0, noise_std²)`
    /// to every point.
    pub fn synthetic(truth: SirParams, start: Compartments, horizon: usize, noise_std: f64, seed: u64) -> Result<Self> {
        let times: Vec<f64> = (0..=horizon).map(|t| t as f64).collect();
        let clean = sir_solve(truth, start, &times)?;
        let mut rng = trajectory_rng(seed, DATA_STREAM);
        let observed_infected = clean
            .iter()
            .map(|i| i + noise_std * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(Self { times, observed_infected, start, obs_noise_std: noise_std })
    }
}

/// `Gamma(shape, rate)` prior.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    /// Log density without its normalising constant.
    pub fn log_density(&self, x: f64) -> f64 {
        (self.shape - 1.0) * x.ln() - self.rate * x
    }
}

/// Everything that defines the target density over `(η, α)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSpec {
    pub data: SirData,
    pub likelihood_sigma: f64,
    pub eta_prior: GammaPrior,
    pub alpha_prior: GammaPrior,
    pub constraint: Domain,
}

/// `R₀ = η/α > 1.5` within the positive quadrant, as `n·q < c` rows.
pub fn default_constraint() -> Domain {
    Domain::Polytope { normals: vec![vec![-1.0, 1.5], vec![0.0, -1.0]], offsets: vec![0.0, 0.0] }
}

fn check_point(q: &[f64], spec: &PosteriorSpec) -> Result<SirParams> {
    if q.len() != 2 {
        return Err(Error::DimensionMismatch { expected: 2, got: q.len() });
    }
    if !spec.constraint.in_closure(q) {
        return Err(Error::OutOfDomain { point: q.to_vec() });
    }
    Ok(SirParams::new(q[0], q[1]))
}

/// Gaussian log-likelihood, keeping the `−n·log σ` term and dropping `2π`.
pub fn log_likelihood(q: &[f64], spec: &PosteriorSpec) -> Result<f64> {
    let params = check_point(q, spec)?;
    let pred = sir_solve(params, spec.data.start, &spec.data.times)?;
    let s2 = spec.likelihood_sigma * spec.likelihood_sigma;
    let ss: f64 = pred.iter().zip(&spec.data.observed_infected).map(|(p, o)| (o - p) * (o - p)).sum();
    Ok(-ss / (2.0 * s2) - pred.len() as f64 * spec.likelihood_sigma.ln())
}

/// Unnormalised log posterior; `−∞` where a prior vanishes.
pub fn log_posterior(q: &[f64], spec: &PosteriorSpec) -> Result<f64> {
    if spec.likelihood_sigma <= 0.0 {
        return Err(Error::Config("likelihood sigma must be positive".into()));
    }
    let ll = log_likelihood(q, spec)?;
    Ok(ll + spec.eta_prior.log_density(q[0]) + spec.alpha_prior.log_density(q[1]))
}

/// Componentwise forward difference of `f` at `q` with step `eps`, falling
/// back to a backward difference when the probe leaves `domain`.
pub fn forward_difference<F>(f: F, q: &[f64], domain: &Domain, eps: f64) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let f0 = f(q)?;
    let mut x = q.to_vec();
    let mut g = Vec::with_capacity(q.len());
    for i in 0..q.len() {
        x[i] = q[i] + eps;
        let d = if domain.in_closure(&x) {
            (f(&x)? - f0) / eps
        } else {
            x[i] = q[i] - eps;
            (f0 - f(&x)?) / eps
        };
        x[i] = q[i];
        g.push(d);
    }
    Ok(g)
}

/// `∇ log ρ` by forward differences with step [`FD_EPS`].
pub fn grad_log_posterior(q: &[f64], spec: &PosteriorSpec) -> Result<Vec<f64>> {
    check_point(q, spec)?;
    forward_difference(|x| log_posterior(x, spec), q, &spec.constraint, FD_EPS)
}

/// `U = −log ρ` as a potential for the underdamped samplers.
#[derive(Debug, Clone)]
pub struct SirPotential {
    spec: Arc<PosteriorSpec>,
}

impl SirPotential {
    pub fn new(spec: Arc<PosteriorSpec>) -> Self {
        Self { spec }
    }
}

impl PotentialField for SirPotential {
    fn value(&self, q: &[f64]) -> f64 {
        log_posterior(q, &self.spec).map(|v| -v).unwrap_or(f64::NAN)
    }

    fn gradient(&self, q: &[f64], out: &mut [f64]) {
        match grad_log_posterior(q, &self.spec) {
            Ok(g) => out.iter_mut().zip(g).for_each(|(o, v)| *o = -v),
            Err(_) => out.fill(f64::NAN),
        }
    }
}

/// Result of one overdamped step.
#[derive(Debug, Clone, PartialEq)]
pub struct OverdampedStep {
    pub q: Vec<f64>,
    /// The unconstrained proposal left the domain.
    pub hit: bool,
    /// The mirrored point was still outside and was replaced by the projection.
    pub clamped: bool,
}

fn proposal(q: &[f64], h: f64, grad_logp: &[f64], xi: &[f64]) -> Result<Vec<f64>> {
    if grad_logp.len() != q.len() || xi.len() != q.len() {
        return Err(Error::DimensionMismatch { expected: q.len(), got: grad_logp.len().min(xi.len()) });
    }
    let s = (2.0 * h).sqrt();
    Ok(q.iter().zip(grad_logp).zip(xi).map(|((q, g), x)| q + h * g + s * x).collect())
}

/// Euler step of overdamped Langevin dynamics, projected back onto the domain.
pub fn pla_step(q: &[f64], h: f64, grad_logp: &[f64], domain: &Domain, xi: &[f64]) -> Result<OverdampedStep> {
    let y = proposal(q, h, grad_logp, xi)?;
    if domain.in_closure(&y) {
        return Ok(OverdampedStep { q: y, hit: false, clamped: false });
    }
    Ok(OverdampedStep { q: domain.project(&y)?, hit: true, clamped: false })
}

/// Euler step of overdamped Langevin dynamics, mirrored back through the
/// nearest boundary point.
pub fn rla_step(q: &[f64], h: f64, grad_logp: &[f64], domain: &Domain, xi: &[f64]) -> Result<OverdampedStep> {
    let y = proposal(q, h, grad_logp, xi)?;
    if domain.in_closure(&y) {
        return Ok(OverdampedStep { q: y, hit: false, clamped: false });
    }
    let pi = domain.project(&y)?;
    let m: Vec<f64> = pi.iter().zip(&y).map(|(p, y)| 2.0 * p - y).collect();
    if domain.in_closure(&m) {
        Ok(OverdampedStep { q: m, hit: true, clamped: false })
    } else {
        Ok(OverdampedStep { q: pi, hit: true, clamped: true })
    }
}

/// Problem definition shared by every chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SirModel {
    pub truth: SirParams,
    pub start: Compartments,
    pub horizon: usize,
    pub obs_noise_std: f64,
    pub likelihood_sigma: f64,
    pub eta_prior: GammaPrior,
    pub alpha_prior: GammaPrior,
    pub constraint: Domain,
}

impl Default for SirModel {
    fn default() -> Self {
        Self {
            truth: SirParams::new(0.7, 0.2),
            start: Compartments { s: 990.0, i: 10.0, r: 0.0 },
            horizon: 50,
            obs_noise_std: 4.0,
            likelihood_sigma: 100.0,
            eta_prior: GammaPrior { shape: 2.0, rate: 2.0 },
            alpha_prior: GammaPrior { shape: 2.0, rate: 4.0 },
            constraint: default_constraint(),
        }
    }
}

impl SirModel {
    pub fn posterior(&self, data_seed: u64) -> Result<PosteriorSpec> {
        let data = SirData::synthetic(self.truth, self.start, self.horizon, self.obs_noise_std, data_seed)?;
        Ok(PosteriorSpec {
            data,
            likelihood_sigma: self.likelihood_sigma,
            eta_prior: self.eta_prior,
            alpha_prior: self.alpha_prior,
            constraint: self.constraint.clone(),
        })
    }
}

fn ten() -> f64 {
    10.0
}
fn one() -> f64 {
    1.0
}
fn default_init() -> [f64; 2] {
    [0.5, 0.25]
}
fn default_band() -> usize {
    1000
}

/// One sampler run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SirConfig {
    pub scheme: SchemeId,
    pub h: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    #[serde(default = "ten")]
    pub burn_in: f64,
    pub seed: u64,
    /// Seed of the synthetic observations; the run seed if absent.
    #[serde(default)]
    pub data_seed: Option<u64>,
    #[serde(default = "one")]
    pub gamma: f64,
    #[serde(default = "one")]
    pub beta: f64,
    #[serde(default = "default_init")]
    pub init: [f64; 2],
    /// Posterior draws used for the predicted-curve bands.
    #[serde(default = "default_band")]
    pub band_samples: usize,
    #[serde(default)]
    pub collisions: CollisionLimit,
    #[serde(default)]
    pub model: SirModel,
}

impl SirConfig {
    pub fn new(scheme: SchemeId, h: f64, t_final: f64, seed: u64) -> Self {
        Self {
            scheme,
            h,
            t_final,
            burn_in: 10.0,
            seed,
            data_seed: None,
            gamma: 1.0,
            beta: 1.0,
            init: default_init(),
            band_samples: default_band(),
            collisions: CollisionLimit::default(),
            model: SirModel::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.scheme {
            SchemeId::Pla | SchemeId::Rla | SchemeId::OBAcBO | SchemeId::BAcOAcB => {}
            s => return Err(Error::Config(format!("the SIR sampler supports obabo, baoab, pla and rla, not `{s}`"))),
        }
        let n = step_count(self.t_final, self.h)?;
        if self.burn_in < 0.0 || self.burn_in >= self.t_final {
            return Err(Error::Config("burn-in must lie in [0, T)".into()));
        }
        if self.burn_in > 0.0 {
            step_count(self.burn_in, self.h)?;
        }
        if !(self.gamma > 0.0 && self.beta > 0.0) {
            return Err(Error::Config("gamma and beta must be positive".into()));
        }
        if !(self.model.likelihood_sigma > 0.0) {
            return Err(Error::Config("likelihood sigma must be positive".into()));
        }
        self.model.constraint.validate()?;
        if self.model.constraint.dim() != 2 {
            return Err(Error::Config("the constraint must be a domain in the (η, α) plane".into()));
        }
        if !self.model.constraint.contains(&self.init)? {
            return Err(Error::Config(format!("initial point {:?} is not inside the constraint", self.init)));
        }
        let _ = n;
        Ok(())
    }

    fn burn_steps(&self) -> usize {
        if self.burn_in > 0.0 {
            step_count(self.burn_in, self.h).unwrap_or(0)
        } else {
            0
        }
    }
}

/// Mean, standard deviation and central 95% interval of one quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub mean: f64,
    pub std: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Predicted infected count at one observation time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BandPoint {
    pub t: f64,
    pub lower: f64,
    pub upper: f64,
    pub at_mean: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PosteriorSummary {
    pub scheme: SchemeId,
    pub h: f64,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub burn_in: f64,
    pub seed: u64,
    pub samples: usize,
    pub eta: ParameterSummary,
    pub alpha: ParameterSummary,
    /// Per-draw ratio `η/α`.
    pub r0: ParameterSummary,
    /// `Σ η / Σ α` over the retained draws.
    pub r0_ratio: f64,
    pub boundary_events: u64,
    pub clamped: u64,
    pub rejected_steps: u64,
    pub predicted_infected: Vec<BandPoint>,
}

/// A finished chain.
#[derive(Debug, Clone)]
pub struct SirRun {
    pub summary: PosteriorSummary,
    /// Retained draws `(η, α)`, one per step after burn-in.
    pub chain: Vec<[f64; 2]>,
    /// Index of the first retained step.
    pub first_step: usize,
    pub posterior: PosteriorSpec,
}

/// Linear-interpolation percentile of sorted data, `p ∈ [0, 100]`.
pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let x = p / 100.0 * (sorted.len() - 1) as f64;
    let lo = x.floor() as usize;
    let hi = x.ceil() as usize;
    sorted[lo] + (x - lo as f64) * (sorted[hi] - sorted[lo])
}

fn summarize(values: impl Iterator<Item = f64>) -> ParameterSummary {
    let mut v: Vec<f64> = values.collect();
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0).max(1.0);
    v.sort_by(f64::total_cmp);
    ParameterSummary { mean, std: var.sqrt(), lower: percentile(&v, 2.5), upper: percentile(&v, 97.5) }
}

/// Runs one chain and summarises the draws after burn-in.
pub fn run_sir_inference(cfg: &SirConfig) -> Result<SirRun> {
    cfg.validate()?;
    let n = step_count(cfg.t_final, cfg.h)?;
    let burn = cfg.burn_steps();
    let posterior = cfg.model.posterior(cfg.data_seed.unwrap_or(cfg.seed))?;
    let domain = posterior.constraint.clone();
    let mut rng = trajectory_rng(cfg.seed, 0);
    let mut chain = Vec::with_capacity(n - burn);
    let (mut boundary_events, mut clamped, mut rejected_steps) = (0u64, 0u64, 0u64);

    match cfg.scheme {
        SchemeId::Pla | SchemeId::Rla => {
            let mut q = cfg.init.to_vec();
            let mut xi = [0.0; 2];
            for k in 1..=n {
                let g = grad_log_posterior(&q, &posterior)?;
                if g.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Numeric { what: "posterior gradient", location: q });
                }
                xi[0] = rng.sample(StandardNormal);
                xi[1] = rng.sample(StandardNormal);
                let s = if cfg.scheme == SchemeId::Pla {
                    pla_step(&q, cfg.h, &g, &domain, &xi)?
                } else {
                    rla_step(&q, cfg.h, &g, &domain, &xi)?
                };
                boundary_events += s.hit as u64;
                clamped += s.clamped as u64;
                q = s.q;
                if k > burn {
                    chain.push([q[0], q[1]]);
                }
            }
        }
        scheme => {
            let shared = Arc::new(posterior.clone());
            let u = Potential::Custom(Arc::new(SirPotential::new(shared)));
            let dynamics = DynamicsSpec::langevin(u, cfg.gamma, cfg.beta);
            let integ = Integrator::new(scheme, domain.clone(), dynamics, cfg.h, cfg.collisions)?;
            let std = cfg.beta.recip().sqrt();
            let p = (0..2).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect();
            let mut state = PhaseState::new(cfg.init.to_vec(), p);
            let mut noise = RandomNoise::new(rng, NoiseLaw::Gaussian);
            let mut ws = integ.workspace();
            for k in 1..=n {
                let ev = integ.advance(&mut state, &mut noise, &mut ws)?;
                boundary_events += ev.collisions as u64;
                rejected_steps += ev.rejected as u64;
                if k > burn {
                    chain.push([state.q[0], state.q[1]]);
                }
            }
        }
    }

    let eta = summarize(chain.iter().map(|c| c[0]));
    let alpha = summarize(chain.iter().map(|c| c[1]));
    let r0 = summarize(chain.iter().map(|c| c[0] / c[1]));
    let r0_ratio = chain.iter().map(|c| c[0]).sum::<f64>() / chain.iter().map(|c| c[1]).sum::<f64>();
    let predicted_infected = predictive_band(&chain, &posterior, SirParams::new(eta.mean, alpha.mean), cfg.band_samples)?;
    let summary = PosteriorSummary {
        scheme: cfg.scheme,
        h: cfg.h,
        t_final: cfg.t_final,
        burn_in: cfg.burn_in,
        seed: cfg.seed,
        samples: chain.len(),
        eta,
        alpha,
        r0,
        r0_ratio,
        boundary_events,
        clamped,
        rejected_steps,
        predicted_infected,
    };
    Ok(SirRun { summary, chain, first_step: burn + 1, posterior })
}

fn predictive_band(chain: &[[f64; 2]], spec: &PosteriorSpec, mean: SirParams, draws: usize) -> Result<Vec<BandPoint>> {
    let times = &spec.data.times;
    let at_mean = sir_solve(mean, spec.data.start, times)?;
    let draws = draws.min(chain.len());
    let mut per_time: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); times.len()];
    for j in 0..draws {
        let c = chain[j * chain.len() / draws];
        let curve = sir_solve(SirParams::new(c[0], c[1]), spec.data.start, times)?;
        for (bucket, v) in per_time.iter_mut().zip(curve) {
            bucket.push(v);
        }
    }
    Ok(per_time
        .into_iter()
        .zip(times)
        .zip(at_mean)
        .map(|((mut b, &t), m)| {
            b.sort_by(f64::total_cmp);
            BandPoint { t, lower: percentile(&b, 2.5), upper: percentile(&b, 97.5), at_mean: m }
        })
        .collect())
}

fn render(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Retained draws with their step indices.
pub fn chain_csv(run: &SirRun) -> String {
    render(
        &["step", "eta", "alpha"],
        run.chain.iter().enumerate().map(|(i, c)| vec![(run.first_step + i).to_string(), num(c[0]), num(c[1])]),
    )
}

/// Forward curves at `params` on `t_grid`.
pub fn curves_csv(params: SirParams, start: Compartments, t_grid: &[f64]) -> Result<String> {
    let c = sir_curves(params, start, t_grid)?;
    Ok(render(&["t", "S", "I", "R"], t_grid.iter().zip(c).map(|(t, c)| vec![num(*t), num(c.s), num(c.i), num(c.r)])))
}

/// Observations next to the predicted band.
pub fn band_csv(run: &SirRun) -> String {
    render(
        &["t", "observed", "lower", "upper", "at_mean"],
        run.summary
            .predicted_infected
            .iter()
            .zip(&run.posterior.data.observed_infected)
            .map(|(b, o)| vec![num(b.t), num(*o), num(b.lower), num(b.upper), num(b.at_mean)]),
    )
}
