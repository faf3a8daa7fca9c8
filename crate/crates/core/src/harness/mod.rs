//! Monte Carlo estimation over many independent trajectories.
//!
//! Trajectory `k` always draws from stream `k` of the run seed, and partial
//! statistics are merged in a fixed chunk order, so every report is bitwise
//! identical whatever the number of worker threads.

mod report;

use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use report::{convergence_csv, estimator_csv, tau_histogram_csv, tau_sweep_csv};
pub(crate) use report::num;

use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::models::ObservableSpec;
use crate::schemes::{
    trajectory_rng, CollisionLimit, DynamicsSpec, Integrator, NoiseLaw, PhaseState, Potential, PotentialField,
    RandomNoise, SchemeId, Workspace,
};

const CHUNK: usize = 1024;

/// Starting position.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum PositionInit {
    Fixed { value: Vec<f64> },
    /// `q = lo + scale·|Z|` on a half-line with lower end `lo`.
    HalfNormal { lo: f64, scale: f64 },
}

/// Starting momentum.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum MomentumInit {
    Fixed { value: Vec<f64> },
    /// Independent `N(0, std²)` components.
    Gaussian { std: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InitialCondition {
    pub q: PositionInit,
    pub p: MomentumInit,
}

impl InitialCondition {
    pub fn fixed(q: Vec<f64>, p: Vec<f64>) -> Self {
        Self { q: PositionInit::Fixed { value: q }, p: MomentumInit::Fixed { value: p } }
    }

    pub fn dim(&self) -> usize {
        match (&self.q, &self.p) {
            (PositionInit::Fixed { value }, _) => value.len(),
            (_, MomentumInit::Fixed { value }) => value.len(),
            _ => 1,
        }
    }

    /// Draws the start state. Random components use the generator before any
    /// step noise: position first, then momentum in component order.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> PhaseState {
        let q = match &self.q {
            PositionInit::Fixed { value } => value.clone(),
            PositionInit::HalfNormal { lo, scale } => {
                let z: f64 = rng.sample(StandardNormal);
                vec![lo + scale * z.abs()]
            }
        };
        let p = match &self.p {
            MomentumInit::Fixed { value } => value.clone(),
            MomentumInit::Gaussian { std } => (0..q.len()).map(|_| std * rng.sample::<f64, _>(StandardNormal)).collect(),
        };
        PhaseState { q, p }
    }
}

/// Everything needed to simulate an ensemble.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub scheme: SchemeId,
    pub domain: Domain,
    pub dynamics: DynamicsSpec,
    #[serde(rename = "T")]
    pub t_final: f64,
    pub h: f64,
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    #[serde(default)]
    pub burn_in: f64,
    #[serde(default)]
    pub collisions: CollisionLimit,
    #[serde(default)]
    pub noise: NoiseLaw,
    pub initial: InitialCondition,
}

/// Number of steps `T/h`, if it is an integer to within `1e-9` relative.
pub fn step_count(t_final: f64, h: f64) -> Result<usize> {
    if !(h > 0.0 && t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::Config(format!("need T > 0 and h > 0, got T = {t_final}, h = {h}")));
    }
    let n = (t_final / h).round();
    if n < 1.0 || (n * h - t_final).abs() > 1e-9 * t_final {
        return Err(Error::Config(format!("T/h not integral: T = {t_final}, h = {h}")));
    }
    Ok(n as usize)
}

impl SimulationConfig {
    pub fn with_h(&self, h: f64) -> Self {
        Self { h, ..self.clone() }
    }

    pub fn steps(&self) -> Result<usize> {
        step_count(self.t_final, self.h)
    }

    pub fn integrator(&self) -> Result<Integrator> {
        Integrator::new(self.scheme, self.domain.clone(), self.dynamics.clone(), self.h, self.collisions)
    }

    /// All problems with this config; empty if it can be run.
    pub fn diagnostics(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.domain.validate() {
            out.push(e.to_string());
        }
        if let Err(e) = self.dynamics.validate() {
            out.push(e.to_string());
        }
        if let Err(e) = self.steps() {
            out.push(e.to_string());
        }
        if let Err(e) = crate::schemes::check_compatible(self.scheme, &self.dynamics) {
            out.push(e.to_string());
        }
        if self.m == 0 {
            out.push("M must be at least 1".into());
        }
        if !(self.burn_in >= 0.0 && self.burn_in < self.t_final) {
            out.push(format!("burn-in {} must lie in [0, T)", self.burn_in));
        }
        let d = self.domain.dim();
        if self.initial.dim() != d {
            out.push(format!("initial condition has dimension {}, domain has {d}", self.initial.dim()));
        } else if let PositionInit::Fixed { value } = &self.initial.q {
            if !self.domain.in_closure(value) {
                out.push(format!("initial position {value:?} is outside the domain"));
            }
        }
        if let MomentumInit::Fixed { value } = &self.initial.p {
            if value.len() != self.initial.dim() {
                out.push("initial q and p differ in dimension".into());
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        match self.diagnostics().into_iter().next() {
            None => Ok(()),
            Some(msg) => Err(Error::Config(msg)),
        }
    }
}

/// Ensemble mean with its Monte Carlo error bar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimatorReport {
    pub h: f64,
    pub mean: f64,
    /// Sample variance of the per-trajectory values.
    pub variance: f64,
    /// `2·√(variance/M)` over accepted trajectories.
    pub half_width: f64,
    pub mean_collisions: f64,
    pub rejected_fraction: f64,
    pub accepted: usize,
    pub total: usize,
    /// `mean − reference`, when a reference is known.
    pub error: Option<f64>,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: u64,
    mean: f64,
    m2: f64,
    collisions: u64,
    rejected: u64,
}

impl Moments {
    fn push(&mut self, x: f64, collisions: u64) {
        self.n += 1;
        let d = x - self.mean;
        self.mean += d / self.n as f64;
        self.m2 += d * (x - self.mean);
        self.collisions += collisions;
    }

    fn merge(&mut self, o: &Moments) {
        if o.n > 0 {
            let n = self.n + o.n;
            let d = o.mean - self.mean;
            self.mean += d * o.n as f64 / n as f64;
            self.m2 += o.m2 + d * d * (self.n as f64) * (o.n as f64) / n as f64;
            self.n = n;
        }
        self.collisions += o.collisions;
        self.rejected += o.rejected;
    }

    fn variance(&self) -> f64 {
        if self.n > 1 {
            self.m2 / (self.n - 1) as f64
        } else {
            0.0
        }
    }

    fn report(&self, h: f64, total: usize, reference: Option<f64>) -> Result<EstimatorReport> {
        if self.n == 0 {
            return Err(Error::EstimationFailure(format!("all {total} trajectories were rejected")));
        }
        let variance = self.variance();
        Ok(EstimatorReport {
            h,
            mean: self.mean,
            variance,
            half_width: 2.0 * (variance / self.n as f64).sqrt(),
            mean_collisions: self.collisions as f64 / self.n as f64,
            rejected_fraction: self.rejected as f64 / total as f64,
            accepted: self.n as usize,
            total,
            error: reference.map(|r| self.mean - r),
        })
    }
}

/// Outcome of one trajectory.
#[derive(Debug, Clone, Copy)]
pub struct Sample {
    pub value: f64,
    pub collisions: u64,
    pub rejected: bool,
}

/// Runs `f(k)` for `k < m` in parallel chunks and merges the moments in chunk
/// order.
fn ensemble<F>(m: usize, f: F) -> Result<Moments>
where
    F: Fn(u64) -> Result<Sample> + Sync,
{
    let chunks: Vec<Result<Moments>> = (0..m.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Moments::default();
            for k in c * CHUNK..((c + 1) * CHUNK).min(m) {
                let s = f(k as u64)?;
                if s.rejected {
                    acc.rejected += 1;
                } else {
                    acc.push(s.value, s.collisions);
                }
            }
            Ok(acc)
        })
        .collect();
    let mut total = Moments::default();
    for c in chunks {
        total.merge(&c?);
    }
    Ok(total)
}

/// A single trajectory over `n` steps from its seeded start.
pub fn simulate(
    cfg: &SimulationConfig,
    integ: &Integrator,
    n: usize,
    k: u64,
    ws: &mut Workspace,
) -> Result<(PhaseState, u64, bool)> {
    let mut rng = trajectory_rng(cfg.seed, k);
    let mut state = cfg.initial.sample(&mut rng);
    let mut noise = RandomNoise::new(rng, cfg.noise);
    ws.invalidate();
    let mut collisions = 0u64;
    for _ in 0..n {
        let ev = integ.advance(&mut state, &mut noise, ws)?;
        collisions += ev.collisions as u64;
        if ev.rejected {
            return Ok((state, collisions, true));
        }
    }
    Ok((state, collisions, false))
}

fn endpoint_estimate(cfg: &SimulationConfig, phi: &ObservableSpec, reference: Option<f64>) -> Result<EstimatorReport> {
    cfg.validate()?;
    let n = cfg.steps()?;
    let integ = cfg.integrator()?;
    let moments = ensemble(cfg.m, |k| {
        let mut ws = integ.workspace();
        let (s, collisions, rejected) = simulate(cfg, &integ, n, k, &mut ws)?;
        Ok(Sample { value: if rejected { 0.0 } else { phi.eval(&s.q, &s.p) }, collisions, rejected })
    })?;
    moments.report(cfg.h, cfg.m, reference)
}

/// `E φ(Q_N, P_N)` against the exact finite-time value.
pub fn run_finite_time(cfg: &SimulationConfig, phi: &ObservableSpec, oracle: f64) -> Result<EstimatorReport> {
    if !oracle.is_finite() {
        return Err(Error::Config("reference value must be finite".into()));
    }
    endpoint_estimate(cfg, phi, Some(oracle))
}

/// Ensemble average of `φ` at time `T` against the stationary mean `φ̄`.
pub fn run_ergodic(cfg: &SimulationConfig, phi: &ObservableSpec, phi_bar: f64) -> Result<EstimatorReport> {
    if !matches!(cfg.dynamics, DynamicsSpec::Langevin { .. }) {
        return Err(Error::Config("ergodic estimates need Langevin dynamics".into()));
    }
    if !phi_bar.is_finite() {
        return Err(Error::Config("reference value must be finite".into()));
    }
    endpoint_estimate(cfg, phi, Some(phi_bar))
}

/// Time averages after burn-in, pooled over `M` trajectories.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeAverageReport {
    pub report: EstimatorReport,
    /// `Σφ_a / Σφ_b` when a pair of observables was supplied.
    pub ratio: Option<f64>,
    pub samples: usize,
}

const BATCHES: usize = 20;

/// Time average of `φ` (and optionally the ratio estimator `Σa/Σb`).
///
/// Each trajectory is split into equal batches after burn-in; the variance
/// reported is that of the batch means, which is what the half-width uses.
pub fn run_time_average(
    cfg: &SimulationConfig,
    phi: &ObservableSpec,
    ratio_of: Option<(&ObservableSpec, &ObservableSpec)>,
) -> Result<TimeAverageReport> {
    if !(cfg.burn_in >= 0.0 && cfg.burn_in < cfg.t_final) {
        return Err(Error::Config(format!("burn-in {} must be below T = {}", cfg.burn_in, cfg.t_final)));
    }
    cfg.validate()?;
    let n = cfg.steps()?;
    let skip = ((cfg.burn_in / cfg.h).round() as usize).min(n);
    let kept = n - skip;
    if kept == 0 {
        return Err(Error::Config("no steps left after burn-in".into()));
    }
    let per_batch = (kept / BATCHES).max(1);
    let integ = cfg.integrator()?;

    struct Run {
        batches: Vec<f64>,
        sum_a: f64,
        sum_b: f64,
        collisions: u64,
        rejected: bool,
    }
    let runs: Vec<Result<Run>> = (0..cfg.m as u64)
        .into_par_iter()
        .map(|k| {
            let mut rng = trajectory_rng(cfg.seed, k);
            let mut state = cfg.initial.sample(&mut rng);
            let mut noise = RandomNoise::new(rng, cfg.noise);
            let mut ws = integ.workspace();
            let mut run = Run { batches: Vec::new(), sum_a: 0.0, sum_b: 0.0, collisions: 0, rejected: false };
            let (mut acc, mut in_batch) = (0.0, 0usize);
            for i in 0..n {
                let ev = integ.advance(&mut state, &mut noise, &mut ws)?;
                run.collisions += ev.collisions as u64;
                if ev.rejected {
                    run.rejected = true;
                    break;
                }
                if i >= skip {
                    acc += phi.eval(&state.q, &state.p);
                    in_batch += 1;
                    if let Some((a, b)) = ratio_of {
                        run.sum_a += a.eval(&state.q, &state.p);
                        run.sum_b += b.eval(&state.q, &state.p);
                    }
                    if in_batch == per_batch {
                        run.batches.push(acc / per_batch as f64);
                        acc = 0.0;
                        in_batch = 0;
                    }
                }
            }
            Ok(run)
        })
        .collect();

    let mut m = Moments::default();
    let (mut sa, mut sb) = (0.0, 0.0);
    let mut rejected = 0usize;
    for r in runs {
        let r = r?;
        if r.rejected {
            rejected += 1;
            continue;
        }
        for &b in &r.batches {
            m.push(b, 0);
        }
        m.collisions += r.collisions;
        sa += r.sum_a;
        sb += r.sum_b;
    }
    let accepted = cfg.m - rejected;
    let mut report = m.report(cfg.h, m.n as usize, None)?;
    report.mean_collisions = m.collisions as f64 / accepted.max(1) as f64;
    report.rejected_fraction = rejected as f64 / cfg.m as f64;
    Ok(TimeAverageReport {
        report,
        ratio: ratio_of.map(|_| sa / sb),
        samples: accepted * kept,
    })
}

/// What the simulated mean is compared against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Reference {
    /// Exact `E φ(Q(T), P(T))`.
    FiniteTime(f64),
    /// Stationary Gibbs mean.
    Ergodic(f64),
}

impl Reference {
    pub fn value(self) -> f64 {
        match self {
            Reference::FiniteTime(v) | Reference::Ergodic(v) => v,
        }
    }
}

/// Per-`h` errors with a fitted log-log slope.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    /// Sorted by decreasing `h`.
    pub rows: Vec<EstimatorReport>,
    pub slope: f64,
    /// Two standard errors of the slope; absent with only two points.
    pub slope_ci: Option<f64>,
    /// Rows whose error exceeds their half-width and so entered the fit.
    pub used: usize,
}

/// Least-squares slope of `log₁₀|error|` on `log₁₀ h`, over rows with
/// `|error| > half_width`.
pub fn fit_slope(points: &[(f64, f64, f64)]) -> Result<(f64, Option<f64>, usize)> {
    let usable: Vec<(f64, f64)> = points
        .iter()
        .filter(|(h, e, hw)| *h > 0.0 && e.abs() > *hw && e.abs() > 0.0)
        .map(|(h, e, _)| (h.log10(), e.abs().log10()))
        .collect();
    let n = usable.len();
    if n < 2 {
        return Err(Error::Underpowered { usable: n, total: points.len() });
    }
    let nf = n as f64;
    let mx = usable.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = usable.iter().map(|p| p.1).sum::<f64>() / nf;
    let sxx: f64 = usable.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = usable.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Underpowered { usable: 1, total: points.len() });
    }
    let slope = sxy / sxx;
    let ci = (n >= 3).then(|| {
        let rss: f64 = usable.iter().map(|p| (p.1 - my - slope * (p.0 - mx)).powi(2)).sum();
        2.0 * (rss / (nf - 2.0) / sxx).sqrt()
    });
    Ok((slope, ci, n))
}

fn check_h_list(t_final: f64, h_list: &[f64]) -> Result<Vec<f64>> {
    let mut hs = h_list.to_vec();
    hs.sort_by(|a, b| b.total_cmp(a));
    hs.dedup();
    if hs.len() < 3 {
        return Err(Error::Config(format!("a convergence study needs at least 3 distinct step sizes, got {}", hs.len())));
    }
    for &h in &hs {
        step_count(t_final, h)?;
    }
    Ok(hs)
}

/// Runs the estimator at every `h` (same master seed each time) and fits
/// the error slope.
pub fn convergence_study(
    base: &SimulationConfig,
    h_list: &[f64],
    phi: &ObservableSpec,
    reference: Reference,
) -> Result<ConvergenceReport> {
    let hs = check_h_list(base.t_final, h_list)?;
    let rows = hs.iter().map(|&h| estimate(&base.with_h(h), phi, reference)).collect::<Result<Vec<_>>>()?;
    finish(rows)
}

/// [`run_finite_time`] or [`run_ergodic`], by the kind of reference.
pub fn estimate(cfg: &SimulationConfig, phi: &ObservableSpec, reference: Reference) -> Result<EstimatorReport> {
    match reference {
        Reference::FiniteTime(v) => run_finite_time(cfg, phi, v),
        Reference::Ergodic(v) => run_ergodic(cfg, phi, v),
    }
}

fn finish(rows: Vec<EstimatorReport>) -> Result<ConvergenceReport> {
    let pts: Vec<(f64, f64, f64)> = rows.iter().map(|r| (r.h, r.error.unwrap_or(0.0), r.half_width)).collect();
    let (slope, slope_ci, used) = fit_slope(&pts)?;
    Ok(ConvergenceReport { rows, slope, slope_ci, used })
}

/// First-collision time statistics at one step size.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauStats {
    pub h: f64,
    /// `mean(τ₁) − h/2`.
    pub lambda1: f64,
    pub lambda1_half_width: f64,
    /// `mean((τ₁/h)²)`.
    pub lambda2: f64,
    pub lambda2_half_width: f64,
    pub count: usize,
    /// Counts of `τ₁/h` in equal bins on `(0, 1)`.
    pub histogram: Vec<u64>,
}

const TAU_BINS: usize = 50;

/// Runs each trajectory until its first boundary hit (or time `T`) and
/// collects the hit time within that step.
pub fn tau_statistics(cfg: &SimulationConfig) -> Result<TauStats> {
    cfg.validate()?;
    let n = cfg.steps()?;
    let integ = cfg.integrator()?;
    let h = cfg.h;

    #[derive(Default)]
    struct Acc {
        t: Moments,
        t2: Moments,
        hist: Vec<u64>,
    }
    let chunks: Vec<Result<Acc>> = (0..cfg.m.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut acc = Acc { hist: vec![0; TAU_BINS], ..Default::default() };
            let mut ws = integ.workspace();
            for k in c * CHUNK..((c + 1) * CHUNK).min(cfg.m) {
                let mut rng = trajectory_rng(cfg.seed, k as u64);
                let mut state = cfg.initial.sample(&mut rng);
                let mut noise = RandomNoise::new(rng, cfg.noise);
                ws.invalidate();
                for _ in 0..n {
                    let ev = integ.advance(&mut state, &mut noise, &mut ws)?;
                    if ev.rejected {
                        break;
                    }
                    if let Some(tau) = ev.first_collision_time {
                        let x = tau / h;
                        acc.t.push(tau, 0);
                        acc.t2.push(x * x, 0);
                        acc.hist[((x * TAU_BINS as f64) as usize).min(TAU_BINS - 1)] += 1;
                        break;
                    }
                }
            }
            Ok(acc)
        })
        .collect();
    let mut t = Moments::default();
    let mut t2 = Moments::default();
    let mut hist = vec![0u64; TAU_BINS];
    for c in chunks {
        let c = c?;
        t.merge(&c.t);
        t2.merge(&c.t2);
        hist.iter_mut().zip(&c.hist).for_each(|(a, b)| *a += b);
    }
    if t.n == 0 {
        return Err(Error::EmptyStatistics("no trajectory reached the boundary".into()));
    }
    let hw = |m: &Moments| 2.0 * (m.variance() / m.n as f64).sqrt();
    Ok(TauStats {
        h,
        lambda1: t.mean - h / 2.0,
        lambda1_half_width: hw(&t),
        lambda2: t2.mean,
        lambda2_half_width: hw(&t2),
        count: t.n as usize,
        histogram: hist,
    })
}

/// `tau_statistics` across step sizes, with the `Λ₁` slope and `Λ₂` spread.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauSweep {
    pub rows: Vec<TauStats>,
    pub lambda1_slope: f64,
    pub lambda1_slope_ci: Option<f64>,
    /// `(max Λ₂ − min Λ₂) / mean Λ₂`.
    pub lambda2_spread: f64,
}

pub fn tau_sweep(base: &SimulationConfig, h_list: &[f64]) -> Result<TauSweep> {
    let hs = check_h_list(base.t_final, h_list)?;
    let rows = hs.iter().map(|&h| tau_statistics(&base.with_h(h))).collect::<Result<Vec<_>>>()?;
    let pts: Vec<_> = rows.iter().map(|r| (r.h, r.lambda1, r.lambda1_half_width)).collect();
    let (lambda1_slope, lambda1_slope_ci, _) = fit_slope(&pts)?;
    let l2: Vec<f64> = rows.iter().map(|r| r.lambda2).collect();
    let max = l2.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = l2.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean = l2.iter().sum::<f64>() / l2.len() as f64;
    Ok(TauSweep { rows, lambda1_slope, lambda1_slope_ci, lambda2_spread: (max - min) / mean })
}

/// Deterministic collisional Verlet runs for the energy-error study.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EnergyDriftConfig {
    pub potential: Potential,
    /// `None` for the unconfined case.
    pub domain: Option<Domain>,
    pub initial: InitialCondition,
    #[serde(rename = "T")]
    pub t_final: f64,
    /// Trajectories; only meaningful when the momentum is random.
    #[serde(rename = "M")]
    pub m: usize,
    pub seed: u64,
    #[serde(default)]
    pub collisions: CollisionLimit,
}

/// `|E H(Q_N,P_N) − E H(Q₀,P₀)|` for `BAcB` at one `h`, estimated from the
/// paired per-trajectory differences.
pub fn energy_drift_row(cfg: &EnergyDriftConfig, h: f64) -> Result<EstimatorReport> {
    let dim = cfg.initial.dim();
    let domain = cfg.domain.clone().unwrap_or(Domain::Free { dim });
    let random = matches!(cfg.initial.p, MomentumInit::Gaussian { .. });
    let m = if random { cfg.m.max(1) } else { 1 };
    let u = cfg.potential.clone();
    let energy = move |s: &PhaseState| u.value(&s.q) + 0.5 * s.p.iter().map(|x| x * x).sum::<f64>();
    let sim = SimulationConfig {
        scheme: SchemeId::BAcB,
        domain,
        dynamics: DynamicsSpec::langevin(cfg.potential.clone(), 0.0, 1.0),
        t_final: cfg.t_final,
        h,
        m,
        seed: cfg.seed,
        burn_in: 0.0,
        collisions: cfg.collisions,
        noise: NoiseLaw::Gaussian,
        initial: cfg.initial.clone(),
    };
    sim.validate()?;
    let n = sim.steps()?;
    let integ = sim.integrator()?;
    let moments = ensemble(m, |k| {
        let mut rng = trajectory_rng(sim.seed, k);
        let start = sim.initial.sample(&mut rng);
        let (end, collisions, rejected) = simulate(&sim, &integ, n, k, &mut integ.workspace())?;
        Ok(Sample { value: energy(&end) - energy(&start), collisions, rejected })
    })?;
    let mut r = moments.report(h, m, Some(0.0))?;
    r.error = Some(r.mean.abs());
    Ok(r)
}

/// [`energy_drift_row`] over a sweep, with the fitted slope.
pub fn energy_drift_study(cfg: &EnergyDriftConfig, h_list: &[f64]) -> Result<ConvergenceReport> {
    let hs = check_h_list(cfg.t_final, h_list)?;
    let rows = hs.iter().map(|&h| energy_drift_row(cfg, h)).collect::<Result<Vec<_>>>()?;
    finish(rows)
}

/// Runs `f` on a pool with `threads` workers (all cores when `None`).
pub fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match threads {
        None => Ok(f()),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| Error::Config(format!("thread pool: {e}"))),
    }
}
