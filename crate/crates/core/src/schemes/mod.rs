//! Elementary sub-steps and the splitting integrators built from them.
//!
//! Sub-step letters:
//! * `A_c` free flight `q += s·p` with specular reflection at every boundary hit,
//! * `B` force kick `p -= h·∇U(q)`,
//! * `O` exact solution of `dp = a·p dt + σ dW`,
//! * `P` Euler momentum update `p += h·b(q,p) + √h·σ·ξ`.

mod dynamics;
mod noise;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dynamics::{DriftField, DriftForm, DynamicsSpec, Potential, PotentialField};
pub use noise::{trajectory_rng, FixedNoise, NoiseLaw, NoiseSource, RandomNoise, ZeroNoise};

use crate::error::{Error, Result};
use crate::geometry::{self, Domain};

/// Position and momentum of one walker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub q: Vec<f64>,
    pub p: Vec<f64>,
}

impl PhaseState {
    pub fn new(q: Vec<f64>, p: Vec<f64>) -> Self {
        Self { q, p }
    }
}

/// Integrator identifiers. Serialised by their short names (`obabo`, `baoab`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum SchemeId {
    PAc,
    AcP,
    OBAcBO,
    BAcOAcB,
    OAcBAcO,
    BOAcOB,
    AcBOBAc,
    AcOBOAc,
    /// Collisional Störmer–Verlet `B(h/2) A_c(h) B(h/2)`.
    BAcB,
    /// Projected Euler for overdamped dynamics.
    Pla,
    /// Symmetrised-reflection Euler for overdamped dynamics.
    Rla,
}

impl SchemeId {
    pub const ALL: [SchemeId; 11] = [
        SchemeId::PAc,
        SchemeId::AcP,
        SchemeId::OBAcBO,
        SchemeId::BAcOAcB,
        SchemeId::OAcBAcO,
        SchemeId::BOAcOB,
        SchemeId::AcBOBAc,
        SchemeId::AcOBOAc,
        SchemeId::BAcB,
        SchemeId::Pla,
        SchemeId::Rla,
    ];

    /// Short lower-case name used on the command line.
    pub fn short_name(self) -> &'static str {
        match self {
            SchemeId::PAc => "pa",
            SchemeId::AcP => "ap",
            SchemeId::OBAcBO => "obabo",
            SchemeId::BAcOAcB => "baoab",
            SchemeId::OAcBAcO => "oabao",
            SchemeId::BOAcOB => "boaob",
            SchemeId::AcBOBAc => "aboba",
            SchemeId::AcOBOAc => "aobao",
            SchemeId::BAcB => "bab",
            SchemeId::Pla => "pla",
            SchemeId::Rla => "rla",
        }
    }

    pub fn is_overdamped(self) -> bool {
        matches!(self, SchemeId::Pla | SchemeId::Rla)
    }

    fn layout(self, h: f64) -> Vec<(Kind, f64)> {
        use Kind::*;
        let half = 0.5 * h;
        match self {
            SchemeId::PAc => vec![(Euler, h), (Flight, h)],
            SchemeId::AcP => vec![(Flight, h), (Euler, h)],
            SchemeId::OBAcBO => vec![(Ou, half), (Kick, half), (Flight, h), (Kick, half), (Ou, half)],
            SchemeId::BAcOAcB => vec![(Kick, half), (Flight, half), (Ou, h), (Flight, half), (Kick, half)],
            SchemeId::OAcBAcO => vec![(Ou, half), (Flight, half), (Kick, h), (Flight, half), (Ou, half)],
            SchemeId::BOAcOB => vec![(Kick, half), (Ou, half), (Flight, h), (Ou, half), (Kick, half)],
            SchemeId::AcBOBAc => vec![(Flight, half), (Kick, half), (Ou, h), (Kick, half), (Flight, half)],
            SchemeId::AcOBOAc => vec![(Flight, half), (Ou, half), (Kick, h), (Ou, half), (Flight, half)],
            SchemeId::BAcB => vec![(Kick, half), (Flight, h), (Kick, half)],
            SchemeId::Pla | SchemeId::Rla => vec![],
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl From<SchemeId> for String {
    fn from(s: SchemeId) -> String {
        s.short_name().to_string()
    }
}

impl TryFrom<String> for SchemeId {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        let id = match key.as_str() {
            "pa" | "pac" => SchemeId::PAc,
            "ap" | "acp" => SchemeId::AcP,
            "obabo" | "obacbo" => SchemeId::OBAcBO,
            "baoab" | "bacoacb" => SchemeId::BAcOAcB,
            "oabao" | "oacbaco" => SchemeId::OAcBAcO,
            "boaob" | "boacob" => SchemeId::BOAcOB,
            "aboba" | "acbobac" => SchemeId::AcBOBAc,
            "aobao" | "acoboac" => SchemeId::AcOBOAc,
            "bab" | "bacb" | "verlet" | "bacbdeterministic" => SchemeId::BAcB,
            "pla" => SchemeId::Pla,
            "rla" => SchemeId::Rla,
            _ => return Err(Error::Config(format!("unknown scheme `{s}`"))),
        };
        Ok(id)
    }
}

/// What happens when a single flight exceeds the collision cap.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CapPolicy {
    /// Undo the step and flag the trajectory.
    #[default]
    Reject,
    /// Stop at the last boundary point (momentum already reflected) and
    /// drop the remaining flight time.
    Truncate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionLimit {
    pub max: usize,
    #[serde(default)]
    pub policy: CapPolicy,
}

impl Default for CollisionLimit {
    fn default() -> Self {
        Self { max: 64, policy: CapPolicy::Reject }
    }
}

/// Result of one step, with the post-step state.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: PhaseState,
    pub collisions: usize,
    pub rejected: bool,
    /// Time of the first boundary hit, measured in flight time from the start
    /// of the step.
    pub first_collision_time: Option<f64>,
}

/// Collision bookkeeping for an in-place step.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepEvents {
    pub collisions: usize,
    pub rejected: bool,
    pub first_collision_time: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Flight,
    Kick,
    Ou,
    Euler,
}

#[derive(Debug, Clone, Copy)]
enum Sub {
    Flight(f64),
    Kick(f64),
    Ou { decay: f64, std: f64 },
    Euler { h: f64, noise: f64 },
}

/// Scratch buffers reused across steps; one per trajectory or per thread.
#[derive(Debug, Clone, Default)]
pub struct Workspace {
    grad: Vec<f64>,
    grad_at: Vec<f64>,
    grad_valid: bool,
    buf: Vec<f64>,
    q0: Vec<f64>,
    p0: Vec<f64>,
}

impl Workspace {
    pub fn new(dim: usize) -> Self {
        Self {
            grad: vec![0.0; dim],
            grad_at: vec![0.0; dim],
            grad_valid: false,
            buf: vec![0.0; dim],
            q0: vec![0.0; dim],
            p0: vec![0.0; dim],
        }
    }

    /// Forget the cached gradient (needed if the potential changes).
    pub fn invalidate(&mut self) {
        self.grad_valid = false;
    }
}

/// Decay factor and noise standard deviation of the exact `O` update over
/// time `h`: `p ← p·e^{ah} + std·ξ`.
pub fn ou_coefficients(a: f64, h: f64, sigma: f64) -> (f64, f64) {
    let decay = (a * h).exp();
    let var = if (a * h).abs() < 1e-10 {
        sigma * sigma * h
    } else {
        sigma * sigma * (2.0 * a * h).exp_m1() / (2.0 * a)
    };
    (decay, var.max(0.0).sqrt())
}

/// Single exact `O` update of a momentum vector with the given draws.
pub fn o_step(p: &[f64], h_eff: f64, a: f64, sigma: f64, xi: &[f64]) -> Vec<f64> {
    let (decay, std) = ou_coefficients(a, h_eff, sigma);
    p.iter().zip(xi).map(|(pi, x)| decay * pi + std * x).collect()
}

/// `p ← p − h_eff·∇U(q)`.
pub fn b_step(state: &PhaseState, h_eff: f64, potential: &dyn PotentialField) -> Result<PhaseState> {
    let mut g = vec![0.0; state.q.len()];
    potential.gradient(&state.q, &mut g);
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric { what: "gradient", location: state.q.clone() });
    }
    let p = state.p.iter().zip(&g).map(|(pi, gi)| pi - h_eff * gi).collect();
    Ok(PhaseState { q: state.q.clone(), p })
}

/// `p ← p + h·b(q,p) + √h·σ·ξ`.
pub fn p_step(
    state: &PhaseState,
    h: f64,
    drift: &dyn DriftField,
    sigma: f64,
    xi: &[f64],
) -> Result<PhaseState> {
    let mut b = vec![0.0; state.q.len()];
    drift.drift(&state.q, &state.p, &mut b);
    if b.iter().any(|v| !v.is_finite()) {
        return Err(Error::Numeric { what: "drift", location: state.q.clone() });
    }
    let s = h.sqrt() * sigma;
    let p = state.p.iter().zip(&b).zip(xi).map(|((pi, bi), x)| pi + h * bi + s * x).collect();
    Ok(PhaseState { q: state.q.clone(), p })
}

/// Free flight over time `h` with specular reflections.
pub fn a_c_step(domain: &Domain, state: &PhaseState, h: f64, max_collisions: usize) -> Result<StepOutcome> {
    if state.q.len() != domain.dim() || state.p.len() != domain.dim() {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: state.q.len() });
    }
    if !(h > 0.0) || max_collisions == 0 {
        return Err(Error::ContractViolation("a_c_step needs h > 0 and max_collisions ≥ 1".into()));
    }
    if !domain.in_closure(&state.q) {
        return Err(Error::OutOfDomain { point: state.q.clone() });
    }
    let mut out = state.clone();
    let mut normal = vec![0.0; state.q.len()];
    let limit = CollisionLimit { max: max_collisions, policy: CapPolicy::Reject };
    let ev = flight(domain, &mut out.q, &mut out.p, h, limit, &mut normal);
    if ev.rejected {
        out = state.clone();
    }
    Ok(StepOutcome {
        state: out,
        collisions: ev.collisions,
        rejected: ev.rejected,
        first_collision_time: ev.first_collision_time,
    })
}

/// Core of the `A_c` step. On rejection `q`, `p` hold garbage and the caller
/// restores them.
#[inline]
fn flight(
    domain: &Domain,
    q: &mut [f64],
    p: &mut [f64],
    dur: f64,
    limit: CollisionLimit,
    normal: &mut [f64],
) -> StepEvents {
    let mut ev = StepEvents::default();
    let mut left = dur;
    loop {
        match domain.exit_time(q, p, left) {
            None => {
                q.iter_mut().zip(p.iter()).for_each(|(x, v)| *x += left * v);
                return ev;
            }
            Some((s, face)) => {
                ev.collisions += 1;
                if ev.collisions > limit.max {
                    if limit.policy == CapPolicy::Reject {
                        ev.rejected = true;
                    }
                    return ev;
                }
                q.iter_mut().zip(p.iter()).for_each(|(x, v)| *x += s * v);
                domain.snap(face, q);
                domain.face_normal(face, q, normal);
                geometry::reflect_in_place(p, normal);
                if ev.first_collision_time.is_none() {
                    ev.first_collision_time = Some(dur - left + s);
                }
                left -= s;
                if left <= 0.0 {
                    return ev;
                }
            }
        }
    }
}

/// A scheme bound to a domain, dynamics and step size, with all
/// step-size-dependent coefficients precomputed.
#[derive(Debug, Clone)]
pub struct Integrator {
    scheme: SchemeId,
    domain: Domain,
    dynamics: DynamicsSpec,
    h: f64,
    limit: CollisionLimit,
    subs: Vec<Sub>,
}

impl Integrator {
    pub fn new(
        scheme: SchemeId,
        domain: Domain,
        dynamics: DynamicsSpec,
        h: f64,
        limit: CollisionLimit,
    ) -> Result<Self> {
        check_compatible(scheme, &dynamics)?;
        domain.validate()?;
        dynamics.validate()?;
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::Config(format!("step size must be positive, got {h}")));
        }
        if limit.max == 0 {
            return Err(Error::Config("collision cap must be at least 1".into()));
        }
        let sigma = dynamics.sigma();
        let a = dynamics.linear_rate().unwrap_or(0.0);
        let subs = scheme
            .layout(h)
            .into_iter()
            .map(|(kind, dur)| match kind {
                Kind::Flight => Sub::Flight(dur),
                Kind::Kick => Sub::Kick(dur),
                Kind::Ou => {
                    let (decay, std) = ou_coefficients(a, dur, sigma);
                    Sub::Ou { decay, std }
                }
                Kind::Euler => Sub::Euler { h: dur, noise: dur.sqrt() * sigma },
            })
            .collect();
        Ok(Self { scheme, domain, dynamics, h, limit, subs })
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn dynamics(&self) -> &DynamicsSpec {
        &self.dynamics
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn workspace(&self) -> Workspace {
        Workspace::new(self.domain.dim())
    }

    /// Advances `state` by one step in place. On rejection the state is
    /// restored to its value at the start of the step.
    pub fn advance<N: NoiseSource + ?Sized>(
        &self,
        state: &mut PhaseState,
        noise: &mut N,
        ws: &mut Workspace,
    ) -> Result<StepEvents> {
        let d = state.q.len();
        if ws.buf.len() != d {
            *ws = Workspace::new(d);
        }
        ws.q0.copy_from_slice(&state.q);
        ws.p0.copy_from_slice(&state.p);
        let mut ev = StepEvents::default();
        let mut flown = 0.0;
        for sub in &self.subs {
            match *sub {
                Sub::Flight(dur) => {
                    let f = flight(&self.domain, &mut state.q, &mut state.p, dur, self.limit, &mut ws.buf);
                    ev.collisions += f.collisions;
                    if ev.first_collision_time.is_none() {
                        ev.first_collision_time = f.first_collision_time.map(|t| t + flown);
                    }
                    flown += dur;
                    if f.rejected {
                        state.q.copy_from_slice(&ws.q0);
                        state.p.copy_from_slice(&ws.p0);
                        ws.grad_valid = false;
                        ev.rejected = true;
                        return Ok(ev);
                    }
                }
                Sub::Kick(dur) => {
                    self.refresh_gradient(&state.q, ws)?;
                    state.p.iter_mut().zip(&ws.grad).for_each(|(p, g)| *p -= dur * g);
                }
                Sub::Ou { decay, std } => {
                    for p in state.p.iter_mut() {
                        *p = decay * *p + std * noise.draw();
                    }
                }
                Sub::Euler { h, noise: s } => {
                    self.dynamics.drift(&state.q, &state.p, &mut ws.buf);
                    if ws.buf.iter().any(|v| !v.is_finite()) {
                        return Err(Error::Numeric { what: "drift", location: state.q.clone() });
                    }
                    for (p, b) in state.p.iter_mut().zip(&ws.buf) {
                        *p += h * b + s * noise.draw();
                    }
                }
            }
        }
        if state.p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric { what: "momentum", location: state.q.clone() });
        }
        Ok(ev)
    }

    #[inline]
    fn refresh_gradient(&self, q: &[f64], ws: &mut Workspace) -> Result<()> {
        if ws.grad_valid && ws.grad_at == q {
            return Ok(());
        }
        if let Some(u) = self.dynamics.potential() {
            u.gradient(q, &mut ws.grad);
        }
        if ws.grad.iter().any(|v| !v.is_finite()) {
            ws.grad_valid = false;
            return Err(Error::Numeric { what: "gradient", location: q.to_vec() });
        }
        ws.grad_at.copy_from_slice(q);
        ws.grad_valid = true;
        Ok(())
    }
}

/// Rejects scheme/dynamics pairs that cannot be integrated together.
pub fn check_compatible(scheme: SchemeId, dynamics: &DynamicsSpec) -> Result<()> {
    if scheme.is_overdamped() {
        return Err(Error::Config(format!(
            "`{scheme}` integrates overdamped dynamics; use the sir sampler instead"
        )));
    }
    match (scheme, dynamics) {
        (SchemeId::PAc | SchemeId::AcP, _) => Ok(()),
        (_, DynamicsSpec::General { .. }) => Err(Error::Config(format!(
            "splitting scheme `{scheme}` needs a potential (langevin or unstable_ou dynamics), not a general drift"
        ))),
        (SchemeId::BAcB, d) if d.sigma() != 0.0 || d.linear_rate() != Some(0.0) => {
            Err(Error::Config("`bab` is deterministic: it needs zero friction and zero noise".into()))
        }
        _ => Ok(()),
    }
}

/// One step of `scheme` from `state` with noise drawn from `noise`.
pub fn step<N: NoiseSource + ?Sized>(
    scheme: SchemeId,
    domain: &Domain,
    dynamics: &DynamicsSpec,
    state: &PhaseState,
    h: f64,
    noise: &mut N,
) -> Result<StepOutcome> {
    let integ = Integrator::new(scheme, domain.clone(), dynamics.clone(), h, CollisionLimit::default())?;
    if !domain.in_closure(&state.q) {
        return Err(Error::OutOfDomain { point: state.q.clone() });
    }
    let mut s = state.clone();
    let mut ws = integ.workspace();
    let ev = integ.advance(&mut s, noise, &mut ws)?;
    Ok(StepOutcome { state: s, collisions: ev.collisions, rejected: ev.rejected, first_collision_time: ev.first_collision_time })
}

/// Determinant of the one-step `OBAcBO` map `(z₁, z₂) ↦ (Q, P)` on a half-line,
/// where `z₁`, `z₂` are the two O-step draws. Central differences with step
/// `1e-6`.
pub fn obabo_jacobian_1d(
    dynamics: &DynamicsSpec,
    domain: &Domain,
    q: f64,
    p: f64,
    h: f64,
    z1: f64,
    z2: f64,
) -> Result<f64> {
    if !matches!(domain, Domain::HalfLine { .. }) {
        return Err(Error::Config("the one-step Jacobian is defined on a half-line".into()));
    }
    let limit = CollisionLimit { max: 1, policy: CapPolicy::Reject };
    let integ = Integrator::new(SchemeId::OBAcBO, domain.clone(), dynamics.clone(), h, limit)?;
    let mut ws = integ.workspace();
    let mut map = |a: f64, b: f64| -> Result<(f64, f64, usize)> {
        let mut s = PhaseState::new(vec![q], vec![p]);
        let ev = integ.advance(&mut s, &mut FixedNoise::new(vec![a, b]), &mut ws)?;
        if ev.rejected {
            return Err(Error::SingularConfiguration("more than one collision in the step".into()));
        }
        Ok((s.q[0], s.p[0], ev.collisions))
    };
    let e = 1e-6;
    let centre = map(z1, z2)?;
    let pts = [map(z1 + e, z2)?, map(z1 - e, z2)?, map(z1, z2 + e)?, map(z1, z2 - e)?];
    if pts.iter().any(|x| x.2 != centre.2) {
        return Err(Error::SingularConfiguration(format!("z1 = {z1} is at the switching point")));
    }
    let dq1 = (pts[0].0 - pts[1].0) / (2.0 * e);
    let dp1 = (pts[0].1 - pts[1].1) / (2.0 * e);
    let dq2 = (pts[2].0 - pts[3].0) / (2.0 * e);
    let dp2 = (pts[2].1 - pts[3].1) / (2.0 * e);
    Ok(dq1 * dp2 - dq2 * dp1)
}
