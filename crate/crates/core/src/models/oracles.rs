//! Closed-form and quadrature reference values.

use std::f64::consts::PI;

use super::quadrature::{integrate, integrate_2d};
use crate::error::{Error, Result};
use crate::geometry::Domain;
use crate::schemes::PotentialField;

fn sq_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

/// `(q+c)² e^{−p²} e^{−(T−t)}`: backward solution for drift `1/(q+c) + p`,
/// `σ = 1` on the half-line.
pub fn inverse_drift_u(t: f64, q: f64, p: f64, c: f64, big_t: f64) -> f64 {
    (q + c).powi(2) * (-p * p).exp() * (-(big_t - t)).exp()
}

/// `exp(−β(|p|²/2 + U(q)) − α d (T−t))`: backward solution for the
/// anti-damped drift `−∇U + αp` with `σ = √(2α/β)`.
pub fn unstable_ou_u(
    t: f64,
    q: &[f64],
    p: &[f64],
    alpha: f64,
    beta: f64,
    u: &dyn PotentialField,
    big_t: f64,
) -> f64 {
    let d = q.len() as f64;
    (-beta * (0.5 * sq_norm(p) + u.value(q)) - alpha * d * (big_t - t)).exp()
}

/// `|p|⁴ + |p|² + sin|q|² + 2d(T−t)`: backward solution for the rational
/// drift `−(q cos|q|² + 2(d+2)p)/(2|p|²+1)` with `σ = √2`.
pub fn rational_drift_u(t: f64, q: &[f64], p: &[f64], big_t: f64) -> f64 {
    let p2 = sq_norm(p);
    p2 * p2 + p2 + sq_norm(q).sin() + 2.0 * q.len() as f64 * (big_t - t)
}

/// Backward solution of `u_t + p u_q − q u_p − p u_p + u_pp = 0` on the
/// half-line with terminal value `q² − 1`. Unlike the others it is not even
/// in `p` away from the wall.
pub fn damped_oscillator_u(t: f64, q: f64, p: f64, big_t: f64) -> f64 {
    let s = big_t - t;
    let e = (-s).exp();
    let w = 3f64.sqrt() * s;
    (2.0 / 3.0) * (q * q + p * p + q * p - 2.0) * e
        + (1.0 / 3.0) * (q * q - 2.0 * p * p - 2.0 * q * p + 1.0) * e * w.cos()
        + (2.0 * q * p + q * q - 1.0) * e * w.sin() / 3f64.sqrt()
}

/// Free-space transition density of `dq = p dt`, `dp = −γp dt + √(2γ) dW`.
fn free_density(t: f64, q: f64, p: f64, q0: f64, p0: f64, gamma: f64) -> f64 {
    let e1 = (-gamma * t).exp();
    let e2 = e1 * e1;
    let sqq = 2.0 / (gamma * gamma) * (gamma * t - 1.5 + 2.0 * e1 - 0.5 * e2);
    let spp = 1.0 - e2;
    let sqp = (1.0 - e1).powi(2) / gamma;
    let det = sqq * spp - sqp * sqp;
    let dq = q - (q0 + p0 / gamma * (1.0 - e1));
    let dp = p - p0 * e1;
    let quad = (spp * dq * dq - 2.0 * sqp * dq * dp + sqq * dp * dp) / det;
    (-0.5 * quad).exp() / (2.0 * PI * det.sqrt())
}

/// Transition density on `(0,1) × ℝ` with specular walls, as a sum over
/// mirror images `|n| ≤ n_images`. Zero potential, `β = 1`.
pub fn fp_image_density(t: f64, q: f64, p: f64, q0: f64, p0: f64, gamma: f64, n_images: usize) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::ContractViolation(format!("image density needs t > 0, got {t}")));
    }
    if n_images == 0 || !(gamma > 0.0) {
        return Err(Error::ContractViolation("need n_images ≥ 1 and γ > 0".into()));
    }
    let n = n_images as i64;
    Ok((-n..=n)
        .map(|k| {
            let shift = 2.0 * k as f64;
            free_density(t, q, p, q0 + shift, p0, gamma) + free_density(t, q, p, -q0 + shift, -p0, gamma)
        })
        .sum())
}

/// Mean of `|q|²` under the density `∝ e^{k|q|²}` on the planar disk of
/// radius `r`.
pub fn disk_exponential_moment(k: f64, r: f64) -> f64 {
    let a = k * r * r;
    // r² e^a/(e^a − 1) − 1/k, written to stay finite for large a.
    r * r / (-(-a).exp_m1()) - 1.0 / k
}

/// Gibbs average `∫ φ e^{−βU} / ∫ e^{−βU}` of a position observable over the
/// domain. Momentum factors out of the Gibbs density, so only a
/// configurational integral is needed. Supports one- and two-dimensional
/// domains.
pub fn gibbs_average(
    u: &dyn PotentialField,
    beta: f64,
    domain: &Domain,
    phi: &dyn Fn(&[f64]) -> f64,
) -> Result<f64> {
    domain.validate()?;
    let shift = reference_energy(u, domain);
    let w = |q: &[f64]| (-beta * (u.value(q) - shift)).exp();
    // Two passes: a rough normaliser fixes the scale for a 1e-9 relative target.
    let rough = configurational(domain, &|q| w(q), 1e-6)?;
    if !(rough > 0.0 && rough.is_finite()) {
        return Err(Error::EstimationFailure("Gibbs weight does not normalise".into()));
    }
    let tol = 1e-11 * rough;
    let z = configurational(domain, &|q| w(q), tol)?;
    let num = configurational(domain, &|q| phi(q) * w(q), tol * 10.0)?;
    Ok(num / z)
}

/// Lowest potential on a coarse grid, used to keep `e^{−βU}` near unity.
fn reference_energy(u: &dyn PotentialField, domain: &Domain) -> f64 {
    let samples: Vec<Vec<f64>> = match domain {
        Domain::Interval { a, b } => (0..=40).map(|i| vec![a + (b - a) * i as f64 / 40.0]).collect(),
        Domain::HalfLine { a } => (0..=40).map(|i| vec![a + 0.25 * i as f64]).collect(),
        Domain::Ball { r, dim: 2 } | Domain::Annulus { r2: r, .. } => (0..=20)
            .flat_map(|i| (0..=20).map(move |j| vec![-r + 2.0 * r * i as f64 / 20.0, -r + 2.0 * r * j as f64 / 20.0]))
            .filter(|q| domain.in_closure(q))
            .collect(),
        Domain::Box { lo, hi } if lo.len() == 2 => (0..=20)
            .flat_map(|i| {
                (0..=20).map(move |j| {
                    vec![lo[0] + (hi[0] - lo[0]) * i as f64 / 20.0, lo[1] + (hi[1] - lo[1]) * j as f64 / 20.0]
                })
            })
            .collect(),
        _ => vec![vec![0.0; domain.dim()]],
    };
    samples.iter().map(|q| u.value(q)).filter(|v| v.is_finite()).fold(f64::INFINITY, f64::min).min(1e300)
}

fn configurational(domain: &Domain, f: &dyn Fn(&[f64]) -> f64, tol: f64) -> Result<f64> {
    match domain {
        Domain::Interval { a, b } => integrate(|x| f(&[x]), *a, *b, tol),
        Domain::HalfLine { a } => integrate(|x| f(&[x]), *a, f64::INFINITY, tol),
        Domain::Free { dim: 1 } => integrate(|x| f(&[x]), f64::NEG_INFINITY, f64::INFINITY, tol),
        Domain::Ball { r, dim: 1 } => integrate(|x| f(&[x]), -r, *r, tol),
        Domain::Ball { r, dim: 2 } => polar(f, 0.0, *r, tol),
        Domain::Annulus { r1, r2 } => polar(f, *r1, *r2, tol),
        Domain::Box { lo, hi } if lo.len() == 2 => {
            integrate_2d(|x, y| f(&[x, y]), lo[0], hi[0], |_| lo[1], |_| hi[1], tol)
        }
        other => Err(Error::Unsupported(format!("Gibbs quadrature on {other:?}"))),
    }
}

fn polar(f: &dyn Fn(&[f64]) -> f64, r0: f64, r1: f64, tol: f64) -> Result<f64> {
    integrate_2d(
        |rho, th| rho * f(&[rho * th.cos(), rho * th.sin()]),
        r0,
        r1,
        |_| 0.0,
        |_| 2.0 * PI,
        tol,
    )
}

/// Stationary mean of the funnel potential on `(−3, 1) × ℝ⁸`.
///
/// Integrating out `x` leaves `θ` with density `∝ e^{−θ²/18}` on `(−3, 1)`,
/// and `½e^{−θ}|x|²` has conditional mean `4` (eight dimensions, `β = 1`).
pub fn funnel_mean_potential() -> Result<f64> {
    let w = |t: f64| (-t * t / 18.0).exp();
    let z = integrate(w, -3.0, 1.0, 1e-13)?;
    let m1 = integrate(|t| t * w(t), -3.0, 1.0, 1e-13)? / z;
    let m2 = integrate(|t| t * t * w(t), -3.0, 1.0, 1e-13)? / z;
    Ok(m2 / 18.0 + 4.0 * m1 + 4.0)
}
