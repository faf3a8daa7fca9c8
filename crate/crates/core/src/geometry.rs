//! Confinement domains: membership, first exit along a ray, outward normals
//! and the specular reflection map.
//!
//! Every boundary query is solved in closed form. Flat faces give linear
//! roots and circles/spheres give quadratic roots; nothing is iterated.
//! A ray only registers a hit where it *leaves* the domain, so a point that
//! was just reflected off a face (and therefore sits on it, moving inward)
//! never re-detects the face it came from.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Points closer than this to the boundary count as boundary points.
pub const BOUNDARY_TOL: f64 = 1e-12;

/// Hits with `|p·n| < GRAZING_TOL·|p|` are ignored.
pub const GRAZING_TOL: f64 = 1e-12;

const UNIT_NORMAL_TOL: f64 = 1e-8;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn default_dim() -> usize {
    2
}

/// The open region `G` in which positions are confined.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Domain {
    /// `(a, b)` in one dimension.
    Interval { a: f64, b: f64 },
    /// `(a, ∞)` in one dimension.
    HalfLine { a: f64 },
    /// `{q : q[axis] > a}` in `dim` dimensions.
    HalfSpace { dim: usize, axis: usize, a: f64 },
    /// Open ball of radius `r` centred at the origin.
    Ball {
        r: f64,
        #[serde(default = "default_dim")]
        dim: usize,
    },
    /// Planar annulus `r1 < |q| < r2`.
    Annulus { r1: f64, r2: f64 },
    /// Axis-aligned box `lo < q < hi`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `(a, b)` along `axis`, unconstrained along the other `dim - 1` axes.
    Product { dim: usize, axis: usize, a: f64, b: f64 },
    /// Intersection of half-spaces `{q : normals[i]·q < offsets[i]}`.
    /// Normals point outward and need not be unit length.
    Polytope {
        normals: Vec<Vec<f64>>,
        offsets: Vec<f64>,
    },
    /// All of `ℝ^dim`; no boundary.
    Free { dim: usize },
}

/// First boundary crossing of a ray.
#[derive(Debug, Clone, PartialEq)]
pub struct RayHit {
    pub tau: f64,
    pub point: Vec<f64>,
    /// Unit outward normal at `point`.
    pub normal: Vec<f64>,
}

/// Identifies the boundary piece hit by a ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Face {
    /// `q[axis] = lo`, outward normal `-e_axis`.
    Lower(usize),
    /// `q[axis] = hi`, outward normal `+e_axis`.
    Upper(usize),
    /// Sphere bounding the domain from outside.
    Outer,
    /// Inner circle of an annulus.
    Inner,
    Facet(usize),
}

/// Time to leave through a flat face whose outward-normal velocity is `vn`
/// and whose signed gap (positive inside) is `gap`.
#[inline]
fn flat_exit(gap: f64, vn: f64, graze: f64) -> Option<f64> {
    if vn > graze {
        Some((gap / vn).max(f64::MIN_POSITIVE))
    } else {
        None
    }
}

#[inline]
fn consider(best: &mut Option<(f64, Face)>, s: f64, face: Face, s_max: f64) {
    if s <= s_max && best.is_none_or(|(b, _)| s < b) {
        *best = Some((s, face));
    }
}

impl Domain {
    pub fn interval(a: f64, b: f64) -> Self {
        Domain::Interval { a, b }
    }

    pub fn half_line(a: f64) -> Self {
        Domain::HalfLine { a }
    }

    pub fn ball(r: f64, dim: usize) -> Self {
        Domain::Ball { r, dim }
    }

    pub fn annulus(r1: f64, r2: f64) -> Self {
        Domain::Annulus { r1, r2 }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } | Domain::HalfLine { .. } => 1,
            Domain::HalfSpace { dim, .. }
            | Domain::Ball { dim, .. }
            | Domain::Product { dim, .. }
            | Domain::Free { dim } => *dim,
            Domain::Annulus { .. } => 2,
            Domain::Box { lo, .. } => lo.len(),
            Domain::Polytope { normals, .. } => normals.first().map_or(0, Vec::len),
        }
    }

    /// Checks the shape parameters.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidDomain(msg));
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match self {
            Domain::Interval { a, b } => {
                if !(finite(&[*a, *b]) && a < b) {
                    return bad(format!("interval requires a < b, got ({a}, {b})"));
                }
            }
            Domain::HalfLine { a } => {
                if !a.is_finite() {
                    return bad("half-line endpoint must be finite".into());
                }
            }
            Domain::HalfSpace { dim, axis, a } => {
                if *dim == 0 || axis >= dim || !a.is_finite() {
                    return bad(format!("half-space axis {axis} invalid for dim {dim}"));
                }
            }
            Domain::Ball { r, dim } => {
                if *dim == 0 || !(r.is_finite() && *r > 0.0) {
                    return bad(format!("ball requires r > 0 and dim ≥ 1, got r = {r}"));
                }
            }
            Domain::Annulus { r1, r2 } => {
                if !(finite(&[*r1, *r2]) && 0.0 < *r1 && r1 < r2) {
                    return bad(format!("annulus requires 0 < r1 < r2, got ({r1}, {r2})"));
                }
            }
            Domain::Box { lo, hi } => {
                if lo.is_empty() || lo.len() != hi.len() {
                    return bad("box bounds must be non-empty and of equal length".into());
                }
                if !(finite(lo) && finite(hi)) || lo.iter().zip(hi).any(|(l, h)| l >= h) {
                    return bad("box requires lo < hi componentwise".into());
                }
            }
            Domain::Product { dim, axis, a, b } => {
                if axis >= dim || !(finite(&[*a, *b]) && a < b) {
                    return bad(format!("product requires axis < dim and a < b, got ({a}, {b})"));
                }
            }
            Domain::Polytope { normals, offsets } => {
                let d = self.dim();
                if normals.is_empty() || normals.len() != offsets.len() || d == 0 {
                    return bad("polytope needs one offset per non-empty normal".into());
                }
                for n in normals {
                    if n.len() != d || !finite(n) || norm(n) == 0.0 {
                        return bad("polytope normals must be finite, non-zero and equal-length".into());
                    }
                }
                if !finite(offsets) {
                    return bad("polytope offsets must be finite".into());
                }
            }
            Domain::Free { dim } => {
                if *dim == 0 {
                    return bad("free space needs dim ≥ 1".into());
                }
            }
        }
        Ok(())
    }

    fn check_dim(&self, v: &[f64]) -> Result<()> {
        if v.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: v.len() });
        }
        Ok(())
    }

    /// Signed clearance to the boundary: positive inside, negative outside.
    /// Exact Euclidean distance for every shape except the polytope interior,
    /// where it is the distance to the nearest supporting hyperplane.
    pub fn clearance(&self, q: &[f64]) -> f64 {
        match self {
            Domain::Interval { a, b } => (q[0] - a).min(b - q[0]),
            Domain::HalfLine { a } => q[0] - a,
            Domain::HalfSpace { axis, a, .. } => q[*axis] - a,
            Domain::Ball { r, .. } => r - norm(q),
            Domain::Annulus { r1, r2 } => {
                let rho = norm(q);
                (rho - r1).min(r2 - rho)
            }
            Domain::Box { lo, hi } => lo
                .iter()
                .zip(hi)
                .zip(q)
                .map(|((l, h), x)| (x - l).min(h - x))
                .fold(f64::INFINITY, f64::min),
            Domain::Product { axis, a, b, .. } => (q[*axis] - a).min(b - q[*axis]),
            Domain::Polytope { normals, offsets } => normals
                .iter()
                .zip(offsets)
                .map(|(n, c)| (c - dot(n, q)) / norm(n))
                .fold(f64::INFINITY, f64::min),
            Domain::Free { .. } => f64::INFINITY,
        }
    }

    /// `true` iff `q` is in the open set; boundary points return `false`.
    pub fn contains(&self, q: &[f64]) -> Result<bool> {
        self.check_dim(q)?;
        Ok(self.clearance(q) > BOUNDARY_TOL)
    }

    /// Membership in the closure, with the boundary tolerance.
    pub fn in_closure(&self, q: &[f64]) -> bool {
        q.len() == self.dim() && self.clearance(q) >= -BOUNDARY_TOL
    }

    /// Smallest `s ∈ (0, s_max]` at which `q + s·p` leaves the domain.
    ///
    /// Unchecked fast path used by the collision step: `q` is assumed to be in
    /// the closure and dimensions are assumed to match.
    pub(crate) fn exit_time(&self, q: &[f64], p: &[f64], s_max: f64) -> Option<(f64, Face)> {
        if s_max <= 0.0 {
            return None;
        }
        let graze = GRAZING_TOL * norm(p);
        let mut best = None;
        match self {
            Domain::Interval { a, b } => {
                if let Some(s) = flat_exit(q[0] - a, -p[0], graze) {
                    consider(&mut best, s, Face::Lower(0), s_max);
                }
                if let Some(s) = flat_exit(b - q[0], p[0], graze) {
                    consider(&mut best, s, Face::Upper(0), s_max);
                }
            }
            Domain::HalfLine { a } => {
                if let Some(s) = flat_exit(q[0] - a, -p[0], graze) {
                    consider(&mut best, s, Face::Lower(0), s_max);
                }
            }
            Domain::HalfSpace { axis, a, .. } => {
                if let Some(s) = flat_exit(q[*axis] - a, -p[*axis], graze) {
                    consider(&mut best, s, Face::Lower(*axis), s_max);
                }
            }
            Domain::Product { axis, a, b, .. } => {
                let i = *axis;
                if let Some(s) = flat_exit(q[i] - a, -p[i], graze) {
                    consider(&mut best, s, Face::Lower(i), s_max);
                }
                if let Some(s) = flat_exit(b - q[i], p[i], graze) {
                    consider(&mut best, s, Face::Upper(i), s_max);
                }
            }
            Domain::Box { lo, hi } => {
                for i in 0..lo.len() {
                    if let Some(s) = flat_exit(q[i] - lo[i], -p[i], graze) {
                        consider(&mut best, s, Face::Lower(i), s_max);
                    }
                    if let Some(s) = flat_exit(hi[i] - q[i], p[i], graze) {
                        consider(&mut best, s, Face::Upper(i), s_max);
                    }
                }
            }
            Domain::Polytope { normals, offsets } => {
                for (i, (n, c)) in normals.iter().zip(offsets).enumerate() {
                    let nn = norm(n);
                    let vn = dot(n, p);
                    if vn > graze * nn {
                        let s = ((c - dot(n, q)) / vn).max(f64::MIN_POSITIVE);
                        consider(&mut best, s, Face::Facet(i), s_max);
                    }
                }
            }
            Domain::Ball { r, .. } => {
                if let Some(s) = sphere_exit(q, p, *r, graze) {
                    consider(&mut best, s, Face::Outer, s_max);
                }
            }
            Domain::Annulus { r1, r2 } => {
                if let Some(s) = sphere_exit(q, p, *r2, graze) {
                    consider(&mut best, s, Face::Outer, s_max);
                }
                if let Some(s) = disk_entry(q, p, *r1, graze) {
                    consider(&mut best, s, Face::Inner, s_max);
                }
            }
            Domain::Free { .. } => {}
        }
        best
    }

    /// Moves `x` exactly onto `face` (removing rounding drift).
    pub(crate) fn snap(&self, face: Face, x: &mut [f64]) {
        match (self, face) {
            (Domain::Interval { a, .. } | Domain::HalfLine { a }, Face::Lower(_)) => x[0] = *a,
            (Domain::Interval { b, .. }, Face::Upper(_)) => x[0] = *b,
            (Domain::HalfSpace { a, .. }, Face::Lower(i)) => x[i] = *a,
            (Domain::Product { a, .. }, Face::Lower(i)) => x[i] = *a,
            (Domain::Product { b, .. }, Face::Upper(i)) => x[i] = *b,
            (Domain::Box { lo, .. }, Face::Lower(i)) => x[i] = lo[i],
            (Domain::Box { hi, .. }, Face::Upper(i)) => x[i] = hi[i],
            (Domain::Ball { r, .. }, Face::Outer) | (Domain::Annulus { r2: r, .. }, Face::Outer) => {
                scale_to_radius(x, *r)
            }
            (Domain::Annulus { r1, .. }, Face::Inner) => scale_to_radius(x, *r1),
            (Domain::Polytope { normals, offsets }, Face::Facet(i)) => {
                let n = &normals[i];
                let excess = (dot(n, x) - offsets[i]) / dot(n, n);
                x.iter_mut().zip(n).for_each(|(xi, ni)| *xi -= excess * ni);
            }
            _ => {}
        }
    }

    /// Writes the unit outward normal of `face` at boundary point `x` into `out`.
    pub(crate) fn face_normal(&self, face: Face, x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        match face {
            Face::Lower(i) => out[i] = -1.0,
            Face::Upper(i) => out[i] = 1.0,
            Face::Outer | Face::Inner => {
                let sign = if face == Face::Outer { 1.0 } else { -1.0 };
                let rho = norm(x);
                out.iter_mut().zip(x).for_each(|(o, xi)| *o = sign * xi / rho);
            }
            Face::Facet(i) => {
                if let Domain::Polytope { normals, .. } = self {
                    let n = &normals[i];
                    let nn = norm(n);
                    out.iter_mut().zip(n).for_each(|(o, ni)| *o = ni / nn);
                }
            }
        }
    }

    /// First boundary hit of the segment `q + s·p`, `s ∈ (0, s_max]`.
    ///
    /// Returns `None` if the segment stays in the domain.
    pub fn first_hit(&self, q: &[f64], p: &[f64], s_max: f64) -> Result<Option<RayHit>> {
        self.check_dim(q)?;
        self.check_dim(p)?;
        if !(s_max > 0.0 && s_max.is_finite()) {
            return Err(Error::ContractViolation(format!("s_max must be positive, got {s_max}")));
        }
        if p.iter().all(|v| *v == 0.0) || p.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidRay);
        }
        if !self.in_closure(q) {
            return Err(Error::OutOfDomain { point: q.to_vec() });
        }
        Ok(self.exit_time(q, p, s_max).map(|(tau, face)| {
            let mut point: Vec<f64> = q.iter().zip(p).map(|(x, v)| x + tau * v).collect();
            self.snap(face, &mut point);
            let mut normal = vec![0.0; point.len()];
            self.face_normal(face, &point, &mut normal);
            RayHit { tau, point, normal }
        }))
    }

    /// Closest point of the closure to `q` (the identity for points inside).
    ///
    /// For points outside a convex domain this is the nearest boundary point.
    pub fn project(&self, q: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(q)?;
        let mut x = q.to_vec();
        match self {
            Domain::Interval { a, b } => x[0] = x[0].clamp(*a, *b),
            Domain::HalfLine { a } => x[0] = x[0].max(*a),
            Domain::HalfSpace { axis, a, .. } => x[*axis] = x[*axis].max(*a),
            Domain::Product { axis, a, b, .. } => x[*axis] = x[*axis].clamp(*a, *b),
            Domain::Box { lo, hi } => {
                for i in 0..x.len() {
                    x[i] = x[i].clamp(lo[i], hi[i]);
                }
            }
            Domain::Ball { r, .. } => {
                if norm(&x) > *r {
                    scale_to_radius(&mut x, *r);
                }
            }
            Domain::Annulus { r1, r2 } => {
                let rho = norm(&x);
                if rho > *r2 {
                    scale_to_radius(&mut x, *r2);
                } else if rho < *r1 {
                    if rho == 0.0 {
                        x = vec![*r1, 0.0];
                    } else {
                        scale_to_radius(&mut x, *r1);
                    }
                }
            }
            Domain::Polytope { normals, offsets } => {
                if self.clearance(&x) < 0.0 {
                    x = project_polytope(normals, offsets, q)?;
                }
            }
            Domain::Free { .. } => {}
        }
        Ok(x)
    }
}

fn scale_to_radius(x: &mut [f64], r: f64) {
    let rho = norm(x);
    if rho > 0.0 {
        let k = r / rho;
        x.iter_mut().for_each(|v| *v *= k);
    }
}

/// Exit time through a sphere of radius `r` that bounds the domain from outside.
/// Uses the larger quadratic root, written to avoid cancellation.
#[inline]
fn sphere_exit(q: &[f64], p: &[f64], r: f64, graze: f64) -> Option<f64> {
    let a = dot(p, p);
    if a == 0.0 {
        return None;
    }
    let b = dot(q, p);
    let c = dot(q, q) - r * r;
    let disc = b * b - a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // |p·n| at the exit point equals sq / r.
    if sq < graze * r {
        return None;
    }
    let s = if b > 0.0 { -c / (b + sq) } else { (sq - b) / a };
    Some(s.max(f64::MIN_POSITIVE))
}

/// Time at which the ray enters the disk `|x| < r` (leaving an annulus).
#[inline]
fn disk_entry(q: &[f64], p: &[f64], r: f64, graze: f64) -> Option<f64> {
    let b = dot(q, p);
    if b >= 0.0 {
        return None;
    }
    let a = dot(p, p);
    let c = dot(q, q) - r * r;
    let disc = b * b - a * c;
    if disc <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    if sq < graze * r {
        return None;
    }
    Some((c / (sq - b)).max(f64::MIN_POSITIVE))
}

/// Specular reflection `p - 2(p·n)n` about the unit normal `n`.
pub fn reflect(p: &[f64], n: &[f64]) -> Result<Vec<f64>> {
    if p.len() != n.len() {
        return Err(Error::DimensionMismatch { expected: p.len(), got: n.len() });
    }
    let nn = norm(n);
    if (nn - 1.0).abs() > UNIT_NORMAL_TOL {
        return Err(Error::ContractViolation(format!("reflection normal has norm {nn}")));
    }
    let mut out = p.to_vec();
    reflect_in_place(&mut out, n);
    Ok(out)
}

#[inline]
pub(crate) fn reflect_in_place(p: &mut [f64], n: &[f64]) {
    let k = 2.0 * dot(p, n);
    p.iter_mut().zip(n).for_each(|(pi, ni)| *pi -= k * ni);
}

/// Euclidean projection onto `{x : n_i·x ≤ c_i}` by active-set enumeration.
/// Polytopes here have a handful of facets, so trying every active set of
/// size ≤ d is cheap and exact.
fn project_polytope(normals: &[Vec<f64>], offsets: &[f64], q: &[f64]) -> Result<Vec<f64>> {
    let m = normals.len();
    let d = q.len();
    let feasible = |x: &[f64]| {
        normals
            .iter()
            .zip(offsets)
            .all(|(n, c)| dot(n, x) - c <= BOUNDARY_TOL * norm(n).max(1.0))
    };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mask in 1u64..(1u64 << m) {
        let active: Vec<usize> = (0..m).filter(|i| mask & (1 << i) != 0).collect();
        if active.len() > d {
            continue;
        }
        // Solve (N Nᵀ) λ = N q − c for the active rows, then x = q − Nᵀ λ.
        let k = active.len();
        let mut gram = vec![vec![0.0; k + 1]; k];
        for (r, &i) in active.iter().enumerate() {
            for (s, &j) in active.iter().enumerate() {
                gram[r][s] = dot(&normals[i], &normals[j]);
            }
            gram[r][k] = dot(&normals[i], q) - offsets[i];
        }
        let Some(lambda) = solve_augmented(gram) else { continue };
        if lambda.iter().any(|l| *l < -1e-14) {
            continue;
        }
        let mut x = q.to_vec();
        for (l, &i) in lambda.iter().zip(&active) {
            x.iter_mut().zip(&normals[i]).for_each(|(xi, ni)| *xi -= l * ni);
        }
        if !feasible(&x) {
            continue;
        }
        let dist: f64 = x.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum();
        if best.as_ref().is_none_or(|(bd, _)| dist < *bd) {
            best = Some((dist, x));
        }
    }
    best.map(|(_, x)| x)
        .ok_or_else(|| Error::InvalidDomain("polytope projection found no feasible point".into()))
}

/// Gaussian elimination with partial pivoting on an augmented `k × (k+1)` system.
fn solve_augmented(mut a: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let k = a.len();
    for col in 0..k {
        let piv = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-14 {
            return None;
        }
        a.swap(col, piv);
        for row in col + 1..k {
            let f = a[row][col] / a[col][col];
            for c in col..=k {
                a[row][c] -= f * a[col][c];
            }
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let s: f64 = (row + 1..k).map(|c| a[row][c] * x[c]).sum();
        x[row] = (a[row][k] - s) / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn contains_examples() {
        assert!(Domain::ball(2.0, 2).contains(&[1.0, 1.0]).unwrap());
        assert!(!Domain::half_line(0.0).contains(&[0.0]).unwrap());
        assert!(Domain::annulus(1.0, 2.0).contains(&[1.5, 0.0]).unwrap());
        assert!(!Domain::annulus(1.0, 2.0).contains(&[0.5, 0.0]).unwrap());
        assert!(matches!(
            Domain::ball(2.0, 2).contains(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, got: 1 })
        ));
    }

    #[test]
    fn annulus_takes_inner_circle_first() {
        let d = Domain::annulus(1.0, 2.0);
        let hit = d.first_hit(&[1.5, 0.0], &[-1.0, 0.0], 10.0).unwrap().unwrap();
        assert!((hit.tau - 0.5).abs() < 1e-15);
        assert_eq!(hit.point, vec![1.0, 0.0]);
        assert_eq!(hit.normal, vec![-1.0, 0.0]);
    }

    #[test]
    fn half_line_linear_root() {
        let hit = Domain::half_line(0.0).first_hit(&[0.5], &[-1.0], 1.0).unwrap().unwrap();
        assert_eq!(hit.tau, 0.5);
        assert_eq!(hit.point, vec![0.0]);
        assert_eq!(hit.normal, vec![-1.0]);
    }

    #[test]
    fn interior_segment_has_no_hit() {
        let d = Domain::ball(2.0, 2);
        assert!(d.first_hit(&[1.0, 1.0], &[-0.1, -0.1], 0.5).unwrap().is_none());
    }

    #[test]
    fn first_hit_errors() {
        let d = Domain::ball(2.0, 2);
        assert_eq!(d.first_hit(&[1.0, 1.0], &[0.0, 0.0], 1.0), Err(Error::InvalidRay));
        assert!(matches!(d.first_hit(&[3.0, 0.0], &[1.0, 0.0], 1.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn reflect_examples() {
        assert_eq!(reflect(&[1.0, 0.0], &[1.0, 0.0]).unwrap(), vec![-1.0, 0.0]);
        assert_eq!(reflect(&[1.0, 1.0], &[0.0, 1.0]).unwrap(), vec![1.0, -1.0]);
        let r = reflect(&[0.6, 0.8], &[1.0, 0.0]).unwrap();
        assert_eq!(r, vec![-0.6, 0.8]);
        assert!((norm(&r) - 1.0).abs() < 1e-15);
        assert!(matches!(reflect(&[1.0, 0.0], &[2.0, 0.0]), Err(Error::ContractViolation(_))));
    }

    #[test]
    fn ray_from_boundary_ignores_the_face_it_leaves() {
        // Sitting on the inner circle and moving outward: the next exit is the
        // outer circle, not the starting point.
        let d = Domain::annulus(1.0, 2.0);
        let hit = d.first_hit(&[1.0, 0.0], &[1.0, 0.0], 5.0).unwrap().unwrap();
        assert!((hit.tau - 1.0).abs() < 1e-15);
        assert_eq!(hit.normal, vec![1.0, 0.0]);
        // On the ball's surface moving inward: the hit is the far side.
        let b = Domain::ball(2.0, 2);
        let hit = b.first_hit(&[2.0, 0.0], &[-1.0, 0.0], 10.0).unwrap().unwrap();
        assert!((hit.tau - 4.0).abs() < 1e-14);
    }

    #[test]
    fn boundary_start_moving_outward_hits_immediately() {
        let d = Domain::half_line(0.0);
        let hit = d.first_hit(&[0.0], &[-1.0], 1.0).unwrap().unwrap();
        assert!(hit.tau > 0.0 && hit.tau < 1e-300);
    }

    #[test]
    fn grazing_ray_is_not_a_hit() {
        let d = Domain::ball(1.0, 2);
        // Tangent at (0, 1): the ray touches but never leaves.
        let tangent = d.exit_time(&[0.0, 1.0], &[1.0, 0.0], 1.0);
        assert!(tangent.is_none());
    }

    #[test]
    fn box_corner_is_two_face_hits() {
        let d = Domain::Box { lo: vec![0.0, 0.0], hi: vec![1.0, 1.0] };
        let hit = d.first_hit(&[0.5, 0.5], &[1.0, 1.0], 1.0).unwrap().unwrap();
        assert!((hit.tau - 0.5).abs() < 1e-15);
        // The reflected ray on the corner still leaves through the other face.
        let p = reflect(&[1.0, 1.0], &hit.normal).unwrap();
        let again = d.first_hit(&hit.point, &p, 0.5).unwrap().unwrap();
        assert!(again.tau < 1e-300);
    }

    #[test]
    fn projections() {
        assert_eq!(Domain::half_line(0.0).project(&[-0.3]).unwrap(), vec![0.0]);
        assert_eq!(Domain::ball(2.0, 2).project(&[0.0, 3.0]).unwrap(), vec![0.0, 2.0]);
        assert_eq!(Domain::annulus(1.0, 2.0).project(&[0.5, 0.0]).unwrap(), vec![1.0, 0.0]);
        // Cone {η > 1.5 α, α > 0}.
        let cone = Domain::Polytope { normals: vec![vec![-1.0, 1.5], vec![0.0, -1.0]], offsets: vec![0.0, 0.0] };
        assert_eq!(cone.project(&[1.0, -1.0]).unwrap(), vec![1.0, 0.0]);
        let apex = cone.project(&[-1.0, -1.0]).unwrap();
        assert!(norm(&apex) < 1e-15);
        let x = cone.project(&[0.0, 1.0]).unwrap();
        assert!((x[0] - 1.5 * x[1]).abs() < 1e-12);
        let inside = cone.project(&[1.0, 0.1]).unwrap();
        assert_eq!(inside, vec![1.0, 0.1]);
    }

    #[test]
    fn validation() {
        assert!(Domain::annulus(2.0, 1.0).validate().is_err());
        assert!(Domain::interval(1.0, 1.0).validate().is_err());
        assert!(Domain::Box { lo: vec![0.0, 1.0], hi: vec![1.0, 1.0] }.validate().is_err());
        assert!(Domain::ball(2.0, 2).validate().is_ok());
    }

    #[test]
    fn config_shape_schema() {
        let d: Domain = serde_json::from_str(r#"{"shape": "annulus", "r1": 1.0, "r2": 2.0}"#).unwrap();
        assert_eq!(d, Domain::annulus(1.0, 2.0));
        let b: Domain = serde_json::from_str(r#"{"shape": "ball", "r": 2.0}"#).unwrap();
        assert_eq!(b, Domain::ball(2.0, 2));
    }
}
