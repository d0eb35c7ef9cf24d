//! Spherical sampling, direction nets, support functions, and certified
//! two-sided Hausdorff bounds for convex hulls of finite point sets.
//!
//! Everything here works on the support-function side: for a finite set R,
//! `h(R, u) = max_{p in R} <u, p>` is the support of conv(R) in direction
//! `u`, and `u -> h(R, u)` is Lipschitz on the sphere with constant
//! `max_{p in R} |p|`. Evaluating supports on a delta-covering of the sphere
//! therefore pins down support-based quantities to within an explicit
//! Lipschitz correction, which is what turns sampled maxima into certified
//! enclosures.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::{stream_rng, DEFAULT_STREAM, NET_STREAM, VERIFY_STREAM};

/// Tolerance for "exactly unit norm" checks.
pub const UNIT_TOL: f64 = 1e-12;

/// Default cap on the estimated cardinality of a direction net.
pub const DEFAULT_NET_BUDGET: usize = 2_000_000;

/// Number of random probes used to check the covering property in d >= 3.
const VERIFY_PROBES: usize = 100_000;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_sq(v: &[f64]) -> f64 {
    dot(v, v)
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    norm_sq(v).sqrt()
}

pub(crate) fn dist_sq(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn check_finite(coords: &[f64]) -> Result<()> {
    if coords.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("coordinates must be finite"));
    }
    Ok(())
}

/// A unit vector in dimension >= 2.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Direction {
    coords: Vec<f64>,
}

impl Direction {
    /// Wraps coordinates that are already unit-norm (within `UNIT_TOL`).
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.len() < 2 {
            return Err(Error::invalid("directions need dimension >= 2"));
        }
        check_finite(&coords)?;
        let n = norm(&coords);
        if (n - 1.0).abs() > UNIT_TOL {
            return Err(Error::invalid(format!(
                "direction norm {n} is not within {UNIT_TOL} of 1"
            )));
        }
        Ok(Direction { coords })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        if v.len() < 2 {
            return Err(Error::invalid("directions need dimension >= 2"));
        }
        check_finite(v)?;
        let n = norm(v);
        if n < 1e-300 {
            return Err(Error::invalid("cannot normalize the zero vector"));
        }
        Ok(Direction {
            coords: v.iter().map(|c| c / n).collect(),
        })
    }

    /// The `axis`-th standard basis vector in dimension `dim`.
    pub fn axis(dim: usize, axis: usize) -> Result<Self> {
        if dim < 2 || axis >= dim {
            return Err(Error::invalid(format!(
                "axis {axis} does not exist in dimension {dim}"
            )));
        }
        let mut coords = vec![0.0; dim];
        coords[axis] = 1.0;
        Ok(Direction { coords })
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dot(&self, p: &[f64]) -> f64 {
        dot(&self.coords, p)
    }
}

/// A finite list of points sharing one dimension, stored flat.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointCloud {
    dim: usize,
    spherical: bool,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn new(dim: usize, points: &[Vec<f64>]) -> Result<Self> {
        let mut coords = Vec::with_capacity(dim * points.len());
        for p in points {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            coords.extend_from_slice(p);
        }
        Self::from_flat(dim, coords)
    }

    pub fn from_flat(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("point dimension must be positive"));
        }
        if coords.len() % dim != 0 {
            return Err(Error::invalid(format!(
                "flat buffer of length {} is not a multiple of dimension {dim}",
                coords.len()
            )));
        }
        check_finite(&coords)?;
        Ok(PointCloud {
            dim,
            spherical: false,
            coords,
        })
    }

    /// Marks the cloud as lying on the unit sphere, after checking norms.
    pub fn into_spherical(mut self) -> Result<Self> {
        for p in self.points() {
            let n = norm(p);
            if (n - 1.0).abs() > UNIT_TOL {
                return Err(Error::invalid(format!(
                    "spherical cloud contains a point of norm {n}"
                )));
            }
        }
        self.spherical = true;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn is_spherical(&self) -> bool {
        self.spherical
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn flat(&self) -> &[f64] {
        &self.coords
    }

    /// Largest point norm (zero for an empty cloud).
    pub fn max_norm(&self) -> f64 {
        self.points().map(norm).fold(0.0, f64::max)
    }

    /// Rescales every point by `1 / scale`.
    pub fn scaled(&self, scale: f64) -> Result<Self> {
        if !(scale.is_finite() && scale != 0.0) {
            return Err(Error::invalid(format!("bad scale {scale}")));
        }
        Ok(PointCloud {
            dim: self.dim,
            spherical: false,
            coords: self.coords.iter().map(|c| c / scale).collect(),
        })
    }
}

/// A closed interval used to report two-sided certified bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::invalid(format!("bad interval [{lo}, {hi}]")));
        }
        Ok(Interval { lo, hi })
    }

    pub fn width(self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }
}

/// How the covering property of a [`DirectionNet`] was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum NetVerification {
    /// d = 2: every angular gap between consecutive members was checked.
    Proven,
    /// d >= 3: no failure among `VERIFY_PROBES` random probe directions.
    ProbabilisticallyChecked,
}

/// A maximal delta-packing of the unit sphere, hence a delta-covering:
/// members are pairwise more than `delta` apart, and construction stops only
/// once no candidate direction lies farther than `delta` from all members.
#[derive(Debug, Clone, Serialize)]
pub struct DirectionNet {
    dim: usize,
    delta: f64,
    verification: NetVerification,
    directions: Vec<Direction>,
}

impl DirectionNet {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn len(&self) -> usize {
        self.directions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.directions.is_empty()
    }

    pub fn directions(&self) -> &[Direction] {
        &self.directions
    }

    pub fn verification(&self) -> NetVerification {
        self.verification
    }
}

/// Draws one uniform unit vector by normalizing an isotropic Gaussian.
pub(crate) fn gaussian_direction(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample(StandardNormal)).collect();
        let n = norm(&v);
        if n > 1e-8 {
            return v.iter().map(|c| c / n).collect();
        }
    }
}

pub(crate) fn sample_sphere_with(rng: &mut ChaCha8Rng, dim: usize, n: usize) -> PointCloud {
    let mut coords = Vec::with_capacity(dim * n);
    for _ in 0..n {
        coords.extend_from_slice(&gaussian_direction(rng, dim));
    }
    PointCloud {
        dim,
        spherical: true,
        coords,
    }
}

/// Samples `n` independent uniform points on the unit sphere in dimension
/// `d` (isotropic Gaussian, normalized). Deterministic in `seed`.
pub fn sample_sphere(d: usize, n: usize, seed: u64) -> Result<PointCloud> {
    sample_sphere_stream(d, n, seed, DEFAULT_STREAM)
}

/// [`sample_sphere`] on an explicit RNG stream: reproduces the cloud a
/// seeded experiment trial drew, given the stream its record names.
pub fn sample_sphere_stream(d: usize, n: usize, seed: u64, stream: u64) -> Result<PointCloud> {
    if d < 2 {
        return Err(Error::invalid(format!("sphere dimension {d} must be >= 2")));
    }
    let mut rng = stream_rng(seed, stream);
    Ok(sample_sphere_with(&mut rng, d, n))
}

fn nearest_member_sq(members: &[f64], dim: usize, p: &[f64]) -> f64 {
    members
        .chunks_exact(dim)
        .map(|m| dist_sq(m, p))
        .fold(f64::INFINITY, f64::min)
}

/// Builds a maximal delta-packing of the sphere in dimension `d` with the
/// default size budget. See [`build_delta_net_with_budget`].
pub fn build_delta_net(d: usize, delta: f64, seed: u64) -> Result<DirectionNet> {
    build_delta_net_with_budget(d, delta, seed, DEFAULT_NET_BUDGET)
}

/// Builds a maximal delta-packing of the sphere in dimension `d`.
///
/// Greedy farthest-point insertion over a large pool of rejection-sampled
/// candidate directions, followed by a covering check that inserts any
/// uncovered direction it finds (such a direction is a legal packing member)
/// and repeats until the check passes. In d = 2 the check is exact: sorted
/// angular gaps must not exceed `4 asin(delta/2)`. In d >= 3 it draws
/// 100 000 probe directions.
///
/// Refuses instances whose estimated net cardinality `(4/delta)^(d-1)`
/// exceeds `budget`.
pub fn build_delta_net_with_budget(
    d: usize,
    delta: f64,
    seed: u64,
    budget: usize,
) -> Result<DirectionNet> {
    if d < 2 {
        return Err(Error::invalid(format!("net dimension {d} must be >= 2")));
    }
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::invalid(format!("net delta {delta} must be positive")));
    }
    let est = (4.0 / delta).max(1.0).powi(d as i32 - 1);
    if est > budget as f64 {
        return Err(Error::resource(format!(
            "estimated net size {est:.0} for (d = {d}, delta = {delta}) exceeds budget {budget}"
        )));
    }

    let pool_len = ((48.0 * est) as usize).clamp(4096, 300_000);
    let mut rng = stream_rng(seed, NET_STREAM);
    let mut pool = Vec::with_capacity(pool_len * d);
    for _ in 0..pool_len {
        pool.extend_from_slice(&gaussian_direction(&mut rng, d));
    }

    let delta_sq = delta * delta;
    let mut members: Vec<f64> = Vec::new();
    members.extend_from_slice(&pool[0..d]);
    let mut nearest: Vec<f64> = pool
        .chunks_exact(d)
        .map(|p| dist_sq(p, &members[0..d]))
        .collect();

    loop {
        let (far_idx, far_sq) = nearest
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| {
                if v > bv {
                    (i, v)
                } else {
                    (bi, bv)
                }
            });
        if far_sq <= delta_sq {
            break;
        }
        let candidate = pool[far_idx * d..(far_idx + 1) * d].to_vec();
        members.extend_from_slice(&candidate);
        if members.len() / d > budget {
            return Err(Error::resource(format!(
                "net for (d = {d}, delta = {delta}) grew past budget {budget}"
            )));
        }
        for (i, p) in pool.chunks_exact(d).enumerate() {
            let ds = dist_sq(p, &candidate);
            if ds < nearest[i] {
                nearest[i] = ds;
            }
        }
    }

    let verification = if d == 2 {
        repair_circle(&mut members, delta)?;
        NetVerification::Proven
    } else {
        repair_probed(&mut members, d, delta, seed, budget)?;
        NetVerification::ProbabilisticallyChecked
    };

    let directions = members
        .chunks_exact(d)
        .map(|m| Direction::new(m.to_vec()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DirectionNet {
        dim: d,
        delta,
        verification,
        directions,
    })
}

/// Exact covering repair on the circle: a gap of angular width `g` is
/// covered iff `g <= 4 asin(delta/2)`; the midpoint of an uncovered gap is
/// more than `delta` from both endpoints, so inserting it preserves the
/// packing property.
fn repair_circle(members: &mut Vec<f64>, delta: f64) -> Result<()> {
    use std::f64::consts::TAU;
    let max_gap = if delta >= 2.0 {
        TAU
    } else {
        4.0 * (delta / 2.0).asin()
    };
    for _ in 0..1_000_000 {
        let mut angles: Vec<f64> = members
            .chunks_exact(2)
            .map(|m| m[1].atan2(m[0]))
            .collect();
        angles.sort_by(f64::total_cmp);
        let k = angles.len();
        let mut worst = (0.0, 0.0);
        for i in 0..k {
            let next = if i + 1 == k {
                angles[0] + TAU
            } else {
                angles[i + 1]
            };
            let gap = next - angles[i];
            if gap > worst.0 {
                worst = (gap, angles[i] + 0.5 * gap);
            }
        }
        if worst.0 <= max_gap || k == 0 {
            return Ok(());
        }
        members.push(worst.1.cos());
        members.push(worst.1.sin());
    }
    Err(Error::invalid("circle covering repair failed to converge"))
}

/// Monte Carlo covering repair for d >= 3: any probe farther than `delta`
/// from every member is itself a legal packing member and is inserted;
/// the pass repeats until a full batch of probes is covered.
fn repair_probed(
    members: &mut Vec<f64>,
    d: usize,
    delta: f64,
    seed: u64,
    budget: usize,
) -> Result<()> {
    let delta_sq = delta * delta;
    let mut rng = stream_rng(seed, VERIFY_STREAM);
    for _ in 0..1000 {
        let mut inserted = false;
        for _ in 0..VERIFY_PROBES {
            let probe = gaussian_direction(&mut rng, d);
            if nearest_member_sq(members, d, &probe) > delta_sq {
                members.extend_from_slice(&probe);
                inserted = true;
                if members.len() / d > budget {
                    return Err(Error::resource(format!(
                        "net for (d = {d}, delta = {delta}) grew past budget {budget}"
                    )));
                }
            }
        }
        if !inserted {
            return Ok(());
        }
    }
    Err(Error::invalid("probe covering repair failed to converge"))
}

/// Support of conv(R) in direction `u`: the largest dot product.
pub fn support_points(cloud: &PointCloud, u: &Direction) -> Result<f64> {
    if cloud.is_empty() {
        return Err(Error::invalid("support of an empty point set"));
    }
    if cloud.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            got: u.dim(),
        });
    }
    Ok(cloud
        .points()
        .map(|p| u.dot(p))
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Certified enclosure of the Hausdorff distance between conv(A) and
/// conv(B).
///
/// On convex bodies, `d_H(conv A, conv B) = sup_u |h(A,u) - h(B,u)|`. The
/// maximum over the net is a lower bound; since both supports are Lipschitz
/// with constants `max|a|` and `max|b|`, the sup over the whole sphere
/// exceeds the net maximum by at most `(max|a| + max|b|) * delta`.
pub fn hausdorff_certified(a: &PointCloud, b: &PointCloud, net: &DirectionNet) -> Result<Interval> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::invalid("hausdorff distance of an empty point set"));
    }
    if a.dim() != b.dim() || a.dim() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: if a.dim() != net.dim() { a.dim() } else { b.dim() },
        });
    }
    let mut lo = 0.0f64;
    for u in net.directions() {
        let ha = support_points(a, u)?;
        let hb = support_points(b, u)?;
        lo = lo.max((ha - hb).abs());
    }
    let hi = lo + (a.max_norm() + b.max_norm()) * net.delta();
    Interval::new(lo, hi)
}

/// Certified ball approximation from net support values.
///
/// If `K` is contained in the unit ball, `0 < lambda <= 1`, `0 < eta < 1`,
/// the net is a delta-covering with `delta <= min(lambda, eta)`, and every
/// net support value satisfies `|h(K,u) - lambda| <= eta * lambda`, then
/// `d_H(K / lambda, B(0,1)) <= 5 * eta`. Returns the certified bound
/// `5 * eta`, or `None` when the deviation test fails.
///
/// `support` must list `h(K, u)` for the net directions in order, for a
/// body `K` inside the unit ball; [`certified_ball_bound`] checks that
/// containment for finite point sets and delegates here.
pub fn certified_ball_bound_from_support(
    support: &[f64],
    lambda: f64,
    eta: f64,
    net: &DirectionNet,
) -> Result<Option<f64>> {
    if support.len() != net.len() {
        return Err(Error::invalid(format!(
            "{} support values for a net of {} directions",
            support.len(),
            net.len()
        )));
    }
    if !(lambda > 0.0 && lambda <= 1.0) {
        return Err(Error::invalid(format!("lambda {lambda} must lie in (0, 1]")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta {eta} must lie in (0, 1)")));
    }
    if net.delta() > lambda.min(eta) {
        return Err(Error::precondition(format!(
            "net delta {} exceeds min(lambda, eta) = {}",
            net.delta(),
            lambda.min(eta)
        )));
    }
    let dev = support
        .iter()
        .map(|h| (h - lambda).abs())
        .fold(0.0, f64::max);
    if dev <= eta * lambda {
        Ok(Some(5.0 * eta))
    } else {
        Ok(None)
    }
}

/// Certified ball approximation for the convex hull of a finite set inside
/// the unit ball. See [`certified_ball_bound_from_support`].
pub fn certified_ball_bound(
    k: &PointCloud,
    lambda: f64,
    eta: f64,
    net: &DirectionNet,
) -> Result<Option<f64>> {
    if k.is_empty() {
        return Err(Error::invalid("certificate for an empty point set"));
    }
    if k.dim() != net.dim() {
        return Err(Error::DimensionMismatch {
            expected: net.dim(),
            got: k.dim(),
        });
    }
    let max_norm = k.max_norm();
    if max_norm > 1.0 + UNIT_TOL {
        return Err(Error::precondition(format!(
            "point of norm {max_norm} lies outside the unit ball"
        )));
    }
    let support: Vec<f64> = net
        .directions()
        .iter()
        .map(|u| support_points(k, u))
        .collect::<Result<Vec<_>>>()?;
    certified_ball_bound_from_support(&support, lambda, eta, net)
}
