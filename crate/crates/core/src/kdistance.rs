//! Distance to the k nearest points, its power-distance representation, and
//! the power-diagram structure of weighted sites.
//!
//! For a cloud P and 1 <= k <= |P|, the k-distance of x is the square root
//! of the mean of the k smallest squared distances from x to P. The same
//! function has an exact power-distance form: over the k-subsets S of P,
//!
//! `d(x)^2 = min_S ( |x - c(S)|^2 + w(S) )`,
//!
//! where `c(S)` is the centroid of S and `w(S) = (1/k) sum_{p in S}
//! |c(S) - p|^2` (the parallel-axis identity). This module builds such
//! weighted-site representations (exact or witnessed), evaluates the
//! associated distance-like functions, and inspects their behaviour at
//! infinity through the power diagram of the sites.

use itertools::Itertools;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{dist_sq, norm_sq, Direction, PointCloud};
use crate::lp::{self, LpOutcome};

/// Strict-margin threshold: LP margins above this count as strictly positive.
pub const MARGIN_THRESHOLD: f64 = 1e-9;

/// Default cap on the number of enumerated k-subsets.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 2_000_000;

/// A point cloud together with the size of the neighbor set.
#[derive(Debug, Clone, Serialize)]
pub struct KDistSpec {
    cloud: PointCloud,
    k: usize,
}

impl KDistSpec {
    pub fn new(cloud: PointCloud, k: usize) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::invalid("k-distance needs a nonempty cloud"));
        }
        if k == 0 || k > cloud.len() {
            return Err(Error::invalid(format!(
                "k = {k} must lie in 1..={}",
                cloud.len()
            )));
        }
        Ok(KDistSpec { cloud, k })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// Weighted sites (q_i, w_i) of a distance-like function
/// `x -> sqrt( min_i |x - q_i|^2 + w_i )` with nonnegative weights.
#[derive(Debug, Clone, Serialize)]
pub struct WeightedSites {
    dim: usize,
    coords: Vec<f64>,
    weights: Vec<f64>,
}

impl WeightedSites {
    pub fn new(dim: usize, sites: &[Vec<f64>], weights: Vec<f64>) -> Result<Self> {
        let points = PointCloud::new(dim, sites)?;
        Self::from_cloud(&points, weights)
    }

    pub fn from_cloud(points: &PointCloud, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid("weighted sites need at least one site"));
        }
        if points.len() != weights.len() {
            return Err(Error::invalid(format!(
                "{} sites but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if weights.iter().any(|w| !(w.is_finite() && *w >= 0.0)) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        Ok(WeightedSites {
            dim: points.dim(),
            coords: points.flat().to_vec(),
            weights,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn site(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn sites(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim)
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn site_cloud(&self) -> PointCloud {
        PointCloud::from_flat(self.dim, self.coords.clone()).expect("sites were validated")
    }

    /// `max_i (w_i + |q_i|^2)`, the constant governing behaviour at infinity:
    /// along a ray t*u, `t - phi(t u)` approaches the support of the site
    /// hull in direction u with remainder at most this constant over t.
    pub fn power_constant(&self) -> f64 {
        self.sites()
            .zip(&self.weights)
            .map(|(q, w)| w + norm_sq(q))
            .fold(0.0, f64::max)
    }
}

/// How to turn a k-distance into weighted sites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SitePolicy {
    /// One site per k-subset: the representation is exact.
    FullEnumeration,
    /// One site per sample point, from the centroid of its k nearest
    /// neighbors (the point itself included). The resulting function upper
    /// bounds the k-distance and agrees with it on the sample.
    Witnessed,
}

/// B(n, k) if it does not exceed `cap`.
fn binomial_capped(n: usize, k: usize, cap: u64) -> Option<u64> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc > cap as u128 {
            return None;
        }
    }
    Some(acc as u64)
}

fn check_query(dim: usize, x: &[f64]) -> Result<()> {
    if x.len() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: x.len(),
        });
    }
    if x.iter().any(|c| !c.is_finite()) {
        return Err(Error::invalid("query point must be finite"));
    }
    Ok(())
}

/// The k-distance: sqrt of the mean of the k smallest squared distances
/// from `x` to the cloud.
pub fn eval_kdistance(spec: &KDistSpec, x: &[f64]) -> Result<f64> {
    check_query(spec.cloud.dim(), x)?;
    let mut d2: Vec<f64> = spec.cloud.points().map(|p| dist_sq(p, x)).collect();
    let k = spec.k;
    if k < d2.len() {
        d2.select_nth_unstable_by(k - 1, f64::total_cmp);
    }
    let mean = d2[..k].iter().sum::<f64>() / k as f64;
    Ok(mean.sqrt())
}

/// Builds the weighted sites of a power-distance representation of the
/// k-distance, exact (all k-subsets) or witnessed (one site per point).
///
/// Full enumeration refuses instances with more than
/// [`DEFAULT_ENUMERATION_BUDGET`] subsets; see
/// [`centroid_sites_with_budget`].
pub fn centroid_sites(spec: &KDistSpec, policy: SitePolicy) -> Result<WeightedSites> {
    centroid_sites_with_budget(spec, policy, DEFAULT_ENUMERATION_BUDGET)
}

/// [`centroid_sites`] with an explicit cap on the number of enumerated
/// subsets.
pub fn centroid_sites_with_budget(
    spec: &KDistSpec,
    policy: SitePolicy,
    budget: u64,
) -> Result<WeightedSites> {
    let cloud = &spec.cloud;
    let (n, k, dim) = (cloud.len(), spec.k, cloud.dim());

    let centroid_and_weight = |indices: &[usize]| -> (Vec<f64>, f64) {
        let mut c = vec![0.0; dim];
        for &i in indices {
            for (acc, v) in c.iter_mut().zip(cloud.point(i)) {
                *acc += v;
            }
        }
        for acc in c.iter_mut() {
            *acc /= k as f64;
        }
        let w = indices
            .iter()
            .map(|&i| dist_sq(&c, cloud.point(i)))
            .sum::<f64>()
            / k as f64;
        (c, w)
    };

    let mut coords = Vec::new();
    let mut weights = Vec::new();
    match policy {
        SitePolicy::FullEnumeration => {
            let count = binomial_capped(n, k, budget).ok_or_else(|| {
                Error::resource(format!(
                    "B({n}, {k}) exceeds the enumeration budget {budget}"
                ))
            })?;
            coords.reserve(count as usize * dim);
            weights.reserve(count as usize);
            for subset in (0..n).combinations(k) {
                let (c, w) = centroid_and_weight(&subset);
                coords.extend_from_slice(&c);
                weights.push(w);
            }
        }
        SitePolicy::Witnessed => {
            let mut order: Vec<(f64, usize)> = Vec::with_capacity(n);
            for i in 0..n {
                order.clear();
                order.extend(
                    cloud
                        .points()
                        .enumerate()
                        .map(|(j, p)| (dist_sq(cloud.point(i), p), j)),
                );
                if k < n {
                    order.select_nth_unstable_by(k - 1, |a, b| {
                        a.0.total_cmp(&b.0).then(a.1.cmp(&b.1))
                    });
                }
                let indices: Vec<usize> = order[..k].iter().map(|&(_, j)| j).collect();
                let (c, w) = centroid_and_weight(&indices);
                coords.extend_from_slice(&c);
                weights.push(w);
            }
        }
    }

    WeightedSites::from_cloud(&PointCloud::from_flat(dim, coords)?, weights)
}

/// The distance-like function of weighted sites:
/// `sqrt( min_i |x - q_i|^2 + w_i )`.
pub fn eval_distance_like(sites: &WeightedSites, x: &[f64]) -> Result<f64> {
    check_query(sites.dim(), x)?;
    let best = sites
        .sites()
        .zip(sites.weights())
        .map(|(q, w)| dist_sq(q, x) + w)
        .fold(f64::INFINITY, f64::min);
    Ok(best.sqrt())
}

/// Support estimate from one far evaluation: `t - phi(t u)`.
///
/// As t grows this converges to the support of the site hull in direction
/// `u`, with error at most `power_constant() / t`.
pub fn ray_support_estimate(sites: &WeightedSites, u: &Direction, t: f64) -> Result<f64> {
    if u.dim() != sites.dim() {
        return Err(Error::DimensionMismatch {
            expected: sites.dim(),
            got: u.dim(),
        });
    }
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::invalid(format!("ray parameter t = {t} must be positive")));
    }
    let x: Vec<f64> = u.coords().iter().map(|c| c * t).collect();
    Ok(t - eval_distance_like(sites, &x)?)
}

/// Whether `q` is an extreme point (a vertex) of the convex hull of the
/// cloud. `q` must be a member of the cloud, compared exactly.
///
/// Decided by the margin linear program: maximize m subject to
/// `<u, p - q> <= -m` for all other points p, with `u` in the unit box;
/// `q` is extreme iff the optimal margin exceeds [`MARGIN_THRESHOLD`].
/// A point that occurs twice in the cloud is never extreme here, so callers
/// counting hull vertices should deduplicate first.
pub fn is_extreme(q: &[f64], cloud: &PointCloud) -> Result<bool> {
    check_query(cloud.dim(), q)?;
    if !cloud.points().any(|p| p == q) {
        return Err(Error::invalid("q is not a member of the cloud"));
    }
    let d = cloud.dim();
    // Variables (u_1 .. u_d, m).
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for p in cloud.points() {
        if p == q {
            continue;
        }
        let mut row: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        row.push(1.0);
        rows.push(row);
        rhs.push(0.0);
    }
    for i in 0..d {
        for sign in [1.0, -1.0] {
            let mut row = vec![0.0; d + 1];
            row[i] = sign;
            rows.push(row);
            rhs.push(1.0);
        }
    }
    let mut objective = vec![0.0; d + 1];
    objective[d] = 1.0;
    match lp::maximize(&objective, &rows, &rhs)? {
        LpOutcome::Optimal { value, .. } => Ok(value > MARGIN_THRESHOLD),
        // Only a singleton cloud leaves the margin unconstrained.
        LpOutcome::Unbounded => Ok(true),
        LpOutcome::Infeasible => Err(Error::invalid("margin program cannot be infeasible")),
    }
}

/// Whether some closed half-space through `q` contains the whole cloud,
/// i.e. `q` lies on the boundary of the convex hull.
pub fn on_hull_boundary(q: &[f64], cloud: &PointCloud) -> Result<bool> {
    check_query(cloud.dim(), q)?;
    let d = cloud.dim();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for p in cloud.points() {
        let row: Vec<f64> = p.iter().zip(q).map(|(a, b)| a - b).collect();
        if row.iter().all(|c| *c == 0.0) {
            continue;
        }
        rows.push(row);
        rhs.push(0.0);
    }
    nonzero_solution_exists(d, &rows, &rhs)
}

/// Whether `rows . u <= rhs` admits a solution with some coordinate pinned
/// to +-1. Since the system is a cone for rhs = 0, this decides whether it
/// contains any nonzero vector.
fn nonzero_solution_exists(d: usize, rows: &[Vec<f64>], rhs: &[f64]) -> Result<bool> {
    for axis in 0..d {
        for sign in [1.0, -1.0] {
            let mut all_rows = rows.to_vec();
            let mut all_rhs = rhs.to_vec();
            let mut pin = vec![0.0; d];
            pin[axis] = 1.0;
            all_rows.push(pin.clone());
            all_rhs.push(sign);
            for c in pin.iter_mut() {
                *c = -*c;
            }
            all_rows.push(pin);
            all_rhs.push(-sign);
            if lp::feasible(&all_rows, &all_rhs)? {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Classification of one power cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellStatus {
    Empty,
    Bounded,
    Unbounded,
}

/// Status of the power cell of site `i`: the set of x whose weighted
/// squared distance to site i is minimal, i.e.
/// `2 <x, q_j - q_i> <= |q_j|^2 - |q_i|^2 + w_j - w_i` for all j.
///
/// Emptiness is linear-program feasibility; an unbounded nonempty cell is
/// detected through its recession cone `{u : <u, q_j - q_i> <= 0}`, which
/// is nonzero iff the cell contains a full ray.
pub fn power_cell_status(i: usize, sites: &WeightedSites) -> Result<CellStatus> {
    if i >= sites.len() {
        return Err(Error::invalid(format!(
            "site index {i} out of range 0..{}",
            sites.len()
        )));
    }
    let d = sites.dim();
    let qi = sites.site(i).to_vec();
    let wi = sites.weight(i);
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    let mut cone_rows = Vec::new();
    let mut cone_rhs = Vec::new();
    for j in 0..sites.len() {
        if j == i {
            continue;
        }
        let qj = sites.site(j);
        let diff: Vec<f64> = qj.iter().zip(&qi).map(|(a, b)| a - b).collect();
        let bound = norm_sq(qj) - norm_sq(&qi) + sites.weight(j) - wi;
        rows.push(diff.iter().map(|c| 2.0 * c).collect());
        rhs.push(bound);
        if diff.iter().any(|c| *c != 0.0) {
            cone_rows.push(diff);
            cone_rhs.push(0.0);
        } else if bound < 0.0 {
            // A duplicate site with strictly smaller power kills the cell.
            return Ok(CellStatus::Empty);
        }
    }
    if !lp::feasible(&rows, &rhs)? {
        return Ok(CellStatus::Empty);
    }
    if nonzero_solution_exists(d, &cone_rows, &cone_rhs)? {
        Ok(CellStatus::Unbounded)
    } else {
        Ok(CellStatus::Bounded)
    }
}

/// Extreme points of the convex hull of the sites, in first-occurrence
/// order: the directions in which the distance-like function keeps the
/// memory of its sites at infinity. Weights play no role. Exact duplicate
/// sites are collapsed before testing.
pub fn trace_at_infinity(sites: &WeightedSites) -> Result<PointCloud> {
    let dim = sites.dim();
    let mut unique: Vec<Vec<f64>> = Vec::new();
    for q in sites.sites() {
        if !unique.iter().any(|u| u.as_slice() == q) {
            unique.push(q.to_vec());
        }
    }
    let cloud = PointCloud::new(dim, &unique)?;
    let mut extremes: Vec<Vec<f64>> = Vec::new();
    for q in unique.iter() {
        if is_extreme(q, &cloud)? {
            extremes.push(q.clone());
        }
    }
    PointCloud::new(dim, &extremes)
}
