//! k-set polytopes and halving polyhedra of finite point sets.
//!
//! The k-set polytope of P is the convex hull of the centroids of all
//! k-subsets of P; its support function is the mean of the k largest dot
//! products, so it never needs the exponential enumeration. The halving
//! polyhedron of P is the N-set polytope of the symmetrized cloud
//! P union (-P), whose support reduces to the mean of |<u, p>| over P.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{Direction, PointCloud};
use crate::kdistance::DEFAULT_ENUMERATION_BUDGET;

/// Cap on B(n, k) for explicit vertex counting.
pub const EXTREME_COUNT_BUDGET: u64 = 100_000;

/// A cloud with the subset size of its k-set polytope.
#[derive(Debug, Clone, Serialize)]
pub struct KSetSpec {
    cloud: PointCloud,
    k: usize,
}

impl KSetSpec {
    pub fn new(cloud: PointCloud, k: usize) -> Result<Self> {
        if cloud.is_empty() {
            return Err(Error::invalid("k-set polytope needs a nonempty cloud"));
        }
        if k == 0 || k > cloud.len() {
            return Err(Error::invalid(format!(
                "k = {k} must lie in 1..={}",
                cloud.len()
            )));
        }
        Ok(KSetSpec { cloud, k })
    }

    pub fn cloud(&self) -> &PointCloud {
        &self.cloud
    }

    pub fn k(&self) -> usize {
        self.k
    }
}

/// The base cloud of a halving polyhedron.
#[derive(Debug, Clone, Serialize)]
pub struct HalvingSpec {
    base: PointCloud,
}

impl HalvingSpec {
    pub fn new(base: PointCloud) -> Result<Self> {
        if base.is_empty() {
            return Err(Error::invalid("halving polyhedron needs a nonempty cloud"));
        }
        Ok(HalvingSpec { base })
    }

    pub fn base(&self) -> &PointCloud {
        &self.base
    }
}

/// The cloud P union (-P), originals first, negations in the same order.
pub fn symmetrize(cloud: &PointCloud) -> PointCloud {
    let mut coords = cloud.flat().to_vec();
    coords.extend(cloud.flat().iter().map(|c| -c));
    let out = PointCloud::from_flat(cloud.dim(), coords).expect("same dimension as input");
    if cloud.is_spherical() {
        out.into_spherical().expect("negations stay on the sphere")
    } else {
        out
    }
}

/// Mean of the `k` largest entries. Entries must lie in [-1, 1] (within
/// 1e-12); this is the normalized form used on dot products with unit
/// vectors. As a function of the entry vector it is 1/k-Lipschitz in l1.
pub fn top_k_average(values: &[f64], k: usize) -> Result<f64> {
    if k == 0 || k > values.len() {
        return Err(Error::invalid(format!(
            "k = {k} must lie in 1..={}",
            values.len()
        )));
    }
    if values.iter().any(|v| !(v.abs() <= 1.0 + 1e-12)) {
        return Err(Error::invalid("entries must lie in [-1, 1]"));
    }
    let mut sorted = values.to_vec();
    if k < sorted.len() {
        sorted.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    }
    Ok(sorted[..k].iter().sum::<f64>() / k as f64)
}

/// Support of the k-set polytope: the mean of the k largest dot products
/// with `u`.
pub fn support_kset(spec: &KSetSpec, u: &Direction) -> Result<f64> {
    let cloud = spec.cloud();
    if cloud.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: cloud.dim(),
            got: u.dim(),
        });
    }
    let mut dots: Vec<f64> = cloud.points().map(|p| u.dot(p)).collect();
    let k = spec.k();
    if k < dots.len() {
        dots.select_nth_unstable_by(k - 1, |a, b| b.total_cmp(a));
    }
    Ok(dots[..k].iter().sum::<f64>() / k as f64)
}

/// Support of the halving polyhedron of P: `(1/N) sum_p |<u, p>|`.
///
/// Picking the (+/-) copy of each point with the larger dot product selects
/// exactly N points of the symmetrized cloud, so this equals the N-set
/// support of the symmetrization.
pub fn support_halving(spec: &HalvingSpec, u: &Direction) -> Result<f64> {
    let base = spec.base();
    if base.dim() != u.dim() {
        return Err(Error::DimensionMismatch {
            expected: base.dim(),
            got: u.dim(),
        });
    }
    let sum: f64 = base.points().map(|p| u.dot(p).abs()).sum();
    Ok(sum / base.len() as f64)
}

/// Counts the vertices of the k-set polytope by enumerating all subset
/// centroids (duplicates collapsed) and testing each for extremality.
/// Refuses instances with more than [`EXTREME_COUNT_BUDGET`] subsets.
pub fn count_extreme_points(spec: &KSetSpec) -> Result<usize> {
    let n = spec.cloud().len();
    let k = spec.k();
    let budget = EXTREME_COUNT_BUDGET.min(DEFAULT_ENUMERATION_BUDGET);
    let kdist = crate::kdistance::KDistSpec::new(spec.cloud().clone(), k)?;
    // Reuse the subset enumeration; the budget check lives there.
    let sites = crate::kdistance::centroid_sites_with_budget(
        &kdist,
        crate::kdistance::SitePolicy::FullEnumeration,
        budget,
    )
    .map_err(|e| match e {
        Error::ResourceLimit(_) => Error::resource(format!(
            "B({n}, {k}) exceeds the vertex-counting budget {budget}"
        )),
        other => other,
    })?;
    let trace = crate::kdistance::trace_at_infinity(&sites)?;
    Ok(trace.len())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_orders_negations_after_originals() {
        let p = PointCloud::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let s = symmetrize(&p);
        assert_eq!(s.len(), 4);
        assert_eq!(s.point(2), &[-1.0, 0.0]);
        assert_eq!(s.point(3), &[0.0, -1.0]);
    }

    #[test]
    fn top_k_average_examples() {
        let v = [1.0, 0.5, -1.0];
        assert_eq!(top_k_average(&v, 2).unwrap(), 0.75);
        let a = top_k_average(&v, 3).unwrap();
        assert!((a - 0.5 / 3.0).abs() < 1e-16, "a = {a}");
        assert!(top_k_average(&v, 0).is_err());
        assert!(top_k_average(&v, 4).is_err());
        assert!(top_k_average(&[2.0], 1).is_err());
    }

    #[test]
    fn kset_support_examples() {
        let cloud =
            PointCloud::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0], vec![-1.0, 0.0]]).unwrap();
        let u = Direction::axis(2, 0).unwrap();
        let spec = KSetSpec::new(cloud.clone(), 2).unwrap();
        assert_eq!(support_kset(&spec, &u).unwrap(), 0.5);
        let spec = KSetSpec::new(cloud, 3).unwrap();
        assert_eq!(support_kset(&spec, &u).unwrap(), 0.0);
    }

    #[test]
    fn halving_support_examples() {
        let base = PointCloud::new(2, &[vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let spec = HalvingSpec::new(base).unwrap();
        let e1 = Direction::axis(2, 0).unwrap();
        assert_eq!(support_halving(&spec, &e1).unwrap(), 0.5);
        let diag = Direction::from_vector(&[1.0, 1.0]).unwrap();
        let h = support_halving(&spec, &diag).unwrap();
        assert!((h - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-15, "h = {h}");
    }

    #[test]
    fn halving_support_is_even() {
        let base = crate::geom::sample_sphere(3, 40, 9).unwrap();
        let spec = HalvingSpec::new(base).unwrap();
        let u = Direction::from_vector(&[0.3, -0.5, 0.7]).unwrap();
        let minus: Vec<f64> = u.coords().iter().map(|c| -c).collect();
        let v = Direction::new(minus).unwrap();
        assert_eq!(
            support_halving(&spec, &u).unwrap(),
            support_halving(&spec, &v).unwrap()
        );
    }

    #[test]
    fn vertex_count_of_a_triangle() {
        // k = 1: the k-set polytope is the hull itself.
        let cloud =
            PointCloud::new(2, &[vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let spec = KSetSpec::new(cloud, 1).unwrap();
        assert_eq!(count_extreme_points(&spec).unwrap(), 3);
    }

    #[test]
    fn vertex_count_budget() {
        let cloud = crate::geom::sample_sphere(3, 40, 2).unwrap();
        let spec = KSetSpec::new(cloud, 20).unwrap();
        assert!(matches!(
            count_extreme_points(&spec).unwrap_err(),
            Error::ResourceLimit(_)
        ));
    }
}
