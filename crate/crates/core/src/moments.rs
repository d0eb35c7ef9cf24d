//! Moments of the absolute dot product between a fixed direction and a
//! uniform point on the sphere.
//!
//! For X uniform on the unit sphere in dimension d >= 2 and any unit u, the
//! scalar T = |<u, X>| has density proportional to `(1 - t^2)^((d-3)/2)` on
//! [0, 1). All integrals are evaluated after the substitution `t = sin s`,
//! which turns the normalization into the smooth Wallis integral
//! `int_0^{pi/2} cos^(d-2) s ds` and removes the endpoint singularity that
//! appears for d = 2. The second moment needs no integral at all:
//! `E <u, X>^2 = 1/d` by symmetry, since the squared coordinates of X sum
//! to one.
//!
//! Two asymptotic facts anchor the large-d behaviour: `m_d sqrt(d) ->
//! sqrt(2/pi)` and `d var_d -> 1 - 2/pi`.

use std::f64::consts::FRAC_PI_2;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::sample_sphere;
use crate::quad::integrate;

/// Relative accuracy for the quadrature behind the moment values.
const QUAD_TOL: f64 = 1e-11;

/// How a [`MomentRow`] was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentMethod {
    Quadrature,
    MonteCarlo,
}

/// Mean and variance of |<u, X>| for one dimension.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct MomentRow {
    pub d: usize,
    pub mean_abs: f64,
    pub var_abs: f64,
    pub method: MomentMethod,
}

fn check_dim(d: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::invalid(format!("dimension {d} must be >= 2")));
    }
    Ok(())
}

/// `int_0^{pi/2} cos^m s ds`, the normalization constant for exponent
/// `m = d - 2`.
fn wallis_integral(m: i32) -> Result<f64> {
    integrate(|s| s.cos().powi(m), 0.0, FRAC_PI_2, QUAD_TOL)
}

/// Density of |<u, X>| at `t` in [0, 1):
/// `(1 - t^2)^((d-3)/2) / int_0^1 (1 - x^2)^((d-3)/2) dx`.
pub fn marginal_density(d: usize, t: f64) -> Result<f64> {
    check_dim(d)?;
    if !(t >= 0.0 && t < 1.0) {
        return Err(Error::invalid(format!("t = {t} must lie in [0, 1)")));
    }
    let norm = wallis_integral(d as i32 - 2)?;
    Ok((1.0 - t * t).powf((d as f64 - 3.0) / 2.0) / norm)
}

/// `m_d = E |<u, X>|`, by quadrature of the substituted integrand
/// `sin s cos^(d-2) s` against the Wallis normalization.
pub fn mean_abs_dot(d: usize) -> Result<f64> {
    check_dim(d)?;
    let m = d as i32 - 2;
    let num = integrate(|s| s.sin() * s.cos().powi(m), 0.0, FRAC_PI_2, QUAD_TOL)?;
    Ok(num / wallis_integral(m)?)
}

/// `var_d = E <u, X>^2 - m_d^2 = 1/d - m_d^2`.
pub fn variance_abs_dot(d: usize) -> Result<f64> {
    check_dim(d)?;
    let m = mean_abs_dot(d)?;
    Ok(1.0 / d as f64 - m * m)
}

/// Quadrature-backed moment row for dimension `d`.
pub fn moment_row(d: usize) -> Result<MomentRow> {
    Ok(MomentRow {
        d,
        mean_abs: mean_abs_dot(d)?,
        var_abs: variance_abs_dot(d)?,
        method: MomentMethod::Quadrature,
    })
}

/// `n` i.i.d. draws of |<e_1, X>| for X uniform on the sphere, i.e. the
/// absolute first coordinates of `n` sampled sphere points.
pub fn sample_abs_dot(d: usize, n: usize, seed: u64) -> Result<Vec<f64>> {
    check_dim(d)?;
    let cloud = sample_sphere(d, n, seed)?;
    Ok(cloud.points().map(|p| p[0].abs()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn three_dimensional_marginal_is_uniform() {
        // Archimedes: in d = 3 the marginal is uniform on [0, 1].
        for t in [0.0, 0.25, 0.5, 0.99] {
            let f = marginal_density(3, t).unwrap();
            assert!((f - 1.0).abs() < 1e-10, "f({t}) = {f}");
        }
        let m = mean_abs_dot(3).unwrap();
        assert!((m - 0.5).abs() < 1e-9, "m_3 = {m}");
        let v = variance_abs_dot(3).unwrap();
        assert!((v - 1.0 / 12.0).abs() < 1e-9, "var_3 = {v}");
    }

    #[test]
    fn two_dimensional_values() {
        let f0 = marginal_density(2, 0.0).unwrap();
        assert!((f0 - 2.0 / PI).abs() < 1e-10, "f_2(0) = {f0}");
        let m = mean_abs_dot(2).unwrap();
        assert!((m - 2.0 / PI).abs() < 1e-9, "m_2 = {m}");
        let v = variance_abs_dot(2).unwrap();
        assert!((v - (0.5 - 4.0 / (PI * PI))).abs() < 1e-9, "var_2 = {v}");
    }

    #[test]
    fn domain_errors() {
        assert!(marginal_density(1, 0.5).is_err());
        assert!(marginal_density(2, 1.0).is_err());
        assert!(marginal_density(2, -0.1).is_err());
        assert!(mean_abs_dot(0).is_err());
    }

    #[test]
    fn large_dimension_asymptotics() {
        let d = 1000;
        let m = mean_abs_dot(d).unwrap();
        let target = (2.0 / PI).sqrt();
        let scaled = m * (d as f64).sqrt();
        assert!(
            (scaled / target - 1.0).abs() < 0.01,
            "m_d sqrt(d) = {scaled}, limit {target}"
        );
        let v = variance_abs_dot(d).unwrap();
        let target = 1.0 - 2.0 / PI;
        let scaled = v * d as f64;
        assert!(
            (scaled / target - 1.0).abs() < 0.02,
            "d var_d = {scaled}, limit {target}"
        );
    }

    #[test]
    fn quadrature_matches_the_closed_form_numerator() {
        // int_0^{pi/2} sin s cos^(d-2) s ds = 1/(d-1).
        for d in [2, 3, 4, 7, 20] {
            let m = mean_abs_dot(d).unwrap();
            let exact = 1.0 / ((d as f64 - 1.0) * wallis_integral(d as i32 - 2).unwrap());
            assert!((m - exact).abs() < 1e-11, "d = {d}: {m} vs {exact}");
        }
    }

    #[test]
    fn samples_are_deterministic_and_in_range() {
        let a = sample_abs_dot(3, 1000, 5).unwrap();
        let b = sample_abs_dot(3, 1000, 5).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|t| (0.0..=1.0).contains(t)));
    }
}
