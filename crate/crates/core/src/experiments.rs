//! Randomized experiment harnesses and the concentration-bound calculators
//! they are compared against.
//!
//! Every harness consumes an [`ExperimentConfig`] and produces an
//! [`ExperimentReport`]. Trials are independent: trial `i` draws from
//! stream `i` of the configured seed, so reports are byte-identical across
//! re-runs and thread counts (wall-clock time aside). Probability bounds
//! are clamped to [0, 1] but always carry their raw exponent.

use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geom::{
    build_delta_net_with_budget, certified_ball_bound_from_support, hausdorff_certified,
    sample_sphere_with, Direction, DirectionNet, Interval, NetVerification, PointCloud,
    DEFAULT_NET_BUDGET,
};
use crate::kdistance::{
    centroid_sites_with_budget, eval_distance_like, eval_kdistance, trace_at_infinity, KDistSpec,
    SitePolicy, WeightedSites, DEFAULT_ENUMERATION_BUDGET,
};
use crate::moments::{mean_abs_dot, variance_abs_dot};
use crate::polytopes::{support_halving, support_kset, symmetrize, HalvingSpec, KSetSpec};
use crate::rng::stream_rng;

pub const SCHEMA_VERSION: u32 = 1;

/// Sites above this count skip the (quadratic) trace computation in the
/// complexity harness.
const TRACE_CAP: usize = 1000;

/// How the direction-net resolution is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DeltaPolicy {
    /// `delta = min(eta, m_d)`, matching the certificate precondition.
    Auto,
    Explicit(f64),
}

/// Shared configuration for the experiment harnesses. Fields irrelevant to
/// a given harness are ignored by it; `Default` gives a small desk-scale
/// setup.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    /// Ambient dimension.
    pub d: usize,
    /// Sample size per trial (before symmetrization).
    pub n: usize,
    /// Subset size for the general-k harness.
    pub k: Option<usize>,
    /// Relative deviation threshold.
    pub eta: f64,
    /// Optional threshold grid for tail tables (defaults to `[eta]`).
    pub eta_grid: Option<Vec<f64>>,
    pub trials: usize,
    pub seed: u64,
    pub delta: DeltaPolicy,
    /// Constants at which the main success-probability bound is tabulated.
    pub c_values: Vec<f64>,
    /// Additive constant in the sample-count corollary.
    pub c_kappa: f64,
    /// General-k harness: draw the cloud, then symmetrize it.
    pub symmetrize: bool,
    /// Complexity harness: how to build the weighted sites.
    pub site_policy: SitePolicy,
    /// Complexity harness: number of random ball probes.
    pub random_probes: usize,
    /// Complexity harness: ray parameter for far probes.
    pub ray_t: f64,
    pub enumeration_budget: u64,
    pub net_budget: usize,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            d: 3,
            n: 100,
            k: None,
            eta: 0.2,
            eta_grid: None,
            trials: 100,
            seed: 1,
            delta: DeltaPolicy::Auto,
            c_values: vec![0.1, 1.0],
            c_kappa: 1.0,
            symmetrize: false,
            site_policy: SitePolicy::Witnessed,
            random_probes: 200,
            ray_t: 1e3,
            enumeration_budget: DEFAULT_ENUMERATION_BUDGET,
            net_budget: DEFAULT_NET_BUDGET,
        }
    }
}

/// One randomized trial.
#[derive(Debug, Clone, Serialize)]
pub struct TrialRecord {
    pub trial: usize,
    /// RNG stream the trial drew from.
    pub stream: u64,
    /// Largest relative deviation of the net support values from the scale
    /// (the quadrature mean for halving runs, the estimated mean for
    /// general-k runs).
    pub max_deviation: f64,
    /// Raw support value in the fixed reference direction.
    pub fixed_direction_support: f64,
    /// Certified Hausdorff bound, when the deviation test passed.
    pub certificate: Option<f64>,
}

/// A probability bound together with its raw exponent.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BoundValue {
    pub probability: f64,
    pub exponent: f64,
}

/// Success-probability lower bound at one value of the absolute constant.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TheoreticalBound {
    pub c: f64,
    pub success_probability: f64,
    pub exponent: f64,
}

/// Empirical tail frequency against its theoretical bound at one threshold.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TailRow {
    pub eta: f64,
    pub empirical: f64,
    pub bound: f64,
    pub exponent: f64,
}

/// Summary of one approximation-complexity instance.
#[derive(Debug, Clone, Serialize)]
pub struct ComplexitySummary {
    pub site_policy: SitePolicy,
    pub site_count: usize,
    /// Vertex count of the site hull, when small enough to compute.
    pub trace_size: Option<usize>,
    /// Max |k-distance - site approximation| over the probe grid (a lower
    /// bound on the true sup error).
    pub sup_error: f64,
    pub probe_count: usize,
    /// Certified enclosure of `d_H(conv(sites)/m_d, B(0,1))`.
    pub hausdorff: Interval,
    /// Theoretical minimum site count at accuracy `m_d * eta`.
    pub approx_lower: f64,
    /// Same bound specialized to eta = 1/8, where it reads `2 sqrt(d)`.
    pub bronshteyn_lower_eighth: f64,
}

/// Output of one harness run.
#[derive(Debug, Clone, Serialize)]
pub struct ExperimentReport {
    pub schema_version: u32,
    pub kind: String,
    pub config: ExperimentConfig,
    /// Quadrature mean `m_d` of |<u, X>|.
    pub mean_abs: f64,
    /// Quadrature standard deviation of |<u, X>|.
    pub sigma_abs: f64,
    pub net_size: usize,
    pub net_delta: f64,
    pub net_verification: NetVerification,
    /// General-k harness: estimated support scale in the reference
    /// direction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r_hat: Option<f64>,
    pub records: Vec<TrialRecord>,
    /// Halving runs: fraction of trials without certificate. General-k
    /// runs: tail frequency at the first grid threshold.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failure_frequency: Option<f64>,
    pub theoretical: Vec<TheoreticalBound>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail: Option<Vec<TailRow>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub complexity: Option<ComplexitySummary>,
    pub wall_clock_seconds: f64,
}

fn clamp_unit(p: f64) -> f64 {
    p.clamp(0.0, 1.0)
}

/// Bernstein tail bound for a mean of `n` i.i.d. bounded-by-one terms:
/// `P(|mean - E| >= eps) <= 2 exp(-n eps^2 / (2 var + 2 eps / 3))`.
pub fn bernstein_bound(n: usize, eps: f64, var: f64) -> Result<BoundValue> {
    if n == 0 {
        return Err(Error::invalid("bernstein bound needs n >= 1"));
    }
    if !(eps >= 0.0 && eps.is_finite()) || !(var >= 0.0 && var.is_finite()) {
        return Err(Error::invalid(format!(
            "bad bernstein parameters eps = {eps}, var = {var}"
        )));
    }
    let denom = 2.0 * var + 2.0 * eps / 3.0;
    let exponent = if denom == 0.0 {
        0.0
    } else {
        -(n as f64) * eps * eps / denom
    };
    Ok(BoundValue {
        probability: clamp_unit(2.0 * exponent.exp()),
        exponent,
    })
}

/// Tail bound for one evaluation of an `alpha`-Lipschitz (in l1) statistic
/// of `n` independent coordinates:
/// `P(|F - E F| >= eps) <= 2 exp(-eps^2 / (4 alpha^2 n))`.
pub fn lipschitz_tail_bound(n: usize, alpha: f64, eps: f64) -> Result<BoundValue> {
    if n == 0 {
        return Err(Error::invalid("lipschitz bound needs n >= 1"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) || !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::invalid(format!(
            "bad lipschitz parameters alpha = {alpha}, eps = {eps}"
        )));
    }
    let exponent = -eps * eps / (4.0 * alpha * alpha * n as f64);
    Ok(BoundValue {
        probability: clamp_unit(2.0 * exponent.exp()),
        exponent,
    })
}

/// Uniform tail bound for the k-set support over a finite direction set of
/// size `net_size`:
/// `P(max_u |h - E h| >= eta r) <= 2 |U| exp(-(1/4) (k^2 / n) eta^2 r^2)`.
pub fn kset_tail_bound(
    n: usize,
    k: usize,
    net_size: usize,
    eta: f64,
    r: f64,
) -> Result<BoundValue> {
    if n == 0 || k == 0 || k > n || net_size == 0 {
        return Err(Error::invalid(format!(
            "bad tail-bound sizes n = {n}, k = {k}, |U| = {net_size}"
        )));
    }
    if !(eta > 0.0 && eta.is_finite()) || !(r > 0.0 && r.is_finite()) {
        return Err(Error::invalid(format!(
            "bad tail-bound parameters eta = {eta}, r = {r}"
        )));
    }
    let exponent = -0.25 * (k as f64 * k as f64 / n as f64) * eta * eta * r * r;
    Ok(BoundValue {
        probability: clamp_unit(2.0 * net_size as f64 * exponent.exp()),
        exponent,
    })
}

/// Success-probability lower bound for the rescaled halving polyhedron:
/// `P(d_H(L / m_d, B) <= eta) >= 1 - 2 exp(c (d log(1/delta) - n eta^2))`
/// with `delta = min(eta, 1/sqrt(d))`.
pub fn theorem_main_bound(d: usize, n: usize, eta: f64, c: f64) -> Result<BoundValue> {
    if d < 2 || n == 0 {
        return Err(Error::invalid(format!("bad sizes d = {d}, n = {n}")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta = {eta} must lie in (0, 1)")));
    }
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::invalid(format!("c = {c} must be positive")));
    }
    let delta = eta.min(1.0 / (d as f64).sqrt());
    let exponent = c * (d as f64 * (1.0 / delta).ln() - n as f64 * eta * eta);
    Ok(BoundValue {
        probability: clamp_unit(1.0 - 2.0 * exponent.exp()),
        exponent,
    })
}

/// Smallest sample count the corollary asks for at accuracy `eta`:
/// `ceil( (d / eta^2) (log d + c_kappa) )`.
pub fn corollary_min_n(d: usize, eta: f64, c_kappa: f64) -> Result<u64> {
    if d < 2 {
        return Err(Error::invalid(format!("dimension {d} must be >= 2")));
    }
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(Error::invalid(format!("eta = {eta} must lie in (0, 1]")));
    }
    if !(c_kappa >= 0.0 && c_kappa.is_finite()) {
        return Err(Error::invalid(format!("c_kappa = {c_kappa} must be >= 0")));
    }
    let value = (d as f64 / (eta * eta)) * ((d as f64).ln() + c_kappa);
    Ok(value.ceil() as u64)
}

/// Lower bound on the number of weighted sites needed to approximate the
/// halving k-distance of `n` spherical samples to accuracy `m_d * eta`:
/// `2 sqrt(d) (n / (64 d (log d + c_kappa)))^((d-1)/4)`.
pub fn approx_lower_bound(d: usize, n: f64, c_kappa: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be >= 1"));
    }
    if !(n > 0.0 && n.is_finite()) || !c_kappa.is_finite() {
        return Err(Error::invalid(format!(
            "bad parameters n = {n}, c_kappa = {c_kappa}"
        )));
    }
    let exponent = (d as f64 - 1.0) / 4.0;
    let base = n / (64.0 * d as f64 * ((d as f64).ln() + c_kappa));
    if exponent > 0.0 && base <= 0.0 {
        return Err(Error::invalid(format!(
            "nonpositive base {base} with fractional exponent {exponent}"
        )));
    }
    Ok(2.0 * (d as f64).sqrt() * base.powf(exponent))
}

/// Vertex-count lower bound for any polytope within Hausdorff distance
/// `eta` of the unit ball: `2 sqrt(d) (8 eta)^(-(d-1)/2)` for
/// `eta in (0, 1/4]`.
pub fn bronshteyn_lower(d: usize, eta: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::invalid("dimension must be >= 1"));
    }
    if !(eta > 0.0 && eta <= 0.25) {
        return Err(Error::invalid(format!("eta = {eta} must lie in (0, 1/4]")));
    }
    Ok(2.0 * (d as f64).sqrt() * (8.0 * eta).powf(-(d as f64 - 1.0) / 2.0))
}

/// Max of |k-distance - site approximation| over the probe points: a
/// certified lower bound on the true sup-norm distance between the two
/// functions.
pub fn measure_sup_error(
    spec: &KDistSpec,
    sites: &WeightedSites,
    probes: &PointCloud,
) -> Result<f64> {
    if spec.cloud().dim() != sites.dim() || probes.dim() != sites.dim() {
        return Err(Error::DimensionMismatch {
            expected: sites.dim(),
            got: if spec.cloud().dim() != sites.dim() {
                spec.cloud().dim()
            } else {
                probes.dim()
            },
        });
    }
    let mut worst = 0.0f64;
    for x in probes.points() {
        let phi = eval_kdistance(spec, x)?;
        let psi = eval_distance_like(sites, x)?;
        worst = worst.max((phi - psi).abs());
    }
    Ok(worst)
}

fn resolve_delta(cfg: &ExperimentConfig, eta_floor: f64, m: f64) -> Result<f64> {
    match cfg.delta {
        DeltaPolicy::Auto => Ok(eta_floor.min(m)),
        DeltaPolicy::Explicit(x) => {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::invalid(format!("explicit delta {x} must be positive")));
            }
            Ok(x)
        }
    }
}

fn validate_common(cfg: &ExperimentConfig) -> Result<()> {
    if cfg.d < 2 {
        return Err(Error::invalid(format!("dimension {} must be >= 2", cfg.d)));
    }
    if cfg.n == 0 {
        return Err(Error::invalid("sample size n must be >= 1"));
    }
    if cfg.trials == 0 {
        return Err(Error::invalid("trials must be >= 1"));
    }
    if !(cfg.eta > 0.0 && cfg.eta < 1.0) {
        return Err(Error::invalid(format!(
            "eta = {} must lie in (0, 1)",
            cfg.eta
        )));
    }
    Ok(())
}

/// Samples `trials` spherical clouds, evaluates the halving support on a
/// shared net, and applies the ball certificate at scale `m_d` to each
/// trial.
pub fn run_halving_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    validate_common(cfg)?;
    let m = mean_abs_dot(cfg.d)?;
    let sigma = variance_abs_dot(cfg.d)?.sqrt();
    let delta = resolve_delta(cfg, cfg.eta, m)?;
    let net = build_delta_net_with_budget(cfg.d, delta, cfg.seed, cfg.net_budget)?;

    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<TrialRecord> {
            let stream = t as u64;
            let mut rng = stream_rng(cfg.seed, stream);
            let cloud = sample_sphere_with(&mut rng, cfg.d, cfg.n);
            let spec = HalvingSpec::new(cloud)?;
            let support: Vec<f64> = net
                .directions()
                .iter()
                .map(|u| support_halving(&spec, u))
                .collect::<Result<Vec<_>>>()?;
            let certificate = certified_ball_bound_from_support(&support, m, cfg.eta, &net)?;
            let max_deviation = support
                .iter()
                .map(|h| (h / m - 1.0).abs())
                .fold(0.0, f64::max);
            Ok(TrialRecord {
                trial: t,
                stream,
                max_deviation,
                fixed_direction_support: support[0],
                certificate,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let failures = records.iter().filter(|r| r.certificate.is_none()).count();
    let theoretical = cfg
        .c_values
        .iter()
        .map(|&c| {
            theorem_main_bound(cfg.d, cfg.n, cfg.eta, c).map(|b| TheoreticalBound {
                c,
                success_probability: b.probability,
                exponent: b.exponent,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        kind: "halving".into(),
        config: cfg.clone(),
        mean_abs: m,
        sigma_abs: sigma,
        net_size: net.len(),
        net_delta: net.delta(),
        net_verification: net.verification(),
        r_hat: None,
        records,
        failure_frequency: Some(failures as f64 / cfg.trials as f64),
        theoretical,
        tail: None,
        complexity: None,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Two-phase general-k run: estimate the support scale in a fixed
/// direction over `trials` clouds, then measure uniform tail frequencies
/// over `trials` fresh clouds against the union-bound tail.
pub fn run_general_k_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    validate_common(cfg)?;
    let k = cfg
        .k
        .ok_or_else(|| Error::invalid("the general-k harness requires k"))?;
    let n_eff = if cfg.symmetrize { 2 * cfg.n } else { cfg.n };
    if k == 0 || k > n_eff {
        return Err(Error::invalid(format!(
            "k = {k} must lie in 1..={n_eff} (n = {}, symmetrize = {})",
            cfg.n, cfg.symmetrize
        )));
    }
    let etas: Vec<f64> = cfg.eta_grid.clone().unwrap_or_else(|| vec![cfg.eta]);
    if etas.is_empty() {
        return Err(Error::invalid("eta grid must be nonempty"));
    }
    for &eta in &etas {
        if !(eta > 0.0 && eta < 1.0) {
            return Err(Error::invalid(format!("eta = {eta} must lie in (0, 1)")));
        }
    }
    let eta_floor = etas.iter().cloned().fold(f64::INFINITY, f64::min);

    let m = mean_abs_dot(cfg.d)?;
    let sigma = variance_abs_dot(cfg.d)?.sqrt();
    let delta = resolve_delta(cfg, eta_floor, m)?;
    let net = build_delta_net_with_budget(cfg.d, delta, cfg.seed, cfg.net_budget)?;
    let u0 = Direction::axis(cfg.d, 0)?;

    let draw_spec = |stream: u64| -> Result<KSetSpec> {
        let mut rng = stream_rng(cfg.seed, stream);
        let cloud = sample_sphere_with(&mut rng, cfg.d, cfg.n);
        let cloud = if cfg.symmetrize {
            symmetrize(&cloud)
        } else {
            cloud
        };
        KSetSpec::new(cloud, k)
    };

    let estimates: Vec<f64> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| support_kset(&draw_spec(t as u64)?, &u0))
        .collect::<Result<Vec<_>>>()?;
    let r_hat = estimates.iter().sum::<f64>() / cfg.trials as f64;
    if !(r_hat > 1e-12) {
        return Err(Error::precondition(format!(
            "estimated scale r_hat = {r_hat} is not positive; tail thresholds are meaningless"
        )));
    }

    let records: Vec<TrialRecord> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| -> Result<TrialRecord> {
            let stream = (cfg.trials + t) as u64;
            let spec = draw_spec(stream)?;
            let mut worst = 0.0f64;
            for u in net.directions() {
                let h = support_kset(&spec, u)?;
                worst = worst.max((h - r_hat).abs());
            }
            Ok(TrialRecord {
                trial: t,
                stream,
                max_deviation: worst / r_hat,
                fixed_direction_support: support_kset(&spec, &u0)?,
                certificate: None,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let tail: Vec<TailRow> = etas
        .iter()
        .map(|&eta| -> Result<TailRow> {
            let hits = records.iter().filter(|r| r.max_deviation >= eta).count();
            let bound = kset_tail_bound(n_eff, k, net.len(), eta, r_hat)?;
            Ok(TailRow {
                eta,
                empirical: hits as f64 / cfg.trials as f64,
                bound: bound.probability,
                exponent: bound.exponent,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let failure_frequency = tail.first().map(|row| row.empirical);

    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        kind: "general-k".into(),
        config: cfg.clone(),
        mean_abs: m,
        sigma_abs: sigma,
        net_size: net.len(),
        net_delta: net.delta(),
        net_verification: net.verification(),
        r_hat: Some(r_hat),
        records,
        failure_frequency,
        theoretical: Vec::new(),
        tail: Some(tail),
        complexity: None,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Probe grid for sup-error measurement: the symmetrized sample itself,
/// uniform points from the ball of radius 3, and far points `t u` along
/// every net direction.
fn probe_grid(
    sample: &PointCloud,
    random_probes: usize,
    seed: u64,
    net: &DirectionNet,
    t: f64,
) -> Result<PointCloud> {
    let d = sample.dim();
    let mut coords = sample.flat().to_vec();
    let mut rng = stream_rng(seed, 1);
    for _ in 0..random_probes {
        let dir = crate::geom::gaussian_direction(&mut rng, d);
        let radius = 3.0 * rng.random::<f64>().powf(1.0 / d as f64);
        coords.extend(dir.iter().map(|c| c * radius));
    }
    for u in net.directions() {
        coords.extend(u.coords().iter().map(|c| c * t));
    }
    PointCloud::from_flat(d, coords)
}

/// Builds the halving k-distance of one symmetrized spherical sample, a
/// weighted-site approximation of it, and measures how well the sites
/// reproduce the function and how round their hull is.
pub fn run_complexity_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let start = Instant::now();
    validate_common(cfg)?;
    if !(cfg.ray_t > 0.0 && cfg.ray_t.is_finite()) {
        return Err(Error::invalid(format!(
            "ray parameter {} must be positive",
            cfg.ray_t
        )));
    }
    let m = mean_abs_dot(cfg.d)?;
    let sigma = variance_abs_dot(cfg.d)?.sqrt();

    let mut rng = stream_rng(cfg.seed, 0);
    let sample = sample_sphere_with(&mut rng, cfg.d, cfg.n);
    let sym = symmetrize(&sample);
    let spec = KDistSpec::new(sym.clone(), cfg.n)?;
    let sites = centroid_sites_with_budget(&spec, cfg.site_policy, cfg.enumeration_budget)?;

    let delta = resolve_delta(cfg, cfg.eta, m)?;
    let net = build_delta_net_with_budget(cfg.d, delta, cfg.seed, cfg.net_budget)?;

    let probes = probe_grid(&sym, cfg.random_probes, cfg.seed, &net, cfg.ray_t)?;
    let sup_error = measure_sup_error(&spec, &sites, &probes)?;

    let trace_size = if sites.len() <= TRACE_CAP {
        Some(trace_at_infinity(&sites)?.len())
    } else {
        None
    };

    // Compare conv(sites)/m_d with the ball through the net directions;
    // conv(net) itself is within delta^2/2 of the ball, so widen by that.
    let scaled_sites = sites.site_cloud().scaled(m)?;
    let ball_proxy = PointCloud::from_flat(
        cfg.d,
        net.directions()
            .iter()
            .flat_map(|u| u.coords().iter().copied())
            .collect(),
    )?;
    let raw = hausdorff_certified(&scaled_sites, &ball_proxy, &net)?;
    let pad = net.delta() * net.delta() / 2.0;
    let hausdorff = Interval::new((raw.lo - pad).max(0.0), raw.hi + pad)?;

    let complexity = ComplexitySummary {
        site_policy: cfg.site_policy,
        site_count: sites.len(),
        trace_size,
        sup_error,
        probe_count: probes.len(),
        hausdorff,
        approx_lower: approx_lower_bound(cfg.d, cfg.n as f64, cfg.c_kappa)?,
        bronshteyn_lower_eighth: bronshteyn_lower(cfg.d, 0.125)?,
    };

    Ok(ExperimentReport {
        schema_version: SCHEMA_VERSION,
        kind: "complexity".into(),
        config: cfg.clone(),
        mean_abs: m,
        sigma_abs: sigma,
        net_size: net.len(),
        net_delta: net.delta(),
        net_verification: net.verification(),
        r_hat: None,
        records: Vec::new(),
        failure_frequency: None,
        theoretical: Vec::new(),
        tail: None,
        complexity: Some(complexity),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernstein_examples() {
        let b = bernstein_bound(100, 0.1, 0.1).unwrap();
        assert!((b.probability - 0.047).abs() < 1e-3, "p = {}", b.probability);
        // eps = 0 clamps to certainty.
        let b = bernstein_bound(100, 0.0, 0.1).unwrap();
        assert_eq!(b.probability, 1.0);
        assert_eq!(b.exponent, 0.0);
        let b = bernstein_bound(100, 0.0, 0.0).unwrap();
        assert_eq!(b.probability, 1.0);
    }

    #[test]
    fn lipschitz_example() {
        let b = lipschitz_tail_bound(100, 0.1, 2.0).unwrap();
        assert!(
            (b.probability - 2.0 * (-1.0f64).exp()).abs() < 1e-12,
            "p = {}",
            b.probability
        );
        assert!(lipschitz_tail_bound(100, 0.0, 1.0).is_err());
    }

    #[test]
    fn main_bound_examples() {
        // delta = min(eta, 1/sqrt(d)).
        let b = theorem_main_bound(16, 1000, 0.5, 1.0).unwrap();
        let delta: f64 = 0.25;
        let expected = 16.0 * (1.0 / delta).ln() - 1000.0 * 0.25;
        assert!((b.exponent - expected).abs() < 1e-12);

        let b = theorem_main_bound(3, 2000, 0.2, 1.0).unwrap();
        let expected = 3.0 * 5.0f64.ln() - 2000.0 * 0.04;
        assert!((b.exponent - expected).abs() < 1e-10);
        assert!((b.probability - (1.0 - 2.0 * expected.exp())).abs() < 1e-15);

        // A tiny sample gives a vacuous (clamped) bound.
        let b = theorem_main_bound(3, 1, 0.2, 1.0).unwrap();
        assert_eq!(b.probability, 0.0);
        assert!(b.exponent > 0.0);
    }

    #[test]
    fn corollary_examples() {
        assert_eq!(corollary_min_n(3, 1.0, 0.0).unwrap(), 4);
        assert_eq!(corollary_min_n(10, 0.5, 1.0).unwrap(), 133);
        assert!(corollary_min_n(10, 0.0, 1.0).is_err());
    }

    #[test]
    fn approximation_bound_examples() {
        // Base 100 in d = 5: 2 sqrt(5) * 100.
        let n = 64.0 * 5.0 * (5.0f64.ln() + 1.0) * 100.0;
        let v = approx_lower_bound(5, n, 1.0).unwrap();
        assert!((v - 2.0 * 5.0f64.sqrt() * 100.0).abs() < 1e-9, "v = {v}");
        // d = 1: the exponent vanishes.
        assert_eq!(approx_lower_bound(1, 7.0, 1.0).unwrap(), 2.0);
        // Closed form at n = d^2 (log d + c).
        for d in [2usize, 3, 5, 8] {
            let df = d as f64;
            let n = df * df * (df.ln() + 1.0);
            let v = approx_lower_bound(d, n, 1.0).unwrap();
            let closed = 2.0 * df.sqrt() * (df / 64.0).powf((df - 1.0) / 4.0);
            assert!((v / closed - 1.0).abs() < 1e-12, "d = {d}: {v} vs {closed}");
        }
        assert!(approx_lower_bound(3, 10.0, -2.0).is_err());
    }

    #[test]
    fn bronshteyn_examples() {
        for d in [1usize, 2, 3, 10] {
            let v = bronshteyn_lower(d, 0.125).unwrap();
            assert!((v - 2.0 * (d as f64).sqrt()).abs() < 1e-12, "d = {d}: {v}");
        }
        let v = bronshteyn_lower(3, 1.0 / 32.0).unwrap();
        assert!((v - 8.0 * 3.0f64.sqrt()).abs() < 1e-12, "v = {v}");
        assert!(bronshteyn_lower(3, 0.3).is_err());
    }

    #[test]
    fn halving_run_is_deterministic() {
        let cfg = ExperimentConfig {
            n: 50,
            trials: 8,
            ..ExperimentConfig::default()
        };
        let a = run_halving_experiment(&cfg).unwrap();
        let b = run_halving_experiment(&cfg).unwrap();
        let ja = serde_json::to_value(&a).unwrap();
        let jb = serde_json::to_value(&b).unwrap();
        let strip = |mut v: serde_json::Value| {
            v.as_object_mut().unwrap().remove("wall_clock_seconds");
            v
        };
        assert_eq!(strip(ja), strip(jb));
        assert_eq!(a.records.len(), 8);
        assert!(a.failure_frequency.is_some());
    }

    #[test]
    fn config_validation() {
        let cfg = ExperimentConfig {
            eta: 1.5,
            ..ExperimentConfig::default()
        };
        assert!(run_halving_experiment(&cfg).is_err());
        let cfg = ExperimentConfig {
            trials: 0,
            ..ExperimentConfig::default()
        };
        assert!(run_halving_experiment(&cfg).is_err());
        let cfg = ExperimentConfig::default();
        assert!(matches!(
            run_general_k_experiment(&cfg).unwrap_err(),
            Error::InvalidArgument(_)
        ));
    }
}
