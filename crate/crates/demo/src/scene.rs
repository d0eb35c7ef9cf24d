//! Canvas-ready scene data, computed with plain floats so every view can
//! be built and tested off the browser.

use serde::Serialize;

use halving_lab::geom::PointCloud;
use halving_lab::kdistance::{centroid_sites, eval_kdistance, trace_at_infinity, KDistSpec, SitePolicy};
use halving_lab::moments::{marginal_density, moment_row, MomentRow};
use halving_lab::{Error, Result};

const TAU: f64 = std::f64::consts::TAU;

/// The planar halving polygon of a seeded spherical sample next to the
/// circle of radius `mean_abs` it concentrates around.
#[derive(Debug, Clone, Serialize)]
pub struct HalvingScene {
    /// Sampled unit vectors, flattened (x, y) pairs.
    pub points: Vec<f64>,
    /// Polygon vertices in counterclockwise order, flattened.
    pub vertices: Vec<f64>,
    /// Radius of the comparison circle.
    pub mean_abs: f64,
    /// Exact sup of |h / mean_abs - 1| over all directions.
    pub max_deviation: f64,
    pub eta: f64,
    /// `5 eta` when the deviation stays within `eta`.
    pub certificate: Option<f64>,
}

/// Builds the halving polygon exactly: the maximizing sign vector changes
/// only at directions orthogonal to a sample point, so each angular
/// interval between such directions contributes one vertex
/// `(1/n) sum s_i p_i`.
pub fn halving_scene(n: usize, seed: u64, eta: f64) -> Result<HalvingScene> {
    if n == 0 || n > 1000 {
        return Err(Error::invalid(format!("n = {n} must lie in 1..=1000")));
    }
    if !(eta > 0.0 && eta < 1.0) {
        return Err(Error::invalid(format!("eta = {eta} must lie in (0, 1)")));
    }
    let cloud = halving_lab::geom::sample_sphere(2, n, seed)?;
    let m = halving_lab::moments::mean_abs_dot(2)?;

    let mut critical: Vec<f64> = cloud
        .points()
        .flat_map(|p| {
            let alpha = p[1].atan2(p[0]);
            [alpha + TAU / 4.0, alpha - TAU / 4.0]
        })
        .map(|theta| theta.rem_euclid(TAU))
        .collect();
    critical.sort_by(f64::total_cmp);

    let vertex_at = |theta: f64| -> [f64; 2] {
        let u = [theta.cos(), theta.sin()];
        let mut v = [0.0f64; 2];
        for p in cloud.points() {
            let s = if u[0] * p[0] + u[1] * p[1] >= 0.0 {
                1.0
            } else {
                -1.0
            };
            v[0] += s * p[0];
            v[1] += s * p[1];
        }
        [v[0] / n as f64, v[1] / n as f64]
    };

    let mut vertices: Vec<f64> = Vec::new();
    let mut max_deviation = 0.0f64;
    for i in 0..critical.len() {
        let a = critical[i];
        let b = if i + 1 < critical.len() {
            critical[i + 1]
        } else {
            critical[0] + TAU
        };
        if b - a < 1e-14 {
            continue;
        }
        let v = vertex_at((a + b) / 2.0);
        let norm = (v[0] * v[0] + v[1] * v[1]).sqrt();
        let psi = v[1].atan2(v[0]);

        // On this interval h(theta) = |v| cos(theta - psi): the maximum is
        // |v| if psi falls inside, otherwise an endpoint; the minimum is
        // always an endpoint.
        let h_at = |theta: f64| v[0] * theta.cos() + v[1] * theta.sin();
        let (ha, hb) = (h_at(a), h_at(b));
        let inside = (psi - a).rem_euclid(TAU) <= b - a;
        let h_max = if inside { norm } else { ha.max(hb) };
        let h_min = ha.min(hb);
        max_deviation = max_deviation
            .max((h_max / m - 1.0).abs())
            .max((h_min / m - 1.0).abs());

        let is_new = vertices
            .rchunks_exact(2)
            .next()
            .map_or(true, |last| (last[0] - v[0]).abs() > 1e-12 || (last[1] - v[1]).abs() > 1e-12);
        if is_new {
            vertices.extend_from_slice(&v);
        }
    }
    if vertices.len() >= 4 {
        let (first, last) = (vertices[..2].to_vec(), vertices[vertices.len() - 2..].to_vec());
        if (first[0] - last[0]).abs() <= 1e-12 && (first[1] - last[1]).abs() <= 1e-12 {
            vertices.truncate(vertices.len() - 2);
        }
    }

    let certificate = (max_deviation <= eta).then_some(5.0 * eta);
    Ok(HalvingScene {
        points: cloud.flat().to_vec(),
        vertices,
        mean_abs: m,
        max_deviation,
        eta,
        certificate,
    })
}

/// A rasterized k-distance with the witnessed power-distance sites laid
/// over it.
#[derive(Debug, Clone, Serialize)]
pub struct FieldScene {
    pub width: usize,
    pub height: usize,
    /// Row-major RGBA pixels, top row first. Skipped in JSON: fetch the
    /// buffer separately.
    #[serde(skip)]
    pub rgba: Vec<u8>,
    /// Witnessed centroid sites, flattened.
    pub sites: Vec<f64>,
    /// Hull vertices of the sites in counterclockwise order, flattened:
    /// the shape the field keeps at infinity.
    pub hull: Vec<f64>,
    pub min_value: f64,
    pub max_value: f64,
}

/// Evaluates the k-distance of `points` (flattened planar pairs) over the
/// axis-aligned window `(x_min, y_min, x_max, y_max)`.
pub fn kdistance_field(
    points: &[f64],
    k: usize,
    view: (f64, f64, f64, f64),
    width: usize,
    height: usize,
) -> Result<FieldScene> {
    let (x0, y0, x1, y1) = view;
    if !(x0 < x1 && y0 < y1) || !(x0.is_finite() && y0.is_finite() && x1.is_finite() && y1.is_finite()) {
        return Err(Error::invalid(format!(
            "bad view window ({x0}, {y0}) .. ({x1}, {y1})"
        )));
    }
    if width == 0 || height == 0 || width * height > 4_000_000 {
        return Err(Error::invalid(format!(
            "bad raster size {width} x {height}"
        )));
    }
    let cloud = PointCloud::from_flat(2, points.to_vec())?;
    let spec = KDistSpec::new(cloud, k)?;
    let sites = centroid_sites(&spec, SitePolicy::Witnessed)?;
    let hull_cloud = trace_at_infinity(&sites)?;
    let hull = angular_order(&hull_cloud);

    let mut values = Vec::with_capacity(width * height);
    let mut min_value = f64::INFINITY;
    let mut max_value = f64::NEG_INFINITY;
    for py in 0..height {
        let y = y1 - (py as f64 + 0.5) / height as f64 * (y1 - y0);
        for px in 0..width {
            let x = x0 + (px as f64 + 0.5) / width as f64 * (x1 - x0);
            let v = eval_kdistance(&spec, &[x, y])?;
            min_value = min_value.min(v);
            max_value = max_value.max(v);
            values.push(v);
        }
    }

    let span = (max_value - min_value).max(1e-300);
    let mut rgba = Vec::with_capacity(values.len() * 4);
    for v in &values {
        let t = (v - min_value) / span;
        rgba.extend_from_slice(&colormap(t));
    }

    Ok(FieldScene {
        width,
        height,
        rgba,
        sites: sites.site_cloud().flat().to_vec(),
        hull,
        min_value,
        max_value,
    })
}

/// Orders convex-position points counterclockwise around their mean.
fn angular_order(cloud: &PointCloud) -> Vec<f64> {
    let n = cloud.len();
    if n == 0 {
        return Vec::new();
    }
    let cx = cloud.points().map(|p| p[0]).sum::<f64>() / n as f64;
    let cy = cloud.points().map(|p| p[1]).sum::<f64>() / n as f64;
    let mut ordered: Vec<(f64, [f64; 2])> = cloud
        .points()
        .map(|p| ((p[1] - cy).atan2(p[0] - cx), [p[0], p[1]]))
        .collect();
    ordered.sort_by(|a, b| a.0.total_cmp(&b.0));
    ordered.into_iter().flat_map(|(_, p)| p).collect()
}

/// Five-stop dark-to-bright gradient with thin level lines.
fn colormap(t: f64) -> [u8; 4] {
    const STOPS: [[f64; 3]; 5] = [
        [0.267, 0.005, 0.329],
        [0.229, 0.322, 0.545],
        [0.127, 0.566, 0.551],
        [0.369, 0.789, 0.383],
        [0.993, 0.906, 0.144],
    ];
    let t = t.clamp(0.0, 1.0);
    let scaled = t * (STOPS.len() - 1) as f64;
    let lo = (scaled.floor() as usize).min(STOPS.len() - 2);
    let frac = scaled - lo as f64;
    let mut rgb = [0.0f64; 3];
    for c in 0..3 {
        rgb[c] = STOPS[lo][c] + (STOPS[lo + 1][c] - STOPS[lo][c]) * frac;
    }
    let level = (t * 14.0).fract();
    if level < 0.05 {
        for c in rgb.iter_mut() {
            *c *= 0.6;
        }
    }
    [
        (rgb[0] * 255.0).round() as u8,
        (rgb[1] * 255.0).round() as u8,
        (rgb[2] * 255.0).round() as u8,
        255,
    ]
}

#[derive(Debug, Clone, Serialize)]
pub struct DensityCurve {
    pub d: usize,
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
}

/// Moment table plus density curves of |<u, X>| for the chosen
/// dimensions.
#[derive(Debug, Clone, Serialize)]
pub struct MomentScene {
    pub rows: Vec<MomentRow>,
    pub curves: Vec<DensityCurve>,
}

pub fn moment_scene(dims: &[usize], samples: usize) -> Result<MomentScene> {
    if dims.is_empty() || samples < 2 {
        return Err(Error::invalid("need at least one dimension and two samples"));
    }
    let rows = dims.iter().map(|&d| moment_row(d)).collect::<Result<Vec<_>>>()?;
    let curves = dims
        .iter()
        .map(|&d| {
            let xs: Vec<f64> = (0..samples)
                .map(|i| 0.999 * i as f64 / (samples - 1) as f64)
                .collect();
            let ys = xs
                .iter()
                .map(|&t| marginal_density(d, t))
                .collect::<Result<Vec<_>>>()?;
            Ok(DensityCurve { d, xs, ys })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentScene { rows, curves })
}
