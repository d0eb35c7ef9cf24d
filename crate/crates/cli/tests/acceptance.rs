//! End-to-end acceptance gate. Each test covers one numbered criterion
//! and prints a single PASS line on success; statistical thresholds were
//! frozen from a seeded pilot run and are deterministic given the seeds
//! baked in below.

use std::fs;
use std::process::Command;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use halving_lab::experiments::{
    approx_lower_bound, bronshteyn_lower, run_general_k_experiment, run_halving_experiment,
    ExperimentConfig,
};
use halving_lab::geom::{build_delta_net, certified_ball_bound, Direction, PointCloud};
use halving_lab::kdistance::{
    centroid_sites, eval_distance_like, eval_kdistance, is_extreme, on_hull_boundary,
    power_cell_status, ray_support_estimate, CellStatus, KDistSpec, SitePolicy, WeightedSites,
};
use halving_lab::moments::{mean_abs_dot, sample_abs_dot, variance_abs_dot};
use halving_lab::polytopes::{support_halving, top_k_average, HalvingSpec};
use halving_lab::geom::support_points;

fn random_cloud(rng: &mut ChaCha8Rng, dim: usize, n: usize, scale: f64) -> PointCloud {
    let coords: Vec<f64> = (0..dim * n)
        .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * scale)
        .collect();
    PointCloud::from_flat(dim, coords).unwrap()
}

fn random_direction(rng: &mut ChaCha8Rng, dim: usize) -> Direction {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        if let Ok(u) = Direction::from_vector(&v) {
            return u;
        }
    }
}

#[test]
fn criterion_1_exact_equivalences() {
    // k-distance vs its min-over-centroids power form.
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..200 {
        let dim = rng.random_range(2..=5);
        let n = rng.random_range(2..=12);
        let k = rng.random_range(1..=n);
        let cloud = random_cloud(&mut rng, dim, n, 2.0);
        let spec = KDistSpec::new(cloud, k).unwrap();
        let sites = centroid_sites(&spec, SitePolicy::FullEnumeration).unwrap();
        for _ in 0..3 {
            let x: Vec<f64> = (0..dim)
                .map(|_| (rng.random::<f64>() * 2.0 - 1.0) * 4.0)
                .collect();
            let direct = eval_kdistance(&spec, &x).unwrap();
            let power = eval_distance_like(&sites, &x).unwrap();
            assert!((direct - power).abs() <= 1e-12, "case {case}");
        }
    }

    // Halving support vs sign enumeration, n <= 6.
    for case in 0..60 {
        let dim = rng.random_range(2..=4);
        let n = rng.random_range(1..=6);
        let cloud = random_cloud(&mut rng, dim, n, 1.0);
        let spec = HalvingSpec::new(cloud.clone()).unwrap();
        let u = random_direction(&mut rng, dim);
        let mut best = f64::NEG_INFINITY;
        for signs in 0..(1u32 << n) {
            let mut total = 0.0;
            for (i, p) in cloud.points().enumerate() {
                let s = if signs >> i & 1 == 1 { 1.0 } else { -1.0 };
                total += s * u.dot(p);
            }
            best = best.max(total / n as f64);
        }
        let fast = support_halving(&spec, &u).unwrap();
        assert!((fast - best).abs() <= 1e-12, "case {case}");
    }

    // top_k_average vs bitmask subset enumeration, n <= 12.
    for case in 0..100 {
        let n = rng.random_range(1..=12);
        let k = rng.random_range(1..=n);
        let values: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let mut best = f64::NEG_INFINITY;
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let total: f64 = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| values[i])
                .sum();
            best = best.max(total / k as f64);
        }
        let fast = top_k_average(&values, k).unwrap();
        assert!((fast - best).abs() <= 1e-12, "case {case}");
    }
    println!("criterion 1 (exact equivalences): PASS");
}

#[test]
fn criterion_2_moments() {
    let m3 = mean_abs_dot(3).unwrap();
    let v3 = variance_abs_dot(3).unwrap();
    assert!((m3 - 0.5).abs() <= 1e-9, "m_3 = {m3}");
    assert!((v3 - 1.0 / 12.0).abs() <= 1e-9, "var_3 = {v3}");

    let n = 10_000_000;
    let samples = sample_abs_dot(3, n, 32).unwrap();
    let mean = samples.iter().sum::<f64>() / n as f64;
    let var = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    let se_mean = (v3 / n as f64).sqrt();
    assert!((mean - m3).abs() <= 4.0 * se_mean, "MC mean {mean}");
    let mu4 = samples.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n as f64;
    let se_var = ((mu4 - var * var) / n as f64).sqrt();
    assert!((var - v3).abs() <= 4.0 * se_var, "MC var {var}");

    let m2 = mean_abs_dot(2).unwrap();
    assert!((m2 - std::f64::consts::FRAC_2_PI).abs() <= 1e-9, "m_2 = {m2}");

    let d = 1000;
    let m = mean_abs_dot(d).unwrap();
    let v = variance_abs_dot(d).unwrap();
    let m_limit = (2.0 / std::f64::consts::PI).sqrt();
    let v_limit = 1.0 - 2.0 / std::f64::consts::PI;
    assert!(
        (m * (d as f64).sqrt() / m_limit - 1.0).abs() <= 0.01,
        "m_d sqrt(d) = {}",
        m * (d as f64).sqrt()
    );
    assert!(
        (v * d as f64 / v_limit - 1.0).abs() <= 0.02,
        "d var_d = {}",
        v * d as f64
    );
    println!("criterion 2 (moments): PASS");
}

#[test]
fn criterion_3_ball_certificates() {
    let cross = PointCloud::new(
        2,
        &[
            vec![1.0, 0.0],
            vec![-1.0, 0.0],
            vec![0.0, 1.0],
            vec![0.0, -1.0],
        ],
    )
    .unwrap();
    let net = build_delta_net(2, 0.3, 1).unwrap();
    let bound = certified_ball_bound(&cross, 0.8, 0.3, &net).unwrap();
    assert_eq!(bound, Some(1.5));

    let net = build_delta_net(2, 0.1, 1).unwrap();
    let bound = certified_ball_bound(&cross, 0.8, 0.1, &net).unwrap();
    assert_eq!(bound, None);

    let circle: Vec<Vec<f64>> = (0..2000)
        .map(|i| {
            let angle = std::f64::consts::TAU * i as f64 / 2000.0;
            vec![angle.cos(), angle.sin()]
        })
        .collect();
    let dense = PointCloud::new(2, &circle).unwrap();
    for eta in [0.05, 0.1, 0.2, 0.5] {
        let net = build_delta_net(2, eta, 1).unwrap();
        let bound = certified_ball_bound(&dense, 1.0, eta, &net).unwrap();
        assert_eq!(bound, Some(5.0 * eta), "eta = {eta}");
    }
    println!("criterion 3 (ball certificates): PASS");
}

#[test]
fn criterion_4_desk_scale_concentration() {
    let trials = 200;
    let m3 = mean_abs_dot(3).unwrap();
    let sigma3 = variance_abs_dot(3).unwrap().sqrt();
    let sizes = [100usize, 500, 2000, 5000];

    let mut frequencies = Vec::new();
    for &n in &sizes {
        let cfg = ExperimentConfig {
            d: 3,
            n,
            eta: 0.2,
            trials,
            seed: 1,
            ..ExperimentConfig::default()
        };
        let report = run_halving_experiment(&cfg).unwrap();
        frequencies.push(report.failure_frequency.unwrap());

        let mean_ratio = report
            .records
            .iter()
            .map(|r| r.fixed_direction_support / m3)
            .sum::<f64>()
            / trials as f64;
        let tol = 4.0 * sigma3 / ((n * trials) as f64).sqrt();
        assert!(
            (mean_ratio - 1.0).abs() <= tol,
            "N = {n}: ratio {mean_ratio}, tol {tol}"
        );
    }

    // Non-increasing within two binomial standard errors, pairwise.
    for w in frequencies.windows(2) {
        let (a, b) = (w[0], w[1]);
        let se = ((a * (1.0 - a) + b * (1.0 - b)) / trials as f64).sqrt();
        assert!(b <= a + 2.0 * se + 1e-12, "frequencies rose: {a} -> {b}");
    }
    let last = *frequencies.last().unwrap();
    assert!(last <= 0.05, "failure frequency at N=5000 is {last}");
    println!(
        "criterion 4 (desk-scale concentration, failures {frequencies:?}): PASS"
    );
}

#[test]
fn criterion_5_tail_domination() {
    let cfg = ExperimentConfig {
        d: 3,
        n: 50,
        k: Some(10),
        symmetrize: false,
        eta: 0.1,
        eta_grid: Some(vec![0.1, 0.2, 0.4]),
        trials: 2000,
        seed: 1,
        ..ExperimentConfig::default()
    };
    let report = run_general_k_experiment(&cfg).unwrap();
    for row in report.tail.as_ref().unwrap() {
        assert!(
            row.empirical <= row.bound + 1e-15,
            "eta {}: empirical {} > bound {}",
            row.eta,
            row.empirical,
            row.bound
        );
    }

    // The statistic behind the bound is (1/k)-Lipschitz in l1.
    let mut rng = ChaCha8Rng::seed_from_u64(505);
    for _ in 0..10_000 {
        let n = rng.random_range(1..=20);
        let k = rng.random_range(1..=n);
        let a: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();
        let l1: f64 = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).sum();
        let fa = top_k_average(&a, k).unwrap();
        let fb = top_k_average(&b, k).unwrap();
        assert!((fa - fb).abs() <= l1 / k as f64 + 1e-12);
    }
    println!("criterion 5 (tail domination): PASS");
}

#[test]
fn criterion_6_power_diagram_lemma() {
    // Collinear counterexample: the middle site lies on the hull boundary
    // yet its cell is empty, so the boundary-to-unbounded converse fails.
    let sites = WeightedSites::new(
        2,
        &[vec![0.0, -1.0], vec![0.0, 0.0], vec![0.0, 1.0]],
        vec![0.0, 1.5, 0.0],
    )
    .unwrap();
    assert_eq!(power_cell_status(1, &sites).unwrap(), CellStatus::Empty);
    assert!(on_hull_boundary(sites.site(1), &sites.site_cloud()).unwrap());

    let mut rng = ChaCha8Rng::seed_from_u64(606);
    for case in 0..100 {
        let dim = rng.random_range(2..=4);
        let n = rng.random_range(2..=8);
        let cloud = random_cloud(&mut rng, dim, n, 1.0);
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0).collect();
        let sites = WeightedSites::from_cloud(&cloud, weights).unwrap();
        let site_cloud = sites.site_cloud();
        for i in 0..n {
            let status = power_cell_status(i, &sites).unwrap();
            if status == CellStatus::Unbounded {
                assert!(
                    on_hull_boundary(sites.site(i), &site_cloud).unwrap(),
                    "case {case}: unbounded interior cell"
                );
            }
            if is_extreme(sites.site(i), &site_cloud).unwrap() {
                assert_eq!(
                    status,
                    CellStatus::Unbounded,
                    "case {case}: extreme site with bounded cell"
                );
            }
        }
    }
    println!("criterion 6 (power-diagram lemma): PASS");
}

#[test]
fn criterion_7_ray_asymptotics() {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let t = 1e6;
    for case in 0..100 {
        let dim = rng.random_range(2..=5);
        let n = rng.random_range(1..=10);
        let cloud = random_cloud(&mut rng, dim, n, 2.0);
        let weights: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 3.0).collect();
        let sites = WeightedSites::from_cloud(&cloud, weights).unwrap();
        let u = random_direction(&mut rng, dim);
        let est = ray_support_estimate(&sites, &u, t).unwrap();
        let exact = support_points(&sites.site_cloud(), &u).unwrap();
        let remainder = sites.power_constant() / t;
        assert!(
            (est - exact).abs() <= remainder + 1e-9,
            "case {case}: |{est} - {exact}| > {remainder}"
        );
    }
    println!("criterion 7 (ray asymptotics): PASS");
}

#[test]
fn criterion_8_complexity_calculators() {
    // Exact representation: full enumeration leaves no measurable gap.
    let cfg = ExperimentConfig {
        d: 2,
        n: 6,
        eta: 0.2,
        seed: 1,
        site_policy: SitePolicy::FullEnumeration,
        ..ExperimentConfig::default()
    };
    let report = halving_lab::experiments::run_complexity_experiment(&cfg).unwrap();
    let summary = report.complexity.unwrap();
    assert!(
        summary.sup_error <= 1e-12,
        "sup error {} for an exact representation",
        summary.sup_error
    );

    // At n = d^2 (ln d + c) the site lower bound collapses to its closed
    // form 2 sqrt(d) (d/64)^((d-1)/4).
    for d in [2usize, 3, 5, 8] {
        let c_kappa = 1.0;
        let n = d as f64 * d as f64 * ((d as f64).ln() + c_kappa);
        let bound = approx_lower_bound(d, n, c_kappa).unwrap();
        let closed = 2.0 * (d as f64).sqrt() * (d as f64 / 64.0).powf((d as f64 - 1.0) / 4.0);
        assert!(
            (bound / closed - 1.0).abs() <= 1e-12,
            "d = {d}: {bound} vs {closed}"
        );
    }

    for d in [2usize, 3, 4, 10, 25] {
        let bound = bronshteyn_lower(d, 0.125).unwrap();
        let expected = 2.0 * (d as f64).sqrt();
        assert!(
            (bound - expected).abs() <= 1e-12 * expected,
            "d = {d}: {bound}"
        );
    }
    println!("criterion 8 (complexity calculators): PASS");
}

#[test]
fn criterion_9_deterministic_reruns() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("run.cfg"),
        "d=3\nn=60\nk=12\neta=0.2\ntrials=12\nseed=17\n",
    )
    .unwrap();
    let bin = env!("CARGO_BIN_EXE_halving-lab");
    let run = |args: &[&str]| {
        let out = Command::new(bin)
            .args(args)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{args:?}: {out:?}");
    };
    run(&["general-k", "--config", "run.cfg", "--out", "a", "--threads", "1"]);
    run(&["general-k", "--config", "a/manifest.json", "--out", "b", "--threads", "4"]);

    let read = |name: &str| fs::read_to_string(dir.path().join(name)).unwrap();
    assert_eq!(read("a/manifest.json"), read("b/manifest.json"));
    assert_eq!(read("a/trials.csv"), read("b/trials.csv"));
    let strip = |text: String| -> String {
        text.lines()
            .filter(|l| !l.contains("wall_clock_seconds"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(strip(read("a/report.json")), strip(read("b/report.json")));
    println!("criterion 9 (deterministic reruns): PASS");
}
