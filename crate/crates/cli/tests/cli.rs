use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_halving-lab"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn without_timing(text: &str) -> String {
    text.lines()
        .filter(|line| !line.contains("wall_clock_seconds"))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn moments_table_has_the_classical_row() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["moments", "--dims", "3", "--out", "m"], dir.path());
    assert!(out.status.success());
    let csv = read(&dir.path().join("m/moments.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "d,m_d,var_d,m_d_sqrt_d,d_var_d");
    let fields: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(fields[0], "3");
    assert!((fields[1].parse::<f64>().unwrap() - 0.5).abs() <= 1e-9);
    assert!((fields[2].parse::<f64>().unwrap() - 1.0 / 12.0).abs() <= 1e-9);
}

#[test]
fn kdist_eval_reproduces_the_worked_example() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("p.txt"), "dim=2\n0 0\n2 0\n").unwrap();
    fs::write(dir.path().join("q.txt"), "dim=2\n1 0\n").unwrap();
    let out = run(
        &["kdist-eval", "--points", "p.txt", "-k", "2", "--queries", "q.txt", "--out", "o"],
        dir.path(),
    );
    assert!(out.status.success());
    let csv = read(&dir.path().join("o/kdist.csv"));
    let row = csv.lines().nth(1).unwrap();
    let value: f64 = row.split(',').last().unwrap().parse().unwrap();
    assert_eq!(value, 1.0);

    // Header-only output for an empty query file.
    fs::write(dir.path().join("q0.txt"), "dim=2\n").unwrap();
    let out = run(
        &["kdist-eval", "--points", "p.txt", "-k", "2", "--queries", "q0.txt", "--out", "o0"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(read(&dir.path().join("o0/kdist.csv")), "x0,x1,kdistance\n");
}

#[test]
fn exit_codes_classify_failures() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("bad_eta.cfg"), "eta=1.5\n").unwrap();
    let out = run(&["halving-exp", "--config", "bad_eta.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("eta"));

    fs::write(dir.path().join("unknown.cfg"), "bogus=1\n").unwrap();
    let out = run(&["halving-exp", "--config", "unknown.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));

    fs::write(
        dir.path().join("big.cfg"),
        "d=2\nn=40\nsite_policy=full_enumeration\nenumeration_budget=100\n",
    )
    .unwrap();
    let out = run(&["complexity", "--config", "big.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(3));

    let out = run(
        &["kdist-eval", "--points", "absent.txt", "-k", "1", "--queries", "absent.txt"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(4));

    let out = run(&["halving-exp", "--config", "absent.cfg"], dir.path());
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn memory_budget_env_caps_enumeration() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("c.cfg"),
        "d=2\nn=6\nsite_policy=full_enumeration\n",
    )
    .unwrap();
    let out = bin()
        .args(["complexity", "--config", "c.cfg"])
        .env("HALVING_LAB_BUDGET_MB", "0")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let out = bin()
        .args(["complexity", "--config", "c.cfg"])
        .env("HALVING_LAB_BUDGET_MB", "not-a-number")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_flag_overrides_the_config_file() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("h.cfg"), "d=2\nn=20\neta=0.3\ntrials=5\nseed=1\n").unwrap();
    let out = run(
        &["halving-exp", "--config", "h.cfg", "--seed", "5", "--out", "a"],
        dir.path(),
    );
    assert!(out.status.success());
    let manifest = read(&dir.path().join("a/manifest.json"));
    assert!(manifest.contains("\"seed\": 5"));
    assert!(manifest.contains("\"seed\": \"5\""));

    // The override is baked into the manifest, so a re-run from it needs
    // no flag to reproduce the same trials.
    let out = run(
        &["halving-exp", "--config", "a/manifest.json", "--out", "b"],
        dir.path(),
    );
    assert!(out.status.success());
    assert_eq!(
        read(&dir.path().join("a/trials.csv")),
        read(&dir.path().join("b/trials.csv"))
    );
}

#[test]
fn manifest_reruns_are_byte_identical_for_every_kind() {
    let dir = tempfile::tempdir().unwrap();
    let configs = [
        ("halving-exp", "d=2\nn=30\neta=0.3\ntrials=6\nseed=3\n"),
        (
            "general-k",
            "d=3\nn=15\nk=5\neta=0.2\neta_grid=0.2,0.4\ntrials=6\nseed=3\n",
        ),
        (
            "complexity",
            "d=2\nn=5\nsite_policy=full_enumeration\nseed=3\n",
        ),
    ];
    for (kind, text) in configs {
        let cfg = format!("{kind}.cfg");
        fs::write(dir.path().join(&cfg), text).unwrap();
        let first = format!("{kind}-1");
        let second = format!("{kind}-2");
        let out = run(
            &[kind, "--config", &cfg, "--out", &first, "--threads", "1"],
            dir.path(),
        );
        assert!(out.status.success(), "{kind}: {:?}", out);
        let manifest = format!("{first}/manifest.json");
        let out = run(
            &[kind, "--config", &manifest, "--out", &second, "--threads", "4"],
            dir.path(),
        );
        assert!(out.status.success(), "{kind} rerun: {:?}", out);

        assert_eq!(
            read(&dir.path().join(&manifest)),
            read(&dir.path().join(format!("{second}/manifest.json"))),
            "{kind} manifests differ"
        );
        assert_eq!(
            without_timing(&read(&dir.path().join(format!("{first}/report.json")))),
            without_timing(&read(&dir.path().join(format!("{second}/report.json")))),
            "{kind} reports differ"
        );
        let csv = if kind == "complexity" {
            "summary.csv"
        } else {
            "trials.csv"
        };
        assert_eq!(
            read(&dir.path().join(format!("{first}/{csv}"))),
            read(&dir.path().join(format!("{second}/{csv}"))),
            "{kind} tables differ"
        );
    }
}

#[test]
fn net_build_writes_a_covering() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(
        &["net-build", "--dim", "2", "--delta", "0.2", "--out", "n"],
        dir.path(),
    );
    assert!(out.status.success());
    let net: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("n/net.json"))).unwrap();
    assert_eq!(net["dim"], 2);
    assert_eq!(net["verification"], "Proven");
    // Covering the circle at delta = 0.2 takes at least tau / (4 asin 0.1)
    // = 16 directions; a maximal packing cannot exceed tau / (2 asin 0.1).
    let count = net["directions"].as_array().unwrap().len();
    assert!((16..=32).contains(&count), "{count} directions");

    let rerun = run(
        &["net-build", "--config", "n/manifest.json", "--out", "n2"],
        dir.path(),
    );
    assert!(rerun.status.success());
    assert_eq!(
        read(&dir.path().join("n/net.json")),
        read(&dir.path().join("n2/net.json"))
    );
}
