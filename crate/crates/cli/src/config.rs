//! Flat `key=value` run configuration, its manifest echo, and the typed
//! resolution into experiment parameters.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use halving_lab::experiments::{DeltaPolicy, ExperimentConfig};
use halving_lab::kdistance::SitePolicy;

use crate::CliError;

/// Environment variable capping memory-heavy enumerations, in megabytes.
pub const BUDGET_ENV: &str = "HALVING_LAB_BUDGET_MB";

const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Record of one run: enough to reproduce every output byte (timing
/// aside) from this file alone.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub subcommand: String,
    pub artifact_version: String,
    pub seed: u64,
    /// Fully resolved flat configuration, flag overrides applied.
    pub config: BTreeMap<String, String>,
    /// Every file the run wrote, relative to the output directory.
    pub outputs: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str, seed: u64, config: BTreeMap<String, String>) -> Self {
        RunManifest {
            schema_version: MANIFEST_SCHEMA_VERSION,
            subcommand: subcommand.to_string(),
            artifact_version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            config,
            outputs: Vec::new(),
        }
    }
}

/// Key-value pairs from a config file or a previous run's manifest.
#[derive(Debug, Clone, Default)]
pub struct FlatConfig {
    map: BTreeMap<String, String>,
}

impl FlatConfig {
    /// Reads `path` as either flat `key=value` lines (with `#` comments)
    /// or a `RunManifest` JSON file, whose config echo is taken verbatim.
    pub fn load(path: &Path) -> Result<FlatConfig, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        if text.trim_start().starts_with('{') {
            let manifest: RunManifest = serde_json::from_str(&text).map_err(|e| {
                CliError::config(format!("{}: not a valid manifest: {e}", path.display()))
            })?;
            return Ok(FlatConfig {
                map: manifest.config,
            });
        }

        let mut map = BTreeMap::new();
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::config(format!(
                    "{}:{}: expected key=value, got {line:?}",
                    path.display(),
                    idx + 1
                ))
            })?;
            let key = key.trim().to_string();
            if map.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(CliError::config(format!(
                    "{}:{}: duplicate key {key:?}",
                    path.display(),
                    idx + 1
                )));
            }
        }
        Ok(FlatConfig { map })
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.map.get(key).map(String::as_str)
    }

    /// Fails on keys outside `allowed`, naming the first offender.
    pub fn restrict(&self, allowed: &[&str]) -> Result<(), CliError> {
        for key in self.map.keys() {
            if !allowed.contains(&key.as_str()) {
                return Err(CliError::config(format!(
                    "unknown config key {key:?} (expected one of: {})",
                    allowed.join(", ")
                )));
            }
        }
        Ok(())
    }

    pub fn parse<T>(&self, key: &str) -> Result<Option<T>, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|e| {
                CliError::config(format!("config key {key:?}: bad value {raw:?}: {e}"))
            }),
        }
    }

    pub fn parse_or<T>(&self, key: &str, default: T) -> Result<T, CliError>
    where
        T: FromStr,
        T::Err: Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    fn parse_list(&self, key: &str) -> Result<Option<Vec<f64>>, CliError> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw
                .split(',')
                .map(|item| {
                    item.trim().parse::<f64>().map_err(|e| {
                        CliError::config(format!(
                            "config key {key:?}: bad entry {item:?}: {e}"
                        ))
                    })
                })
                .collect::<Result<Vec<f64>, CliError>>()
                .map(Some),
        }
    }
}

const EXPERIMENT_KEYS: &[&str] = &[
    "d",
    "n",
    "k",
    "eta",
    "eta_grid",
    "trials",
    "seed",
    "delta",
    "c_values",
    "c_kappa",
    "symmetrize",
    "site_policy",
    "random_probes",
    "ray_t",
    "enumeration_budget",
    "net_budget",
];

/// Resolves an experiment configuration: file values over defaults, the
/// `--seed` flag over the file, and the memory budget from the
/// environment capping the enumeration limits.
pub fn experiment_config(
    cfg: &FlatConfig,
    seed_flag: Option<u64>,
) -> Result<ExperimentConfig, CliError> {
    cfg.restrict(EXPERIMENT_KEYS)?;
    let defaults = ExperimentConfig::default();

    let delta = match cfg.get("delta") {
        None | Some("auto") => DeltaPolicy::Auto,
        Some(raw) => DeltaPolicy::Explicit(raw.parse::<f64>().map_err(|e| {
            CliError::config(format!(
                "config key \"delta\": expected \"auto\" or a number, got {raw:?}: {e}"
            ))
        })?),
    };
    let site_policy = match cfg.get("site_policy") {
        None => defaults.site_policy,
        Some("witnessed") => SitePolicy::Witnessed,
        Some("full_enumeration") => SitePolicy::FullEnumeration,
        Some(raw) => {
            return Err(CliError::config(format!(
                "config key \"site_policy\": expected \"witnessed\" or \
                 \"full_enumeration\", got {raw:?}"
            )))
        }
    };
    let symmetrize = match cfg.get("symmetrize") {
        None => defaults.symmetrize,
        Some("true") => true,
        Some("false") => false,
        Some(raw) => {
            return Err(CliError::config(format!(
                "config key \"symmetrize\": expected \"true\" or \"false\", got {raw:?}"
            )))
        }
    };

    let mut out = ExperimentConfig {
        d: cfg.parse_or("d", defaults.d)?,
        n: cfg.parse_or("n", defaults.n)?,
        k: cfg.parse("k")?,
        eta: cfg.parse_or("eta", defaults.eta)?,
        eta_grid: cfg.parse_list("eta_grid")?,
        trials: cfg.parse_or("trials", defaults.trials)?,
        seed: cfg.parse_or("seed", defaults.seed)?,
        delta,
        c_values: cfg.parse_list("c_values")?.unwrap_or(defaults.c_values),
        c_kappa: cfg.parse_or("c_kappa", defaults.c_kappa)?,
        symmetrize,
        site_policy,
        random_probes: cfg.parse_or("random_probes", defaults.random_probes)?,
        ray_t: cfg.parse_or("ray_t", defaults.ray_t)?,
        enumeration_budget: cfg.parse_or("enumeration_budget", defaults.enumeration_budget)?,
        net_budget: cfg.parse_or("net_budget", defaults.net_budget)?,
    };
    if let Some(seed) = seed_flag {
        out.seed = seed;
    }
    apply_memory_budget(&mut out)?;
    Ok(out)
}

/// Entry cap implied by the `HALVING_LAB_BUDGET_MB` environment variable:
/// how many `(d + 1)`-double records (sites, pool directions) fit the
/// advertised megabytes. `None` when the variable is unset.
pub fn memory_cap(d: usize) -> Result<Option<u64>, CliError> {
    let Some(raw) = std::env::var_os(BUDGET_ENV) else {
        return Ok(None);
    };
    let mb: u64 = raw
        .to_str()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| CliError::config(format!("{BUDGET_ENV}: expected megabytes, got {raw:?}")))?;
    let per_entry = 8 * (d as u64 + 1);
    Ok(Some(mb.saturating_mul(1_000_000) / per_entry.max(1)))
}

fn apply_memory_budget(cfg: &mut ExperimentConfig) -> Result<(), CliError> {
    if let Some(cap) = memory_cap(cfg.d)? {
        cfg.enumeration_budget = cfg.enumeration_budget.min(cap);
        cfg.net_budget = cfg.net_budget.min(cap.try_into().unwrap_or(usize::MAX));
    }
    Ok(())
}

/// The complete flat echo of a resolved configuration: parsing the echo
/// back yields the same configuration.
pub fn echo_experiment(cfg: &ExperimentConfig) -> BTreeMap<String, String> {
    let mut map = BTreeMap::new();
    map.insert("d".into(), cfg.d.to_string());
    map.insert("n".into(), cfg.n.to_string());
    if let Some(k) = cfg.k {
        map.insert("k".into(), k.to_string());
    }
    map.insert("eta".into(), cfg.eta.to_string());
    if let Some(grid) = &cfg.eta_grid {
        map.insert("eta_grid".into(), join_floats(grid));
    }
    map.insert("trials".into(), cfg.trials.to_string());
    map.insert("seed".into(), cfg.seed.to_string());
    map.insert(
        "delta".into(),
        match cfg.delta {
            DeltaPolicy::Auto => "auto".to_string(),
            DeltaPolicy::Explicit(x) => x.to_string(),
        },
    );
    map.insert("c_values".into(), join_floats(&cfg.c_values));
    map.insert("c_kappa".into(), cfg.c_kappa.to_string());
    map.insert("symmetrize".into(), cfg.symmetrize.to_string());
    map.insert(
        "site_policy".into(),
        match cfg.site_policy {
            SitePolicy::Witnessed => "witnessed".to_string(),
            SitePolicy::FullEnumeration => "full_enumeration".to_string(),
        },
    );
    map.insert("random_probes".into(), cfg.random_probes.to_string());
    map.insert("ray_t".into(), cfg.ray_t.to_string());
    map.insert(
        "enumeration_budget".into(),
        cfg.enumeration_budget.to_string(),
    );
    map.insert("net_budget".into(), cfg.net_budget.to_string());
    map
}

fn join_floats(values: &[f64]) -> String {
    values
        .iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(",")
}
