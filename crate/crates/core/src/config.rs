//! Run configuration from a flat `key = value` file and/or command-line flags.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{DgError, Result};
use crate::problems::{problem_with_p, ProblemSpec, PROBLEM_IDS};
use crate::scheme::SchemeKind;
use crate::time_loop::{DtRule, TimeConfig};

/// Keys accepted in config files; flags use the same names with a `--` prefix.
pub const CONFIG_KEYS: [&str; 18] = [
    "scheme",
    "problem",
    "p",
    "degree",
    "cells",
    "domain",
    "tfinal",
    "alpha",
    "dt",
    "limiter",
    "limit_u",
    "snapshots",
    "perturb",
    "seed",
    "out",
    "convergence",
    "diag_every",
    "residual_check",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub problem: String,
    pub p: u32,
    pub degree: usize,
    pub n_cells: usize,
    pub domain: (f64, f64),
    pub t_final: f64,
    pub alpha: f64,
    pub dt: Option<f64>,
    pub limiter: Option<f64>,
    /// For `w`-form schemes, limit the reconstructed `u` instead of `w`.
    pub limit_u: bool,
    pub snapshots: Vec<f64>,
    pub perturb: f64,
    pub seed: u64,
    pub out_dir: PathBuf,
    pub convergence: Option<Vec<usize>>,
    pub diag_every: usize,
    pub residual_check: bool,
}

/// Raw `key -> value` pairs; later inserts win.
pub type ConfigMap = BTreeMap<String, String>;

pub fn parse_config_file(text: &str) -> Result<ConfigMap> {
    let mut map = ConfigMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| DgError::Config(format!("line {}: expected key = value", lineno + 1)))?;
        let key = k.trim().to_ascii_lowercase().replace('-', "_");
        if !CONFIG_KEYS.contains(&key.as_str()) {
            return Err(DgError::Config(format!(
                "line {}: unknown key '{}'",
                lineno + 1,
                k.trim()
            )));
        }
        map.insert(key, v.trim().to_string());
    }
    Ok(map)
}

pub fn read_config_file(path: &Path) -> Result<ConfigMap> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| DgError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse_config_file(&text)
}

fn num<T: std::str::FromStr>(map: &ConfigMap, key: &str) -> Result<Option<T>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .trim()
            .parse::<T>()
            .map(Some)
            .map_err(|_| DgError::Config(format!("cannot parse {key} = '{v}'"))),
    }
}

fn list<T: std::str::FromStr>(map: &ConfigMap, key: &str) -> Result<Option<Vec<T>>> {
    match map.get(key) {
        None => Ok(None),
        Some(v) => v
            .split(',')
            .map(|s| {
                s.trim().parse::<T>().map_err(|_| {
                    DgError::Config(format!("cannot parse {key} entry '{}'", s.trim()))
                })
            })
            .collect::<Result<Vec<T>>>()
            .map(Some),
    }
}

fn flag(map: &ConfigMap, key: &str) -> Result<bool> {
    match map.get(key).map(|s| s.trim().to_ascii_lowercase()) {
        None => Ok(false),
        Some(v) => match v.as_str() {
            "" | "1" | "true" | "yes" | "on" => Ok(true),
            "0" | "false" | "no" | "off" => Ok(false),
            _ => Err(DgError::Config(format!(
                "cannot parse {key} = '{v}' as a boolean"
            ))),
        },
    }
}

/// Validates a merged map and fills in defaults. Returns the config and any warnings.
pub fn parse_config(map: &ConfigMap) -> Result<(RunConfig, Vec<String>)> {
    let mut warnings = Vec::new();
    let problem_id = map.get("problem").ok_or_else(|| {
        DgError::Config(format!(
            "no problem given (known: {})",
            PROBLEM_IDS.join(", ")
        ))
    })?;
    let scheme: SchemeKind = map
        .get("scheme")
        .map(|s| s.parse())
        .transpose()?
        .unwrap_or(SchemeKind::D1);
    let spec: ProblemSpec = problem_with_p(problem_id, num(map, "p")?)?;
    let degree: usize = num(map, "degree")?.unwrap_or(2);
    if degree > 10 {
        return Err(DgError::Config(format!(
            "degree {degree} is above the supported maximum 10"
        )));
    }
    if scheme.is_dissipative() && degree < 1 {
        warnings.push(format!(
            "scheme {scheme} with k = {degree}: the error estimate assumes k >= 1"
        ));
    }
    if !scheme.is_dissipative() && degree < 2 {
        warnings.push(format!(
            "scheme {scheme} with k = {degree}: the error estimate for conservative fluxes assumes k >= 2"
        ));
    }
    let domain = match list::<f64>(map, "domain")? {
        None => spec.domain,
        Some(v) if v.len() == 2 && v[0] < v[1] => (v[0], v[1]),
        Some(v) => {
            return Err(DgError::Config(format!(
                "domain must be a,b with a < b, got {v:?}"
            )))
        }
    };
    let t_final = num(map, "tfinal")?.unwrap_or(spec.default_t_final);
    let snapshots = list::<f64>(map, "snapshots")?.unwrap_or_else(|| vec![t_final]);
    if let Some(bad) = snapshots.iter().find(|&&s| !(0.0..=t_final).contains(&s)) {
        return Err(DgError::Config(format!(
            "snapshot time {bad} outside [0, {t_final}]"
        )));
    }
    let convergence = list::<usize>(map, "convergence")?;
    if let Some(ladder) = &convergence {
        if ladder.is_empty() || ladder.iter().any(|&n| n < 2) {
            return Err(DgError::Config(
                "convergence ladder needs cell counts >= 2".into(),
            ));
        }
        if spec.exact.is_none() {
            warnings.push(format!(
                "problem {} has no exact solution; errors are measured against a run with {}x the finest cell count",
                spec.id,
                crate::driver::REFERENCE_REFINEMENT
            ));
        }
    }
    let cfg = RunConfig {
        scheme,
        problem: spec.id.to_string(),
        p: spec.p,
        degree,
        n_cells: num(map, "cells")?.unwrap_or(80),
        domain,
        t_final,
        alpha: num(map, "alpha")?.unwrap_or(0.1),
        dt: num(map, "dt")?,
        limiter: num(map, "limiter")?,
        limit_u: flag(map, "limit_u")?,
        snapshots,
        perturb: num(map, "perturb")?.unwrap_or(0.0),
        seed: num(map, "seed")?.unwrap_or(0),
        out_dir: PathBuf::from(map.get("out").cloned().unwrap_or_else(|| "out".into())),
        convergence,
        diag_every: num(map, "diag_every")?.unwrap_or(1),
        residual_check: flag(map, "residual_check")?,
    };
    if cfg.n_cells < 2 {
        return Err(DgError::Config(format!(
            "need at least 2 cells, got {}",
            cfg.n_cells
        )));
    }
    if !(0.0..1.0).contains(&cfg.perturb) {
        return Err(DgError::Config(format!(
            "perturb must lie in [0, 1), got {}",
            cfg.perturb
        )));
    }
    if cfg.limiter.is_some() && !cfg.scheme.is_first_form() && !cfg.limit_u {
        warnings.push(format!(
            "scheme {} limits w = u - u_xx; once a shock forms this is usually unstable, consider limit_u",
            cfg.scheme
        ));
    }
    if spec.limiter_recommended && cfg.limiter.is_none() {
        warnings.push(format!("problem {} usually needs --limiter", spec.id));
    }
    cfg.time_config().validate()?;
    Ok((cfg, warnings))
}

impl RunConfig {
    pub fn time_config(&self) -> TimeConfig {
        TimeConfig {
            alpha: self.alpha,
            t_final: self.t_final,
            dt_rule: self.dt.map(DtRule::Fixed).unwrap_or(DtRule::PaperPower),
            limiter: self.limiter,
            limit_solution: self.limit_u,
            diagnostics_every: self.diag_every,
            snapshots: self.snapshots.clone(),
        }
    }

    /// `key = value` lines that reproduce this configuration.
    pub fn echo(&self) -> String {
        let mut s = String::new();
        let join = |v: &[f64]| {
            v.iter()
                .map(|x| x.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        let _ = writeln!(s, "scheme = {}", self.scheme);
        let _ = writeln!(s, "problem = {}", self.problem);
        let _ = writeln!(s, "p = {}", self.p);
        let _ = writeln!(s, "degree = {}", self.degree);
        let _ = writeln!(s, "cells = {}", self.n_cells);
        let _ = writeln!(s, "domain = {},{}", self.domain.0, self.domain.1);
        let _ = writeln!(s, "tfinal = {}", self.t_final);
        let _ = writeln!(s, "alpha = {}", self.alpha);
        if let Some(dt) = self.dt {
            let _ = writeln!(s, "dt = {dt}");
        }
        if let Some(m) = self.limiter {
            let _ = writeln!(s, "limiter = {m}");
        }
        let _ = writeln!(s, "limit_u = {}", self.limit_u);
        let _ = writeln!(s, "snapshots = {}", join(&self.snapshots));
        let _ = writeln!(s, "perturb = {}", self.perturb);
        let _ = writeln!(s, "seed = {}", self.seed);
        let _ = writeln!(s, "out = {}", self.out_dir.display());
        if let Some(c) = &self.convergence {
            let c: Vec<String> = c.iter().map(|n| n.to_string()).collect();
            let _ = writeln!(s, "convergence = {}", c.join(","));
        }
        let _ = writeln!(s, "diag_every = {}", self.diag_every);
        let _ = writeln!(s, "residual_check = {}", self.residual_check);
        s
    }
}
