//! Flat `key = value` configuration files.
//!
//! `#` starts a comment anywhere on a line. Distances are in km, densities
//! in km⁻¹, powers and the noise floor in one linear unit. The SINR
//! threshold is given either linearly (`threshold`) or in dB
//! (`threshold_db`), never both.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;

use plpcov::montecarlo::RelayCoupling;
use plpcov::{ModelParams, QuadratureSpec};

/// Everything a config file can set.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: ModelParams,
    /// Relay distance (km).
    pub r1: f64,
    pub drops: u64,
    pub seed: u64,
    /// Simulation window; derived from the edge-bias bound when absent.
    pub window_radius: Option<f64>,
    pub window_eps: f64,
    pub batch: u64,
    pub coupling: RelayCoupling,
    pub spec: QuadratureSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: ModelParams::default(),
            r1: 0.1,
            drops: 20_000,
            seed: 1,
            window_radius: None,
            window_eps: 1e-3,
            batch: 512,
            coupling: RelayCoupling::Independent,
            spec: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

impl std::error::Error for ConfigError {}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn number<T: std::str::FromStr>(v: &str) -> Result<T, String> {
    v.parse().map_err(|_| format!("cannot parse `{v}` as a number"))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = Self::default();
        let mut seen = HashSet::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let err = |message: String| ConfigError { line, message };
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let (key, value) = body
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{body}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                return Err(err(format!("`{key}` set twice")));
            }
            if (key == "threshold" && seen.contains("threshold_db")) || (key == "threshold_db" && seen.contains("threshold")) {
                return Err(err("give either `threshold` or `threshold_db`, not both".into()));
            }
            cfg.set(key, value).map_err(err)?;
        }
        cfg.params.validate().map_err(|e| ConfigError {
            line: 0,
            message: e.to_string(),
        })?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| anyhow::anyhow!("cannot read config {}: {e}", path.display()))?;
        Self::parse(&text).map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
    }

    fn set(&mut self, key: &str, v: &str) -> Result<(), String> {
        let p = &mut self.params;
        match key {
            "rho" => p.rho = number(v)?,
            "lambda_ru" => p.lambda_ru = number(v)?,
            "lambda_v" => p.lambda_v = number(v)?,
            "p1" => p.p1 = number(v)?,
            "eta" => p.eta = number(v)?,
            "mu" => p.mu = number(v)?,
            "kappa" => p.kappa = number(v)?,
            "nu" => p.nu = number(v)?,
            "noise" => p.noise = number(v)?,
            "threshold" => p.threshold = number(v)?,
            "threshold_db" => p.threshold = db_to_linear(number(v)?),
            "r1" => self.r1 = number(v)?,
            "drops" => self.drops = number(v)?,
            "seed" => self.seed = number(v)?,
            "window_radius" => self.window_radius = Some(number(v)?),
            "window_eps" => self.window_eps = number(v)?,
            "batch" => self.batch = number(v)?,
            "coupling" => {
                self.coupling = match v {
                    "independent" => RelayCoupling::Independent,
                    "shared" => RelayCoupling::SharedRealization,
                    _ => return Err(format!("coupling must be `independent` or `shared`, got `{v}`")),
                }
            }
            "rel_tol" => self.spec.rel_tol = number(v)?,
            "abs_tol" => self.spec.abs_tol = number(v)?,
            "n_max" => self.spec.n_max = number(v)?,
            _ => return Err(format!("unknown key `{key}`")),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_db() {
        let c = RunConfig::parse("# header\nrho = 1.5   # roads\n\nthreshold_db = 10\nr1=0.2\n").unwrap();
        assert_eq!(c.params.rho, 1.5);
        assert!((c.params.threshold - 10.0).abs() < 1e-12);
        assert_eq!(c.r1, 0.2);
    }

    #[test]
    fn reports_line_numbers() {
        let e = RunConfig::parse("rho = 2\n\nbogus = 1\n").unwrap_err();
        assert_eq!(e.line, 3);
        let e = RunConfig::parse("rho = two\n").unwrap_err();
        assert_eq!(e.line, 1);
        let e = RunConfig::parse("rho = 1\nrho = 2\n").unwrap_err();
        assert!(e.message.contains("twice"));
        let e = RunConfig::parse("threshold = 1\nthreshold_db = 0\n").unwrap_err();
        assert_eq!(e.line, 2);
        let e = RunConfig::parse("just words\n").unwrap_err();
        assert_eq!(e.line, 1);
    }

    #[test]
    fn invalid_values_are_rejected() {
        assert!(RunConfig::parse("eta = -1\n").is_err());
        assert!(RunConfig::parse("coupling = both\n").is_err());
    }

    #[test]
    fn shipped_default_matches_builtin() {
        let text = include_str!("../examples/default.cfg");
        let c = RunConfig::parse(text).unwrap();
        let d = RunConfig::default();
        assert_eq!(c.r1, d.r1);
        for (a, b) in [
            (c.params.rho, d.params.rho),
            (c.params.lambda_ru, d.params.lambda_ru),
            (c.params.lambda_v, d.params.lambda_v),
            (c.params.p1, d.params.p1),
            (c.params.eta, d.params.eta),
            (c.params.kappa / c.params.nu, d.params.kappa / d.params.nu),
            (c.params.threshold, d.params.threshold),
        ] {
            assert_eq!(a, b);
        }
        assert!((c.params.noise - d.params.noise).abs() < 1e-9 * d.params.noise);
    }
}
