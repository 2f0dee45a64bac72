use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use puncture_core::criterion::{Hypotheses, PhiSpec, Route, Subject};
use puncture_core::differential::JacobianMethod;
use puncture_core::geometry::DEFAULT_ORDER;

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Analyze,
    Criterion,
    Fmo,
    Modulus,
    Reproduce,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RingSpec {
    pub r1: f64,
    pub r2: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericOptions {
    pub quad_order: usize,
    /// Outer radius of the criterion integral.
    pub eps0: f64,
    /// Decades of `eps` below `eps0` in criterion traces.
    pub eps_decades: usize,
    /// Halvings of the ball radius in FMO traces.
    pub fmo_steps: usize,
    /// Grid size of the variational modulus oracle.
    pub oracle_grid: usize,
    pub seed: u64,
    /// Threads for the suite; `None` uses the rayon default.
    pub workers: Option<usize>,
}

impl Default for NumericOptions {
    fn default() -> Self {
        Self {
            quad_order: DEFAULT_ORDER,
            eps0: 0.5,
            eps_decades: 8,
            fmo_steps: 12,
            oracle_grid: 10_000,
            seed: 0,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputOptions {
    pub dir: Option<PathBuf>,
    pub json_only: bool,
}

/// A single job file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub command: Command,
    #[serde(default)]
    pub subject: Option<Subject>,
    #[serde(default = "default_dim")]
    pub n: usize,
    /// Sample points for `analyze`.
    #[serde(default)]
    pub points: Vec<Vec<f64>>,
    #[serde(default = "analytic")]
    pub jacobian: JacobianMethod,
    /// Orlicz gauge for `criterion`; without it only the integral is classified.
    #[serde(default)]
    pub phi: Option<PhiSpec>,
    #[serde(default)]
    pub hypotheses: Hypotheses,
    #[serde(default)]
    pub route: Route,
    /// Ball center for `fmo`; the origin when absent.
    #[serde(default)]
    pub center: Option<Vec<f64>>,
    #[serde(default)]
    pub ring: Option<RingSpec>,
    #[serde(default)]
    pub options: NumericOptions,
    #[serde(default)]
    pub output: OutputOptions,
}

fn default_dim() -> usize {
    3
}

fn analytic() -> JacobianMethod {
    JacobianMethod::Analytic
}

impl JobConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: JobConfig = serde_json::from_str(text).map_err(|e| CliError::Schema(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn reproduce(n: usize) -> Self {
        JobConfig {
            command: Command::Reproduce,
            subject: None,
            n,
            points: Vec::new(),
            jacobian: JacobianMethod::Analytic,
            phi: None,
            hypotheses: Hypotheses::default(),
            route: Route::default(),
            center: None,
            ring: None,
            options: NumericOptions::default(),
            output: OutputOptions::default(),
        }
    }

    /// Checks that the fields each command needs are present.
    pub fn validate(&self) -> Result<(), CliError> {
        let missing = |what: &str| Err(CliError::Schema(format!("{what} is required for this command")));
        if self.options.quad_order < 2 {
            return Err(CliError::Schema("options.quad_order must be at least 2".into()));
        }
        if !(self.options.eps0 > 0.0 && self.options.eps0 < 1.0) {
            return Err(CliError::Schema("options.eps0 must lie in (0, 1)".into()));
        }
        if self.options.workers == Some(0) {
            return Err(CliError::Schema("options.workers must be positive".into()));
        }
        match self.command {
            Command::Analyze => {
                if !matches!(self.subject, Some(Subject::Map(_))) {
                    return missing("a map subject");
                }
                if self.points.is_empty() {
                    return missing("a nonempty `points` list");
                }
            }
            Command::Criterion | Command::Fmo => {
                if self.subject.is_none() {
                    return missing("`subject`");
                }
            }
            Command::Modulus => {
                if self.ring.is_none() {
                    return missing("`ring`");
                }
            }
            Command::Reproduce => {}
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let err = JobConfig::from_json(r#"{"command":"modulus","ring":{"r1":1,"r2":2},"colour":1}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
        let err =
            JobConfig::from_json(r#"{"command":"modulus","ring":{"r1":1,"r2":2},"options":{"quad":3}}"#).unwrap_err();
        assert!(matches!(err, CliError::Schema(_)));
    }

    #[test]
    fn minimal_jobs_parse() {
        let cfg = JobConfig::from_json(
            r#"{"command":"criterion","n":3,"subject":{"field":{"kind":"power_log","c":1,"gamma":0,"s":2}}}"#,
        )
        .unwrap();
        assert_eq!(cfg.command, Command::Criterion);
        assert_eq!(cfg.options, NumericOptions::default());
        assert!(JobConfig::from_json(r#"{"command":"analyze"}"#).is_err());
        assert!(JobConfig::from_json(r#"{"command":"reproduce"}"#).is_ok());
    }
}
