//! JSON experiment configuration and its validating loader.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::convergence::VariantRequest;
use crate::funcspec::{Convention, FunctionSpec, PeriodicCoefficient};
use crate::homsolver::inverse_integer;

use super::CliError;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientConfig {
    /// `profile`: the spec is `a`; `reciprocal`: the spec is `1/a`.
    #[serde(default)]
    pub convention: Convention,
    pub spec: FunctionSpec,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    #[serde(default = "default_paths")]
    pub paths: usize,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Horizon for `fk-verify` and `cell-mass`. Monte Carlo verbs run at `eps[0]`,
    /// and `dt` is checked against that scale.
    #[serde(default = "default_horizon")]
    pub t: f64,
    /// Starting point for `fk-verify` and `cell-mass`.
    #[serde(default = "default_x")]
    pub x: f64,
    #[serde(default)]
    pub seed: u64,
}

fn default_paths() -> usize {
    10_000
}
fn default_dt() -> f64 {
    1e-5
}
fn default_horizon() -> f64 {
    0.25
}
fn default_x() -> f64 {
    0.5
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            paths: default_paths(),
            dt: default_dt(),
            t: default_horizon(),
            x: default_x(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BootstrapConfig {
    /// Heat-flow time in the hypothesis `phi <= delta + e^{t Delta} phi`.
    #[serde(default = "default_bootstrap_t")]
    pub t: f64,
    /// Paths per point of the `delta` grid; defaults to `monte_carlo.paths`.
    #[serde(default)]
    pub paths: Option<usize>,
}

fn default_bootstrap_t() -> f64 {
    1.0
}

impl Default for BootstrapConfig {
    fn default() -> Self {
        BootstrapConfig {
            t: default_bootstrap_t(),
            paths: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    #[serde(default)]
    pub svg: bool,
}

fn default_dir() -> PathBuf {
    PathBuf::from("results")
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: default_dir(),
            svg: false,
        }
    }
}

fn default_variants() -> Vec<VariantRequest> {
    vec![
        VariantRequest::Raw,
        VariantRequest::Averaged,
        VariantRequest::Corrected,
    ]
}

fn default_eps() -> Vec<f64> {
    crate::convergence::DEFAULT_LADDER.to_vec()
}

/// One experiment: coefficient, right-hand side, scales and run parameters.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub name: Option<String>,
    pub coefficient: CoefficientConfig,
    pub rhs: FunctionSpec,
    #[serde(default = "default_eps")]
    pub eps: Vec<f64>,
    #[serde(default = "default_variants")]
    pub variants: Vec<VariantRequest>,
    /// Evaluation grid size; `null` picks a default per `eps`.
    #[serde(default)]
    pub grid_size: Option<usize>,
    /// Accept `eps` with non-integer `1/eps`.
    #[serde(default)]
    pub relaxed: bool,
    #[serde(default)]
    pub monte_carlo: MonteCarloConfig,
    #[serde(default)]
    pub bootstrap: BootstrapConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

/// Line of the first occurrence of `"key"` in `text`, 1-based.
fn locate(text: &str, key: &str) -> Option<(usize, usize)> {
    let needle = format!("\"{key}\"");
    text.lines()
        .enumerate()
        .find_map(|(i, line)| line.find(&needle).map(|c| (i + 1, c + 1)))
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text, path)
    }

    /// Parses and validates; `origin` only labels error messages.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self, CliError> {
        let config: ExperimentConfig = serde_json::from_str(text).map_err(|e| CliError::Config {
            path: origin.to_path_buf(),
            line: e.line(),
            column: e.column(),
            field: None,
            message: e.to_string(),
        })?;
        config.validate().map_err(|(field, message)| {
            let key = field.rsplit('.').next().unwrap_or(&field).trim_end_matches(']');
            let key = key.split('[').next().unwrap_or(key);
            let (line, column) = locate(text, key).unwrap_or((0, 0));
            CliError::Config {
                path: origin.to_path_buf(),
                line,
                column,
                field: Some(field),
                message,
            }
        })?;
        Ok(config)
    }

    /// Re-checks every module precondition; errors carry a field path.
    pub fn validate(&self) -> Result<(), (String, String)> {
        let coefficient = self.periodic_coefficient().map_err(|e| ("coefficient.spec".to_string(), e))?;
        self.rhs.validate().map_err(|e| ("rhs".to_string(), e.to_string()))?;
        if self.eps.is_empty() {
            return Err(("eps".into(), "at least one eps is required".into()));
        }
        for (i, &e) in self.eps.iter().enumerate() {
            let field = format!("eps[{i}]");
            if !(e > 0.0 && e < 1.0) && !(e == 1.0 && !self.relaxed) {
                return Err((field, format!("eps = {e} must lie in (0, 1)")));
            }
            if !self.relaxed && inverse_integer(e).is_none() {
                return Err((
                    field,
                    format!("1/eps must be a positive integer (eps = {e}); set \"relaxed\": true to allow it"),
                ));
            }
        }
        let mut sorted = self.eps.clone();
        sorted.sort_by(f64::total_cmp);
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(("eps".into(), "eps values must be distinct".into()));
        }
        if self.variants.is_empty() {
            return Err(("variants".into(), "at least one variant is required".into()));
        }
        if let Some(n) = self.grid_size {
            let finest = sorted[0];
            if (n as f64) * finest < 8.0 - 1e-9 {
                return Err((
                    "grid_size".into(),
                    format!("grid_size = {n} does not resolve eps = {finest} (need at least {})", (8.0 / finest).ceil()),
                ));
            }
        }
        let mc = &self.monte_carlo;
        if mc.paths == 0 {
            return Err(("monte_carlo.paths".into(), "must be positive".into()));
        }
        if !(mc.dt > 0.0 && mc.dt.is_finite()) {
            return Err(("monte_carlo.dt".into(), format!("dt = {} must be positive", mc.dt)));
        }
        if !(mc.t > 0.0 && mc.t.is_finite()) {
            return Err(("monte_carlo.t".into(), format!("t = {} must be positive", mc.t)));
        }
        if !(mc.x > 0.0 && mc.x < 1.0) {
            return Err(("monte_carlo.x".into(), format!("x = {} must lie in (0, 1)", mc.x)));
        }
        if !coefficient.is_constant() && coefficient.is_differentiable() {
            let first = self.eps[0];
            let limit = first * first / 10.0;
            if mc.dt > limit * (1.0 + 1e-12) {
                return Err((
                    "monte_carlo.dt".into(),
                    format!("dt = {} exceeds eps^2/10 = {limit:e} for eps = {first}", mc.dt),
                ));
            }
        }
        let b = &self.bootstrap;
        if !(b.t > 0.0 && b.t <= 1.0) {
            return Err(("bootstrap.t".into(), format!("t = {} must lie in (0, 1]", b.t)));
        }
        if b.paths == Some(0) {
            return Err(("bootstrap.paths".into(), "must be positive".into()));
        }
        Ok(())
    }

    pub fn periodic_coefficient(&self) -> Result<PeriodicCoefficient, String> {
        PeriodicCoefficient::new(self.coefficient.spec.clone(), self.coefficient.convention)
            .map_err(|e| e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MAIN: &str = r#"{
  "coefficient": {"convention": "reciprocal", "spec": {"type": "trig", "mean": 2.0, "sin": [1.0]}},
  "rhs": {"type": "trig", "sin": [1.0], "period": 2.0},
  "eps": [0.125, 0.0625]
}"#;

    fn parse(text: &str) -> Result<ExperimentConfig, CliError> {
        ExperimentConfig::from_json(text, Path::new("test.json"))
    }

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse(MAIN).unwrap();
        assert_eq!(c.coefficient.convention, Convention::Reciprocal);
        assert_eq!(c.variants.len(), 3);
        assert_eq!(c.monte_carlo.paths, 10_000);
        assert_eq!(c.output.dir, PathBuf::from("results"));
    }

    #[test]
    fn syntax_errors_carry_position() {
        let err = parse("{\n  \"coefficient\": ,\n}").unwrap_err();
        match err {
            CliError::Config { line, field, .. } => {
                assert_eq!(line, 2);
                assert!(field.is_none());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_fields_rejected() {
        let text = MAIN.replace("\"eps\"", "\"epsilon\"");
        let err = parse(&text).unwrap_err();
        assert!(err.to_string().contains("unknown field `epsilon`"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn non_integer_scale_rejected_with_field_path() {
        let text = MAIN.replace("[0.125, 0.0625]", "[0.125, 0.3]");
        match parse(&text).unwrap_err() {
            CliError::Config { field, line, .. } => {
                assert_eq!(field.as_deref(), Some("eps[1]"));
                assert_eq!(line, 4);
            }
            other => panic!("{other:?}"),
        }
        let relaxed = text.replace("\"eps\"", "\"relaxed\": true, \"eps\"");
        assert!(parse(&relaxed).is_ok());
    }

    #[test]
    fn non_positive_coefficient_rejected() {
        let text = MAIN.replace("\"mean\": 2.0", "\"mean\": 0.5");
        match parse(&text).unwrap_err() {
            CliError::Config { field, .. } => assert_eq!(field.as_deref(), Some("coefficient.spec")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn step_size_checked_against_finest_scale() {
        let text = MAIN.replace("\"eps\"", "\"monte_carlo\": {\"dt\": 0.01}, \"eps\"");
        match parse(&text).unwrap_err() {
            CliError::Config { field, .. } => assert_eq!(field.as_deref(), Some("monte_carlo.dt")),
            other => panic!("{other:?}"),
        }
    }
}
