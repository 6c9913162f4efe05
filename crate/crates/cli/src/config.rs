//! Run configuration: a flat `key=value` file or a JSON object with the
//! same field names. Unknown or repeated keys are rejected.

use std::path::Path;
use std::sync::Arc;

use colotame_core::bivar::Var;
use colotame_core::funrep::{Grid, GridConfig};
use colotame_core::{BivarFn, SmoothFn};
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const MAX_DEGREE: usize = 256;
pub const MAX_ORDER: usize = 12;

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub phi: String,
    pub y0: String,
    pub target: String,
    #[serde(rename = "D")]
    pub degree: usize,
    /// Node count; `4D + 1` when absent.
    #[serde(rename = "M")]
    pub nodes: Option<usize>,
    #[serde(rename = "N")]
    pub max_order: usize,
    pub l0: usize,
    pub quad_nodes: usize,
    pub epsilon: f64,
    pub tol: f64,
    pub samples: usize,
    pub pairs: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            phi: "eta+eta^3".into(),
            y0: "0".into(),
            target: "0.05".into(),
            degree: 64,
            nodes: None,
            max_order: 8,
            l0: 2,
            quad_nodes: 32,
            epsilon: 0.5,
            tol: 1e-12,
            samples: 64,
            pairs: 32,
            seed: 0,
        }
    }
}

const STRING_KEYS: [&str; 3] = ["phi", "y0", "target"];

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// JSON when the text starts with `{`, `key=value` lines otherwise.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text)
                .map_err(|e| CliError::Config(format!("invalid JSON config: {e}")))?
        } else {
            Value::Object(parse_key_values(text)?)
        };
        let config: Self =
            serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if !(1..=MAX_DEGREE).contains(&self.degree) {
            return fail(format!("D = {} must lie in 1..={MAX_DEGREE}", self.degree));
        }
        if !(1..=MAX_ORDER).contains(&self.max_order) {
            return fail(format!(
                "N = {} must lie in 1..={MAX_ORDER}",
                self.max_order
            ));
        }
        if self.l0 < 1 || self.l0 > self.max_order {
            return fail(format!("l0 = {} must lie in 1..=N", self.l0));
        }
        if self.quad_nodes < 2 {
            return fail("quad_nodes must be at least 2".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon <= 0.5) {
            return fail(format!("epsilon = {} must lie in (0, 1/2]", self.epsilon));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return fail("tol must be positive".into());
        }
        if self.samples == 0 || self.pairs == 0 {
            return fail("samples and pairs must be positive".into());
        }
        self.grid_config().map(|_| ())
    }

    pub fn grid_config(&self) -> Result<GridConfig, CliError> {
        let nodes = self.nodes.unwrap_or(4 * self.degree + 1);
        GridConfig::new(self.degree, nodes, self.max_order).map_err(CliError::from)
    }

    pub fn grid(&self) -> Result<Arc<Grid>, CliError> {
        Grid::new(self.grid_config()?).map_err(CliError::from)
    }

    pub fn phi(&self) -> Result<BivarFn, CliError> {
        BivarFn::parse(&self.phi).map_err(|e| CliError::Config(format!("phi: {e}")))
    }

    pub fn y0_fn(&self, grid: &Arc<Grid>) -> Result<SmoothFn, CliError> {
        function_of_s("y0", &self.y0, grid)
    }

    pub fn target_fn(&self, grid: &Arc<Grid>) -> Result<SmoothFn, CliError> {
        function_of_s("target", &self.target, grid)
    }
}

fn parse_key_values(text: &str) -> Result<Map<String, Value>, CliError> {
    let mut map = Map::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| CliError::Config(format!("line {}: expected key=value", lineno + 1)))?;
        let (key, value) = (key.trim(), value.trim());
        let parsed = if STRING_KEYS.contains(&key) {
            Value::String(value.trim_matches('"').to_string())
        } else {
            serde_json::from_str(value).map_err(|_| {
                CliError::Config(format!("line {}: `{value}` is not a number", lineno + 1))
            })?
        };
        if map.insert(key.to_string(), parsed).is_some() {
            return Err(CliError::Config(format!(
                "line {}: duplicate key `{key}`",
                lineno + 1
            )));
        }
    }
    Ok(map)
}

/// Projection of an expression in `s` alone.
fn function_of_s(name: &str, text: &str, grid: &Arc<Grid>) -> Result<SmoothFn, CliError> {
    let f = BivarFn::parse(text).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    if f.depends_on(Var::Eta) {
        return Err(CliError::Config(format!(
            "{name} must be an expression in s only"
        )));
    }
    let samples = grid
        .nodes()
        .iter()
        .map(|&s| f.eval(s, 0.0))
        .collect::<Result<Vec<f64>, _>>()
        .map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    SmoothFn::project(grid, &samples).map_err(CliError::from)
}
