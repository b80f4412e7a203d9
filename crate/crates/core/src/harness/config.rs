use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::cases::Case;
use crate::error::{NetError, Result};
use crate::mc_engine::SimParams;

pub const CONFIG_VERSION: u32 = 1;

/// A geometry parameter: one number or a list (multi-neck cases).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Num(f64),
    List(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub param: String,
    pub values: Vec<f64>,
}

fn default_z() -> f64 {
    3.0
}

fn default_ratio_tol() -> f64 {
    0.25
}

/// One experiment. On disk this is TOML:
///
/// ```toml
/// version = 1
/// case = "planar_funnel"
/// output = "funnel.csv"
/// z_bound = 3.0
/// ratio_tol = 0.25
///
/// [params]
/// eps = 0.05
/// Rc = 1.0
/// area = 3.14159
///
/// [sim]
/// dt = 1e-3
/// n_paths = 10000
/// seed = 7
///
/// [sweep]
/// param = "eps"
/// values = [0.05, 0.025]
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub case: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    /// compare passes a row when |z| is at most this
    #[serde(default = "default_z")]
    pub z_bound: f64,
    /// ... or when |tau_mc / tau_pred - 1| is at most this.
    #[serde(default = "default_ratio_tol")]
    pub ratio_tol: f64,
    #[serde(default)]
    pub params: BTreeMap<String, ParamValue>,
    #[serde(default)]
    pub sim: SimParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<Sweep>,
}

impl ExperimentConfig {
    pub fn new(case: &str) -> ExperimentConfig {
        ExperimentConfig {
            version: CONFIG_VERSION,
            case: case.to_string(),
            output: None,
            z_bound: default_z(),
            ratio_tol: default_ratio_tol(),
            params: BTreeMap::new(),
            sim: SimParams::default(),
            sweep: None,
        }
    }

    pub fn from_toml(text: &str) -> Result<ExperimentConfig> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| NetError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<ExperimentConfig> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| NetError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| NetError::Config(e.to_string()))
    }

    pub fn case(&self) -> Result<Case> {
        self.case.parse()
    }

    pub fn validate(&self) -> Result<()> {
        if self.version != CONFIG_VERSION {
            return Err(NetError::Config(format!(
                "unsupported config version {}; expected {CONFIG_VERSION}",
                self.version
            )));
        }
        self.case()?;
        self.sim.validate()?;
        if let Some(s) = &self.sweep {
            if s.values.is_empty() {
                return Err(NetError::Config("sweep has no values".into()));
            }
            if let Some(v) = s.values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
                return Err(NetError::Config(format!("sweep value {v} is not finite and positive")));
            }
        }
        if !(self.z_bound > 0.0 && self.ratio_tol >= 0.0) {
            return Err(NetError::Config("z_bound must be positive and ratio_tol non-negative".into()));
        }
        Ok(())
    }

    /// Copies of the config, one per sweep value in ascending order, with
    /// the swept parameter substituted. Without a sweep: the config itself.
    pub fn expand(&self) -> Vec<ExperimentConfig> {
        match &self.sweep {
            None => vec![self.clone()],
            Some(s) => {
                let mut values = s.values.clone();
                values.sort_by(|a, b| a.partial_cmp(b).unwrap());
                values
                    .into_iter()
                    .map(|v| {
                        let mut c = self.clone();
                        c.sweep = None;
                        c.params.insert(s.param.clone(), ParamValue::Num(v));
                        c
                    })
                    .collect()
            }
        }
    }

    /// Parameters as a JSON object with sorted keys.
    pub fn param_json(&self) -> String {
        serde_json::to_string(&self.params).unwrap_or_else(|_| "{}".into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
version = 1
case = "planar_funnel"

[params]
eps = 0.05
Rc = 1
area = 3.14
necks = [0.1, 0.2]

[sim]
dt = 1e-3
n_paths = 100
seed = 9

[sweep]
param = "eps"
values = [0.04, 0.01, 0.02]
"#;

    #[test]
    fn parses_and_round_trips() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.params["Rc"], ParamValue::Num(1.0));
        assert_eq!(c.params["necks"], ParamValue::List(vec![0.1, 0.2]));
        assert_eq!(c.sim.n_paths, 100);
        assert_eq!(c.sim.refine_factor, 16);
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn sweep_expands_in_order() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        let e = c.expand();
        let eps: Vec<_> = e.iter().map(|c| c.params["eps"].clone()).collect();
        assert_eq!(eps, vec![ParamValue::Num(0.01), ParamValue::Num(0.02), ParamValue::Num(0.04)]);
    }

    #[test]
    fn rejects_bad_configs() {
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("version = 1", "version = 2")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("[0.04, 0.01, 0.02]", "[]")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("[0.04, 0.01, 0.02]", "[0.1, -1.0]")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("planar_funnel", "teapot")).is_err());
        assert!(ExperimentConfig::from_toml(&SAMPLE.replace("seed = 9", "seed = 9\nbogus = 1")).is_err());
    }
}
