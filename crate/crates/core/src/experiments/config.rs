use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::models::{Hamiltonian, InitialStateSpec, Model, ModelSpec};
use crate::propagator::{ExpBackend, Method, PropagationPlan, WindowMode};

/// Probes per relabeling or drive period when `plan.probe_interval` is absent.
pub const PROBES_PER_PERIOD: usize = 20;
/// Probes per Bloch period for static lattices.
pub const PROBES_PER_BLOCH_PERIOD: usize = 40;
/// Integration steps per shortest model period when `plan.dt` is absent.
pub const STEPS_PER_PERIOD: usize = 2000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub model: ModelSpec,
    pub initial: InitialStateSpec,
    pub plan: PlanConfig,
    #[serde(default)]
    pub frames: FrameConfig,
    #[serde(default)]
    pub ensemble: EnsembleConfig,
    #[serde(default)]
    pub analysis: AnalysisConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanConfig {
    #[serde(default)]
    pub t0: f64,
    pub t1: f64,
    #[serde(default)]
    pub dt: Option<f64>,
    #[serde(default)]
    pub probe_interval: Option<f64>,
    #[serde(default)]
    pub method: Method,
    #[serde(default)]
    pub backend: ExpBackend,
    #[serde(default)]
    pub window: WindowMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FrameConfig {
    /// Adiabatic frames per drive period for frame propagation.
    pub per_period: usize,
}

impl Default for FrameConfig {
    fn default() -> Self {
        Self { per_period: 200 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub n_realizations: usize,
    /// Realization `i` draws its disorder from seed `master_seed + i`.
    pub master_seed: u64,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        Self {
            n_realizations: 1,
            master_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum PopulationBasis {
    /// Populations of the model basis (sites, Fock levels, diabatic levels).
    #[default]
    Basis,
    /// Populations of the instantaneous eigenstates, by ascending rank.
    Adiabatic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Series {
    Fidelity,
    SigmaIdx,
    DeltaE,
    Participation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PeriodConfig {
    pub series: Series,
    #[serde(default)]
    pub expected: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PowerLawConfig {
    pub series: Series,
    pub window: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    #[serde(default)]
    pub populations: PopulationBasis,
    /// Times at which revival fidelities are reported.
    #[serde(default)]
    pub revival_probes: Vec<f64>,
    #[serde(default)]
    pub period: Option<PeriodConfig>,
    #[serde(default)]
    pub power_law: Option<PowerLawConfig>,
    /// Search window for the smallest participation ratio.
    #[serde(default)]
    pub participation_minimum: Option<[f64; 2]>,
    /// Largest harmonic in the drive detuning table.
    #[serde(default)]
    pub detuning: Option<usize>,
    /// Repeat the run in the adiabatic frame and report the worst overlap deficit.
    #[serde(default)]
    pub frame_check: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub dir: Option<String>,
    /// Write populations for every `population_stride`-th probe.
    pub population_stride: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            population_stride: 1,
        }
    }
}

impl ScenarioConfig {
    /// Parses a scenario, or the `config` echoed inside a bundle's metadata file.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(|e| Error::config("config", e.to_string()))?;
        Self::from_value(value)
    }

    pub fn from_value(value: Value) -> Result<Self> {
        let value = match value {
            Value::Object(mut map) if map.contains_key("config") && !map.contains_key("model") => {
                map.remove("config").expect("checked key")
            }
            v => v,
        };
        let cfg: ScenarioConfig = serde_path_to_error::deserialize(value).map_err(|e| {
            let path = e.path().to_string();
            let inner = e.into_inner().to_string();
            let field = match inner.split('`').nth(1) {
                Some(f) if inner.starts_with("unknown field") || inner.starts_with("missing field") => {
                    if path == "." {
                        f.to_string()
                    } else if path.ends_with(f) {
                        path
                    } else {
                        format!("{path}.{f}")
                    }
                }
                _ => path,
            };
            Error::config(field, inner)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_value(&self) -> Value {
        serde_json::to_value(self).expect("config serializes")
    }

    /// Applies `key=value` overrides with dotted paths; values parse as JSON, else as strings.
    pub fn with_overrides(&self, overrides: &[String]) -> Result<Self> {
        let mut v = self.to_value();
        for item in overrides {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::config(item.clone(), "override must look like key=value"))?;
            let parsed: Value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
            set_path(&mut v, key, parsed)?;
        }
        Self::from_value(v)
    }

    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.name.is_empty() {
            return Err(Error::config("name", "must not be empty"));
        }
        if self.ensemble.n_realizations == 0 {
            return Err(Error::config("ensemble.n_realizations", "must be >= 1"));
        }
        if self.output.population_stride == 0 {
            return Err(Error::config("output.population_stride", "must be >= 1"));
        }
        if self.frames.per_period < 8 {
            return Err(Error::config("frames.per_period", "must be >= 8"));
        }
        if let Some(pl) = &self.analysis.power_law {
            if !(pl.window[1] > pl.window[0] && pl.window[0] > 0.0) {
                return Err(Error::config("analysis.power_law.window", "needs 0 < start < end"));
            }
        }
        if let Some(w) = &self.analysis.participation_minimum {
            if !(w[1] > w[0]) {
                return Err(Error::config("analysis.participation_minimum", "needs start < end"));
            }
        }
        let model = self.model.build()?;
        self.plan(&model)?;
        Ok(())
    }

    /// Copy with `dt` and `probe_interval` filled in from the model's periods.
    pub fn resolved(&self) -> Result<Self> {
        let model = self.model.build()?;
        let mut out = self.clone();
        let dt = self.plan.dt.unwrap_or(model.shortest_period() / STEPS_PER_PERIOD as f64);
        out.plan.dt = Some(dt);
        out.plan.probe_interval = Some(self.plan.probe_interval.unwrap_or_else(|| default_probe_interval(&model)));
        out.validate()?;
        Ok(out)
    }

    pub fn plan(&self, model: &Model) -> Result<PropagationPlan> {
        let dt = self.plan.dt.unwrap_or(model.shortest_period() / STEPS_PER_PERIOD as f64);
        let probe = self.plan.probe_interval.unwrap_or_else(|| default_probe_interval(model));
        Ok(PropagationPlan::uniform(self.plan.t0, self.plan.t1, dt, probe)?
            .with_method(self.plan.method)
            .with_backend(self.plan.backend)
            .with_window(self.plan.window))
    }

    /// Hex SHA-256 of the resolved configuration's JSON text.
    pub fn hash(&self) -> Result<String> {
        let text = serde_json::to_vec(&self.resolved()?.to_value())?;
        Ok(hex::encode(Sha256::digest(&text)))
    }
}

fn default_probe_interval(model: &Model) -> f64 {
    match model.period().or_else(|| model.relabel_period()) {
        Some(p) => p / PROBES_PER_PERIOD as f64,
        None => model.shortest_period() / PROBES_PER_BLOCH_PERIOD as f64,
    }
}

fn set_path(root: &mut Value, key: &str, value: Value) -> Result<()> {
    let parts: Vec<&str> = key.split('.').collect();
    let mut cur = root;
    for (i, p) in parts.iter().enumerate() {
        let obj = cur
            .as_object_mut()
            .ok_or_else(|| Error::config(key, format!("`{}` is not an object", parts[..i].join("."))))?;
        if i + 1 == parts.len() {
            obj.insert(p.to_string(), value);
            return Ok(());
        }
        cur = obj.entry(p.to_string()).or_insert_with(|| Value::Object(Default::default()));
        if cur.is_null() {
            *cur = Value::Object(Default::default());
        }
    }
    Err(Error::config(key, "empty override key"))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "name": "t",
        "model": {"kind": "single_band", "J": 1.0, "omega": 1.0, "n_sites": 21},
        "initial": {"kind": "site_delta", "site": 0},
        "plan": {"t1": 6.283185307179586}
    }"#;

    #[test]
    fn parses_minimal_and_resolves_defaults() {
        let c = ScenarioConfig::from_json_str(MINIMAL).unwrap();
        let r = c.resolved().unwrap();
        let dt = r.plan.dt.unwrap();
        assert!((dt - 2.0 * std::f64::consts::PI / 2000.0).abs() < 1e-15);
        assert_eq!(c.hash().unwrap(), r.hash().unwrap());
    }

    #[test]
    fn rejects_unknown_keys_everywhere() {
        let top = MINIMAL.replace("\"name\"", "\"bogus\": 1, \"name\"");
        assert!(ScenarioConfig::from_json_str(&top).unwrap_err().is_config_error());
        let inner = MINIMAL.replace("\"n_sites\"", "\"sites\": 3, \"n_sites\"");
        let e = ScenarioConfig::from_json_str(&inner).unwrap_err();
        assert!(e.is_config_error());
        assert!(e.to_string().contains("sites"), "{e}");
        let plan = MINIMAL.replace("\"t1\"", "\"tt\": 0, \"t1\"");
        assert!(ScenarioConfig::from_json_str(&plan).is_err());
    }

    #[test]
    fn overrides_apply_and_validate() {
        let c = ScenarioConfig::from_json_str(MINIMAL).unwrap();
        let d = c.with_overrides(&["model.J=0.3".into(), "plan.dt=0.006283185307179587".into()]).unwrap();
        match &d.model {
            ModelSpec::SingleBand(s) => assert_eq!(s.hopping, 0.3),
            _ => unreachable!(),
        }
        assert_eq!(d.plan.dt, Some(0.006283185307179587));
        assert!(c.with_overrides(&["model.n_sites=20".into()]).is_err());
        assert!(c.with_overrides(&["model.nope=1".into()]).is_err());
    }

    #[test]
    fn metadata_wrapper_is_accepted() {
        let c = ScenarioConfig::from_json_str(MINIMAL).unwrap();
        let wrapped = serde_json::json!({"config": c.to_value(), "scenario_hash": "x"});
        assert_eq!(ScenarioConfig::from_value(wrapped).unwrap(), c);
    }
}
