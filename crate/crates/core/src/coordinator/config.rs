use std::collections::BTreeMap;
use std::time::Duration;

use mgrestore_milp::MilpOptions;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::restoration::{FrequencyMode, RestorationSettings};
use crate::transient::{InverterParams, ParamError, SimOptions};

/// Branch-and-bound limits as written in a scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub gap_tol: f64,
    pub integrality_tol: f64,
    pub node_limit: Option<usize>,
    pub time_limit_s: Option<f64>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        let d = MilpOptions::default();
        SolverConfig {
            gap_tol: d.gap_tol,
            integrality_tol: d.integrality_tol,
            node_limit: None,
            time_limit_s: None,
        }
    }
}

impl SolverConfig {
    pub fn options(&self) -> MilpOptions {
        MilpOptions {
            gap_tol: self.gap_tol,
            integrality_tol: self.integrality_tol,
            node_limit: self.node_limit,
            time_limit: self.time_limit_s.map(Duration::from_secs_f64),
        }
    }
}

/// Everything a sequential restoration run needs besides the feeder.
///
/// The minimum allowable frequency is not stored; it is always
/// `f0 - delta_f_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Lookahead steps per stage.
    pub horizon: usize,
    /// Load-step gain (pu per Hz).
    pub alpha: f64,
    /// Allowable frequency drop (Hz).
    pub delta_f_max: f64,
    /// Nominal frequency (Hz).
    pub f0: f64,
    pub max_stages: usize,
    /// Every `trace_stride`-th sample of each frequency trace is kept in
    /// the run record; the nadir sample is always kept.
    pub trace_stride: usize,
    pub restoration: RestorationSettings,
    pub solver: SolverConfig,
    pub sim: SimOptions,
    /// Inverter parameters shared by all microgrids.
    pub inverter: InverterParams,
    /// Complete replacement parameter sets keyed by microgrid id.
    pub inverter_by_mg: BTreeMap<String, InverterParams>,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            horizon: 4,
            alpha: 0.1,
            delta_f_max: 0.5,
            f0: 60.0,
            max_stages: 20,
            trace_stride: 20,
            restoration: RestorationSettings::default(),
            solver: SolverConfig::default(),
            sim: SimOptions::default(),
            inverter: InverterParams::default(),
            inverter_by_mg: BTreeMap::new(),
        }
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot parse scenario: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("{0}")]
    Invalid(String),
    #[error("inverter parameters of microgrid {mg}: {source}")]
    Inverter {
        mg: String,
        #[source]
        source: ParamError,
    },
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: ScenarioConfig = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("scenario fields are TOML-representable")
    }

    pub fn f_min(&self) -> f64 {
        self.f0 - self.delta_f_max
    }

    /// Parameters used for microgrid `mg`.
    pub fn inverter_for(&self, mg: usize) -> &InverterParams {
        self.inverter_by_mg.get(&mg.to_string()).unwrap_or(&self.inverter)
    }

    /// Same scenario with the frequency constraints switched off.
    pub fn without_frequency_constraints(&self) -> Self {
        let mut c = self.clone();
        c.restoration.frequency_mode = FrequencyMode::Off;
        c
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.horizon < 1 {
            return bad("horizon must be at least 1".into());
        }
        if !(self.alpha.is_finite() && self.alpha >= 0.0) {
            return bad(format!("alpha must be non-negative, got {}", self.alpha));
        }
        if !(self.f0.is_finite() && self.f0 > 0.0) {
            return bad(format!("f0 must be positive, got {}", self.f0));
        }
        if !(self.delta_f_max.is_finite() && self.delta_f_max > 0.0 && self.delta_f_max < self.f0) {
            return bad(format!(
                "delta_f_max must lie in (0, f0), got {}",
                self.delta_f_max
            ));
        }
        if self.max_stages < 1 {
            return bad("max_stages must be at least 1".into());
        }
        if self.trace_stride < 1 {
            return bad("trace_stride must be at least 1".into());
        }
        if !(self.solver.gap_tol >= 0.0 && self.solver.integrality_tol > 0.0 && self.solver.integrality_tol < 0.5) {
            return bad("solver tolerances out of range".into());
        }
        if let Some(t) = self.solver.time_limit_s {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("time_limit_s must be positive, got {t}"));
            }
        }
        let all = std::iter::once(("default".to_string(), &self.inverter))
            .chain(self.inverter_by_mg.iter().map(|(k, v)| (k.clone(), v)));
        for (mg, p) in all {
            if mg != "default" && mg.parse::<usize>().is_err() {
                return bad(format!("inverter_by_mg key {mg:?} is not a microgrid id"));
            }
            p.validate().map_err(|source| ConfigError::Inverter { mg: mg.clone(), source })?;
            self.sim
                .validate(p)
                .map_err(|e| ConfigError::Invalid(format!("simulation options for {mg}: {e}")))?;
            if (p.f0() - self.f0).abs() > 1e-9 {
                return bad(format!(
                    "inverter {mg} nominal frequency {} Hz differs from f0 = {} Hz",
                    p.f0(),
                    self.f0
                ));
            }
        }
        Ok(())
    }
}
