//! Experiment configuration: a single JSON file with documented defaults,
//! strict validation, and dB-to-linear conversion at load time.
//!
//! Unknown keys are rejected. An empty (or whitespace-only) file yields the
//! default configuration. dB-valued keys carry a `_db` suffix.

use serde::{Deserialize, Serialize};
use std::path::Path;

use crate::analytics::FairnessSpec;
use crate::baselines::SchemeKind;
use crate::channel::{db_to_linear, BerModel, Point2D, RadioParams};
use crate::error::{Error, Result};
use crate::placement::PsoParams;
use crate::scenario::{Layout, MonteCarloParams, Rect, Scenario, ScenarioSpec};
use crate::scheduler::ReceptionModel;

use crate::scenario::generate_scenario;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RadioConfig {
    /// Reference channel gain at 1 m, in dB.
    pub beta0_db: f64,
    /// Transmit power in watts.
    pub pt_watts: f64,
    /// Noise variance in dB (relative to 1 W).
    pub sigma2_db: f64,
    /// Packet length in bits.
    pub n_bits: u32,
    pub ber_model: BerModel,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            beta0_db: -70.0,
            pt_watts: 0.025,
            sigma2_db: -150.0,
            n_bits: 10,
            ber_model: BerModel::PaperQ2SqrtGamma,
        }
    }
}

impl RadioConfig {
    pub fn to_params(&self) -> RadioParams {
        RadioParams {
            beta0: db_to_linear(self.beta0_db),
            pt: self.pt_watts,
            sigma2: db_to_linear(self.sigma2_db),
            n_bits: self.n_bits,
            ber_model: self.ber_model,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CodingConfig {
    /// Prioritized packets per block (L).
    pub layers: u8,
    /// Transmission deadline in slots (T >= L).
    pub slots: usize,
}

impl Default for CodingConfig {
    fn default() -> Self {
        CodingConfig { layers: 3, slots: 6 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FairnessConfig {
    pub l_min: u8,
    pub p_th: f64,
}

impl Default for FairnessConfig {
    fn default() -> Self {
        FairnessConfig { l_min: 1, p_th: 0.9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PsoConfig {
    pub w: f64,
    pub c1: f64,
    pub c2: f64,
    pub sizepop: usize,
    pub maxg: u32,
    /// Velocity clamp in meters per iteration; defaults to 20% of the larger
    /// area side.
    pub vmax_m: Option<f64>,
    /// Optional stall-based early stop (iterations without improvement).
    pub stall_iters: Option<u32>,
}

impl Default for PsoConfig {
    fn default() -> Self {
        PsoConfig {
            w: 0.729,
            c1: 1.4955,
            c2: 1.4955,
            sizepop: 100,
            maxg: 400,
            vmax_m: None,
            stall_iters: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct McConfig {
    pub runs: usize,
    pub master_seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { runs: 200, master_seed: 1 }
    }
}

fn default_layout() -> Layout {
    Layout::Uniform { count: 20 }
}

fn default_schemes() -> Vec<SchemeKind> {
    SchemeKind::ALL.to_vec()
}

/// Full experiment configuration with documented defaults.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub area: Rect,
    pub altitude_m: f64,
    pub radio: RadioConfig,
    pub coding: CodingConfig,
    pub fairness: FairnessConfig,
    pub pso: PsoConfig,
    pub monte_carlo: McConfig,
    pub layout: Layout,
    /// Seed for the user-position draw; defaults to the master seed (the
    /// draw uses its own labeled substream either way).
    pub layout_seed: Option<u64>,
    pub reception_model: ReceptionModel,
    pub schemes: Vec<SchemeKind>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            area: Rect { xmin: -500.0, xmax: 500.0, ymin: -500.0, ymax: 500.0 },
            altitude_m: 200.0,
            radio: RadioConfig::default(),
            coding: CodingConfig::default(),
            fairness: FairnessConfig::default(),
            pso: PsoConfig::default(),
            monte_carlo: McConfig::default(),
            layout: default_layout(),
            layout_seed: None,
            reception_model: ReceptionModel::Generic,
            schemes: default_schemes(),
        }
    }
}

impl ExperimentConfig {
    /// Parse a configuration from JSON text; empty input means defaults.
    pub fn from_json(text: &str) -> Result<Self> {
        if text.trim().is_empty() {
            let config = ExperimentConfig::default();
            config.validate()?;
            return Ok(config);
        }
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Load and validate a configuration file.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(path.display().to_string(), e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn validate(&self) -> Result<()> {
        self.area.validate()?;
        if !(self.altitude_m > 0.0 && self.altitude_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "altitude must be positive, got {}",
                self.altitude_m
            )));
        }
        self.radio.to_params().validate()?;
        if self.coding.layers < 1 {
            return Err(Error::InvalidParameter("layers must be at least 1".into()));
        }
        if self.coding.slots < self.coding.layers as usize {
            return Err(Error::InvalidParameter(format!(
                "deadline T (T >= L) violated: T={} < L={}",
                self.coding.slots, self.coding.layers
            )));
        }
        let fairness = FairnessSpec { l_min: self.fairness.l_min, p_th: self.fairness.p_th };
        fairness.validate(self.coding.layers)?;
        self.pso_params().validate()?;
        if self.monte_carlo.runs < 1 {
            return Err(Error::InvalidParameter("monte_carlo.runs must be at least 1".into()));
        }
        if self.layout.user_count() < 1 {
            return Err(Error::InvalidParameter("layout produces no users".into()));
        }
        if self.schemes.is_empty() {
            return Err(Error::InvalidParameter("scheme list is empty".into()));
        }
        // explicit users and cluster centers must be inside the area;
        // realized via scenario generation, checked here for early errors
        self.scenario()?;
        Ok(())
    }

    /// Instantiate the scenario this configuration describes.
    pub fn scenario(&self) -> Result<Scenario> {
        let template = Scenario {
            users: vec![self.area.center()],
            area: self.area,
            altitude: self.altitude_m,
            radio: self.radio.to_params(),
            layers: self.coding.layers,
            slots: self.coding.slots,
            fairness: FairnessSpec { l_min: self.fairness.l_min, p_th: self.fairness.p_th },
            reception: self.reception_model,
        };
        let spec = ScenarioSpec {
            layout: self.layout.clone(),
            seed: self.layout_seed.unwrap_or(self.monte_carlo.master_seed),
        };
        generate_scenario(&spec, &template)
    }

    pub fn pso_params(&self) -> PsoParams {
        PsoParams {
            w: self.pso.w,
            c1: self.pso.c1,
            c2: self.pso.c2,
            sizepop: self.pso.sizepop,
            maxg: self.pso.maxg,
            vmax: self
                .pso
                .vmax_m
                .unwrap_or_else(|| 0.2 * self.area.width().max(self.area.height())),
            stall_iters: self.pso.stall_iters,
        }
    }

    pub fn mc_params(&self) -> MonteCarloParams {
        MonteCarloParams { runs: self.monte_carlo.runs, master_seed: self.monte_carlo.master_seed }
    }

    /// Default hover position for schemes that do not optimize placement.
    pub fn fixed_position(&self) -> Point2D {
        self.area.center()
    }

    /// Fully-resolved configuration echo (pretty JSON).
    pub fn resolved_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}
