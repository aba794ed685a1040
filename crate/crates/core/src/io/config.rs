//! Experiment configuration in TOML.
//!
//! Every section is optional and falls back to the defaults below, except
//! `[plant]`, which commands that simulate the actuator require explicitly.
//! Unknown keys are rejected with the dotted path of the offending key.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::NsaviForm;
use crate::narx::{ExclusionRules, Term};
use crate::pipeline::{IdentifyOptions, SizeRule, StructureChoice};
use crate::plant::{BoucWenParams, SimConfig};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub pool: PoolConfig,
    pub identification: IdentificationConfig,
    pub inverse: InverseConfig,
    pub plant: Option<BoucWenParams>,
    pub simulation: SimConfig,
    pub excitation: ExcitationConfig,
    pub validation: SinusoidConfig,
    pub compensation: CompensationConfig,
    pub metrics: MetricsConfig,
    pub analysis: AnalysisConfig,
    pub sampling_sweep: SamplingSweepConfig,
    pub beta_sweep: BetaSweepConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            pool: PoolConfig::default(),
            identification: IdentificationConfig::default(),
            inverse: InverseConfig::default(),
            plant: None,
            simulation: SimConfig::default(),
            excitation: ExcitationConfig::default(),
            validation: SinusoidConfig::default(),
            compensation: CompensationConfig::default(),
            metrics: MetricsConfig::default(),
            analysis: AnalysisConfig::default(),
            sampling_sweep: SamplingSweepConfig::default(),
            beta_sweep: BetaSweepConfig::default(),
        }
    }
}

/// Candidate pool: nonlinear degree `ell`, maximum lags and exclusions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PoolConfig {
    pub ell: u32,
    pub n_y: usize,
    pub n_u: usize,
    pub exclude_output_power: bool,
    pub exclude_sign_power: bool,
    pub exclude_output_input_cross: bool,
    /// Restrict direct-model candidates so the model can be inverted for
    /// its delayed input.
    pub invertible: bool,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            ell: 3,
            n_y: 1,
            n_u: 2,
            exclude_output_power: true,
            exclude_sign_power: true,
            exclude_output_input_cross: true,
            invertible: true,
        }
    }
}

impl PoolConfig {
    pub fn exclusions(&self) -> ExclusionRules {
        ExclusionRules {
            output_power: self.exclude_output_power,
            sign_power: self.exclude_sign_power,
            output_input_cross: self.exclude_output_input_cross,
            input_delay: None,
        }
    }
}

/// `"aic"` or a fixed number of terms.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SizeSpec {
    Fixed(usize),
    Named(String),
}

impl SizeSpec {
    fn rule(&self, path: &str) -> Result<SizeRule> {
        match self {
            SizeSpec::Fixed(0) => Err(Error::config(path, "model size must be at least 1")),
            SizeSpec::Fixed(n) => Ok(SizeRule::Fixed(*n)),
            SizeSpec::Named(s) if s == "aic" => Ok(SizeRule::Aic),
            SizeSpec::Named(s) => Err(Error::config(
                path,
                format!("expected \"aic\" or a positive integer, found \"{s}\""),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct IdentificationConfig {
    pub max_terms: usize,
    pub size: SizeSpec,
    /// Impose the continuum-of-equilibria constraint on the estimate.
    pub continuum_constraint: bool,
    pub tau_d: usize,
    pub steady_tol: f64,
    /// Fixed structure; skips selection when present.
    pub structure: Option<Vec<String>>,
}

impl Default for IdentificationConfig {
    fn default() -> Self {
        IdentificationConfig {
            max_terms: 10,
            size: SizeSpec::Named("aic".into()),
            continuum_constraint: true,
            tau_d: 1,
            steady_tol: 1e-9,
            structure: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct InverseConfig {
    pub tau_s: usize,
    /// Moving quadratic regression window applied to the plant output.
    pub smoothing_window: Option<usize>,
    pub structure: Option<Vec<String>>,
}

impl Default for InverseConfig {
    fn default() -> Self {
        InverseConfig {
            tau_s: 2,
            smoothing_window: None,
            structure: None,
        }
    }
}

/// Low-pass filtered Gaussian noise, peak-scaled to `amplitude`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExcitationConfig {
    pub cutoff_hz: f64,
    pub order: usize,
    pub amplitude: f64,
}

impl Default for ExcitationConfig {
    fn default() -> Self {
        ExcitationConfig {
            cutoff_hz: 1.0,
            order: 5,
            amplitude: 70.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SinusoidConfig {
    pub amplitude: f64,
    pub freq_hz: f64,
    pub offset: f64,
    pub duration: f64,
}

impl Default for SinusoidConfig {
    fn default() -> Self {
        SinusoidConfig {
            amplitude: 40.0,
            freq_hz: 1.0,
            offset: 0.0,
            duration: 10.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Rearrange the direct model.
    Direct,
    /// Substitute into the identified inverse model.
    Inverse,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CompensationConfig {
    pub strategy: Strategy,
    pub reference: SinusoidConfig,
    /// Initial compensator outputs; empty means the first reference value.
    pub m0: Vec<f64>,
}

impl Default for CompensationConfig {
    fn default() -> Self {
        CompensationConfig {
            strategy: Strategy::Direct,
            reference: SinusoidConfig::default(),
            m0: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MetricsConfig {
    /// Samples dropped before scoring; defaults to one reference period.
    pub transient_skip: Option<usize>,
    pub nsavi: NsaviForm,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        MetricsConfig {
            transient_skip: None,
            nsavi: NsaviForm::RatioOfSums,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AnalysisConfig {
    pub u_min: f64,
    pub u_max: f64,
    pub grid: usize,
    /// Magnitude of the frozen input increment; defaults to the mean
    /// absolute increment of the validation sinusoid.
    pub phi1: Option<f64>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            u_min: -70.0,
            u_max: 70.0,
            grid: 281,
            phi1: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplingSweepConfig {
    pub sample_times: Vec<f64>,
}

impl Default for SamplingSweepConfig {
    fn default() -> Self {
        SamplingSweepConfig {
            sample_times: vec![0.001, 0.002, 0.005, 0.01, 0.02],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BetaSweepConfig {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
    pub amplitude: f64,
    pub freq_hz: f64,
    pub periods: usize,
}

impl Default for BetaSweepConfig {
    fn default() -> Self {
        BetaSweepConfig {
            start: 0.004,
            stop: 0.1,
            step: 0.002,
            amplitude: 40.0,
            freq_hz: 1.0,
            periods: 3,
        }
    }
}

fn parse_terms(list: &[String], path: &str) -> Result<Vec<Term>> {
    list.iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<Term>()
                .map_err(|e| Error::config(format!("{path}[{i}]"), e.to_string()))
        })
        .collect()
}

impl ExperimentConfig {
    /// The `[plant]` section, which has no default.
    pub fn require_plant(&self) -> Result<BoucWenParams> {
        self.plant
            .ok_or_else(|| Error::config("plant", "missing [plant] section"))
    }

    pub fn sim_config(&self, seed: Option<u64>) -> SimConfig {
        SimConfig {
            seed: seed.unwrap_or(self.simulation.seed),
            ..self.simulation
        }
    }

    /// Samples in one period of the compensation reference.
    pub fn transient_skip(&self) -> usize {
        self.metrics.transient_skip.unwrap_or_else(|| {
            let r = &self.compensation.reference;
            if r.freq_hz > 0.0 {
                (1.0 / (r.freq_hz * self.simulation.sample_time)).round() as usize
            } else {
                0
            }
        })
    }

    pub fn direct_options(&self) -> Result<IdentifyOptions> {
        let id = &self.identification;
        let structure = match &id.structure {
            Some(list) => StructureChoice::Fixed(parse_terms(list, "identification.structure")?),
            None => {
                let mut exclusions = self.pool.exclusions();
                if self.pool.invertible {
                    exclusions = exclusions.with_input_delay(id.tau_d);
                }
                StructureChoice::Select {
                    ell: self.pool.ell,
                    n_y: self.pool.n_y,
                    n_u: self.pool.n_u,
                    exclusions,
                    max_terms: id.max_terms,
                    size: id.size.rule("identification.size")?,
                }
            }
        };
        Ok(IdentifyOptions {
            structure,
            continuum_constraint: id.continuum_constraint,
            tau_d: id.tau_d,
            steady_tol: id.steady_tol,
        })
    }

    pub fn inverse_options(&self) -> Result<IdentifyOptions> {
        let id = &self.identification;
        let structure = match &self.inverse.structure {
            Some(list) => StructureChoice::Fixed(parse_terms(list, "inverse.structure")?),
            None => StructureChoice::Select {
                ell: self.pool.ell,
                n_y: self.pool.n_y,
                n_u: self.pool.n_u,
                exclusions: self.pool.exclusions(),
                max_terms: id.max_terms,
                size: id.size.rule("identification.size")?,
            },
        };
        Ok(IdentifyOptions {
            structure,
            continuum_constraint: id.continuum_constraint,
            tau_d: 1,
            steady_tol: id.steady_tol,
        })
    }

    /// Checks value ranges and cross-field consistency.
    pub fn validate(&self) -> Result<()> {
        let fail = |path: &str, msg: String| Err(Error::config(path, msg));
        if self.pool.ell < 1 {
            return fail("pool.ell", "nonlinear degree must be at least 1".into());
        }
        if self.pool.n_y < 1 || self.pool.n_u < 1 {
            return fail("pool", "n_y and n_u must be at least 1".into());
        }
        if self.identification.max_terms < 1 {
            return fail("identification.max_terms", "must be at least 1".into());
        }
        if self.identification.tau_d < 1 {
            return fail(
                "identification.tau_d",
                "pure delay must be at least 1".into(),
            );
        }
        if self.inverse.tau_s < self.identification.tau_d + 1 {
            return fail(
                "inverse.tau_s",
                format!(
                    "tau_s = {} must be at least tau_d + 1 = {}",
                    self.inverse.tau_s,
                    self.identification.tau_d + 1
                ),
            );
        }
        self.simulation
            .validate()
            .map_err(|e| Error::config("simulation", e.to_string()))?;
        if let Some(p) = &self.plant {
            p.validate()
                .map_err(|e| Error::config("plant", e.to_string()))?;
        }
        let nyquist = 0.5 / self.simulation.dt;
        let ex = &self.excitation;
        if !(ex.cutoff_hz > 0.0 && ex.cutoff_hz < nyquist) {
            return fail(
                "excitation.cutoff_hz",
                format!("cutoff {} Hz must lie in (0, {nyquist}) Hz", ex.cutoff_hz),
            );
        }
        if ex.order < 1 {
            return fail("excitation.order", "filter order must be at least 1".into());
        }
        if !(ex.amplitude > 0.0) {
            return fail("excitation.amplitude", "amplitude must be positive".into());
        }
        for (path, s) in [
            ("validation", &self.validation),
            ("compensation.reference", &self.compensation.reference),
        ] {
            if !(s.duration > 0.0) || !(s.freq_hz >= 0.0) || !s.amplitude.is_finite() {
                return fail(
                    path,
                    "sinusoid needs a finite amplitude, frequency >= 0 and duration > 0".into(),
                );
            }
        }
        for (i, &ts) in self.sampling_sweep.sample_times.iter().enumerate() {
            let ratio = ts / self.simulation.dt;
            if !(ratio >= 1.0 - 1e-9) || (ratio - ratio.round()).abs() > 1e-9 * ratio {
                return fail(
                    &format!("sampling_sweep.sample_times[{i}]"),
                    format!(
                        "{ts} s is not an integer multiple of dt = {} s",
                        self.simulation.dt
                    ),
                );
            }
        }
        if self.analysis.grid < 1 || !(self.analysis.u_max >= self.analysis.u_min) {
            return fail("analysis", "need grid >= 1 and u_max >= u_min".into());
        }
        if let Some(w) = self.inverse.smoothing_window {
            if w < 3 || w % 2 == 0 {
                return fail(
                    "inverse.smoothing_window",
                    "window must be odd and at least 3".into(),
                );
            }
        }
        self.identification.size.rule("identification.size")?;
        if let Some(s) = &self.identification.structure {
            parse_terms(s, "identification.structure")?;
        }
        if let Some(s) = &self.inverse.structure {
            parse_terms(s, "inverse.structure")?;
        }
        Ok(())
    }
}

/// Parses and validates a configuration.
pub fn parse_experiment_config(text: &str) -> Result<ExperimentConfig> {
    let de = toml::Deserializer::new(text);
    let cfg: ExperimentConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        Error::config(
            if path == "." { String::new() } else { path },
            inner.message().to_string(),
        )
    })?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_experiment_config(path: &Path) -> Result<ExperimentConfig> {
    let text = fs::read_to_string(path)?;
    parse_experiment_config(&text)
}
