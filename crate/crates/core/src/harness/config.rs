//! Scenario files.
//!
//! A scenario is a TOML document with the sections below. Angles are in rad,
//! angular rates in rad/s, times in s and rates in Hz.
//!
//! ```toml
//! name = "isotropic, small initial error"
//!
//! [truth]
//! dynamics = "torque_free"          # or "pendulum"
//! inertia = [1.0, 2.0, 2.5]         # kg m^2, principal moments
//! initial_attitude = [0.0, 0.0, 0.0] # rotation vector, rad
//! initial_omega = [4.14, 4.14, 4.14] # body rate, rad/s
//! substeps = 4                       # integrator steps per gyro sample
//! # pendulum only
//! # mass = 1.0                       # kg
//! # com_offset = [0.0, 0.0, 0.2]     # body-frame pivot to centre of mass, m
//! # gravity = 9.81                   # m/s^2
//!
//! [gyro]
//! rate_hz = 50.0
//! noise_density = 0.017453292519943295 # rad/sqrt(s)
//!
//! [vectors]                          # or [direct_attitude]
//! rate_hz = 10.0
//! references = [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
//! covariance = [0.24, 0.24, 0.24]    # diagonal noise variance of each measured vector
//!
//! [filters]
//! kinds = ["fnf-r", "fnf-l", "iekf", "meas"]
//! initial_scale = 10.0               # F0 = initial_scale * exp(initial_rotation^)
//! initial_rotation = [0.17453292519943295, 0.0, 0.0]
//!
//! [montecarlo]
//! runs = 50
//! duration_s = 60.0
//! seed = 1
//!
//! [checks]                           # optional, used by `simulate --assert`
//! fnf-r = [4.5, 7.5]                 # accepted AE range, deg
//! ```
//!
//! `[direct_attitude]` replaces `[vectors]` with
//! `rate_hz`, `noise = "mfd" | "gaussian"`, `concentration` (diagonal of the
//! body-frame MFD noise parameter) and `covariance` (diagonal of the body-frame
//! Gaussian noise covariance, rad^2). `noise` selects how measurements are drawn.
//! The MFD filters use `concentration` and the IEKF uses `covariance` when both
//! are given; otherwise each converts the one that is present.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum FilterKind {
    #[serde(rename = "fnf-r")]
    FnfR,
    #[serde(rename = "fnf-l")]
    FnfL,
    #[serde(rename = "iekf")]
    Iekf,
    #[serde(rename = "meas")]
    Meas,
}

impl FilterKind {
    pub const ALL: [FilterKind; 4] = [FilterKind::FnfR, FilterKind::FnfL, FilterKind::Iekf, FilterKind::Meas];

    pub fn label(&self) -> &'static str {
        match self {
            FilterKind::FnfR => "FNF-R",
            FilterKind::FnfL => "FNF-L",
            FilterKind::Iekf => "IEKF",
            FilterKind::Meas => "MEAS",
        }
    }

    pub fn slug(&self) -> &'static str {
        match self {
            FilterKind::FnfR => "fnf-r",
            FilterKind::FnfL => "fnf-l",
            FilterKind::Iekf => "iekf",
            FilterKind::Meas => "meas",
        }
    }

    pub fn from_slug(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.slug() == s || k.label() == s)
    }
}

impl fmt::Display for FilterKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dynamics {
    TorqueFree,
    Pendulum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruthConfig {
    #[serde(default = "default_dynamics")]
    pub dynamics: Dynamics,
    #[serde(default = "default_inertia")]
    pub inertia: [f64; 3],
    #[serde(default)]
    pub initial_attitude: [f64; 3],
    #[serde(default = "default_omega")]
    pub initial_omega: [f64; 3],
    #[serde(default = "default_substeps")]
    pub substeps: usize,
    #[serde(default = "default_mass")]
    pub mass: f64,
    #[serde(default)]
    pub com_offset: [f64; 3],
    #[serde(default = "default_gravity")]
    pub gravity: f64,
}

impl Default for TruthConfig {
    fn default() -> Self {
        TruthConfig {
            dynamics: default_dynamics(),
            inertia: default_inertia(),
            initial_attitude: [0.0; 3],
            initial_omega: default_omega(),
            substeps: default_substeps(),
            mass: default_mass(),
            com_offset: [0.0; 3],
            gravity: default_gravity(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GyroConfig {
    #[serde(default = "default_gyro_rate")]
    pub rate_hz: f64,
    #[serde(default = "default_gyro_noise")]
    pub noise_density: f64,
}

impl Default for GyroConfig {
    fn default() -> Self {
        GyroConfig {
            rate_hz: default_gyro_rate(),
            noise_density: default_gyro_noise(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorConfig {
    #[serde(default = "default_meas_rate")]
    pub rate_hz: f64,
    #[serde(default = "default_references")]
    pub references: Vec<[f64; 3]>,
    pub covariance: [f64; 3],
    /// Falls back to `1 / tr(covariance)` per vector.
    #[serde(default)]
    pub weights: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AttitudeNoise {
    Mfd,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectAttitudeConfig {
    #[serde(default = "default_meas_rate")]
    pub rate_hz: f64,
    pub noise: AttitudeNoise,
    #[serde(default)]
    pub concentration: Option<[f64; 3]>,
    #[serde(default)]
    pub covariance: Option<[f64; 3]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FiltersConfig {
    pub kinds: Vec<FilterKind>,
    #[serde(default = "default_initial_scale")]
    pub initial_scale: f64,
    #[serde(default = "default_initial_rotation")]
    pub initial_rotation: [f64; 3],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonteCarloConfig {
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_duration")]
    pub duration_s: f64,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Record wall-clock time per filter. Disable for byte-identical outputs.
    #[serde(default = "default_true")]
    pub timing: bool,
    #[serde(default)]
    pub threads: Option<usize>,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            runs: default_runs(),
            duration_s: default_duration(),
            seed: default_seed(),
            timing: true,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default)]
    pub name: String,
    #[serde(default)]
    pub truth: TruthConfig,
    #[serde(default)]
    pub gyro: GyroConfig,
    #[serde(default)]
    pub vectors: Option<VectorConfig>,
    #[serde(default)]
    pub direct_attitude: Option<DirectAttitudeConfig>,
    pub filters: FiltersConfig,
    #[serde(default)]
    pub montecarlo: MonteCarloConfig,
    /// Accepted AE range in degrees per filter slug.
    #[serde(default)]
    pub checks: BTreeMap<String, [f64; 2]>,
}

fn default_dynamics() -> Dynamics {
    Dynamics::TorqueFree
}
fn default_inertia() -> [f64; 3] {
    [1.0, 2.0, 2.5]
}
fn default_omega() -> [f64; 3] {
    [4.14; 3]
}
fn default_substeps() -> usize {
    4
}
fn default_mass() -> f64 {
    1.0
}
fn default_gravity() -> f64 {
    9.81
}
fn default_gyro_rate() -> f64 {
    50.0
}
fn default_gyro_noise() -> f64 {
    PI / 180.0
}
fn default_meas_rate() -> f64 {
    10.0
}
fn default_references() -> Vec<[f64; 3]> {
    vec![[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]
}
fn default_initial_scale() -> f64 {
    10.0
}
fn default_initial_rotation() -> [f64; 3] {
    [PI / 18.0, 0.0, 0.0]
}
fn default_runs() -> usize {
    50
}
fn default_duration() -> f64 {
    60.0
}
fn default_seed() -> u64 {
    1
}
fn default_true() -> bool {
    true
}

fn config_err(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

impl Scenario {
    pub fn from_toml_str(s: &str) -> Result<Self> {
        let sc: Scenario = toml::from_str(s).map_err(|e| config_err(e.to_string()))?;
        sc.validate()?;
        Ok(sc)
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_err(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| config_err(e.to_string()))
    }

    pub fn gyro_dt(&self) -> f64 {
        1.0 / self.gyro.rate_hz
    }

    pub fn steps(&self) -> usize {
        (self.montecarlo.duration_s * self.gyro.rate_hz).round() as usize
    }

    /// Gyro samples between measurement epochs.
    pub fn measurement_stride(&self) -> usize {
        let rate = match (&self.vectors, &self.direct_attitude) {
            (Some(v), _) => v.rate_hz,
            (None, Some(d)) => d.rate_hz,
            (None, None) => return usize::MAX,
        };
        (self.gyro.rate_hz / rate).round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let t = &self.truth;
        if t.inertia.iter().any(|j| !(*j > 0.0)) {
            return Err(config_err("truth.inertia must be positive"));
        }
        if t.substeps == 0 {
            return Err(config_err("truth.substeps must be at least 1"));
        }
        if !(self.gyro.rate_hz > 0.0) || !(self.gyro.noise_density >= 0.0) {
            return Err(config_err("gyro.rate_hz must be positive and gyro.noise_density non-negative"));
        }
        let meas_rate = match (&self.vectors, &self.direct_attitude) {
            (Some(_), Some(_)) => {
                return Err(config_err("use either [vectors] or [direct_attitude], not both"))
            }
            (None, None) => return Err(config_err("a [vectors] or [direct_attitude] section is required")),
            (Some(v), None) => {
                if v.references.is_empty() {
                    return Err(config_err("vectors.references is empty"));
                }
                if v.covariance.iter().any(|c| *c < 0.0) {
                    return Err(config_err("vectors.covariance must be non-negative"));
                }
                if let Some(w) = &v.weights {
                    if w.len() != v.references.len() || w.iter().any(|x| !(*x > 0.0)) {
                        return Err(config_err("vectors.weights must be positive, one per reference"));
                    }
                }
                v.rate_hz
            }
            (None, Some(d)) => {
                if d.concentration.is_none() && d.covariance.is_none() {
                    return Err(config_err("direct_attitude needs concentration or covariance"));
                }
                if d.noise == AttitudeNoise::Mfd && d.concentration.is_none() {
                    return Err(config_err("direct_attitude.noise = \"mfd\" needs concentration"));
                }
                if d.noise == AttitudeNoise::Gaussian && d.covariance.is_none() {
                    return Err(config_err("direct_attitude.noise = \"gaussian\" needs covariance"));
                }
                d.rate_hz
            }
        };
        if !(meas_rate > 0.0) || meas_rate > self.gyro.rate_hz {
            return Err(config_err("measurement rate must be positive and not above the gyro rate"));
        }
        let ratio = self.gyro.rate_hz / meas_rate;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return Err(config_err("gyro rate must be an integer multiple of the measurement rate"));
        }
        if self.filters.kinds.is_empty() {
            return Err(config_err("filters.kinds is empty"));
        }
        if self.filters.kinds.contains(&FilterKind::Meas) && self.vectors.is_none() {
            return Err(config_err("the \"meas\" estimator needs [vectors]"));
        }
        if !(self.filters.initial_scale >= 0.0) {
            return Err(config_err("filters.initial_scale must be non-negative"));
        }
        let m = &self.montecarlo;
        if m.runs == 0 || !(m.duration_s > 0.0) || self.steps() == 0 {
            return Err(config_err("montecarlo.runs and montecarlo.duration_s must be positive"));
        }
        if m.threads == Some(0) {
            return Err(config_err("montecarlo.threads must be at least 1"));
        }
        for key in self.checks.keys() {
            if FilterKind::from_slug(key).is_none() {
                return Err(config_err(format!("checks: unknown filter {key:?}")));
            }
        }
        Ok(())
    }
}

/// Noise cases of the vector-measurement study.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseCase {
    Isotropic024,
    Isotropic004,
    Anisotropic,
}

impl NoiseCase {
    pub fn covariance(&self) -> [f64; 3] {
        match self {
            NoiseCase::Isotropic024 => [0.24; 3],
            NoiseCase::Isotropic004 => [0.04; 3],
            NoiseCase::Anisotropic => [0.3, 0.01, 0.01],
        }
    }
}

/// Vector-measurement scenario with all four estimators. A large initial error
/// uses `F0 = exp(pi e1^)`, otherwise `F0 = 10 exp(pi/18 e1^)`.
pub fn vector_scenario(case: NoiseCase, large_initial_error: bool, runs: usize, seed: u64) -> Scenario {
    let (initial_scale, initial_rotation) = if large_initial_error {
        (1.0, [PI, 0.0, 0.0])
    } else {
        (default_initial_scale(), default_initial_rotation())
    };
    Scenario {
        name: format!("{case:?}, large initial error: {large_initial_error}"),
        truth: TruthConfig::default(),
        gyro: GyroConfig::default(),
        vectors: Some(VectorConfig {
            rate_hz: default_meas_rate(),
            references: default_references(),
            covariance: case.covariance(),
            weights: None,
        }),
        direct_attitude: None,
        filters: FiltersConfig {
            kinds: FilterKind::ALL.to_vec(),
            initial_scale,
            initial_rotation,
        },
        montecarlo: MonteCarloConfig {
            runs,
            seed,
            ..MonteCarloConfig::default()
        },
        checks: BTreeMap::new(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
        [vectors]
        covariance = [0.24, 0.24, 0.24]
        [filters]
        kinds = ["fnf-r", "iekf"]
    "#;

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::from_toml_str(MINIMAL).unwrap();
        assert_eq!(s.truth.inertia, [1.0, 2.0, 2.5]);
        assert_eq!(s.steps(), 3000);
        assert_eq!(s.measurement_stride(), 5);
        assert_eq!(s.filters.kinds, vec![FilterKind::FnfR, FilterKind::Iekf]);
    }

    #[test]
    fn round_trip_through_toml() {
        let s = vector_scenario(NoiseCase::Anisotropic, true, 7, 3);
        let text = s.to_toml_string().unwrap();
        assert_eq!(Scenario::from_toml_str(&text).unwrap(), s);
    }

    #[test]
    fn invalid_configs_are_rejected() {
        let bad = [
            "[filters]\nkinds = [\"fnf-r\"]\n",
            &MINIMAL.replace("fnf-r", "kalman"),
            &format!("{MINIMAL}\n[gyro]\nrate_hz = 33.0\n"),
            &format!("{MINIMAL}\n[montecarlo]\nruns = 0\n"),
            &format!("{MINIMAL}\nunknown = 1\n"),
            &format!("{MINIMAL}\n[checks]\nukf = [1.0, 2.0]\n"),
            "[direct_attitude]\nnoise = \"mfd\"\ncovariance = [1.0, 1.0, 1.0]\n[filters]\nkinds = [\"fnf-r\"]\n",
        ];
        for text in bad {
            assert!(matches!(Scenario::from_toml_str(text), Err(Error::Config(_))), "{text}");
        }
    }
}
