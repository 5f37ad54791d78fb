//! Scenario files: TOML documents with unit-suffixed keys.
//!
//! Every physical quantity carries its unit in the key name (`_um`, `_nm`,
//! `_rad`, `_mrad`, `_hz`, `_mhz`, `_ns`); values are converted to SI when the
//! scenario is turned into an [`ExperimentConfig`]. Unknown keys are rejected.

use std::path::Path;

use anyhow::{bail, Context};
use lambda_herald::geometry::{AtomPairLayout, DetectorPatch, TrapModel};
use lambda_herald::herald::{ExperimentConfig, QuadratureSpec, TrapIntegration};
use lambda_herald::optics::{Handedness, JonesVector, PolarizerSpec};
use lambda_herald::quadrature::Scheme;
use nalgebra::Vector3;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::grid::Grid;
use crate::UsageError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub layout: LayoutSection,
    pub trap: TrapSection,
    pub detector1: DetectorSection,
    pub detector2: DetectorSection,
    pub rates: RatesSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default, skip_serializing_if = "SweepSection::is_empty")]
    pub sweep: SweepSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LayoutSection {
    pub separation_um: f64,
    pub wavelength_nm: f64,
    /// Direction of the interatomic axis (unitless, normalized on load).
    #[serde(default = "default_axis")]
    pub axis: [f64; 3],
}

fn default_axis() -> [f64; 3] {
    [1.0, 0.0, 0.0]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrapSection {
    pub confinement_nm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSection {
    pub theta_rad: f64,
    #[serde(default)]
    pub chi_rad: f64,
    pub alpha_mrad: f64,
    pub phi_rad: f64,
    pub polarizer: PolarizerSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PolarizerSection {
    Linear {
        angle_rad: f64,
    },
    Circular {
        handedness: HandednessKey,
    },
    /// Jones vector `(eps_plus, eps_minus)` in the circular emission basis.
    General {
        plus_re: f64,
        plus_im: f64,
        minus_re: f64,
        minus_im: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HandednessKey {
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RatesSection {
    pub repetition_rate_mhz: f64,
    pub detector_efficiency: f64,
    pub dark_count_rate_hz: f64,
    pub coincidence_window_ns: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKey {
    #[default]
    GaussLegendre,
    Midpoint,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum TrapIntegrationKey {
    #[default]
    Difference,
    Full,
}

/// Missing keys fall back to the library defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSection {
    pub points_theta: usize,
    pub points_chi: usize,
    pub points_trap: usize,
    pub scheme: SchemeKey,
    pub trap_truncation_sigma: f64,
    pub trap_integration: TrapIntegrationKey,
}

impl Default for QuadratureSection {
    fn default() -> Self {
        let q = QuadratureSpec::default();
        Self {
            points_theta: q.points_theta,
            points_chi: q.points_chi,
            points_trap: q.points_trap,
            scheme: SchemeKey::GaussLegendre,
            trap_truncation_sigma: q.trap_truncation,
            trap_integration: TrapIntegrationKey::Difference,
        }
    }
}

/// Optional parameter grids for sweeps.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta21_rad: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub v12: Option<Grid>,
    /// Relative linear-polarizer angle, for the Malus table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_rad: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confinement_nm: Option<Grid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_d_mrad: Option<Grid>,
}

impl SweepSection {
    pub fn is_empty(&self) -> bool {
        self == &SweepSection::default()
    }
}

impl PolarizerSection {
    pub fn to_spec(&self) -> anyhow::Result<PolarizerSpec> {
        Ok(match *self {
            PolarizerSection::Linear { angle_rad } => {
                if !angle_rad.is_finite() {
                    bail!(UsageError::new("polarizer angle must be finite"));
                }
                PolarizerSpec::Linear { angle: angle_rad }
            }
            PolarizerSection::Circular { handedness } => {
                PolarizerSpec::Circular(match handedness {
                    HandednessKey::Plus => Handedness::Plus,
                    HandednessKey::Minus => Handedness::Minus,
                })
            }
            PolarizerSection::General {
                plus_re,
                plus_im,
                minus_re,
                minus_im,
            } => PolarizerSpec::General(
                JonesVector::normalized(
                    Complex64::new(plus_re, plus_im),
                    Complex64::new(minus_re, minus_im),
                )
                .map_err(|e| UsageError::new(format!("general polarizer: {e}")))?,
            ),
        })
    }
}

impl DetectorSection {
    fn to_patch(&self) -> anyhow::Result<DetectorPatch> {
        DetectorPatch::new(
            self.theta_rad,
            self.chi_rad,
            self.alpha_mrad * 1e-3,
            self.phi_rad,
            self.polarizer.to_spec()?,
        )
        .map_err(|e| UsageError::new(e.to_string()).into())
    }
}

impl ScenarioFile {
    /// Scenario with the reference parameters: d = 5 um, lambda = 650 nm,
    /// mu = 10 nm, 5 mrad x pi/6 detectors at theta = pi/2 in adjacent chi
    /// strips, r = 5 MHz.
    pub fn reference() -> Self {
        let cfg = ExperimentConfig::reference_setup();
        let detector = |chi: f64| DetectorSection {
            theta_rad: std::f64::consts::FRAC_PI_2,
            chi_rad: chi,
            alpha_mrad: 5.0,
            phi_rad: cfg.detector1.phi_d,
            polarizer: PolarizerSection::Linear { angle_rad: 0.0 },
        };
        Self {
            layout: LayoutSection {
                separation_um: 5.0,
                wavelength_nm: 650.0,
                axis: default_axis(),
            },
            trap: TrapSection {
                confinement_nm: 10.0,
            },
            detector1: detector(cfg.detector1.chi_center),
            detector2: detector(cfg.detector2.chi_center),
            rates: RatesSection {
                repetition_rate_mhz: 5.0,
                detector_efficiency: 0.3,
                dark_count_rate_hz: 100.0,
                coincidence_window_ns: 10.0,
            },
            quadrature: QuadratureSection::default(),
            sweep: SweepSection::default(),
        }
    }

    pub fn parse(text: &str) -> anyhow::Result<Self> {
        toml::from_str(text).map_err(|e| UsageError::new(format!("invalid scenario: {e}")).into())
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading scenario {}", path.display()))?;
        Self::parse(&text).with_context(|| format!("in scenario {}", path.display()))
    }

    pub fn to_toml(&self) -> anyhow::Result<String> {
        Ok(toml::to_string(self)?)
    }

    pub fn experiment(&self) -> anyhow::Result<ExperimentConfig> {
        let [x, y, z] = self.layout.axis;
        let layout = AtomPairLayout::with_axis(
            self.layout.separation_um * 1e-6,
            self.layout.wavelength_nm * 1e-9,
            Vector3::new(x, y, z),
        )
        .map_err(|e| UsageError::new(e.to_string()))?;
        let trap = TrapModel::new(self.trap.confinement_nm * 1e-9)
            .map_err(|e| UsageError::new(e.to_string()))?;
        let config = ExperimentConfig {
            layout,
            trap,
            detector1: self.detector1.to_patch()?,
            detector2: self.detector2.to_patch()?,
            repetition_rate: self.rates.repetition_rate_mhz * 1e6,
            detector_efficiency: self.rates.detector_efficiency,
            dark_count_rate: self.rates.dark_count_rate_hz,
            coincidence_window: self.rates.coincidence_window_ns * 1e-9,
        };
        config
            .validate()
            .map_err(|e| UsageError::new(e.to_string()))?;
        Ok(config)
    }

    pub fn quadrature_spec(&self) -> anyhow::Result<QuadratureSpec> {
        let q = &self.quadrature;
        let spec = QuadratureSpec {
            points_theta: q.points_theta,
            points_chi: q.points_chi,
            points_trap: q.points_trap,
            scheme: match q.scheme {
                SchemeKey::GaussLegendre => Scheme::GaussLegendre,
                SchemeKey::Midpoint => Scheme::Midpoint,
            },
            trap_truncation: q.trap_truncation_sigma,
            trap_integration: match q.trap_integration {
                TrapIntegrationKey::Difference => TrapIntegration::Difference,
                TrapIntegrationKey::Full => TrapIntegration::Full,
            },
        };
        spec.validate()
            .map_err(|e| UsageError::new(e.to_string()))?;
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_matches_library_setup() {
        let cfg = ScenarioFile::reference().experiment().unwrap();
        let lib = ExperimentConfig::reference_setup();
        assert!((cfg.layout.separation() - lib.layout.separation()).abs() < 1e-20);
        assert!((cfg.layout.wavelength() - lib.layout.wavelength()).abs() < 1e-20);
        assert!((cfg.trap.confinement - lib.trap.confinement).abs() < 1e-22);
        assert!((cfg.detector1.alpha_d - 5e-3).abs() < 1e-18);
        assert_eq!(cfg.detector2.chi_center, lib.detector2.chi_center);
        assert!((cfg.repetition_rate - 5e6).abs() < 1e-6);
    }

    #[test]
    fn written_scenarios_reparse_identically() {
        let mut s = ScenarioFile::reference();
        s.detector2.polarizer = PolarizerSection::General {
            plus_re: 0.6,
            plus_im: -0.1,
            minus_re: 0.2,
            minus_im: 0.7,
        };
        s.detector1.polarizer = PolarizerSection::Circular {
            handedness: HandednessKey::Minus,
        };
        s.sweep.delta21_rad = Some(Grid::linspace(
            -std::f64::consts::FRAC_PI_2,
            std::f64::consts::FRAC_PI_2,
            21,
        ));
        s.sweep.v12 = Some(Grid::values(vec![0.0, 0.25, 0.5, 0.75, 1.0]));
        s.quadrature.scheme = SchemeKey::Midpoint;
        let text = s.to_toml().unwrap();
        assert_eq!(ScenarioFile::parse(&text).unwrap(), s);
        let reference = ScenarioFile::reference();
        assert_eq!(
            ScenarioFile::parse(&reference.to_toml().unwrap()).unwrap(),
            reference
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let mut text = ScenarioFile::reference().to_toml().unwrap();
        text = text.replace("[trap]\n", "[trap]\nconfinement_m = 1e-8\n");
        let err = ScenarioFile::parse(&text).unwrap_err();
        assert!(err.downcast_ref::<UsageError>().is_some());
        let text = ScenarioFile::reference()
            .to_toml()
            .unwrap()
            .replace("separation_um", "separation");
        assert!(ScenarioFile::parse(&text).is_err());
    }

    #[test]
    fn invalid_physics_is_a_usage_error() {
        let mut s = ScenarioFile::reference();
        s.rates.detector_efficiency = 1.5;
        assert!(s
            .experiment()
            .unwrap_err()
            .downcast_ref::<UsageError>()
            .is_some());
        let mut s = ScenarioFile::reference();
        s.quadrature.points_chi = 0;
        assert!(s.quadrature_spec().is_err());
    }
}
