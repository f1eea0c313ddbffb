//! Scenario configuration read from TOML.

use std::path::PathBuf;

use gyroled::audit::{CosimConfig, DomainSizing, Scenario};
use gyroled::field::{ShellBump, WavePulse};
use gyroled::solver::SolverConfig;
use gyroled::{Execution, ProfileKind, RotorModel, UnitSystem};
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScenarioConfig {
    pub units: Units,
    pub profiles: Profiles,
    pub spin: Spin,
    pub pulse: Pulse,
    pub solver: Solver,
    pub grid: Grid,
    pub sweep: Sweep,
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Units {
    pub e: f64,
    pub m_b: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Profiles {
    pub charge: ProfileKind,
    pub mass: ProfileKind,
}

/// Exactly one of the two must be set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct Spin {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s_b0: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseShape {
    None,
    Bump,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pulse {
    pub shape: PulseShape,
    /// Support annulus in units of R.
    pub r_min: f64,
    pub r_max: f64,
    pub amplitude: f64,
    pub rate: f64,
    pub tilt: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Picard,
    Volterra,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Auto {
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Lambda {
    Auto(Auto),
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Solver {
    pub method: Method,
    pub lambda: Lambda,
    pub h: f64,
    pub t_end: f64,
    pub tol: f64,
    pub sup_tol: f64,
    pub max_iter: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sizing {
    Audit,
    Particle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    pub h: f64,
    /// dt = cfl · h.
    pub cfl: f64,
    pub t_end: f64,
    pub margin: usize,
    pub sizing: Sizing,
    pub energy_tol: f64,
    pub momentum_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub coupling_min: f64,
    pub coupling_max: f64,
    pub steps: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: PathBuf,
    pub stride: usize,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            units: Units { e: 1.0, m_b: 1.0, r: 1.0 },
            profiles: Profiles { charge: ProfileKind::Shell, mass: ProfileKind::Shell },
            spin: Spin { omega0: Some(0.3), s_b0: None },
            pulse: Pulse { shape: PulseShape::Bump, r_min: 3.0, r_max: 4.0, amplitude: 0.006, rate: 0.0, tilt: 0.0 },
            solver: Solver {
                method: Method::Volterra,
                lambda: Lambda::Auto(Auto::Auto),
                h: 2.0 / 128.0,
                t_end: 40.0,
                tol: 1e-12,
                sup_tol: 1e-13,
                max_iter: 500,
            },
            grid: Grid {
                h: 1.0 / 16.0,
                cfl: 0.5,
                t_end: 12.0,
                margin: 4,
                sizing: Sizing::Audit,
                energy_tol: 1e-3,
                momentum_tol: 1e-10,
            },
            sweep: Sweep { coupling_min: 1.0, coupling_max: 2.5, steps: 30 },
            output: Output { dir: PathBuf::from("out"), stride: 4 },
        }
    }
}

impl Default for Units {
    fn default() -> Self {
        ScenarioConfig::default().units
    }
}

impl Default for Profiles {
    fn default() -> Self {
        ScenarioConfig::default().profiles
    }
}

impl Default for Pulse {
    fn default() -> Self {
        ScenarioConfig::default().pulse
    }
}

impl Default for Solver {
    fn default() -> Self {
        ScenarioConfig::default().solver
    }
}

impl Default for Grid {
    fn default() -> Self {
        ScenarioConfig::default().grid
    }
}

impl Default for Sweep {
    fn default() -> Self {
        ScenarioConfig::default().sweep
    }
}

impl Default for Output {
    fn default() -> Self {
        ScenarioConfig::default().output
    }
}

pub const PRESETS: [&str; 3] = ["shell-soliton", "shell-scatter", "threshold-sweep"];

impl ScenarioConfig {
    pub fn preset(name: &str) -> Result<Self, CliError> {
        let base = ScenarioConfig::default();
        match name {
            "shell-scatter" => Ok(base),
            "shell-soliton" => Ok(ScenarioConfig { pulse: Pulse { shape: PulseShape::None, ..base.pulse }, ..base }),
            "threshold-sweep" => Ok(ScenarioConfig { pulse: Pulse { shape: PulseShape::None, ..base.pulse }, ..base }),
            other => Err(CliError::Config(format!("unknown preset `{other}`; expected one of {}", PRESETS.join(", ")))),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        let config: ScenarioConfig = toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, why: &str| Err(CliError::Config(format!("{field}: {why}")));
        match (self.spin.omega0, self.spin.s_b0) {
            (Some(_), Some(_)) => return bad("spin", "give exactly one of omega0 and s_b0, not both"),
            (None, None) => return bad("spin", "one of omega0 and s_b0 is required"),
            _ => {}
        }
        UnitSystem::new(self.units.e, self.units.m_b, self.units.r).map_err(|e| CliError::Config(format!("units: {e}")))?;
        if self.pulse.shape == PulseShape::Bump && !(self.pulse.r_min > 1.0 && self.pulse.r_max > self.pulse.r_min) {
            return bad("pulse", "support annulus must satisfy 1 < r_min < r_max (units of R)");
        }
        if !(self.grid.cfl > 0.0 && self.grid.cfl <= std::f64::consts::FRAC_1_SQRT_2) {
            return bad("grid.cfl", "must lie in (0, 1/sqrt 2]");
        }
        if self.output.stride == 0 {
            return bad("output.stride", "must be at least 1");
        }
        if self.sweep.steps < 2 || !(self.sweep.coupling_max > self.sweep.coupling_min && self.sweep.coupling_min > 0.0) {
            return bad("sweep", "need 0 < coupling_min < coupling_max and at least 2 steps");
        }
        Ok(())
    }

    pub fn unit_system(&self) -> gyroled::Result<UnitSystem> {
        UnitSystem::new(self.units.e, self.units.m_b, self.units.r)
    }

    pub fn wave_pulse(&self) -> gyroled::Result<WavePulse> {
        let p = self.pulse;
        let r = self.units.r;
        match p.shape {
            PulseShape::None => Ok(WavePulse::zero()),
            PulseShape::Bump => {
                let shape = ShellBump {
                    amplitude: p.amplitude,
                    r_min: p.r_min * r,
                    r_max: p.r_max * r,
                    rate: p.rate,
                    tilt: p.tilt,
                };
                WavePulse::new(std::sync::Arc::new(shape), r)
            }
        }
    }

    /// Scenario with ω₀ resolved from s_b0 when needed.
    pub fn scenario(&self) -> gyroled::Result<Scenario> {
        let units = self.unit_system()?;
        let rotor = RotorModel::new(&units.mass(self.profiles.mass)?)?;
        let omega0 = match (self.spin.omega0, self.spin.s_b0) {
            (Some(w), _) => {
                rotor.bare_spin(w)?;
                w
            }
            (None, Some(s)) => rotor.omega_from_spin(s),
            (None, None) => 0.0,
        };
        Ok(Scenario {
            units,
            charge: self.profiles.charge,
            mass: self.profiles.mass,
            omega0,
            pulse: self.wave_pulse()?,
        })
    }

    pub fn solver_config(&self) -> SolverConfig {
        let s = self.solver;
        SolverConfig {
            lambda: match s.lambda {
                Lambda::Auto(_) => None,
                Lambda::Fixed(v) => Some(v),
            },
            h: s.h * self.units.r,
            t_end: s.t_end * self.units.r,
            tol: s.tol,
            sup_tol: Some(s.sup_tol),
            max_iter: s.max_iter,
            backward: false,
            exec: Execution::Parallel,
        }
    }

    /// Grid settings at mesh width `h` (units of R).
    pub fn cosim_config(&self, h: f64) -> CosimConfig {
        let r = self.units.r;
        CosimConfig {
            h: h * r,
            dt: Some(self.grid.cfl * h * r),
            t_end: self.grid.t_end * r,
            stride: self.output.stride,
            sizing: match self.grid.sizing {
                Sizing::Audit => DomainSizing::Audit,
                Sizing::Particle => DomainSizing::ParticleOnly,
            },
            margin: self.grid.margin,
            audit: true,
            exec: Execution::Parallel,
        }
    }
}
