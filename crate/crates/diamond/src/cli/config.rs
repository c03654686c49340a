//! JSON run-configuration schema and validation.
//!
//! Frequencies and rates are given in Hz (cycles); they are multiplied by
//! 2*pi on ingestion and handled as rad/s internally. Phases are radians,
//! quality factors and pump amplitudes dimensionless. Exactly one of
//! `{q, gamma_hz}` must be supplied per port pair.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{DiamondParams, PumpConfig, SignConvention};
use crate::optimize::{FreeParam, Objective, OptimizationProblem};
use crate::sweep::{Scale, SweepAxis, SweepParam, WPolicy};

const TAU: f64 = std::f64::consts::TAU;

fn default_convention() -> SignConvention {
    SignConvention::Paper
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub frequencies: Frequencies,
    pub ports: Ports,
    pub couplings: Couplings,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pumps: Option<Pumps>,
    #[serde(default = "default_convention")]
    pub convention: SignConvention,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Frequencies {
    /// Resonance of modes 1 and 3, Hz.
    pub omega1_hz: f64,
    /// Resonance of modes 2 and 4, Hz.
    pub omega2_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Ports {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma1_hz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma2_hz: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub mag_hz: f64,
    pub phase_rad: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Couplings {
    pub g: CouplingSpec,
    pub h: CouplingSpec,
    pub f: CouplingSpec,
    pub k: CouplingSpec,
    /// Parametric rate on both diagonals, Hz.
    pub gamma_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Pumps {
    /// Pump into port 2 as [re, im].
    pub a2bar: [f64; 2],
    /// Pump into port 4 as [re, im].
    pub a4bar: [f64; 2],
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub axes: Vec<AxisSpec>,
    pub w_policy: WPolicySpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub param: SweepParam,
    /// Hz for frequency-like parameters, radians for phases, dimensionless
    /// for Q factors and pump magnitudes.
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WPolicySpec {
    FixedHz(f64),
    TrackMax {
        center_hz: f64,
        halfwidth_hz: f64,
        points: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    pub objective: ObjectiveSpec,
    pub free: Vec<FreeSpec>,
    pub grid_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectiveSpec {
    IntrinsicAt { w_hz: f64 },
    IntrinsicMax { center_hz: f64, halfwidth_hz: f64, points: usize },
    ExtrinsicAt { w_hz: f64 },
    IsolationAt { w_hz: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FreeSpec {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<Scale>,
}

/// Conversion factor from config units to internal units for one sweep
/// parameter: 2*pi for Hz-valued parameters, 1 otherwise.
pub fn unit_scale(param: SweepParam) -> f64 {
    match param {
        SweepParam::ProbeFrequency
        | SweepParam::Gamma
        | SweepParam::GMag
        | SweepParam::HMag
        | SweepParam::FMag
        | SweepParam::KMag => TAU,
        _ => 1.0,
    }
}

impl RunConfig {
    /// Parses and validates a JSON config.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(|e| {
            Error::ParseError(format!(
                "line {}, column {}: {e}",
                e.line(),
                e.column()
            ))
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.frequencies.omega1_hz > 0.0) || !(self.frequencies.omega2_hz > 0.0) {
            return Err(Error::ValidationError(
                "frequencies.omega1_hz and omega2_hz must be positive".into(),
            ));
        }
        match (self.ports.q1, self.ports.gamma1_hz) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(Error::ValidationError(
                    "ports: exactly one of q1 and gamma1_hz must be given".into(),
                ))
            }
        }
        match (self.ports.q2, self.ports.gamma2_hz) {
            (Some(_), None) | (None, Some(_)) => {}
            _ => {
                return Err(Error::ValidationError(
                    "ports: exactly one of q2 and gamma2_hz must be given".into(),
                ))
            }
        }
        self.params()?.validate().map_err(|e| match e {
            Error::InvalidParams(msg) => Error::ValidationError(msg),
            other => other,
        })?;
        if let Some(sw) = &self.sweep {
            if sw.axes.is_empty() || sw.axes.len() > 2 {
                return Err(Error::ValidationError(
                    "sweep.axes must have 1 or 2 entries".into(),
                ));
            }
            for axis in &sw.axes {
                internal_axis(axis).validate().map_err(|e| match e {
                    Error::InvalidParams(msg) => Error::ValidationError(msg),
                    other => other,
                })?;
            }
        }
        if let Some(opt) = &self.optimize {
            if opt.free.is_empty() {
                return Err(Error::ValidationError(
                    "optimize.free must not be empty".into(),
                ));
            }
            if opt.grid_points == 0 {
                return Err(Error::ValidationError(
                    "optimize.grid_points must be at least 1".into(),
                ));
            }
        }
        Ok(())
    }

    /// Internal parameter set (rad/s).
    pub fn params(&self) -> Result<DiamondParams> {
        let omega1 = TAU * self.frequencies.omega1_hz;
        let omega2 = TAU * self.frequencies.omega2_hz;
        let gamma1 = match (self.ports.q1, self.ports.gamma1_hz) {
            (Some(q), None) => omega1 / q,
            (None, Some(g)) => TAU * g,
            _ => unreachable!("validated"),
        };
        let gamma2 = match (self.ports.q2, self.ports.gamma2_hz) {
            (Some(q), None) => omega2 / q,
            (None, Some(g)) => TAU * g,
            _ => unreachable!("validated"),
        };
        let edge = |c: &CouplingSpec| Complex64::from_polar(TAU * c.mag_hz, c.phase_rad);
        Ok(DiamondParams {
            omega1,
            omega2,
            g: edge(&self.couplings.g),
            h: edge(&self.couplings.h),
            f: edge(&self.couplings.f),
            k: edge(&self.couplings.k),
            gamma: TAU * self.couplings.gamma_hz,
            gamma1,
            gamma2,
        })
    }

    pub fn pump_config(&self) -> Option<PumpConfig> {
        self.pumps.map(|p| PumpConfig {
            a2bar: Complex64::new(p.a2bar[0], p.a2bar[1]),
            a4bar: Complex64::new(p.a4bar[0], p.a4bar[1]),
        })
    }

    pub fn internal_axes(&self) -> Result<Vec<SweepAxis>> {
        let sw = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::ValidationError("config has no sweep section".into()))?;
        Ok(sw.axes.iter().map(internal_axis).collect())
    }

    pub fn internal_policy(&self) -> Result<WPolicy> {
        let sw = self
            .sweep
            .as_ref()
            .ok_or_else(|| Error::ValidationError("config has no sweep section".into()))?;
        Ok(match sw.w_policy {
            WPolicySpec::FixedHz(f) => WPolicy::Fixed(TAU * f),
            WPolicySpec::TrackMax { center_hz, halfwidth_hz, points } => WPolicy::TrackMax {
                center: TAU * center_hz,
                halfwidth: TAU * halfwidth_hz,
                points,
            },
        })
    }

    pub fn problem(&self) -> Result<OptimizationProblem> {
        let opt = self.optimize.as_ref().ok_or_else(|| {
            Error::ValidationError("config has no optimize section".into())
        })?;
        let objective = match opt.objective {
            ObjectiveSpec::IntrinsicAt { w_hz } => Objective::IntrinsicAt { w: TAU * w_hz },
            ObjectiveSpec::IntrinsicMax { center_hz, halfwidth_hz, points } => {
                Objective::IntrinsicMax {
                    center: TAU * center_hz,
                    halfwidth: TAU * halfwidth_hz,
                    points,
                }
            }
            ObjectiveSpec::ExtrinsicAt { w_hz } => Objective::ExtrinsicAt { w: TAU * w_hz },
            ObjectiveSpec::IsolationAt { w_hz } => Objective::IsolationAt { w: TAU * w_hz },
        };
        let free = opt
            .free
            .iter()
            .map(|fs| {
                let scale = unit_scale(fs.param);
                let mut fp = FreeParam::new(fs.param, fs.lo * scale, fs.hi * scale);
                if let Some(s) = fs.scale {
                    fp.log = matches!(s, Scale::Log);
                }
                fp
            })
            .collect();
        Ok(OptimizationProblem {
            objective,
            free,
            base: self.params()?,
            pumps: self.pump_config().unwrap_or(PumpConfig::OFF),
        })
    }
}

fn internal_axis(spec: &AxisSpec) -> SweepAxis {
    let scale = unit_scale(spec.param);
    SweepAxis {
        param: spec.param,
        start: spec.start * scale,
        stop: spec.stop * scale,
        points: spec.points,
        scale: spec.scale,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_json() -> String {
        r#"{
            "frequencies": { "omega1_hz": 1e9, "omega2_hz": 2e9 },
            "ports": { "q1": 2000.0, "q2": 1000.0 },
            "couplings": {
                "g": { "mag_hz": 1e6, "phase_rad": 0.7853981633974483 },
                "h": { "mag_hz": 1e6, "phase_rad": 0.7853981633974483 },
                "f": { "mag_hz": 1e7, "phase_rad": 0.7853981633974483 },
                "k": { "mag_hz": 1e6, "phase_rad": 0.7853981633974483 },
                "gamma_hz": 3e5
            }
        }"#
        .to_string()
    }

    #[test]
    fn minimal_config_converts_to_rad_s() {
        let cfg = RunConfig::parse(&minimal_json()).unwrap();
        let p = cfg.params().unwrap();
        assert!((p.omega1 - TAU * 1e9).abs() < 1e-3);
        assert!((p.gamma1 - TAU * 1e9 / 2000.0).abs() < 1e-6);
        assert!((p.gamma2 - TAU * 2e9 / 1000.0).abs() < 1e-6);
        assert!((p.g.norm() - TAU * 1e6).abs() < 1e-6);
        assert_eq!(cfg.convention, SignConvention::Paper);
    }

    #[test]
    fn q_and_gamma_mutually_exclusive() {
        let text = minimal_json().replace(
            r#""ports": { "q1": 2000.0, "q2": 1000.0 }"#,
            r#""ports": { "q1": 2000.0, "gamma1_hz": 5e5, "q2": 1000.0 }"#,
        );
        assert!(matches!(
            RunConfig::parse(&text),
            Err(Error::ValidationError(_))
        ));
    }

    #[test]
    fn empty_and_malformed_inputs_are_parse_errors() {
        assert!(matches!(RunConfig::parse(""), Err(Error::ParseError(_))));
        assert!(matches!(
            RunConfig::parse("{ not json"),
            Err(Error::ParseError(_))
        ));
    }

    #[test]
    fn serialization_round_trip() {
        let mut cfg = RunConfig::parse(&minimal_json()).unwrap();
        cfg.pumps = Some(Pumps { a2bar: [2.844, 0.0], a4bar: [0.4121, 0.0] });
        cfg.sweep = Some(SweepSection {
            axes: vec![AxisSpec {
                param: SweepParam::Theta,
                start: -6.0,
                stop: 6.0,
                points: 11,
                scale: Scale::Linear,
            }],
            w_policy: WPolicySpec::FixedHz(1e9),
        });
        cfg.optimize = Some(OptimizeSection {
            objective: ObjectiveSpec::ExtrinsicAt { w_hz: 1e9 },
            free: vec![FreeSpec {
                param: SweepParam::A2barMag,
                lo: 0.0,
                hi: 10.0,
                scale: None,
            }],
            grid_points: 21,
        });
        let text = cfg.to_json();
        let back = RunConfig::parse(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn hz_axes_scale_to_rad_s() {
        let mut cfg = RunConfig::parse(&minimal_json()).unwrap();
        cfg.sweep = Some(SweepSection {
            axes: vec![AxisSpec {
                param: SweepParam::ProbeFrequency,
                start: 0.999e9,
                stop: 1.001e9,
                points: 3,
                scale: Scale::Linear,
            }],
            w_policy: WPolicySpec::FixedHz(1e9),
        });
        let axes = cfg.internal_axes().unwrap();
        assert!((axes[0].start - TAU * 0.999e9).abs() < 1e-3);
        // Dimensionless axes pass through unscaled.
        assert_eq!(unit_scale(SweepParam::Q1), 1.0);
        assert_eq!(unit_scale(SweepParam::Theta), 1.0);
    }
}
