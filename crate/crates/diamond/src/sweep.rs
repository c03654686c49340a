//! Structured 1D/2D parameter and frequency sweeps producing tabular
//! results for figure-style scans.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, DiamondParams, ProbeBasis, PumpConfig, ScatteringResult, SignConvention,
};

/// Parameter varied along a sweep axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepParam {
    /// Probe frequency (rad/s).
    ProbeFrequency,
    /// Round-trip phase, distributed equally over the four hopping edges.
    Theta,
    /// Parametric rate (rad/s).
    Gamma,
    /// Quality factor of ports 1 and 3.
    Q1,
    /// Quality factor of ports 2 and 4.
    Q2,
    /// Magnitude of the real pump into port 2.
    A2barMag,
    /// Magnitude of the real pump into port 4.
    A4barMag,
    GMag,
    GPhase,
    HMag,
    HPhase,
    FMag,
    FPhase,
    KMag,
    KPhase,
}

impl SweepParam {
    /// Whether the default optimizer search treats this axis in log space.
    pub fn prefers_log(&self) -> bool {
        matches!(
            self,
            SweepParam::Gamma
                | SweepParam::Q1
                | SweepParam::Q2
                | SweepParam::GMag
                | SweepParam::HMag
                | SweepParam::FMag
                | SweepParam::KMag
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    Linear,
    Log,
}

/// One sweep axis: `points` samples of `param` from `start` to `stop`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepAxis {
    pub param: SweepParam,
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    pub scale: Scale,
}

impl SweepAxis {
    pub fn validate(&self) -> Result<()> {
        if self.points == 0 {
            return Err(Error::InvalidParams("axis needs at least one point".into()));
        }
        if self.points > 1 && !(self.start < self.stop) {
            return Err(Error::InvalidParams(format!(
                "axis start {} must be below stop {}",
                self.start, self.stop
            )));
        }
        if matches!(self.scale, Scale::Log) && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(Error::InvalidParams(
                "log-scaled axes need positive endpoints".into(),
            ));
        }
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidParams("axis endpoints must be finite".into()));
        }
        Ok(())
    }

    /// Axis coordinate of sample `i`.
    pub fn value(&self, i: usize) -> f64 {
        if self.points == 1 {
            return self.start;
        }
        let frac = i as f64 / (self.points - 1) as f64;
        match self.scale {
            Scale::Linear => self.start + frac * (self.stop - self.start),
            Scale::Log => {
                (self.start.ln() + frac * (self.stop.ln() - self.start.ln())).exp()
            }
        }
    }
}

/// Probe-frequency policy for records that do not sweep the probe
/// themselves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WPolicy {
    /// Evaluate every record at this fixed probe frequency (rad/s).
    Fixed(f64),
    /// Evaluate on a window around `center` and keep the record at the
    /// frequency maximizing the non-reciprocity metric.
    TrackMax {
        center: f64,
        halfwidth: f64,
        points: usize,
    },
}

/// One evaluated grid point. Degenerate evaluations carry NaN metrics plus
/// the `degenerate` flag rather than aborting the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    /// Axis coordinates (second entry NaN for 1D sweeps).
    pub coords: [f64; 2],
    /// Probe frequency the record was evaluated at (rad/s).
    pub probe: f64,
    /// Non-reciprocity measure: intrinsic without pumps, pump-dressed with.
    pub r_linear: f64,
    /// Forward and backward power gains (linear).
    pub fwd_gain: f64,
    pub bwd_gain: f64,
    /// Bare transmission magnitudes |S31|^2 and |S13|^2.
    pub s31_sq: f64,
    pub s13_sq: f64,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axes: Vec<SweepAxis>,
    pub records: Vec<SweepRecord>,
}

impl SweepResult {
    /// Index and record of the maximal finite `r_linear`.
    pub fn argmax_r(&self) -> Option<(usize, &SweepRecord)> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.r_linear.is_finite())
            .max_by(|a, b| a.1.r_linear.total_cmp(&b.1.r_linear))
    }

    /// Index and record of the maximal finite forward gain.
    pub fn argmax_fwd(&self) -> Option<(usize, &SweepRecord)> {
        self.records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.fwd_gain.is_finite())
            .max_by(|a, b| a.1.fwd_gain.total_cmp(&b.1.fwd_gain))
    }
}

/// Applies one swept value onto a parameter set / pump pair.
pub fn apply_param(
    param: SweepParam,
    value: f64,
    p: &mut DiamondParams,
    pumps: &mut PumpConfig,
    probe: &mut f64,
) {
    use num_complex::Complex64;
    match param {
        SweepParam::ProbeFrequency => *probe = value,
        SweepParam::Theta => *p = p.with_theta(value),
        SweepParam::Gamma => p.gamma = value,
        SweepParam::Q1 => p.gamma1 = p.omega1 / value,
        SweepParam::Q2 => p.gamma2 = p.omega2 / value,
        SweepParam::A2barMag => pumps.a2bar = Complex64::new(value, 0.0),
        SweepParam::A4barMag => pumps.a4bar = Complex64::new(value, 0.0),
        SweepParam::GMag => p.g = Complex64::from_polar(value, p.g.arg()),
        SweepParam::GPhase => p.g = Complex64::from_polar(p.g.norm(), value),
        SweepParam::HMag => p.h = Complex64::from_polar(value, p.h.arg()),
        SweepParam::HPhase => p.h = Complex64::from_polar(p.h.norm(), value),
        SweepParam::FMag => p.f = Complex64::from_polar(value, p.f.arg()),
        SweepParam::FPhase => p.f = Complex64::from_polar(p.f.norm(), value),
        SweepParam::KMag => p.k = Complex64::from_polar(value, p.k.arg()),
        SweepParam::KPhase => p.k = Complex64::from_polar(p.k.norm(), value),
    }
}

fn evaluate_at(
    p: &DiamondParams,
    pumps: Option<&PumpConfig>,
    w: f64,
    coords: [f64; 2],
) -> Result<SweepRecord> {
    let m = model::build_diamond_matrix(p)?;
    let s: ScatteringResult = model::scattering_in_basis(
        &m,
        &p.linewidths(),
        w,
        SignConvention::Paper,
        ProbeBasis::Conjugate,
    )?;
    let pump_cfg = pumps.copied().unwrap_or(PumpConfig::OFF);
    let (fwd, bwd) = model::directional_gains(&s, &pump_cfg);
    let s31_sq = s.s[(2, 0)].norm_sqr();
    let s13_sq = s.s[(0, 2)].norm_sqr();
    let r = match pumps {
        Some(pc) => model::extrinsic_nonreciprocity(&s, pc),
        None => model::intrinsic_nonreciprocity(&s),
    };
    Ok(match r {
        Ok(r) => SweepRecord {
            coords,
            probe: w,
            r_linear: r,
            fwd_gain: fwd,
            bwd_gain: bwd,
            s31_sq,
            s13_sq,
            degenerate: false,
        },
        Err(Error::DegenerateTransmission(_)) => SweepRecord {
            coords,
            probe: w,
            r_linear: f64::NAN,
            fwd_gain: fwd,
            bwd_gain: bwd,
            s31_sq,
            s13_sq,
            degenerate: true,
        },
        Err(e) => return Err(e),
    })
}

fn evaluate_record(
    base: &DiamondParams,
    base_pumps: Option<&PumpConfig>,
    axes: &[SweepAxis],
    idx: &[usize],
    w_policy: &WPolicy,
) -> Result<SweepRecord> {
    let mut p = *base;
    let mut pumps = base_pumps.copied().unwrap_or(PumpConfig::OFF);
    let mut probe = match w_policy {
        WPolicy::Fixed(w) => *w,
        WPolicy::TrackMax { center, .. } => *center,
    };
    let mut coords = [f64::NAN; 2];
    let mut probe_swept = false;
    for (ax_i, (axis, &i)) in axes.iter().zip(idx).enumerate() {
        let value = axis.value(i);
        coords[ax_i] = value;
        probe_swept |= axis.param == SweepParam::ProbeFrequency;
        apply_param(axis.param, value, &mut p, &mut pumps, &mut probe);
    }
    let pump_ref = if base_pumps.is_some()
        || axes
            .iter()
            .any(|a| matches!(a.param, SweepParam::A2barMag | SweepParam::A4barMag))
    {
        Some(&pumps)
    } else {
        None
    };

    match (w_policy, probe_swept) {
        (WPolicy::TrackMax { center, halfwidth, points }, false) => {
            // Scan the window and keep the best record; ties resolve to the
            // lowest frequency for determinism.
            let mut best: Option<SweepRecord> = None;
            for j in 0..(*points).max(1) {
                let frac = if *points <= 1 {
                    0.5
                } else {
                    j as f64 / (*points - 1) as f64
                };
                let w = center - halfwidth + frac * 2.0 * halfwidth;
                let rec = evaluate_at(&p, pump_ref, w, coords)?;
                let better = match &best {
                    None => true,
                    Some(b) => {
                        rec.r_linear.is_finite()
                            && (!b.r_linear.is_finite() || rec.r_linear > b.r_linear)
                    }
                };
                if better {
                    best = Some(rec);
                }
            }
            Ok(best.expect("window has at least one point"))
        }
        _ => evaluate_at(&p, pump_ref, probe, coords),
    }
}

fn index_tuples(axes: &[SweepAxis]) -> Vec<Vec<usize>> {
    match axes.len() {
        1 => (0..axes[0].points).map(|i| vec![i]).collect(),
        2 => {
            let mut v = Vec::with_capacity(axes[0].points * axes[1].points);
            for i in 0..axes[0].points {
                for j in 0..axes[1].points {
                    v.push(vec![i, j]);
                }
            }
            v
        }
        _ => unreachable!("validated earlier"),
    }
}

fn validate_sweep(base: &DiamondParams, axes: &[SweepAxis]) -> Result<()> {
    base.validate()?;
    if axes.is_empty() || axes.len() > 2 {
        return Err(Error::InvalidParams(format!(
            "sweeps take 1 or 2 axes, got {}",
            axes.len()
        )));
    }
    for axis in axes {
        axis.validate()?;
    }
    Ok(())
}

/// Serial grid evaluation in lexicographic axis order.
pub fn run_sweep(
    base: &DiamondParams,
    pumps: Option<&PumpConfig>,
    axes: &[SweepAxis],
    w_policy: &WPolicy,
) -> Result<SweepResult> {
    validate_sweep(base, axes)?;
    let records = index_tuples(axes)
        .iter()
        .map(|idx| evaluate_record(base, pumps, axes, idx, w_policy))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axes: axes.to_vec(),
        records,
    })
}

/// Parallel grid evaluation; output is identical to [`run_sweep`]
/// regardless of worker count (records are assembled in grid order).
pub fn run_sweep_parallel(
    base: &DiamondParams,
    pumps: Option<&PumpConfig>,
    axes: &[SweepAxis],
    w_policy: &WPolicy,
    workers: Option<usize>,
) -> Result<SweepResult> {
    validate_sweep(base, axes)?;
    let tuples = index_tuples(axes);
    let eval = || -> Result<Vec<SweepRecord>> {
        tuples
            .par_iter()
            .map(|idx| evaluate_record(base, pumps, axes, idx, w_policy))
            .collect()
    };
    let records = match workers {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::InvalidParams(format!("worker pool: {e}")))?
            .install(eval),
        None => eval(),
    }?;
    Ok(SweepResult {
        axes: axes.to_vec(),
        records,
    })
}
