//! Built-in reproduction presets: embedded config fragments for each
//! published data set, plus the headline checks evaluated against the
//! resulting sweep table. Presets are data, not code branches.

use serde::Serialize;

use crate::cli::config::{
    AxisSpec, Couplings, CouplingSpec, Frequencies, Ports, Pumps, RunConfig, SweepSection,
    WPolicySpec,
};
use crate::error::{Error, Result};
use crate::model::{self, DiamondParams, SignConvention};
use crate::sweep::{Scale, SweepParam, SweepResult};

const TAU: f64 = std::f64::consts::TAU;
const PHASE: f64 = std::f64::consts::FRAC_PI_4;

/// Base couplings shared by every preset: |g|=|h|=|k|=1 MHz, |f|=10 MHz,
/// all phases pi/4 (round-trip phase pi).
fn base_couplings(gamma_hz: f64) -> Couplings {
    Couplings {
        g: CouplingSpec { mag_hz: 1e6, phase_rad: PHASE },
        h: CouplingSpec { mag_hz: 1e6, phase_rad: PHASE },
        f: CouplingSpec { mag_hz: 1e7, phase_rad: PHASE },
        k: CouplingSpec { mag_hz: 1e6, phase_rad: PHASE },
        gamma_hz,
    }
}

fn config(ports: Ports, gamma_hz: f64, pumps: Option<Pumps>, sweep: SweepSection) -> RunConfig {
    RunConfig {
        frequencies: Frequencies { omega1_hz: 1e9, omega2_hz: 2e9 },
        ports,
        couplings: base_couplings(gamma_hz),
        pumps,
        convention: SignConvention::Paper,
        workers: None,
        sweep: Some(sweep),
        optimize: None,
    }
}

/// Unoptimized working point: Q1=2000, Q2=1000, gamma = 2*pi*300 kHz.
pub fn unoptimized_config() -> RunConfig {
    config(
        Ports { q1: Some(2000.0), gamma1_hz: None, q2: Some(1000.0), gamma2_hz: None },
        3e5,
        None,
        probe_sweep(5e5, 2001),
    )
}

/// Optimized working point: Q1=51.286, Q2=1e4, gamma = 2*pi*10 MHz.
pub fn optimized_config() -> RunConfig {
    config(
        Ports { q1: Some(51.286), gamma1_hz: None, q2: Some(1e4), gamma2_hz: None },
        1e7,
        None,
        probe_sweep(2e5, 2001),
    )
}

fn probe_sweep(halfwidth_hz: f64, points: usize) -> SweepSection {
    SweepSection {
        axes: vec![AxisSpec {
            param: SweepParam::ProbeFrequency,
            start: 1e9 - halfwidth_hz,
            stop: 1e9 + halfwidth_hz,
            points,
            scale: Scale::Linear,
        }],
        w_policy: WPolicySpec::FixedHz(1e9),
    }
}

/// Summary statistic evaluated on a finished sweep table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stat {
    /// Max finite non-reciprocity, dB.
    PeakRDb,
    /// Probe detuning of the non-reciprocity peak from resonance, kHz.
    PeakDetuningKhz,
    /// |coordinate| of the non-reciprocity argmax divided by pi.
    PeakAbsCoord1OverPi,
    /// Max |R(c) - R(-c)| over mirrored first-axis coordinates.
    MirrorAsymmetry,
    /// R (linear) at the grid point nearest the given coordinates.
    RLinearNearest { c1: f64, c2: f64 },
    /// First / second coordinate of the non-reciprocity argmax.
    ArgmaxRCoord1,
    ArgmaxRCoord2,
    /// Peak forward gain, dB; backward gain and isolation at that point.
    PeakFwdDb,
    BwdAtFwdPeakDb,
    IsolationAtFwdPeakDb,
    /// Half-width of the -3 dB forward-gain window around its peak, MHz.
    FwdHalfWindowMhz,
    /// Min R (dB) over records above / below resonance.
    MinRDbBlueSide,
    MinRDbRedSide,
    /// Direct model evaluation of R at resonance for the given port-1/3
    /// quality factor and parametric rate (rad/s), independent of the grid.
    RAtPoint { q1: f64, gamma: f64 },
    /// Forward minus backward gain (dB) at the record nearest resonance.
    IsolationAtResonanceDb,
}

/// One headline check: `lo <= value <= hi` (non-finite bounds are open).
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub stat: Stat,
    pub lo: f64,
    pub hi: f64,
}

impl Check {
    pub fn passes(&self, value: f64) -> bool {
        value.is_finite() && value >= self.lo && value <= self.hi
    }
}

pub struct FigurePreset {
    pub id: &'static str,
    pub config: RunConfig,
    pub checks: Vec<Check>,
}

/// Known preset identifiers in catalog order.
pub const FIGURE_IDS: [&str; 11] =
    ["2", "3", "3a", "4", "5", "6", "7", "8", "9", "10", "11"];

pub fn figure_preset(id: &str) -> Result<FigurePreset> {
    let cancel_pumps = Some(Pumps { a2bar: [2.844, 0.0], a4bar: [0.4121, 0.0] });
    let amp_pumps = Some(Pumps { a2bar: [0.0, 0.0], a4bar: [100.0, 0.0] });
    let preset = match id {
        // Non-reciprocity versus round-trip phase at the unoptimized point.
        "2" => FigurePreset {
            id: "2",
            config: {
                let mut c = unoptimized_config();
                c.sweep = Some(SweepSection {
                    axes: vec![AxisSpec {
                        param: SweepParam::Theta,
                        start: -TAU,
                        stop: TAU,
                        points: 801,
                        scale: Scale::Linear,
                    }],
                    w_policy: WPolicySpec::FixedHz(1e9),
                });
                c
            },
            checks: vec![
                Check {
                    name: "extrema at theta = +/- pi",
                    stat: Stat::PeakAbsCoord1OverPi,
                    lo: 1.0 - 0.01,
                    hi: 1.0 + 0.01,
                },
                Check {
                    name: "R(theta) = R(-theta)",
                    stat: Stat::MirrorAsymmetry,
                    lo: 0.0,
                    hi: 1e-9,
                },
            ],
        },
        // Unoptimized spectrum across resonance.
        "3" => FigurePreset {
            id: "3",
            config: unoptimized_config(),
            checks: vec![Check {
                name: "unoptimized peak in 1e-5..2e-4 dB",
                stat: Stat::PeakRDb,
                lo: 1e-5,
                hi: 2e-4,
            }],
        },
        // Unoptimized non-reciprocity versus parametric rate.
        "3a" => FigurePreset {
            id: "3a",
            config: {
                let mut c = unoptimized_config();
                c.sweep = Some(SweepSection {
                    axes: vec![AxisSpec {
                        param: SweepParam::Gamma,
                        start: 1e4,
                        stop: 1e9,
                        points: 601,
                        scale: Scale::Log,
                    }],
                    w_policy: WPolicySpec::FixedHz(1e9),
                });
                c
            },
            checks: vec![],
        },
        // Contour of R at resonance over (Q1, gamma).
        "4" => FigurePreset {
            id: "4",
            config: {
                let mut c = optimized_config();
                c.sweep = Some(SweepSection {
                    axes: vec![
                        AxisSpec {
                            param: SweepParam::Q1,
                            start: 10.0,
                            stop: 1e4,
                            points: 61,
                            scale: Scale::Log,
                        },
                        AxisSpec {
                            param: SweepParam::Gamma,
                            start: 1e5,
                            stop: 1e8,
                            points: 61,
                            scale: Scale::Log,
                        },
                    ],
                    w_policy: WPolicySpec::FixedHz(1e9),
                });
                c
            },
            checks: vec![
                Check {
                    name: "R = 3.652 +/- 5% at (Q1=51.286, gamma=2pi*10MHz)",
                    stat: Stat::RAtPoint { q1: 51.286, gamma: TAU * 1e7 },
                    lo: 3.652 * 0.95,
                    hi: 3.652 * 1.05,
                },
                // The quoted point is claimed to be the in-box optimum;
                // allow one log-grid cell (factor 10^0.05) of slack.
                Check {
                    name: "grid argmax Q1 within one cell of 51.286",
                    stat: Stat::ArgmaxRCoord1,
                    lo: 51.286 / 1.122,
                    hi: 51.286 * 1.122,
                },
                Check {
                    name: "grid argmax gamma within one cell of 2pi*10MHz",
                    stat: Stat::ArgmaxRCoord2,
                    lo: TAU * 1e7 / 1.122,
                    hi: TAU * 1e7 * 1.122,
                },
            ],
        },
        // Optimized spectrum across resonance.
        "5" => FigurePreset {
            id: "5",
            config: optimized_config(),
            checks: vec![
                Check {
                    name: "peak R = 12.39 dB +/- 0.5 dB",
                    stat: Stat::PeakRDb,
                    lo: 12.39 - 0.5,
                    hi: 12.39 + 0.5,
                },
                Check {
                    name: "peak detuning = +53 kHz +/- 10 kHz",
                    stat: Stat::PeakDetuningKhz,
                    lo: 43.0,
                    hi: 63.0,
                },
            ],
        },
        // Optimized intrinsic forward/backward gains.
        "6" => FigurePreset {
            id: "6",
            config: {
                let mut c = optimized_config();
                c.sweep = Some(probe_sweep(2e6, 1001));
                c
            },
            checks: vec![],
        },
        // Pump-amplitude grid for maximal extrinsic non-reciprocity.
        "7" => FigurePreset {
            id: "7",
            config: {
                let mut c = optimized_config();
                c.pumps = Some(Pumps { a2bar: [0.0, 0.0], a4bar: [0.0, 0.0] });
                c.sweep = Some(SweepSection {
                    axes: vec![
                        AxisSpec {
                            param: SweepParam::A2barMag,
                            start: 0.0,
                            stop: 10.0,
                            points: 401,
                            scale: Scale::Linear,
                        },
                        AxisSpec {
                            param: SweepParam::A4barMag,
                            start: 0.0,
                            stop: 10.0,
                            points: 401,
                            scale: Scale::Linear,
                        },
                    ],
                    w_policy: WPolicySpec::FixedHz(1e9),
                });
                c
            },
            checks: vec![
                Check {
                    name: "optimal pump 2 amplitude within 5% of 2.844",
                    stat: Stat::ArgmaxRCoord1,
                    lo: 2.844 * 0.95,
                    hi: 2.844 * 1.05,
                },
                Check {
                    name: "optimal pump 4 amplitude within 5% of 0.4121",
                    stat: Stat::ArgmaxRCoord2,
                    lo: 0.4121 * 0.95,
                    hi: 0.4121 * 1.05,
                },
            ],
        },
        // Extrinsic non-reciprocity spectrum at the optimal pumps.
        "8" => FigurePreset {
            id: "8",
            config: {
                let mut c = optimized_config();
                c.pumps = cancel_pumps;
                c.sweep = Some(probe_sweep(5e3, 2001));
                c
            },
            checks: vec![Check {
                name: "peak extrinsic R >= 130 dB",
                stat: Stat::PeakRDb,
                lo: 130.0,
                hi: f64::INFINITY,
            }],
        },
        // Extrinsic gains at the optimal pumps: reverse gain suppressed.
        "9" => FigurePreset {
            id: "9",
            config: {
                let mut c = optimized_config();
                c.pumps = cancel_pumps;
                c.sweep = Some(probe_sweep(2e6, 1001));
                c
            },
            checks: vec![Check {
                name: "reverse gain suppressed at resonance (isolation >= 20 dB)",
                stat: Stat::IsolationAtResonanceDb,
                lo: 20.0,
                hi: f64::INFINITY,
            }],
        },
        // Directional-amplifier gain spectra at strong single-pump drive.
        "10" => FigurePreset {
            id: "10",
            config: {
                let mut c = optimized_config();
                c.pumps = amp_pumps;
                c.sweep = Some(probe_sweep(5e6, 2001));
                c
            },
            checks: vec![
                Check {
                    name: "peak forward gain = +20 dB +/- 2 dB",
                    stat: Stat::PeakFwdDb,
                    lo: 18.0,
                    hi: 22.0,
                },
                Check {
                    name: "backward gain = -20 dB +/- 2 dB at the forward peak",
                    stat: Stat::BwdAtFwdPeakDb,
                    lo: -22.0,
                    hi: -18.0,
                },
                Check {
                    name: "isolation = 40 dB +/- 3 dB at the forward peak",
                    stat: Stat::IsolationAtFwdPeakDb,
                    lo: 37.0,
                    hi: 43.0,
                },
                Check {
                    name: "-3 dB forward window = +/- 1 MHz +/- 30%",
                    stat: Stat::FwdHalfWindowMhz,
                    lo: 0.7,
                    hi: 1.3,
                },
            ],
        },
        // Wide-band extrinsic non-reciprocity at strong single-pump drive.
        "11" => FigurePreset {
            id: "11",
            config: {
                let mut c = optimized_config();
                c.pumps = amp_pumps;
                c.sweep = Some(probe_sweep(5e7, 2001));
                c
            },
            checks: vec![
                Check {
                    name: "blue-side non-reciprocity >= 30 dB",
                    stat: Stat::MinRDbBlueSide,
                    lo: 30.0,
                    hi: f64::INFINITY,
                },
                Check {
                    name: "red-side non-reciprocity >= 32.6 dB",
                    stat: Stat::MinRDbRedSide,
                    lo: 33.6 - 1.0,
                    hi: f64::INFINITY,
                },
            ],
        },
        other => return Err(Error::UnknownFigure(other.to_string())),
    };
    Ok(preset)
}

/// Evaluates a summary statistic on a sweep table. `params` supplies the
/// resonance used for detuning-relative statistics and the base point for
/// the direct-evaluation statistics.
pub fn compute_stat(stat: Stat, result: &SweepResult, params: &DiamondParams) -> f64 {
    let omega1 = params.omega1;
    let peak_r = result.argmax_r();
    let peak_fwd = result.argmax_fwd();
    match stat {
        Stat::PeakRDb => peak_r.map_or(f64::NAN, |(_, r)| model::db(r.r_linear)),
        Stat::PeakDetuningKhz => {
            peak_r.map_or(f64::NAN, |(_, r)| (r.probe - omega1) / (TAU * 1e3))
        }
        Stat::PeakAbsCoord1OverPi => {
            peak_r.map_or(f64::NAN, |(_, r)| r.coords[0].abs() / std::f64::consts::PI)
        }
        Stat::MirrorAsymmetry => {
            // Pair each record with the record whose first coordinate is
            // closest to the negated value; requires a symmetric axis.
            let mut worst: f64 = 0.0;
            for rec in &result.records {
                if !rec.r_linear.is_finite() {
                    continue;
                }
                let target = -rec.coords[0];
                if let Some(mate) = result
                    .records
                    .iter()
                    .filter(|m| m.r_linear.is_finite())
                    .min_by(|a, b| {
                        (a.coords[0] - target)
                            .abs()
                            .total_cmp(&(b.coords[0] - target).abs())
                    })
                {
                    worst = worst.max((rec.r_linear - mate.r_linear).abs());
                }
            }
            worst
        }
        Stat::RLinearNearest { c1, c2 } => result
            .records
            .iter()
            .filter(|r| r.r_linear.is_finite())
            .min_by(|a, b| {
                let da = dist2(a.coords, c1, c2);
                let db = dist2(b.coords, c1, c2);
                da.total_cmp(&db)
            })
            .map_or(f64::NAN, |r| r.r_linear),
        Stat::ArgmaxRCoord1 => peak_r.map_or(f64::NAN, |(_, r)| r.coords[0]),
        Stat::ArgmaxRCoord2 => peak_r.map_or(f64::NAN, |(_, r)| r.coords[1]),
        Stat::PeakFwdDb => peak_fwd.map_or(f64::NAN, |(_, r)| model::db(r.fwd_gain)),
        Stat::BwdAtFwdPeakDb => peak_fwd.map_or(f64::NAN, |(_, r)| model::db(r.bwd_gain)),
        Stat::IsolationAtFwdPeakDb => peak_fwd.map_or(f64::NAN, |(_, r)| {
            model::db(r.fwd_gain) - model::db(r.bwd_gain)
        }),
        Stat::FwdHalfWindowMhz => {
            let Some((peak_idx, peak)) = peak_fwd else {
                return f64::NAN;
            };
            let threshold = peak.fwd_gain / 10f64.powf(0.3);
            let records = &result.records;
            let mut right = f64::NAN;
            for r in records.iter().skip(peak_idx + 1) {
                if !(r.fwd_gain >= threshold) {
                    right = (r.probe - peak.probe).abs();
                    break;
                }
            }
            let mut left = f64::NAN;
            for r in records.iter().take(peak_idx).rev() {
                if !(r.fwd_gain >= threshold) {
                    left = (r.probe - peak.probe).abs();
                    break;
                }
            }
            // Report the wider side; NaN when the window never closes
            // inside the swept span.
            left.max(right) / (TAU * 1e6)
        }
        Stat::MinRDbBlueSide => min_r_db_side(result, omega1, true),
        Stat::MinRDbRedSide => min_r_db_side(result, omega1, false),
        Stat::RAtPoint { q1, gamma } => {
            let mut p = *params;
            p.gamma1 = p.omega1 / q1;
            p.gamma = gamma;
            let value = model::build_diamond_matrix(&p).and_then(|m| {
                let s = model::scattering(&m, &p.linewidths(), p.omega1, SignConvention::Paper)?;
                model::intrinsic_nonreciprocity(&s)
            });
            value.unwrap_or(f64::NAN)
        }
        Stat::IsolationAtResonanceDb => result
            .records
            .iter()
            .filter(|r| r.fwd_gain.is_finite() && r.bwd_gain > 0.0)
            .min_by(|a, b| {
                (a.probe - omega1)
                    .abs()
                    .total_cmp(&(b.probe - omega1).abs())
            })
            .map_or(f64::NAN, |r| model::db(r.fwd_gain) - model::db(r.bwd_gain)),
    }
}

fn dist2(coords: [f64; 2], c1: f64, c2: f64) -> f64 {
    // Compare log-scaled to be meaningful across decades.
    let d1 = (coords[0].abs().max(1e-300).ln() - c1.abs().max(1e-300).ln()).abs();
    let d2 = if coords[1].is_nan() {
        0.0
    } else {
        (coords[1].abs().max(1e-300).ln() - c2.abs().max(1e-300).ln()).abs()
    };
    d1 * d1 + d2 * d2
}

fn min_r_db_side(result: &SweepResult, omega1: f64, blue: bool) -> f64 {
    result
        .records
        .iter()
        .filter(|r| r.r_linear.is_finite())
        .filter(|r| if blue { r.probe > omega1 } else { r.probe < omega1 })
        .map(|r| model::db(r.r_linear))
        .fold(f64::NAN, |acc, v| if acc.is_nan() || v < acc { v } else { acc })
}
