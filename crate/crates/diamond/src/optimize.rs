//! Derivative-free maximization of non-reciprocity (or gain targets) over
//! selected parameter subsets: deterministic grid seeding for the
//! multimodal landscape, then Nelder-Mead simplex refinement.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    self, DiamondParams, ProbeBasis, PumpConfig, SignConvention,
};
use crate::sweep::{apply_param, SweepParam};

/// Relative simplex diameter below which refinement stops.
pub const SIMPLEX_TOL: f64 = 1e-6;
/// Evaluation budget for one refinement.
pub const MAX_EVALS: usize = 2000;

/// Quantity being maximized.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// Intrinsic non-reciprocity at a fixed probe frequency (rad/s).
    IntrinsicAt { w: f64 },
    /// Maximum intrinsic non-reciprocity over a probe window.
    IntrinsicMax {
        center: f64,
        halfwidth: f64,
        points: usize,
    },
    /// Pump-dressed non-reciprocity at a fixed probe frequency.
    ExtrinsicAt { w: f64 },
    /// Forward minus backward gain in dB at a fixed probe frequency.
    IsolationAt { w: f64 },
}

/// One free parameter with box bounds. `log` searches the axis in log
/// space (the default for rate- and Q-like parameters, whose optima can sit
/// orders of magnitude from the start).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeParam {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub log: bool,
}

impl FreeParam {
    pub fn new(param: SweepParam, lo: f64, hi: f64) -> Self {
        Self {
            param,
            lo,
            hi,
            log: param.prefers_log(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizationProblem {
    pub objective: Objective,
    pub free: Vec<FreeParam>,
    pub base: DiamondParams,
    pub pumps: PumpConfig,
}

impl OptimizationProblem {
    pub fn validate(&self) -> Result<()> {
        self.base.validate()?;
        if self.free.is_empty() {
            return Err(Error::InvalidParams(
                "optimization needs at least one free parameter".into(),
            ));
        }
        for fp in &self.free {
            if !(fp.lo < fp.hi) || !fp.lo.is_finite() || !fp.hi.is_finite() {
                return Err(Error::InvalidParams(format!(
                    "bounds [{}, {}] invalid for {:?}",
                    fp.lo, fp.hi, fp.param
                )));
            }
            if fp.log && fp.lo <= 0.0 {
                return Err(Error::InvalidParams(format!(
                    "log-space search needs positive bounds for {:?}",
                    fp.param
                )));
            }
        }
        Ok(())
    }

    /// Maps unit-box coordinates to parameter values.
    fn decode(&self, u: &[f64]) -> Vec<f64> {
        self.free
            .iter()
            .zip(u)
            .map(|(fp, &ui)| {
                let ui = ui.clamp(0.0, 1.0);
                // Exact at the box corners so grid seeds hit the stated
                // bounds bitwise.
                if ui == 0.0 {
                    fp.lo
                } else if ui == 1.0 {
                    fp.hi
                } else if fp.log {
                    (fp.lo.ln() + ui * (fp.hi.ln() - fp.lo.ln())).exp()
                } else {
                    fp.lo + ui * (fp.hi - fp.lo)
                }
            })
            .collect()
    }

    fn encode(&self, x: &[f64]) -> Vec<f64> {
        self.free
            .iter()
            .zip(x)
            .map(|(fp, &xi)| {
                if fp.log {
                    (xi.ln() - fp.lo.ln()) / (fp.hi.ln() - fp.lo.ln())
                } else {
                    (xi - fp.lo) / (fp.hi - fp.lo)
                }
            })
            .collect()
    }

    /// Objective value at a parameter point; degenerate or singular
    /// evaluations score negative infinity and never enter the simplex.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.evaluate_checked(x).unwrap_or(f64::NEG_INFINITY)
    }

    fn evaluate_checked(&self, x: &[f64]) -> Result<f64> {
        let mut p = self.base;
        let mut pumps = self.pumps;
        let mut probe = 0.0;
        for (fp, &xi) in self.free.iter().zip(x) {
            apply_param(fp.param, xi, &mut p, &mut pumps, &mut probe);
        }
        let eval_at = |w: f64| -> Result<f64> {
            let m = model::build_diamond_matrix(&p)?;
            let s = model::scattering_in_basis(
                &m,
                &p.linewidths(),
                w,
                SignConvention::Paper,
                ProbeBasis::Conjugate,
            )?;
            match self.objective {
                Objective::IntrinsicAt { .. } | Objective::IntrinsicMax { .. } => {
                    model::intrinsic_nonreciprocity(&s)
                }
                Objective::ExtrinsicAt { .. } => {
                    model::extrinsic_nonreciprocity(&s, &pumps)
                }
                Objective::IsolationAt { .. } => {
                    let (fwd, bwd) = model::directional_gains(&s, &pumps);
                    if fwd <= 0.0 || bwd <= 0.0 {
                        return Err(Error::DegenerateTransmission(
                            "vanishing gain".into(),
                        ));
                    }
                    Ok(model::db(fwd) - model::db(bwd))
                }
            }
        };
        match self.objective {
            Objective::IntrinsicAt { w }
            | Objective::ExtrinsicAt { w }
            | Objective::IsolationAt { w } => eval_at(w),
            Objective::IntrinsicMax { center, halfwidth, points } => {
                let points = points.max(1);
                let mut best = f64::NEG_INFINITY;
                for j in 0..points {
                    let frac = if points == 1 {
                        0.5
                    } else {
                        j as f64 / (points - 1) as f64
                    };
                    let w = center - halfwidth + frac * 2.0 * halfwidth;
                    if let Ok(v) = eval_at(w) {
                        best = best.max(v);
                    }
                }
                if best.is_finite() {
                    Ok(best)
                } else {
                    Err(Error::DegenerateTransmission(
                        "window entirely degenerate".into(),
                    ))
                }
            }
        }
    }
}

/// Full-grid search over the box; deterministic with a lexicographic
/// first-wins tie-break. At most 3 axes.
pub fn grid_seed(problem: &OptimizationProblem, points_per_axis: usize) -> Result<Vec<f64>> {
    problem.validate()?;
    let d = problem.free.len();
    if d > 3 {
        return Err(Error::InvalidParams(format!(
            "grid seeding supports at most 3 free parameters, got {d}"
        )));
    }
    let points_per_axis = points_per_axis.max(1);
    let mut best_u: Option<Vec<f64>> = None;
    let mut best_val = f64::NEG_INFINITY;
    let total = points_per_axis.pow(d as u32);
    for flat in 0..total {
        let mut rem = flat;
        let mut u = vec![0.0; d];
        // Last axis varies fastest: lexicographic order over (axis0, axis1, ...).
        for slot in (0..d).rev() {
            let i = rem % points_per_axis;
            rem /= points_per_axis;
            u[slot] = if points_per_axis == 1 {
                0.0
            } else {
                i as f64 / (points_per_axis - 1) as f64
            };
        }
        let val = problem.evaluate(&problem.decode(&u));
        if val > best_val || best_u.is_none() {
            best_val = val;
            best_u = Some(u);
        }
    }
    Ok(problem.decode(&best_u.expect("grid has at least one point")))
}

/// Box-constrained Nelder-Mead refinement from a seed point.
///
/// Standard coefficients (reflection 1, expansion 2, contraction 0.5,
/// shrink 0.5), initial simplex steps of 5% of the box width, projection
/// onto the box, termination on simplex diameter < `SIMPLEX_TOL` (relative
/// to the box) or `MAX_EVALS` evaluations. Returns the seed if no
/// improvement is found.
pub fn refine(problem: &OptimizationProblem, seed: &[f64]) -> Result<(Vec<f64>, f64)> {
    problem.validate()?;
    let d = problem.free.len();
    if seed.len() != d {
        return Err(Error::InvalidParams(format!(
            "seed has {} coordinates, problem has {d}",
            seed.len()
        )));
    }
    for (fp, &s) in problem.free.iter().zip(seed) {
        if s < fp.lo || s > fp.hi {
            return Err(Error::InvalidParams(format!(
                "seed value {s} outside bounds [{}, {}]",
                fp.lo, fp.hi
            )));
        }
    }

    let seed_u = problem.encode(seed);
    let (best_u, best_val, seed_val) =
        nelder_mead(|u| problem.evaluate(&problem.decode(u)), &seed_u);
    if best_val >= seed_val {
        Ok((problem.decode(&best_u), best_val))
    } else {
        Ok((seed.to_vec(), seed_val))
    }
}

/// Nelder-Mead maximization on the unit box. Returns the best vertex, its
/// value, and the seed's value.
fn nelder_mead<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    seed_u: &[f64],
) -> (Vec<f64>, f64, f64) {
    let d = seed_u.len();
    let evals = std::cell::Cell::new(0usize);
    let mut eval_u = |u: &[f64]| -> f64 {
        evals.set(evals.get() + 1);
        f(u)
    };

    let seed_val = eval_u(seed_u);

    // Initial simplex: seed plus a 5% step on each axis (reflected inward
    // at the boundary).
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(d + 1);
    simplex.push((seed_u.to_vec(), seed_val));
    for axis in 0..d {
        let mut u = seed_u.to_vec();
        let step = if u[axis] + 0.05 <= 1.0 { 0.05 } else { -0.05 };
        u[axis] = (u[axis] + step).clamp(0.0, 1.0);
        let v = eval_u(&u);
        simplex.push((u, v));
    }

    let project = |u: &mut Vec<f64>| {
        for ui in u.iter_mut() {
            *ui = ui.clamp(0.0, 1.0);
        }
    };

    while evals.get() < MAX_EVALS {
        // Best first; stable tie-break keeps the trajectory deterministic.
        simplex.sort_by(|a, b| b.1.total_cmp(&a.1));

        let diameter = simplex
            .iter()
            .flat_map(|(u, _)| {
                simplex.iter().map(move |(v, _)| {
                    u.iter()
                        .zip(v)
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0, f64::max)
                })
            })
            .fold(0.0, f64::max);
        if diameter < SIMPLEX_TOL {
            break;
        }

        let worst = simplex[d].clone();
        let second_worst_val = simplex[d - 1].1;
        let best_val = simplex[0].1;
        let centroid: Vec<f64> = (0..d)
            .map(|i| simplex[..d].iter().map(|(u, _)| u[i]).sum::<f64>() / d as f64)
            .collect();

        let blend = |alpha: f64| -> Vec<f64> {
            let mut u: Vec<f64> = centroid
                .iter()
                .zip(&worst.0)
                .map(|(c, w)| c + alpha * (c - w))
                .collect();
            project(&mut u);
            u
        };

        let reflected = blend(1.0);
        let reflected_val = eval_u(&reflected);
        if reflected_val > best_val {
            let expanded = blend(2.0);
            let expanded_val = eval_u(&expanded);
            simplex[d] = if expanded_val > reflected_val {
                (expanded, expanded_val)
            } else {
                (reflected, reflected_val)
            };
        } else if reflected_val > second_worst_val {
            simplex[d] = (reflected, reflected_val);
        } else {
            let contracted = if reflected_val > worst.1 {
                blend(0.5)
            } else {
                blend(-0.5)
            };
            let contracted_val = eval_u(&contracted);
            if contracted_val > worst.1.max(reflected_val) {
                simplex[d] = (contracted, contracted_val);
            } else {
                // Shrink toward the best vertex.
                let anchor = simplex[0].0.clone();
                for vertex in simplex.iter_mut().skip(1) {
                    for (ui, ai) in vertex.0.iter_mut().zip(&anchor) {
                        *ui = ai + 0.5 * (*ui - ai);
                    }
                    vertex.1 = eval_u(&vertex.0);
                    if evals.get() >= MAX_EVALS {
                        break;
                    }
                }
            }
        }
    }

    simplex.sort_by(|a, b| b.1.total_cmp(&a.1));
    let (best_u, best_val) = simplex.swap_remove(0);
    (best_u, best_val, seed_val)
}
