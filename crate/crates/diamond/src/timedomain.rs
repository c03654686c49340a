//! Independent time-domain oracle.
//!
//! Integrates the classical-amplitude equations of motion
//! `da/dt = M a - sqrt(G) a_in(t)` with monochromatic port drives using
//! fixed-step RK4, then extracts the steady-state phasors by demodulating
//! the tail of the run over an integer number of drive periods. Together
//! with the input-output relation `a_out = a_in + sqrt(G) a` this measures
//! scattering columns without touching the matrix-inversion path, giving an
//! end-to-end cross-check of the frequency-domain solve (in
//! [`crate::model::ProbeBasis::Uniform`], the Fourier transform of exactly
//! this ODE).

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, ComplexVector};

/// Divergence threshold: any state magnitude beyond this aborts the run.
pub const INSTABILITY_LIMIT: f64 = 1e12;

/// Stability bound: `dt * max_row_sum(M)` must stay below this.
pub const STABILITY_FRACTION: f64 = 0.1;

/// Default accuracy fraction used by [`recommended_dt`]; well inside the
/// stability bound so that resonantly amplified truncation error stays
/// orders of magnitude below the 1e-6 oracle tolerance.
pub const DT_FRACTION: f64 = 0.015;

/// One monochromatic drive: amplitude `A` injected into `port` produces
/// input entries `A e^{-iwt}` on the annihilation component and
/// `A* e^{+iwt}` on the matching creation component.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Drive {
    pub port: usize,
    pub amplitude: Complex64,
    pub frequency: f64,
}

/// Result of an integration run.
#[derive(Debug, Clone)]
pub struct SteadyState {
    /// Raw state vector at `t_end`.
    pub final_state: ComplexVector,
    /// Phasors of the `e^{-iwt}` component of every entry, obtained by
    /// demodulating with `e^{+iwt}` and averaging over whole drive periods
    /// at the tail of the run. Equals the final state when there are no
    /// drives.
    pub demodulated: ComplexVector,
}

/// Conservative default step: keeps the local truncation error of the
/// carrier far below the steady-state error budget.
pub fn recommended_dt(m: &ComplexMatrix) -> f64 {
    DT_FRACTION / m.max_row_sum()
}

/// Default integration span: long enough for every transient (including
/// port-resonant slow modes) to decay below the oracle tolerance.
pub fn recommended_t_end(linewidths: &[f64]) -> f64 {
    35.0 / linewidths.iter().cloned().fold(f64::INFINITY, f64::min)
}

/// Integrates from the vacuum state. See [`integrate_from`].
pub fn integrate(
    m: &ComplexMatrix,
    linewidths: &[f64],
    drives: &[Drive],
    t_end: f64,
    dt: f64,
) -> Result<SteadyState> {
    let initial = ComplexVector::zeros(m.rows());
    integrate_from(m, linewidths, &initial, drives, t_end, dt)
}

/// Fixed-step RK4 integration of `da/dt = M a - sqrt(G) a_in(t)`.
///
/// All drives must share one frequency (the demodulation reference). The
/// step is snapped down so that an integer number of steps fits one drive
/// period, which makes the tail average over whole periods exact.
pub fn integrate_from(
    m: &ComplexMatrix,
    linewidths: &[f64],
    initial: &ComplexVector,
    drives: &[Drive],
    t_end: f64,
    dt: f64,
) -> Result<SteadyState> {
    let dim = m.rows();
    if !m.is_square() || dim % 2 != 0 {
        return Err(Error::DimensionMismatch(format!(
            "system matrix must be square with even dimension, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = dim / 2;
    if linewidths.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "expected {n} linewidths, got {}",
            linewidths.len()
        )));
    }
    if initial.len() != dim {
        return Err(Error::DimensionMismatch(format!(
            "initial state has length {}, expected {dim}",
            initial.len()
        )));
    }
    if !(dt > 0.0) || !(t_end > 0.0) || !dt.is_finite() || !t_end.is_finite() {
        return Err(Error::InvalidParams("dt and t_end must be positive".into()));
    }
    let row_sum = m.max_row_sum();
    if dt * row_sum >= STABILITY_FRACTION {
        return Err(Error::InvalidParams(format!(
            "dt = {dt:.3e} too large for stability: dt * max_row_sum = {:.3e} >= {STABILITY_FRACTION}",
            dt * row_sum
        )));
    }
    for d in drives {
        if d.port >= n {
            return Err(Error::InvalidParams(format!(
                "drive port {} out of range (network has {n} ports)",
                d.port
            )));
        }
        if !(d.frequency > 0.0) {
            return Err(Error::InvalidParams(
                "drive frequencies must be positive".into(),
            ));
        }
    }
    if let Some(first) = drives.first() {
        if drives.iter().any(|d| d.frequency != first.frequency) {
            return Err(Error::InvalidParams(
                "all drives must share one frequency (demodulation reference)".into(),
            ));
        }
        let gamma_min = linewidths.iter().cloned().fold(f64::INFINITY, f64::min);
        if t_end < 20.0 / gamma_min {
            return Err(Error::InvalidParams(format!(
                "t_end = {t_end:.3e} too short for steady state (need >= {:.3e})",
                20.0 / gamma_min
            )));
        }
    }

    let sqrt_g: Vec<f64> = (0..dim).map(|i| linewidths[i % n].sqrt()).collect();
    let entries = m.entries();

    // Step layout: with a drive, snap dt so an integer number of steps
    // tiles one period, and run whole periods.
    let (dt, total_steps, window_steps) = match drives.first() {
        Some(d) => {
            let period = std::f64::consts::TAU / d.frequency;
            let per_period = (period / dt).ceil() as usize;
            let dt = period / per_period as f64;
            let n_periods = (t_end / period).ceil() as usize;
            // Average over the last few whole periods; cap the window so it
            // stays in the settled tail.
            let window_periods = (n_periods / 10).clamp(1, 64);
            (dt, n_periods * per_period, window_periods * per_period)
        }
        None => {
            let steps = (t_end / dt).ceil().max(1.0) as usize;
            (t_end / steps as f64, steps, 0)
        }
    };

    let w = drives.first().map(|d| d.frequency);
    // Carrier e^{-iwt}, advanced by multiplication and periodically resynced
    // against libm to keep phase and magnitude drift at rounding level.
    let step_full = w.map(|w| Complex64::from_polar(1.0, -w * dt));
    let step_half = w.map(|w| Complex64::from_polar(1.0, -w * dt / 2.0));
    let mut carrier = Complex64::new(1.0, 0.0);
    const RESYNC_EVERY: usize = 4096;

    let mut a: Vec<Complex64> = initial.as_slice().to_vec();
    let mut k1 = vec![Complex64::new(0.0, 0.0); dim];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut tmp = k1.clone();
    let mut demod_acc = vec![Complex64::new(0.0, 0.0); dim];

    // d/dt derivative at a given carrier value.
    let deriv = |state: &[Complex64], c: Complex64, out: &mut [Complex64]| {
        for (i, slot) in out.iter_mut().enumerate() {
            let row = &entries[i * dim..(i + 1) * dim];
            let mut acc = Complex64::new(0.0, 0.0);
            for (mij, aj) in row.iter().zip(state.iter()) {
                acc += mij * aj;
            }
            *slot = acc;
        }
        for d in drives {
            let inj = d.amplitude * c;
            out[d.port] -= sqrt_g[d.port] * inj;
            out[d.port + n] -= sqrt_g[d.port + n] * inj.conj();
        }
    };

    let demod_from = total_steps - window_steps;
    let mut demod_samples = 0usize;
    for step in 0..total_steps {
        if let Some(w) = w {
            if step % RESYNC_EVERY == 0 {
                let t = step as f64 * dt;
                carrier = Complex64::from_polar(1.0, -(w * t) % std::f64::consts::TAU);
            }
        }
        // Tail demodulation (left-endpoint samples over whole periods; the
        // periodic integrand makes this the trapezoid rule exactly).
        if window_steps > 0 && step >= demod_from {
            let ref_conj = carrier.conj();
            for (acc, ai) in demod_acc.iter_mut().zip(a.iter()) {
                *acc += ai * ref_conj;
            }
            demod_samples += 1;
        }

        let c0 = carrier;
        let (c_half, c_full) = match (step_half, step_full) {
            (Some(h), Some(f)) => (c0 * h, c0 * f),
            _ => (c0, c0),
        };

        deriv(&a, c0, &mut k1);
        for i in 0..dim {
            tmp[i] = a[i] + 0.5 * dt * k1[i];
        }
        deriv(&tmp, c_half, &mut k2);
        for i in 0..dim {
            tmp[i] = a[i] + 0.5 * dt * k2[i];
        }
        deriv(&tmp, c_half, &mut k3);
        for i in 0..dim {
            tmp[i] = a[i] + dt * k3[i];
        }
        deriv(&tmp, c_full, &mut k4);
        for i in 0..dim {
            a[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        carrier = c_full;

        if step % 64 == 0 {
            let mag = a.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
            if mag > INSTABILITY_LIMIT * INSTABILITY_LIMIT {
                return Err(Error::UnstableIntegration(mag.sqrt()));
            }
        }
    }
    let mag = a.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
    if mag > INSTABILITY_LIMIT * INSTABILITY_LIMIT {
        return Err(Error::UnstableIntegration(mag.sqrt()));
    }

    let demodulated = if window_steps > 0 {
        ComplexVector::new(
            demod_acc
                .iter()
                .map(|z| z / demod_samples as f64)
                .collect(),
        )?
    } else {
        ComplexVector::new(a.clone())?
    };
    Ok(SteadyState {
        final_state: ComplexVector::new(a)?,
        demodulated,
    })
}

/// Input-output relation on the demodulated phasors:
/// `a_out = a_in + sqrt(G) a`, where the input phasor vector carries the
/// drive amplitudes on their annihilation components. The result is
/// directly comparable with a scattering-matrix column.
pub fn steady_state_output(
    state: &ComplexVector,
    drives: &[Drive],
    linewidths: &[f64],
) -> Result<ComplexVector> {
    let dim = state.len();
    let n = dim / 2;
    if dim % 2 != 0 || linewidths.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "state length {dim} and {} linewidths are inconsistent",
            linewidths.len()
        )));
    }
    let mut out = ComplexVector::zeros(dim);
    for i in 0..dim {
        out[i] = linewidths[i % n].sqrt() * state[i];
    }
    for d in drives {
        if d.port >= n {
            return Err(Error::InvalidParams(format!(
                "drive port {} out of range",
                d.port
            )));
        }
        out[d.port] += d.amplitude;
    }
    Ok(out)
}
