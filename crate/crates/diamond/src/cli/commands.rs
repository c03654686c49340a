//! Subcommand implementations: scattering snapshots, sweep/optimization
//! runs with CSV/JSON artifacts, preset reproduction, and the
//! time-domain/frequency-domain self-verification report.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use num_complex::Complex64;
use serde_json::json;

use crate::cli::config::{unit_scale, RunConfig};
use crate::cli::presets::{self, compute_stat};
use crate::error::{Error, Result};
use crate::model::{self, ProbeBasis, PumpConfig, SignConvention};
use crate::optimize;
use crate::sweep::{run_sweep_parallel, SweepResult};
use crate::timedomain;

const TAU: f64 = std::f64::consts::TAU;

/// CSV column order; coordinates and probe are in config units (Hz for
/// frequency-like axes), gains and transmissions in dB.
pub const CSV_HEADER: &str =
    "coord1,coord2,probe_hz,r_linear,r_db,fwd_gain_db,bwd_gain_db,s31_sq_db,s13_sq_db,degenerate";

pub fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path)?;
    RunConfig::parse(&text)
}

/// Full-precision, locale-independent float formatting (17 significant
/// digits).
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

/// Renders a sweep table as CSV with axis coordinates converted back to
/// config units.
pub fn csv_text(result: &SweepResult) -> String {
    let scale = |i: usize| -> f64 {
        result
            .axes
            .get(i)
            .map_or(1.0, |a| unit_scale(a.param))
    };
    let (s1, s2) = (scale(0), scale(1));
    let mut out = String::with_capacity(result.records.len() * 120);
    out.push_str(CSV_HEADER);
    out.push('\n');
    for r in &result.records {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            fmt(r.coords[0] / s1),
            fmt(r.coords[1] / s2),
            fmt(r.probe / TAU),
            fmt(r.r_linear),
            fmt(model::db(r.r_linear)),
            fmt(model::db(r.fwd_gain)),
            fmt(model::db(r.bwd_gain)),
            fmt(model::db(r.s31_sq)),
            fmt(model::db(r.s13_sq)),
            r.degenerate
        );
    }
    out
}

fn record_json(result: &SweepResult, idx: usize) -> serde_json::Value {
    let r = &result.records[idx];
    let scale = |i: usize| -> f64 {
        result.axes.get(i).map_or(1.0, |a| unit_scale(a.param))
    };
    json!({
        "index": idx,
        "coord1": r.coords[0] / scale(0),
        "coord2": r.coords[1] / scale(1),
        "probe_hz": r.probe / TAU,
        "r_linear": r.r_linear,
        "r_db": model::db(r.r_linear),
        "fwd_gain_db": model::db(r.fwd_gain),
        "bwd_gain_db": model::db(r.bwd_gain),
    })
}

/// Headline summary: argmax / argmin of the non-reciprocity metric and the
/// forward-gain argmax, in both linear and dB.
pub fn summary_json(result: &SweepResult) -> serde_json::Value {
    let argmin_r = result
        .records
        .iter()
        .enumerate()
        .filter(|(_, r)| r.r_linear.is_finite())
        .min_by(|a, b| a.1.r_linear.total_cmp(&b.1.r_linear))
        .map(|(i, _)| i);
    json!({
        "records": result.records.len(),
        "degenerate_records":
            result.records.iter().filter(|r| r.degenerate).count(),
        "peak_r": result.argmax_r().map(|(i, _)| record_json(result, i)),
        "min_r": argmin_r.map(|i| record_json(result, i)),
        "peak_fwd_gain": result.argmax_fwd().map(|(i, _)| record_json(result, i)),
    })
}

fn write_artifacts(
    out_dir: &Path,
    stem: &str,
    result: &SweepResult,
    summary: &serde_json::Value,
) -> Result<()> {
    fs::create_dir_all(out_dir)?;
    fs::write(out_dir.join(format!("{stem}.csv")), csv_text(result))?;
    fs::write(
        out_dir.join(format!("{stem}_summary.json")),
        serde_json::to_string_pretty(summary).expect("summary serializes") + "\n",
    )?;
    Ok(())
}

/// `smatrix`: print the 8x8 scattering matrix and headline metrics at one
/// probe frequency as JSON.
pub fn cmd_smatrix(
    config_path: &Path,
    freq_hz: f64,
    convention: Option<SignConvention>,
) -> Result<()> {
    let cfg = load_config(config_path)?;
    let p = cfg.params()?;
    let convention = convention.unwrap_or(cfg.convention);
    let w = TAU * freq_hz;
    let m = model::build_diamond_matrix(&p)?;
    let s = model::scattering(&m, &p.linewidths(), w, convention)?;
    let pumps = cfg.pump_config();
    let r = match &pumps {
        Some(pc) => model::extrinsic_nonreciprocity(&s, pc),
        None => model::intrinsic_nonreciprocity(&s),
    };
    let (fwd, bwd) =
        model::directional_gains(&s, &pumps.unwrap_or(PumpConfig::OFF));
    let (r_linear, r_db, degenerate) = match r {
        Ok(v) => (Some(v), Some(model::db(v)), false),
        Err(Error::DegenerateTransmission(_)) => (None, None, true),
        Err(e) => return Err(e),
    };
    let entries: Vec<Vec<serde_json::Value>> = (0..8)
        .map(|i| {
            (0..8)
                .map(|j| json!({ "re": s.s[(i, j)].re, "im": s.s[(i, j)].im }))
                .collect()
        })
        .collect();
    let out = json!({
        "probe_hz": freq_hz,
        "convention": convention,
        "s": entries,
        "r_linear": r_linear,
        "r_db": r_db,
        "degenerate": degenerate,
        "fwd_gain_db": model::db(fwd),
        "bwd_gain_db": model::db(bwd),
    });
    println!("{}", serde_json::to_string_pretty(&out).expect("serializes"));
    Ok(())
}

/// `sweep`: run the config's sweep section, write `sweep.csv` and
/// `sweep_summary.json` under the output directory.
pub fn cmd_sweep(config_path: &Path, out_dir: &Path, workers: Option<usize>) -> Result<()> {
    let cfg = load_config(config_path)?;
    let p = cfg.params()?;
    let pumps = cfg.pump_config();
    let axes = cfg.internal_axes()?;
    let policy = cfg.internal_policy()?;
    let workers = workers.or(cfg.workers);
    let result = run_sweep_parallel(&p, pumps.as_ref(), &axes, &policy, workers)?;
    let summary = summary_json(&result);
    write_artifacts(out_dir, "sweep", &result, &summary)?;
    println!("{}", serde_json::to_string_pretty(&summary).expect("serializes"));
    Ok(())
}

/// `optimize`: grid-seed then simplex-refine the config's optimization
/// problem; write `optimize.json`.
pub fn cmd_optimize(config_path: &Path, out_dir: &Path) -> Result<()> {
    let cfg = load_config(config_path)?;
    let section = cfg.optimize.clone().ok_or_else(|| {
        Error::ValidationError("config has no optimize section".into())
    })?;
    let problem = cfg.problem()?;
    let seed = optimize::grid_seed(&problem, section.grid_points)?;
    let seed_val = problem.evaluate(&seed);
    let (best, best_val) = optimize::refine(&problem, &seed)?;
    let named = |x: &[f64]| -> Vec<serde_json::Value> {
        problem
            .free
            .iter()
            .zip(x)
            .map(|(fp, &v)| {
                json!({
                    "param": fp.param,
                    "value": v / unit_scale(fp.param),
                })
            })
            .collect()
    };
    let out = json!({
        "objective": section.objective,
        "grid_points_per_axis": section.grid_points,
        "seed": { "point": named(&seed), "objective": seed_val },
        "refined": { "point": named(&best), "objective": best_val },
    });
    fs::create_dir_all(out_dir)?;
    let text = serde_json::to_string_pretty(&out).expect("serializes");
    fs::write(out_dir.join("optimize.json"), text.clone() + "\n")?;
    println!("{text}");
    Ok(())
}

/// `reproduce`: run a built-in preset, write its CSV and summary, print
/// each headline check. Returns whether every check passed.
pub fn cmd_reproduce(figure: &str, out_dir: &Path, workers: Option<usize>) -> Result<bool> {
    let preset = presets::figure_preset(figure)?;
    let cfg = &preset.config;
    let p = cfg.params()?;
    let pumps = cfg.pump_config();
    let axes = cfg.internal_axes()?;
    let policy = cfg.internal_policy()?;
    let result = run_sweep_parallel(&p, pumps.as_ref(), &axes, &policy, workers)?;

    let mut checks = Vec::new();
    let mut all_pass = true;
    for check in &preset.checks {
        let value = compute_stat(check.stat, &result, &p);
        let pass = check.passes(value);
        all_pass &= pass;
        println!(
            "figure {} check [{}]: {} (value {:.6e}, band [{:.6e}, {:.6e}])",
            preset.id,
            check.name,
            if pass { "PASS" } else { "FAIL" },
            value,
            check.lo,
            check.hi
        );
        checks.push(json!({
            "name": check.name,
            "stat": check.stat,
            "value": value,
            "lo": check.lo,
            "hi": check.hi,
            "pass": pass,
        }));
    }

    let mut summary = summary_json(&result);
    summary["figure"] = json!(preset.id);
    summary["checks"] = json!(checks);
    summary["all_checks_pass"] = json!(all_pass);
    let stem = format!("figure_{}", preset.id);
    write_artifacts(out_dir, &stem, &result, &summary)?;
    Ok(all_pass)
}

/// `verify`: resolvent-residual checks plus the time-domain steady-state
/// cross-check of the scattering matrix at sampled probe frequencies.
/// Returns whether every check passed.
pub fn cmd_verify(config_path: &Path, tolerance: f64) -> Result<bool> {
    let cfg = load_config(config_path)?;
    let p = cfg.params()?;
    let lw = p.linewidths();
    let m = model::build_diamond_matrix(&p)?;
    let mut all_pass = true;

    // Detunings within +/- 3 port-1 linewidths of the port 1/3 resonance.
    let probes: Vec<f64> = [-3.0, -1.0, 0.5, 2.5]
        .iter()
        .map(|&k| p.omega1 + k * p.gamma1)
        .collect();

    // Residual of the linear solve behind each scattering evaluation.
    const RESIDUAL_TOL: f64 = 1e-10;
    for &w in &probes {
        let mut a = crate::linalg::ComplexMatrix::zeros(8, 8);
        for i in 0..8 {
            for j in 0..8 {
                a[(i, j)] = m[(i, j)];
            }
            a[(i, i)] += Complex64::new(0.0, w);
        }
        let inv = crate::linalg::invert(&a)?;
        let prod = crate::linalg::matmul(&a, &inv)?;
        let resid = prod.sub(&crate::linalg::ComplexMatrix::identity(8))?;
        let ok = resid.max_norm() <= RESIDUAL_TOL;
        all_pass &= ok;
        println!(
            "verify resolvent residual at {:.6e} Hz: {} (relative residual {:.3e})",
            w / TAU,
            if ok { "PASS" } else { "FAIL" },
            resid.max_norm()
        );
    }

    // Time-domain steady state versus the scattering-matrix column for a
    // drive into port 1.
    let dt = timedomain::recommended_dt(&m);
    let t_end = timedomain::recommended_t_end(&lw);
    let amplitude = Complex64::new(1.0, 0.0);
    for &w in &probes {
        let drives = [timedomain::Drive { port: 0, amplitude, frequency: w }];
        let state = timedomain::integrate(&m, &lw, &drives, t_end, dt)?;
        let measured = timedomain::steady_state_output(&state.demodulated, &drives, &lw)?;
        let s = model::scattering_in_basis(
            &m,
            &lw,
            w,
            SignConvention::Standard,
            ProbeBasis::Uniform,
        )?;
        let mut max_pred: f64 = 0.0;
        let mut max_err: f64 = 0.0;
        for i in 0..8 {
            let pred = s.s[(i, 0)] * amplitude;
            max_pred = max_pred.max(pred.norm());
            max_err = max_err.max((measured[i] - pred).norm());
        }
        let rel = max_err / max_pred;
        let ok = rel <= tolerance;
        all_pass &= ok;
        println!(
            "verify time vs frequency domain at {:.6e} Hz: {} (max relative error {:.3e})",
            w / TAU,
            if ok { "PASS" } else { "FAIL" },
            rel
        );
    }

    // Informational headline: non-reciprocity at resonance in the default
    // reporting basis.
    let s = model::scattering(&m, &lw, p.omega1, SignConvention::Paper)?;
    match cfg.pump_config() {
        Some(pumps) => match model::extrinsic_nonreciprocity(&s, &pumps) {
            Ok(r) => println!(
                "info: pump-dressed non-reciprocity at resonance R = {:.6} ({:.4} dB)",
                r,
                model::db(r)
            ),
            Err(e) => println!("info: non-reciprocity at resonance undefined ({e})"),
        },
        None => match model::intrinsic_nonreciprocity(&s) {
            Ok(r) => println!(
                "info: intrinsic non-reciprocity at resonance R = {:.6} ({:.4} dB)",
                r,
                model::db(r)
            ),
            Err(e) => println!("info: non-reciprocity at resonance undefined ({e})"),
        },
    }

    println!("verify overall: {}", if all_pass { "PASS" } else { "FAIL" });
    Ok(all_pass)
}
