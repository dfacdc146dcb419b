use std::f64::consts::{E, PI};

use hscaler::csim::{propagate_exact, propagate_verlet, sample_gaussian, Ensemble};
use hscaler::moments::{
    continued_momentum_integral, fundamental_matrices, invariant_expectations, max_abs_q_mean,
    propagate_second_moments, tabulate, uniform_times, InvariantRecord, MomentState,
};
use hscaler::qsim::{gaussian_state, measure_moments, propagate, wigner, Propagation, WignerGrid, WignerOptions};
use hscaler::{
    design_trajectory, synthesize_omega2, validate_protocol, CodeUnits, FrequencyProgram, ReferenceTrajectory,
    ScalingMode, ScalingSpec,
};
use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output::{fmt, OutputDir};

pub const MOMENT_COLUMNS: [&str; 8] = ["t", "q_mean", "p_mean", "var_q", "var_p", "cov_qp", "G_mean", "I_mean"];

fn build(spec: &ScalingSpec) -> Result<(ReferenceTrajectory, FrequencyProgram), CliError> {
    let traj = design_trajectory(spec)?;
    let program = synthesize_omega2(&traj)?;
    Ok((traj, program))
}

fn moment_row(s: &MomentState, inv: &InvariantRecord) -> Vec<String> {
    [s.time, s.q_mean, s.p_mean, s.var_q(), s.var_p(), s.cov_qp(), inv.g_mean, inv.i_mean]
        .iter()
        .map(|&x| fmt(x))
        .collect()
}

pub fn cmd_design(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let (traj, program) = build(&cfg.spec)?;
    let initial = cfg.initial_state.moments(cfg.spec.hbar);
    let report = validate_protocol(&traj, &program, Some(&initial));
    let rows = program
        .tabulate(cfg.outputs.samples)
        .into_iter()
        .map(|r| vec![fmt(r.s), fmt(r.t), fmt(r.u), fmt(r.udot), fmt(r.omega2)]);
    let removed: Vec<Value> = program.removed_roots().iter().map(|(s, k)| json!({"s": s, "multiplicity": k})).collect();
    out.write_csv(
        "protocol.csv",
        &["s", "t", "u", "udot", "omega2"],
        rows,
        json!({
            "spec": cfg.spec,
            "coefficients_in_s": traj.coeffs(),
            "peak_abs_omega2": program.peak_abs_omega2(),
            "peak_time": program.peak_time(),
            "removed_roots": removed,
            "validation": report,
        }),
    )?;
    out.log(&format!(
        "{} scaling by {}: peak |omega^2| = {:e} at t = {:e}",
        cfg.spec.mode.name(),
        cfg.spec.scale_factor,
        program.peak_abs_omega2(),
        program.peak_time()
    ));
    if !report.passed {
        return Err(CliError::Validation(report.failures.join("; ")));
    }
    Ok(())
}

pub fn cmd_moments(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let (traj, program) = build(&cfg.spec)?;
    let initial = cfg.initial_state.moments(cfg.spec.hbar);
    let table = tabulate(&program, &initial, cfg.outputs.samples)?;
    let (fin, _) = table.last().copied().expect("tabulate returns at least two rows");
    let rows: Vec<Vec<String>> = table.iter().map(|(s, inv)| moment_row(s, inv)).collect();
    out.write_csv(
        "moments.csv",
        &MOMENT_COLUMNS,
        rows,
        json!({
            "spec": cfg.spec,
            "initial_state": initial,
            "final_state": fin,
            "scaling": scaling_summary(&traj, &initial, &fin),
        }),
    )?;
    out.log(&format!("final <q> = {:e}, <p> = {:e}", fin.q_mean, fin.p_mean));
    Ok(())
}

/// Requested and achieved ratios of the scaled observable.
fn scaling_summary(traj: &ReferenceTrajectory, initial: &MomentState, fin: &MomentState) -> Value {
    let f = traj.scale_factor();
    match traj.mode() {
        ScalingMode::MomentumScaling => json!({
            "requested_factor": f,
            "p_mean_ratio": fin.p_mean / initial.p_mean,
            "sigma_p_ratio": (fin.var_p() / initial.var_p()).sqrt(),
            "kinetic_energy_ratio": fin.p2 / initial.p2,
        }),
        ScalingMode::PositionScaling => json!({
            "requested_factor": f,
            "q_mean_ratio": fin.q_mean / initial.q_mean,
            "sigma_q_ratio": (fin.var_q() / initial.var_q()).sqrt(),
        }),
    }
}

fn run_wave_packet(cfg: &RunConfig, program: &FrequencyProgram) -> Result<Propagation, CliError> {
    let units = CodeUnits::from_spec(&cfg.spec);
    let (q0, p0, sigma) = cfg.initial_state.code_gaussian(&units)?;
    let wf = gaussian_state(&cfg.grid, q0, p0, sigma)?;
    Ok(propagate(&wf, program, cfg.outputs.snapshots)?)
}

fn warnings_json(run: &Propagation) -> Value {
    json!(run.warnings)
}

pub fn cmd_qsim(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let (traj, program) = build(&cfg.spec)?;
    let units = CodeUnits::from_spec(&cfg.spec);
    let run = run_wave_packet(cfg, &program)?;
    let norm0 = run.snapshots[0].norm();
    let mut rows = Vec::new();
    let mut max_drift: f64 = 0.0;
    for (k, snap) in run.snapshots.iter().enumerate() {
        let q = snap.grid.q_points();
        let data = q.iter().zip(&snap.amplitudes).map(|(x, a)| vec![fmt(*x), fmt(a.re), fmt(a.im), fmt(a.norm_sqr())]);
        let measured = units.state_from_code(&measure_moments(snap));
        max_drift = max_drift.max((snap.norm() - norm0).abs());
        out.write_csv(
            &format!("snapshots/snapshot_{k:02}.csv"),
            &["Q", "re_psi", "im_psi", "abs2"],
            data,
            json!({"s": snap.time, "norm": snap.norm(), "grid": snap.grid, "moments": measured}),
        )?;
        rows.push(moment_row(&measured, &invariant_expectations(&traj, &measured)));
    }
    out.write_csv(
        "qsim_moments.csv",
        &MOMENT_COLUMNS,
        rows,
        json!({
            "spec": cfg.spec,
            "grid": cfg.grid,
            "snapshots": cfg.outputs.snapshots,
            "norm_drift": max_drift,
            "stability_warnings": warnings_json(&run),
        }),
    )?;
    for w in &run.warnings {
        out.log(&format!("warning: edge probability {:e} at s = {}", w.edge_probability, w.time));
    }
    out.log(&format!("{} snapshots, max norm drift {max_drift:e}", run.snapshots.len()));
    Ok(())
}

/// Level of the `1/e` contour of a minimum-uncertainty Gaussian, `1/(pi e)`.
pub fn contour_level() -> f64 {
    1.0 / (PI * E)
}

fn decimate(w: &WignerGrid, q_stride: usize, p_stride: usize) -> Vec<Vec<String>> {
    let mut rows = Vec::new();
    for i in (0..w.q.len()).step_by(q_stride) {
        for k in (0..w.p.len()).step_by(p_stride) {
            rows.push(vec![fmt(w.q[i]), fmt(w.p[k]), fmt(w.at(i, k))]);
        }
    }
    rows
}

pub fn cmd_wigner(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let (_, program) = build(&cfg.spec)?;
    let run = run_wave_packet(cfg, &program)?;
    let wo = &cfg.outputs.wigner;
    let opts = WignerOptions { q_window: wo.q_window, p_window: wo.p_window, pad: wo.pad };
    let level = contour_level();
    let mut areas = Vec::new();
    for (k, snap) in run.snapshots.iter().enumerate() {
        let w = wigner(snap, &opts);
        let area = w.level_set_area(level);
        let m = measure_moments(snap);
        areas.push(area);
        out.write_csv(
            &format!("wigner/wigner_{k:02}.csv"),
            &["Q", "P", "W"],
            decimate(&w, wo.q_stride, wo.p_stride),
            json!({
                "s": snap.time,
                "level": level,
                "level_description": "1/e of the peak 1/pi of a minimum-uncertainty Gaussian, code units",
                "level_set_area": area,
                "window_integral": w.total(),
                "q_mean": m.q_mean,
                "p_mean": m.p_mean,
                "options": opts,
                "q_stride": wo.q_stride,
                "p_stride": wo.p_stride,
            }),
        )?;
    }
    let a0 = areas[0];
    let worst = areas.iter().map(|a| (a - a0).abs() / a0).fold(0.0, f64::max);
    out.log(&format!("{} Wigner grids, contour area {a0:e}, max relative change {worst:e}", areas.len()));
    out.write_json(
        "wigner/summary.json",
        &json!({"level": level, "areas": areas, "max_relative_area_change": worst, "stability_warnings": warnings_json(&run)}),
    )?;
    Ok(())
}

pub fn cmd_csim(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let (traj, program) = build(&cfg.spec)?;
    let initial = cfg.initial_state.moments(cfg.spec.hbar);
    let ens = sample_gaussian(&initial, cfg.ensemble.n, cfg.ensemble.seed, cfg.spec.hbar)?;
    let times = uniform_times(program.t_f(), cfg.outputs.snapshots);
    let mats = fundamental_matrices(&program, &times)?;
    let mut rows = Vec::new();
    let mut report = Vec::new();
    let mut passed = true;
    for (k, (&t, m)) in times.iter().zip(&mats).enumerate() {
        let e = propagate_exact(&ens, &program, t)?;
        let em = e.moments();
        let predicted = propagate_second_moments(m, &initial);
        let z = z_scores(&em.state, &predicted, &em.stderr);
        let worst = z.iter().cloned().fold(0.0, f64::max);
        passed &= worst <= 5.0;
        report.push(json!({"t": t, "max_abs_z": worst, "z": z}));
        rows.push(moment_row(&em.state, &invariant_expectations(&traj, &em.state)));
        if cfg.ensemble.write_points {
            write_points(out, &format!("ensemble/ensemble_{k:02}.csv"), &e)?;
        }
    }
    let mut summary = json!({
        "n": cfg.ensemble.n,
        "seed": cfg.ensemble.seed,
        "snapshots": report,
        "within_5_standard_errors": passed,
    });
    if let Some(dt) = cfg.ensemble.verlet_dt {
        let v = propagate_verlet(&ens, &program, program.t_f(), dt)?;
        let exact = propagate_exact(&ens, &program, program.t_f())?;
        let dev = v
            .points
            .iter()
            .zip(&exact.points)
            .map(|(a, b)| (a.q - b.q).abs().max((a.p - b.p).abs()))
            .fold(0.0, f64::max);
        summary["verlet"] = json!({"dt": dt, "max_point_deviation_at_t_f": dev});
    }
    out.write_csv("csim_moments.csv", &MOMENT_COLUMNS, rows, json!({"spec": cfg.spec, "initial_state": initial}))?;
    out.write_json("csim_report.json", &summary)?;
    if !passed {
        return Err(CliError::Validation("ensemble moments deviate from the prediction by more than 5 standard errors".into()));
    }
    out.log(&format!("{} points, ensemble moments within 5 standard errors", cfg.ensemble.n));
    Ok(())
}

fn z_scores(got: &MomentState, want: &MomentState, stderr: &[f64; 5]) -> Vec<f64> {
    let g = [got.q_mean, got.p_mean, got.q2, got.p2, got.qp_sym];
    let w = [want.q_mean, want.p_mean, want.q2, want.p2, want.qp_sym];
    (0..5)
        .map(|i| {
            let d = (g[i] - w[i]).abs();
            if stderr[i] > 0.0 {
                d / stderr[i]
            } else if d == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        })
        .collect()
}

fn write_points(out: &OutputDir, rel: &str, e: &Ensemble) -> Result<(), CliError> {
    let rows = e.points.iter().map(|p| vec![fmt(p.q), fmt(p.p), fmt(p.weight)]);
    out.write_csv(rel, &["q", "p", "weight"], rows, json!({"t": e.time, "rng_seed": e.rng_seed}))?;
    Ok(())
}

/// Least-squares slope of `ln y` against `ln x`; `None` for fewer than two
/// points, equal abscissae or non-positive values.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Option<f64> {
    if x.len() < 2 || x.iter().chain(y).any(|v| !(*v > 0.0)) {
        return None;
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    Some(sxy / sxx)
}

fn slope_json(s: Option<f64>) -> Value {
    s.map_or(json!("n/a"), |v| json!(v))
}

pub fn cmd_sweep(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let sweep = cfg.sweep.clone().unwrap_or_default();
    let specs: Vec<ScalingSpec> = if !sweep.t_f.is_empty() {
        sweep.t_f.iter().map(|&t_f| ScalingSpec { t_f, ..cfg.spec }).collect()
    } else {
        sweep.scale_factors.iter().map(|&f| ScalingSpec { scale_factor: f, ..cfg.spec }).collect()
    };
    if specs.is_empty() {
        return Err(CliError::Config("sweep needs at least one t_f or scale factor".into()));
    }
    let initial = cfg.initial_state.moments(cfg.spec.hbar);
    let mut rows = Vec::new();
    let (mut tf, mut peaks, mut ifs) = (Vec::new(), Vec::new(), Vec::new());
    for spec in &specs {
        let (_, program) = build(spec)?;
        let i_f = match spec.mode {
            ScalingMode::MomentumScaling => Some(continued_momentum_integral(&program, spec.t_f)?),
            ScalingMode::PositionScaling => None,
        };
        let excursion = max_abs_q_mean(&program, &initial, cfg.outputs.samples)?;
        rows.push(vec![
            fmt(spec.t_f),
            fmt(spec.scale_factor),
            fmt(program.peak_abs_omega2()),
            i_f.map_or("n/a".to_string(), fmt),
            fmt(excursion),
        ]);
        tf.push(spec.t_f);
        peaks.push(program.peak_abs_omega2());
        ifs.push(i_f.unwrap_or(f64::NAN));
    }
    let varies_t_f = !sweep.t_f.is_empty();
    let peak_slope = if varies_t_f { log_log_slope(&tf, &peaks) } else { None };
    let i_slope = if varies_t_f { log_log_slope(&tf, &ifs) } else { None };
    out.write_csv(
        "sweep.csv",
        &["t_f", "scale_factor", "peak_abs_omega2", "I_f", "max_abs_q_mean"],
        rows,
        json!({
            "base_spec": cfg.spec,
            "initial_state": initial,
            "slope_log_peak_vs_log_t_f": slope_json(peak_slope),
            "slope_log_I_f_vs_log_t_f": slope_json(i_slope),
        }),
    )?;
    out.log(&format!(
        "{} points; slopes: peak {}, I_f {}",
        specs.len(),
        slope_json(peak_slope),
        slope_json(i_slope)
    ));
    Ok(())
}

pub fn cmd_validate(cfg: &RunConfig, out: &OutputDir) -> Result<(), CliError> {
    let (traj, program) = build(&cfg.spec)?;
    let initial = cfg.initial_state.moments(cfg.spec.hbar);
    let report = validate_protocol(&traj, &program, Some(&initial));
    let fin = propagate_second_moments(&fundamental_matrices(&program, &[program.t_f()])?[0], &initial);
    out.write_json(
        "validation.json",
        &json!({"spec": cfg.spec, "report": report, "scaling": scaling_summary(&traj, &initial, &fin)}),
    )?;
    if !report.passed {
        return Err(CliError::Validation(report.failures.join("; ")));
    }
    out.log("protocol valid");
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let x = [0.1, 1.0, 10.0];
        let y: Vec<f64> = x.iter().map(|v: &f64| 3.0 * v.powi(-2)).collect();
        assert!((log_log_slope(&x, &y).unwrap() + 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&[1.0], &[2.0]), None);
        assert_eq!(log_log_slope(&[1.0, 1.0], &[2.0, 3.0]), None);
        assert_eq!(log_log_slope(&[1.0, 2.0], &[-2.0, 3.0]), None);
    }

    #[test]
    fn contour_level_is_peak_over_e() {
        assert!((contour_level() * PI * E - 1.0).abs() < 1e-15);
    }
}
