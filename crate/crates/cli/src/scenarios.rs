//! Scenario implementations: sweep tables, the duration/splitting grids, the
//! relation fuzz report, and pulse synthesis with lab-frame verification.
//!
//! Column conventions: levels are labeled by their magnetic quantum number
//! (p1 = +1, 0, m1 = -1, i.e. descending energy order top to bottom of the
//! spectrum), cost-rate columns are normalized by tau^-2 (multiply by
//! tau^-2 to recover raw units of kappa^2) and speed columns by tau^-1.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ctdrive::dynamics::tracking_fidelity;
use ctdrive::fuzz::{run_relations_fuzz, FuzzConfig, FuzzReport};
use ctdrive::model::{lz3_trajectory, Lz3Params};
use ctdrive::nvframe::{synthesize_pulse, verify_lab_protocol, NvParams};
use ctdrive::sweep::{evaluate_sweep, propagate_levels, SweepSample};

use crate::config::Resolved;
use crate::csvout::CsvTable;
use crate::svg::{render, Panel, Series, PALETTE};

/// Ascending eigen-index for each label column (p1, 0, m1).
const LEVEL_ORDER: [(usize, &str); 3] = [(2, "p1"), (1, "0"), (0, "m1")];

fn sweep_columns(with_fidelity: bool) -> Vec<&'static str> {
    let mut cols = vec![
        "t",
        "lambda",
        "v_field",
        "dc_collective",
        "dc_p1",
        "dc_0",
        "dc_m1",
        "v_ensemble",
        "v_p1",
        "v_0",
        "v_m1",
    ];
    if with_fidelity {
        cols.extend(["fid_p1", "fid_0", "fid_m1"]);
    }
    cols
}

fn sweep_row(row: &SweepSample, tau: f64, fidelities: Option<[f64; 3]>) -> Vec<f64> {
    let t2 = tau * tau;
    let mut out = vec![
        row.t,
        row.lambda,
        row.v_field,
        row.cost.collective_rate * t2,
    ];
    for (idx, _) in LEVEL_ORDER {
        out.push(row.cost.individual_rates[idx] * t2);
    }
    out.push(row.speed.v * tau);
    for (idx, _) in LEVEL_ORDER {
        out.push(row.speed.v_n[idx] * tau);
    }
    if let Some(f) = fidelities {
        out.extend(f);
    }
    out
}

fn sweep_svg(rows: &[SweepSample], tau: f64, fid: Option<&[Vec<f64>]>) -> Vec<Panel> {
    let xs: Vec<f64> = rows.iter().map(|r| r.t / tau).collect();
    let cost_series = |label: &str, color, values: Vec<f64>| Series {
        label: label.to_string(),
        color,
        points: xs.iter().cloned().zip(values).collect(),
    };
    let t2 = tau * tau;
    let mut panels = vec![
        Panel {
            title: "cost rate (units of tau^-2)".into(),
            x_label: "t/tau".into(),
            y_label: "dC/dt * tau^2".into(),
            series: vec![
                cost_series(
                    "collective",
                    PALETTE[0],
                    rows.iter().map(|r| r.cost.collective_rate * t2).collect(),
                ),
                cost_series(
                    "level +1",
                    PALETTE[1],
                    rows.iter().map(|r| r.cost.individual_rates[2] * t2).collect(),
                ),
                cost_series(
                    "level 0",
                    PALETTE[2],
                    rows.iter().map(|r| r.cost.individual_rates[1] * t2).collect(),
                ),
                cost_series(
                    "level -1",
                    PALETTE[3],
                    rows.iter().map(|r| r.cost.individual_rates[0] * t2).collect(),
                ),
            ],
        },
        Panel {
            title: "speed (units of tau^-1)".into(),
            x_label: "t/tau".into(),
            y_label: "v * tau".into(),
            series: vec![
                cost_series(
                    "ensemble",
                    PALETTE[0],
                    rows.iter().map(|r| r.speed.v * tau).collect(),
                ),
                cost_series(
                    "level +1",
                    PALETTE[1],
                    rows.iter().map(|r| r.speed.v_n[2] * tau).collect(),
                ),
                cost_series(
                    "level 0",
                    PALETTE[2],
                    rows.iter().map(|r| r.speed.v_n[1] * tau).collect(),
                ),
                cost_series(
                    "level -1",
                    PALETTE[3],
                    rows.iter().map(|r| r.speed.v_n[0] * tau).collect(),
                ),
            ],
        },
    ];
    if let Some(fid) = fid {
        panels.push(Panel {
            title: "tracking fidelity".into(),
            x_label: "t/tau".into(),
            y_label: "|<n_t|psi_n>|".into(),
            series: LEVEL_ORDER
                .iter()
                .enumerate()
                .map(|(k, (idx, label))| Series {
                    label: format!("level {label}"),
                    color: PALETTE[k + 1],
                    points: xs.iter().cloned().zip(fid[*idx].iter().cloned()).collect(),
                })
                .collect(),
        });
    }
    panels
}

/// Snap the step count up so the recording grid lands exactly on the sample
/// grid: steps become a multiple of (samples - 1).
fn aligned_steps(steps: usize, samples: usize) -> (usize, usize) {
    let intervals = samples - 1;
    let stride = steps.div_ceil(intervals);
    (stride * intervals, stride)
}

/// Tracking fidelities on the sample grid, one run per level.
fn propagation_fidelities(
    p: &Lz3Params,
    resolved: &Resolved,
) -> Result<Vec<Vec<f64>>> {
    let traj = lz3_trajectory(p);
    let (steps, stride) = aligned_steps(resolved.rk4_steps, resolved.samples);
    let runs = propagate_levels(&traj, resolved.protocol.0, steps, stride)?;
    let report = tracking_fidelity(&runs, &traj)?;
    Ok(report.fidelities)
}

/// Shared implementation of the fig1-style sweep table (also `custom`).
pub fn run_sweep_scenario(resolved: &Resolved) -> Result<String> {
    let p = resolved.lz3_params()?;
    let rows = evaluate_sweep(&p, resolved.beta_scaled, resolved.samples)?;

    let fid = if resolved.propagate {
        Some(propagation_fidelities(&p, resolved)?)
    } else {
        None
    };

    let mut table = CsvTable::new(&sweep_columns(fid.is_some()), resolved.precision);
    for (k, row) in rows.iter().enumerate() {
        let f = fid.as_ref().map(|f| [f[2][k], f[1][k], f[0][k]]);
        table.push_row(&sweep_row(row, p.tau, f))?;
    }
    let path = resolved.csv_path();
    table.write(&path)?;

    if let Some(svg_path) = &resolved.svg {
        std::fs::write(svg_path, render(&sweep_svg(&rows, p.tau, fid.as_deref())))
            .with_context(|| format!("cannot write {}", svg_path.display()))?;
    }
    Ok(format!(
        "{}: wrote {} rows to {}",
        resolved.scenario.name(),
        table.rows(),
        path.display()
    ))
}

/// Long-format grid over sweep duration (fig2a) or energy splitting (fig2b).
pub fn run_grid_scenario(resolved: &Resolved, vary_tau: bool) -> Result<String> {
    const GRID: [f64; 4] = [0.1, 1.0, 10.0, 100.0];
    let mut table = CsvTable::new(
        &[
            "tau",
            "delta",
            "t",
            "dc_collective_raw",
            "v_ensemble_raw",
            "log2_sqrt_dc_norm",
            "log2_v_norm",
        ],
        resolved.precision,
    );

    let mut panels: Vec<Panel> = vec![
        Panel {
            title: "log2 sqrt(cost rate / tau^-2)".into(),
            x_label: "t/tau".into(),
            y_label: "log2 sqrt(dC/dt * tau^2)".into(),
            series: vec![],
        },
        Panel {
            title: "log2 (speed / tau^-1)".into(),
            x_label: "t/tau".into(),
            y_label: "log2 (v * tau)".into(),
            series: vec![],
        },
    ];

    for (gi, &g) in GRID.iter().enumerate() {
        let (tau, delta_over_kappa) = if vary_tau {
            (g, resolved.delta_over_kappa)
        } else {
            (resolved.tau, g)
        };
        let p = Lz3Params::new(
            delta_over_kappa * resolved.kappa,
            resolved.kappa,
            tau,
            resolved.alpha,
        )?;
        let rows = evaluate_sweep(&p, resolved.beta_scaled, resolved.samples)?;
        let mut cost_pts = Vec::with_capacity(rows.len());
        let mut speed_pts = Vec::with_capacity(rows.len());
        for row in &rows {
            let dc_norm = row.cost.collective_rate * tau * tau;
            let v_norm = row.speed.v * tau;
            table.push_row(&[
                tau,
                p.delta,
                row.t,
                row.cost.collective_rate,
                row.speed.v,
                dc_norm.sqrt().log2(),
                v_norm.log2(),
            ])?;
            cost_pts.push((row.t / tau, dc_norm.sqrt().log2()));
            speed_pts.push((row.t / tau, v_norm.log2()));
        }
        let label = if vary_tau {
            format!("tau = {g}")
        } else {
            format!("delta/kappa = {g}")
        };
        panels[0].series.push(Series {
            label: label.clone(),
            color: PALETTE[gi + 1],
            points: cost_pts,
        });
        panels[1].series.push(Series {
            label,
            color: PALETTE[gi + 1],
            points: speed_pts,
        });
    }

    let path = resolved.csv_path();
    table.write(&path)?;
    if let Some(svg_path) = &resolved.svg {
        std::fs::write(svg_path, render(&panels))
            .with_context(|| format!("cannot write {}", svg_path.display()))?;
    }
    Ok(format!(
        "{}: wrote {} rows to {}",
        resolved.scenario.name(),
        table.rows(),
        path.display()
    ))
}

fn fuzz_report_json(report: &FuzzReport) -> serde_json::Value {
    serde_json::json!({
        "frames": report.frames,
        "seed": report.seed,
        "pass": report.pass,
        "max_residuals": {
            "cost_relation": report.residuals.cost_relation,
            "speed_cost_individual": report.residuals.speed_cost_individual,
            "speed_chain_violation": report.residuals.speed_chain_violation,
            "collective_margin_min": report.residuals.collective_margin_min,
            "dim2_equality": report.residuals.dim2_equality,
            "middle_level_gap": report.residuals.middle_level_gap,
        },
        "violations": report.violations.iter().map(|v| serde_json::json!({
            "frame_index": v.frame_index,
            "relation": v.relation,
            "value": v.value,
            "dim": v.dim,
            "h": v.h,
            "dh": v.dh,
        })).collect::<Vec<_>>(),
    })
}

/// Relation battery; returns the process exit code (2 on any violation).
pub fn run_fuzz_scenario(resolved: &Resolved) -> Result<i32> {
    let cfg = FuzzConfig {
        frames: resolved.samples,
        seed: resolved.seed,
        ..Default::default()
    };
    let report = run_relations_fuzz(&cfg);
    let json = serde_json::to_string_pretty(&fuzz_report_json(&report))? + "\n";
    match &resolved.csv {
        Some(path) => std::fs::write(path, &json)
            .with_context(|| format!("cannot write {}", path.display()))?,
        None => print!("{json}"),
    }
    if report.pass {
        Ok(0)
    } else {
        eprintln!(
            "relation violations detected ({} offending frames serialized)",
            report.violations.len()
        );
        Ok(2)
    }
}

/// Pulse synthesis plus lab-frame verification. Writes the schedule CSV to
/// the output path and the tracking CSV next to it (suffix `_tracking`).
pub fn run_nv_scenario(resolved: &Resolved) -> Result<String> {
    let p = resolved.lz3_params()?;
    let nv = NvParams::desk_scale(resolved.omega0_over_kappa, resolved.kappa)?;
    let mut sched = synthesize_pulse(&nv, &p)?;
    sched.v_term = resolved.nv_v_term;

    let times: Vec<f64> = ctdrive::sweep::sweep_times(p.tau, resolved.samples);
    let mut schedule = CsvTable::new(&["t", "epsilon", "delta", "bx"], resolved.precision);
    for &t in &times {
        schedule.push_row(&[t, sched.epsilon(t), sched.delta(t), sched.bx(t)])?;
    }
    let path = resolved.csv_path();
    schedule.write(&path)?;

    let (steps, stride) = aligned_steps(resolved.rk4_steps, resolved.samples);
    let report = verify_lab_protocol(&sched, steps, stride)?;
    let mut tracking = CsvTable::new(&["t", "fid_p1", "fid_0", "fid_m1"], resolved.precision);
    for (k, &t) in report.times.iter().enumerate() {
        tracking.push_row(&[
            t,
            report.fidelities[2][k],
            report.fidelities[1][k],
            report.fidelities[0][k],
        ])?;
    }
    let tracking_path = derived_path(&path, "_tracking");
    tracking.write(&tracking_path)?;

    if let Some(svg_path) = &resolved.svg {
        let panels = vec![
            Panel {
                title: "pulse envelope".into(),
                x_label: "t".into(),
                y_label: "delta(t)".into(),
                series: vec![Series {
                    label: "delta".into(),
                    color: PALETTE[0],
                    points: times.iter().map(|&t| (t, sched.delta(t))).collect(),
                }],
            },
            Panel {
                title: "lab-frame tracking fidelity".into(),
                x_label: "t".into(),
                y_label: "|<n_t|psi_n>|".into(),
                series: LEVEL_ORDER
                    .iter()
                    .enumerate()
                    .map(|(k, (idx, label))| Series {
                        label: format!("level {label}"),
                        color: PALETTE[k + 1],
                        points: report
                            .times
                            .iter()
                            .cloned()
                            .zip(report.fidelities[*idx].iter().cloned())
                            .collect(),
                    })
                    .collect(),
            },
        ];
        std::fs::write(svg_path, render(&panels))
            .with_context(|| format!("cannot write {}", svg_path.display()))?;
    }

    let mut summary = format!(
        "nv-pulse: schedule -> {}, tracking -> {}\n",
        path.display(),
        tracking_path.display()
    );
    for (idx, label) in LEVEL_ORDER {
        let min = report.min_fidelity[idx];
        summary.push_str(&format!("  level {label}: min fidelity {min:.6}\n"));
        if min < 0.99 {
            summary.push_str(&format!(
                "  WARNING: level {label} below 0.99 tracking target\n"
            ));
        }
    }
    Ok(summary.trim_end().to_string())
}

fn derived_path(base: &Path, suffix: &str) -> std::path::PathBuf {
    let stem = base.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
    let ext = base.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    base.with_file_name(format!("{stem}{suffix}.{ext}"))
}

pub fn validate_nondefault(resolved: &Resolved) -> Result<()> {
    if resolved.scenario == crate::config::Scenario::Fuzz && resolved.svg.is_some() {
        bail!("--svg is not applicable to the fuzz scenario");
    }
    Ok(())
}
