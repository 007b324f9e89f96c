//! Acceptance suite: every release criterion as one test, each printing a
//! PASS line with the measured numbers (run with `--nocapture` to see them
//! alongside the per-test verdicts).
//!
//! Reference configuration throughout: delta/kappa = 0.1, kappa = tau = 1,
//! alpha = 2, Gibbs populations at beta = 1/2.

use std::process::Command;
use std::time::Instant;

use ctdrive::adiabatic::spectral_frame;
use ctdrive::cdrive::{build_collective, build_individual, DriveProtocol};
use ctdrive::costspeed::{
    canonical_populations, density_from_populations, fisher_metric_spectral, uhlmann_fidelity,
};
use ctdrive::dynamics::tracking_fidelity;
use ctdrive::fuzz::{run_relations_fuzz, FuzzConfig, RESIDUAL_TOL};
use ctdrive::linalg::{frobenius_norm, hermitian_eig};
use ctdrive::model::{lz3_trajectory, Lz3Params};
use ctdrive::nvframe::{exact_transform_consistency, synthesize_pulse, verify_lab_protocol, NvParams};
use ctdrive::sweep::{evaluate_sweep, propagate_levels, sweep_times};

fn reference_params() -> Lz3Params {
    Lz3Params::new(0.1, 1.0, 1.0, 2.0).unwrap()
}

#[test]
fn acceptance_01_cost_equality_phenomenon() {
    let start = Instant::now();
    let p = reference_params();
    let rows = evaluate_sweep(&p, 0.5, 400).unwrap();
    let mut worst_mid = 0.0_f64;
    let mut worst_outer = 0.0_f64;
    for row in &rows {
        let c = row.cost.collective_rate;
        let mid = row.cost.individual_rates[1];
        worst_mid = worst_mid.max((c - mid).abs() / c);
        for outer in [0, 2] {
            worst_outer =
                worst_outer.max((row.cost.individual_rates[outer] - 0.5 * mid).abs() / mid);
        }
    }
    let elapsed = start.elapsed();
    assert!(worst_mid <= 1e-9, "collective vs middle: {worst_mid:.3e}");
    assert!(worst_outer <= 1e-9, "outer vs half-middle: {worst_outer:.3e}");
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}");
    println!(
        "acceptance 1 (cost equality over 400 samples): PASS \
         (max residuals {worst_mid:.2e} / {worst_outer:.2e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_02_operator_level_identity() {
    let p = reference_params();
    let traj = lz3_trajectory(&p);
    let mut worst = 0.0_f64;
    for &t in &sweep_times(p.tau, 400) {
        let frame = spectral_frame(&traj, t).unwrap();
        let collective = build_collective(&frame);
        let middle = build_individual(&frame, 1).unwrap();
        worst = worst.max(middle.matrix().max_abs_diff(collective.matrix()));
    }
    assert!(worst <= 1e-10, "middle-level operator differs: {worst:.3e}");

    let frame = spectral_frame(&traj, 0.5 * p.tau).unwrap();
    let collective = build_collective(&frame);
    let scale = frobenius_norm(collective.matrix());
    let mut min_outer_distance = f64::INFINITY;
    for level in [0, 2] {
        let outer = build_individual(&frame, level).unwrap();
        let distance = frobenius_norm(&(outer.matrix() - collective.matrix()));
        min_outer_distance = min_outer_distance.min(distance);
    }
    assert!(min_outer_distance > 0.1 * scale);
    println!(
        "acceptance 2 (auxiliary-operator identity): PASS \
         (entrywise {worst:.2e}, outer distance {:.2} of {:.2})",
        min_outer_distance, scale
    );
}

#[test]
fn acceptance_03_peak_values_at_the_crossing() {
    let p = reference_params();
    let traj = lz3_trajectory(&p);
    let ens = canonical_populations(&traj, 0.5, p.kappa).unwrap();
    let frame = spectral_frame(&traj, 0.5 * p.tau).unwrap();
    let report = ctdrive::costspeed::cost_report(&frame, p.alpha);
    let speed = ctdrive::costspeed::ensemble_speed(&frame, &ens);
    let t2 = p.tau * p.tau;

    let dc = report.collective_rate * t2;
    assert!((dc - 800.0).abs() <= 1e-6, "dc = {dc}");
    let v0 = speed.v_n[1] * p.tau;
    assert!((v0 - 20.0).abs() <= 1e-9, "v0 = {v0}");
    for outer in [0, 2] {
        let v = speed.v_n[outer] * p.tau;
        assert!((v - 200.0_f64.sqrt()).abs() <= 1e-9, "outer v = {v}");
    }
    let v = speed.v * p.tau;
    // Published rounding and the frozen brute-force fixture.
    assert!((v - 3.9784).abs() <= 1e-3, "v = {v}");
    assert!((v - 3.978_681_564_253_373).abs() <= 1e-9, "v = {v:.15}");
    println!(
        "acceptance 3 (peak values): PASS (dc {dc:.9}, v0 {v0:.12}, v {v:.12})"
    );
}

#[test]
fn acceptance_04_relation_suite_on_random_frames() {
    let start = Instant::now();
    let report = run_relations_fuzz(&FuzzConfig::default());
    let elapsed = start.elapsed();
    assert!(report.pass, "violations: {:?}", report.violations);
    let r = &report.residuals;
    assert!(r.cost_relation <= RESIDUAL_TOL);
    assert!(r.speed_cost_individual <= RESIDUAL_TOL);
    assert!(r.speed_chain_violation <= RESIDUAL_TOL);
    assert!(r.collective_margin_min > 0.0);
    assert!(r.dim2_equality <= RESIDUAL_TOL);
    assert!(r.middle_level_gap <= RESIDUAL_TOL);
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}");
    println!(
        "acceptance 4 (relation suite, 200 frames x alpha {{1,2,4}}): PASS \
         (max identity residual {:.2e}, min margin {:.2e}, {elapsed:?})",
        r.cost_relation.max(r.speed_cost_individual),
        r.collective_margin_min
    );
}

#[test]
fn acceptance_05_transitionless_verification_by_propagation() {
    let p = reference_params();
    let traj = lz3_trajectory(&p);
    let steps = 20_000;

    let collective = propagate_levels(&traj, Some(DriveProtocol::Collective), steps, 1).unwrap();
    let collective = tracking_fidelity(&collective, &traj).unwrap();
    for n in 0..3 {
        assert!(
            collective.min_fidelity[n] >= 1.0 - 1e-8,
            "collective level {n}: {}",
            collective.min_fidelity[n]
        );
    }

    let bare = propagate_levels(&traj, None, steps, 1).unwrap();
    let bare = tracking_fidelity(&bare, &traj).unwrap();
    // The fast sweep is strongly nonadiabatic: the frozen state falls out of
    // the middle branch at the crossing. Its fidelity then recovers on the
    // far side (the branch reconnects to m = 0), so the discriminating
    // brute-forced quantities are the minimum and the pinned final value.
    let bare_middle_min = bare.min_fidelity[1];
    let bare_middle_final = *bare.fidelities[1].last().unwrap();
    assert!(bare_middle_min < 0.9, "bare middle min {bare_middle_min}");
    assert!(
        (bare_middle_final - 0.978_552_325_581_9).abs() < 1e-8,
        "bare middle final {bare_middle_final:.13}"
    );

    let individual = propagate_levels(&traj, Some(DriveProtocol::Individual(2)), steps, 1).unwrap();
    let individual = tracking_fidelity(&individual, &traj).unwrap();
    assert!(
        individual.min_fidelity[2] >= 1.0 - 1e-8,
        "driven top level: {}",
        individual.min_fidelity[2]
    );
    assert!(
        individual.min_fidelity[1] < 0.9,
        "undriven middle level: {}",
        individual.min_fidelity[1]
    );
    println!(
        "acceptance 5 (propagation): PASS (collective min {:.2e} below 1, bare middle \
         min {bare_middle_min:.4} / final {bare_middle_final:.6}, individual(+1) middle min {:.4})",
        1.0 - collective.min_fidelity.iter().cloned().fold(f64::INFINITY, f64::min),
        individual.min_fidelity[1]
    );
}

#[test]
fn acceptance_06_metric_matches_fidelity_expansion() {
    let p = reference_params();
    let traj = lz3_trajectory(&p);
    let ens = canonical_populations(&traj, 0.5, p.kappa).unwrap();
    let dt = 1e-5 * p.tau;
    let mut worst = 0.0_f64;
    // Central window: outside it 1 - F drops below ~1e-13 and the comparison
    // would measure f64 roundoff, not physics.
    for k in 0..20 {
        let t = (0.3 + 0.4 * k as f64 / 19.0) * p.tau;
        let frame = spectral_frame(&traj, t).unwrap();
        let g = fisher_metric_spectral(&ens.populations, &[0.0; 3], &frame.couplings).unwrap();
        let rho_t = density_from_populations(
            &hermitian_eig(&traj.h_at(t).unwrap()).unwrap(),
            &ens.populations,
        );
        let rho_dt = density_from_populations(
            &hermitian_eig(&traj.h_at(t + dt).unwrap()).unwrap(),
            &ens.populations,
        );
        let f = uhlmann_fidelity(&rho_t, &rho_dt).unwrap();
        let g_fid = 2.0 * (1.0 - f) / (dt * dt);
        worst = worst.max((g_fid - g).abs() / g);
    }
    assert!(worst <= 1e-3, "metric vs fidelity: {worst:.3e}");
    println!("acceptance 6 (metric-fidelity oracle, 20 points): PASS (worst {worst:.2e})");
}

#[test]
fn acceptance_07_peak_cost_scaling() {
    let fit_slope = |points: &[(f64, f64)]| {
        let n = points.len() as f64;
        let sx: f64 = points.iter().map(|(x, _)| x).sum();
        let sy: f64 = points.iter().map(|(_, y)| y).sum();
        let sxx: f64 = points.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = points.iter().map(|(x, y)| x * y).sum();
        (n * sxy - sx * sy) / (n * sxx - sx * sx)
    };
    let peak = |p: &Lz3Params| -> f64 {
        evaluate_sweep(p, 0.5, 400)
            .unwrap()
            .iter()
            .map(|r| r.cost.collective_rate)
            .fold(0.0, f64::max)
    };

    let grid = [0.1, 1.0, 10.0, 100.0];
    let tau_points: Vec<(f64, f64)> = grid
        .iter()
        .map(|&tau| {
            let p = Lz3Params::new(0.1, 1.0, tau, 2.0).unwrap();
            (tau.ln(), peak(&p).ln())
        })
        .collect();
    let tau_slope = fit_slope(&tau_points);
    assert!(
        (tau_slope + 2.0).abs() <= 0.01,
        "peak cost vs tau slope {tau_slope}"
    );

    let delta_points: Vec<(f64, f64)> = grid
        .iter()
        .map(|&ratio| {
            let p = Lz3Params::new(ratio, 1.0, 0.1, 2.0).unwrap();
            (ratio.ln(), peak(&p).ln())
        })
        .collect();
    let delta_slope = fit_slope(&delta_points);
    assert!(
        (delta_slope + 2.0).abs() <= 0.01,
        "peak cost vs delta slope {delta_slope}"
    );
    println!(
        "acceptance 7 (peak scaling): PASS (slope vs tau {tau_slope:.4}, vs delta {delta_slope:.4})"
    );
}

#[test]
fn acceptance_08_rotating_frame_route() {
    let start = Instant::now();
    let lz = reference_params();

    let deficit = |ratio: f64, steps: usize| {
        let sched = synthesize_pulse(&NvParams::desk_scale(ratio, 1.0).unwrap(), &lz).unwrap();
        let report = verify_lab_protocol(&sched, steps, 50).unwrap();
        1.0 - report
            .min_fidelity
            .iter()
            .cloned()
            .fold(f64::INFINITY, f64::min)
    };
    // Step density matched so integrator error stays well below the RWA error.
    let d200 = deficit(200.0, 20_000);
    let d400 = deficit(400.0, 40_000);
    assert!(d200 <= 1e-2, "deficit at ratio 200: {d200:.3e}");
    assert!(d400 < d200, "no RWA convergence: {d200:.3e} -> {d400:.3e}");

    let sched = synthesize_pulse(&NvParams::desk_scale(200.0, 1.0).unwrap(), &lz).unwrap();
    let overlap = exact_transform_consistency(&sched, 100_000).unwrap();
    assert!(overlap >= 1.0 - 1e-8, "exact-transform overlap {overlap}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "acceptance 8 (rotating-frame route): PASS \
         (deficit {d200:.2e} -> {d400:.2e}, exact overlap 1-{:.1e}, {elapsed:?})",
        1.0 - overlap
    );
}

#[test]
fn acceptance_09_byte_identical_reruns() {
    let bin = env!("CARGO_BIN_EXE_ctdrive");
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"samples": 201, "rk4_steps": 4000, "seed": 7}"#,
    )
    .unwrap();

    for scenario in ["fig1", "fig2a", "fuzz", "nv-pulse"] {
        let mut outputs: Vec<Vec<u8>> = Vec::new();
        for run in 0..2 {
            let out = dir.path().join(format!("{scenario}_{run}.out"));
            let status = Command::new(bin)
                .arg(scenario)
                .arg("--config")
                .arg(&config)
                .arg("--out")
                .arg(&out)
                .current_dir(dir.path())
                .status()
                .unwrap();
            assert!(status.success(), "{scenario} run {run} failed");
            let mut bytes = std::fs::read(&out).unwrap();
            // nv-pulse writes a second table; fold it into the comparison.
            let extra = dir.path().join(format!("{scenario}_{run}_tracking.out"));
            if extra.exists() {
                bytes.extend(std::fs::read(&extra).unwrap());
            }
            outputs.push(bytes);
        }
        assert_eq!(
            outputs[0], outputs[1],
            "{scenario}: reruns differ at the byte level"
        );
    }
    println!("acceptance 9 (determinism): PASS (fig1, fig2a, fuzz, nv-pulse byte-identical)");
}
