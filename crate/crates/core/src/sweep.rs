//! Batch evaluation of cost and speed reports over a sweep, the data-parallel
//! workhorse behind the CLI scenarios and the benchmarks. Sample points are
//! independent eigenproblems, so they map cleanly over a thread pool; results
//! are collected in grid order to keep output deterministic.

use crate::adiabatic::spectral_frame;
use crate::cdrive::DriveProtocol;
use crate::costspeed::{canonical_populations, cost_report, ensemble_speed, CanonicalEnsemble, CostReport, SpeedReport};
use crate::dynamics::{propagate_recording, StateTrajectory};
use crate::error::{Error, Result};
use crate::linalg::hermitian_eig;
use crate::model::{linear_sweep, lz3_counterdiabatic_field, lz3_trajectory, HamiltonianTrajectory, Lz3Params};
use crate::parallel;

/// One sweep sample: control field, counterdiabatic field, and the full cost
/// and speed reports at that instant.
#[derive(Debug, Clone)]
pub struct SweepSample {
    pub t: f64,
    pub lambda: f64,
    /// Counterdiabatic field amplitude V(t).
    pub v_field: f64,
    pub cost: CostReport,
    pub speed: SpeedReport,
}

/// Uniform sample times over [0, tau], endpoints included.
pub fn sweep_times(tau: f64, samples: usize) -> Vec<f64> {
    assert!(samples >= 2, "need at least two samples");
    (0..samples)
        .map(|i| tau * (i as f64 / (samples - 1) as f64))
        .collect()
}

/// Evaluate one sample of the swept three-level model.
pub fn sweep_point(p: &Lz3Params, ensemble: &CanonicalEnsemble, t: f64) -> Result<SweepSample> {
    let traj = lz3_trajectory(p);
    let frame = spectral_frame(&traj, t)?;
    Ok(SweepSample {
        t,
        lambda: linear_sweep(p, t).0,
        v_field: lz3_counterdiabatic_field(p, t),
        cost: cost_report(&frame, p.alpha),
        speed: ensemble_speed(&frame, ensemble),
    })
}

/// Evaluate a full sweep with Gibbs populations at inverse temperature
/// `beta_scaled` (in units of hbar*kappa). Samples run in parallel when the
/// `parallel` feature is on; the output order is the grid order either way.
pub fn evaluate_sweep(
    p: &Lz3Params,
    beta_scaled: f64,
    samples: usize,
) -> Result<Vec<SweepSample>> {
    if samples < 2 {
        return Err(Error::TooFewSteps {
            steps: samples,
            min: 2,
        });
    }
    let traj = lz3_trajectory(p);
    let ensemble = canonical_populations(&traj, beta_scaled, p.kappa)?;
    let times = sweep_times(p.tau, samples);
    parallel::try_map_indexed(samples, |i| sweep_point(p, &ensemble, times[i]))
}

/// Propagate every eigenlevel of H(t0) under one protocol (`None` = bare),
/// one run per level, in parallel. Runs share the recording grid, so the
/// result feeds straight into [`crate::dynamics::tracking_fidelity`].
pub fn propagate_levels(
    traj: &HamiltonianTrajectory,
    protocol: Option<DriveProtocol>,
    steps: usize,
    record_stride: usize,
) -> Result<Vec<StateTrajectory>> {
    let eigs0 = hermitian_eig(&traj.h_at(traj.t_span().0)?)?;
    parallel::try_map_indexed(traj.dim(), |n| {
        propagate_recording(traj, protocol, &eigs0.eigenvector(n), steps, record_stride)
    })
}
