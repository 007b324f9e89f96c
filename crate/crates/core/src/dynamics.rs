//! Schroedinger propagation under the driven Hamiltonian and eigenstate
//! tracking diagnostics.
//!
//! Integration is fixed-step classical fourth-order Runge-Kutta on
//! d/dt psi = -i H(t) psi. Fixed steps keep the CSV outputs bit-reproducible;
//! the right-hand sides here are smooth and bounded, so adaptivity buys
//! nothing. The norm is monitored, never renormalized: drift is the error
//! signal for a too-coarse step.

use num_complex::Complex64 as C64;

use crate::cdrive::{total_hamiltonian, DriveProtocol};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inner, vec_norm, HermitianOperator};
use crate::model::HamiltonianTrajectory;
use crate::costspeed::SpeedReport;

/// Hard error threshold on |norm - 1| during propagation.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;

/// Minimum RK4 step count.
pub const MIN_STEPS: usize = 100;

/// A propagated state sampled along the trajectory.
#[derive(Debug, Clone)]
pub struct StateTrajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<C64>>,
    /// Recorded norms, for drift inspection.
    pub norms: Vec<f64>,
}

impl StateTrajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_state(&self) -> &[C64] {
        self.states.last().expect("trajectory never empty")
    }
}

/// Per-level overlap magnitudes |<n_t|psi_n(t)>| over a sweep.
#[derive(Debug, Clone)]
pub struct TrackingReport {
    pub times: Vec<f64>,
    /// fidelities[level][sample index].
    pub fidelities: Vec<Vec<f64>>,
    /// Minimum of each level's fidelity over the sweep.
    pub min_fidelity: Vec<f64>,
}

/// Propagate `psi0` under H(t) plus the protocol's auxiliary field (`None`
/// runs the bare Hamiltonian), recording every `record_stride`-th step.
pub fn propagate_recording(
    traj: &HamiltonianTrajectory,
    protocol: Option<DriveProtocol>,
    psi0: &[C64],
    steps: usize,
    record_stride: usize,
) -> Result<StateTrajectory> {
    if steps < MIN_STEPS {
        return Err(Error::TooFewSteps {
            steps,
            min: MIN_STEPS,
        });
    }
    let stride = record_stride.max(1);
    if psi0.len() != traj.dim() {
        return Err(Error::DimensionMismatch {
            left: psi0.len(),
            right: traj.dim(),
        });
    }
    let norm0 = vec_norm(psi0);
    if (norm0 - 1.0).abs() > 1e-10 {
        return Err(Error::UnnormalizedState { norm: norm0 });
    }

    let (t0, t1) = traj.t_span();
    let span = t1 - t0;
    let dt = span / steps as f64;
    let time_at = |i: usize| t0 + span * (i as f64 / steps as f64);

    let ham = |t: f64| -> Result<HermitianOperator> {
        match protocol {
            None => traj.h_at(t),
            Some(p) => total_hamiltonian(traj, p, t),
        }
    };

    let mut psi = psi0.to_vec();
    let mut out = StateTrajectory {
        times: vec![t0],
        states: vec![psi.clone()],
        norms: vec![norm0],
    };

    let mut h_start = ham(t0)?;
    for i in 0..steps {
        let t = time_at(i);
        let h_mid = ham(t + 0.5 * dt)?;
        let h_end = ham(time_at(i + 1))?;

        let k1 = apply_neg_i(&h_start, &psi);
        let k2 = apply_neg_i(&h_mid, &axpy(&psi, 0.5 * dt, &k1));
        let k3 = apply_neg_i(&h_mid, &axpy(&psi, 0.5 * dt, &k2));
        let k4 = apply_neg_i(&h_end, &axpy(&psi, dt, &k3));

        for j in 0..psi.len() {
            psi[j] += dt / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]);
        }
        h_start = h_end;

        let norm = vec_norm(&psi);
        let drift = (norm - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(Error::NormDrift {
                t: time_at(i + 1),
                drift,
            });
        }
        if (i + 1) % stride == 0 || i + 1 == steps {
            out.times.push(time_at(i + 1));
            out.states.push(psi.clone());
            out.norms.push(norm);
        }
    }
    Ok(out)
}

/// Propagate recording every step.
pub fn propagate(
    traj: &HamiltonianTrajectory,
    protocol: Option<DriveProtocol>,
    psi0: &[C64],
    steps: usize,
) -> Result<StateTrajectory> {
    propagate_recording(traj, protocol, psi0, steps, 1)
}

fn apply_neg_i(h: &HermitianOperator, psi: &[C64]) -> Vec<C64> {
    let mut v = h.matrix().matvec(psi);
    for x in v.iter_mut() {
        *x *= C64::new(0.0, -1.0);
    }
    v
}

fn axpy(x: &[C64], a: f64, y: &[C64]) -> Vec<C64> {
    x.iter().zip(y.iter()).map(|(xi, yi)| xi + a * yi).collect()
}

/// Overlap of each propagated branch with its instantaneous eigenvector.
///
/// `trajectories[n]` must be the run started from the ascending level n of
/// H(t0); all runs must share the same recording grid. Branch assignment by
/// ascending eigenvalue is continuous because the supported trajectories never
/// cross levels.
pub fn tracking_fidelity(
    trajectories: &[StateTrajectory],
    traj: &HamiltonianTrajectory,
) -> Result<TrackingReport> {
    let dim = traj.dim();
    if trajectories.len() != dim {
        return Err(Error::DimensionMismatch {
            left: trajectories.len(),
            right: dim,
        });
    }
    let times = trajectories[0].times.clone();
    for st in trajectories {
        if st.times != times {
            return Err(Error::InvalidState {
                reason: "state trajectories have mismatched time grids".into(),
            });
        }
    }

    let overlaps = crate::parallel::try_map_indexed(times.len(), |k| {
        let eigs = hermitian_eig(&traj.h_at(times[k])?)?;
        let mut row = Vec::with_capacity(dim);
        for (n, st) in trajectories.iter().enumerate() {
            row.push(inner(&eigs.eigenvector(n), &st.states[k]).norm());
        }
        Ok::<Vec<f64>, Error>(row)
    })?;

    let mut fidelities = vec![Vec::with_capacity(times.len()); dim];
    for row in &overlaps {
        for (n, &f) in row.iter().enumerate() {
            fidelities[n].push(f);
        }
    }
    let min_fidelity = fidelities
        .iter()
        .map(|f| f.iter().cloned().fold(f64::INFINITY, f64::min))
        .collect();
    Ok(TrackingReport {
        times,
        fidelities,
        min_fidelity,
    })
}

/// Time-averaged ensemble speed by trapezoidal quadrature over the reports.
pub fn average_speed(reports: &[SpeedReport]) -> f64 {
    assert!(reports.len() >= 2, "need at least two samples");
    let mut acc = 0.0;
    for w in reports.windows(2) {
        acc += 0.5 * (w[0].v + w[1].v) * (w[1].t - w[0].t);
    }
    acc / (reports.last().unwrap().t - reports[0].t)
}
