//! Scalar analytics of counterdiabatic driving: cost rates and their
//! collective/individual relation, Fubini-Study and quantum-Fisher metrics,
//! evolution speeds, speed-cost relations, canonical ensembles, and the
//! Uhlmann-fidelity oracle.
//!
//! Internal convention: hbar = 1. With the parallel-transport gauge of
//! `adiabatic`, every formula reduces to sums of squared coupling magnitudes
//! g_n = sum_{m != n} |c(m, n)|^2:
//!
//!   collective rate  dC/dt  = (sum_n g_n)^(alpha/2)
//!   individual rate  dC_n/dt = (2 g_n)^(alpha/2)
//!   pure-state metric g_n, speed v_n = sqrt(g_n)
//!   ensemble metric  g_rho = (1/2) sum_{m != n} (p_m - p_n)^2/(p_m + p_n) |c(m,n)|^2
//!
//! which makes the cost relation dC/dt = [ (1/2) sum_n (dC_n/dt)^(2/alpha) ]^(alpha/2)
//! an identity and the speed chain v <= sqrt(sum_n p_n v_n^2) <= max_n v_n
//! explicit.

use num_complex::Complex64 as C64;

use crate::adiabatic::SpectralFrame;
use crate::cdrive::DriveProtocol;
use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, hermitian_eig, vec_norm, ComplexMatrix, EigenSystem, HermitianOperator};
use crate::model::HamiltonianTrajectory;
use crate::parallel;

/// Populations below this are dropped from metric sums; their weighted terms
/// vanish in exact arithmetic and keeping them risks 0/0.
pub const POPULATION_FLOOR: f64 = 1e-15;

/// Instantaneous cost rates at one frame.
#[derive(Debug, Clone)]
pub struct CostReport {
    pub t: f64,
    pub alpha: f64,
    /// dC/dt for collective driving.
    pub collective_rate: f64,
    /// dC_n/dt per ascending level.
    pub individual_rates: Vec<f64>,
}

/// Instantaneous speeds at one frame.
#[derive(Debug, Clone)]
pub struct SpeedReport {
    pub t: f64,
    /// Eigenstate speeds v_n = sqrt(g_n), ascending level order.
    pub v_n: Vec<f64>,
    /// Ensemble speed v = sqrt(g_rho).
    pub v: f64,
    pub populations: Vec<f64>,
}

/// Stationary populations, either Gibbs-distributed over the initial spectrum
/// or supplied directly.
#[derive(Debug, Clone)]
pub struct CanonicalEnsemble {
    /// hbar*kappa/(kT) when Gibbs-constructed; None for hand-built populations.
    pub beta_scaled: Option<f64>,
    /// Populations in ascending energy order; sum to 1.
    pub populations: Vec<f64>,
}

impl CanonicalEnsemble {
    /// Gibbs weights exp(-E_n * beta_scaled / energy_scale) over the supplied
    /// (ascending) energies, normalized. `energy_scale` is hbar*kappa, the
    /// unit the dimensionless beta refers to.
    pub fn gibbs(energies: &[f64], beta_scaled: f64, energy_scale: f64) -> Result<Self> {
        if beta_scaled.is_nan() || beta_scaled < 0.0 {
            return Err(Error::InvalidParameter {
                name: "beta_scaled",
                value: beta_scaled,
                constraint: "must be >= 0",
            });
        }
        crate::model::require_positive("energy_scale", energy_scale, "must be > 0")?;
        // Shift by the ground energy so large beta underflows gracefully
        // toward the ground state instead of overflowing.
        let e0 = energies.iter().cloned().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = energies
            .iter()
            .map(|&e| (-(e - e0) * beta_scaled / energy_scale).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        Ok(Self {
            beta_scaled: Some(beta_scaled),
            populations: weights.into_iter().map(|w| w / z).collect(),
        })
    }

    pub fn from_populations(populations: Vec<f64>) -> Result<Self> {
        let sum: f64 = populations.iter().sum();
        if populations.iter().any(|&p| p < 0.0) || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidState {
                reason: format!("populations must be nonnegative and sum to 1 (sum = {sum})"),
            });
        }
        Ok(Self {
            beta_scaled: None,
            populations,
        })
    }

    pub fn dim(&self) -> usize {
        self.populations.len()
    }
}

/// Sum of squared coupling magnitudes into level n.
fn metric_from_couplings(couplings: &ComplexMatrix, n: usize) -> f64 {
    (0..couplings.dim())
        .filter(|&m| m != n)
        .map(|m| couplings[(m, n)].norm_sqr())
        .sum()
}

/// ||H^A||^alpha for a prebuilt auxiliary operator.
pub fn cost_rate_from_operator(ha: &HermitianOperator, alpha: f64) -> f64 {
    frobenius_norm(ha.matrix()).powf(alpha)
}

/// Collective cost rate (sum_n g_n)^(alpha/2).
pub fn collective_cost_rate(frame: &SpectralFrame, alpha: f64) -> f64 {
    let total: f64 = (0..frame.dim())
        .map(|n| metric_from_couplings(&frame.couplings, n))
        .sum();
    total.powf(alpha / 2.0)
}

/// Individual cost rate (2 g_n)^(alpha/2) for the ascending level n.
pub fn individual_cost_rate(frame: &SpectralFrame, n: usize, alpha: f64) -> f64 {
    assert!(n < frame.dim(), "level {n} out of range");
    (2.0 * metric_from_couplings(&frame.couplings, n)).powf(alpha / 2.0)
}

/// All cost rates of a frame in one report.
pub fn cost_report(frame: &SpectralFrame, alpha: f64) -> CostReport {
    CostReport {
        t: frame.t,
        alpha,
        collective_rate: collective_cost_rate(frame, alpha),
        individual_rates: (0..frame.dim())
            .map(|n| individual_cost_rate(frame, n, alpha))
            .collect(),
    }
}

/// Residual of the collective/individual cost relation
/// dC/dt - [ (1/2) sum_n (dC_n/dt)^(2/alpha) ]^(alpha/2); an identity, so the
/// result should vanish to roundoff for any frame and alpha.
pub fn cost_relation_residual(report: &CostReport) -> f64 {
    let a = report.alpha;
    let inner: f64 = report
        .individual_rates
        .iter()
        .map(|r| r.powf(2.0 / a))
        .sum::<f64>()
        / 2.0;
    report.collective_rate - inner.powf(a / 2.0)
}

/// Gap of the equality condition for level k:
/// dC_k/dt - [ sum_{n != k} (dC_n/dt)^(2/alpha) ]^(alpha/2).
/// Zero exactly when driving level k individually costs as much as driving
/// everything.
pub fn equality_condition_gap(report: &CostReport, k: usize) -> f64 {
    assert!(k < report.individual_rates.len(), "level {k} out of range");
    let a = report.alpha;
    let others: f64 = report
        .individual_rates
        .iter()
        .enumerate()
        .filter(|(n, _)| *n != k)
        .map(|(_, r)| r.powf(2.0 / a))
        .sum();
    report.individual_rates[k] - others.powf(a / 2.0)
}

/// Fubini-Study metric g_n of the ascending level n, evaluated in the
/// gauge-invariant form sum_{m != n} |c(m, n)|^2.
pub fn fubini_study_metric(frame: &SpectralFrame, n: usize) -> f64 {
    assert!(n < frame.dim(), "level {n} out of range");
    metric_from_couplings(&frame.couplings, n)
}

/// Pure-state metric from a state and its time derivative:
/// g = <dphi_perp|dphi_perp> with the component along phi projected out.
pub fn pure_state_metric(phi: &[C64], dphi: &[C64]) -> Result<f64> {
    if phi.len() != dphi.len() {
        return Err(Error::DimensionMismatch {
            left: phi.len(),
            right: dphi.len(),
        });
    }
    let norm = vec_norm(phi);
    if (norm - 1.0).abs() > 1e-10 {
        return Err(Error::UnnormalizedState { norm });
    }
    let overlap = crate::linalg::inner(phi, dphi);
    let perp_sq: f64 = dphi
        .iter()
        .zip(phi.iter())
        .map(|(d, p)| (d - overlap * p).norm_sqr())
        .sum();
    Ok(perp_sq)
}

/// Quantum Fisher information metric in spectral form:
/// (1/4) sum_j (dp_j)^2 / p_j
///   + (1/2) sum_{j != l} (p_j - p_l)^2 / (p_j + p_l) |c(j, l)|^2.
///
/// The classical term is kept even though transitionless driving freezes the
/// populations, so the reduction to the coupling-only form is a tested code
/// path rather than an assumption.
pub fn fisher_metric_spectral(
    p: &[f64],
    dp: &[f64],
    couplings: &ComplexMatrix,
) -> Result<f64> {
    let n = p.len();
    if dp.len() != n || couplings.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: dp.len().max(couplings.dim()),
        });
    }
    debug_assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-9);
    debug_assert!(dp.iter().sum::<f64>().abs() < 1e-9);

    let mut classical = 0.0;
    for j in 0..n {
        if p[j] <= POPULATION_FLOOR {
            if dp[j] != 0.0 {
                return Err(Error::PopulationBoundary {
                    level: j,
                    population: p[j],
                });
            }
            continue;
        }
        classical += dp[j] * dp[j] / p[j];
    }

    let mut quantum = 0.0;
    for j in 0..n {
        for l in 0..n {
            if j == l || p[j] + p[l] <= POPULATION_FLOOR {
                continue;
            }
            let w = (p[j] - p[l]).powi(2) / (p[j] + p[l]);
            quantum += w * couplings[(j, l)].norm_sqr();
        }
    }
    Ok(0.25 * classical + 0.5 * quantum)
}

/// Ensemble and per-level speeds of a frame under stationary populations.
pub fn ensemble_speed(frame: &SpectralFrame, ensemble: &CanonicalEnsemble) -> SpeedReport {
    assert_eq!(
        ensemble.dim(),
        frame.dim(),
        "ensemble/frame dimension mismatch"
    );
    let dp = vec![0.0; frame.dim()];
    let g_rho = fisher_metric_spectral(&ensemble.populations, &dp, &frame.couplings)
        .expect("zero dp cannot hit the population boundary");
    let v_n: Vec<f64> = (0..frame.dim())
        .map(|n| fubini_study_metric(frame, n).sqrt())
        .collect();
    let v = g_rho.sqrt();
    let bound = v_n
        .iter()
        .zip(ensemble.populations.iter())
        .map(|(vn, p)| p * vn * vn)
        .sum::<f64>()
        .sqrt();
    assert!(v <= bound + 1e-10, "speed chain violated: {v} > {bound}");
    SpeedReport {
        t: frame.t,
        v_n,
        v,
        populations: ensemble.populations.clone(),
    }
}

/// Gibbs populations over the spectrum of H at the start of the trajectory.
/// `energy_scale` is hbar*kappa, the energy unit beta_scaled refers to.
pub fn canonical_populations(
    traj: &HamiltonianTrajectory,
    beta_scaled: f64,
    energy_scale: f64,
) -> Result<CanonicalEnsemble> {
    let t0 = traj.t_span().0;
    let eigs = hermitian_eig(&traj.h_at(t0)?)?;
    CanonicalEnsemble::gibbs(&eigs.values, beta_scaled, energy_scale)
}

/// Residual of the individual speed-cost relation
/// v_n - (dC_n/dt)^(1/alpha) / sqrt(2); vanishes identically.
pub fn speed_cost_check_individual(frame: &SpectralFrame, n: usize, alpha: f64) -> f64 {
    let v_n = fubini_study_metric(frame, n).sqrt();
    v_n - individual_cost_rate(frame, n, alpha).powf(1.0 / alpha) / 2.0_f64.sqrt()
}

/// Margin of the collective speed-cost inequality
/// (dC/dt)^(1/alpha) - v; strictly positive whenever any coupling is nonzero.
pub fn speed_cost_check_collective(
    frame: &SpectralFrame,
    ensemble: &CanonicalEnsemble,
    alpha: f64,
) -> f64 {
    let v = ensemble_speed(frame, ensemble).v;
    collective_cost_rate(frame, alpha).powf(1.0 / alpha) - v
}

/// Accumulated driving cost over the trajectory span by composite Simpson
/// quadrature with `steps` intervals (rounded up to even).
pub fn cost_integral(
    traj: &HamiltonianTrajectory,
    protocol: DriveProtocol,
    alpha: f64,
    steps: usize,
) -> Result<f64> {
    if steps < 2 {
        return Err(Error::TooFewSteps { steps, min: 2 });
    }
    let steps = steps + steps % 2;
    let (t0, t1) = traj.t_span();
    let h = (t1 - t0) / steps as f64;

    let rates = parallel::try_map_indexed(steps + 1, |i| {
        let t = t0 + (t1 - t0) * (i as f64 / steps as f64);
        let frame = crate::adiabatic::spectral_frame(traj, t)?;
        Ok(match protocol {
            DriveProtocol::Collective => collective_cost_rate(&frame, alpha),
            DriveProtocol::Individual(n) => {
                if n >= frame.dim() {
                    return Err(Error::LevelOutOfRange {
                        level: n,
                        dim: frame.dim(),
                    });
                }
                individual_cost_rate(&frame, n, alpha)
            }
        })
    })?;

    // Fixed-order summation keeps the result identical with and without the
    // parallel feature.
    let mut acc = rates[0] + rates[steps];
    for (i, r) in rates.iter().enumerate().take(steps).skip(1) {
        acc += if i % 2 == 1 { 4.0 * r } else { 2.0 * r };
    }
    Ok(acc * h / 3.0)
}

/// Density matrix sum_n p_n |n><n| over an eigenbasis.
pub fn density_from_populations(eigs: &EigenSystem, populations: &[f64]) -> ComplexMatrix {
    assert_eq!(eigs.dim(), populations.len());
    let n = eigs.dim();
    let mut rho = ComplexMatrix::zeros(n);
    for (k, &p) in populations.iter().enumerate() {
        if p == 0.0 {
            continue;
        }
        let v = eigs.eigenvector(k);
        for i in 0..n {
            for j in 0..n {
                rho[(i, j)] += C64::new(p, 0.0) * v[i] * v[j].conj();
            }
        }
    }
    rho
}

/// Uhlmann fidelity F(rho, sigma) = tr sqrt( sqrt(rho) sigma sqrt(rho) ).
///
/// Both arguments must be positive semidefinite with unit trace; eigenvalues
/// below -1e-12 are rejected, small negatives from roundoff are clamped.
pub fn uhlmann_fidelity(rho: &ComplexMatrix, sigma: &ComplexMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            left: rho.dim(),
            right: sigma.dim(),
        });
    }
    let sqrt_rho = psd_sqrt(rho)?;
    validate_density(sigma)?;
    let m = sqrt_rho.matmul(sigma).matmul(&sqrt_rho);
    let eigs = hermitian_eig(&HermitianOperator::symmetrized(m))?;
    let mut f = 0.0;
    for &lambda in &eigs.values {
        if lambda < -1e-12 {
            return Err(Error::InvalidState {
                reason: format!("fidelity kernel has negative eigenvalue {lambda:.3e}"),
            });
        }
        f += lambda.max(0.0).sqrt();
    }
    Ok(f)
}

fn validate_density(rho: &ComplexMatrix) -> Result<EigenSystem> {
    let op = HermitianOperator::new(rho.clone()).map_err(|_| Error::InvalidState {
        reason: "density matrix is not Hermitian".into(),
    })?;
    let tr = rho.trace();
    if (tr.re - 1.0).abs() > 1e-10 || tr.im.abs() > 1e-10 {
        return Err(Error::InvalidState {
            reason: format!("density matrix trace {tr} != 1"),
        });
    }
    let eigs = hermitian_eig(&op)?;
    if let Some(&lambda) = eigs.values.first() {
        if lambda < -1e-12 {
            return Err(Error::InvalidState {
                reason: format!("density matrix has negative eigenvalue {lambda:.3e}"),
            });
        }
    }
    Ok(eigs)
}

fn psd_sqrt(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eigs = validate_density(rho)?;
    let n = rho.dim();
    let mut d = ComplexMatrix::zeros(n);
    for (k, &lambda) in eigs.values.iter().enumerate() {
        d[(k, k)] = C64::new(lambda.max(0.0).sqrt(), 0.0);
    }
    Ok(eigs.vectors.matmul(&d).matmul(&eigs.vectors.adjoint()))
}
