//! Instantaneous spectral tracking along a trajectory: eigen-frames and the
//! tangent couplings <m_t|d/dt n_t> that feed every cost and speed formula.
//!
//! Couplings are evaluated through the nondegenerate perturbation identity
//! <m_t|d/dt n_t> = <m_t|dH/dt|n_t> / (E_n - E_m), which is free of both phase
//! conventions and step sizes. The parallel-transport gauge is canonical here:
//! diagonal couplings are fixed to zero, and all downstream expressions use
//! only the gauge-invariant off-diagonal magnitudes.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{frobenius_norm, hermitian_eig, inner, ComplexMatrix, EigenSystem, HermitianOperator};
use crate::model::HamiltonianTrajectory;

/// Minimum spectral gap, relative to ||H||_F, below which the counterdiabatic
/// construction is treated as singular.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// One instantaneous eigen-frame with its tangent couplings.
#[derive(Debug, Clone)]
pub struct SpectralFrame {
    pub t: f64,
    pub eigs: EigenSystem,
    /// Entry (m, n) = <m_t|d/dt n_t> for m != n; the diagonal is exactly zero
    /// (parallel-transport gauge). Anti-Hermitian.
    pub couplings: ComplexMatrix,
    /// Smallest gap between adjacent eigenvalues.
    pub min_gap: f64,
}

impl SpectralFrame {
    pub fn dim(&self) -> usize {
        self.eigs.dim()
    }
}

/// Tangent couplings of an eigensystem under the generator dH/dt.
pub fn couplings_from_eigensystem(
    eigs: &EigenSystem,
    dh: &HermitianOperator,
) -> Result<ComplexMatrix> {
    let n = eigs.dim();
    if dh.dim() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: dh.dim(),
        });
    }
    // dH rotated into the eigenbasis: W = V^dag (dH) V.
    let w = eigs
        .vectors
        .adjoint()
        .matmul(dh.matrix())
        .matmul(&eigs.vectors);
    let mut c = ComplexMatrix::zeros(n);
    for m in 0..n {
        for j in 0..n {
            if m == j {
                continue;
            }
            c[(m, j)] = w[(m, j)] / (eigs.values[j] - eigs.values[m]);
        }
    }
    Ok(c)
}

/// Build a frame directly from a Hamiltonian and its time derivative.
pub fn frame_from_operators(
    h: &HermitianOperator,
    dh: &HermitianOperator,
    t: f64,
) -> Result<SpectralFrame> {
    let eigs = hermitian_eig(h)?;
    let min_gap = eigs.min_gap();
    let threshold = DEGENERACY_TOL * frobenius_norm(h.matrix());
    if eigs.dim() > 1 && min_gap <= threshold {
        return Err(Error::DegenerateSpectrum { min_gap, threshold });
    }
    let couplings = couplings_from_eigensystem(&eigs, dh)?;
    Ok(SpectralFrame {
        t,
        eigs,
        couplings,
        min_gap,
    })
}

/// Spectral frame of a trajectory at time t.
pub fn spectral_frame(traj: &HamiltonianTrajectory, t: f64) -> Result<SpectralFrame> {
    frame_from_operators(&traj.h_at(t)?, &traj.dh_at(t)?, t)
}

/// Independent finite-difference oracle for the couplings: differentiates the
/// eigenvectors at t +/- dt after aligning each branch's phase to the frame at
/// t (overlap made real positive). Converges to [`spectral_frame`] as dt -> 0;
/// the diagonal is zeroed to match the parallel-transport gauge.
pub fn fd_coupling_oracle(
    traj: &HamiltonianTrajectory,
    t: f64,
    dt: f64,
) -> Result<ComplexMatrix> {
    let center = spectral_frame(traj, t)?;
    let n = center.dim();
    let plus = hermitian_eig(&traj.h_at(t + dt)?)?;
    let minus = hermitian_eig(&traj.h_at(t - dt)?)?;

    let aligned = |sys: &EigenSystem, k: usize| -> Result<Vec<C64>> {
        let v = sys.eigenvector(k);
        let overlap = inner(&center.eigs.eigenvector(k), &v);
        if overlap.norm() < 0.5 {
            return Err(Error::BranchMistracked {
                overlap: overlap.norm(),
            });
        }
        let phase = overlap.conj() / overlap.norm();
        Ok(v.into_iter().map(|x| x * phase).collect())
    };

    let mut c = ComplexMatrix::zeros(n);
    for k in 0..n {
        let vp = aligned(&plus, k)?;
        let vm = aligned(&minus, k)?;
        let deriv: Vec<C64> = vp
            .iter()
            .zip(vm.iter())
            .map(|(a, b)| (a - b) / C64::new(2.0 * dt, 0.0))
            .collect();
        for m in 0..n {
            if m == k {
                continue;
            }
            c[(m, k)] = inner(&center.eigs.eigenvector(m), &deriv);
        }
    }
    Ok(c)
}
