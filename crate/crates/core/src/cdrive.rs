//! Auxiliary (counterdiabatic) Hamiltonians built from a spectral frame.
//!
//! Collective driving keeps every instantaneous eigenstate transitionless;
//! individual driving decouples a single level n from the rest. Both are
//! assembled in the off-diagonal, gauge-free form: with couplings
//! c(m, n) = <m_t|d/dt n_t> in the parallel-transport gauge,
//!
//!   H^A   = i * sum_{m != n} |m> c(m, n) <n|          (all levels)
//!   H_n^A = i * (|dn_perp><n| - |n><dn_perp|),        (level n only)
//!
//! where |dn_perp> = sum_{m != n} |m> c(m, n). In the instantaneous eigenbasis
//! the collective operator has zero diagonal and the individual one touches
//! only row/column n.

use num_complex::Complex64 as C64;

use crate::adiabatic::{spectral_frame, SpectralFrame};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::model::HamiltonianTrajectory;

/// Which auxiliary field to build.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DriveProtocol {
    /// Drive all eigenstates transitionlessly.
    Collective,
    /// Protect only the eigenstate with the given ascending level index.
    Individual(usize),
}

fn assemble(frame: &SpectralFrame, mask: Option<usize>) -> HermitianOperator {
    let n = frame.dim();
    let i = C64::new(0.0, 1.0);
    let mut in_basis = ComplexMatrix::zeros(n);
    for m in 0..n {
        for j in 0..n {
            if m == j {
                continue;
            }
            if let Some(k) = mask {
                if m != k && j != k {
                    continue;
                }
            }
            in_basis[(m, j)] = i * frame.couplings[(m, j)];
        }
    }
    let v = &frame.eigs.vectors;
    HermitianOperator::symmetrized(v.matmul(&in_basis).matmul(&v.adjoint()))
}

/// Collective auxiliary Hamiltonian H^A.
pub fn build_collective(frame: &SpectralFrame) -> HermitianOperator {
    assemble(frame, None)
}

/// Individual auxiliary Hamiltonian H_n^A for the ascending level index n.
pub fn build_individual(frame: &SpectralFrame, n: usize) -> Result<HermitianOperator> {
    if n >= frame.dim() {
        return Err(Error::LevelOutOfRange {
            level: n,
            dim: frame.dim(),
        });
    }
    Ok(assemble(frame, Some(n)))
}

/// Full driven Hamiltonian H(t) + H^A(t) (or H(t) + H_n^A(t)).
pub fn total_hamiltonian(
    traj: &HamiltonianTrajectory,
    protocol: DriveProtocol,
    t: f64,
) -> Result<HermitianOperator> {
    let h = traj.h_at(t)?;
    let frame = spectral_frame(traj, t)?;
    let aux = match protocol {
        DriveProtocol::Collective => build_collective(&frame),
        DriveProtocol::Individual(n) => build_individual(&frame, n)?,
    };
    Ok(&h + &aux)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adiabatic::frame_from_operators;
    use crate::linalg::frobenius_norm;
    use crate::model::{lz3_counterdiabatic_field, lz3_oracle, lz3_trajectory, Lz3Params};
    use crate::spin::make_spin;
    use crate::testutil::assert_close;

    fn params() -> Lz3Params {
        Lz3Params::new(0.1, 1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn collective_equals_v_times_sy() {
        let p = params();
        let traj = lz3_trajectory(&p);
        let oracle = lz3_oracle(&p);
        for &t in &[0.0, 0.2, 0.5, 0.83, 1.0] {
            let frame = spectral_frame(&traj, t).unwrap();
            let ha = build_collective(&frame);
            assert!(ha.matrix().max_abs_diff(oracle.auxiliary(t).matrix()) < 1e-10);
        }
    }

    #[test]
    fn collective_norm_at_center() {
        let p = params();
        let traj = lz3_trajectory(&p);
        let frame = spectral_frame(&traj, 0.5).unwrap();
        let ha = build_collective(&frame);
        // ||V*Sy||^2 = 2 V^2 = 800 at the crossing.
        assert_close(frobenius_norm(ha.matrix()).powi(2), 800.0, 1e-7);
    }

    #[test]
    fn frozen_hamiltonian_builds_zero() {
        let ops = make_spin(1.0).unwrap();
        let zero = HermitianOperator::new(ComplexMatrix::zeros(3)).unwrap();
        let frame = frame_from_operators(&ops.sz, &zero, 0.0).unwrap();
        assert_eq!(frobenius_norm(build_collective(&frame).matrix()), 0.0);
        assert_eq!(
            frobenius_norm(build_individual(&frame, 1).unwrap().matrix()),
            0.0
        );
    }

    #[test]
    fn individual_middle_level_reproduces_collective() {
        // Spin-1 Sy couples only m = 0 <-> +-1, so protecting the middle level
        // already decouples everything: H_0^A = H^A for this model.
        let p = params();
        let traj = lz3_trajectory(&p);
        for &t in &[0.1, 0.5, 0.76] {
            let frame = spectral_frame(&traj, t).unwrap();
            let collective = build_collective(&frame);
            let individual = build_individual(&frame, 1).unwrap();
            assert!(collective.matrix().max_abs_diff(individual.matrix()) < 1e-10);
        }
    }

    #[test]
    fn individual_outer_level_has_half_the_power() {
        let p = params();
        let traj = lz3_trajectory(&p);
        let frame = spectral_frame(&traj, 0.5).unwrap();
        let collective = frobenius_norm(build_collective(&frame).matrix()).powi(2);
        let top = frobenius_norm(build_individual(&frame, 2).unwrap().matrix()).powi(2);
        assert_close(top, collective / 2.0, 1e-7 * collective);
    }

    #[test]
    fn eigenbasis_structure() {
        let p = params();
        let traj = lz3_trajectory(&p);
        let frame = spectral_frame(&traj, 0.31).unwrap();
        let v = &frame.eigs.vectors;
        let to_eigen = |op: &HermitianOperator| v.adjoint().matmul(op.matrix()).matmul(v);

        let hc = to_eigen(&build_collective(&frame));
        for k in 0..3 {
            assert!(hc[(k, k)].norm() < 1e-12);
        }
        let h1 = to_eigen(&build_individual(&frame, 2).unwrap());
        for m in 0..3 {
            for n in 0..3 {
                if m != 2 && n != 2 {
                    assert!(h1[(m, n)].norm() < 1e-12, "entry ({m},{n}) leaked");
                }
            }
        }
    }

    #[test]
    fn collective_power_splits_over_individual_drives() {
        // ||H^A||^2 = (1/2) sum_k ||H_k^A||^2 for every frame.
        let p = params();
        let traj = lz3_trajectory(&p);
        for &t in &[0.05, 0.4, 0.5, 0.99] {
            let frame = spectral_frame(&traj, t).unwrap();
            let total = frobenius_norm(build_collective(&frame).matrix()).powi(2);
            let sum: f64 = (0..3)
                .map(|k| frobenius_norm(build_individual(&frame, k).unwrap().matrix()).powi(2))
                .sum();
            assert_close(total, sum / 2.0, 1e-10 * total.max(1e-30));
        }
    }

    #[test]
    fn total_hamiltonian_variants() {
        let p = params();
        let traj = lz3_trajectory(&p);
        let t = 0.5;
        let ops = make_spin(1.0).unwrap();
        let v = lz3_counterdiabatic_field(&p, t);
        // Collective: Delta*Sx + V*Sy + lambda*Sz (lambda = 0 at the center).
        let total = total_hamiltonian(&traj, DriveProtocol::Collective, t).unwrap();
        let expect = &(&ops.sx * p.delta) + &(&ops.sy * v);
        assert!(total.matrix().max_abs_diff(expect.matrix()) < 1e-10);
        // Individual(middle) coincides for this model.
        let mid = total_hamiltonian(&traj, DriveProtocol::Individual(1), t).unwrap();
        assert!(mid.matrix().max_abs_diff(total.matrix()) < 1e-10);
        // Bad level index.
        assert!(matches!(
            total_hamiltonian(&traj, DriveProtocol::Individual(7), t),
            Err(Error::LevelOutOfRange { .. })
        ));
    }

    #[test]
    fn gauge_invariance_of_built_operators() {
        use crate::adiabatic::couplings_from_eigensystem;
        let p = params();
        let traj = lz3_trajectory(&p);
        let t = 0.62;
        let frame = spectral_frame(&traj, t).unwrap();
        let reference = build_collective(&frame);

        let mut rotated = frame.clone();
        let phases = [1.1_f64, -0.4, 2.2];
        for (k, angle) in phases.iter().enumerate() {
            let ph = C64::from_polar(1.0, *angle);
            let col: Vec<C64> = rotated
                .eigs
                .vectors
                .col(k)
                .into_iter()
                .map(|x| x * ph)
                .collect();
            rotated.eigs.vectors.set_col(k, &col);
        }
        rotated.couplings =
            couplings_from_eigensystem(&rotated.eigs, &traj.dh_at(t).unwrap()).unwrap();
        let rebuilt = build_collective(&rotated);
        assert!(rebuilt.matrix().max_abs_diff(reference.matrix()) < 1e-10);
    }
}
