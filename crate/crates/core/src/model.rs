//! Time-dependent Hamiltonians and the three-level Landau-Zener model with a
//! linearly swept control field.
//!
//! The model is H(t) = Delta*Sx + lambda(t)*Sz with lambda(t) = kappa*(2t/tau - 1)
//! for spin 1, internal units hbar = 1 and time measured in 1/kappa. Because
//! the field direction stays in the x-z plane, the instantaneous eigenbasis is
//! an exact y-rotation of the Sz basis by theta(t) = atan2(Delta, lambda(t)),
//! which [`Lz3Oracle`] exposes in closed form; it validates every derived
//! quantity downstream, including the counterdiabatic field
//! V(t) = -Delta * dlambda/dt / (Delta^2 + lambda^2) = dtheta/dt.

use std::sync::Arc;

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianOperator};
use crate::spin::{make_spin, rotation_about_y, SpinOperators};

type HamFn = dyn Fn(f64) -> HermitianOperator + Send + Sync;

/// A time-dependent Hamiltonian with its analytic time derivative.
///
/// The derivative is part of the contract: tangent couplings are computed
/// from <m|dH/dt|n>, which is gauge- and step-size-free. Finite differencing
/// exists only as a cross-check oracle in `adiabatic`.
pub struct HamiltonianTrajectory {
    dim: usize,
    t_span: (f64, f64),
    h: Box<HamFn>,
    dh: Box<HamFn>,
}

impl HamiltonianTrajectory {
    pub fn new(
        dim: usize,
        t_span: (f64, f64),
        h: Box<HamFn>,
        dh: Box<HamFn>,
    ) -> Result<Self> {
        require_positive("t_span", t_span.1 - t_span.0, "span must have positive duration")?;
        Ok(Self { dim, t_span, h, dh })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t_span(&self) -> (f64, f64) {
        self.t_span
    }

    pub fn duration(&self) -> f64 {
        self.t_span.1 - self.t_span.0
    }

    fn check_span(&self, t: f64) -> Result<()> {
        let slack = 1e-9 * self.duration();
        if t < self.t_span.0 - slack || t > self.t_span.1 + slack {
            return Err(Error::TimeOutOfSpan {
                t,
                t0: self.t_span.0,
                t1: self.t_span.1,
            });
        }
        Ok(())
    }

    pub fn h_at(&self, t: f64) -> Result<HermitianOperator> {
        self.check_span(t)?;
        Ok((self.h)(t))
    }

    pub fn dh_at(&self, t: f64) -> Result<HermitianOperator> {
        self.check_span(t)?;
        Ok((self.dh)(t))
    }
}

impl std::fmt::Debug for HamiltonianTrajectory {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("HamiltonianTrajectory")
            .field("dim", &self.dim)
            .field("t_span", &self.t_span)
            .finish()
    }
}

/// Parameters of the linearly swept Landau-Zener model.
#[derive(Debug, Clone, Copy)]
pub struct Lz3Params {
    /// Minimum energy separation Delta (> 0, units of kappa).
    pub delta: f64,
    /// Sweep amplitude kappa; sets the frequency unit (default 1).
    pub kappa: f64,
    /// Total sweep time tau (> 0, units of 1/kappa).
    pub tau: f64,
    /// Cost exponent alpha (> 0; microwave driving uses 2).
    pub alpha: f64,
}

impl Lz3Params {
    pub fn new(delta: f64, kappa: f64, tau: f64, alpha: f64) -> Result<Self> {
        require_positive("delta", delta, "must be > 0 (a level crossing otherwise)")?;
        require_positive("kappa", kappa, "must be > 0")?;
        require_positive("tau", tau, "must be > 0")?;
        require_positive("alpha", alpha, "must be > 0")?;
        Ok(Self {
            delta,
            kappa,
            tau,
            alpha,
        })
    }
}

/// Rejects non-finite values as well as nonpositive ones.
pub(crate) fn require_positive(
    name: &'static str,
    value: f64,
    constraint: &'static str,
) -> Result<()> {
    if value.is_nan() || value <= 0.0 {
        return Err(Error::InvalidParameter {
            name,
            value,
            constraint,
        });
    }
    Ok(())
}

/// Control field lambda(t) = kappa*(2t/tau - 1) and its constant slope 2*kappa/tau.
pub fn linear_sweep(p: &Lz3Params, t: f64) -> (f64, f64) {
    let lambda = p.kappa * (2.0 * t / p.tau - 1.0);
    let dlambda = 2.0 * p.kappa / p.tau;
    (lambda, dlambda)
}

/// Counterdiabatic field amplitude V(t) = -Delta * dlambda/dt / (Delta^2 + lambda^2).
pub fn lz3_counterdiabatic_field(p: &Lz3Params, t: f64) -> f64 {
    let (lambda, dlambda) = linear_sweep(p, t);
    -p.delta * dlambda / (p.delta * p.delta + lambda * lambda)
}

/// H(t) = Delta*Sx + lambda(t)*Sz for spin 1; eigenvalues n*sqrt(Delta^2 + lambda^2).
pub fn lz3_hamiltonian(p: &Lz3Params, t: f64) -> Result<HermitianOperator> {
    if t < 0.0 || t > p.tau {
        return Err(Error::TimeOutOfSpan {
            t,
            t0: 0.0,
            t1: p.tau,
        });
    }
    let ops = make_spin(1.0)?;
    let (lambda, _) = linear_sweep(p, t);
    Ok(&(&ops.sx * p.delta) + &(&ops.sz * lambda))
}

fn lz_trajectory(spin: f64, p: &Lz3Params) -> HamiltonianTrajectory {
    let ops = Arc::new(make_spin(spin).expect("supported spin"));
    let dim = ops.dim();
    let p_h = *p;
    let ops_h = Arc::clone(&ops);
    let h = move |t: f64| {
        let (lambda, _) = linear_sweep(&p_h, t);
        &(&ops_h.sx * p_h.delta) + &(&ops_h.sz * lambda)
    };
    let p_dh = *p;
    let dh = move |t: f64| {
        let (_, dlambda) = linear_sweep(&p_dh, t);
        &ops.sz * dlambda
    };
    HamiltonianTrajectory::new(dim, (0.0, p.tau), Box::new(h), Box::new(dh))
        .expect("tau validated positive")
}

/// The three-level (spin-1) Landau-Zener trajectory on [0, tau].
pub fn lz3_trajectory(p: &Lz3Params) -> HamiltonianTrajectory {
    lz_trajectory(1.0, p)
}

/// Two-level (spin-1/2) variant with the same sweep; in a two-level system
/// individual and collective driving cost the same, which tests rely on.
pub fn lz2_trajectory(p: &Lz3Params) -> HamiltonianTrajectory {
    lz_trajectory(0.5, p)
}

/// Closed-form diagonalization of the swept spin-1 model.
///
/// theta(t) = atan2(Delta, lambda(t)) is continuous through the avoided
/// crossing and the instantaneous eigenvectors are exp(-i theta Sy) applied
/// to the Sz basis.
#[derive(Debug, Clone)]
pub struct Lz3Oracle {
    params: Lz3Params,
    ops: SpinOperators,
}

impl Lz3Oracle {
    pub fn params(&self) -> &Lz3Params {
        &self.params
    }

    /// Field angle from the z-axis, in (0, pi) for Delta > 0.
    pub fn theta(&self, t: f64) -> f64 {
        let (lambda, _) = linear_sweep(&self.params, t);
        f64::atan2(self.params.delta, lambda)
    }

    /// dtheta/dt; identical to the counterdiabatic field V(t).
    pub fn dtheta(&self, t: f64) -> f64 {
        lz3_counterdiabatic_field(&self.params, t)
    }

    /// Instantaneous eigenvalues in ascending order: -B, 0, +B with
    /// B = sqrt(Delta^2 + lambda^2).
    pub fn energies_ascending(&self, t: f64) -> [f64; 3] {
        let (lambda, _) = linear_sweep(&self.params, t);
        let b = (self.params.delta * self.params.delta + lambda * lambda).sqrt();
        [-b, 0.0, b]
    }

    /// Eigenvector for the ascending level index (0 -> energy -B, 2 -> +B),
    /// i.e. the rotated Sz basis column with m = level - 1.
    pub fn eigenvector(&self, level: usize, t: f64) -> Vec<C64> {
        assert!(level < 3);
        let u = rotation_about_y(&self.ops, self.theta(t));
        // Ascending level k has m = k - 1, stored in the z-basis at
        // column (1 - m) = 2 - k.
        u.col(2 - level)
    }

    /// Tangent couplings <m_t|d/dt n_t> in ascending-level indexing:
    /// -i * dtheta * <m|Sy|n> in the rotated frame, where Sy matrix elements
    /// are frame-independent.
    pub fn couplings(&self, t: f64) -> ComplexMatrix {
        let dtheta = self.dtheta(t);
        let sy = self.ops.sy.matrix();
        ComplexMatrix::from_fn(3, |m, n| {
            if m == n {
                C64::new(0.0, 0.0)
            } else {
                C64::new(0.0, -dtheta) * sy[(2 - m, 2 - n)]
            }
        })
    }

    /// Fubini-Study metric of the ascending level: (dtheta)^2 for the middle
    /// level, (dtheta)^2/2 for the outer ones.
    pub fn metric(&self, level: usize, t: f64) -> f64 {
        assert!(level < 3);
        let g = self.dtheta(t).powi(2);
        if level == 1 {
            g
        } else {
            g / 2.0
        }
    }

    /// The collective auxiliary Hamiltonian in closed form: V(t) * Sy.
    pub fn auxiliary(&self, t: f64) -> HermitianOperator {
        &self.ops.sy * self.dtheta(t)
    }
}

pub fn lz3_oracle(p: &Lz3Params) -> Lz3Oracle {
    Lz3Oracle {
        params: *p,
        ops: make_spin(1.0).expect("spin 1 supported"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_eig, inner};
    use crate::testutil::assert_close;

    fn params() -> Lz3Params {
        Lz3Params::new(0.1, 1.0, 1.0, 2.0).unwrap()
    }

    #[test]
    fn linear_sweep_endpoints() {
        let p = params();
        let (l0, dl0) = linear_sweep(&p, 0.0);
        assert_close(l0, -p.kappa, 1e-15);
        assert_close(dl0, 2.0 * p.kappa / p.tau, 1e-15);
        let (lm, _) = linear_sweep(&p, p.tau / 2.0);
        assert_close(lm, 0.0, 1e-15);
        let (l1, _) = linear_sweep(&p, p.tau);
        assert_close(l1, p.kappa, 1e-15);
    }

    #[test]
    fn counterdiabatic_field_values() {
        let p = params();
        // Direct substitution: V = -Delta*(2k/tau)/(Delta^2 + lambda^2).
        assert_close(lz3_counterdiabatic_field(&p, 0.5), -20.0, 1e-12);
        assert_close(lz3_counterdiabatic_field(&p, 0.0), -0.2 / 1.01, 1e-12);
        // Frozen sweep: tau -> infinity sends dlambda and V to zero.
        let slow = Lz3Params::new(0.1, 1.0, 1e12, 2.0).unwrap();
        assert!(lz3_counterdiabatic_field(&slow, 0.0).abs() < 1e-11);
    }

    #[test]
    fn hamiltonian_at_midpoint_is_pure_x() {
        let p = params();
        let h = lz3_hamiltonian(&p, 0.5).unwrap();
        let eig = hermitian_eig(&h).unwrap();
        for (got, want) in eig.values.iter().zip([-0.1, 0.0, 0.1]) {
            assert_close(*got, want, 1e-12);
        }
    }

    #[test]
    fn hamiltonian_at_start_has_full_field_splitting() {
        let p = params();
        let h = lz3_hamiltonian(&p, 0.0).unwrap();
        let eig = hermitian_eig(&h).unwrap();
        let b = (p.delta * p.delta + p.kappa * p.kappa).sqrt();
        for (got, want) in eig.values.iter().zip([-b, 0.0, b]) {
            assert_close(*got, want, 1e-12);
        }
    }

    #[test]
    fn hamiltonian_rejects_out_of_span() {
        let p = params();
        assert!(matches!(
            lz3_hamiltonian(&p, -0.1),
            Err(Error::TimeOutOfSpan { .. })
        ));
        assert!(matches!(
            lz3_hamiltonian(&p, 1.1),
            Err(Error::TimeOutOfSpan { .. })
        ));
    }

    #[test]
    fn zero_delta_rejected() {
        assert!(matches!(
            Lz3Params::new(0.0, 1.0, 1.0, 2.0),
            Err(Error::InvalidParameter { name: "delta", .. })
        ));
    }

    #[test]
    fn oracle_theta_and_derivative() {
        let p = params();
        let oracle = lz3_oracle(&p);
        assert_close(oracle.theta(0.5), std::f64::consts::FRAC_PI_2, 1e-15);
        assert_close(oracle.theta(0.0), f64::atan2(0.1, -1.0), 1e-15);
        // dtheta equals V(t) identically; spot-check plus finite difference.
        for &t in &[0.1, 0.3, 0.5, 0.8] {
            assert_close(oracle.dtheta(t), lz3_counterdiabatic_field(&p, t), 1e-15);
            let dt = 1e-7;
            let fd = (oracle.theta(t + dt) - oracle.theta(t - dt)) / (2.0 * dt);
            assert_close(fd, oracle.dtheta(t), 1e-4);
        }
    }

    #[test]
    fn oracle_metric_values_at_center() {
        let p = params();
        let oracle = lz3_oracle(&p);
        assert_close(oracle.metric(1, 0.5), 400.0, 1e-9);
        assert_close(oracle.metric(0, 0.5), 200.0, 1e-9);
        assert_close(oracle.metric(2, 0.5), 200.0, 1e-9);
    }

    #[test]
    fn oracle_eigenvectors_match_numerics() {
        let p = params();
        let oracle = lz3_oracle(&p);
        for &t in &[0.0, 0.21, 0.5, 0.77, 1.0] {
            let eig = hermitian_eig(&lz3_hamiltonian(&p, t).unwrap()).unwrap();
            let energies = oracle.energies_ascending(t);
            for (level, want) in energies.iter().enumerate() {
                assert_close(eig.values[level], *want, 1e-12);
                let overlap = inner(&oracle.eigenvector(level, t), &eig.eigenvector(level));
                assert!(overlap.norm() >= 1.0 - 1e-10);
            }
        }
    }

    #[test]
    fn trajectory_derivative_consistency() {
        // Central differences of h_at reproduce dh_at to O(dt^2).
        let p = params();
        let traj = lz3_trajectory(&p);
        let dt = 1e-6 * p.tau;
        for k in 0..100 {
            let t = (k as f64 + 0.5) / 100.0 * p.tau;
            let plus = traj.h_at(t + dt).unwrap();
            let minus = traj.h_at(t - dt).unwrap();
            let fd = (plus.matrix() - minus.matrix()).scale(C64::new(0.5 / dt, 0.0));
            let analytic = traj.dh_at(t).unwrap();
            assert!(fd.max_abs_diff(analytic.matrix()) < 1e-6);
        }
    }
}
