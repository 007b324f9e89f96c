use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not Hermitian: asymmetry {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    EigenNonConvergence { sweeps: usize, off: f64 },

    #[error("degenerate spectrum: minimum gap {min_gap:.3e} below threshold {threshold:.3e}")]
    DegenerateSpectrum { min_gap: f64, threshold: f64 },

    #[error("eigenvector branch mis-tracked across the difference step (overlap {overlap:.3}); reduce dt")]
    BranchMistracked { overlap: f64 },

    #[error("level index {level} out of range for dimension {dim}")]
    LevelOutOfRange { level: usize, dim: usize },

    #[error("time {t} outside trajectory span [{t0}, {t1}]")]
    TimeOutOfSpan { t: f64, t0: f64, t1: f64 },

    #[error("state must be normalized: got norm {norm}")]
    UnnormalizedState { norm: f64 },

    #[error("norm drift {drift:.3e} at t = {t:.6} exceeds 1e-6; reduce the step size")]
    NormDrift { t: f64, drift: f64 },

    #[error("population {population:.3e} at level {level} too small for a nonzero time derivative (classical Fisher term diverges)")]
    PopulationBoundary { level: usize, population: f64 },

    #[error("invalid state: {reason}")]
    InvalidState { reason: String },

    #[error("{steps} steps insufficient: need at least {min}")]
    TooFewSteps { steps: usize, min: usize },

    #[error("{steps} steps too coarse to resolve the carrier frequency: need at least {required}")]
    StepTooCoarse { steps: usize, required: usize },

    #[error("omega0/kappa = {ratio} outside the rotating-wave regime (need >= {min})")]
    OutsideRwaRegime { ratio: f64, min: f64 },

    #[error("invalid parameter {name} = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("spin must be a nonnegative half-integer with 2S+1 <= 16 (got {spin})")]
    InvalidSpin { spin: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
