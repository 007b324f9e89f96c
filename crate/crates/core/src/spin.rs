//! Angular-momentum operators Sx, Sy, Sz for arbitrary spin S (hbar = 1),
//! in the Sz eigenbasis ordered m = +S, ..., -S.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, HermitianOperator, MAX_DIM};

#[derive(Debug, Clone)]
pub struct SpinOperators {
    pub spin: f64,
    pub sx: HermitianOperator,
    pub sy: HermitianOperator,
    pub sz: HermitianOperator,
}

impl SpinOperators {
    pub fn dim(&self) -> usize {
        self.sz.dim()
    }
}

/// Standard spin matrices from the ladder-operator construction.
pub fn make_spin(s: f64) -> Result<SpinOperators> {
    let two_s = 2.0 * s;
    if s < 0.0 || (two_s - two_s.round()).abs() > 1e-9 {
        return Err(Error::InvalidSpin { spin: s });
    }
    let dim = two_s.round() as usize + 1;
    if dim > MAX_DIM {
        return Err(Error::InvalidSpin { spin: s });
    }

    // m value at row index i, counting down from +S.
    let m_at = |i: usize| s - i as f64;

    // <m+1|S+|m> = sqrt(S(S+1) - m(m+1)); with index i for m, the raised
    // state m+1 sits at index i-1.
    let mut sp = ComplexMatrix::zeros(dim);
    for i in 1..dim {
        let m = m_at(i);
        let amp = (s * (s + 1.0) - m * (m + 1.0)).sqrt();
        sp[(i - 1, i)] = C64::new(amp, 0.0);
    }
    let sm = sp.adjoint();

    let sx = (&sp + &sm).scale(C64::new(0.5, 0.0));
    let sy = (&sp - &sm).scale(C64::new(0.0, -0.5));
    let mut sz = ComplexMatrix::zeros(dim);
    for i in 0..dim {
        sz[(i, i)] = C64::new(m_at(i), 0.0);
    }

    Ok(SpinOperators {
        spin: s,
        sx: HermitianOperator::new(sx)?,
        sy: HermitianOperator::new(sy)?,
        sz: HermitianOperator::new(sz)?,
    })
}

/// Unitary exp(-i theta Sy), computed by spectral decomposition of Sy
/// (exact for these normal matrices, no series truncation).
pub fn rotation_about_y(ops: &SpinOperators, theta: f64) -> ComplexMatrix {
    let eig = hermitian_eig(&ops.sy).expect("spin operators are exactly Hermitian");
    let n = ops.dim();
    let mut phases = ComplexMatrix::zeros(n);
    for (k, &lambda) in eig.values.iter().enumerate() {
        phases[(k, k)] = (C64::new(0.0, -theta * lambda)).exp();
    }
    eig.vectors.matmul(&phases).matmul(&eig.vectors.adjoint())
}
