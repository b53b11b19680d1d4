//! Shared generators for the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use nocgf::lincore::{self, CMatrix, CVector};
use num_complex::Complex64;
use proptest::prelude::*;

/// Hermitian matrix from `n²` reals: the upper triangle and diagonal.
pub fn hermitian_from(n: usize, vals: &[f64]) -> CMatrix {
    let mut m = lincore::zeros(n);
    let mut it = vals.iter().copied().cycle();
    for r in 0..n {
        m[(r, r)] = Complex64::new(it.next().unwrap(), 0.0);
        for c in r + 1..n {
            let z = Complex64::new(it.next().unwrap(), it.next().unwrap());
            m[(r, c)] = z;
            m[(c, r)] = z.conj();
        }
    }
    m
}

/// Unitary `exp(−i H)` for the Hermitian matrix built from `vals`.
pub fn unitary_from(n: usize, vals: &[f64]) -> CMatrix {
    lincore::unitary_exp(&hermitian_from(n, vals), 1.0).unwrap()
}

pub fn cvector_from(vals: &[f64]) -> CVector {
    CVector::from_iterator(
        vals.len() / 2,
        vals.chunks(2).map(|p| Complex64::new(p[0], p[1])),
    )
}

pub fn cmatrix_from(rows: usize, cols: usize, vals: &[f64]) -> DMatrix<Complex64> {
    DMatrix::from_iterator(
        rows,
        cols,
        vals.chunks(2).map(|p| Complex64::new(p[0], p[1])),
    )
}

pub fn reals(len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, len)
}
