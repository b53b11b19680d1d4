//! Dense complex linear algebra for 2x2 and 4x4 operators.
//!
//! Vectorization stacks columns, so the entry `(r, c)` of an `N x N` matrix
//! lands at index `c * N + r`. This matches nalgebra's column-major storage.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Tolerance on `‖M − M†‖` accepted before an eigensolve.
pub const HERMITIAN_TOL: f64 = 1e-12;

pub const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> CMatrix {
    CMatrix::zeros(n, n)
}

pub fn sigma_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn sigma_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn sigma_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// The three Pauli matrices in x, y, z order.
pub fn paulis() -> [CMatrix; 3] {
    [sigma_x(), sigma_y(), sigma_z()]
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Stack the columns of `m` into one vector.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_column_slice(m.as_slice())
}

/// Inverse of [`vectorize`].
pub fn devectorize(v: &CVector, dim: usize) -> Result<CMatrix> {
    if v.len() != dim * dim {
        return Err(Error::Dimension {
            expected: dim * dim,
            found: v.len(),
        });
    }
    Ok(CMatrix::from_column_slice(dim, dim, v.as_slice()))
}

/// `(M + M†) / 2`.
pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Max-norm of `M − M†`.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    max_norm(&(m - m.adjoint()))
}

/// Largest entry modulus.
pub fn max_norm(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Max-norm of `U†U − I`.
pub fn unitarity_defect(u: &CMatrix) -> f64 {
    max_norm(&(u.adjoint() * u - identity(u.nrows())))
}

/// Eigen-decomposition of a Hermitian matrix.
#[derive(Debug, Clone)]
pub struct Eigensystem {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: CMatrix,
}

impl Eigensystem {
    /// Column `k` as an owned vector.
    pub fn vector(&self, k: usize) -> CVector {
        self.vectors.column(k).into_owned()
    }

    /// `Σ λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.values.len();
        let mut out = zeros(n);
        for (k, &lam) in self.values.iter().enumerate() {
            let v = self.vector(k);
            out += (&v * v.adjoint()).scale(lam);
        }
        out
    }
}

/// Ascending eigensystem of a Hermitian matrix.
///
/// Each eigenvector is rotated so its largest-magnitude component is real and
/// positive; ties are broken by the lowest index.
pub fn hermitian_eigensystem(m: &CMatrix) -> Result<Eigensystem> {
    let defect = hermitian_defect(m);
    if defect > HERMITIAN_TOL * (1.0 + max_norm(m)) {
        return Err(Error::NotHermitian { defect });
    }
    let n = m.nrows();
    let eig = hermitize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let mut vectors = zeros(n);
    let mut values = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        values.push(eig.eigenvalues[src]);
        let col = eig.eigenvectors.column(src);
        let mut pivot = 0;
        for r in 1..n {
            if col[r].norm() > col[pivot].norm() + 1e-14 {
                pivot = r;
            }
        }
        let phase = col[pivot].conj() / col[pivot].norm();
        for r in 0..n {
            vectors[(r, dst)] = col[r] * phase;
        }
    }
    Ok(Eigensystem { values, vectors })
}

/// `exp(−i t H)` for Hermitian `H`, via its eigensystem.
pub fn unitary_exp(h: &CMatrix, t: f64) -> Result<CMatrix> {
    let es = hermitian_eigensystem(h)?;
    let n = h.nrows();
    let mut out = zeros(n);
    for (k, &lam) in es.values.iter().enumerate() {
        let v = es.vector(k);
        out += (&v * v.adjoint()) * Complex64::from_polar(1.0, -lam * t);
    }
    Ok(out)
}

/// Frobenius norm of a matrix.
pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Trace of a square matrix.
pub fn trace(m: &CMatrix) -> Complex64 {
    m.diagonal().sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2(a: [f64; 4]) -> CMatrix {
        CMatrix::from_row_slice(2, 2, &a.map(|x| c(x, 0.0)))
    }

    #[test]
    fn vectorize_stacks_columns() {
        let v = vectorize(&m2([1., 3., 2., 4.]));
        let got: Vec<f64> = v.iter().map(|z| z.re).collect();
        assert_eq!(got, vec![1., 2., 3., 4.]);
        let id = vectorize(&identity(2));
        assert_eq!(
            id.iter().map(|z| z.re).collect::<Vec<_>>(),
            vec![1., 0., 0., 1.]
        );
    }

    #[test]
    fn devectorize_inverts_and_checks_length() {
        let v = CVector::from_vec(vec![c(1., 0.), c(2., 0.), c(3., 0.), c(4., 0.)]);
        assert_eq!(devectorize(&v, 2).unwrap(), m2([1., 3., 2., 4.]));
        assert_eq!(devectorize(&CVector::zeros(4), 2).unwrap(), zeros(2));
        assert!(matches!(
            devectorize(&v, 3),
            Err(Error::Dimension {
                expected: 9,
                found: 4
            })
        ));
    }

    #[test]
    fn hermitize_upper_entry() {
        let mut m = zeros(2);
        m[(0, 1)] = I;
        let h = hermitize(&m);
        assert_eq!(h[(0, 1)], c(0., 0.5));
        assert_eq!(h[(1, 0)], c(0., -0.5));
        assert_eq!(hermitize(&sigma_y()), sigma_y());
    }

    #[test]
    fn pauli_spectra() {
        for s in [sigma_z(), sigma_x()] {
            let es = hermitian_eigensystem(&s).unwrap();
            assert!((es.values[0] + 1.0).abs() < 1e-14);
            assert!((es.values[1] - 1.0).abs() < 1e-14);
        }
        let es = hermitian_eigensystem(&sigma_x()).unwrap();
        let v0 = es.vector(0);
        assert!((v0[0].re - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        assert!((v0[1].re + std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let mut m = zeros(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            hermitian_eigensystem(&m),
            Err(Error::NotHermitian { .. })
        ));
    }

    #[test]
    fn unitarity_defect_examples() {
        assert_eq!(unitarity_defect(&identity(2)), 0.0);
        assert!((unitarity_defect(&identity(2).scale(2.0)) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn max_norm_of_zero() {
        assert_eq!(max_norm(&zeros(4)), 0.0);
    }
}
