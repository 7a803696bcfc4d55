//! Thin wrappers over the dense complex linear algebra used by the quantum
//! and frame modules.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type CMat = Mat<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Ascending eigenvalues and the matching orthonormal eigenvectors (columns).
pub fn hermitian_eigen(a: &CMat) -> Result<(Vec<f64>, CMat)> {
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = evd.S();
    let values = (0..a.nrows()).map(|i| s[i].re).collect();
    Ok((values, evd.U().to_owned()))
}

pub fn hermitian_eigenvalues(a: &CMat) -> Result<Vec<f64>> {
    let vals = a
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(vals)
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a * b
}

/// `a * b^H`.
pub fn matmul_adjoint(a: &CMat, b: &CMat) -> CMat {
    a * b.adjoint()
}

pub fn adjoint(a: &CMat) -> CMat {
    a.adjoint().to_owned()
}

pub fn matvec(a: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.ncols(), v.len());
    let mut out = vec![ZERO; a.nrows()];
    for (j, &vj) in v.iter().enumerate() {
        if vj == ZERO {
            continue;
        }
        let col = a.col(j);
        for (i, o) in out.iter_mut().enumerate() {
            *o += col[i] * vj;
        }
    }
    out
}

/// `a^H v`.
pub fn adjoint_matvec(a: &CMat, v: &[Complex64]) -> Vec<Complex64> {
    assert_eq!(a.nrows(), v.len());
    (0..a.ncols())
        .map(|j| {
            let col = a.col(j);
            v.iter().enumerate().map(|(i, &vi)| col[i].conj() * vi).sum()
        })
        .collect()
}

/// Solves `a x = b` by partial-pivot LU.
pub fn solve(a: &CMat, b: &[Complex64]) -> Vec<Complex64> {
    let rhs = Mat::from_fn(b.len(), 1, |i, _| b[i]);
    let x = a.partial_piv_lu().solve(&rhs);
    (0..b.len()).map(|i| x[(i, 0)]).collect()
}

/// Largest entrywise modulus of `a - a^H`.
pub fn hermitian_defect(a: &CMat) -> f64 {
    let n = a.nrows();
    let mut d = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            d = d.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    d
}

/// Replaces `a` by `(a + a^H)/2`.
pub fn hermitize(a: &mut CMat) {
    let n = a.nrows();
    for j in 0..n {
        for i in 0..j {
            let v = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = v;
            a[(j, i)] = v.conj();
        }
        a[(j, j)] = Complex64::new(a[(j, j)].re, 0.0);
    }
}

/// `max |u^H u - I|`.
pub fn unitarity_defect(u: &CMat) -> f64 {
    let g = u.adjoint() * u;
    let mut d = 0.0f64;
    for j in 0..g.ncols() {
        for i in 0..g.nrows() {
            let target = if i == j { 1.0 } else { 0.0 };
            d = d.max((g[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    d
}
