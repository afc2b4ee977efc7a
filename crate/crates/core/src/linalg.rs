//! Small dense linear-algebra helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{DaisError, Result};

/// Lower Cholesky factor. Fails with the index of the first non-positive
/// leading minor; no jitter is ever added.
pub fn cholesky(a: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(DaisError::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let mut l = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        let mut diag = a[(j, j)];
        for k in 0..j {
            diag -= l[(j, k)] * l[(j, k)];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return Err(DaisError::CholeskyFailure { minor: j });
        }
        let ljj = diag.sqrt();
        l[(j, j)] = ljj;
        for i in (j + 1)..n {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            l[(i, j)] = s / ljj;
        }
    }
    Ok(l)
}

/// Solves `L y = b` in place for lower-triangular `L`.
pub fn forward_substitute(l: &DMatrix<f64>, b: &mut [f64]) {
    let n = l.nrows();
    for j in 0..n {
        let col = &l.as_slice()[j * n..(j + 1) * n];
        b[j] /= col[j];
        let bj = b[j];
        for (bi, lij) in b[j + 1..].iter_mut().zip(&col[j + 1..]) {
            *bi -= lij * bj;
        }
    }
}

/// Solves `Lᵀ y = b` in place for lower-triangular `L`.
pub fn back_substitute_transpose(l: &DMatrix<f64>, b: &mut [f64]) {
    let n = l.nrows();
    for i in (0..n).rev() {
        let col = &l.as_slice()[i * n..(i + 1) * n];
        let s: f64 = col[i + 1..]
            .iter()
            .zip(&b[i + 1..])
            .map(|(a, c)| a * c)
            .sum();
        b[i] = (b[i] - s) / col[i];
    }
}

/// Solves `(L Lᵀ) y = b` in place.
pub fn cholesky_solve(l: &DMatrix<f64>, b: &mut [f64]) {
    forward_substitute(l, b);
    back_substitute_transpose(l, b);
}

/// Inverse of `L Lᵀ`, symmetrized.
pub fn cholesky_inverse(l: &DMatrix<f64>) -> DMatrix<f64> {
    let n = l.nrows();
    let mut inv = DMatrix::<f64>::identity(n, n);
    for mut col in inv.column_iter_mut() {
        cholesky_solve(l, col.as_mut_slice());
    }
    symmetrize(&inv)
}

pub fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Largest absolute entry of `A - Aᵀ`.
pub fn max_asymmetry(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    worst
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

pub fn inf_norm(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Raises every eigenvalue of a symmetric matrix to at least `floor`.
pub fn clamp_eigenvalues(a: &DMatrix<f64>, floor: f64) -> DMatrix<f64> {
    let eig = SymmetricEigen::new(symmetrize(a));
    let clamped = eig.eigenvalues.map(|v| v.max(floor));
    let q = &eig.eigenvectors;
    symmetrize(&(q * DMatrix::from_diagonal(&clamped) * q.transpose()))
}
