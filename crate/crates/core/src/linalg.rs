//! Small dense linear-algebra helpers shared by the model, solver and bounds.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

/// Singular-value ratio below which a matrix is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-10;

/// `(m + mᵀ) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues of a symmetric matrix in ascending order.
pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(symmetrize(m)).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Numerical rank using the singular-value ratio test `σ_i / σ_max ≥ RANK_TOL`.
pub fn rank(m: &DMatrix<f64>) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    if smax <= 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s / smax >= RANK_TOL).count()
}

/// Spectral norm (largest singular value).
pub fn norm2(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.singular_values().iter().copied().fold(0.0_f64, f64::max)
}

/// Extreme singular values `(σ_min, σ_max)` of a tall matrix. `σ_min` is the
/// n-th singular value, i.e. zero when the matrix has fewer rows than columns.
pub fn singular_extremes(m: &DMatrix<f64>) -> (f64, f64) {
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0_f64, f64::max);
    let smin = if m.nrows() < m.ncols() {
        0.0
    } else {
        sv.iter().copied().fold(f64::INFINITY, f64::min)
    };
    (smin, smax)
}

/// Spectral radius of a general square matrix.
pub fn spectral_radius(m: &DMatrix<f64>) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.complex_eigenvalues().iter().map(|z| z.norm()).fold(0.0_f64, f64::max)
}

/// Condition number `λ_max / λ_min` of a symmetric positive-definite matrix.
/// Returns +inf when `λ_min ≤ 0`.
pub fn sym_condition(m: &DMatrix<f64>) -> f64 {
    let ev = sym_eigenvalues(m);
    let lo = ev[0];
    let hi = ev[ev.len() - 1];
    if lo <= 0.0 {
        f64::INFINITY
    } else {
        hi / lo
    }
}

/// Row-major flattening.
pub fn to_row_major(m: &DMatrix<f64>) -> Vec<f64> {
    let mut out = Vec::with_capacity(m.len());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out.push(m[(i, j)]);
        }
    }
    out
}

pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> DMatrix<f64> {
    DMatrix::from_row_slice(rows, cols, data)
}

/// Stack a sequence of vectors into one column.
pub fn stack(parts: &[DVector<f64>]) -> DVector<f64> {
    let len = parts.iter().map(|v| v.len()).sum();
    let mut out = DVector::zeros(len);
    let mut at = 0;
    for v in parts {
        out.rows_mut(at, v.len()).copy_from(v);
        at += v.len();
    }
    out
}
