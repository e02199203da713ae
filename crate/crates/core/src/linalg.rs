//! Dense linear algebra on truncated representations: exact rank over ℚ(i),
//! singular values and Hermitian spectra through nalgebra.

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;

use crate::scalar::{to_c64, RealScalar};

pub type CMatrix = DMatrix<Complex<f64>>;

pub fn to_c64_matrix<R: RealScalar>(m: &DMatrix<Complex<R>>) -> CMatrix {
    m.map(|z| to_c64(&z))
}

/// Largest singular value; 0 for an empty matrix.
pub fn operator_norm(m: &CMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Rank decided by a singular-value threshold.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Rank {
    Determined(usize),
    /// Some singular value lies strictly between the threshold and the gap.
    Indeterminate { smallest_ambiguous: f64 },
}

/// Numerical rank: singular values `> threshold` count, and every singular
/// value must avoid `(threshold, gap)`.
pub fn numeric_rank(m: &CMatrix, threshold: f64, gap: f64) -> Rank {
    if m.is_empty() {
        return Rank::Determined(0);
    }
    let values = m.clone().singular_values();
    if let Some(&s) = values.iter().find(|&&s| s > threshold && s < gap) {
        return Rank::Indeterminate { smallest_ambiguous: s };
    }
    Rank::Determined(values.iter().filter(|&&s| s > threshold).count())
}

/// Exact rank by Gaussian elimination; meaningful for exact fields.
pub fn exact_rank<R: RealScalar>(m: &DMatrix<Complex<R>>) -> usize {
    let (rows, cols) = m.shape();
    let mut a: Vec<Vec<Complex<R>>> = (0..rows).map(|i| (0..cols).map(|j| m[(i, j)].clone()).collect()).collect();
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(rank, pivot);
        let p = a[rank][col].clone();
        for i in rank + 1..rows {
            if a[i][col].is_zero() {
                continue;
            }
            let factor = a[i][col].clone() / p.clone();
            for j in col..cols {
                let t = factor.clone() * a[rank][j].clone();
                a[i][j] = a[i][j].clone() - t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    rank
}

/// Rank in the field's own regime: exact elimination or thresholded SVD.
pub fn rank<R: RealScalar>(m: &DMatrix<Complex<R>>, threshold: f64, gap: f64) -> Rank {
    if R::EXACT {
        Rank::Determined(exact_rank(m))
    } else {
        numeric_rank(&to_c64_matrix(m), threshold, gap)
    }
}

/// Eigenvalues of a Hermitian matrix in ascending order.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    if m.is_empty() {
        return Vec::new();
    }
    let herm = (m + m.adjoint()).scale(0.5);
    let mut values: Vec<f64> = herm.symmetric_eigenvalues().iter().cloned().collect();
    values.sort_by(f64::total_cmp);
    values
}
