//! Functional calculus for positive semidefinite matrices and SVD-style
//! helpers built on the Hermitian solver.

use crate::error::{Error, Result};
use crate::linalg::hermitian::{herm_eig, HermEig};
use crate::matrix::{vec_norm, ComplexMatrix, C64};

/// Eigenvalues at or below `rank_tol · λ_max` are treated as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-12;

/// Negative eigenvalues down to `-PSD_TOL · ‖A‖` are accepted as roundoff.
pub const PSD_TOL: f64 = 1e-10;

/// Pseudo-inverse, square root and range basis of a PSD matrix.
#[derive(Clone, Debug)]
pub struct PsdDecomposition {
    /// `A†`
    pub dagger: ComplexMatrix,
    /// `A^{1/2}`
    pub half: ComplexMatrix,
    /// `(A^{1/2})†`
    pub half_dagger: ComplexMatrix,
    /// `n × r` orthonormal basis of `R(A)`, ordered by descending eigenvalue.
    pub range_basis: ComplexMatrix,
    /// The `r` retained eigenvalues, descending.
    pub lambda: Vec<f64>,
    pub rank: usize,
}

impl PsdDecomposition {
    /// `Q Q*`, the orthogonal projection onto `R(A)`.
    pub fn projection(&self) -> ComplexMatrix {
        &self.range_basis * &self.range_basis.adjoint()
    }
}

/// `Q diag(f(λ)) Q*`.
fn spectral_function(q: &ComplexMatrix, lambda: &[f64], f: impl Fn(f64) -> f64) -> ComplexMatrix {
    let mut scaled = q.clone();
    for j in 0..q.cols() {
        let s = f(lambda[j]);
        for i in 0..q.rows() {
            scaled[(i, j)] *= s;
        }
    }
    &scaled * &q.adjoint()
}

/// Decomposes a PSD matrix `A = Q Λ Q*` and returns `A†`, `A^{1/2}`,
/// `(A^{1/2})†`, `Q`, `Λ` and the numerical rank.
pub fn psd_pinv_sqrt(a: &ComplexMatrix, rank_tol: f64) -> Result<PsdDecomposition> {
    let eig = herm_eig(a)?;
    let n = a.rows();
    let lmax = eig.values.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if eig.min() < -PSD_TOL * lmax.max(f64::MIN_POSITIVE) {
        return Err(Error::NotPositive {
            min_eigenvalue: eig.min(),
        });
    }
    let cutoff = rank_tol * lmax;
    let mut keep: Vec<usize> = (0..n).filter(|&k| eig.values[k] > cutoff && eig.values[k] > 0.0).collect();
    keep.sort_by(|&i, &j| eig.values[j].total_cmp(&eig.values[i]));
    let lambda: Vec<f64> = keep.iter().map(|&k| eig.values[k]).collect();
    let q = eig.vectors.select_columns(&keep);
    Ok(PsdDecomposition {
        dagger: spectral_function(&q, &lambda, |l| 1.0 / l),
        half: spectral_function(&q, &lambda, f64::sqrt),
        half_dagger: spectral_function(&q, &lambda, |l| 1.0 / l.sqrt()),
        rank: keep.len(),
        range_basis: q,
        lambda,
    })
}

/// Eigen-decomposition of `[[0, m], [m*, 0]]`, whose eigenvalues are
/// `±σ_i` padded with zeros. Small singular values come out with absolute
/// accuracy `~eps·σ_max`, unlike those of `m*m`.
fn augmented_eig(m: &ComplexMatrix) -> Result<HermEig> {
    let (r, c) = (m.rows(), m.cols());
    let mut aug = ComplexMatrix::zeros(r + c, r + c);
    for i in 0..r {
        for j in 0..c {
            aug[(i, r + j)] = m[(i, j)];
            aug[(r + j, i)] = m[(i, j)].conj();
        }
    }
    herm_eig(&aug)
}

/// Singular values of `m`, descending.
pub fn singular_values(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let k = m.rows().min(m.cols());
    let eig = augmented_eig(m)?;
    Ok(eig.values.iter().rev().take(k).map(|v| v.abs()).collect())
}

/// Largest singular value.
pub fn spectral_norm(m: &ComplexMatrix) -> Result<f64> {
    if m.rows() == 0 || m.cols() == 0 {
        return Ok(0.0);
    }
    let eig = herm_eig(&(&m.adjoint() * m))?;
    Ok(eig.max().max(0.0).sqrt())
}

/// Smallest right singular pair `(σ_min, v)` with `‖m v‖ = σ_min`, `‖v‖ = 1`.
pub fn smallest_singular_pair(m: &ComplexMatrix) -> Result<(f64, Vec<C64>)> {
    let (r, c) = (m.rows(), m.cols());
    let eig = augmented_eig(m)?;
    let mut order: Vec<usize> = (0..r + c).collect();
    order.sort_by(|&i, &j| eig.values[i].abs().total_cmp(&eig.values[j].abs()));
    let right_part = |k: usize| -> Vec<C64> { eig.vector(k)[r..].to_vec() };
    let best = order
        .iter()
        .take(2)
        .map(|&k| right_part(k))
        .max_by(|x, y| vec_norm(x).total_cmp(&vec_norm(y)))
        .unwrap_or_default();
    let norm = vec_norm(&best);
    if norm == 0.0 {
        return Ok((0.0, vec![C64::new(0.0, 0.0); c]));
    }
    let v: Vec<C64> = best.iter().map(|x| x / norm).collect();
    Ok((vec_norm(&m.mat_vec(&v)), v))
}

/// Moore–Penrose pseudo-inverse of a general matrix via `B† = (B*B)† B*`.
///
/// `rank_tol` is relative to the largest eigenvalue of `B*B`.
pub fn pinv(m: &ComplexMatrix, rank_tol: f64) -> Result<ComplexMatrix> {
    let gram = &m.adjoint() * m;
    let eig = herm_eig(&gram)?;
    let smax = eig.max().max(0.0);
    // Gram eigenvalues carry absolute noise ~ n·eps·σ_max², so the rank
    // decision cannot be finer than that.
    let floor = 64.0 * eig.dim() as f64 * f64::EPSILON;
    let cutoff = (rank_tol.max(floor) * smax).max(f64::MIN_POSITIVE);
    Ok(truncated_inverse(m, &eig, cutoff))
}

/// Pseudo-inverse that discards singular values `≤ sigma_cutoff`.
pub fn pinv_absolute(m: &ComplexMatrix, sigma_cutoff: f64) -> Result<ComplexMatrix> {
    let eig = herm_eig(&(&m.adjoint() * m))?;
    Ok(truncated_inverse(m, &eig, (sigma_cutoff * sigma_cutoff).max(f64::MIN_POSITIVE)))
}

fn truncated_inverse(m: &ComplexMatrix, gram_eig: &HermEig, cutoff: f64) -> ComplexMatrix {
    let keep: Vec<usize> = (0..gram_eig.dim()).filter(|&k| gram_eig.values[k] > cutoff).collect();
    let v = gram_eig.vectors.select_columns(&keep);
    let inv: Vec<f64> = keep.iter().map(|&k| 1.0 / gram_eig.values[k]).collect();
    &spectral_function(&v, &inv, |x| x) * &m.adjoint()
}
