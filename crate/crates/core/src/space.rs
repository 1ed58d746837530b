//! The semi-Hilbertian structure induced by a positive weight `A`.

use crate::error::{Error, Result};
use crate::linalg::psd::{psd_pinv_sqrt, DEFAULT_RANK_TOL};
use crate::matrix::{dot, ComplexMatrix, C64};

/// Default relative tolerance for membership and identity checks.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A nonzero PSD weight `A = Q Λ Q*` with its pseudo-inverse, square root
/// and range projection precomputed.
#[derive(Clone, Debug)]
pub struct SemiHilbertSpace {
    a: ComplexMatrix,
    dagger: ComplexMatrix,
    half: ComplexMatrix,
    half_dagger: ComplexMatrix,
    q: ComplexMatrix,
    lambda: Vec<f64>,
    projection: ComplexMatrix,
    rank_tol: f64,
    tol: f64,
}

impl SemiHilbertSpace {
    pub fn new(a: ComplexMatrix) -> Result<Self> {
        Self::with_rank_tol(a, DEFAULT_RANK_TOL)
    }

    /// Builds the space, treating eigenvalues `≤ rank_tol·λ_max` as zero.
    pub fn with_rank_tol(a: ComplexMatrix, rank_tol: f64) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::domain(format!("weight must be square, got {}x{}", a.rows(), a.cols())));
        }
        if a.rows() == 0 || a.max_abs() == 0.0 {
            return Err(Error::ZeroWeight);
        }
        let d = psd_pinv_sqrt(&a, rank_tol)?;
        if d.rank == 0 {
            return Err(Error::ZeroWeight);
        }
        let projection = d.projection();
        Ok(Self {
            a,
            dagger: d.dagger,
            half: d.half,
            half_dagger: d.half_dagger,
            q: d.range_basis,
            lambda: d.lambda,
            projection,
            rank_tol,
            tol: DEFAULT_TOL,
        })
    }

    /// Overrides the relative tolerance used by membership tests.
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn dim(&self) -> usize {
        self.a.rows()
    }

    pub fn rank(&self) -> usize {
        self.lambda.len()
    }

    pub fn weight(&self) -> &ComplexMatrix {
        &self.a
    }

    /// `A†`
    pub fn dagger(&self) -> &ComplexMatrix {
        &self.dagger
    }

    /// `A^{1/2}`
    pub fn half(&self) -> &ComplexMatrix {
        &self.half
    }

    /// `(A^{1/2})†`
    pub fn half_dagger(&self) -> &ComplexMatrix {
        &self.half_dagger
    }

    /// Orthonormal basis `Q` of `R(A)`, `n × r`.
    pub fn range_basis(&self) -> &ComplexMatrix {
        &self.q
    }

    /// Positive eigenvalues `Λ` matching the columns of `Q`.
    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    /// Orthogonal projection onto `R(A)`.
    pub fn projection(&self) -> &ComplexMatrix {
        &self.projection
    }

    pub fn rank_tol(&self) -> f64 {
        self.rank_tol
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    /// `⟨x, y⟩_A = ⟨Ax, y⟩`.
    pub fn inner(&self, x: &[C64], y: &[C64]) -> C64 {
        dot(&self.a.mat_vec(x), y)
    }

    /// `‖x‖_A = √⟨x, x⟩_A`.
    pub fn a_norm(&self, x: &[C64]) -> Result<f64> {
        if x.len() != self.dim() {
            return Err(Error::dims(self.dim(), x.len()));
        }
        Ok(self.inner(x, x).re.max(0.0).sqrt())
    }

    /// The isometry `x ↦ Λ^{1/2} Q* x` from `(H, ‖·‖_A)` onto `C^r`.
    pub fn embed(&self) -> ComplexMatrix {
        self.scaled_q(|l| l.sqrt()).adjoint()
    }

    /// `Q Λ^{−1/2}`: maps `C^r` coordinates to A-representatives in `R(A)`.
    pub fn lift_vectors(&self) -> ComplexMatrix {
        self.scaled_q(|l| 1.0 / l.sqrt())
    }

    pub(crate) fn scaled_q(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let mut m = self.q.clone();
        for j in 0..m.cols() {
            let s = f(self.lambda[j]);
            for i in 0..m.rows() {
                m[(i, j)] *= s;
            }
        }
        m
    }

    /// `x = Q Λ^{−1/2} y`, the A-representative of compressed coordinates `y`.
    pub fn lift_vector(&self, y: &[C64]) -> Vec<C64> {
        self.lift_vectors().mat_vec(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, ComplexMatrix};

    #[test]
    fn all_ones_weight() {
        let s = SemiHilbertSpace::new(ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert_eq!(s.rank(), 1);
        assert!((s.lambda()[0] - 2.0).abs() < 1e-15);
        let q = s.range_basis().column(0);
        let r = 0.5f64.sqrt();
        assert!((q[0] - c(r, 0.0)).norm() < 1e-15 && (q[1] - c(r, 0.0)).norm() < 1e-15);
        let p = s.projection();
        assert!((p * p).approx_eq(p, 1e-15));
        assert!((s.weight() * p).approx_eq(s.weight(), 1e-15));
    }

    #[test]
    fn identity_weight_norm() {
        let s = SemiHilbertSpace::new(ComplexMatrix::identity(3)).unwrap();
        assert_eq!(s.rank(), 3);
        assert!(s.projection().approx_eq(&ComplexMatrix::identity(3), 0.0));
        assert_eq!(s.a_norm(&[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), 1.0);
        assert!(s.a_norm(&[c(1.0, 0.0)]).is_err());
    }

    #[test]
    fn reciprocal_weight_unit_vectors() {
        let n = 7;
        let a = ComplexMatrix::from_real_diag(&(1..=n).map(|k| 1.0 / k as f64).collect::<Vec<_>>());
        let s = SemiHilbertSpace::new(a).unwrap();
        let mut x = vec![c(0.0, 0.0); n];
        x[n - 1] = c((n as f64).sqrt(), 0.0);
        assert!((s.a_norm(&x).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn block_weight_rank() {
        let a = ComplexMatrix::from_real_diag(&[1.0, 1.0, 2.0, 1.0, 1.0]);
        assert_eq!(SemiHilbertSpace::new(a).unwrap().rank(), 5);
    }

    #[test]
    fn rejects_zero_and_indefinite() {
        assert!(matches!(SemiHilbertSpace::new(ComplexMatrix::zeros(2, 2)), Err(Error::ZeroWeight)));
        assert!(matches!(
            SemiHilbertSpace::new(ComplexMatrix::from_real_diag(&[1.0, -1.0])),
            Err(Error::NotPositive { .. })
        ));
    }

    #[test]
    fn norm_vanishes_on_kernel() {
        let s = SemiHilbertSpace::new(ComplexMatrix::from_real_diag(&[1.0, 0.0])).unwrap();
        assert_eq!(s.a_norm(&[c(0.0, 0.0), c(3.0, 1.0)]).unwrap(), 0.0);
    }
}
