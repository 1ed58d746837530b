//! Random instances for the verification suites.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::matrix::{dot, ComplexMatrix, C64};
use crate::operator::{lift, SemiHilbertOperator};
use crate::space::SemiHilbertSpace;

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 12;

pub fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let data = (0..rows * cols).map(|_| gaussian(rng)).collect();
    ComplexMatrix::new(rows, cols, data).expect("sizes match")
}

/// Gram–Schmidt (applied twice) on the columns of a Gaussian matrix.
pub fn unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let g = gaussian_matrix(rng, n, n);
    let mut cols: Vec<Vec<C64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut v = g.column(j);
        for _ in 0..2 {
            for q in &cols {
                let p = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= p * qi;
                }
            }
        }
        let norm = dot(&v, &v).re.sqrt();
        cols.push(v.into_iter().map(|x| x / norm).collect());
    }
    ComplexMatrix::from_columns(&cols)
}

/// `(n, rank)` with `n ∈ [MIN_DIM, max_dim]`, `rank ∈ [1, min(n, max_rank)]`.
pub fn dims(rng: &mut ChaCha8Rng, max_dim: usize, max_rank: usize) -> (usize, usize) {
    let n = rng.random_range(MIN_DIM..=max_dim);
    let rank = rng.random_range(1..=n.min(max_rank));
    (n, rank)
}

/// A PSD weight of exact rank `rank` with nonzero eigenvalues in `[0.5, 3]`.
pub fn psd(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> ComplexMatrix {
    let u = unitary(rng, n);
    let lambda: Vec<f64> = (0..n)
        .map(|k| if k < rank { rng.random_range(0.5..3.0) } else { 0.0 })
        .collect();
    let a = &(&u * &ComplexMatrix::from_real_diag(&lambda)) * &u.adjoint();
    a.hermitian_part()
}

pub fn space(rng: &mut ChaCha8Rng, n: usize, rank: usize) -> Result<Arc<SemiHilbertSpace>> {
    Ok(Arc::new(SemiHilbertSpace::new(psd(rng, n, rank))?))
}

/// `U diag(z) U*` with Gaussian `z`.
pub fn normal_matrix(rng: &mut ChaCha8Rng, r: usize) -> ComplexMatrix {
    let u = unitary(rng, r);
    let z: Vec<C64> = (0..r).map(|_| gaussian(rng)).collect();
    &(&u * &ComplexMatrix::from_diag(&z)) * &u.adjoint()
}

/// `lift(M) + (I − P) G`: a member of `B_A` with compression `M` and an
/// arbitrary component mapping into `N(A)`.
pub fn b_a_operator(
    rng: &mut ChaCha8Rng,
    space: &Arc<SemiHilbertSpace>,
    m: &ComplexMatrix,
) -> Result<SemiHilbertOperator> {
    let n = space.dim();
    let kernel = &ComplexMatrix::identity(n) - space.projection();
    let g = gaussian_matrix(rng, n, n);
    let base = lift(space, m)?;
    base.with_matrix(base.matrix() + &(&kernel * &g))
}

/// A random A-normal operator in `B_A`.
pub fn a_normal(rng: &mut ChaCha8Rng, max_dim: usize, max_rank: usize) -> Result<SemiHilbertOperator> {
    let (n, rank) = dims(rng, max_dim, max_rank);
    let space = space(rng, n, rank)?;
    let m = normal_matrix(rng, rank);
    b_a_operator(rng, &space, &m)
}

/// A random member of `B_A`, built A-normal with probability one half,
/// and whether it is A-normal.
pub fn mixed(rng: &mut ChaCha8Rng, max_dim: usize) -> Result<(SemiHilbertOperator, bool)> {
    let (n, rank) = dims(rng, max_dim, max_dim);
    let space = space(rng, n, rank)?;
    let normal = rng.random_bool(0.5);
    let m = if normal {
        normal_matrix(rng, rank)
    } else {
        gaussian_matrix(rng, rank, rank)
    };
    Ok((b_a_operator(rng, &space, &m)?, normal || rank == 1))
}

/// Gaussian coefficients of a polynomial of exact degree `deg`.
pub fn polynomial(rng: &mut ChaCha8Rng, deg: usize) -> Vec<C64> {
    (0..=deg).map(|_| gaussian(rng)).collect()
}

/// A point on the A-unit sphere of `R(A)`-directions.
pub fn a_unit_vector(rng: &mut ChaCha8Rng, space: &SemiHilbertSpace) -> Option<Vec<C64>> {
    let x: Vec<C64> = (0..space.dim()).map(|_| gaussian(rng)).collect();
    let norm = space.a_norm(&x).ok()?;
    (norm > 1e-8).then(|| x.into_iter().map(|v| v / norm).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn unitary_is_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = unitary(&mut rng, 7);
        assert!((&u.adjoint() * &u).approx_eq(&ComplexMatrix::identity(7), 1e-13));
    }

    #[test]
    fn generated_weight_has_requested_rank() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for rank in 1..=6 {
            let s = space(&mut rng, 6, rank).unwrap();
            assert_eq!(s.rank(), rank);
        }
    }

    #[test]
    fn b_a_operators_are_adjointable() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let (op, normal) = mixed(&mut rng, 8).unwrap();
            assert!(op.is_a_bounded() && op.is_a_adjointable());
            assert_eq!(op.is_a_normal(1e-9).unwrap(), normal);
        }
    }
}
