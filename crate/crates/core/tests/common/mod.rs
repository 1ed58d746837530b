#![allow(dead_code)]

use proptest::prelude::*;
use semihilbert::{ComplexMatrix, C64};
use semihilbert_oracle::Mat;

pub fn to_oracle(m: &ComplexMatrix) -> Mat {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

pub fn entry() -> impl Strategy<Value = C64> {
    (-3.0..3.0f64, -3.0..3.0f64).prop_map(|(re, im)| C64::new(re, im))
}

pub fn square(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max).prop_flat_map(|n| {
        prop::collection::vec(entry(), n * n).prop_map(move |data| ComplexMatrix::new(n, n, data).unwrap())
    })
}

pub fn hermitian(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    square(max).prop_map(|m| m.hermitian_part())
}

/// A PSD weight `G diag(d) G*` of size `n ∈ [2, max]` whose rank is the
/// number of positive `d`.
pub fn weight(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (2..=max).prop_flat_map(|n| {
        (
            prop::collection::vec(entry(), n * n),
            prop::collection::vec(prop_oneof![Just(0.0), 0.5..3.0f64], n),
        )
            .prop_filter("nonzero weight", |(_, d)| d.iter().any(|&x| x > 0.0))
            .prop_map(move |(g, d)| {
                let q = orthonormalize(&ComplexMatrix::new(n, n, g).unwrap());
                (&(&q * &ComplexMatrix::from_real_diag(&d)) * &q.adjoint()).hermitian_part()
            })
    })
}

/// Columns of `g` made orthonormal by Gram–Schmidt; degenerate columns are
/// replaced by unit vectors.
pub fn orthonormalize(g: &ComplexMatrix) -> ComplexMatrix {
    let n = g.rows();
    let mut cols: Vec<Vec<C64>> = Vec::new();
    for j in 0..g.cols() {
        let mut candidates = vec![g.column(j)];
        candidates.extend((0..n).map(|k| (0..n).map(|i| C64::new(if i == k { 1.0 } else { 0.0 }, 0.0)).collect()));
        for mut v in candidates {
            for _ in 0..2 {
                for q in &cols {
                    let p: C64 = v.iter().zip(q).map(|(a, b)| a * b.conj()).sum();
                    for (vi, qi) in v.iter_mut().zip(q) {
                        *vi -= p * qi;
                    }
                }
            }
            let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-6 {
                cols.push(v.into_iter().map(|z| z / norm).collect());
                break;
            }
        }
    }
    ComplexMatrix::from_columns(&cols)
}
