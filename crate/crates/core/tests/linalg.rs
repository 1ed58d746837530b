mod common;

use common::{hermitian, square, to_oracle, weight};
use proptest::prelude::*;
use semihilbert::linalg::{
    convex_hull, general_eig, hausdorff, herm_eig, pinv, psd_pinv_sqrt, singular_values, DEFAULT_RANK_TOL,
};
use semihilbert::{ComplexMatrix, C64};
use semihilbert_oracle as oracle;

fn points() -> impl Strategy<Value = Vec<C64>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| C64::new(x, y)), 1..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn herm_eig_trace_and_determinant(h in hermitian(8)) {
        let n = h.rows();
        let e = herm_eig(&h).unwrap();
        let scale = h.frobenius_norm().max(1.0);
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - h.trace().re).abs() <= 1e-10 * n as f64 * scale);
        let prod: f64 = e.values.iter().product();
        let det = oracle::determinant(&to_oracle(&h));
        prop_assert!((prod - det.re).abs() <= 1e-10 * scale.powi(n as i32));
        prop_assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
        for k in 0..n {
            let v = e.vector(k);
            let hv = h.mat_vec(&v);
            let r: f64 = hv.iter().zip(&v).map(|(a, b)| (a - b * e.values[k]).norm_sqr()).sum::<f64>().sqrt();
            prop_assert!(r <= 1e-10 * scale);
        }
    }

    #[test]
    fn general_eig_matches_characteristic_roots(m in square(8)) {
        let eig = general_eig(&m).unwrap();
        let reference = oracle::eigenvalues(&to_oracle(&m));
        let d = oracle::matching_distance(&eig, &reference);
        prop_assert!(d <= 1e-8 * (1.0 + m.frobenius_norm()), "distance {d:e}");
        let prod: C64 = eig.iter().product();
        let det = oracle::determinant(&to_oracle(&m));
        prop_assert!((prod - det).norm() <= 1e-8 * (1.0 + det.norm()).max(m.frobenius_norm().powi(m.rows() as i32) * 1e-4));
    }

    #[test]
    fn singular_values_square_to_gram_spectrum(m in square(6)) {
        let s = singular_values(&m).unwrap();
        let gram = to_oracle(&(&m.adjoint() * &m));
        let mut reference: Vec<f64> = oracle::eigenvalues(&gram).iter().map(|z| z.re.max(0.0).sqrt()).collect();
        reference.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in s.iter().zip(&reference) {
            prop_assert!((a - b).abs() <= 1e-6 * (1.0 + m.frobenius_norm()));
        }
    }

    #[test]
    fn psd_pseudo_inverse_is_moore_penrose(a in weight(7)) {
        let d = psd_pinv_sqrt(&a, DEFAULT_RANK_TOL).unwrap();
        let x = &d.dagger;
        let tol = 1e-10 * a.frobenius_norm().max(1.0) * x.frobenius_norm().max(1.0);
        prop_assert!((&(&(&a * x) * &a) - &a).frobenius_norm() <= tol);
        prop_assert!((&(&(x * &a) * x) - x).frobenius_norm() <= tol * x.frobenius_norm().max(1.0));
        prop_assert!((&a * x).hermitian_residual() <= tol);
        prop_assert!((x * &a).hermitian_residual() <= tol);
        prop_assert!((&(&d.half * &d.half) - &a).frobenius_norm() <= tol);
        let p = d.projection();
        prop_assert!((&(&a * x) - &p).frobenius_norm() <= tol);
    }

    #[test]
    fn general_pinv_is_moore_penrose(m in square(6)) {
        let x = pinv(&m, 1e-12).unwrap();
        let tol = 1e-8 * (1.0 + m.frobenius_norm()) * (1.0 + x.frobenius_norm()).powi(2);
        prop_assert!((&(&(&m * &x) * &m) - &m).frobenius_norm() <= tol);
        prop_assert!((&(&(&x * &m) * &x) - &x).frobenius_norm() <= tol);
    }

    #[test]
    fn hull_matches_brute_force(pts in points()) {
        let hull = convex_hull(&pts).unwrap();
        let reference = oracle::brute_force_hull(&pts, 1e-9);
        prop_assert!(oracle::sampled_hausdorff(&hull.vertices, &reference, 8) <= 1e-9);
        for p in &pts {
            prop_assert!(hull.contains(*p, 1e-9));
        }
    }

    #[test]
    fn hull_ignores_order_and_interior_points(pts in points(), seed in any::<u64>(), w in prop::collection::vec(0.01..1.0f64, 3)) {
        let hull = convex_hull(&pts).unwrap();
        let mut shuffled = pts.clone();
        let len = shuffled.len();
        for i in (1..len).rev() {
            shuffled.swap(i, (seed as usize).wrapping_mul(31 + i) % (i + 1));
        }
        let total: f64 = w.iter().sum();
        let k = pts.len();
        let interior = (pts[0] * w[0] + pts[k / 2] * w[1] + pts[k - 1] * w[2]) / total;
        shuffled.push(interior);
        let again = convex_hull(&shuffled).unwrap();
        prop_assert!(hausdorff(&hull, &again).unwrap() <= 1e-9);
        prop_assert_eq!(hull.len(), again.len());
    }

    #[test]
    fn hausdorff_agrees_with_sampling(a in points(), b in points()) {
        let (ha, hb) = (convex_hull(&a).unwrap(), convex_hull(&b).unwrap());
        let exact = hausdorff(&ha, &hb).unwrap();
        let sampled = oracle::sampled_hausdorff(&ha.vertices, &hb.vertices, 64);
        prop_assert!(sampled <= exact + 1e-9);
        prop_assert!(exact <= sampled + 0.2 + 1e-9);
    }
}

#[test]
fn rank_deficient_weight() {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
    let d = psd_pinv_sqrt(&a, DEFAULT_RANK_TOL).unwrap();
    assert_eq!(d.rank, 1);
    assert!((&d.dagger - &a.scale_real(0.25)).max_abs() < 1e-14);
    assert!((d.lambda[0] - 2.0).abs() < 1e-14);
}

#[test]
fn negative_weight_rejected() {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, -0.5]]);
    assert!(matches!(psd_pinv_sqrt(&a, DEFAULT_RANK_TOL), Err(semihilbert::Error::NotPositive { .. })));
}
