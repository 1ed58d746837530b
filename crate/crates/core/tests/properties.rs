mod common;

use std::f64::consts::TAU;
use std::sync::Arc;

use common::{entry, square, to_oracle, weight};
use proptest::prelude::*;
use semihilbert::cso::{decide_cso, CsoVerdict, DEFAULT_CSO_TOL};
use semihilbert::model::{DiagonalModel, SeqExpr};
use semihilbert::numrange::{numerical_radius_of, numerical_range_of};
use semihilbert::operator::lift;
use semihilbert::spectra::{a_spectrum, spectral_mapping_check};
use semihilbert::{ComplexMatrix, SemiHilbertOperator, SemiHilbertSpace, C64};
use semihilbert_oracle as oracle;

/// A weight together with a compression of matching size.
fn weighted_compression() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix)> {
    weight(6).prop_flat_map(|a| {
        let r = SemiHilbertSpace::new(a.clone()).unwrap().rank();
        (Just(a), prop::collection::vec(entry(), r * r).prop_map(move |d| ComplexMatrix::new(r, r, d).unwrap()))
    })
}

fn lifted(a: &ComplexMatrix, m: &ComplexMatrix) -> SemiHilbertOperator {
    let space = Arc::new(SemiHilbertSpace::new(a.clone()).unwrap());
    lift(&space, m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn lift_then_compress_is_identity((a, m) in weighted_compression()) {
        let t = lifted(&a, &m);
        prop_assert!(t.is_a_bounded() && t.is_a_adjointable());
        let back = t.compress().unwrap();
        prop_assert!((back - &m).frobenius_norm() <= 1e-10 * (1.0 + m.frobenius_norm()));
        let z = t.space().embed();
        let lhs = &a * t.matrix();
        let rhs = &(&z.adjoint() * &m) * &z;
        prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-10 * (1.0 + a.frobenius_norm() * m.frobenius_norm()));
    }

    #[test]
    fn sharp_compresses_to_adjoint((a, m) in weighted_compression()) {
        let t = lifted(&a, &m);
        let sharp = t.sharp().unwrap();
        let scale = 1.0 + m.frobenius_norm();
        prop_assert!((sharp.compress().unwrap() - &m.adjoint()).frobenius_norm() <= 1e-10 * scale);
        let lhs = &a * sharp.matrix();
        let rhs = &t.matrix().adjoint() * &a;
        prop_assert!((&lhs - &rhs).frobenius_norm() <= 1e-10 * scale * (1.0 + a.frobenius_norm()));
    }

    #[test]
    fn a_normality_is_normality_of_compression((a, m) in weighted_compression()) {
        let t = lifted(&a, &m);
        let normal_m = (&(&m * &m.adjoint()) - &(&m.adjoint() * &m)).frobenius_norm() <= 1e-9 * (1.0 + m.frobenius_norm().powi(2));
        prop_assert_eq!(t.is_a_normal(1e-9).unwrap(), normal_m);
        let check = t.normality(1e-9).unwrap();
        prop_assert!(check.consistent());
    }

    #[test]
    fn range_support_brackets_oracle(m in square(5)) {
        let region = numerical_range_of(&m, 360).unwrap();
        let om = to_oracle(&m);
        let tol = 1e-9 * (1.0 + m.frobenius_norm());
        for k in 0..24 {
            let theta = TAU * (k as f64 + 0.37) / 24.0;
            let exact = oracle::range_support(&om, theta);
            prop_assert!(region.outer.support(theta) >= exact - tol);
            prop_assert!(region.inner.support(theta) <= exact + tol);
            prop_assert!(region.inner.support(theta) >= exact - region.err_bound - tol);
        }
    }

    #[test]
    fn numerical_radius_matches_grid_oracle(m in square(5)) {
        let w = numerical_radius_of(&m).unwrap();
        let grid = oracle::numerical_radius(&to_oracle(&m), 2048);
        let scale = 1.0 + m.frobenius_norm();
        prop_assert!(w >= grid - 1e-9 * scale);
        prop_assert!(w <= grid + 1e-5 * scale);
    }

    #[test]
    fn spectral_mapping_holds((a, m) in weighted_compression(), coeffs in prop::collection::vec(entry(), 2..=4)) {
        let t = lifted(&a, &m);
        let check = spectral_mapping_check(&t, &coeffs).unwrap();
        prop_assert!(check.holds, "{check:?}");
    }

    #[test]
    fn spectrum_matches_oracle((a, m) in weighted_compression()) {
        let t = lifted(&a, &m);
        let sigma = a_spectrum(&t).unwrap().points;
        let reference = oracle::eigenvalues(&to_oracle(&m));
        prop_assert!(oracle::matching_distance(&sigma, &reference) <= 1e-8 * (1.0 + m.frobenius_norm()));
    }

    #[test]
    fn symmetric_matrices_are_cso(g in square(5)) {
        let s = &g + &g.transpose();
        let d = decide_cso(&s, DEFAULT_CSO_TOL).unwrap();
        prop_assert_eq!(d.verdict, CsoVerdict::Yes);
        let j = d.witness.unwrap();
        prop_assert!(j.symmetry_residual(&s) <= 1e-8 * (1.0 + s.frobenius_norm()));
    }

    #[test]
    fn unitary_similarity_preserves_cso(g in square(4), h in square(4)) {
        let n = g.rows().min(h.rows());
        let g = ComplexMatrix::from_rows(&(0..n).map(|i| g.row(i)[..n].to_vec()).collect::<Vec<_>>());
        let h = ComplexMatrix::from_rows(&(0..n).map(|i| h.row(i)[..n].to_vec()).collect::<Vec<_>>());
        let u = common::orthonormalize(&h);
        let moved = &(&u * &g) * &u.adjoint();
        let v1 = decide_cso(&g, DEFAULT_CSO_TOL).unwrap().verdict;
        let v2 = decide_cso(&moved, DEFAULT_CSO_TOL).unwrap().verdict;
        prop_assert_eq!(v1, v2);
    }
}

fn expr_source() -> impl Strategy<Value = String> {
    let leaf = prop_oneof![
        Just("n".to_string()),
        Just("i".to_string()),
        Just("pi".to_string()),
        (1u32..20).prop_map(|k| k.to_string()),
        (0.1..9.9f64).prop_map(|x| format!("{x:.3}")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone(), prop_oneof![Just("+"), Just("-"), Just("*"), Just("/")])
                .prop_map(|(a, b, op)| format!("({a}) {op} ({b})")),
            (inner.clone(), 0u32..4).prop_map(|(a, k)| format!("({a})^{k}")),
            (inner.clone(), prop_oneof![Just("exp"), Just("sin"), Just("cos"), Just("conj"), Just("abs")])
                .prop_map(|(a, f)| format!("{f}({a} / 10)")),
            inner.prop_map(|a| format!("-{a}")),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn canonical_form_round_trips(src in expr_source(), n in 1usize..50) {
        let e = SeqExpr::parse(&src).unwrap();
        let again = SeqExpr::parse(&e.canonical()).unwrap();
        let (x, y) = (e.eval(n), again.eval(n));
        prop_assert!(x == y || (x.re.is_nan() && y.re.is_nan()) || (x - y).norm() <= 1e-12 * (1.0 + x.norm()));
        prop_assert_eq!(again.canonical(), e.canonical());
    }

    #[test]
    fn model_json_round_trips(phi in 0.0..TAU, psi in 0.1..1.0f64, rho in 0.1..3.0f64, k in 1usize..20) {
        let lambda = format!("{rho:?}*exp(i*({phi:?} + {psi:?}/n))");
        let limit = C64::from_polar(rho, phi);
        let model = DiagonalModel::diagonal("1/n", &lambda, vec![limit]).unwrap();
        let closing = model.closing_perturbation(psi * rho / k as f64, 1_000_000).unwrap();
        for m in [&model, &closing.model] {
            let text = m.to_json().unwrap();
            let back = DiagonalModel::from_json(&text).unwrap();
            prop_assert_eq!(&back, m);
            prop_assert_eq!(back.to_json().unwrap(), text);
        }
    }
}

#[test]
fn matrix_file_round_trip() {
    let m = ComplexMatrix::from_rows(&[vec![C64::new(1.5, -2.0), C64::new(0.0, 1e-300)], vec![C64::new(-0.1, 0.0), C64::new(3.0, 4.0)]]);
    let text = serde_json::to_string(&m).unwrap();
    let back: ComplexMatrix = serde_json::from_str(&text).unwrap();
    assert_eq!(back, m);
    assert!(serde_json::from_str::<ComplexMatrix>(r#"{"rows":2,"cols":2,"data":[[1,0]]}"#).is_err());
}
