use std::f64::consts::{PI, TAU};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::generate::{self, MAX_DIM};
use super::{Recorder, Suite};
use crate::cso::{decide_cso, induces_cso, CsoVerdict, DEFAULT_CSO_TOL};
use crate::error::{Error, Result};
use crate::linalg::{convex_hull, hausdorff};
use crate::matrix::{ComplexMatrix, C64};
use crate::model::{DiagonalModel, N_REPORT};
use crate::numrange::{a_numerical_radius, contains_point, numerical_range, Containment, DEFAULT_ANGLES};
use crate::operator::lift;
use crate::spectra::{
    a_approx_spectrum, a_essential_spectrum, a_point_spectrum, a_spectral_radius, a_spectrum, multiset_distance,
    spectral_mapping_check,
};

const TOL: f64 = 1e-10;
/// Threshold on the relative norm-identity residual.
const IDENTITY_TOL: f64 = 1e-9;

pub(super) fn run(suite: Suite, instance: usize, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    match suite {
        Suite::Adjoint => adjoint(rng, rec),
        Suite::Normal => normal(rng, rec),
        Suite::Spectra => spectra(rng, rec),
        Suite::Range => range(rng, rec),
        Suite::Mapping => mapping(rng, rec),
        Suite::Cso => cso(rng, rec),
        Suite::Model => model(instance, rng, rec),
        Suite::Anderson => anderson(rng, rec),
        Suite::Perturb => perturb(rng, rec),
        Suite::Golden => Err(Error::domain("the golden suite has no random instances")),
    }
}

fn rel(x: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        x / scale
    } else {
        x
    }
}

fn adjoint(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let (op, normal) = generate::mixed(rng, MAX_DIM)?;
    let a = op.space().weight();
    let t = op.matrix();
    let sharp = op.sharp_matrix()?;
    let m = op.compress()?;

    let lhs = a * &sharp;
    let rhs = &t.adjoint() * a;
    rec.bound(
        "sharp_solves_adjoint_equation",
        rel((&lhs - &rhs).frobenius_norm(), a.frobenius_norm() * t.frobenius_norm()),
        TOL,
    );
    let sharp_op = op.sharp()?;
    rec.bound(
        "compression_of_sharp_is_adjoint",
        rel((sharp_op.compress()? - &m.adjoint()).frobenius_norm(), m.frobenius_norm()),
        TOL,
    );
    rec.bound(
        "compression_intertwines",
        rel(op.intertwining_residual()?, m.frobenius_norm() * a.frobenius_norm().sqrt()),
        TOL,
    );

    let tat = &(&t.adjoint() * a) * t;
    let sas = &(&sharp.adjoint() * a) * &sharp;
    let scale = a.frobenius_norm() * (t.frobenius_norm().powi(2) + sharp.frobenius_norm().powi(2));
    let residual = rel((&tat - &sas).frobenius_norm(), scale);
    let identity = residual <= IDENTITY_TOL;
    let flagged = op.is_a_normal(IDENTITY_TOL)?;
    rec.push("norm_identity_iff_a_normal", identity == flagged && flagged == normal, residual, || {
        format!("identity residual {residual:e}, is_a_normal {flagged}, generated normal {normal}")
    });
    Ok(())
}

fn normal(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let (op, normal) = generate::mixed(rng, MAX_DIM)?;
    let check = op.normality(TOL)?;
    rec.flag("definition_matches_compression", check.consistent() && check.by_definition() == normal, || {
        format!("{check:?}, generated normal {normal}")
    });
    let sharp = op.sharp()?;
    rec.flag(
        "sharp_is_a_normal_iff_operator_is",
        sharp.is_a_normal(TOL)? == op.is_a_normal(TOL)?,
        || "A-normality of T and its A-adjoint differ".into(),
    );

    let space = op.space().clone();
    let m = generate::normal_matrix(rng, space.rank());
    let t = generate::b_a_operator(rng, &space, &m)?;
    let mut shifted_ok = true;
    for _ in 0..20 {
        let lambda = generate::gaussian(rng) * 3.0;
        shifted_ok &= t.shifted(lambda)?.is_a_normal(TOL)?;
    }
    rec.flag("shifts_preserve_a_normality", shifted_ok, || "a shift is not A-normal".into());

    match t.a_inverse() {
        Ok(s) => {
            rec.flag("a_inverse_is_a_normal", s.is_a_normal(TOL)?, || "A-inverse is not A-normal".into());
            let a = space.weight();
            let ss = s.sharp_matrix()?;
            let ts = t.sharp_matrix()?;
            let left = &(&(a * &ss) * &ts) - a;
            let right = &(&(a * &ts) * &ss) - a;
            let scale = a.frobenius_norm() * (1.0 + ss.frobenius_norm() * ts.frobenius_norm());
            rec.bound(
                "adjoints_of_inverse_pair_invert",
                rel(left.frobenius_norm().max(right.frobenius_norm()), scale),
                TOL,
            );
        }
        Err(Error::NotAInvertible { .. }) => {}
        Err(e) => return Err(e),
    }

    let m1 = generate::gaussian_matrix(rng, space.rank(), space.rank());
    let m2 = generate::gaussian_matrix(rng, space.rank(), space.rank());
    let t1 = generate::b_a_operator(rng, &space, &m1)?;
    let t2 = generate::b_a_operator(rng, &space, &m2)?;
    let product = t1.compose(&t2)?;
    let expected = &m1 * &m2;
    rec.bound(
        "compression_is_multiplicative",
        rel((product.compress()? - &expected).frobenius_norm(), m1.frobenius_norm() * m2.frobenius_norm()),
        TOL,
    );

    let r = a_spectral_radius(&t)?.r_spec;
    let w = a_numerical_radius(&t)?;
    let norm = t.a_operator_norm()?;
    rec.bound("radius_equals_numerical_radius", (r - w).abs(), 1e-7);
    rec.bound("numerical_radius_equals_norm", (w - norm).abs(), 1e-7);
    Ok(())
}

fn spectra(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let (op, _) = generate::mixed(rng, MAX_DIM)?;
    let m = op.compress()?.clone();
    let scale = 1.0 + m.frobenius_norm();
    let full = a_spectrum(&op)?;
    let point = a_point_spectrum(&op)?;
    let worst = point
        .points
        .iter()
        .map(|z| full.points.iter().map(|w| (z - w).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    rec.bound("point_spectrum_in_spectrum", worst, 1e-8 * scale);

    let approx = a_approx_spectrum(&op)?;
    let residual = approx.residuals.iter().copied().fold(0.0, f64::max);
    let same = approx.set.distinct().len() == full.distinct().len()
        && approx.set.points.iter().all(|z| full.contains(*z, 1e-12 * scale));
    rec.push("approximate_spectrum_equals_spectrum", same && residual <= 1e-8 * scale, residual, || {
        format!("sets equal {same}, witness residual {residual:e}")
    });
    let unit = approx
        .witnesses
        .iter()
        .map(|x| op.space().a_norm(x).map(|n| (n - 1.0).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    rec.bound("approximate_witnesses_are_a_unit", unit, 1e-10);

    let region = numerical_range(&op, DEFAULT_ANGLES)?;
    let outside = full.points.iter().filter(|z| contains_point(&region, **z) == Containment::Outside).count();
    rec.flag("spectrum_in_range_closure", outside == 0, || format!("{outside} eigenvalues outside"));

    for lambda in [generate::gaussian(rng) * 2.0, full.points[0]] {
        let ess = a_essential_spectrum(&op, lambda)?;
        let w = &ess.witness;
        let size = op.space().weight().frobenius_norm()
            * (1.0 + op.matrix().shift(lambda).frobenius_norm() * w.s.frobenius_norm());
        let residual = rel(w.residual_left.max(w.residual_right), size);
        rec.push("essential_spectrum_empty", ess.set.is_empty() && residual <= 1e-9, residual, || {
            format!("witness residual {residual:e} at {lambda}")
        });
    }

    let space = op.space().clone();
    let eig = full.points.clone();
    let square = &m * &m;
    let eig2 = crate::linalg::general_eig(&square)?;
    // At most one factor is made singular: a product of two singular
    // factors can vanish, leaving nothing to decide.
    let singular = rng.random_range(0..3);
    let mut mu1 = generate::gaussian(rng);
    let mut mu2 = generate::gaussian(rng);
    if singular == 1 {
        mu1 = eig[rng.random_range(0..eig.len())];
    } else if singular == 2 {
        mu2 = eig2[rng.random_range(0..eig2.len())];
    }
    let t1 = lift(&space, &m.shift(mu1))?;
    let t2 = lift(&space, &square.shift(mu2))?;
    let both = t1.a_inverse().is_ok() && t2.a_inverse().is_ok();
    let product = t1.compose(&t2)?.a_inverse().is_ok();
    rec.flag("product_invertible_iff_factors", both == product, || {
        format!("factors invertible {both}, product invertible {product}")
    });

    let norm = op.a_operator_norm()?;
    let lambda = C64::from_polar(norm * rng.random_range(1.01..3.0) + 0.01, rng.random_range(0.0..TAU));
    rec.flag("outside_norm_is_resolvent", op.shifted(lambda)?.a_inverse().is_ok(), || {
        format!("T - {lambda} not A-invertible with ||T||_A = {norm}")
    });

    let radius = a_spectral_radius(&op)?;
    rec.push(
        "spectral_radius_formula",
        radius.consistent(),
        (radius.r_spec - radius.r_limit).abs(),
        || format!("{radius:?}"),
    );
    Ok(())
}

fn range(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let t = generate::a_normal(rng, MAX_DIM, MAX_DIM)?;
    let region = numerical_range(&t, 2048)?;
    let hull = convex_hull(&a_spectrum(&t)?.points)?;
    rec.bound("a_normal_range_is_hull_of_spectrum", hausdorff(&region.inner, &hull)?, 1e-6);

    let (op, _) = generate::mixed(rng, MAX_DIM)?;
    let region = numerical_range(&op, DEFAULT_ANGLES)?;
    let scale = 1.0 + region.outer.diameter() + region.outer.max_modulus();
    let outside = a_point_spectrum(&op)?
        .points
        .iter()
        .filter(|z| contains_point(&region, **z) == Containment::Outside)
        .count();
    rec.flag("point_spectrum_in_range", outside == 0, || format!("{outside} eigenvalues outside"));
    rec.bound("range_closed_at_finite_rank", region.err_bound, 1e-5 * scale);

    let alpha = generate::gaussian(rng) * 2.0;
    let beta = generate::gaussian(rng) * 2.0;
    let moved = op.with_matrix(&op.matrix().scale(alpha) + &ComplexMatrix::identity(op.space().dim()).scale(beta))?;
    let moved_region = numerical_range(&moved, DEFAULT_ANGLES)?;
    let expected = region.inner.translate_scale(alpha, beta)?;
    let d = hausdorff(&moved_region.inner, &expected)?;
    let allowed = alpha.norm() * region.err_bound + moved_region.err_bound + 1e-9 * scale * (1.0 + alpha.norm());
    rec.bound("affine_covariance", d, allowed);

    let samples = if op.space().rank() <= 6 { 10_000 } else { 2_000 };
    let mut worst_outer: f64 = 0.0;
    let mut worst_inner: f64 = 0.0;
    for _ in 0..samples {
        let Some(x) = generate::a_unit_vector(rng, op.space()) else {
            continue;
        };
        let z = op.space().inner(&op.matrix().mat_vec(&x), &x);
        worst_outer = worst_outer.max(region.outer.distance(z));
        worst_inner = worst_inner.max(region.inner.distance(z) - 2.0 * region.err_bound);
    }
    rec.bound("sampled_values_in_outer", worst_outer, 1e-9 * scale);
    rec.bound("sampled_values_near_inner", worst_inner, 1e-9 * scale);
    Ok(())
}

fn mapping(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let (op, _) = generate::mixed(rng, MAX_DIM)?;
    let deg = rng.random_range(1..=3);
    let coeffs = generate::polynomial(rng, deg);
    let check = spectral_mapping_check(&op, &coeffs)?;
    rec.push("spectral_mapping", check.holds, check.max_distance, || {
        format!("degree {deg}: distance {:e} > {:e}", check.max_distance, check.tolerance)
    });
    Ok(())
}

fn cso(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let t = generate::a_normal(rng, MAX_DIM, 6)?;
    let report = induces_cso(&t)?;
    rec.flag("a_normal_induces_cso", report.verdict == CsoVerdict::Yes, || format!("{:?}", report.route));
    if let Some(res) = report.basis_residual {
        rec.bound("cso_basis_is_symmetric", res, DEFAULT_CSO_TOL * (1.0 + t.compress()?.frobenius_norm()));
    }

    let (n, rank) = generate::dims(rng, MAX_DIM, 6);
    let space = generate::space(rng, n, rank)?;
    let g = generate::gaussian_matrix(rng, rank, rank);
    let sym = &g + &g.transpose();
    let report = induces_cso(&lift(&space, &sym)?)?;
    rec.flag("symmetric_compression_is_cso", report.verdict == CsoVerdict::Yes, || {
        format!("{:?}", report.route)
    });

    let m = generate::gaussian_matrix(rng, rank, rank);
    let u = generate::unitary(rng, rank);
    let similar = &(&u * &m) * &u.adjoint();
    let v1 = decide_cso(&m, DEFAULT_CSO_TOL)?.verdict;
    let v2 = decide_cso(&similar, DEFAULT_CSO_TOL)?.verdict;
    rec.flag("verdict_unitarily_invariant", v1 == v2, || format!("{v1:?} vs {v2:?}"));
    Ok(())
}

/// A diagonal model `λ_n = c + ρ e^{i(φ + ψ/n)}` with its limit.
fn arc_model(rng: &mut ChaCha8Rng, center: C64, radius: f64) -> Result<(DiagonalModel, C64)> {
    let round = |x: f64| -> f64 { format!("{x:.6}").parse().expect("formatted float") };
    let (cre, cim, rho) = (round(center.re), round(center.im), round(radius));
    let phi = round(rng.random_range(0.0..TAU));
    let psi = round(rng.random_range(0.1..1.0)) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let weight = ["1/n", "1", "1/(n+1)", "1/n^2"][rng.random_range(0..4)];
    let lambda = format!("({cre:?} + {cim:?}*i) + {rho:?}*exp(i*({phi:?} + {psi:?}/n))");
    let limit = C64::new(cre, cim) + C64::from_polar(rho, phi);
    Ok((DiagonalModel::diagonal(weight, &lambda, vec![limit])?, limit))
}

fn model(instance: usize, rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    if instance == 0 {
        let ex1 = DiagonalModel::diagonal("1/n", "exp(i*(pi/4 + pi/(8*n)))", vec![C64::from_polar(1.0, PI / 4.0)])?;
        let s = ex1.model_spectra(N_REPORT)?;
        let entries: Vec<C64> = (1..=N_REPORT).map(|n| C64::from_polar(1.0, PI / 4.0 + PI / (8.0 * n as f64))).collect();
        let d = multiset_distance(&s.point, &entries).unwrap_or(f64::INFINITY);
        rec.bound("ex1_point_spectrum", d, 1e-10);
    }

    let center = generate::gaussian(rng);
    let radius = rng.random_range(0.2..2.0);
    let (model, limit) = arc_model(rng, center, radius)?;
    let n = rng.random_range(1..=40);
    let trunc = model.truncate(n)?;
    rec.flag("truncations_are_a_normal", trunc.is_a_normal(TOL)?, || format!("N = {n}"));
    let computed = a_spectrum(&trunc)?.points;
    let fast = model.truncation_spectrum(n)?;
    rec.bound(
        "truncation_spectrum_matches_entries",
        multiset_distance(&computed, &fast).unwrap_or(f64::INFINITY),
        1e-9 * (1.0 + limit.norm()),
    );
    let mut outside = 0;
    for z in &fast {
        if !model.spectrum_contains(*z, 1e-12)? {
            outside += 1;
        }
    }
    rec.flag("truncation_spectrum_in_model_spectrum", outside == 0, || format!("{outside} points outside"));

    let closure = model.wa_closure()?;
    let mut previous = f64::INFINITY;
    let mut monotone = true;
    let mut last = 0.0;
    for k in 2..=12 {
        let hull = convex_hull(&model.truncation_spectrum(1 << k)?)?;
        let d = hausdorff(&hull, &closure)?;
        monotone &= d <= previous + 1e-12;
        previous = d;
        last = d;
    }
    let gap = (model.entry(1 << 12) - limit).norm();
    rec.push("truncation_hulls_converge", monotone && last <= gap + 1e-12, last, || {
        format!("monotone {monotone}, final distance {last:e}, entry gap {gap:e}")
    });
    Ok(())
}

fn anderson(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let u = generate::unitary(rng, 2);
    let jordan = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
    let head = &(&u * &jordan) * &u.adjoint();
    let rho = rng.random_range(0.1..0.9);
    let (tail, _) = arc_model(rng, C64::new(0.0, 0.0), rho)?;
    let positive = tail_with_head(&tail, head.clone())?;
    let report = positive.anderson_verify()?;
    rec.flag("disk_instance_satisfies_hypotheses", report.hypotheses_hold(), || format!("{report:?}"));
    rec.flag("disk_instance_conclusion", report.conclusion_checked, || format!("{report:?}"));

    let scaled = tail_with_head(&tail, head.scale_real(rng.random_range(1.2..2.0)))?;
    let report = scaled.anderson_verify()?;
    rec.flag("range_outside_disk_detected", !report.range_in_disk && !report.hypotheses_hold(), || {
        format!("{report:?}")
    });

    let on_circle = rng.random_bool(0.5);
    let rho = if on_circle { 1.0 } else { rng.random_range(0.1..0.95) };
    let (free, _) = arc_model(rng, C64::new(0.0, 0.0), rho)?;
    let report = free.anderson_verify()?;
    let disk = report.disk_distance.is_some_and(|d| d <= 1e-6);
    rec.flag("head_free_models_never_fake_a_disk", !report.hypotheses_hold() || disk, || {
        format!("{report:?}")
    });
    if on_circle {
        rec.flag("circle_limits_break_essential_hypothesis", !report.ess_in_open_disk, || format!("{report:?}"));
    }
    Ok(())
}

fn tail_with_head(tail: &DiagonalModel, head: ComplexMatrix) -> Result<DiagonalModel> {
    let mut value: serde_json::Value = serde_json::from_str(&tail.to_json()?)?;
    value["head_A"] = serde_json::to_value(ComplexMatrix::identity(head.rows()))?;
    value["head_T"] = serde_json::to_value(head)?;
    DiagonalModel::from_json(&value.to_string())
}

fn perturb(rng: &mut ChaCha8Rng, rec: &mut Recorder) -> Result<()> {
    let center = generate::gaussian(rng);
    let radius = rng.random_range(0.2..2.0);
    let (model, _) = arc_model(rng, center, radius)?;
    let eps = rng.random_range(0.05..0.5);
    let offending = model.is_wa_closed()?.offending.len();
    let closing = model.closing_perturbation(eps, 100_000)?;
    rec.push("perturbation_is_small", closing.k_norm < eps, closing.k_norm, || {
        format!("||K|| = {:e} with eps = {eps:e}", closing.k_norm)
    });
    rec.flag("perturbation_has_finite_rank", closing.changes.len() <= offending, || {
        format!("{} changes for {offending} offending points", closing.changes.len())
    });
    rec.flag("perturbed_range_is_closed", closing.model.is_wa_closed()?.closed, || "still not closed".into());
    let before = model.model_spectra(N_REPORT)?;
    let after = closing.model.model_spectra(N_REPORT)?;
    let differing = before.point.iter().filter(|z| !after.point.iter().any(|w| (*w - **z).norm() <= 1e-12)).count();
    rec.flag("spectrum_changes_in_few_entries", differing <= offending, || {
        format!("{differing} entries changed")
    });

    let (op, _) = generate::mixed(rng, MAX_DIM)?;
    let region = numerical_range(&op, DEFAULT_ANGLES)?;
    let gap = hausdorff(&region.inner, &region.outer)?;
    rec.bound("finite_pair_range_is_closed", gap, region.err_bound * (1.0 + 1e-9) + 1e-12);
    Ok(())
}
