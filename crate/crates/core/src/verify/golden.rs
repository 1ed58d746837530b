use std::f64::consts::PI;
use std::time::Instant;

use super::{Outcome, Recorder, Suite, SuiteReport};
use crate::cso::{induces_cso, CsoVerdict};
use crate::error::Result;
use crate::linalg::{convex_hull, hausdorff};
use crate::matrix::{c, ComplexMatrix, C64};
use crate::model::{DiagonalModel, SeqExpr, N_REPORT};
use crate::numrange::{a_numerical_radius, conv_spectrum_compare, numerical_range};
use crate::operator::SemiHilbertOperator;
use crate::spectra::{a_spectral_radius, multiset_distance};

const EXACT: f64 = 1e-12;

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows)
}

fn matrix_error(got: &ComplexMatrix, want: &ComplexMatrix) -> f64 {
    (got - want).max_abs()
}

fn two_by_two(rec: &mut Recorder) -> Result<()> {
    let a = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
    let t = real(&[&[2.0, 2.0], &[0.0, 0.0]]);
    let op = SemiHilbertOperator::from_pair(a.clone(), t.clone())?;
    let sharp = op.sharp_matrix()?;
    let sharp_t = &sharp * &t;
    let t_sharp = &t * &sharp;
    rec.bound("pair_sharp_t", matrix_error(&sharp_t, &real(&[&[2.0, 2.0], &[2.0, 2.0]])), EXACT);
    rec.bound("pair_t_sharp", matrix_error(&t_sharp, &real(&[&[4.0, 4.0], &[0.0, 0.0]])), EXACT);
    let four = real(&[&[4.0, 4.0], &[4.0, 4.0]]);
    rec.bound("pair_a_t_sharp", matrix_error(&(&a * &t_sharp), &four), EXACT);
    rec.bound("pair_a_sharp_t", matrix_error(&(&a * &sharp_t), &four), EXACT);
    rec.flag("pair_is_a_normal", op.is_a_normal(1e-10)?, || "not A-normal".into());
    rec.flag("pair_not_normal_classically", !op.is_a_normal_classic(1e-10)?, || {
        "classically normal".into()
    });
    rec.bound("pair_a_norm", (op.a_operator_norm()? - 2.0).abs(), EXACT);
    Ok(())
}

fn triangle(rec: &mut Recorder) -> Result<()> {
    let j = real(&[&[0.0, 1.0], &[0.0, 0.0]]);
    let a = ComplexMatrix::block_diag(&[&ComplexMatrix::identity(2), &real(&[&[2.0, 0.0, 0.0], &[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0]])]);
    let tail = ComplexMatrix::from_diag(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]);
    let t = ComplexMatrix::block_diag(&[&j, &tail]);
    let op = SemiHilbertOperator::from_pair(a, t)?;
    let region = numerical_range(&op, 1440)?;
    let expected = convex_hull(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)])?;
    let d = hausdorff(&region.inner, &expected)?;
    rec.bound("triangle_range", d, region.err_bound + 1e-8);
    rec.flag("triangle_not_a_normal", !op.is_a_normal(1e-10)?, || "A-normal".into());
    let cmp = conv_spectrum_compare(&op, 1440)?;
    rec.flag("triangle_range_is_hull_of_spectrum", cmp.verdict, || format!("{cmp:?}"));
    Ok(())
}

fn complex_symmetric(rec: &mut Recorder) -> Result<()> {
    let t = real(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]);
    let a = ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0]);
    let report = induces_cso(&SemiHilbertOperator::from_pair(a, t)?)?;
    rec.flag("degenerate_weight_induces_cso", report.verdict == CsoVerdict::Yes, || {
        format!("{:?}", report.verdict)
    });
    let t = real(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 2.0], &[0.0, 0.0, 1.0]]);
    let report = induces_cso(&SemiHilbertOperator::from_pair(ComplexMatrix::identity(3), t)?)?;
    rec.flag("unequal_couplings_not_cso", report.verdict == CsoVerdict::No, || {
        format!("{:?}", report.verdict)
    });
    Ok(())
}

fn nilpotent(rec: &mut Recorder) -> Result<()> {
    let op = SemiHilbertOperator::from_pair(ComplexMatrix::identity(2), real(&[&[0.0, 1.0], &[0.0, 0.0]]))?;
    rec.bound("nilpotent_spectral_radius", a_spectral_radius(&op)?.r_spec, 1e-10);
    rec.bound("nilpotent_numerical_radius", (a_numerical_radius(&op)? - 0.5).abs(), 1e-10);
    rec.bound("nilpotent_norm", (op.a_operator_norm()? - 1.0).abs(), 1e-10);
    Ok(())
}

fn ex1(rec: &mut Recorder) -> Result<()> {
    let limit = C64::from_polar(1.0, PI / 4.0);
    let model = DiagonalModel::diagonal("1/n", "exp(i*(pi/4 + pi/(8*n)))", vec![limit])?;
    let entries: Vec<C64> = (1..=N_REPORT).map(|n| C64::from_polar(1.0, PI / 4.0 + PI / (8.0 * n as f64))).collect();
    let mut with_limit = entries.clone();
    with_limit.push(limit);
    let s = model.model_spectra(N_REPORT)?;
    let dist = |a: &[C64], b: &[C64]| multiset_distance(a, b).unwrap_or(f64::INFINITY);
    rec.bound("ex1_point_spectrum", dist(&s.point, &entries), 1e-10);
    rec.bound("ex1_spectrum", dist(&s.full, &with_limit), 1e-10);
    rec.bound("ex1_approximate_spectrum", dist(&s.approximate, &with_limit), 1e-10);
    rec.bound("ex1_essential_spectrum", dist(&s.essential, &[limit]), 1e-10);

    let closed = model.is_wa_closed()?;
    let offending_ok = closed.offending.len() == 1 && (closed.offending[0] - limit).norm() <= 1e-10;
    rec.flag("ex1_range_not_closed", !closed.closed && offending_ok, || format!("{closed:?}"));

    let closing = model.closing_perturbation(0.1, 1000)?;
    let n0 = closing.changes.first().map_or(0, |ch| ch.n);
    let expected = 2.0 * (PI / (16.0 * n0 as f64)).sin();
    rec.flag("ex1_closing_index", n0 == 4, || format!("n0 = {n0}"));
    rec.bound("ex1_closing_norm", (closing.k_norm - expected).abs(), 1e-10);
    rec.flag("ex1_closed_after_perturbation", closing.model.is_wa_closed()?.closed, || "not closed".into());
    Ok(())
}

fn anderson(rec: &mut Recorder) -> Result<()> {
    let model = DiagonalModel::new(
        Some(ComplexMatrix::identity(2)),
        Some(real(&[&[0.0, 2.0], &[0.0, 0.0]])),
        SeqExpr::parse("1/n")?,
        SeqExpr::parse("exp(i*pi/n)/2")?,
        vec![C64::new(0.5, 0.0)],
    )?;
    let report = model.anderson_verify()?;
    rec.flag("disk_hypotheses", report.hypotheses_hold(), || format!("{report:?}"));
    rec.push(
        "disk_conclusion",
        report.conclusion_checked,
        report.disk_distance.unwrap_or(f64::INFINITY),
        || format!("{report:?}"),
    );
    Ok(())
}

/// Recomputes every published example and compares against its stated
/// value.
pub fn golden_examples() -> SuiteReport {
    let start = Instant::now();
    let examples: [fn(&mut Recorder) -> Result<()>; 6] = [two_by_two, triangle, complex_symmetric, nilpotent, ex1, anderson];
    let per_example: Vec<Vec<Outcome>> = examples
        .iter()
        .map(|f| {
            let mut rec = Recorder::default();
            if let Err(e) = f(&mut rec) {
                rec.flag("evaluation", false, || e.to_string());
            }
            rec.into_outcomes()
        })
        .collect();
    SuiteReport::assemble(Suite::Golden, 0, per_example, start.elapsed())
}
