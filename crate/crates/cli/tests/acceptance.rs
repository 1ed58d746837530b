//! The acceptance criteria, one line of output per criterion. Runs without
//! the libtest harness so the summary is always visible.

use std::f64::consts::PI;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use semihilbert::cso::{induces_cso, CsoVerdict};
use semihilbert::linalg::{convex_hull, general_eig, hausdorff, hausdorff_to_disk, herm_eig};
use semihilbert::model::{DiagonalModel, SeqExpr, N_REPORT};
use semihilbert::numrange::{a_numerical_radius, conv_spectrum_compare, numerical_range};
use semihilbert::spectra::{a_spectral_radius, a_spectrum, multiset_distance};
use semihilbert::verify::{generate, instance_rng, run_suite, Suite, SuiteReport};
use semihilbert::{c, ComplexMatrix, SemiHilbertOperator, C64};
use semihilbert_oracle as oracle;

type Outcome = Result<String, String>;

/// Name, check and runtime limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, Option<u64>);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn real(rows: &[&[f64]]) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(rows)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn suite_clean(report: &SuiteReport, check: Option<&str>) -> Result<(), String> {
    let failures: Vec<_> = report
        .failures
        .iter()
        .filter(|f| check.is_none_or(|name| f.check == name))
        .collect();
    ensure(failures.is_empty(), || {
        let f = failures[0];
        format!("{} failure(s), first: {} instance {}: {}", failures.len(), f.check, f.instance, f.detail)
    })
}

fn golden_pair() -> Outcome {
    let a = real(&[&[1.0, 1.0], &[1.0, 1.0]]);
    let t = real(&[&[2.0, 2.0], &[0.0, 0.0]]);
    let op = SemiHilbertOperator::from_pair(a.clone(), t.clone()).map_err(err)?;
    let sharp = op.sharp_matrix().map_err(err)?;
    let st = &sharp * &t;
    let ts = &t * &sharp;
    let four = real(&[&[4.0, 4.0], &[4.0, 4.0]]);
    let errors = [
        (&st - &real(&[&[2.0, 2.0], &[2.0, 2.0]])).max_abs(),
        (&ts - &real(&[&[4.0, 4.0], &[0.0, 0.0]])).max_abs(),
        (&(&a * &ts) - &four).max_abs(),
        (&(&a * &st) - &four).max_abs(),
    ];
    let worst = errors.iter().copied().fold(0.0, f64::max);
    ensure(worst <= 1e-12, || format!("product error {worst:e}"))?;
    ensure(op.is_a_normal(1e-10).map_err(err)?, || "not A-normal".into())?;
    ensure((&st - &ts).max_abs() > 1.0, || "products coincide".into())?;
    Ok(format!("max product error {worst:.1e}"))
}

fn golden_triangle() -> Outcome {
    let a = ComplexMatrix::block_diag(&[&ComplexMatrix::identity(2), &ComplexMatrix::from_real_diag(&[2.0, 1.0, 1.0])]);
    let t = ComplexMatrix::block_diag(&[
        &real(&[&[0.0, 1.0], &[0.0, 0.0]]),
        &ComplexMatrix::from_diag(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]),
    ]);
    let op = SemiHilbertOperator::from_pair(a, t).map_err(err)?;
    let region = numerical_range(&op, 1440).map_err(err)?;
    let triangle = convex_hull(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]).map_err(err)?;
    let d = hausdorff(&region.inner, &triangle).map_err(err)?;
    ensure(d <= region.err_bound + 1e-8, || format!("hausdorff {d:e} > {:e}", region.err_bound + 1e-8))?;
    ensure(!op.is_a_normal(1e-10).map_err(err)?, || "reported A-normal".into())?;
    let cmp = conv_spectrum_compare(&op, 1440).map_err(err)?;
    ensure(cmp.verdict, || format!("{cmp:?}"))?;
    Ok(format!("hausdorff {d:.1e}, err_bound {:.1e}", region.err_bound))
}

fn golden_cso() -> Outcome {
    let yes = SemiHilbertOperator::from_pair(
        ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0]),
        real(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 0.0], &[0.0, 0.0, 1.0]]),
    )
    .map_err(err)?;
    let no = SemiHilbertOperator::from_pair(
        ComplexMatrix::identity(3),
        real(&[&[1.0, 1.0, 0.0], &[0.0, 0.0, 2.0], &[0.0, 0.0, 1.0]]),
    )
    .map_err(err)?;
    let v1 = induces_cso(&yes).map_err(err)?.verdict;
    let v2 = induces_cso(&no).map_err(err)?.verdict;
    ensure(v1 == CsoVerdict::Yes && v2 == CsoVerdict::No, || format!("verdicts {v1:?}, {v2:?}"))?;
    Ok("yes / no".into())
}

fn ex1() -> Result<DiagonalModel, String> {
    DiagonalModel::diagonal("1/n", "exp(i*(pi/4 + pi/(8*n)))", vec![C64::from_polar(1.0, PI / 4.0)]).map_err(err)
}

fn ex1_spectra() -> Outcome {
    let model = ex1()?;
    let limit = C64::from_polar(1.0, PI / 4.0);
    let entries: Vec<C64> = (1..=N_REPORT)
        .map(|n| C64::from_polar(1.0, PI / 4.0 + PI / (8.0 * n as f64)))
        .collect();
    let mut with_limit = entries.clone();
    with_limit.push(limit);
    let s = model.model_spectra(N_REPORT).map_err(err)?;
    let dist = |a: &[C64], b: &[C64]| multiset_distance(a, b).unwrap_or(f64::INFINITY);
    let worst = [
        dist(&s.point, &entries),
        dist(&s.full, &with_limit),
        dist(&s.approximate, &with_limit),
        dist(&s.essential, &[limit]),
    ]
    .into_iter()
    .fold(0.0, f64::max);
    ensure(worst <= 1e-10, || format!("set distance {worst:e}"))?;
    let closed = model.is_wa_closed().map_err(err)?;
    ensure(
        !closed.closed && closed.offending.len() == 1 && (closed.offending[0] - limit).norm() <= 1e-10,
        || format!("{closed:?}"),
    )?;
    Ok(format!("set distance {worst:.1e}, not closed at e^(i pi/4)"))
}

fn ex1_closing() -> Outcome {
    let closing = ex1()?.closing_perturbation(0.1, 1000).map_err(err)?;
    let n0 = closing.changes.first().map(|ch| ch.n).ok_or("no change")?;
    let expected = 2.0 * (PI / (16.0 * n0 as f64)).sin();
    ensure(closing.k_norm < 0.1, || format!("K_norm {}", closing.k_norm))?;
    ensure((closing.k_norm - expected).abs() <= 1e-10, || {
        format!("K_norm {} vs {expected}", closing.k_norm)
    })?;
    ensure(closing.changes.len() == 1, || "rank of K is not one".into())?;
    ensure(closing.model.is_wa_closed().map_err(err)?.closed, || "still not closed".into())?;
    Ok(format!("n0 = {n0}, K_norm = {:.12}", closing.k_norm))
}

fn normal_range_hull() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let mut rng = instance_rng(12, i);
        let op = generate::a_normal(&mut rng, 12, 12).map_err(err)?;
        let region = numerical_range(&op, 2048).map_err(err)?;
        let hull = convex_hull(&a_spectrum(&op).map_err(err)?.points).map_err(err)?;
        let d = hausdorff(&region.inner, &hull).map_err(err)?.max(hausdorff(&region.outer, &hull).map_err(err)?);
        ensure(d <= 1e-6, || format!("instance {i}: hausdorff {d:e}"))?;
        worst = worst.max(d);
    }
    Ok(format!("worst hausdorff {worst:.1e} over 100 lifts"))
}

fn norm_identity() -> Outcome {
    let report = run_suite(Suite::Adjoint, 7, 100);
    suite_clean(&report, Some("norm_identity_iff_a_normal"))?;
    let summary = report.checks.iter().find(|c| c.check == "norm_identity_iff_a_normal").ok_or("check missing")?;
    ensure(summary.passed == 100, || format!("{} instances", summary.passed))?;
    Ok("100/100 instances agree".into())
}

fn spectral_mapping() -> Outcome {
    let report = run_suite(Suite::Mapping, 8, 50);
    suite_clean(&report, None)?;
    Ok(format!("50/50, max distance {:.1e}", report.max_residual))
}

fn radius_chain() -> Outcome {
    let report = run_suite(Suite::Normal, 9, 100);
    suite_clean(&report, Some("radius_equals_numerical_radius"))?;
    suite_clean(&report, Some("numerical_radius_equals_norm"))?;
    let op = SemiHilbertOperator::from_pair(ComplexMatrix::identity(2), real(&[&[0.0, 1.0], &[0.0, 0.0]])).map_err(err)?;
    let r = a_spectral_radius(&op).map_err(err)?.r_spec;
    let w = a_numerical_radius(&op).map_err(err)?;
    let n = op.a_operator_norm().map_err(err)?;
    ensure(r.abs() <= 1e-10 && (w - 0.5).abs() <= 1e-10 && (n - 1.0).abs() <= 1e-10, || {
        format!("nilpotent r = {r}, w = {w}, norm = {n}")
    })?;
    Ok("100 lifts agree; nilpotent 0 < 1/2 < 1".into())
}

fn anderson() -> Outcome {
    let model = DiagonalModel::new(
        Some(ComplexMatrix::identity(2)),
        Some(real(&[&[0.0, 2.0], &[0.0, 0.0]])),
        SeqExpr::parse("1/n").map_err(err)?,
        SeqExpr::parse("exp(i*pi/n)/2").map_err(err)?,
        vec![c(0.5, 0.0)],
    )
    .map_err(err)?;
    let report = model.anderson_verify().map_err(err)?;
    ensure(report.hypotheses_hold(), || format!("{report:?}"))?;
    let d = hausdorff_to_disk(&model.wa_closure().map_err(err)?, c(0.0, 0.0), 1.0).map_err(err)?;
    ensure(d <= 1e-6, || format!("distance to disk {d:e}"))?;
    Ok(format!("hypotheses hold, distance to disk {d:.1e}"))
}

fn eigensolvers() -> Outcome {
    let (mut general, mut trace, mut det): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for i in 0..200 {
        let n = 1 + i % 8;
        let mut rng = instance_rng(11, i);
        let g = generate::gaussian_matrix(&mut rng, n, n);
        let rows: oracle::Mat = (0..n).map(|r| g.row(r).to_vec()).collect();
        let d = oracle::matching_distance(&general_eig(&g).map_err(err)?, &oracle::eigenvalues(&rows));
        ensure(d <= 1e-8, || format!("matrix {i} (n = {n}): eigenvalue distance {d:e}"))?;
        general = general.max(d);

        let h = g.hermitian_part();
        let hrows: oracle::Mat = (0..n).map(|r| h.row(r).to_vec()).collect();
        let e = herm_eig(&h).map_err(err)?;
        let tr_err = (e.values.iter().sum::<f64>() - oracle::trace(&hrows).re).abs();
        let det_ref = oracle::determinant(&hrows);
        let det_err = (e.values.iter().product::<f64>() - det_ref.re).abs() / det_ref.norm().max(1.0);
        ensure(tr_err <= 1e-10 && det_err <= 1e-10, || {
            format!("matrix {i}: trace error {tr_err:e}, determinant error {det_err:e}")
        })?;
        trace = trace.max(tr_err);
        det = det.max(det_err);
    }
    Ok(format!("eig {general:.1e}, trace {trace:.1e}, det {det:.1e}"))
}

fn determinism() -> Outcome {
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_semihilbert"))
            .args(["check", "--suite", "golden"])
            .output()
            .map_err(err)
    };
    let first = run()?;
    let second = run()?;
    ensure(first.status.success(), || String::from_utf8_lossy(&first.stderr).into_owned())?;
    ensure(!first.stdout.is_empty() && first.stdout == second.stdout, || "outputs differ".into())?;
    Ok(format!("{} identical bytes", first.stdout.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("golden 2x2 pair", golden_pair, Some(1)),
        ("golden 5x5 triangle", golden_triangle, Some(5)),
        ("golden complex symmetric", golden_cso, Some(1)),
        ("diagonal model spectra", ex1_spectra, Some(2)),
        ("closing perturbation", ex1_closing, Some(2)),
        ("A-normal range is hull of spectrum", normal_range_hull, Some(60)),
        ("norm identity iff A-normal", norm_identity, None),
        ("spectral mapping", spectral_mapping, None),
        ("radius, numerical radius, norm", radius_chain, None),
        ("Anderson disk instance", anderson, Some(10)),
        ("eigensolver oracles", eigensolvers, None),
        ("golden suite determinism", determinism, None),
    ];
    let mut failed = 0;
    for (k, (name, f, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = f();
        let elapsed = start.elapsed();
        if let (Ok(_), Some(secs)) = (&outcome, limit) {
            if elapsed > Duration::from_secs(*secs) {
                outcome = Err(format!("took {elapsed:.2?}, limit {secs} s"));
            }
        }
        let (status, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("criterion {:>2} {status}: {name} ({detail}; {elapsed:.2?})", k + 1);
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
