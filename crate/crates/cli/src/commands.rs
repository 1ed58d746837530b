use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use semihilbert::cso::{induces_cso, CsoVerdict};
use semihilbert::linalg::ConvexPolygon;
use semihilbert::model::DiagonalModel;
use semihilbert::numrange::{a_numerical_radius, conv_spectrum_compare, numerical_range};
use semihilbert::spectra::{a_approx_spectrum, a_essential_spectrum, a_point_spectrum, a_spectral_radius, a_spectrum};
use semihilbert::verify::{run_suite, Suite};
use semihilbert::{ComplexMatrix, Error, SemiHilbertOperator, SemiHilbertSpace, C64};
use serde::Serialize;

use crate::output::{complex, complex_list, num, to_json, yes_no};
use crate::svg::{self, Plot};

pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PARSE: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;
pub const EXIT_WRITE: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    fn new(code: u8, message: impl Into<String>) -> Self {
        CliError { code, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. } | Error::UnknownIdentifier { .. } | Error::UnknownSuite(_) | Error::Json(_) => EXIT_PARSE,
            Error::Domain(_)
            | Error::DimensionMismatch { .. }
            | Error::NotPositive { .. }
            | Error::ZeroWeight
            | Error::NotABounded { .. }
            | Error::NotAAdjointable { .. }
            | Error::InvalidModel(_) => EXIT_DOMAIN,
            _ => EXIT_FAILURE,
        };
        CliError::new(code, e.to_string())
    }
}

type CliResult<T = ()> = Result<T, CliError>;

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult {
    fs::write(path, contents).map_err(|e| CliError::new(EXIT_WRITE, format!("cannot write {}: {e}", path.display())))
}

fn read_matrix(path: &Path) -> CliResult<ComplexMatrix> {
    serde_json::from_str(&read(path)?)
        .map_err(|e| CliError::new(EXIT_PARSE, format!("{}: {e}", path.display())))
}

fn load_operator(a: &Path, t: &Path, rank_tol: f64) -> CliResult<SemiHilbertOperator> {
    let a = read_matrix(a)?;
    let t = read_matrix(t)?;
    let space = SemiHilbertSpace::with_rank_tol(a, rank_tol)?;
    Ok(SemiHilbertOperator::new(Arc::new(space), t)?)
}

fn load_model(path: &Path) -> CliResult<DiagonalModel> {
    Ok(DiagonalModel::from_json(&read(path)?)?)
}

fn print_json<T: Serialize>(value: &T) -> CliResult {
    let s = to_json(value).map_err(|e| CliError::new(EXIT_FAILURE, e.to_string()))?;
    print!("{s}");
    Ok(())
}

/// `Ok(None)` for the membership failures that make a quantity undefined.
fn defined<T>(r: semihilbert::Result<T>) -> CliResult<Option<T>> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotABounded { .. } | Error::NotAAdjointable { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn or_na<T>(v: &Option<T>, f: impl Fn(&T) -> String) -> String {
    v.as_ref().map_or_else(|| "n/a".to_string(), f)
}

#[derive(Serialize)]
struct Analysis {
    dimension: usize,
    rank: usize,
    a_bounded: bool,
    a_adjointable: bool,
    a_normal: Option<bool>,
    a_hyponormal: Option<bool>,
    induces_cso: CsoVerdict,
    a_invertible: Option<bool>,
    a_norm: Option<f64>,
    numerical_radius: Option<f64>,
    spectral_radius: Option<f64>,
    spectrum: Option<Vec<C64>>,
    point_spectrum: Option<Vec<C64>>,
    closure_is_hull_of_spectrum: Option<bool>,
    hull_distance: Option<f64>,
}

pub fn analyze(a: &Path, t: &Path, rank_tol: f64, angles: usize, json: bool) -> CliResult {
    let op = load_operator(a, t, rank_tol)?;
    let tol = op.space().tol();
    let membership = op.membership();
    let a_invertible = match op.a_inverse() {
        Ok(_) => Some(true),
        Err(Error::NotAInvertible { .. }) => Some(false),
        Err(e) => defined::<()>(Err(e)).map(|_| None)?,
    };
    let compare = defined(conv_spectrum_compare(&op, angles))?;
    let report = Analysis {
        dimension: op.space().dim(),
        rank: op.space().rank(),
        a_bounded: membership.a_bounded,
        a_adjointable: membership.a_adjointable,
        a_normal: defined(op.is_a_normal(tol))?,
        a_hyponormal: defined(op.is_a_hyponormal(tol))?,
        induces_cso: induces_cso(&op)?.verdict,
        a_invertible,
        a_norm: defined(op.a_operator_norm())?,
        numerical_radius: defined(a_numerical_radius(&op))?,
        spectral_radius: defined(a_spectral_radius(&op))?.map(|r| r.r_spec),
        spectrum: defined(a_spectrum(&op))?.map(|s| s.points),
        point_spectrum: defined(a_point_spectrum(&op))?.map(|s| s.points),
        closure_is_hull_of_spectrum: compare.map(|c| c.verdict),
        hull_distance: compare.map(|c| c.hausdorff),
    };
    if json {
        return print_json(&report);
    }
    let flag = |b: &Option<bool>| or_na(b, |&v| yes_no(v).to_string());
    let cso = match report.induces_cso {
        CsoVerdict::Yes => "yes",
        CsoVerdict::No => "no",
        CsoVerdict::Unknown => "unknown",
    };
    println!("dimension: {}", report.dimension);
    println!("rank(A): {}", report.rank);
    println!("in B_A^1/2 (A-bounded): {}", yes_no(report.a_bounded));
    println!("in B_A (A-adjoint exists): {}", yes_no(report.a_adjointable));
    println!("A-normal: {}", flag(&report.a_normal));
    println!("A-hyponormal: {}", flag(&report.a_hyponormal));
    println!("induces CSO: {cso}");
    println!("A-invertible: {}", flag(&report.a_invertible));
    println!("‖T‖_A: {}", or_na(&report.a_norm, |&x| num(x)));
    println!("w_A(T): {}", or_na(&report.numerical_radius, |&x| num(x)));
    println!("r_A(T): {}", or_na(&report.spectral_radius, |&x| num(x)));
    println!("σ_A(T): {}", or_na(&report.spectrum, |s| complex_list(s)));
    println!("σ_A_p(T): {}", or_na(&report.point_spectrum, |s| complex_list(s)));
    println!("closure W_A = conv σ_A: {}", flag(&report.closure_is_hull_of_spectrum));
    Ok(())
}

#[derive(Serialize)]
struct RangeReport<'a> {
    angles: usize,
    degenerate: bool,
    err_bound: f64,
    inner: &'a [C64],
    outer: &'a [C64],
    spectrum: &'a [C64],
}

pub fn range(a: &Path, t: &Path, svg_path: Option<&Path>, angles: usize, rank_tol: f64) -> CliResult {
    let op = load_operator(a, t, rank_tol)?;
    let region = numerical_range(&op, angles)?;
    let spectrum = a_spectrum(&op)?.points;
    if let Some(path) = svg_path {
        let plot = Plot {
            inner: &region.inner,
            outer: &region.outer,
            spectrum: &spectrum,
        };
        write(path, &svg::render(&plot))?;
    }
    print_json(&RangeReport {
        angles: region.angles,
        degenerate: region.degenerate,
        err_bound: region.err_bound,
        inner: &region.inner.vertices,
        outer: &region.outer.vertices,
        spectrum: &spectrum,
    })
}

#[derive(Serialize)]
struct SpectraReport {
    spectrum: Vec<C64>,
    point: Vec<C64>,
    approximate: Vec<C64>,
    essential: Vec<C64>,
    spectral_radius: f64,
}

pub fn spectra(a: &Path, t: &Path, rank_tol: f64, json: bool) -> CliResult {
    let op = load_operator(a, t, rank_tol)?;
    let report = SpectraReport {
        spectrum: a_spectrum(&op)?.points,
        point: a_point_spectrum(&op)?.points,
        approximate: a_approx_spectrum(&op)?.set.points,
        essential: a_essential_spectrum(&op, C64::new(0.0, 0.0))?.set.points,
        spectral_radius: a_spectral_radius(&op)?.r_spec,
    };
    if json {
        return print_json(&report);
    }
    println!("σ_A: {}", complex_list(&report.spectrum));
    println!("σ_A_p: {}", complex_list(&report.point));
    println!("σ_A_app: {}", complex_list(&report.approximate));
    println!("σ_A_ess: {}", complex_list(&report.essential));
    println!("r_A: {}", num(report.spectral_radius));
    Ok(())
}

pub fn model_spectra(path: &Path, report: usize, json: bool) -> CliResult {
    let s = load_model(path)?.model_spectra(report)?;
    if json {
        return print_json(&s);
    }
    println!("σ_A_p: {} ({})", complex_list(&s.point), s.tail);
    println!("σ_A: {}", complex_list(&s.full));
    println!("σ_A_app: {}", complex_list(&s.approximate));
    println!("σ_A_ess: {}", complex_list(&s.essential));
    Ok(())
}

#[derive(Serialize)]
struct ClosureReport<'a> {
    vertices: &'a [C64],
    max_modulus: f64,
    limits: &'a [C64],
}

pub fn model_range(path: &Path, svg_path: Option<&Path>) -> CliResult {
    let model = load_model(path)?;
    let closure: ConvexPolygon = model.wa_closure()?;
    if let Some(out) = svg_path {
        let plot = Plot {
            inner: &closure,
            outer: &closure,
            spectrum: model.limits(),
        };
        write(out, &svg::render(&plot))?;
    }
    print_json(&ClosureReport {
        vertices: &closure.vertices,
        max_modulus: closure.max_modulus(),
        limits: model.limits(),
    })
}

pub fn model_closed(path: &Path, json: bool) -> CliResult {
    let c = load_model(path)?.is_wa_closed()?;
    if json {
        return print_json(&c);
    }
    let offending: Vec<String> = c.offending.iter().map(|&z| complex(z)).collect();
    let offending = if offending.is_empty() { "none".to_string() } else { offending.join(", ") };
    println!("closed: {}, offending: {offending}", c.closed);
    Ok(())
}

#[derive(Serialize)]
struct CloseReport<'a> {
    eps: f64,
    changes: &'a [semihilbert::model::Change],
    k_norm: f64,
    closed_after: bool,
    output: &'a Path,
}

fn closed_path(input: &Path) -> PathBuf {
    let stem = input.file_stem().map_or_else(|| "model".into(), |s| s.to_string_lossy().into_owned());
    input.with_file_name(format!("{stem}.closed.json"))
}

pub fn model_close(path: &Path, eps: f64, search: usize, json: bool) -> CliResult {
    let model = load_model(path)?;
    let closing = model.closing_perturbation(eps, search)?;
    let out = closed_path(path);
    write(&out, &(closing.model.to_json()? + "\n"))?;
    let report = CloseReport {
        eps,
        changes: &closing.changes,
        k_norm: closing.k_norm,
        closed_after: closing.model.is_wa_closed()?.closed,
        output: &out,
    };
    if json {
        return print_json(&report);
    }
    for ch in &closing.changes {
        println!("K e_{0} = ({1}) e_{0}", ch.n, complex(ch.new - ch.old));
    }
    println!("K_norm: {}", num(report.k_norm));
    println!("closed after perturbation: {}", report.closed_after);
    println!("wrote {}", out.display());
    Ok(())
}

pub fn model_anderson(path: &Path, json: bool) -> CliResult {
    let r = load_model(path)?.anderson_verify()?;
    if json {
        return print_json(&r);
    }
    println!("W_A ⊆ closed unit disk: {}", r.range_in_disk);
    println!("σ_A_ess ⊆ open unit disk: {}", r.ess_in_open_disk);
    println!("infinitely many boundary points: {} ({:?})", r.boundary_infinite, r.boundary);
    println!("closure W_A = closed unit disk: {}", r.conclusion_checked);
    if let Some(d) = r.disk_distance {
        println!("distance to disk: {}", num(d));
    }
    Ok(())
}

pub fn check(suite: &str, seed: u64, count: usize) -> CliResult {
    let suite: Suite = suite.parse()?;
    let report = run_suite(suite, seed, count);
    print_json(&report)?;
    if report.passed() {
        Ok(())
    } else {
        Err(CliError::new(EXIT_FAILURE, format!("{} check(s) failed", report.failures.len())))
    }
}
