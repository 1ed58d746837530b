//! Infinite pairs `A = head_A ⊕ diag(a_n)`, `T = head_T ⊕ diag(λ_n)`
//! described by sequence expressions and declared accumulation points.
//!
//! Everything about the tail is read off the entries and the limits: the
//! tail compression is the diagonal `diag(λ_n)`, its spectrum is the closure
//! of the entries, its essential spectrum the set of limits, and its
//! numerical range the convex hull of the entries. Only the finite head
//! needs matrix computations.

pub mod expr;

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};

pub use self::expr::SeqExpr;
use crate::error::{Error, Result};
use crate::linalg::{convex_hull, hausdorff_to_disk, herm_eig, psd_pinv_sqrt, ConvexPolygon, DEFAULT_RANK_TOL};
use crate::matrix::{ComplexMatrix, C64};
use crate::numrange::numerical_range;
use crate::operator::SemiHilbertOperator;
use crate::spectra::a_spectrum;

/// Entries checked one by one during validation.
pub const N_PROBE: usize = 10_000;
/// The tail is checked at `N_PROBE·2^k` for `k ≤ FAR_DOUBLINGS`.
pub const FAR_DOUBLINGS: u32 = 10;
/// Far entries must lie this close to the declared limit set.
pub const LIMIT_DELTA: f64 = 1e-6;
pub const N_REPORT: usize = 32;
/// Entries contributing to the closure hull.
pub const N_HULL: usize = 4096;
/// Sweep resolution for head ranges and boundary-arc detection.
pub const HULL_ANGLES: usize = 4096;
pub const ANDERSON_TOL: f64 = 1e-6;
/// Support within this of 1 counts as touching the unit circle.
pub const ARC_TOL: f64 = 1e-9;
/// Values closer than this are the same point.
const SAME_POINT: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct DiagonalModel {
    head_a: Option<ComplexMatrix>,
    head_t: Option<ComplexMatrix>,
    a: SeqExpr,
    lambda: SeqExpr,
    limits: Vec<C64>,
    overrides: BTreeMap<usize, C64>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    #[serde(rename = "head_A", default)]
    head_a: Option<ComplexMatrix>,
    #[serde(rename = "head_T", default)]
    head_t: Option<ComplexMatrix>,
    a: String,
    lambda: String,
    limits: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    overrides: Vec<(usize, f64, f64)>,
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidModel(msg.into())
}

fn far_probes() -> Vec<usize> {
    (0..=FAR_DOUBLINGS)
        .flat_map(|k| {
            let n = N_PROBE << k;
            [n, n + 1, n + 2]
        })
        .collect()
}

fn distance_to_set(z: C64, set: &[C64]) -> f64 {
    set.iter().map(|p| (z - p).norm()).fold(f64::INFINITY, f64::min)
}

fn push_distinct(out: &mut Vec<C64>, z: C64) {
    if distance_to_set(z, out) > SAME_POINT {
        out.push(z);
    }
}

impl DiagonalModel {
    /// Builds and validates a model.
    pub fn new(
        head_a: Option<ComplexMatrix>,
        head_t: Option<ComplexMatrix>,
        a: SeqExpr,
        lambda: SeqExpr,
        limits: Vec<C64>,
    ) -> Result<Self> {
        let model = DiagonalModel {
            head_a,
            head_t,
            a,
            lambda,
            limits,
            overrides: BTreeMap::new(),
        };
        model.validate()?;
        Ok(model)
    }

    /// A pure diagonal model from expression sources.
    pub fn diagonal(a: &str, lambda: &str, limits: Vec<C64>) -> Result<Self> {
        Self::new(None, None, SeqExpr::parse(a)?, SeqExpr::parse(lambda)?, limits)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)?;
        let mut model = DiagonalModel {
            head_a: file.head_a,
            head_t: file.head_t,
            a: SeqExpr::parse(&file.a)?,
            lambda: SeqExpr::parse(&file.lambda)?,
            limits: file.limits.iter().map(|[re, im]| C64::new(*re, *im)).collect(),
            overrides: BTreeMap::new(),
        };
        for (n, re, im) in file.overrides {
            if model.overrides.insert(n, C64::new(re, im)).is_some() {
                return Err(invalid(format!("entry {n} overridden twice")));
            }
        }
        model.validate()?;
        Ok(model)
    }

    pub fn to_json(&self) -> Result<String> {
        let file = ModelFile {
            head_a: self.head_a.clone(),
            head_t: self.head_t.clone(),
            a: self.a.source().to_string(),
            lambda: self.lambda.source().to_string(),
            limits: self.limits.iter().map(|z| [z.re, z.im]).collect(),
            overrides: self.overrides.iter().map(|(&n, z)| (n, z.re, z.im)).collect(),
        };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    pub fn limits(&self) -> &[C64] {
        &self.limits
    }

    pub fn has_head(&self) -> bool {
        self.head_t.is_some()
    }

    pub fn head_size(&self) -> usize {
        self.head_t.as_ref().map_or(0, ComplexMatrix::rows)
    }

    pub fn overrides(&self) -> &BTreeMap<usize, C64> {
        &self.overrides
    }

    /// `λ_n`, `n ≥ 1`.
    pub fn entry(&self, n: usize) -> C64 {
        match self.overrides.get(&n) {
            Some(z) => *z,
            None => self.lambda.eval(n),
        }
    }

    /// `a_n`, `n ≥ 1`.
    pub fn weight(&self, n: usize) -> f64 {
        self.a.eval(n).re
    }

    fn validate(&self) -> Result<()> {
        match (&self.head_a, &self.head_t) {
            (None, None) => {}
            (Some(ha), Some(ht)) => {
                if !ha.is_square() || !ht.is_square() || ha.rows() != ht.rows() {
                    return Err(invalid(format!(
                        "head blocks must be square of equal size, got {}x{} and {}x{}",
                        ha.rows(),
                        ha.cols(),
                        ht.rows(),
                        ht.cols()
                    )));
                }
                psd_pinv_sqrt(ha, DEFAULT_RANK_TOL)?;
                if let Some(op) = self.head_operator()? {
                    if !op.is_a_bounded() {
                        return Err(invalid("head_T does not leave N(head_A) invariant"));
                    }
                }
            }
            _ => return Err(invalid("head_A and head_T must be given together")),
        }
        for (&n, z) in &self.overrides {
            if n == 0 {
                return Err(invalid("entries are indexed from 1"));
            }
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(invalid(format!("override at n = {n} is not finite")));
            }
        }
        if self.limits.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(invalid("limits must be finite"));
        }

        let probes = (1..=N_PROBE).chain(far_probes());
        for n in probes {
            let a = self.a.eval(n);
            if !(a.re.is_finite() && a.im.is_finite()) {
                return Err(invalid(format!("a is undefined at n = {n}")));
            }
            if a.re <= 0.0 || a.im.abs() > 1e-12 * a.re {
                return Err(invalid(format!("a must be real and positive, a({n}) = {a}")));
            }
            let l = self.entry(n);
            if !(l.re.is_finite() && l.im.is_finite()) {
                return Err(invalid(format!("lambda is undefined at n = {n}")));
            }
        }

        let last = (N_PROBE << FAR_DOUBLINGS)..=(N_PROBE << FAR_DOUBLINGS) + 2;
        let far: Vec<C64> = last.map(|n| self.entry(n)).collect();
        if self.limits.is_empty() {
            return Err(invalid("at least one limit point must be declared"));
        }
        for (k, z) in far.iter().enumerate() {
            let d = distance_to_set(*z, &self.limits);
            if d > LIMIT_DELTA {
                return Err(invalid(format!(
                    "lambda({}) = {z} is {d:e} away from the declared limits",
                    (N_PROBE << FAR_DOUBLINGS) + k
                )));
            }
        }
        let probes: Vec<C64> = far_probes().into_iter().map(|n| self.entry(n)).collect();
        for mu in &self.limits {
            if distance_to_set(*mu, &probes) > LIMIT_DELTA {
                return Err(invalid(format!("no tail entry approaches the declared limit {mu}")));
            }
        }
        Ok(())
    }

    /// The head as a finite pair, or `None` without a head or with a zero
    /// head weight.
    pub fn head_operator(&self) -> Result<Option<SemiHilbertOperator>> {
        match (&self.head_a, &self.head_t) {
            (Some(ha), Some(ht)) if ha.max_abs() > 0.0 => {
                Ok(Some(SemiHilbertOperator::from_pair(ha.clone(), ht.clone())?))
            }
            _ => Ok(None),
        }
    }

    /// `A_N = head_A ⊕ diag(a_1..a_N)`, `T_N = head_T ⊕ diag(λ_1..λ_N)`.
    pub fn truncate(&self, n: usize) -> Result<SemiHilbertOperator> {
        if n == 0 {
            return Err(Error::domain("truncation size must be at least 1"));
        }
        let weights: Vec<f64> = (1..=n).map(|k| self.weight(k)).collect();
        let entries: Vec<C64> = (1..=n).map(|k| self.entry(k)).collect();
        let tail_a = ComplexMatrix::from_real_diag(&weights);
        let tail_t = ComplexMatrix::from_diag(&entries);
        let (a, t) = match (&self.head_a, &self.head_t) {
            (Some(ha), Some(ht)) => (
                ComplexMatrix::block_diag(&[ha, &tail_a]),
                ComplexMatrix::block_diag(&[ht, &tail_t]),
            ),
            _ => (tail_a, tail_t),
        };
        SemiHilbertOperator::from_pair(a, t)
    }

    fn head_spectrum(&self) -> Result<Vec<C64>> {
        Ok(match self.head_operator()? {
            Some(op) => a_spectrum(&op)?.points,
            None => Vec::new(),
        })
    }

    /// `σ_A(T_N)` without forming the truncation.
    pub fn truncation_spectrum(&self, n: usize) -> Result<Vec<C64>> {
        let mut out = self.head_spectrum()?;
        out.extend((1..=n).map(|k| self.entry(k)));
        Ok(out)
    }

    /// Whether `z` lies in `σ_A(T)` within `tol`: a limit, a head
    /// eigenvalue, or an entry among the first `N_PROBE` or overridden ones.
    pub fn spectrum_contains(&self, z: C64, tol: f64) -> Result<bool> {
        if distance_to_set(z, &self.limits) <= tol || distance_to_set(z, &self.head_spectrum()?) <= tol {
            return Ok(true);
        }
        Ok((1..=N_PROBE).chain(self.overrides.keys().copied()).any(|n| (self.entry(n) - z).norm() <= tol))
    }

    pub fn model_spectra(&self, n_report: usize) -> Result<ModelSpectra> {
        let mut point = Vec::new();
        for n in 1..=n_report {
            push_distinct(&mut point, self.entry(n));
        }
        for (&n, z) in &self.overrides {
            if n > n_report {
                push_distinct(&mut point, *z);
            }
        }
        for z in self.head_spectrum()? {
            push_distinct(&mut point, z);
        }
        let mut full = point.clone();
        for mu in &self.limits {
            push_distinct(&mut full, *mu);
        }
        Ok(ModelSpectra {
            point,
            approximate: full.clone(),
            full,
            essential: self.limits.clone(),
            reported: n_report,
            tail: format!("lambda(n) = {} for n > {n_report}", self.lambda.source()),
        })
    }

    fn closure_points(&self) -> Result<Vec<(C64, Source)>> {
        let mut pts: Vec<(C64, Source)> = (1..=N_HULL).map(|n| (self.entry(n), Source::Entry(n))).collect();
        for (&n, z) in &self.overrides {
            if n > N_HULL {
                pts.push((*z, Source::Entry(n)));
            }
        }
        for (k, mu) in self.limits.iter().enumerate() {
            pts.push((*mu, Source::Limit(k)));
        }
        if let Some(op) = self.head_operator()? {
            let region = numerical_range(&op, HULL_ANGLES)?;
            pts.extend(region.outer.vertices.iter().map(|v| (*v, Source::Head)));
        }
        Ok(pts)
    }

    /// `closure W_A(T)`: the hull of the entries, the limits and the head
    /// range.
    pub fn wa_closure(&self) -> Result<ConvexPolygon> {
        let pts: Vec<C64> = self.closure_points()?.into_iter().map(|(z, _)| z).collect();
        convex_hull(&pts)
    }

    /// Whether every extreme point of `closure W_A(T)` is attained.
    pub fn is_wa_closed(&self) -> Result<Closedness> {
        if self.has_head() {
            return Err(Error::Unsupported("closedness test for models with a head block".into()));
        }
        let pts = self.closure_points()?;
        let values: Vec<C64> = pts.iter().map(|(z, _)| *z).collect();
        let hull = convex_hull(&values)?;
        let far: Vec<C64> = far_probes().into_iter().map(|n| self.entry(n)).collect();
        let scale = hull.diameter().max(1.0);
        let mut offending = Vec::new();
        let mut non_isolated = false;
        for v in &hull.vertices {
            let sources: Vec<Source> = pts
                .iter()
                .filter(|(z, _)| (z - v).norm() <= SAME_POINT * scale)
                .map(|(_, s)| *s)
                .collect();
            let attained = sources.iter().any(|s| matches!(s, Source::Entry(_)))
                || distance_to_set(*v, &far) <= SAME_POINT * scale;
            if !attained && sources.iter().any(|s| matches!(s, Source::Limit(_))) {
                offending.push(*v);
                let near = hull.vertices.iter().filter(|w| *w != v && (*w - v).norm() < 1e-3 * scale).count();
                non_isolated |= near > 0;
            }
        }
        Ok(Closedness {
            closed: offending.is_empty(),
            offending,
            extreme_points: hull.vertices.len(),
            non_isolated,
        })
    }

    /// Replaces, for each unattained extreme limit `μ`, the first entry
    /// within `ε / count` of `μ` by `μ` itself.
    pub fn closing_perturbation(&self, eps: f64, n_search: usize) -> Result<Closing> {
        if eps.is_nan() || eps <= 0.0 {
            return Err(Error::domain("eps must be positive"));
        }
        let offending = self.is_wa_closed()?.offending;
        if offending.is_empty() {
            return Ok(Closing {
                model: self.clone(),
                changes: Vec::new(),
                k_norm: 0.0,
            });
        }
        let budget = eps / offending.len() as f64;
        let mut model = self.clone();
        let mut changes = Vec::new();
        for mu in offending {
            let found = (1..=n_search)
                .filter(|n| !model.overrides.contains_key(n))
                .find(|&n| (self.entry(n) - mu).norm() < budget);
            let Some(n) = found else {
                return Err(Error::CannotClose {
                    eps,
                    budget,
                    limit: mu,
                    searched: n_search,
                });
            };
            let old = self.entry(n);
            model.overrides.insert(n, mu);
            changes.push(Change { n, old, new: mu });
        }
        let k_norm = changes.iter().map(|c| (c.new - c.old).norm()).fold(0.0, f64::max);
        Ok(Closing { model, changes, k_norm })
    }

    /// Support function of `closure W_A(T)` evaluated exactly: head top
    /// eigenvalue, entries up to `N_HULL` and limits.
    pub fn support(&self, theta: f64) -> Result<f64> {
        let parts = self.support_parts()?;
        support_of(&parts, theta)
    }

    fn support_parts(&self) -> Result<(ConvexPolygon, Option<ComplexMatrix>)> {
        let mut pts: Vec<C64> = (1..=N_HULL).map(|n| self.entry(n)).collect();
        pts.extend(self.overrides.values().chain(&self.limits));
        let head = match self.head_operator()? {
            Some(op) => Some(op.compress()?.clone()),
            None => None,
        };
        Ok((convex_hull(&pts)?, head))
    }

    /// Checks the hypotheses of Anderson's theorem for `W_A(T)` and, when
    /// they hold, its conclusion `closure W_A(T) = closed unit disk`.
    pub fn anderson_verify(&self) -> Result<AndersonReport> {
        let closure = self.wa_closure()?;
        let range_in_disk = closure.max_modulus() <= 1.0 + ANDERSON_TOL;
        let ess_in_open_disk = self.limits.iter().all(|mu| mu.norm() < 1.0 - ANDERSON_TOL);

        let parts = self.support_parts()?;
        let support: Vec<f64> = (0..HULL_ANGLES)
            .map(|k| support_of(&parts, TAU * k as f64 / HULL_ANGLES as f64))
            .collect::<Result<_>>()?;
        let touching: Vec<bool> = support.iter().map(|h| (h - 1.0).abs() <= ARC_TOL).collect();
        let arc = (0..HULL_ANGLES).any(|k| (0..3).all(|j| touching[(k + j) % HULL_ANGLES]));
        let far: Vec<C64> = far_probes().into_iter().map(|n| self.entry(n)).collect();
        let accumulating = self.limits.iter().any(|mu| (mu.norm() - 1.0).abs() <= ARC_TOL)
            && far.iter().all(|z| (z.norm() - 1.0).abs() <= ARC_TOL);
        let boundary = if arc {
            BoundaryEvidence::Arc
        } else if accumulating {
            BoundaryEvidence::DeclaredLimits
        } else {
            BoundaryEvidence::None
        };
        let boundary_infinite = boundary != BoundaryEvidence::None;
        let hypotheses = range_in_disk && ess_in_open_disk && boundary_infinite;
        let disk_distance = if hypotheses {
            Some(hausdorff_to_disk(&closure, C64::new(0.0, 0.0), 1.0)?)
        } else {
            None
        };
        Ok(AndersonReport {
            range_in_disk,
            ess_in_open_disk,
            boundary_infinite,
            boundary,
            conclusion_checked: disk_distance.is_some_and(|d| d <= ANDERSON_TOL),
            disk_distance,
        })
    }
}

fn support_of((tail, head): &(ConvexPolygon, Option<ComplexMatrix>), theta: f64) -> Result<f64> {
    let mut h = tail.support(theta);
    if let Some(m) = head {
        let dir = C64::from_polar(1.0, -theta);
        let hm = (&m.scale(dir) + &m.adjoint().scale(dir.conj())).scale_real(0.5);
        h = h.max(herm_eig(&hm.hermitian_part())?.max());
    }
    Ok(h)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Source {
    Entry(usize),
    Limit(usize),
    Head,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpectra {
    pub point: Vec<C64>,
    pub full: Vec<C64>,
    pub approximate: Vec<C64>,
    pub essential: Vec<C64>,
    /// Entries listed explicitly in `point`.
    pub reported: usize,
    pub tail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Closedness {
    pub closed: bool,
    pub offending: Vec<C64>,
    pub extreme_points: usize,
    /// Some offending point is a limit of other extreme points.
    pub non_isolated: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Change {
    pub n: usize,
    pub old: C64,
    pub new: C64,
}

impl fmt::Display for Change {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "K e_{} = ({}) e_{}", self.n, self.new - self.old, self.n)
    }
}

#[derive(Clone, Debug)]
pub struct Closing {
    pub model: DiagonalModel,
    /// The nonzero diagonal entries of `K`.
    pub changes: Vec<Change>,
    /// `‖K‖_A = max |μ − λ_{n₀}|`.
    pub k_norm: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryEvidence {
    /// The support function equals 1 on an interval of directions.
    Arc,
    /// A limit on the circle is approached by entries on the circle.
    DeclaredLimits,
    None,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AndersonReport {
    pub range_in_disk: bool,
    pub ess_in_open_disk: bool,
    pub boundary_infinite: bool,
    pub boundary: BoundaryEvidence,
    pub conclusion_checked: bool,
    /// Hausdorff distance from the closure to the unit disk, computed when
    /// all hypotheses hold.
    pub disk_distance: Option<f64>,
}

impl AndersonReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.range_in_disk && self.ess_in_open_disk && self.boundary_infinite
    }
}
