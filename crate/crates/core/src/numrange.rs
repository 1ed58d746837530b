//! A-numerical ranges through the support function of the compression.
//!
//! For each direction `θ` the top eigenpair of
//! `H(θ) = (e^{−iθ}M + e^{iθ}M*)/2` gives a supporting line
//! `Re(e^{−iθ}z) = λ_max` and a boundary point `v*Mv`. Boundary points span
//! an inner polygon, consecutive supporting lines an outer one, and the
//! region between them is a chain of thin triangles whose heights bound
//! the Hausdorff error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::geometry::point_segment_distance;
use crate::linalg::{convex_hull, hausdorff, herm_eig, ConvexPolygon};
use crate::matrix::{dot, ComplexMatrix, C64};
use crate::operator::SemiHilbertOperator;
use crate::spectra::a_spectrum;

pub const DEFAULT_ANGLES: usize = 720;

/// Relative eigenvalue gap below which the top of `H(θ)` counts as multiple.
pub const TIE_GAP: f64 = 1e-9;

/// Refinement never splits directions closer than this.
pub const MIN_ANGLE_STEP: f64 = 1e-6;

/// Extra directions the refinement may add, per initial direction.
pub const REFINE_BUDGET: usize = 1;

/// Slack added to `err_bound` by [`conv_spectrum_compare`], relative to
/// `1 + ‖M‖`.
pub const COMPARE_TOL: f64 = 1e-8;

/// One evaluated direction: the supporting line `Re(e^{−iθ}z) = h` touches
/// the range along the segment `[first, last]` (counter-clockwise).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSample {
    pub theta: f64,
    pub h: f64,
    pub first: C64,
    pub last: C64,
}

/// Two-sided polygonal approximation of a numerical range.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RegionApprox {
    pub inner: ConvexPolygon,
    pub outer: ConvexPolygon,
    /// Directions evaluated, including refinement.
    pub angles: usize,
    /// Upper bound on the Hausdorff distance from either polygon to the range.
    pub err_bound: f64,
    /// The range is a point or a segment, represented exactly by `inner`.
    pub degenerate: bool,
    #[serde(skip)]
    pub samples: Vec<SupportSample>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Containment {
    Inside,
    Outside,
    BoundaryBand,
}

/// Real and imaginary parts of a square matrix, ready for `H(θ)` and `K(θ)`.
struct Parts {
    m: ComplexMatrix,
    re: ComplexMatrix,
    im: ComplexMatrix,
    scale: f64,
}

impl Parts {
    fn new(m: &ComplexMatrix) -> Self {
        let mh = m.adjoint();
        let re = (m + &mh).scale_real(0.5);
        let im = (m - &mh).scale(C64::new(0.0, -0.5));
        Parts {
            m: m.clone(),
            re,
            im,
            scale: m.frobenius_norm(),
        }
    }

    fn combine(&self, a: f64, b: f64) -> ComplexMatrix {
        &self.re.scale_real(a) + &self.im.scale_real(b)
    }

    fn sample(&self, theta: f64) -> Result<SupportSample> {
        let (s, c) = theta.sin_cos();
        let eig = herm_eig(&self.combine(c, s))?;
        let r = eig.dim();
        let h = eig.max();
        let gap_tol = TIE_GAP * self.scale.max(f64::MIN_POSITIVE);
        let top: Vec<usize> = (0..r).filter(|&k| h - eig.values[k] <= gap_tol).collect();
        if top.len() == 1 {
            let v = eig.vector(r - 1);
            let z = dot(&self.m.mat_vec(&v), &v);
            return Ok(SupportSample {
                theta,
                h,
                first: z,
                last: z,
            });
        }
        // flat edge: extremes of K(θ) = (e^{−iθ}M − e^{iθ}M*)/2i on the top eigenspace
        let v = eig.vectors.select_columns(&top);
        let k = &(&v.adjoint() * &self.combine(-s, c)) * &v;
        let ke = herm_eig(&k.hermitian_part())?;
        let rot = C64::from_polar(1.0, theta);
        Ok(SupportSample {
            theta,
            h,
            first: rot * C64::new(h, ke.min()),
            last: rot * C64::new(h, ke.max()),
        })
    }
}

/// Where the supporting lines of `a` and `b` meet, measured from `a.last`,
/// and the height of that apex over the chord `[a.last, b.first]`.
fn apex(a: &SupportSample, b: &SupportSample, dtheta: f64) -> (C64, f64) {
    let p = a.last;
    let q = b.first;
    let sin = dtheta.sin();
    let chord = (q - p).norm();
    let mut t = if sin > 0.0 {
        (b.h - (C64::from_polar(1.0, -b.theta) * p).re) / sin
    } else {
        0.0
    };
    t = t.max(0.0);
    if dtheta < PI / 2.0 {
        t = t.min(chord);
    }
    let x = p + C64::from_polar(t, a.theta + PI / 2.0);
    (x, point_segment_distance(x, p, q))
}

#[derive(Clone, Copy, Debug)]
struct Gap {
    height: f64,
    a: usize,
    b: usize,
    theta_a: f64,
    theta_b: f64,
}

impl PartialEq for Gap {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Gap {}

impl PartialOrd for Gap {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Gap {
    fn cmp(&self, other: &Self) -> Ordering {
        self.height
            .total_cmp(&other.height)
            .then_with(|| other.theta_a.total_cmp(&self.theta_a))
    }
}

fn gap(samples: &[SupportSample], a: usize, b: usize, theta_a: f64, theta_b: f64) -> Gap {
    let (_, height) = apex(&samples[a], &samples[b], theta_b - theta_a);
    Gap {
        height,
        a,
        b,
        theta_a,
        theta_b,
    }
}

/// Direction to refine between `theta_a` and `theta_b`: the outward normal
/// of the chord, which lands exactly on flat edges, or the midpoint.
fn split_direction(p: C64, q: C64, theta_a: f64, theta_b: f64) -> f64 {
    let dtheta = theta_b - theta_a;
    let margin = 1e-3 * dtheta;
    if (q - p).norm() > 0.0 {
        let mut normal = ((q - p) * C64::new(0.0, -1.0)).arg();
        while normal < theta_a {
            normal += TAU;
        }
        while normal > theta_b {
            normal -= TAU;
        }
        if normal > theta_a + margin && normal < theta_b - margin {
            return normal;
        }
    }
    0.5 * (theta_a + theta_b)
}

/// Support-function approximation of `W(m)` for a square matrix `m`.
pub fn numerical_range_of(m: &ComplexMatrix, angles: usize) -> Result<RegionApprox> {
    if !m.is_square() || m.rows() == 0 {
        return Err(Error::domain(format!(
            "numerical range needs a nonempty square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if angles < 3 {
        return Err(Error::domain(format!("need at least 3 angles, got {angles}")));
    }
    if m.rows() == 1 {
        let p = ConvexPolygon::point(m[(0, 0)]);
        return Ok(RegionApprox {
            inner: p.clone(),
            outer: p,
            angles: 0,
            err_bound: 0.0,
            degenerate: true,
            samples: Vec::new(),
        });
    }
    let parts = Parts::new(m);
    let mut samples: Vec<SupportSample> = (0..angles)
        .into_par_iter()
        .map(|k| parts.sample(TAU * k as f64 / angles as f64))
        .collect::<Result<_>>()?;

    let stop = 1e-13 * parts.scale.max(f64::MIN_POSITIVE);
    let mut heap: BinaryHeap<Gap> = (0..angles)
        .map(|k| {
            let b = (k + 1) % angles;
            let theta_b = if b == 0 { TAU } else { samples[b].theta };
            gap(&samples, k, b, samples[k].theta, theta_b)
        })
        .collect();
    let mut budget = REFINE_BUDGET * angles;
    while budget > 0 {
        let Some(g) = heap.pop() else { break };
        if g.height <= stop {
            break;
        }
        if g.theta_b - g.theta_a < MIN_ANGLE_STEP {
            continue;
        }
        let theta = split_direction(samples[g.a].last, samples[g.b].first, g.theta_a, g.theta_b);
        samples.push(parts.sample(theta.rem_euclid(TAU))?);
        let c = samples.len() - 1;
        heap.push(gap(&samples, g.a, c, g.theta_a, theta));
        heap.push(gap(&samples, c, g.b, theta, g.theta_b));
        budget -= 1;
    }
    assemble(samples)
}

fn assemble(mut samples: Vec<SupportSample>) -> Result<RegionApprox> {
    samples.sort_by(|a, b| a.theta.total_cmp(&b.theta));
    samples.dedup_by(|a, b| a.theta == b.theta);
    let n = samples.len();
    let mut boundary = Vec::with_capacity(2 * n);
    let mut apexes = Vec::with_capacity(n);
    let mut err_bound: f64 = 0.0;
    for k in 0..n {
        let a = &samples[k];
        let b = &samples[(k + 1) % n];
        let mut dtheta = b.theta - a.theta;
        if dtheta <= 0.0 {
            dtheta += TAU;
        }
        let (x, height) = apex(a, b, dtheta);
        boundary.push(a.first);
        boundary.push(a.last);
        apexes.push(x);
        err_bound = err_bound.max(height);
    }
    let inner = convex_hull(&boundary)?;
    apexes.extend_from_slice(&boundary);
    let outer = convex_hull(&apexes)?;
    let degenerate = inner.len() <= 2;
    Ok(RegionApprox {
        degenerate,
        outer: if degenerate { inner.clone() } else { outer },
        inner,
        angles: n,
        err_bound,
        samples,
    })
}

/// `W_A(T) = W(M)`, approximated from `angles` evenly spaced directions
/// plus adaptive refinement.
pub fn numerical_range(op: &SemiHilbertOperator, angles: usize) -> Result<RegionApprox> {
    numerical_range_of(op.compress()?, angles)
}

/// `max_θ λ_max(H(θ))`, refined by golden-section search around the best
/// sampled direction.
pub fn numerical_radius_of(m: &ComplexMatrix) -> Result<f64> {
    if m.rows() == 1 {
        return Ok(m[(0, 0)].norm());
    }
    let region = numerical_range_of(m, DEFAULT_ANGLES)?;
    let parts = Parts::new(m);
    let samples = &region.samples;
    let n = samples.len();
    let best = (0..n)
        .max_by(|&i, &j| samples[i].h.total_cmp(&samples[j].h))
        .expect("sweep produced no samples");
    let mut lo = samples[(best + n - 1) % n].theta;
    let mut hi = samples[(best + 1) % n].theta;
    let mid = samples[best].theta;
    if lo > mid {
        lo -= TAU;
    }
    if hi < mid {
        hi += TAU;
    }
    let f = |t: f64| -> Result<f64> {
        let (s, c) = t.sin_cos();
        Ok(herm_eig(&parts.combine(c, s))?.max())
    };
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    let mut best_value = samples[best].h.max(f1).max(f2);
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        }
        best_value = best_value.max(f1).max(f2);
    }
    Ok(best_value.max(region.inner.max_modulus()))
}

/// `w_A(T) = sup |W_A(T)|`.
pub fn a_numerical_radius(op: &SemiHilbertOperator) -> Result<f64> {
    numerical_radius_of(op.compress()?)
}

/// Comparison of the closed range with the hull of the spectrum.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HullComparison {
    pub hausdorff: f64,
    pub err_bound: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

/// Tests `closure W_A(T) = conv σ_A(T)`: the inner polygon is within
/// `err_bound` of the range, so equality forces the distance below
/// `err_bound` plus roundoff.
pub fn conv_spectrum_compare(op: &SemiHilbertOperator, angles: usize) -> Result<HullComparison> {
    if !op.is_a_adjointable() {
        return Err(Error::NotAAdjointable {
            residual: op.membership().adjointable_residual,
        });
    }
    let region = numerical_range(op, angles)?;
    let hull = convex_hull(&a_spectrum(op)?.points)?;
    let d = hausdorff(&region.inner, &hull)?;
    let tolerance = COMPARE_TOL * (1.0 + op.compress()?.frobenius_norm());
    Ok(HullComparison {
        hausdorff: d,
        err_bound: region.err_bound,
        tolerance,
        verdict: d <= region.err_bound + tolerance,
    })
}

/// Classifies `z` against a region with band width `err_bound` plus
/// roundoff.
pub fn contains_point(region: &RegionApprox, z: C64) -> Containment {
    let tol = region.err_bound + 1e-9 * (1.0 + region.outer.diameter() + region.outer.max_modulus());
    if region.outer.distance(z) > tol {
        Containment::Outside
    } else if region.inner.len() >= 3 && region.inner.max_violation(z) < -tol {
        Containment::Inside
    } else {
        Containment::BoundaryBand
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hausdorff_to_disk;
    use crate::matrix::c;

    fn jordan(scale: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, scale], &[0.0, 0.0]])
    }

    #[test]
    fn jordan_block_gives_disk() {
        let r = numerical_range_of(&jordan(2.0), DEFAULT_ANGLES).unwrap();
        assert!(!r.degenerate);
        let d = hausdorff_to_disk(&r.inner, c(0.0, 0.0), 1.0).unwrap();
        assert!(d <= r.err_bound + 1e-12, "{d} vs {}", r.err_bound);
        assert!(r.err_bound < 1e-5);
        let w = numerical_radius_of(&jordan(2.0)).unwrap();
        assert!((w - 1.0).abs() < 1e-12);
    }

    #[test]
    fn refinement_is_monotone() {
        let coarse = numerical_range_of(&jordan(1.0), 90).unwrap();
        let fine = numerical_range_of(&jordan(1.0), 720).unwrap();
        assert!(fine.err_bound < coarse.err_bound);
    }

    #[test]
    fn triangle_is_exact() {
        let m = ComplexMatrix::from_diag(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]);
        let r = numerical_range_of(&m, 1440).unwrap();
        assert_eq!(r.inner.len(), 3);
        assert!(r.err_bound < 1e-12);
        let tri = convex_hull(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]).unwrap();
        assert!(hausdorff(&r.inner, &tri).unwrap() < 1e-12);
        assert!(hausdorff(&r.outer, &tri).unwrap() < 1e-12);
    }

    #[test]
    fn hermitian_gives_segment() {
        let m = ComplexMatrix::from_real_rows(&[&[1.0, 2.0], &[2.0, -1.0]]);
        let r = numerical_range_of(&m, 64).unwrap();
        assert!(r.degenerate);
        assert_eq!(r.inner.len(), 2);
        let s5 = 5f64.sqrt();
        let mut xs: Vec<f64> = r.inner.vertices.iter().map(|v| v.re).collect();
        xs.sort_by(f64::total_cmp);
        assert!((xs[0] + s5).abs() < 1e-12 && (xs[1] - s5).abs() < 1e-12);
        assert!((numerical_radius_of(&m).unwrap() - s5).abs() < 1e-12);
    }

    #[test]
    fn scalar_range_is_point() {
        let r = numerical_range_of(&ComplexMatrix::from_rows(&[vec![c(2.0, 0.0)]]), 8).unwrap();
        assert_eq!(r.inner.vertices, vec![c(2.0, 0.0)]);
        assert!(r.degenerate);
        assert!(numerical_range_of(&jordan(1.0), 2).is_err());
    }

    #[test]
    fn containment_classes() {
        let m = ComplexMatrix::from_diag(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]);
        let r = numerical_range_of(&m, 360).unwrap();
        assert_eq!(contains_point(&r, c(0.0, 0.0)), Containment::Inside);
        assert_eq!(contains_point(&r, c(3.0, 0.0)), Containment::Outside);
        assert_eq!(contains_point(&r, c(0.0, 2.0)), Containment::BoundaryBand);
    }

    #[test]
    fn jordan_hull_comparison_fails() {
        let op = SemiHilbertOperator::from_pair(ComplexMatrix::identity(2), jordan(1.0)).unwrap();
        let cmp = conv_spectrum_compare(&op, 720).unwrap();
        assert!((cmp.hausdorff - 0.5).abs() < 1e-5);
        assert!(!cmp.verdict);
    }
}
