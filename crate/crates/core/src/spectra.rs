//! The A-spectra of a finite pair, each computed through the compression `M`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{general_eig, pinv_absolute, smallest_singular_pair, sort_spectrum, spectral_norm};
use crate::matrix::{ComplexMatrix, C64};
use crate::operator::{lift, SemiHilbertOperator};

/// Largest polynomial degree accepted by [`spectral_mapping_check`].
pub const MAX_MAPPING_DEGREE: usize = 6;

/// Squarings used for the Gelfand-formula estimate of the spectral radius.
pub const RADIUS_SQUARINGS: u32 = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SpectrumKind {
    Full,
    Point,
    Approximate,
    Essential,
}

/// A multiset of spectral values in canonical order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSet {
    pub points: Vec<C64>,
    pub kind: SpectrumKind,
    pub tol: f64,
}

impl SpectrumSet {
    pub fn new(mut points: Vec<C64>, kind: SpectrumKind, tol: f64) -> Self {
        sort_spectrum(&mut points);
        SpectrumSet { points, kind, tol }
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    /// Points merged when closer than `tol` (relative to `1 + |λ|`).
    pub fn distinct(&self) -> Vec<C64> {
        let mut out: Vec<C64> = Vec::new();
        for &p in &self.points {
            if !out.iter().any(|q| (p - q).norm() <= self.tol * (1.0 + p.norm())) {
                out.push(p);
            }
        }
        out
    }

    pub fn contains(&self, z: C64, tol: f64) -> bool {
        self.points.iter().any(|p| (p - z).norm() <= tol)
    }

    pub fn max_modulus(&self) -> f64 {
        self.points.iter().map(|p| p.norm()).fold(0.0, f64::max)
    }
}

/// `σ_A(T)`: the eigenvalues of `M`.
pub fn a_spectrum(op: &SemiHilbertOperator) -> Result<SpectrumSet> {
    let m = op.compress()?;
    Ok(SpectrumSet::new(general_eig(m)?, SpectrumKind::Full, op.space().tol()))
}

/// `σ_{A_p}(T)`: eigenvalues of `Q* T Q`, the part of `P T` living on `R(A)`.
pub fn a_point_spectrum(op: &SemiHilbertOperator) -> Result<SpectrumSet> {
    op.compress()?;
    let q = op.space().range_basis();
    let block = &(&q.adjoint() * op.matrix()) * q;
    Ok(SpectrumSet::new(general_eig(&block)?, SpectrumKind::Point, op.space().tol()))
}

/// `σ_{A_app}(T)` with, for every point, an A-unit vector `x ∈ R(A)` and
/// its residual `‖(T − λ)x‖_A`.
#[derive(Clone, Debug)]
pub struct ApproximateSpectrum {
    pub set: SpectrumSet,
    pub witnesses: Vec<Vec<C64>>,
    pub residuals: Vec<f64>,
}

pub fn a_approx_spectrum(op: &SemiHilbertOperator) -> Result<ApproximateSpectrum> {
    let full = a_spectrum(op)?;
    let m = op.compress()?;
    let mut witnesses = Vec::with_capacity(full.len());
    let mut residuals = Vec::with_capacity(full.len());
    for &lambda in &full.points {
        let (sigma, y) = smallest_singular_pair(&m.shift(lambda))?;
        witnesses.push(op.space().lift_vector(&y));
        residuals.push(sigma);
    }
    Ok(ApproximateSpectrum {
        set: SpectrumSet {
            kind: SpectrumKind::Approximate,
            ..full
        },
        witnesses,
        residuals,
    })
}

/// `min ‖(T − λ)x‖_A` over A-unit vectors, i.e. `σ_min(M − λ)`.
pub fn lower_bound_at(op: &SemiHilbertOperator, lambda: C64) -> Result<f64> {
    Ok(smallest_singular_pair(&op.compress()?.shift(lambda))?.0)
}

/// An explicit A-Fredholm certificate for `T − λ`:
/// `A(T − λ)S − A = A K₁` and `AS(T − λ) − A = A K₂`.
#[derive(Clone, Debug)]
pub struct FredholmWitness {
    pub lambda: C64,
    pub s: ComplexMatrix,
    pub k1: ComplexMatrix,
    pub k2: ComplexMatrix,
    pub residual_left: f64,
    pub residual_right: f64,
}

#[derive(Clone, Debug)]
pub struct EssentialSpectrum {
    pub set: SpectrumSet,
    pub witness: FredholmWitness,
}

/// `σ_{A_ess}(T)`, empty for every finite pair. The witness is built at
/// `lambda` from `S = lift((M − λ)†)`.
pub fn a_essential_spectrum(op: &SemiHilbertOperator, lambda: C64) -> Result<EssentialSpectrum> {
    let m = op.compress()?;
    let shifted = m.shift(lambda);
    let space = op.space();
    let r = space.rank();
    let scale = spectral_norm(m)? + lambda.norm();
    let n_dag = pinv_absolute(&shifted, f64::EPSILON.sqrt() * scale)?;
    let eye = ComplexMatrix::identity(r);
    let s = lift(space, &n_dag)?.matrix().clone();
    let k1 = lift(space, &(&(&shifted * &n_dag) - &eye))?.matrix().clone();
    let k2 = lift(space, &(&(&n_dag * &shifted) - &eye))?.matrix().clone();

    let a = space.weight();
    let t = op.matrix().shift(lambda);
    let residual_left = (&(&(&(a * &t) * &s) - a) - &(a * &k1)).frobenius_norm();
    let residual_right = (&(&(&(a * &s) * &t) - a) - &(a * &k2)).frobenius_norm();
    Ok(EssentialSpectrum {
        set: SpectrumSet::new(Vec::new(), SpectrumKind::Essential, space.tol()),
        witness: FredholmWitness {
            lambda,
            s,
            k1,
            k2,
            residual_left,
            residual_right,
        },
    })
}

/// `r_A(T)` computed two ways.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralRadius {
    /// `max |λ|` over `σ_A(T)`.
    pub r_spec: f64,
    /// `‖M^{2^k}‖^{1/2^k}` at `k = RADIUS_SQUARINGS`.
    pub r_limit: f64,
    /// Convergence estimate for `r_limit`, from the last two squarings.
    pub tolerance: f64,
}

impl SpectralRadius {
    pub fn consistent(&self) -> bool {
        (self.r_spec - self.r_limit).abs() <= self.tolerance
    }
}

pub fn a_spectral_radius(op: &SemiHilbertOperator) -> Result<SpectralRadius> {
    let r_spec = a_spectrum(op)?.max_modulus();
    let m = op.compress()?;
    let estimates = gelfand_estimates(m, RADIUS_SQUARINGS)?;
    let r_limit = estimates[estimates.len() - 1];
    let previous = estimates[estimates.len() - 2];
    let tolerance = 2.0 * (previous - r_limit).abs() + 1e-9 * (1.0 + r_limit);
    Ok(SpectralRadius {
        r_spec,
        r_limit,
        tolerance,
    })
}

/// `‖M^{2^k}‖^{1/2^k}` for `k = 0..=squarings`, with the power kept
/// normalised and its scale tracked in logarithms.
fn gelfand_estimates(m: &ComplexMatrix, squarings: u32) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(squarings as usize + 1);
    let norm = spectral_norm(m)?;
    if norm == 0.0 {
        return Ok(vec![0.0; squarings as usize + 1]);
    }
    out.push(norm);
    let mut power = m.scale_real(1.0 / norm);
    let mut log_scale = norm.ln();
    for k in 1..=squarings {
        power = &power * &power;
        log_scale *= 2.0;
        let f = power.frobenius_norm();
        if f == 0.0 {
            out.resize(squarings as usize + 1, 0.0);
            return Ok(out);
        }
        power = power.scale_real(1.0 / f);
        log_scale += f.ln();
        let exponent = f64::from(1u32 << k);
        out.push(((log_scale + spectral_norm(&power)?.ln()) / exponent).exp());
    }
    Ok(out)
}

/// Outcome of comparing `σ_A(p(T))` with `p(σ_A(T))`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MappingCheck {
    pub degree: usize,
    pub max_distance: f64,
    pub tolerance: f64,
    pub holds: bool,
}

/// Evaluates `p(z) = Σ coeffs[k] z^k`.
pub fn eval_polynomial(coeffs: &[C64], z: C64) -> C64 {
    coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, &a| acc * z + a)
}

/// Polynomial degree ignoring trailing zero coefficients.
pub fn degree(coeffs: &[C64]) -> usize {
    coeffs.iter().rposition(|a| a.norm() != 0.0).unwrap_or(0)
}

/// Matches two equal-size multisets by repeatedly pairing the closest
/// remaining points and returns the largest paired distance.
pub fn multiset_distance(a: &[C64], b: &[C64]) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(a.len() * b.len());
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut used_a = vec![false; a.len()];
    let mut used_b = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for (d, i, j) in pairs {
        if !used_a[i] && !used_b[j] {
            used_a[i] = true;
            used_b[j] = true;
            worst = worst.max(d);
        }
    }
    Some(worst)
}

/// Checks `σ_A(p(T)) = p(σ_A(T))` as multisets with tolerance
/// `1e−7·(1 + r_A)^deg`.
pub fn spectral_mapping_check(op: &SemiHilbertOperator, coeffs: &[C64]) -> Result<MappingCheck> {
    let deg = degree(coeffs);
    if deg > MAX_MAPPING_DEGREE {
        return Err(Error::domain(format!(
            "polynomial degree {deg} exceeds the maximum {MAX_MAPPING_DEGREE}"
        )));
    }
    let sigma = a_spectrum(op)?;
    let mapped: Vec<C64> = sigma.points.iter().map(|&l| eval_polynomial(coeffs, l)).collect();
    let image = a_spectrum(&op.polynomial(coeffs)?)?;
    let tolerance = 1e-7 * (1.0 + sigma.max_modulus()).powi(deg as i32);
    let max_distance = multiset_distance(&mapped, &image.points).unwrap_or(f64::INFINITY);
    Ok(MappingCheck {
        degree: deg,
        max_distance,
        tolerance,
        holds: max_distance <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn rank_one_pair() -> SemiHilbertOperator {
        SemiHilbertOperator::from_pair(
            ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]),
            ComplexMatrix::from_real_rows(&[&[2.0, 2.0], &[0.0, 0.0]]),
        )
        .unwrap()
    }

    fn jordan() -> SemiHilbertOperator {
        SemiHilbertOperator::from_pair(
            ComplexMatrix::identity(2),
            ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]),
        )
        .unwrap()
    }

    #[test]
    fn spectrum_of_two_by_two_example() {
        let op = rank_one_pair();
        let s = a_spectrum(&op).unwrap();
        assert_eq!(s.len(), 1);
        assert!((s.points[0] - c(2.0, 0.0)).norm() < 1e-14);
        let p = a_point_spectrum(&op).unwrap();
        assert!((p.points[0] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn approximate_witness_for_two_by_two_example() {
        let app = a_approx_spectrum(&rank_one_pair()).unwrap();
        let x = &app.witnesses[0];
        // x = ±(1, 1)/2 up to phase
        let phase = x[0] / x[0].norm();
        assert!((x[0] / phase - c(0.5, 0.0)).norm() < 1e-14);
        assert!((x[1] / phase - c(0.5, 0.0)).norm() < 1e-14);
        assert!(app.residuals[0] < 1e-14);
    }

    #[test]
    fn essential_spectrum_is_empty_with_witness() {
        let op = rank_one_pair();
        for lambda in [c(0.0, 0.0), c(2.0, 0.0), c(1.0, -3.0)] {
            let ess = a_essential_spectrum(&op, lambda).unwrap();
            assert!(ess.set.is_empty());
            assert!(ess.witness.residual_left < 1e-12);
            assert!(ess.witness.residual_right < 1e-12);
        }
    }

    #[test]
    fn nilpotent_radius() {
        let r = a_spectral_radius(&jordan()).unwrap();
        assert_eq!(r.r_spec, 0.0);
        assert_eq!(r.r_limit, 0.0);
        assert!((jordan().a_operator_norm().unwrap() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn radius_of_diagonal() {
        let op = SemiHilbertOperator::from_pair(
            ComplexMatrix::identity(3),
            ComplexMatrix::from_diag(&[c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)]),
        )
        .unwrap();
        let r = a_spectral_radius(&op).unwrap();
        assert!((r.r_spec - 2.0).abs() < 1e-14);
        assert!((r.r_limit - 2.0).abs() < 1e-12);
        assert!(r.consistent());
    }

    #[test]
    fn radius_estimate_brackets_jordan_growth() {
        let op = SemiHilbertOperator::from_pair(
            ComplexMatrix::identity(2),
            ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]),
        )
        .unwrap();
        let r = a_spectral_radius(&op).unwrap();
        assert!((r.r_spec - 1.0).abs() < 1e-7);
        assert!(r.consistent());
    }

    #[test]
    fn mapping_square_of_two_by_two_example() {
        let op = rank_one_pair();
        let check = spectral_mapping_check(&op, &[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!(check.holds);
        assert_eq!(check.degree, 2);
        let sq = a_spectrum(&op.polynomial(&[c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]).unwrap()).unwrap();
        assert!((sq.points[0] - c(4.0, 0.0)).norm() < 1e-13);
        let too_high = vec![c(1.0, 0.0); MAX_MAPPING_DEGREE + 2];
        assert!(spectral_mapping_check(&op, &too_high).is_err());
    }

    #[test]
    fn multiset_matching() {
        let a = [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)];
        let b = [c(1.0, 0.0), c(0.0, 1e-9), c(0.0, 0.0)];
        assert!(multiset_distance(&a, &b).unwrap() <= 1e-9);
        let b2 = [c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)];
        assert_eq!(multiset_distance(&a, &b2).unwrap(), 1.0);
        assert!(multiset_distance(&a, &b[..2]).is_none());
    }

    #[test]
    fn distinct_merges_repeats() {
        let s = SpectrumSet::new(vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], SpectrumKind::Full, 1e-10);
        assert_eq!(s.distinct().len(), 2);
    }
}
