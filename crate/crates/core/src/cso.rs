//! Detection of operators whose compression is complex symmetric.
//!
//! A conjugation on `C^r` is written `x ↦ J·conj(x)` with `J` unitary and
//! symmetric. `M` is `C`-symmetric exactly when `M = J Mᵀ J*`.
//!
//! If `M` is `C`-symmetric, `C` commutes with every Hermitian combination
//! `H(t) = cos t·Re M + sin t·Im M` and with its partner
//! `K(t) = cos t·Im M − sin t·Re M`. On a basis of joint eigenvectors `U`
//! of `H(t)` and `K(t)` with one-dimensional joint eigenspaces, `C` can
//! only multiply each basis vector by a phase, so `J = W Wᵀ` with
//! `W = U·diag(e^{iα})`. The phases exist iff `e^{−iα_j} B_jk e^{iα_k}` is
//! real for `B = U* K U`, which a spanning-tree assignment settles.

use std::collections::VecDeque;
use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{herm_eig, psd_pinv_sqrt};
use crate::matrix::{dot, vec_norm, ComplexMatrix, C64, ZERO};
use crate::operator::SemiHilbertOperator;

pub const DEFAULT_CSO_TOL: f64 = 1e-8;

/// Eigenvalues closer than this (relative to `‖M‖_F`) are treated as equal
/// when forming joint eigenspaces.
const CLUSTER_TOL: f64 = 1e-6;

const SEARCH_RESTARTS: u64 = 8;
const SEARCH_ITERATIONS: usize = 400;

/// The antilinear involution `x ↦ J·conj(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Conjugation {
    j: ComplexMatrix,
}

impl Conjugation {
    /// Accepts `J` when it is unitary and `J·conj(J) = I` within `tol`.
    pub fn new(j: ComplexMatrix, tol: f64) -> Result<Self> {
        if !j.is_square() {
            return Err(Error::InvalidConjugation(format!("J must be square, got {}x{}", j.rows(), j.cols())));
        }
        let eye = ComplexMatrix::identity(j.rows());
        let unitary = (&(&j.adjoint() * &j) - &eye).frobenius_norm();
        if unitary > tol {
            return Err(Error::InvalidConjugation(format!("J is not unitary (residual {unitary:e})")));
        }
        let involution = (&(&j * &j.conj()) - &eye).frobenius_norm();
        if involution > tol {
            return Err(Error::InvalidConjugation(format!("J·conj(J) ≠ I (residual {involution:e})")));
        }
        Ok(Conjugation { j })
    }

    pub fn identity(r: usize) -> Self {
        Conjugation {
            j: ComplexMatrix::identity(r),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.j
    }

    pub fn dim(&self) -> usize {
        self.j.rows()
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        let conj: Vec<C64> = x.iter().map(|z| z.conj()).collect();
        self.j.mat_vec(&conj)
    }

    /// `‖M − J Mᵀ J*‖_F`
    pub fn symmetry_residual(&self, m: &ComplexMatrix) -> f64 {
        (m - &(&(&self.j * &m.transpose()) * &self.j.adjoint())).frobenius_norm()
    }
}

fn relative(residual: f64, m: &ComplexMatrix) -> f64 {
    let s = m.frobenius_norm();
    if s > 0.0 {
        residual / s
    } else {
        residual
    }
}

/// `M = J Mᵀ J*` for the compression of `op`, within `tol` relative to `‖M‖_F`.
pub fn is_cso_with(op: &SemiHilbertOperator, c: &Conjugation, tol: f64) -> Result<bool> {
    let m = op.compress()?;
    if c.dim() != m.rows() {
        return Err(Error::InvalidConjugation(format!(
            "conjugation acts on C^{}, compression on C^{}",
            c.dim(),
            m.rows()
        )));
    }
    Ok(relative(c.symmetry_residual(m), m) <= tol)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CsoVerdict {
    Yes,
    No,
    Unknown,
}

/// Which argument produced the verdict.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CsoRoute {
    /// `r ≤ 1`.
    Scalar,
    /// Phases found on a joint eigenbasis.
    PhaseAssignment,
    /// Joint eigenspaces are one-dimensional and no phases exist.
    PhaseObstruction,
    /// No nonzero symmetric `J` satisfies `M J = J Mᵀ`.
    NoSymmetricIntertwiner,
    /// Alternating projections found a conjugation.
    LocalSearch,
    /// Search budget exhausted.
    Exhausted,
}

#[derive(Clone, Debug)]
pub struct CsoDecision {
    pub verdict: CsoVerdict,
    pub route: CsoRoute,
    pub witness: Option<Conjugation>,
}

#[derive(Clone, Debug)]
pub struct CsoReport {
    pub verdict: CsoVerdict,
    pub route: CsoRoute,
    /// `false` when `T` leaves `N(A)`; the verdict then concerns `P T`
    /// restricted to `R(A)`.
    pub a_bounded: bool,
    pub witness: Option<Conjugation>,
    /// Vectors `x_n` with `{A^{1/2}x_n}` orthonormal in `R(A)` and
    /// `⟨T x_n, x_m⟩_A = ⟨T x_m, x_n⟩_A`.
    pub basis: Option<Vec<Vec<C64>>>,
    /// `max |⟨T x_n, x_m⟩_A − ⟨T x_m, x_n⟩_A|` over the basis.
    pub basis_residual: Option<f64>,
}

/// Decides whether `op` induces a complex symmetric operator.
pub fn induces_cso(op: &SemiHilbertOperator) -> Result<CsoReport> {
    let m = op.range_compression();
    let decision = decide_cso(&m, DEFAULT_CSO_TOL)?;
    let (basis, basis_residual) = match &decision.witness {
        Some(c) => {
            let w = takagi_factor(c.matrix())?;
            let space = op.space();
            let basis: Vec<Vec<C64>> = (0..w.cols()).map(|k| space.lift_vector(&w.column(k))).collect();
            let t = if op.is_a_bounded() {
                op.matrix().clone()
            } else {
                &(space.projection() * op.matrix()) * space.projection()
            };
            let mut worst: f64 = 0.0;
            for xn in &basis {
                for xm in &basis {
                    let a = space.inner(&t.mat_vec(xn), xm);
                    let b = space.inner(&t.mat_vec(xm), xn);
                    worst = worst.max((a - b).norm());
                }
            }
            (Some(basis), Some(worst))
        }
        None => (None, None),
    };
    Ok(CsoReport {
        verdict: decision.verdict,
        route: decision.route,
        a_bounded: op.is_a_bounded(),
        witness: decision.witness,
        basis,
        basis_residual,
    })
}

/// A unitary `W` with `W Wᵀ = J`, whose columns are an orthonormal basis
/// of vectors fixed by `x ↦ J·conj(x)`.
pub fn takagi_factor(j: &ComplexMatrix) -> Result<ComplexMatrix> {
    let r = j.rows();
    let mut fixed: Vec<Vec<C64>> = Vec::with_capacity(r);
    let c = Conjugation { j: j.clone() };
    let candidates = (0..r).flat_map(|k| [C64::new(1.0, 0.0), C64::new(0.0, 1.0)].map(move |s| (k, s)));
    for (k, s) in candidates {
        if fixed.len() == r {
            break;
        }
        let mut e = vec![ZERO; r];
        e[k] = s;
        let ce = c.apply(&e);
        // e + Ce is fixed by C, and inner products of fixed vectors are real
        let mut v: Vec<C64> = e.iter().zip(&ce).map(|(a, b)| a + b).collect();
        for f in &fixed {
            let p = dot(&v, f);
            for (vi, fi) in v.iter_mut().zip(f) {
                *vi -= p * fi;
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-6 {
            fixed.push(v.iter().map(|z| z / norm).collect());
        }
    }
    if fixed.len() != r {
        return Err(Error::InvalidConjugation("could not build a real basis".into()));
    }
    Ok(ComplexMatrix::from_columns(&fixed))
}

/// The decision procedure on an `r × r` matrix.
pub fn decide_cso(m: &ComplexMatrix, tol: f64) -> Result<CsoDecision> {
    let r = m.rows();
    if r <= 1 {
        return Ok(CsoDecision {
            verdict: CsoVerdict::Yes,
            route: CsoRoute::Scalar,
            witness: Some(Conjugation::identity(r)),
        });
    }
    let scale = m.frobenius_norm();
    if scale == 0.0 {
        return Ok(CsoDecision {
            verdict: CsoVerdict::Yes,
            route: CsoRoute::PhaseAssignment,
            witness: Some(Conjugation::identity(r)),
        });
    }
    let accept = |j: &ComplexMatrix| -> Option<Conjugation> {
        let c = Conjugation::new(j.clone(), 1e-8).ok()?;
        (relative(c.symmetry_residual(m), m) <= tol).then_some(c)
    };

    let joint = joint_eigenbasis(m)?;
    match assign_phases(&joint.u, &joint.b, scale * tol) {
        Some(w) => {
            if let Some(c) = accept(&(&w * &w.transpose())) {
                return Ok(CsoDecision {
                    verdict: CsoVerdict::Yes,
                    route: CsoRoute::PhaseAssignment,
                    witness: Some(c),
                });
            }
        }
        None if joint.simple => {
            return Ok(CsoDecision {
                verdict: CsoVerdict::No,
                route: CsoRoute::PhaseObstruction,
                witness: None,
            });
        }
        None => {}
    }

    let null = symmetric_intertwiners(m, tol)?;
    if null.is_empty() {
        return Ok(CsoDecision {
            verdict: CsoVerdict::No,
            route: CsoRoute::NoSymmetricIntertwiner,
            witness: None,
        });
    }
    for seed in 0..SEARCH_RESTARTS {
        if let Some(j) = alternating_projection(&null, r, seed, |j| accept(j).is_some())? {
            return Ok(CsoDecision {
                verdict: CsoVerdict::Yes,
                route: CsoRoute::LocalSearch,
                witness: accept(&j),
            });
        }
    }
    Ok(CsoDecision {
        verdict: CsoVerdict::Unknown,
        route: CsoRoute::Exhausted,
        witness: None,
    })
}

struct JointBasis {
    u: ComplexMatrix,
    b: ComplexMatrix,
    /// Every joint eigenspace is one-dimensional.
    simple: bool,
}

fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let mut out = Vec::new();
    let mut start = 0;
    for k in 1..=values.len() {
        if k == values.len() || values[k] - values[k - 1] > tol {
            out.push(start..k);
            start = k;
        }
    }
    out
}

fn min_gap(values: &[f64]) -> f64 {
    values.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min)
}

/// Eigenbasis of the best-separated `H(t)`, rotated inside each repeated
/// eigenspace to diagonalise the compression of `K(t)`.
fn joint_eigenbasis(m: &ComplexMatrix) -> Result<JointBasis> {
    let mh = m.adjoint();
    let re = (m + &mh).scale_real(0.5);
    let im = (m - &mh).scale(C64::new(0.0, -0.5));
    let combine = |a: f64, b: f64| &re.scale_real(a) + &im.scale_real(b);
    let scale = m.frobenius_norm();

    let mut best: Option<(f64, f64)> = None;
    for k in 0..32 {
        let t = PI * k as f64 / 32.0;
        let eig = herm_eig(&combine(t.cos(), t.sin()))?;
        let g = min_gap(&eig.values);
        if best.is_none_or(|(_, bg)| g > bg) {
            best = Some((t, g));
        }
    }
    let (t, _) = best.expect("at least one direction");
    let (s, c) = t.sin_cos();
    let h = combine(c, s);
    let k = combine(-s, c);
    let eig = herm_eig(&h)?;
    let mut u = eig.vectors.clone();
    let tol = CLUSTER_TOL * scale;
    let mut simple = true;
    for block in clusters(&eig.values, tol) {
        if block.len() == 1 {
            continue;
        }
        let idx: Vec<usize> = block.clone().collect();
        let ub = u.select_columns(&idx);
        let kb = (&(&ub.adjoint() * &k) * &ub).hermitian_part();
        let kb_eig = herm_eig(&kb)?;
        if clusters(&kb_eig.values, tol).len() < block.len() {
            simple = false;
        }
        let rotated = &ub * &kb_eig.vectors;
        for (col, &j) in idx.iter().enumerate() {
            for i in 0..u.rows() {
                u[(i, j)] = rotated[(i, col)];
            }
        }
    }
    let b = &(&u.adjoint() * &k) * &u;
    Ok(JointBasis { u, b, simple })
}

/// Phases `α` making `e^{−iα_j} B_jk e^{iα_k}` real on every edge with
/// `|B_jk| > tol`; returns `W = U·diag(e^{iα})`.
fn assign_phases(u: &ComplexMatrix, b: &ComplexMatrix, tol: f64) -> Option<ComplexMatrix> {
    let r = b.rows();
    let mut alpha: Vec<Option<f64>> = vec![None; r];
    for root in 0..r {
        if alpha[root].is_some() {
            continue;
        }
        alpha[root] = Some(0.0);
        let mut queue = VecDeque::from([root]);
        while let Some(j) = queue.pop_front() {
            let aj = alpha[j].expect("visited");
            for k in 0..r {
                if k == j || alpha[k].is_some() || b[(j, k)].norm() <= tol {
                    continue;
                }
                alpha[k] = Some(aj - b[(j, k)].arg());
                queue.push_back(k);
            }
        }
    }
    let alpha: Vec<f64> = alpha.into_iter().map(|a| a.expect("all visited")).collect();
    for j in 0..r {
        for k in 0..r {
            let v = C64::from_polar(1.0, alpha[k] - alpha[j]) * b[(j, k)];
            if v.im.abs() > tol {
                return None;
            }
        }
    }
    let mut w = u.clone();
    for (k, a) in alpha.iter().enumerate() {
        let phase = C64::from_polar(1.0, *a);
        for i in 0..r {
            w[(i, k)] *= phase;
        }
    }
    Some(w)
}

/// Orthonormal basis (in the Frobenius inner product) of the symmetric
/// matrices `J` with `M J = J Mᵀ`.
fn symmetric_intertwiners(m: &ComplexMatrix, tol: f64) -> Result<Vec<ComplexMatrix>> {
    let r = m.rows();
    let mut basis: Vec<ComplexMatrix> = Vec::with_capacity(r * (r + 1) / 2);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    for i in 0..r {
        for j in i..r {
            let mut e = ComplexMatrix::zeros(r, r);
            if i == j {
                e[(i, i)] = C64::new(1.0, 0.0);
            } else {
                e[(i, j)] = C64::new(s, 0.0);
                e[(j, i)] = C64::new(s, 0.0);
            }
            basis.push(e);
        }
    }
    let mt = m.transpose();
    let images: Vec<ComplexMatrix> = basis.iter().map(|e| &(m * e) - &(e * &mt)).collect();
    let d = basis.len();
    let mut gram = ComplexMatrix::zeros(d, d);
    for p in 0..d {
        for q in 0..d {
            gram[(p, q)] = images[q]
                .data()
                .iter()
                .zip(images[p].data())
                .map(|(a, b)| b.conj() * a)
                .sum();
        }
    }
    let eig = herm_eig(&gram.hermitian_part())?;
    let cutoff = (tol * m.frobenius_norm()).powi(2);
    let mut out = Vec::new();
    for k in 0..d {
        if eig.values[k] > cutoff {
            break;
        }
        let mut j = ComplexMatrix::zeros(r, r);
        for (p, e) in basis.iter().enumerate() {
            let coef = eig.vectors[(p, k)];
            if coef != ZERO {
                j = &j + &e.scale(coef);
            }
        }
        out.push(j);
    }
    Ok(out)
}

/// Unitary polar factor `X (X*X)^{−1/2}`; symmetric whenever `X` is.
fn polar_factor(x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let gram = (&x.adjoint() * x).hermitian_part();
    let d = psd_pinv_sqrt(&gram, 1e-14)?;
    Ok(x * &d.half_dagger)
}

/// Alternates between the intertwiner subspace and the symmetric unitaries.
fn alternating_projection(
    null: &[ComplexMatrix],
    r: usize,
    seed: u64,
    done: impl Fn(&ComplexMatrix) -> bool,
) -> Result<Option<ComplexMatrix>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = ComplexMatrix::zeros(r, r);
    for b in null {
        let re: f64 = StandardNormal.sample(&mut rng);
        let im: f64 = StandardNormal.sample(&mut rng);
        x = &x + &b.scale(C64::new(re, im));
    }
    for _ in 0..SEARCH_ITERATIONS {
        if x.frobenius_norm() == 0.0 {
            return Ok(None);
        }
        let j = symmetric_part(&polar_factor(&symmetric_part(&x))?);
        if done(&j) {
            return Ok(Some(j));
        }
        x = ComplexMatrix::zeros(r, r);
        for b in null {
            let coef: C64 = b.data().iter().zip(j.data()).map(|(bb, jj)| bb.conj() * jj).sum();
            x = &x + &b.scale(coef);
        }
    }
    Ok(None)
}

/// `(X + Xᵀ)/2`
fn symmetric_part(x: &ComplexMatrix) -> ComplexMatrix {
    (x + &x.transpose()).scale_real(0.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c;

    fn garcia(a: f64, b: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[1.0, a, 0.0], &[0.0, 0.0, b], &[0.0, 0.0, 1.0]])
    }

    #[test]
    fn equal_moduli_is_cso() {
        let d = decide_cso(&garcia(1.0, 1.0), DEFAULT_CSO_TOL).unwrap();
        assert_eq!(d.verdict, CsoVerdict::Yes);
        let c = d.witness.unwrap();
        assert!(c.symmetry_residual(&garcia(1.0, 1.0)) < 1e-9);
    }

    #[test]
    fn unequal_moduli_is_not_cso() {
        let d = decide_cso(&garcia(1.0, 2.0), DEFAULT_CSO_TOL).unwrap();
        assert_eq!(d.verdict, CsoVerdict::No);
    }

    #[test]
    fn symmetric_matrix_with_identity() {
        let m = ComplexMatrix::from_rows(&[vec![c(1.0, 1.0), c(2.0, -1.0)], vec![c(2.0, -1.0), c(0.0, 3.0)]]);
        let id = Conjugation::identity(2);
        assert!(id.symmetry_residual(&m) < 1e-15);
        assert_eq!(decide_cso(&m, DEFAULT_CSO_TOL).unwrap().verdict, CsoVerdict::Yes);
    }

    #[test]
    fn jordan_block_is_cso() {
        // every 2×2 matrix is complex symmetric
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(decide_cso(&m, DEFAULT_CSO_TOL).unwrap().verdict, CsoVerdict::Yes);
    }

    #[test]
    fn normal_with_repeated_eigenvalues() {
        let m = ComplexMatrix::from_diag(&[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 2.0)]);
        assert_eq!(decide_cso(&m, DEFAULT_CSO_TOL).unwrap().verdict, CsoVerdict::Yes);
        let z = ComplexMatrix::zeros(3, 3);
        assert_eq!(decide_cso(&z, DEFAULT_CSO_TOL).unwrap().verdict, CsoVerdict::Yes);
    }

    #[test]
    fn conjugation_validation() {
        assert!(Conjugation::new(ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), 1e-12).is_ok());
        // unitary but J conj(J) = −I
        let bad = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[-1.0, 0.0]]);
        assert!(matches!(Conjugation::new(bad, 1e-12), Err(Error::InvalidConjugation(_))));
        assert!(Conjugation::new(ComplexMatrix::from_real_diag(&[2.0, 1.0]), 1e-12).is_err());
    }

    #[test]
    fn takagi_factor_reproduces_j() {
        let j = ComplexMatrix::from_rows(&[vec![c(0.0, 1.0), c(0.0, 0.0)], vec![c(0.0, 0.0), c(0.0, -1.0)]]);
        let w = takagi_factor(&j).unwrap();
        assert!((&w * &w.transpose()).approx_eq(&j, 1e-14));
        assert!((&w.adjoint() * &w).approx_eq(&ComplexMatrix::identity(2), 1e-14));
    }

    #[test]
    fn induced_from_rank_one_weight() {
        let op = SemiHilbertOperator::from_pair(ComplexMatrix::from_real_diag(&[1.0, 0.0, 0.0]), garcia(1.0, 0.0))
            .unwrap();
        let report = induces_cso(&op).unwrap();
        assert_eq!(report.verdict, CsoVerdict::Yes);
        assert!(!report.a_bounded);
        assert!(report.basis_residual.unwrap() < 1e-12);
    }
}
