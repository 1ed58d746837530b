//! Cyclic Jacobi eigensolver for complex Hermitian matrices.

use crate::error::{Error, Result};
use crate::matrix::{c, ComplexMatrix, C64, ZERO};

/// Relative Hermitian-ness tolerance accepted by [`herm_eig`].
pub const HERMITIAN_TOL: f64 = 1e-8;

const MAX_SWEEPS: usize = 64;

/// Eigen-decomposition `H = V diag(values) V*` with ascending eigenvalues.
#[derive(Clone, Debug)]
pub struct HermEig {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermEig {
    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    pub fn max(&self) -> f64 {
        self.values.last().copied().unwrap_or(0.0)
    }

    pub fn min(&self) -> f64 {
        self.values.first().copied().unwrap_or(0.0)
    }
}

/// Eigen-decomposition of a Hermitian matrix by cyclic Jacobi rotations.
///
/// The input is symmetrised as `(H + H*) / 2` after checking that
/// `‖H − H*‖_F ≤ 1e-8·‖H‖_F`. Sweeps skip rotations whose pivot is below the
/// current threshold and stop once the off-diagonal mass is at roundoff level.
pub fn herm_eig(h: &ComplexMatrix) -> Result<HermEig> {
    if !h.is_square() {
        return Err(Error::domain(format!(
            "herm_eig needs a square matrix, got {}x{}",
            h.rows(),
            h.cols()
        )));
    }
    let scale = h.frobenius_norm();
    let asym = h.hermitian_residual();
    if asym > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
        return Err(Error::domain(format!(
            "herm_eig needs a Hermitian matrix (‖H − H*‖_F = {asym:e})"
        )));
    }
    let n = h.rows();
    let sym = h.hermitian_part();
    let mut a = sym.data().to_vec();
    for i in 0..n {
        a[i * n + i] = c(a[i * n + i].re, 0.0);
    }
    // Row k of `vt` is the k-th eigenvector.
    let mut vt = ComplexMatrix::identity(n).data().to_vec();
    if n > 1 && scale > 0.0 {
        jacobi_sweeps(&mut a, &mut vt, n, scale);
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));
    let values = order.iter().map(|&i| a[i * n + i].re).collect();
    let cols: Vec<Vec<C64>> = order.iter().map(|&i| vt[i * n..(i + 1) * n].to_vec()).collect();
    let mut vectors = ComplexMatrix::from_columns(&cols);
    normalize_phases(&mut vectors);
    Ok(HermEig { values, vectors })
}

fn off_diagonal_norm(a: &[C64], n: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[i * n + j].norm_sqr();
            }
        }
    }
    s.sqrt()
}

fn jacobi_sweeps(a: &mut [C64], vt: &mut [C64], n: usize, scale: f64) {
    let eps = f64::EPSILON;
    for sweep in 0..MAX_SWEEPS {
        let off = off_diagonal_norm(a, n);
        if off == 0.0 {
            return;
        }
        // Early sweeps only touch large pivots.
        let threshold = if sweep < 3 {
            0.2 * off / (n * n) as f64
        } else {
            0.0
        };
        let mut rotations = 0;
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = a[p * n + q];
                let mag = apq.norm();
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                if mag <= eps * ((app * aqq).abs().sqrt() + 1e-3 * scale) {
                    a[p * n + q] = ZERO;
                    a[q * n + p] = ZERO;
                    continue;
                }
                if mag <= threshold {
                    continue;
                }
                rotate(a, vt, n, (p, q), app, aqq, apq);
                rotations += 1;
            }
        }
        if rotations == 0 && sweep >= 3 {
            return;
        }
    }
}

/// Annihilates `a[p][q]` with the unitary `[[c, s], [−s·e^{−iφ}, c·e^{−iφ}]]`
/// acting on columns `p, q`, where `a[p][q] = |a[p][q]|·e^{iφ}`. Only the
/// lower triangle is rotated; the upper one is refilled by conjugation.
fn rotate(a: &mut [C64], vt: &mut [C64], n: usize, (p, q): (usize, usize), app: f64, aqq: f64, apq: C64) {
    let g = apq.norm();
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta == 0.0 {
        1.0
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let cs = 1.0 / (t * t + 1.0).sqrt();
    let sn = t * cs;
    let u11 = c(cs, 0.0);
    let u12 = c(sn, 0.0);
    let u21 = -phase.conj() * sn;
    let u22 = phase.conj() * cs;

    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = a[k * n + p];
        let akq = a[k * n + q];
        let np = akp * u11 + akq * u21;
        let nq = akp * u12 + akq * u22;
        a[k * n + p] = np;
        a[k * n + q] = nq;
        a[p * n + k] = np.conj();
        a[q * n + k] = nq.conj();
    }
    a[p * n + p] = c(app - t * g, 0.0);
    a[q * n + q] = c(aqq + t * g, 0.0);
    a[p * n + q] = ZERO;
    a[q * n + p] = ZERO;
    let (head, tail) = vt.split_at_mut(q * n);
    let row_p = &mut head[p * n..(p + 1) * n];
    let row_q = &mut tail[..n];
    for k in 0..n {
        let vkp = row_p[k];
        let vkq = row_q[k];
        row_p[k] = vkp * u11 + vkq * u21;
        row_q[k] = vkp * u12 + vkq * u22;
    }
}

/// Rotates each column so its first entry of maximal modulus is real positive.
pub(crate) fn normalize_phases(v: &mut ComplexMatrix) {
    for j in 0..v.cols() {
        let col = v.column(j);
        let peak = col.iter().map(|z| z.norm()).fold(0.0, f64::max);
        let Some(pivot) = col.iter().find(|z| z.norm() >= peak * (1.0 - 1e-9)) else {
            continue;
        };
        if pivot.norm() == 0.0 {
            continue;
        }
        let ph = pivot.conj() / pivot.norm();
        for i in 0..v.rows() {
            v[(i, j)] *= ph;
        }
    }
}
