//! Eigenvalues of general complex matrices: Householder reduction to upper
//! Hessenberg form followed by single-shift complex QR with deflation.

use crate::error::{Error, Result};
use crate::matrix::{c, ComplexMatrix, C64, ZERO};

/// Iteration budget per eigenvalue.
pub const ITERATIONS_PER_EIGENVALUE: usize = 30;

/// Reduces `m` to upper Hessenberg form by Householder similarity.
pub fn hessenberg(m: &ComplexMatrix) -> ComplexMatrix {
    assert!(m.is_square());
    let n = m.rows();
    let mut h = m.clone();
    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = x[0];
        let phase = if x0.norm() == 0.0 { c(1.0, 0.0) } else { x0 / x0.norm() };
        // v = x + e^{i arg x0} ‖x‖ e1 avoids cancellation
        let mut v = x;
        v[0] += phase * alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // H <- (I - 2vv*/v*v) H
        for j in 0..n {
            let mut s = ZERO;
            for (t, vi) in v.iter().enumerate() {
                s += vi.conj() * h[(k + 1 + t, j)];
            }
            let f = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                h[(k + 1 + t, j)] -= vi * f;
            }
        }
        // H <- H (I - 2vv*/v*v)
        for i in 0..n {
            let mut s = ZERO;
            for (t, vi) in v.iter().enumerate() {
                s += h[(i, k + 1 + t)] * vi;
            }
            let f = s * (2.0 / vnorm2);
            for (t, vi) in v.iter().enumerate() {
                h[(i, k + 1 + t)] -= f * vi.conj();
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
    h
}

/// Complex Givens rotation `G = [[c, s], [−conj(s), c]]` with real `c`,
/// chosen so that `G·(x, y)ᵀ = (r, 0)ᵀ`.
#[derive(Clone, Copy, Debug)]
struct Givens {
    c: f64,
    s: C64,
}

impl Givens {
    fn new(x: C64, y: C64) -> Self {
        let ax = x.norm();
        let ay = y.norm();
        if ay == 0.0 {
            return Givens { c: 1.0, s: ZERO };
        }
        if ax == 0.0 {
            return Givens { c: 0.0, s: c(1.0, 0.0) };
        }
        let r = ax.hypot(ay);
        let alpha = x / ax;
        Givens {
            c: ax / r,
            s: alpha * y.conj() / r,
        }
    }

    /// Rows `i, i+1` of `h`, columns `cols`.
    fn apply_left(&self, h: &mut ComplexMatrix, i: usize, cols: std::ops::Range<usize>) {
        for j in cols {
            let a = h[(i, j)];
            let b = h[(i + 1, j)];
            h[(i, j)] = a * self.c + self.s * b;
            h[(i + 1, j)] = -self.s.conj() * a + b * self.c;
        }
    }

    /// Multiplies columns `i, i+1` on the right by `G*`.
    fn apply_right_adjoint(&self, h: &mut ComplexMatrix, i: usize, rows: std::ops::Range<usize>) {
        for k in rows {
            let a = h[(k, i)];
            let b = h[(k, i + 1)];
            h[(k, i)] = a * self.c + b * self.s.conj();
            h[(k, i + 1)] = -a * self.s + b * self.c;
        }
    }
}

/// Eigenvalue of the 2×2 block `[[a, b], [c, d]]` closest to `d`.
fn wilkinson_shift(a: C64, b: C64, cc: C64, d: C64) -> C64 {
    let tr_half = (a + d) * 0.5;
    let det = a * d - b * cc;
    let disc = (tr_half * tr_half - det).sqrt();
    let l1 = tr_half + disc;
    let l2 = tr_half - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

/// Eigenvalues of a square complex matrix, as a multiset of size `n`.
///
/// The output order follows deflation (bottom of the Hessenberg form first);
/// use [`sort_spectrum`] for a canonical order.
pub fn general_eig(m: &ComplexMatrix) -> Result<Vec<C64>> {
    if !m.is_square() {
        return Err(Error::domain(format!(
            "general_eig needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut h = hessenberg(m);
    let scale = m.frobenius_norm();
    let max_iter = ITERATIONS_PER_EIGENVALUE * n.max(1);
    let eps = f64::EPSILON;
    let mut out = vec![ZERO; n];
    let mut done = vec![false; n];
    let mut hi = n - 1;
    let mut total = 0usize;
    let mut since_deflation = 0usize;

    loop {
        // Deflate converged trailing eigenvalues.
        loop {
            if hi == 0 {
                out[0] = h[(0, 0)];
                done[0] = true;
                return Ok(out);
            }
            let sub = h[(hi, hi - 1)].norm();
            let diag = h[(hi, hi)].norm() + h[(hi - 1, hi - 1)].norm();
            let small = if diag > 0.0 { eps * diag } else { eps * scale };
            if sub <= small || sub <= f64::MIN_POSITIVE {
                h[(hi, hi - 1)] = ZERO;
                out[hi] = h[(hi, hi)];
                done[hi] = true;
                hi -= 1;
                since_deflation = 0;
            } else {
                break;
            }
        }
        // Active block [lo, hi]: walk up to the nearest negligible subdiagonal.
        let mut lo = hi;
        while lo > 0 {
            let sub = h[(lo, lo - 1)].norm();
            let diag = h[(lo, lo)].norm() + h[(lo - 1, lo - 1)].norm();
            let small = if diag > 0.0 { eps * diag } else { eps * scale };
            if sub <= small {
                h[(lo, lo - 1)] = ZERO;
                break;
            }
            lo -= 1;
        }

        if total >= max_iter {
            let deflated = (0..n).filter(|&i| done[i]).map(|i| out[i]).collect();
            return Err(Error::NonConvergence {
                iterations: total,
                dim: n,
                deflated,
            });
        }
        total += 1;
        since_deflation += 1;

        let mu = if since_deflation.is_multiple_of(11) {
            // exceptional shift to break cycles
            h[(hi, hi)] + c(0.75 * h[(hi, hi - 1)].norm(), 0.25 * h[(hi, hi - 1)].norm())
        } else {
            wilkinson_shift(h[(hi - 1, hi - 1)], h[(hi - 1, hi)], h[(hi, hi - 1)], h[(hi, hi)])
        };

        qr_step(&mut h, lo, hi, mu);
    }
}

/// One explicitly shifted QR step `H - μI = QR`, `H ← RQ + μI` on the
/// active window `[lo, hi]`.
fn qr_step(h: &mut ComplexMatrix, lo: usize, hi: usize, mu: C64) {
    for i in lo..=hi {
        h[(i, i)] -= mu;
    }
    let mut rots = Vec::with_capacity(hi - lo);
    for k in lo..hi {
        let g = Givens::new(h[(k, k)], h[(k + 1, k)]);
        g.apply_left(h, k, k..hi + 1);
        h[(k + 1, k)] = ZERO;
        rots.push(g);
    }
    for (idx, g) in rots.iter().enumerate() {
        let k = lo + idx;
        g.apply_right_adjoint(h, k, lo..(k + 2).min(hi) + 1);
    }
    for i in lo..=hi {
        h[(i, i)] += mu;
    }
}

/// Canonical order: ascending real part, then imaginary part.
pub fn sort_spectrum(points: &mut [C64]) {
    points.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{c, ComplexMatrix};

    fn sorted(mut v: Vec<C64>) -> Vec<C64> {
        sort_spectrum(&mut v);
        v
    }

    #[test]
    fn diagonal_matrix() {
        let d = [c(0.0, 2.0), c(-1.5, -1.0), c(1.5, -1.0)];
        let ev = sorted(general_eig(&ComplexMatrix::from_diag(&d)).unwrap());
        let expect = sorted(d.to_vec());
        for (a, b) in ev.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn companion_of_z2_minus_1() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ev = sorted(general_eig(&m).unwrap());
        assert!((ev[0] + 1.0).norm() < 1e-14);
        assert!((ev[1] - 1.0).norm() < 1e-14);
    }

    #[test]
    fn rotation_has_conjugate_pair() {
        let m = ComplexMatrix::from_real_rows(&[&[0.0, -1.0], &[1.0, 0.0]]);
        let ev = sorted(general_eig(&m).unwrap());
        assert!((ev[0] - c(0.0, -1.0)).norm() < 1e-14);
        assert!((ev[1] - c(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn hessenberg_is_similar() {
        let m = ComplexMatrix::from_rows(&[
            vec![c(1.0, 0.5), c(2.0, 0.0), c(0.0, 1.0), c(-1.0, 0.0)],
            vec![c(0.3, 0.0), c(-1.0, 1.0), c(2.0, 0.0), c(0.5, 0.5)],
            vec![c(0.0, 2.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, -1.0)],
            vec![c(1.0, 1.0), c(0.0, -1.0), c(3.0, 0.0), c(0.2, 0.0)],
        ]);
        let h = hessenberg(&m);
        for i in 2..4 {
            for j in 0..i - 1 {
                assert_eq!(h[(i, j)], ZERO);
            }
        }
        assert!((h.trace() - m.trace()).norm() < 1e-13);
        assert!((h.determinant() - m.determinant()).norm() < 1e-12 * m.determinant().norm());
    }

    #[test]
    fn jordan_block_and_zero() {
        let j = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert_eq!(general_eig(&j).unwrap(), vec![ZERO, ZERO]);
        assert_eq!(general_eig(&ComplexMatrix::zeros(3, 3)).unwrap(), vec![ZERO; 3]);
        assert!(general_eig(&ComplexMatrix::zeros(2, 3)).is_err());
    }
}
