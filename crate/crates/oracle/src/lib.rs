//! Slow, independent reference computations for tests.
//!
//! Nothing here shares code with the main crate: matrices are plain
//! `Vec<Vec<Complex64>>`, eigenvalues come from characteristic polynomials,
//! and geometry is brute force.

use num_complex::Complex64 as C;

pub type Mat = Vec<Vec<C>>;

pub fn identity(n: usize) -> Mat {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { C::new(1.0, 0.0) } else { C::new(0.0, 0.0) }).collect())
        .collect()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let m = b[0].len();
    let k = b.len();
    (0..n)
        .map(|i| (0..m).map(|j| (0..k).map(|l| a[i][l] * b[l][j]).sum()).collect())
        .collect()
}

pub fn adjoint(a: &Mat) -> Mat {
    let n = a.len();
    let m = a[0].len();
    (0..m).map(|j| (0..n).map(|i| a[i][j].conj()).collect()).collect()
}

pub fn sub(a: &Mat, b: &Mat) -> Mat {
    a.iter()
        .zip(b)
        .map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| x - y).collect())
        .collect()
}

pub fn max_abs(a: &Mat) -> f64 {
    a.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn trace(a: &Mat) -> C {
    (0..a.len()).map(|i| a[i][i]).sum()
}

fn shift(a: &Mat, z: C) -> Mat {
    let mut out = a.clone();
    for (i, row) in out.iter_mut().enumerate() {
        row[i] -= z;
    }
    out
}

/// LU factorisation with partial pivoting, returning the determinant.
pub fn determinant(a: &Mat) -> C {
    let n = a.len();
    let mut m = a.clone();
    let mut det = C::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))
            .unwrap_or(col);
        if m[pivot][col].norm() == 0.0 {
            return C::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= m[col][col];
        let (top, bottom) = m.split_at_mut(col + 1);
        let pivot_row = &top[col];
        for r in bottom.iter_mut() {
            let f = r[col] / pivot_row[col];
            for (x, &p) in r[col..].iter_mut().zip(&pivot_row[col..]) {
                *x -= f * p;
            }
        }
    }
    det
}

/// Gauss–Jordan inverse; `None` when singular.
pub fn inverse(a: &Mat) -> Option<Mat> {
    let n = a.len();
    let mut m = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].norm().total_cmp(&m[j][col].norm()))?;
        if m[pivot][col].norm() == 0.0 {
            return None;
        }
        m.swap(pivot, col);
        inv.swap(pivot, col);
        let p = m[col][col];
        for k in 0..n {
            m[col][k] /= p;
            inv[col][k] /= p;
        }
        for row in 0..n {
            if row != col {
                let f = m[row][col];
                for k in 0..n {
                    let (mv, iv) = (m[col][k], inv[col][k]);
                    m[row][k] -= f * mv;
                    inv[row][k] -= f * iv;
                }
            }
        }
    }
    Some(inv)
}

/// Coefficients of `det(zI − A)`, highest degree first, by Faddeev–LeVerrier.
pub fn characteristic_polynomial(a: &Mat) -> Vec<C> {
    let n = a.len();
    let mut coeffs = vec![C::new(1.0, 0.0)];
    let mut m = vec![vec![C::new(0.0, 0.0); n]; n];
    for k in 1..=n {
        let prev = *coeffs.last().expect("nonempty");
        let mut am = matmul(a, &m);
        for (i, row) in am.iter_mut().enumerate() {
            row[i] += prev;
        }
        m = am;
        let c = -trace(&matmul(a, &m)) / k as f64;
        coeffs.push(c);
    }
    coeffs
}

fn horner(coeffs: &[C], z: C) -> (C, C) {
    let mut p = C::new(0.0, 0.0);
    let mut dp = C::new(0.0, 0.0);
    for c in coeffs {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

/// All roots of a polynomial (highest degree first) by Aberth–Ehrlich.
pub fn polynomial_roots(coeffs: &[C]) -> Vec<C> {
    let lead = coeffs[0];
    let monic: Vec<C> = coeffs.iter().map(|c| c / lead).collect();
    let n = monic.len() - 1;
    if n == 0 {
        return Vec::new();
    }
    let radius = 1.0 + monic[1..].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let mut z: Vec<C> = (0..n)
        .map(|k| C::from_polar(radius * 0.5, 0.4 + std::f64::consts::TAU * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner(&monic, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let repulsion: C = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (1.0 - ratio * repulsion);
            z[i] -= step;
            moved = moved.max(step.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-16 {
            break;
        }
    }
    z
}

/// Eigenvalues from the characteristic polynomial, each polished by Newton
/// steps on `det(A − z)` using `d/dz log det(A − z) = −tr((A − z)⁻¹)`.
pub fn eigenvalues(a: &Mat) -> Vec<C> {
    let mut roots = polynomial_roots(&characteristic_polynomial(a));
    for z in roots.iter_mut() {
        for _ in 0..3 {
            let Some(inv) = inverse(&shift(a, *z)) else {
                break;
            };
            let t = trace(&inv);
            if t.norm() == 0.0 || !t.norm().is_finite() {
                break;
            }
            let step = 1.0 / t;
            if step.norm() > 1e-6 * (1.0 + z.norm()) {
                break;
            }
            *z += step;
        }
    }
    roots
}

/// Largest eigenvalue of a Hermitian matrix.
pub fn hermitian_max_eigenvalue(h: &Mat) -> f64 {
    eigenvalues(h).iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max)
}

/// Support function `max Re(e^{−iθ} w)` over `W(M)`.
pub fn range_support(m: &Mat, theta: f64) -> f64 {
    let e = C::from_polar(1.0, -theta);
    let n = m.len();
    let h: Mat = (0..n)
        .map(|i| (0..n).map(|j| (e * m[i][j] + (e * m[j][i]).conj()) * 0.5).collect())
        .collect();
    hermitian_max_eigenvalue(&h)
}

/// `max_θ support(θ)` on a uniform grid: a lower bound for the numerical
/// radius, exact up to `O(grid⁻²)`.
pub fn numerical_radius(m: &Mat, grid: usize) -> f64 {
    (0..grid)
        .map(|k| range_support(m, std::f64::consts::TAU * k as f64 / grid as f64))
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Greedy matching distance between equal-size multisets.
pub fn matching_distance(a: &[C], b: &[C]) -> f64 {
    assert_eq!(a.len(), b.len());
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            pairs.push(((x - y).norm(), i, j));
        }
    }
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    let mut done = vec![false; a.len()];
    for (d, i, j) in pairs {
        if !done[i] && !used[j] {
            done[i] = true;
            used[j] = true;
            worst = worst.max(d);
        }
    }
    worst
}

fn cross(o: C, a: C, b: C) -> f64 {
    (a.re - o.re) * (b.im - o.im) - (a.im - o.im) * (b.re - o.re)
}

/// Counter-clockwise hull vertices by testing every ordered pair as an edge.
pub fn brute_force_hull(points: &[C], tol: f64) -> Vec<C> {
    let mut pts: Vec<C> = Vec::new();
    for p in points {
        if !pts.iter().any(|q| (q - p).norm() <= tol) {
            pts.push(*p);
        }
    }
    if pts.len() <= 2 {
        return pts;
    }
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            if i == j {
                continue;
            }
            let len = (pts[j] - pts[i]).norm();
            let ok = (0..pts.len()).all(|k| {
                let c = cross(pts[i], pts[j], pts[k]) / len;
                if c < -tol {
                    return false;
                }
                if c.abs() <= tol {
                    let t = ((pts[k] - pts[i]) * (pts[j] - pts[i]).conj()).re / (len * len);
                    return (-1e-12..=1.0 + 1e-12).contains(&t);
                }
                true
            });
            if ok {
                edges.push((i, j));
            }
        }
    }
    if edges.is_empty() {
        return pts;
    }
    let start = edges[0].0;
    let mut hull = vec![pts[start]];
    let mut current = start;
    for _ in 0..edges.len() {
        let Some(&(_, next)) = edges.iter().find(|e| e.0 == current) else {
            break;
        };
        if next == start {
            break;
        }
        hull.push(pts[next]);
        current = next;
    }
    hull
}

fn point_segment(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * t)).norm()
}

fn inside(poly: &[C], p: C) -> bool {
    poly.len() >= 3 && (0..poly.len()).all(|i| cross(poly[i], poly[(i + 1) % poly.len()], p) >= 0.0)
}

/// Distance from `p` to a convex polygon (zero inside).
pub fn distance_to_polygon(poly: &[C], p: C) -> f64 {
    if poly.len() == 1 {
        return (p - poly[0]).norm();
    }
    if inside(poly, p) {
        return 0.0;
    }
    (0..poly.len())
        .map(|i| point_segment(p, poly[i], poly[(i + 1) % poly.len()]))
        .fold(f64::INFINITY, f64::min)
}

fn boundary_samples(poly: &[C], per_edge: usize) -> Vec<C> {
    if poly.len() == 1 {
        return poly.to_vec();
    }
    let mut out = Vec::new();
    for i in 0..poly.len() {
        let (a, b) = (poly[i], poly[(i + 1) % poly.len()]);
        for k in 0..per_edge {
            out.push(a + (b - a) * (k as f64 / per_edge as f64));
        }
    }
    out
}

/// Hausdorff distance between convex polygons, sampled along the boundaries.
pub fn sampled_hausdorff(p: &[C], q: &[C], per_edge: usize) -> f64 {
    let one = boundary_samples(p, per_edge)
        .into_iter()
        .map(|z| distance_to_polygon(q, z))
        .fold(0.0, f64::max);
    let two = boundary_samples(q, per_edge)
        .into_iter()
        .map(|z| distance_to_polygon(p, z))
        .fold(0.0, f64::max);
    one.max(two)
}
