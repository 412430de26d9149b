//! Independent reference implementations used only by tests. Nothing here
//! calls into the library's linear algebra.

#![allow(dead_code, clippy::needless_range_loop)]

use rand::Rng;
use ssr_core::Point2;

pub type Mat = Vec<Vec<f64>>;

/// Cyclic Jacobi eigen-decomposition of a symmetric matrix.
/// Returns eigenvalues (descending) and matching eigenvectors as columns.
pub fn jacobi_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.len();
    let mut a = a.clone();
    let mut v: Mat = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[k][p], v[k][q]);
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j][j].total_cmp(&a[i][i]));
    let vals = order.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| order.iter().map(|&c| v[r][c]).collect()).collect();
    (vals, vecs)
}

/// Centred K×3 matrix of planar points (z = 0).
pub fn centred(points: &[Point2]) -> Mat {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.x).sum::<f64>() / k;
    let my = points.iter().map(|p| p.y).sum::<f64>() / k;
    points.iter().map(|p| vec![p.x - mx, p.y - my, 0.0]).collect()
}

/// Left singular vectors via eigenvectors of XᵀX: u_i = X v_i / σ_i,
/// keeping σ_i > tol·σ_max, then re-orthonormalised (two Gram–Schmidt
/// passes) because u_i drifts off orthogonality when σ_i ≪ σ_max.
/// Columns returned as separate vectors.
pub fn oracle_basis(x: &Mat, tol: f64) -> Option<Vec<Vec<f64>>> {
    let cols = x[0].len();
    let xtx: Mat = (0..cols)
        .map(|i| (0..cols).map(|j| x.iter().map(|r| r[i] * r[j]).sum()).collect())
        .collect();
    let (vals, vecs) = jacobi_eigen(&xtx);
    let sigmas: Vec<f64> = vals.iter().map(|v| v.max(0.0).sqrt()).collect();
    if sigmas[0] <= 1e-12 {
        return None;
    }
    let mut out = Vec::new();
    for (i, &s) in sigmas.iter().enumerate() {
        if s <= tol * sigmas[0] {
            continue;
        }
        let u: Vec<f64> = x
            .iter()
            .map(|r| (0..cols).map(|c| r[c] * vecs[c][i]).sum::<f64>() / s)
            .collect();
        out.push(u);
    }
    for _ in 0..2 {
        for i in 0..out.len() {
            for j in 0..i {
                let d: f64 = out[i].iter().zip(&out[j]).map(|(a, b)| a * b).sum();
                let prev = out[j].clone();
                out[i].iter_mut().zip(&prev).for_each(|(a, b)| *a -= d * b);
            }
            let n = out[i].iter().map(|a| a * a).sum::<f64>().sqrt();
            out[i].iter_mut().for_each(|a| *a /= n);
        }
    }
    Some(out)
}

/// K×K projection matrix Σ φφᵀ.
pub fn projection(basis: &[Vec<f64>]) -> Mat {
    let k = basis[0].len();
    (0..k)
        .map(|i| (0..k).map(|j| basis.iter().map(|b| b[i] * b[j]).sum()).collect())
        .collect()
}

/// trace(Q₁Q₂)/N.
pub fn projection_trace_similarity(a: &[Vec<f64>], b: &[Vec<f64>]) -> f64 {
    let (qa, qb) = (projection(a), projection(b));
    let k = qa.len();
    let mut tr = 0.0;
    for i in 0..k {
        for j in 0..k {
            tr += qa[i][j] * qb[j][i];
        }
    }
    tr / a.len() as f64
}

pub fn random_points(rng: &mut impl Rng, k: usize, spread: f64) -> Vec<Point2> {
    (0..k)
        .map(|_| Point2::new(rng.random_range(-spread..spread), rng.random_range(-spread..spread)))
        .collect()
}

/// Random invertible 2D affine map (rotation, scale, shear, translation).
pub fn random_affine(rng: &mut impl Rng) -> impl Fn(Point2) -> Point2 {
    let th: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let (sx, sy): (f64, f64) = (rng.random_range(0.2..5.0), rng.random_range(0.2..5.0));
    let shear: f64 = rng.random_range(-2.0..2.0);
    let (tx, ty): (f64, f64) = (rng.random_range(-500.0..500.0), rng.random_range(-500.0..500.0));
    let (c, s) = (th.cos(), th.sin());
    // R · [sx shear; 0 sy]
    let m = [[c * sx, c * shear - s * sy], [s * sx, s * shear + c * sy]];
    move |p: Point2| Point2::new(m[0][0] * p.x + m[0][1] * p.y + tx, m[1][0] * p.x + m[1][1] * p.y + ty)
}

/// Exhaustive SSR oracle: re-scores every combination with the Jacobi basis
/// and the projection-trace similarity; returns the argmax, where scores within
/// 1e-12 count as ties and keep the lower index.
pub fn oracle_select(lists: &[Vec<Point2>], bank_shapes: &[Vec<Point2>], tol: f64) -> Option<usize> {
    let bank: Vec<Vec<Vec<f64>>> = bank_shapes
        .iter()
        .filter_map(|s| oracle_basis(&centred(s), tol))
        .collect();
    let dim = bank.iter().map(Vec::len).max()?;
    let bank: Vec<_> = bank.into_iter().filter(|b| b.len() == dim).collect();

    let counts: Vec<usize> = lists.iter().map(Vec::len).collect();
    let total: usize = counts.iter().product();
    let mut best: Option<(usize, f64)> = None;
    for idx in 0..total {
        // decode lexicographic index, last landmark fastest
        let mut rem = idx;
        let mut choice = vec![0; counts.len()];
        for k in (0..counts.len()).rev() {
            choice[k] = rem % counts[k];
            rem /= counts[k];
        }
        let pts: Vec<Point2> = choice.iter().enumerate().map(|(k, &c)| lists[k][c]).collect();
        let score = match oracle_basis(&centred(&pts), tol) {
            Some(b) if b.len() == dim => {
                bank.iter().map(|t| projection_trace_similarity(&b, t)).sum::<f64>() / bank.len() as f64
            }
            _ => f64::NEG_INFINITY,
        };
        if best.is_none_or(|(_, s)| score > s + 1e-12) {
            best = Some((idx, score));
        }
    }
    best.filter(|(_, s)| s.is_finite()).map(|(i, _)| i)
}

/// Isotropic Gaussian channel with peak 1 at (cx, cy).
pub fn gaussian_grid(w: usize, h: usize, cx: f64, cy: f64, sigma: f64) -> Vec<f32> {
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let d2 = (x as f64 - cx).powi(2) + (y as f64 - cy).powi(2);
            out.push((-d2 / (2.0 * sigma * sigma)).exp() as f32);
        }
    }
    out
}
