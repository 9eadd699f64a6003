//! Dense vector helpers, a 1-D golden-section minimizer and the
//! minimum-norm point of a polytope.

use nalgebra::{DMatrix, DVector};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn euclid(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: &[f64], s: f64) -> Vec<f64> {
    a.iter().map(|v| v * s).collect()
}

pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// `a + s * b`
pub fn axpy(a: &[f64], s: f64, b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x + s * y).collect()
}

/// `(1 - t) a + t b`
pub fn lerp(a: &[f64], b: &[f64], t: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (1.0 - t) * x + t * y).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn is_zero(a: &[f64]) -> bool {
    a.iter().all(|v| *v == 0.0)
}

/// Solves the square system `m x = rhs`. Returns `None` when `m` is singular.
pub fn solve(m: &[Vec<f64>], rhs: &[f64]) -> Option<Vec<f64>> {
    let n = rhs.len();
    let mat = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let b = DVector::from_column_slice(rhs);
    let lu = mat.lu();
    let x = lu.solve(&b)?;
    if x.iter().all(|v| v.is_finite()) {
        Some(x.iter().copied().collect())
    } else {
        None
    }
}

/// Numerical rank of a set of row vectors.
pub fn rank(rows: &[Vec<f64>], dim: usize) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let mat = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    mat.rank(1e-10 * mat.norm().max(1.0))
}

/// Orthonormal (Euclidean) basis of the complement of `z`.
pub fn complement_basis(z: &[f64]) -> Vec<Vec<f64>> {
    let n = z.len();
    let mut basis: Vec<Vec<f64>> = vec![scale(z, 1.0 / euclid(z))];
    for k in 0..n {
        let mut e = vec![0.0; n];
        e[k] = 1.0;
        for b in &basis {
            let c = dot(&e, b);
            e = axpy(&e, -c, b);
        }
        let len = euclid(&e);
        if len > 1e-8 {
            basis.push(scale(&e, 1.0 / len));
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
/// Returns `(argmin, min)`; performs exactly `iterations` shrink steps.
pub fn golden_section_min<F>(f: F, lo: f64, hi: f64, iterations: usize) -> (f64, f64)
where
    F: Fn(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iterations {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Minimum-Euclidean-norm point of the convex hull of `points` (Wolfe's
/// algorithm). Returns the point and its barycentric weights.
pub fn min_norm_point(points: &[Vec<f64>]) -> (Vec<f64>, Vec<f64>) {
    assert!(!points.is_empty());
    let m = points.len();
    if m == 1 {
        return (points[0].clone(), vec![1.0]);
    }
    let scale_sq = points.iter().map(|p| dot(p, p)).fold(0.0, f64::max).max(1e-300);
    let eps = 1e-14 * scale_sq;

    let start = (0..m)
        .min_by(|&i, &j| dot(&points[i], &points[i]).total_cmp(&dot(&points[j], &points[j])))
        .unwrap();
    let mut corral: Vec<usize> = vec![start];
    let mut weights: Vec<f64> = vec![1.0];
    let combine = |idx: &[usize], w: &[f64]| -> Vec<f64> {
        let mut x = vec![0.0; points[0].len()];
        for (&i, &wi) in idx.iter().zip(w) {
            x = axpy(&x, wi, &points[i]);
        }
        x
    };
    let mut x = combine(&corral, &weights);

    for _ in 0..(50 * m + 50) {
        let xx = dot(&x, &x);
        let j = (0..m)
            .min_by(|&i, &k| dot(&x, &points[i]).total_cmp(&dot(&x, &points[k])))
            .unwrap();
        if xx - dot(&x, &points[j]) <= eps || corral.contains(&j) {
            break;
        }
        corral.push(j);
        weights.push(0.0);

        loop {
            let alpha = match affine_min_weights(points, &corral) {
                Some(a) => a,
                None => {
                    // affinely dependent corral; drop the newest point
                    corral.pop();
                    weights.pop();
                    break;
                }
            };
            if alpha.iter().all(|a| *a > 1e-15) {
                weights = alpha;
                x = combine(&corral, &weights);
                break;
            }
            let mut theta = 1.0_f64;
            for (wi, ai) in weights.iter().zip(&alpha) {
                if *ai <= 1e-15 && wi - ai > 0.0 {
                    theta = theta.min(wi / (wi - ai));
                }
            }
            for (wi, ai) in weights.iter_mut().zip(&alpha) {
                *wi += theta * (ai - *wi);
            }
            let mut k = 0;
            while k < corral.len() {
                if weights[k] <= 1e-15 {
                    corral.remove(k);
                    weights.remove(k);
                } else {
                    k += 1;
                }
            }
            let total: f64 = weights.iter().sum();
            weights.iter_mut().for_each(|w| *w /= total);
            x = combine(&corral, &weights);
        }
    }

    let mut bary = vec![0.0; m];
    for (&i, &w) in corral.iter().zip(&weights) {
        bary[i] += w;
    }
    (x, bary)
}

/// Weights of the minimum-norm point of the affine hull of `points[idx]`.
fn affine_min_weights(points: &[Vec<f64>], idx: &[usize]) -> Option<Vec<f64>> {
    let k = idx.len();
    let mut m = vec![vec![0.0; k + 1]; k + 1];
    for a in 0..k {
        for b in 0..k {
            m[a][b] = dot(&points[idx[a]], &points[idx[b]]);
        }
        m[a][k] = 1.0;
        m[k][a] = 1.0;
    }
    let mut rhs = vec![0.0; k + 1];
    rhs[k] = 1.0;
    let sol = solve(&m, &rhs)?;
    let w = sol[..k].to_vec();
    let total: f64 = w.iter().sum();
    if (total - 1.0).abs() > 1e-8 {
        return None;
    }
    Some(w)
}
