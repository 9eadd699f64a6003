//! Operator norms `‖T‖ = max_{x ∈ S_X} ‖Tx‖` and norm attainment sets
//! `M_T = {x ∈ S_X : ‖Tx‖ = ‖T‖}` for matrices between normed spaces.
//!
//! The maximization is multi-start: seeded sphere samples, then a local
//! polish (coordinate-wise golden section in an orthonormal chart of the
//! tangent directions, plus a line search along each sweep's net move).
//! A start is polished when it ranks among the best [`POLISH_TOP`] samples
//! seen so far, so the polished set only grows with the number of starts.
//! Between smooth spaces the polish ends with gradient steps whose line
//! searches bisect on the directional derivative, which pins the maximizer
//! to first order rather than to the square root of machine precision.
//! When the domain ball is a polytope its vertices are added as candidates;
//! a convex function attains its maximum over a polytope at a vertex.

use serde::{Deserialize, Serialize};

use crate::duality::{supporting_functionals, Functional, VERTEX_TOL};
use crate::error::{Error, Result};
use crate::linalg;
use crate::normspace::{Exponent, NormSpec, NormedSpace};

pub const POLISH_TOP: usize = 8;
/// Maximizers closer than this (max-abs, up to sign) are one cluster.
pub const CLUSTER_TOL: f64 = 1e-6;
/// A candidate counts as a maximizer when `‖Tx‖ ≥ ‖T‖ − MAXIMIZER_TOL·(1 + ‖T‖)`.
pub const MAXIMIZER_TOL: f64 = 1e-9;
/// Number of clusters from which `M_T` is flagged as a continuum.
pub const CONTINUUM_CLUSTERS: usize = 10;

pub fn default_starts(dim: usize) -> usize {
    if dim <= 3 {
        256
    } else {
        1024
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub matrix: Vec<Vec<f64>>,
    pub domain: NormSpec,
    pub codomain: NormSpec,
}

/// A linear map `T : X → Y` given by an `m × n` matrix.
#[derive(Debug, Clone)]
pub struct Operator {
    matrix: Vec<Vec<f64>>,
    domain: NormedSpace,
    codomain: NormedSpace,
}

impl Operator {
    pub fn new(matrix: Vec<Vec<f64>>, domain: NormedSpace, codomain: NormedSpace) -> Result<Self> {
        if matrix.len() != codomain.dim() {
            return Err(Error::Dimension { expected: codomain.dim(), got: matrix.len() });
        }
        for row in &matrix {
            if row.len() != domain.dim() {
                return Err(Error::Dimension { expected: domain.dim(), got: row.len() });
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Usage("operator matrix has non-finite entries".into()));
            }
        }
        Ok(Operator { matrix, domain, codomain })
    }

    pub fn from_spec(spec: &OperatorSpec) -> Result<Self> {
        let rows = spec.matrix.len();
        let cols = spec.matrix.first().map(Vec::len).unwrap_or(0);
        let domain = NormedSpace::from_spec(spec.domain.clone(), cols)?;
        let codomain = NormedSpace::from_spec(spec.codomain.clone(), rows)?;
        Operator::new(spec.matrix.clone(), domain, codomain)
    }

    pub fn to_spec(&self) -> OperatorSpec {
        OperatorSpec {
            matrix: self.matrix.clone(),
            domain: self.domain.spec().clone(),
            codomain: self.codomain.spec().clone(),
        }
    }

    pub fn matrix(&self) -> &[Vec<f64>] {
        &self.matrix
    }

    pub fn domain(&self) -> &NormedSpace {
        &self.domain
    }

    pub fn codomain(&self) -> &NormedSpace {
        &self.codomain
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matrix.iter().map(|row| linalg::dot(row, x)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|r| linalg::is_zero(r))
    }

    pub fn scaled(&self, c: f64) -> Operator {
        Operator {
            matrix: self.matrix.iter().map(|r| linalg::scale(r, c)).collect(),
            domain: self.domain.clone(),
            codomain: self.codomain.clone(),
        }
    }

    /// `‖T x / ‖x‖‖`
    fn ratio(&self, x: &[f64]) -> f64 {
        self.codomain.norm_unchecked(&self.apply(x)) / self.domain.norm_unchecked(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    MultiStart,
    MultiStartWithVertices,
    ClosedForm,
    VertexEnumeration,
    Degenerate,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormAttainment {
    pub norm_value: f64,
    /// unit maximizers, best first, one per antipodal cluster
    pub maximizers: Vec<Vec<f64>>,
    /// `|‖Tx‖ − norm_value|` per maximizer
    pub residuals: Vec<f64>,
    pub method: Method,
    pub degenerate: bool,
    /// many separate maximizers, i.e. `M_T` is (likely) a face rather than points
    pub continuum: bool,
}

impl NormAttainment {
    /// `z ∈ M_T` within `tol`, relative to this attainment's norm value.
    pub fn contains(&self, op: &Operator, z: &[f64], tol: f64) -> Result<bool> {
        let nz = op.domain.norm(z)?;
        if (nz - 1.0).abs() > 1e-6 {
            return Err(Error::Precondition(format!("z must be a unit vector, ‖z‖ = {nz}")));
        }
        Ok(op.codomain.norm_unchecked(&op.apply(z)) >= self.norm_value - tol)
    }
}

pub fn operator_norm(op: &Operator, starts: usize, seed: u64) -> Result<NormAttainment> {
    if starts == 0 {
        return Err(Error::Usage("starts must be at least 1".into()));
    }
    let samples = op.domain.unit_sphere_samples(starts, seed)?;
    if op.is_zero() {
        return Ok(NormAttainment {
            norm_value: 0.0,
            residuals: vec![0.0; samples.len()],
            maximizers: samples,
            method: Method::Degenerate,
            degenerate: true,
            continuum: true,
        });
    }

    let mut top: Vec<f64> = Vec::with_capacity(POLISH_TOP + 1);
    let mut candidates: Vec<Vec<f64>> = Vec::new();
    for s in &samples {
        let v = op.ratio(s);
        if top.len() < POLISH_TOP || v > top[POLISH_TOP - 1] {
            let pos = top.partition_point(|t| *t >= v);
            top.insert(pos, v);
            top.truncate(POLISH_TOP);
            candidates.push(polish(op, s));
        }
    }
    // unpolished samples already at the optimum are maximizers too
    candidates.extend(samples);
    let method = match op.domain.ball_vertices() {
        Some(vertices) => {
            candidates.extend(vertices);
            Method::MultiStartWithVertices
        }
        None => Method::MultiStart,
    };
    Ok(cluster(op, candidates, method))
}

/// Groups candidates into antipodal clusters and keeps the near-optimal ones.
fn cluster(op: &Operator, candidates: Vec<Vec<f64>>, method: Method) -> NormAttainment {
    let mut scored: Vec<(Vec<f64>, f64)> = candidates
        .into_iter()
        .filter_map(|c| op.domain.normalize(&c))
        .map(|c| {
            let c = canonical_sign(c);
            let v = op.codomain.norm_unchecked(&op.apply(&c));
            (c, v)
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.total_cmp(&a.1).then_with(|| {
            a.0.iter().zip(&b.0).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(std::cmp::Ordering::Equal)
        })
    });
    let norm_value = scored[0].1;
    let floor = norm_value - MAXIMIZER_TOL * (1.0 + norm_value);
    let mut maximizers: Vec<Vec<f64>> = Vec::new();
    let mut residuals = Vec::new();
    for (c, v) in scored {
        if v < floor {
            break;
        }
        if maximizers.iter().any(|m| linalg::max_abs_diff(m, &c) <= CLUSTER_TOL) {
            continue;
        }
        residuals.push((norm_value - v).abs());
        maximizers.push(c);
    }
    let continuum = maximizers.len() >= CONTINUUM_CLUSTERS;
    NormAttainment { norm_value, maximizers, residuals, method, degenerate: false, continuum }
}

/// Representative of `{x, −x}` whose first non-negligible entry is positive.
fn canonical_sign(x: Vec<f64>) -> Vec<f64> {
    let scale = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
    match x.iter().find(|v| v.abs() > 1e-12 * scale) {
        Some(v) if *v < 0.0 => linalg::scale(&x, -1.0),
        _ => x,
    }
}

fn golden_iterations(radius: f64) -> usize {
    ((2.0 * radius / 1e-13).ln() / 1.618_033_988_749_895_f64.ln()).ceil().max(10.0) as usize
}

/// Local maximization of `‖Tx‖/‖x‖` starting from `start`.
fn polish(op: &Operator, start: &[f64]) -> Vec<f64> {
    let mut z = start.to_vec();
    let mut val = op.ratio(&z);
    let mut radius = 0.25;
    let line_max = |z: &[f64], dir: &[f64], radius: f64| {
        let g = |t: f64| -op.ratio(&linalg::axpy(z, t, dir));
        let (t, gv) = linalg::golden_section_min(g, -radius, radius, golden_iterations(radius));
        (t, -gv)
    };
    for _ in 0..200 {
        let sweep_start = z.clone();
        let start_val = val;
        let mut max_move: f64 = 0.0;
        for b in linalg::complement_basis(&z) {
            let (t, v) = line_max(&z, &b, radius);
            if v > val {
                z = op.domain.normalize(&linalg::axpy(&z, t, &b)).unwrap();
                val = op.ratio(&z);
                max_move = max_move.max(t.abs());
            }
        }
        // line search along the net displacement of the sweep
        let d = linalg::sub(&z, &sweep_start);
        let dn = linalg::euclid(&d);
        if dn > 0.0 {
            let dir = linalg::scale(&d, 1.0 / dn);
            let (t, v) = line_max(&z, &dir, (4.0 * dn).min(0.5));
            if v > val {
                z = op.domain.normalize(&linalg::axpy(&z, t, &dir)).unwrap();
                val = op.ratio(&z);
                max_move = max_move.max(t.abs());
            }
        }
        if val - start_val <= 1e-15 * val.abs() || max_move < 1e-12 {
            break;
        }
        radius = (8.0 * max_move).clamp(1e-9, 0.25);
    }
    if op.domain.is_smooth() && op.codomain.is_smooth() {
        refine_smooth(op, z)
    } else {
        z
    }
}

/// Gradient of `x ↦ ‖Tx‖/‖x‖` at `x`; `None` when `Tx = 0`.
fn ratio_gradient(op: &Operator, x: &[f64]) -> Option<Vec<f64>> {
    let tx = op.apply(x);
    let ntx = op.codomain.norm_unchecked(&tx);
    if ntx == 0.0 {
        return None;
    }
    let nx = op.domain.norm_unchecked(x);
    let phi = supporting_functionals(&op.codomain, &tx).ok()?.vertices()[0].clone();
    let psi = supporting_functionals(&op.domain, x).ok()?.vertices()[0].clone();
    let mut g = linalg::scale(psi.coefficients(), -ntx / (nx * nx));
    for (row, c) in op.matrix.iter().zip(phi.coefficients()) {
        g = linalg::axpy(&g, c / nx, row);
    }
    Some(g)
}

/// Steepest ascent with exact line search on the directional derivative.
fn refine_smooth(op: &Operator, start: Vec<f64>) -> Vec<f64> {
    let mut z = start;
    let mut val = op.ratio(&z);
    for _ in 0..100 {
        let Some(g) = ratio_gradient(op, &z) else { break };
        let gn = linalg::euclid(&g);
        if gn <= 1e-15 * (1.0 + val) {
            break;
        }
        let d = linalg::scale(&g, 1.0 / gn);
        let slope = |t: f64| ratio_gradient(op, &linalg::axpy(&z, t, &d)).map(|g| linalg::dot(&g, &d));
        let (mut lo, mut hi) = (0.0, 1e-6);
        while hi < 1.0 && slope(hi).is_some_and(|s| s > 0.0) {
            lo = hi;
            hi *= 4.0;
        }
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            match slope(mid) {
                Some(s) if s > 0.0 => lo = mid,
                _ => hi = mid,
            }
        }
        let Some(next) = op.domain.normalize(&linalg::axpy(&z, lo, &d)) else { break };
        let v = op.ratio(&next);
        if v < val - 1e-15 * val || lo == 0.0 {
            break;
        }
        z = next;
        val = v;
    }
    z
}

/// `z ∈ M_T` within `tol`, with `‖T‖` from a default multi-start run.
pub fn is_in_mt(op: &Operator, z: &[f64], tol: f64) -> Result<bool> {
    let att = operator_norm(op, default_starts(op.domain.dim()), 0)?;
    att.contains(op, z, tol)
}

/// Closed-form operator norms: ℓ_1 → any codomain (largest column norm),
/// any domain → ℓ_∞ (largest dual norm of a row), and ℓ_2 → ℓ_2 (largest
/// singular value by power iteration). `None` when no closed form applies.
pub fn oracle_norm(op: &Operator) -> Option<f64> {
    let plain = |s: &NormedSpace| match s.spec() {
        NormSpec::Lp { p } => Some(*p),
        _ => None,
    };
    let (dp, cp) = (plain(&op.domain), plain(&op.codomain));
    let (m, n) = (op.matrix.len(), op.domain.dim());
    if dp == Some(Exponent::ONE) {
        return Some(
            (0..n)
                .map(|j| {
                    let col: Vec<f64> = (0..m).map(|i| op.matrix[i][j]).collect();
                    op.codomain.norm_unchecked(&col)
                })
                .fold(0.0, f64::max),
        );
    }
    if cp == Some(Exponent::INFINITY) {
        return Some(
            op.matrix
                .iter()
                .map(|row| op.domain.dual_norm_unchecked(row))
                .fold(0.0, f64::max),
        );
    }
    if dp == Some(Exponent::TWO) && cp == Some(Exponent::TWO) {
        return Some(spectral_norm(&op.matrix, n));
    }
    None
}

/// Largest singular value by power iteration on `AᵀA`, to relative change 1e-12.
pub fn spectral_norm(a: &[Vec<f64>], n: usize) -> f64 {
    let atax = |v: &[f64]| -> Vec<f64> {
        let av: Vec<f64> = a.iter().map(|row| linalg::dot(row, v)).collect();
        (0..n).map(|j| a.iter().zip(&av).map(|(row, s)| row[j] * s).sum()).collect()
    };
    // start from the heaviest row, which is never orthogonal to the top right singular vector
    let Some(start) = a.iter().max_by(|x, y| linalg::euclid(x).total_cmp(&linalg::euclid(y))) else {
        return 0.0;
    };
    if linalg::is_zero(start) {
        return 0.0;
    }
    let mut v = linalg::scale(start, 1.0 / linalg::euclid(start));
    let mut sigma = 0.0;
    for _ in 0..100_000 {
        let w = atax(&v);
        let wn = linalg::euclid(&w);
        if wn == 0.0 {
            return 0.0;
        }
        v = linalg::scale(&w, 1.0 / wn);
        let next = linalg::euclid(&a.iter().map(|row| linalg::dot(row, &v)).collect::<Vec<_>>());
        if (next - sigma).abs() <= 1e-12 * next {
            return next;
        }
        sigma = next;
    }
    sigma
}

/// `M_f`: unit vectors with `f(z) = ‖f‖`, in closed form for (weighted) ℓ_p
/// domains and by vertex enumeration for polyhedral ones.
pub fn functional_attainers(space: &NormedSpace, f: &Functional) -> Result<NormAttainment> {
    space.check(f.coefficients())?;
    let norm_value = f.dual_norm();
    if f.is_zero() {
        return Ok(NormAttainment {
            norm_value: 0.0,
            maximizers: Vec::new(),
            residuals: Vec::new(),
            method: Method::Degenerate,
            degenerate: true,
            continuum: true,
        });
    }
    let n = space.dim();
    let sign = |v: f64| if v >= 0.0 { 1.0 } else { -1.0 };
    let (maximizers, method) = match space.spec() {
        NormSpec::Lp { p } | NormSpec::WeightedLp { p, .. } => {
            let w: Vec<f64> = match space.spec() {
                NormSpec::WeightedLp { weights, .. } => weights.clone(),
                _ => vec![1.0; n],
            };
            // attainers of g = D⁻¹f in plain ℓ_p, mapped back by z = D⁻¹ z'
            let g: Vec<f64> = f.coefficients().iter().zip(&w).map(|(a, b)| a / b).collect();
            let gmax = g.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let primes: Vec<Vec<f64>> = if *p == Exponent::ONE {
                (0..n)
                    .filter(|&j| g[j].abs() >= gmax * (1.0 - VERTEX_TOL))
                    .map(|j| {
                        let mut e = vec![0.0; n];
                        e[j] = sign(g[j]);
                        e
                    })
                    .collect()
            } else if p.is_infinite() {
                let free: Vec<usize> = (0..n).filter(|&i| g[i].abs() <= VERTEX_TOL * gmax).collect();
                (0..1usize << free.len())
                    .map(|mask| {
                        let mut z: Vec<f64> = g.iter().map(|v| sign(*v)).collect();
                        for (k, &i) in free.iter().enumerate() {
                            z[i] = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
                        }
                        z
                    })
                    .collect()
            } else {
                let q = p.conjugate().value();
                let r: Vec<f64> = g.iter().map(|v| v.abs() / gmax).collect();
                let qn = r.iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q);
                vec![g.iter().zip(&r).map(|(v, rv)| sign(*v) * (rv / qn).powf(q - 1.0)).collect()]
            };
            let zs: Vec<Vec<f64>> = primes
                .into_iter()
                .map(|zp| zp.iter().zip(&w).map(|(a, b)| a / b).collect::<Vec<f64>>())
                .filter_map(|z| space.normalize(&z))
                .collect();
            (zs, Method::ClosedForm)
        }
        NormSpec::Polyhedral { .. } => {
            let verts = space.ball_vertices().expect("polyhedral balls are polytopes");
            let zs = verts
                .into_iter()
                .filter(|v| f.eval(v) >= norm_value * (1.0 - VERTEX_TOL))
                .collect();
            (zs, Method::VertexEnumeration)
        }
    };
    let residuals = maximizers.iter().map(|z| (f.eval(z) - norm_value).abs()).collect();
    let continuum = maximizers.len() > 1;
    Ok(NormAttainment { norm_value, maximizers, residuals, method, degenerate: false, continuum })
}
