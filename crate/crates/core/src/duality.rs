//! Supporting functionals (the subdifferential `J(x)` of the norm) and
//! one-sided directional derivatives of the norm.

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;
use crate::normspace::{NormSpec, NormedSpace};

/// Tolerance below which two candidate vertices of `J(x)` collapse, and
/// within which a coordinate or generator counts as active.
pub const VERTEX_TOL: f64 = 1e-9;

/// A linear functional on `ℝⁿ` with its dual norm cached for one space.
#[derive(Debug, Clone, PartialEq)]
pub struct Functional {
    coefficients: Vec<f64>,
    dual_norm: f64,
}

impl Serialize for Functional {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coefficients.serialize(s)
    }
}

impl Functional {
    pub fn new(space: &NormedSpace, coefficients: Vec<f64>) -> Result<Self> {
        let dual_norm = space.dual_norm(&coefficients)?;
        Ok(Functional { coefficients, dual_norm })
    }

    pub(crate) fn with_norm(coefficients: Vec<f64>, dual_norm: f64) -> Self {
        Functional { coefficients, dual_norm }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn into_coefficients(self) -> Vec<f64> {
        self.coefficients
    }

    pub fn dual_norm(&self) -> f64 {
        self.dual_norm
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        linalg::dot(&self.coefficients, x)
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero(&self.coefficients)
    }

    pub fn scaled(&self, s: f64) -> Functional {
        Functional {
            coefficients: linalg::scale(&self.coefficients, s),
            dual_norm: self.dual_norm * s.abs(),
        }
    }

    /// `x ∈ N(f)`: `|f(x)| ≤ tol · ‖f‖ · ‖x‖`.
    pub fn in_kernel(&self, space: &NormedSpace, x: &[f64], tol: f64) -> Result<bool> {
        Ok(self.eval(x).abs() <= tol * self.dual_norm * space.norm(x)?)
    }

    /// `‖f‖ = 1` and `f(x) = ‖x‖`, both within `tol` (the second relative to `max(1, ‖x‖)`).
    pub fn supports(&self, space: &NormedSpace, x: &[f64], tol: f64) -> Result<bool> {
        let nx = space.norm(x)?;
        Ok((self.dual_norm - 1.0).abs() <= tol && (self.eval(x) - nx).abs() <= tol * nx.max(1.0))
    }
}

/// Vertex description of `J(x) = {ψ : ‖ψ‖_* = 1, ψ(x) = ‖x‖}`.
#[derive(Debug, Clone, Serialize)]
pub struct SupportSet {
    base: Vec<f64>,
    vertices: Vec<Functional>,
}

impl SupportSet {
    pub fn base(&self) -> &[f64] {
        &self.base
    }

    pub fn vertices(&self) -> &[Functional] {
        &self.vertices
    }

    pub fn is_singleton(&self) -> bool {
        self.vertices.len() == 1
    }

    /// `(max ψ(y), index of a maximizing vertex)`
    pub fn max_on(&self, y: &[f64]) -> (f64, usize) {
        self.extreme_on(y, |a, b| a > b)
    }

    /// `(min ψ(y), index of a minimizing vertex)`
    pub fn min_on(&self, y: &[f64]) -> (f64, usize) {
        self.extreme_on(y, |a, b| a < b)
    }

    fn extreme_on(&self, y: &[f64], better: impl Fn(f64, f64) -> bool) -> (f64, usize) {
        let mut best = (self.vertices[0].eval(y), 0);
        for (i, v) in self.vertices.iter().enumerate().skip(1) {
            let val = v.eval(y);
            if better(val, best.0) {
                best = (val, i);
            }
        }
        best
    }

    /// Minimum-Euclidean-norm element of the polytope.
    pub fn min_euclidean_element(&self) -> Vec<f64> {
        if self.is_singleton() {
            return self.vertices[0].coefficients.clone();
        }
        let pts: Vec<Vec<f64>> = self.vertices.iter().map(|v| v.coefficients.clone()).collect();
        linalg::min_norm_point(&pts).0
    }
}

/// Computes `J(x)` in vertex form.
pub fn supporting_functionals(space: &NormedSpace, x: &[f64]) -> Result<SupportSet> {
    space.check(x)?;
    if linalg::is_zero(x) {
        return Err(Error::Domain("supporting functionals are undefined at the origin".into()));
    }
    let raw: Vec<Vec<f64>> = match space.spec() {
        NormSpec::Lp { p } => lp_vertices(x, p.value()),
        NormSpec::WeightedLp { p, weights } => {
            let u: Vec<f64> = x.iter().zip(weights).map(|(v, w)| v * w).collect();
            lp_vertices(&u, p.value())
                .into_iter()
                .map(|phi| phi.iter().zip(weights).map(|(v, w)| v * w).collect())
                .collect()
        }
        NormSpec::Polyhedral { generators } => {
            let nx = space.norm_unchecked(x);
            let mut v = Vec::new();
            for g in generators {
                let val = linalg::dot(g, x);
                if val.abs() >= nx * (1.0 - VERTEX_TOL) {
                    let sign = if val >= 0.0 { 1.0 } else { -1.0 };
                    v.push(linalg::scale(g, sign));
                }
            }
            v
        }
    };
    let mut vertices: Vec<Functional> = Vec::with_capacity(raw.len());
    for coeffs in raw {
        if vertices
            .iter()
            .any(|f| linalg::max_abs_diff(f.coefficients(), &coeffs) <= VERTEX_TOL)
        {
            continue;
        }
        let dn = space.dual_norm_unchecked(&coeffs);
        vertices.push(Functional::with_norm(coeffs, dn));
    }
    Ok(SupportSet { base: x.to_vec(), vertices })
}

fn lp_vertices(u: &[f64], p: f64) -> Vec<Vec<f64>> {
    let n = u.len();
    let sign = |v: f64| if v >= 0.0 { 1.0 } else { -1.0 };
    if p == 1.0 {
        let total: f64 = u.iter().map(|v| v.abs()).sum();
        let zeros: Vec<usize> =
            (0..n).filter(|&i| u[i].abs() <= 0.5 * VERTEX_TOL * total).collect();
        let base: Vec<f64> = u
            .iter()
            .enumerate()
            .map(|(i, v)| if zeros.contains(&i) { 0.0 } else { sign(*v) })
            .collect();
        (0..1usize << zeros.len())
            .map(|mask| {
                let mut psi = base.clone();
                for (k, &i) in zeros.iter().enumerate() {
                    psi[i] = if mask >> k & 1 == 1 { -1.0 } else { 1.0 };
                }
                psi
            })
            .collect()
    } else if p.is_infinite() {
        let m = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
        (0..n)
            .filter(|&j| m - u[j].abs() <= VERTEX_TOL * m)
            .map(|j| {
                let mut psi = vec![0.0; n];
                psi[j] = sign(u[j]);
                psi
            })
            .collect()
    } else {
        let m = u.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let r: Vec<f64> = u.iter().map(|v| v.abs() / m).collect();
        let norm = r.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p);
        let psi = u
            .iter()
            .zip(&r)
            .map(|(v, rv)| if *v == 0.0 { 0.0 } else { sign(*v) * (rv / norm).powf(p - 1.0) })
            .collect();
        vec![psi]
    }
}

/// `‖x‖ ψ_unit`, the homogeneous extension `ψ_{λw} = λ ψ_w` of a supporting
/// functional at `x / ‖x‖`.
pub fn scale_supporting(space: &NormedSpace, x: &[f64], psi_unit: &Functional) -> Result<Functional> {
    let nx = space.norm(x)?;
    if nx == 0.0 {
        return Err(Error::Domain("cannot scale a supporting functional at the origin".into()));
    }
    let w = linalg::scale(x, 1.0 / nx);
    if !psi_unit.supports(space, &w, VERTEX_TOL)? {
        return Err(Error::Precondition(
            "functional is not a supporting functional at x/‖x‖".into(),
        ));
    }
    Ok(psi_unit.scaled(nx))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Plus,
    Minus,
}

/// One-sided derivative of `λ ↦ ‖x + λy‖` at `λ = 0`.
pub fn directional_derivative(space: &NormedSpace, x: &[f64], y: &[f64], side: Side) -> Result<f64> {
    space.check(y)?;
    let j = supporting_functionals(space, x)?;
    Ok(match side {
        Side::Plus => j.max_on(y).0,
        Side::Minus => j.min_on(y).0,
    })
}
