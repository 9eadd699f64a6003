//! Finite-dimensional real normed spaces: ℓ_p, weighted ℓ_p and polyhedral norms.
//!
//! A weighted ℓ_p norm is `‖x‖ = ‖(w_1 x_1, …, w_n x_n)‖_p`. A polyhedral norm is
//! `‖x‖ = max_i |g_i·x|` for generators `g_i` spanning the dual; its dual norm is
//! the gauge of `conv{±g_i}`, evaluated with a small linear program.

mod simplex;

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg;

pub use simplex::{minimize as lp_minimize, LpOutcome};

/// Exponent `p ∈ [1, ∞]` of an ℓ_p norm. Serializes as a number, or `"inf"`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent(f64);

impl Exponent {
    pub const ONE: Exponent = Exponent(1.0);
    pub const TWO: Exponent = Exponent(2.0);
    pub const INFINITY: Exponent = Exponent(f64::INFINITY);

    pub fn new(p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidSpec(format!("exponent must satisfy p >= 1, got {p}")));
        }
        Ok(Exponent(p))
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn is_infinite(self) -> bool {
        self.0.is_infinite()
    }

    /// Conjugate exponent `q` with `1/p + 1/q = 1`.
    pub fn conjugate(self) -> Exponent {
        if self.0 == 1.0 {
            Exponent::INFINITY
        } else if self.is_infinite() {
            Exponent::ONE
        } else {
            Exponent(self.0 / (self.0 - 1.0))
        }
    }

    /// `1 < p < ∞`: the ℓ_p norm is smooth everywhere off the origin.
    pub fn is_smooth(self) -> bool {
        self.0 > 1.0 && self.0.is_finite()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_infinite() {
            write!(f, "inf")
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Exponent::new(p).map_err(de::Error::custom),
            Raw::Str(s) if s == "inf" => Ok(Exponent::INFINITY),
            Raw::Str(s) => Err(de::Error::custom(format!("expected a number or \"inf\", got {s:?}"))),
        }
    }
}

/// Which norm a space carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormSpec {
    Lp { p: Exponent },
    WeightedLp { p: Exponent, weights: Vec<f64> },
    Polyhedral { generators: Vec<Vec<f64>> },
}

impl NormSpec {
    /// Dimension implied by the spec itself, if any.
    pub fn implied_dim(&self) -> Option<usize> {
        match self {
            NormSpec::Lp { .. } => None,
            NormSpec::WeightedLp { weights, .. } => Some(weights.len()),
            NormSpec::Polyhedral { generators } => generators.first().map(Vec::len),
        }
    }
}

/// A real normed space `(ℝⁿ, ‖·‖)` with `n ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormedSpace {
    dim: usize,
    spec: NormSpec,
}

impl NormedSpace {
    pub fn new(dim: usize, spec: NormSpec) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidSpec(format!("dimension must be at least 2, got {dim}")));
        }
        match &spec {
            NormSpec::Lp { p } => {
                Exponent::new(p.value())?;
            }
            NormSpec::WeightedLp { p, weights } => {
                Exponent::new(p.value())?;
                if weights.len() != dim {
                    return Err(Error::Dimension { expected: dim, got: weights.len() });
                }
                if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
                    return Err(Error::InvalidSpec(format!("weights must be positive, got {w}")));
                }
            }
            NormSpec::Polyhedral { generators } => {
                for g in generators {
                    if g.len() != dim {
                        return Err(Error::Dimension { expected: dim, got: g.len() });
                    }
                    if g.iter().any(|v| !v.is_finite()) {
                        return Err(Error::InvalidSpec("non-finite generator entry".into()));
                    }
                }
                if linalg::rank(generators, dim) < dim {
                    return Err(Error::InvalidSpec(
                        "polyhedral generators must span the dual space".into(),
                    ));
                }
            }
        }
        Ok(NormedSpace { dim, spec })
    }

    /// Builds a space, taking the dimension from the spec when it implies one.
    pub fn from_spec(spec: NormSpec, dim: usize) -> Result<Self> {
        let d = spec.implied_dim().unwrap_or(dim);
        if d != dim {
            return Err(Error::Dimension { expected: dim, got: d });
        }
        NormedSpace::new(dim, spec)
    }

    pub fn lp(dim: usize, p: f64) -> Result<Self> {
        NormedSpace::new(dim, NormSpec::Lp { p: Exponent::new(p)? })
    }

    pub fn weighted_lp(p: f64, weights: Vec<f64>) -> Result<Self> {
        NormedSpace::new(weights.len(), NormSpec::WeightedLp { p: Exponent::new(p)?, weights })
    }

    pub fn polyhedral(generators: Vec<Vec<f64>>) -> Result<Self> {
        let dim = generators.first().map(Vec::len).unwrap_or(0);
        NormedSpace::new(dim, NormSpec::Polyhedral { generators })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn spec(&self) -> &NormSpec {
        &self.spec
    }

    /// Exponent of an (optionally weighted) ℓ_p space.
    pub fn exponent(&self) -> Option<Exponent> {
        match &self.spec {
            NormSpec::Lp { p } | NormSpec::WeightedLp { p, .. } => Some(*p),
            NormSpec::Polyhedral { .. } => None,
        }
    }

    /// Whether the norm is smooth at every nonzero point.
    pub fn is_smooth(&self) -> bool {
        self.exponent().is_some_and(Exponent::is_smooth)
    }

    pub fn check(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension { expected: self.dim, got: x.len() });
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::Usage("vector has non-finite entries".into()));
        }
        Ok(())
    }

    pub fn norm(&self, x: &[f64]) -> Result<f64> {
        self.check(x)?;
        Ok(self.norm_unchecked(x))
    }

    pub(crate) fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match &self.spec {
            NormSpec::Lp { p } => lp_norm(x.iter().copied(), *p),
            NormSpec::WeightedLp { p, weights } => {
                lp_norm(x.iter().zip(weights).map(|(v, w)| v * w), *p)
            }
            NormSpec::Polyhedral { generators } => generators
                .iter()
                .map(|g| linalg::dot(g, x).abs())
                .fold(0.0, f64::max),
        }
    }

    /// `sup{f(x) : ‖x‖ ≤ 1}`.
    pub fn dual_norm(&self, f: &[f64]) -> Result<f64> {
        self.check(f)?;
        Ok(self.dual_norm_unchecked(f))
    }

    pub(crate) fn dual_norm_unchecked(&self, f: &[f64]) -> f64 {
        match &self.spec {
            NormSpec::Lp { p } => lp_norm(f.iter().copied(), p.conjugate()),
            NormSpec::WeightedLp { p, weights } => {
                lp_norm(f.iter().zip(weights).map(|(v, w)| v / w), p.conjugate())
            }
            NormSpec::Polyhedral { generators } => polyhedral_dual_norm(generators, f),
        }
    }

    /// `x ∈ B_X`
    pub fn in_ball(&self, x: &[f64]) -> Result<bool> {
        Ok(self.norm(x)? <= 1.0)
    }

    /// `x ∈ S_X` within `tol`.
    pub fn on_sphere(&self, x: &[f64], tol: f64) -> Result<bool> {
        Ok((self.norm(x)? - 1.0).abs() <= tol)
    }

    /// `x / ‖x‖`, or `None` at the origin.
    pub fn normalize(&self, x: &[f64]) -> Option<Vec<f64>> {
        let n = self.norm_unchecked(x);
        (n > 0.0).then(|| linalg::scale(x, 1.0 / n))
    }

    /// True iff `J(x)` is a single functional.
    pub fn is_smooth_at(&self, x: &[f64]) -> Result<bool> {
        Ok(crate::duality::supporting_functionals(self, x)?.is_singleton())
    }

    /// Seeded Gaussian directions normalized by this space's norm.
    pub fn unit_sphere_samples(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        if count == 0 {
            return Err(Error::Usage("sample count must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        while out.len() < count {
            let g: Vec<f64> = (0..self.dim).map(|_| rng.sample(StandardNormal)).collect();
            if let Some(u) = self.normalize(&g) {
                out.push(u);
            }
        }
        Ok(out)
    }

    /// Vertices of the unit ball when it is a polytope (ℓ_1, ℓ_∞ and
    /// polyhedral, weighted or not); `None` otherwise.
    pub fn ball_vertices(&self) -> Option<Vec<Vec<f64>>> {
        let n = self.dim;
        let unit = |i: usize, s: f64| {
            let mut e = vec![0.0; n];
            e[i] = s;
            e
        };
        let (p, weights) = match &self.spec {
            NormSpec::Lp { p } => (*p, None),
            NormSpec::WeightedLp { p, weights } => (*p, Some(weights)),
            NormSpec::Polyhedral { generators } => return Some(polytope_vertices(generators, n)),
        };
        let w = |i: usize| weights.map_or(1.0, |w| w[i]);
        if p == Exponent::ONE {
            let mut v = Vec::with_capacity(2 * n);
            for i in 0..n {
                v.push(unit(i, 1.0 / w(i)));
                v.push(unit(i, -1.0 / w(i)));
            }
            Some(v)
        } else if p.is_infinite() {
            Some(
                (0..1usize << n)
                    .map(|mask| {
                        (0..n)
                            .map(|i| if mask >> i & 1 == 1 { -1.0 } else { 1.0 } / w(i))
                            .collect()
                    })
                    .collect(),
            )
        } else {
            None
        }
    }
}

fn lp_norm<I: Iterator<Item = f64> + Clone>(it: I, p: Exponent) -> f64 {
    let m = it.clone().map(f64::abs).fold(0.0, f64::max);
    if p.is_infinite() || m == 0.0 {
        return m;
    }
    let p = p.value();
    if p == 1.0 {
        return it.map(f64::abs).sum();
    }
    if p == 2.0 {
        return m * it.map(|v| (v / m) * (v / m)).sum::<f64>().sqrt();
    }
    m * it.map(|v| (v.abs() / m).powf(p)).sum::<f64>().powf(1.0 / p)
}

/// Gauge of `conv{±g_i}` at `f`: `min Σ|c_i|` subject to `Σ c_i g_i = f`.
fn polyhedral_dual_norm(generators: &[Vec<f64>], f: &[f64]) -> f64 {
    if linalg::is_zero(f) {
        return 0.0;
    }
    let m = generators.len();
    let n = f.len();
    let cost = vec![1.0; 2 * m];
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut row = Vec::with_capacity(2 * m);
            row.extend(generators.iter().map(|g| g[k]));
            row.extend(generators.iter().map(|g| -g[k]));
            row
        })
        .collect();
    match simplex::minimize(&cost, &rows, f) {
        LpOutcome::Optimal { value, .. } => value,
        // spanning generators make the program feasible and bounded
        other => unreachable!("polyhedral dual-norm program returned {other:?}"),
    }
}

/// Vertices of `{x : |g_i·x| ≤ 1}` by enumerating n-subsets of active constraints.
fn polytope_vertices(generators: &[Vec<f64>], n: usize) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    let mut subset: Vec<usize> = Vec::with_capacity(n);
    fn recurse(
        start: usize,
        subset: &mut Vec<usize>,
        generators: &[Vec<f64>],
        n: usize,
        out: &mut Vec<Vec<f64>>,
    ) {
        if subset.len() == n {
            let rows: Vec<Vec<f64>> = subset.iter().map(|&i| generators[i].clone()).collect();
            for mask in 0..1usize << n {
                let rhs: Vec<f64> =
                    (0..n).map(|k| if mask >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
                let Some(x) = linalg::solve(&rows, &rhs) else {
                    return;
                };
                let feasible = generators.iter().all(|g| linalg::dot(g, &x).abs() <= 1.0 + 1e-9);
                if feasible && !out.iter().any(|v| linalg::max_abs_diff(v, &x) < 1e-9) {
                    out.push(x);
                }
            }
            return;
        }
        for i in start..generators.len() {
            subset.push(i);
            recurse(i + 1, subset, generators, n, out);
            subset.pop();
        }
    }
    recurse(0, &mut subset, generators, n, &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linf2() -> NormedSpace {
        NormedSpace::polyhedral(vec![vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(NormedSpace::lp(2, 2.0).unwrap().norm(&[3.0, 4.0]).unwrap(), 5.0);
        assert_eq!(NormedSpace::lp(2, 1.0).unwrap().norm(&[1.0, -2.0]).unwrap(), 3.0);
        assert_eq!(linf2().norm(&[0.5, -0.9]).unwrap(), 0.9);
    }

    #[test]
    fn norm_rejects_dimension_mismatch() {
        let s = NormedSpace::lp(3, 2.0).unwrap();
        assert_eq!(s.norm(&[1.0, 2.0]), Err(Error::Dimension { expected: 3, got: 2 }));
        assert!(s.dual_norm(&[1.0]).is_err());
    }

    #[test]
    fn norm_is_zero_only_at_origin() {
        for s in [NormedSpace::lp(2, 3.0).unwrap(), linf2()] {
            assert_eq!(s.norm(&[0.0, 0.0]).unwrap(), 0.0);
            assert!(s.norm(&[1e-300, 0.0]).unwrap() > 0.0);
        }
    }

    #[test]
    fn dual_norm_examples() {
        let l1 = NormedSpace::lp(2, 1.0).unwrap();
        assert_eq!(l1.dual_norm(&[2.0, -1.0]).unwrap(), 2.0);
        assert!((linf2().dual_norm(&[1.0, 1.0]).unwrap() - 2.0).abs() < 1e-12);
        let l3 = NormedSpace::lp(2, 3.0).unwrap();
        // frozen from a golden-section maximization of f(x) over the ℓ_3 sphere
        let oracle = {
            let g = |t: f64| {
                let (c, s) = (t.cos(), t.sin());
                let n = (c.abs().powi(3) + s.abs().powi(3)).cbrt();
                -(c + s) / n
            };
            -linalg::golden_section_min(g, 0.0, std::f64::consts::FRAC_PI_2, 100).1
        };
        assert!((oracle - 2f64.powf(2.0 / 3.0)).abs() < 1e-12);
        assert!((l3.dual_norm(&[1.0, 1.0]).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn weighted_lp_matches_scaled_coordinates() {
        let s = NormedSpace::weighted_lp(1.5, vec![2.0, 0.5]).unwrap();
        let plain = NormedSpace::lp(2, 1.5).unwrap();
        let x = [0.7, -1.3];
        let scaled = [1.4, -0.65];
        assert!((s.norm(&x).unwrap() - plain.norm(&scaled).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn spec_validation() {
        assert!(NormedSpace::lp(1, 2.0).is_err());
        assert!(NormedSpace::lp(2, 0.5).is_err());
        assert!(NormedSpace::weighted_lp(2.0, vec![1.0, 0.0]).is_err());
        assert!(NormedSpace::polyhedral(vec![vec![1.0, 1.0], vec![2.0, 2.0]]).is_err());
        assert!(NormedSpace::new(3, NormSpec::WeightedLp { p: Exponent::TWO, weights: vec![1.0; 2] })
            .is_err());
    }

    #[test]
    fn spec_json_forms() {
        let cases = [
            (r#"{"kind":"lp","p":2.0}"#, NormSpec::Lp { p: Exponent::TWO }),
            (r#"{"kind":"lp","p":"inf"}"#, NormSpec::Lp { p: Exponent::INFINITY }),
            (
                r#"{"kind":"weighted_lp","p":1.5,"weights":[1.0,2.0]}"#,
                NormSpec::WeightedLp { p: Exponent::new(1.5).unwrap(), weights: vec![1.0, 2.0] },
            ),
            (
                r#"{"kind":"polyhedral","generators":[[1.0,0.0],[0.0,1.0]]}"#,
                NormSpec::Polyhedral { generators: vec![vec![1.0, 0.0], vec![0.0, 1.0]] },
            ),
        ];
        for (json, want) in cases {
            let got: NormSpec = serde_json::from_str(json).unwrap();
            assert_eq!(got, want);
            let back: NormSpec = serde_json::from_str(&serde_json::to_string(&got).unwrap()).unwrap();
            assert_eq!(back, want);
        }
        assert!(serde_json::from_str::<NormSpec>(r#"{"kind":"lp","p":0.5}"#).is_err());
        assert!(serde_json::from_str::<NormSpec>(r#"{"kind":"lp","p":"huge"}"#).is_err());
        assert!(serde_json::from_str::<NormSpec>(r#"{"kind":"lp","p":2,"extra":1}"#).is_err());
        assert!(serde_json::from_str::<NormSpec>(r#"{"kind":"cone"}"#).is_err());
    }

    #[test]
    fn sphere_samples_contract() {
        let s = NormedSpace::lp(2, 2.0).unwrap();
        let a = s.unit_sphere_samples(4, 7).unwrap();
        assert_eq!(a.len(), 4);
        for x in &a {
            assert!((s.norm(x).unwrap() - 1.0).abs() <= 1e-12);
        }
        assert_eq!(a, s.unit_sphere_samples(4, 7).unwrap());
        assert_ne!(a, s.unit_sphere_samples(4, 8).unwrap());
        assert!(matches!(s.unit_sphere_samples(0, 7), Err(Error::Usage(_))));
    }

    #[test]
    fn ball_vertices_of_standard_polytopes() {
        let l1 = NormedSpace::lp(3, 1.0).unwrap();
        assert_eq!(l1.ball_vertices().unwrap().len(), 6);
        let linf = NormedSpace::lp(3, f64::INFINITY).unwrap();
        let v = linf.ball_vertices().unwrap();
        assert_eq!(v.len(), 8);
        assert!(v.iter().all(|x| (linf.norm(x).unwrap() - 1.0).abs() < 1e-15));
        assert_eq!(linf2().ball_vertices().unwrap().len(), 4);
        assert!(NormedSpace::lp(3, 2.0).unwrap().ball_vertices().is_none());
    }

    #[test]
    fn polyhedral_dual_norm_matches_vertex_enumeration() {
        // hexagonal norm; dual norm = max over ball vertices of f·v
        let s = NormedSpace::polyhedral(vec![
            vec![1.0, 0.0],
            vec![0.5, 0.8],
            vec![-0.5, 0.8],
        ])
        .unwrap();
        let verts = s.ball_vertices().unwrap();
        assert_eq!(verts.len(), 6);
        for f in [[1.0, 0.0], [0.3, -2.0], [-1.1, 0.4], [0.0, 1.0]] {
            let brute = verts.iter().map(|v| linalg::dot(&f, v)).fold(f64::MIN, f64::max);
            assert!((s.dual_norm(&f).unwrap() - brute).abs() < 1e-12, "f = {f:?}");
        }
    }
}
