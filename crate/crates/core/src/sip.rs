//! Compatible semi-inner-products built from a selection of supporting
//! functionals: one `g_w ∈ J(w)` per unit vector `w`, extended by
//! `g_{λw} = λ g_w` (so `g_0 = 0`), and `[x, y] = g_y(x)`.
//!
//! The default selection takes the minimum-Euclidean-norm point of `J(w)`.
//! That rule is odd (`J(−w) = −J(w)`), which keeps the homogeneous extension
//! well defined on both halves of each line. Overrides pin `g_z` at finitely
//! many unit vectors `z` (and so `g_{−z} = −g_z`).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::duality::{supporting_functionals, Functional};
use crate::error::{Error, Result};
use crate::linalg;
use crate::normspace::NormedSpace;

/// Two normalized vectors closer than this (max-abs) are the same override point.
pub const OVERRIDE_MATCH_TOL: f64 = 1e-12;
/// Tolerance for `ψ ∈ J(z)` when installing an override.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum DefaultRule {
    #[default]
    MinEuclid,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OverrideSpec {
    pub at: Vec<f64>,
    pub functional: Vec<f64>,
}

/// Structured-text form of a selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct SelectionSpec {
    #[serde(default)]
    pub default: DefaultRule,
    #[serde(default)]
    pub overrides: Vec<OverrideSpec>,
}

#[derive(Debug, Clone)]
struct Override {
    at: Vec<f64>,
    functional: Functional,
}

#[derive(Debug, Clone)]
pub struct SipSelection {
    space: NormedSpace,
    rule: DefaultRule,
    overrides: Vec<Override>,
}

impl SipSelection {
    pub fn default_selection(space: &NormedSpace) -> Self {
        SipSelection { space: space.clone(), rule: DefaultRule::MinEuclid, overrides: Vec::new() }
    }

    pub fn space(&self) -> &NormedSpace {
        &self.space
    }

    /// Same selection except `g_z = ψ`. `z` must be a unit vector and `ψ ∈ J(z)`.
    pub fn with_override(&self, z: &[f64], psi: &Functional) -> Result<Self> {
        self.with_override_tol(z, psi, MEMBERSHIP_TOL)
    }

    /// As [`with_override`](Self::with_override) with an explicit membership tolerance.
    pub fn with_override_tol(&self, z: &[f64], psi: &Functional, tol: f64) -> Result<Self> {
        let nz = self.space.norm(z)?;
        self.space.check(psi.coefficients())?;
        if (nz - 1.0).abs() > MEMBERSHIP_TOL {
            return Err(Error::Precondition(format!("override point must be a unit vector, ‖z‖ = {nz}")));
        }
        if !psi.supports(&self.space, z, tol)? {
            return Err(Error::Precondition(format!(
                "override is not a supporting functional at z: ‖ψ‖ = {}, ψ(z) = {}",
                psi.dual_norm(),
                psi.eval(z)
            )));
        }
        let at = self.space.normalize(z).expect("unit vector is nonzero");
        let mut next = self.clone();
        next.overrides.retain(|o| {
            linalg::max_abs_diff(&o.at, &at) > OVERRIDE_MATCH_TOL
                && linalg::max_abs_diff(&linalg::scale(&o.at, -1.0), &at) > OVERRIDE_MATCH_TOL
        });
        next.overrides.push(Override { at, functional: psi.clone() });
        Ok(next)
    }

    pub fn from_spec(space: &NormedSpace, spec: &SelectionSpec) -> Result<Self> {
        let mut sel = SipSelection::default_selection(space);
        sel.rule = spec.default;
        for o in &spec.overrides {
            let psi = Functional::new(space, o.functional.clone())?;
            sel = sel.with_override(&o.at, &psi)?;
        }
        Ok(sel)
    }

    pub fn to_spec(&self) -> SelectionSpec {
        SelectionSpec {
            default: self.rule,
            overrides: self
                .overrides
                .iter()
                .map(|o| OverrideSpec { at: o.at.clone(), functional: o.functional.coefficients().to_vec() })
                .collect(),
        }
    }

    /// `g_w` for a unit vector `w`.
    fn unit_choice(&self, w: &[f64]) -> Result<Vec<f64>> {
        for o in &self.overrides {
            if linalg::max_abs_diff(&o.at, w) <= OVERRIDE_MATCH_TOL {
                return Ok(o.functional.coefficients().to_vec());
            }
            if o.at.iter().zip(w).all(|(a, b)| (a + b).abs() <= OVERRIDE_MATCH_TOL) {
                return Ok(linalg::scale(o.functional.coefficients(), -1.0));
            }
        }
        match self.rule {
            DefaultRule::MinEuclid => Ok(supporting_functionals(&self.space, w)?.min_euclidean_element()),
        }
    }

    /// The functional `g_y` with `[x, y] = g_y(x)`.
    pub fn functional_for(&self, y: &[f64]) -> Result<Functional> {
        let ny = self.space.norm(y)?;
        if ny == 0.0 {
            return Ok(Functional::with_norm(vec![0.0; y.len()], 0.0));
        }
        let w = linalg::scale(y, 1.0 / ny);
        let g = self.unit_choice(&w)?;
        Ok(Functional::with_norm(linalg::scale(&g, ny), ny))
    }

    /// `[x, y]`
    pub fn eval(&self, x: &[f64], y: &[f64]) -> Result<f64> {
        self.space.check(x)?;
        Ok(self.functional_for(y)?.eval(x))
    }

    pub fn verify_axioms(&self, sample_count: usize, seed: u64) -> Result<AxiomReport> {
        verify_axioms(self, sample_count, seed)
    }
}

pub fn default_selection(space: &NormedSpace) -> SipSelection {
    SipSelection::default_selection(space)
}

pub fn with_override(selection: &SipSelection, z: &[f64], psi: &Functional) -> Result<SipSelection> {
    selection.with_override(z, psi)
}

pub fn sip_eval(selection: &SipSelection, x: &[f64], y: &[f64]) -> Result<f64> {
    selection.eval(x, y)
}

/// Largest observed violation of each semi-inner-product axiom, in relative form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct AxiomReport {
    pub samples: usize,
    /// (a) `|[αx+βy, z] − α[x,z] − β[y,z]| / ((|α|‖x‖ + |β|‖y‖) ‖z‖)`
    pub linearity: f64,
    /// (b) `max(0, −[x,x]) / ‖x‖²`, or 1 when `[x,x] = 0` for `x ≠ 0`
    pub positivity: f64,
    /// (c) `max(0, [x,y]² − [x,x][y,y]) / ([x,x][y,y])`
    pub cauchy_schwarz: f64,
    /// (d) `|[x, αy] − α[x,y]| / (|α| ‖x‖ ‖y‖)`, and exactly `|[x, 0]|` for `α = 0`
    pub homogeneity: f64,
    /// `|[x,x] − ‖x‖²| / (1 + ‖x‖²)`
    pub compatibility: f64,
}

impl AxiomReport {
    pub fn max_violation(&self) -> f64 {
        [self.linearity, self.positivity, self.cauchy_schwarz, self.homogeneity, self.compatibility]
            .into_iter()
            .fold(0.0, f64::max)
    }
}

/// Checks axioms (a)–(d) and compatibility on seeded random triples and scalars.
pub fn verify_axioms(sel: &SipSelection, sample_count: usize, seed: u64) -> Result<AxiomReport> {
    if sample_count == 0 {
        return Err(Error::Usage("sample count must be at least 1".into()));
    }
    let space = sel.space();
    let units = space.unit_sphere_samples(3 * sample_count, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_a11c);
    let mut report = AxiomReport { samples: sample_count, ..Default::default() };

    for k in 0..sample_count {
        let mut radius = || {
            let r: f64 = rng.random_range(0.1..3.0);
            if rng.random_bool(0.5) { -r } else { r }
        };
        let x = linalg::scale(&units[3 * k], radius());
        let y = linalg::scale(&units[3 * k + 1], radius());
        let z = linalg::scale(&units[3 * k + 2], radius());
        let alpha: f64 = rng.random_range(-2.0..2.0);
        let beta: f64 = rng.random_range(-2.0..2.0);
        let (nx, ny, nz) = (space.norm(&x)?, space.norm(&y)?, space.norm(&z)?);

        let gz = sel.functional_for(&z)?;
        let combo = linalg::add(&linalg::scale(&x, alpha), &linalg::scale(&y, beta));
        let lin = (gz.eval(&combo) - alpha * gz.eval(&x) - beta * gz.eval(&y)).abs()
            / ((alpha.abs() * nx + beta.abs() * ny) * nz);
        report.linearity = report.linearity.max(lin);

        let xx = sel.eval(&x, &x)?;
        let yy = sel.eval(&y, &y)?;
        let pos = if xx == 0.0 { 1.0 } else { (-xx).max(0.0) / (nx * nx) };
        report.positivity = report.positivity.max(pos);

        let xy = sel.eval(&x, &y)?;
        let cs = (xy * xy - xx * yy).max(0.0) / (xx * yy);
        report.cauchy_schwarz = report.cauchy_schwarz.max(cs);

        let xay = sel.eval(&x, &linalg::scale(&y, alpha))?;
        let hom = (xay - alpha * xy).abs() / (alpha.abs() * nx * ny);
        let zero = sel.eval(&x, &linalg::scale(&y, 0.0))?.abs();
        report.homogeneity = report.homogeneity.max(hom).max(zero);

        let compat = (xx - nx * nx).abs() / (1.0 + nx * nx);
        report.compatibility = report.compatibility.max(compat);
    }
    Ok(report)
}
