//! Birkhoff-James orthogonality.
//!
//! `y ∈ x⁺` when `‖x + λy‖ ≥ ‖x‖` for all `λ ≥ 0`, `y ∈ x⁻` for all `λ ≤ 0`,
//! and `x ⊥_B y` when both hold. By convexity of `λ ↦ ‖x + λy‖` these are
//! read off the one-sided derivatives at zero: `y ∈ x⁺` iff the right
//! derivative is `≥ 0`, `y ∈ x⁻` iff the left derivative is `≤ 0`.

use serde::Serialize;

use crate::duality::supporting_functionals;
use crate::error::{Error, Result};
use crate::linalg;
use crate::normspace::NormedSpace;

pub const DEFAULT_TOL: f64 = 1e-9;

pub const BRUTE_FORCE_HALFWIDTH: f64 = 1e3;
pub const BRUTE_FORCE_GRID: usize = 200;
pub const BRUTE_FORCE_REFINEMENTS: usize = 80;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BjClassification {
    pub in_plus: bool,
    pub in_minus: bool,
    /// right derivative of `λ ↦ ‖x + λy‖` at 0
    pub margin_plus: f64,
    /// left derivative of `λ ↦ ‖x + λy‖` at 0
    pub margin_minus: f64,
}

/// The three disjoint cells `x⁺ \ x^⊥`, `x⁻ \ x^⊥` and `x^⊥`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Cell {
    PlusOnly,
    MinusOnly,
    Orthogonal,
}

impl BjClassification {
    pub fn is_orthogonal(&self) -> bool {
        self.in_plus && self.in_minus
    }

    pub fn cell(&self) -> Cell {
        match (self.in_plus, self.in_minus) {
            (true, true) => Cell::Orthogonal,
            (true, false) => Cell::PlusOnly,
            (false, true) => Cell::MinusOnly,
            (false, false) => unreachable!("margin_plus >= margin_minus rules out a fourth cell"),
        }
    }
}

pub fn classify(space: &NormedSpace, x: &[f64], y: &[f64], tol: f64) -> Result<BjClassification> {
    space.check(y)?;
    let j = supporting_functionals(space, x)?;
    let margin_plus = j.max_on(y).0;
    let margin_minus = j.min_on(y).0;
    Ok(BjClassification {
        in_plus: margin_plus >= -tol,
        in_minus: margin_minus <= tol,
        margin_plus,
        margin_minus,
    })
}

pub fn is_bj_orthogonal(space: &NormedSpace, x: &[f64], y: &[f64], tol: f64) -> Result<bool> {
    Ok(classify(space, x, y, tol)?.is_orthogonal())
}

/// Minimum of `λ ↦ ‖x + λy‖` by a coarse grid over `[-h, h]` and golden-section
/// refinement of the bracketing grid cell. `y` is rescaled to `‖y‖ = ‖x‖` first,
/// which keeps any minimizer inside `[-2, 2]`.
pub fn min_along_line(
    space: &NormedSpace,
    x: &[f64],
    y: &[f64],
    grid_halfwidth: f64,
    refinement_steps: usize,
) -> Result<(f64, f64)> {
    let nx = space.norm(x)?;
    let ny = space.norm(y)?;
    if nx == 0.0 || ny == 0.0 {
        return Err(Error::Domain("line minimization needs nonzero x and y".into()));
    }
    let s = nx / ny;
    let dir = linalg::scale(y, s);
    let f = |t: f64| space.norm_unchecked(&linalg::axpy(x, t, &dir));

    let points = BRUTE_FORCE_GRID;
    let step = 2.0 * grid_halfwidth / (points - 1) as f64;
    let grid = |k: usize| -grid_halfwidth + k as f64 * step;
    let best = (0..points)
        .map(|k| (k, f(grid(k))))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap()
        .0;
    let lo = grid(best.saturating_sub(1));
    let hi = grid((best + 1).min(points - 1));
    let (t, mut val) = linalg::golden_section_min(f, lo, hi, refinement_steps);
    let mut arg = t;
    let at_zero = f(0.0);
    if at_zero < val {
        val = at_zero;
        arg = 0.0;
    }
    Ok((arg * s, val))
}

/// Independent oracle for `x ⊥_B y` straight from the definition:
/// `min_λ ‖x + λy‖ ≥ ‖x‖ (1 − 1e-8)`.
pub fn brute_force_bj(
    space: &NormedSpace,
    x: &[f64],
    y: &[f64],
    grid_halfwidth: f64,
    refinement_steps: usize,
) -> Result<bool> {
    let nx = space.norm(x)?;
    let (_, min) = min_along_line(space, x, y, grid_halfwidth, refinement_steps)?;
    Ok(min >= nx - 1e-8 * nx)
}
