//! Arbitrary real normed spaces. At `z ∈ M_T` there is a direction `y` with
//! `z ⊥_B y` and `Tz ⊥_B Ty`; writing `x = λ₀z + μ₀y` and picking supporting
//! functionals that vanish on `y` and `Ty` yields s.i.p.'s with
//! `[Tx, Tz]_Y = ‖T‖²[x, z]_X`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use serde_json::json;

use super::{vec_json, Certificate, Check, TheoremTag};
use crate::bjortho::{classify, min_along_line, Cell, BRUTE_FORCE_HALFWIDTH, BRUTE_FORCE_REFINEMENTS};
use crate::duality::{supporting_functionals, Functional};
use crate::error::{Error, Result};
use crate::linalg;
use crate::normspace::NormedSpace;
use crate::opnorm::{default_starts, operator_norm, Operator};
use crate::sip::SipSelection;

pub const T23_TOL: f64 = 1e-6;

/// Slack on `‖Tz‖ ≥ ‖T‖` accepted as `z ∈ M_T`, scaled by `1 + ‖T‖`.
const IN_MT_TOL: f64 = 1e-6;
/// Minimum `min ψ(u)` over `J(z)` for a starting direction `u`.
const PLUS_SEPARATION: f64 = 1e-4;
const DELTAS: [f64; 7] = [1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8];
const SEGMENT_CLEARANCE: f64 = 1e-6;
const BRACKET_WIDTH: f64 = 1e-12;
const FALLBACK_TOL: f64 = 1e-8;
const ZEROING_TOL: f64 = 1e-6;
const DECOMPOSITION_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct LemmaOptions {
    /// classification tolerance, relative to the norm of the classified direction
    pub classify_tol: f64,
    /// sampled directions before giving up
    pub max_attempts: usize,
    pub seed: u64,
}

impl Default for LemmaOptions {
    fn default() -> Self {
        LemmaOptions { classify_tol: 1e-9, max_attempts: 500, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PreservedDirection {
    /// unit direction with `z ⊥_B y` and `Tz ⊥_B Ty`
    pub y: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub delta: f64,
    /// bisection parameter with `y ∝ (1 − t)u + tv`
    pub t: f64,
    pub attempts: usize,
    pub bisection_steps: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct PlaneDecomposition {
    pub z: Vec<f64>,
    pub y: Vec<f64>,
    pub lambda0: f64,
    pub mu0: f64,
    pub x: Vec<f64>,
}

impl PlaneDecomposition {
    /// `‖x − (λ₀z + μ₀y)‖`
    pub fn reconstruction_error(&self, space: &NormedSpace) -> f64 {
        let fit = linalg::axpy(&linalg::scale(&self.z, self.lambda0), self.mu0, &self.y);
        space.norm_unchecked(&linalg::sub(&self.x, &fit))
    }
}

#[derive(Debug, Clone)]
pub struct OperatorSipPair {
    pub sip_x: SipSelection,
    pub sip_y: SipSelection,
    pub decomposition: PlaneDecomposition,
    pub certificate: Certificate,
}

fn require_in_mt(op: &Operator, z: &[f64], norm: f64) -> Result<Vec<f64>> {
    if op.is_zero() || norm <= 0.0 {
        return Err(Error::Precondition("operator must be nonzero".into()));
    }
    let nz = op.domain().norm(z)?;
    if (nz - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!("z must be a unit vector, ‖z‖ = {nz}")));
    }
    let z = op.domain().normalize(z).expect("unit vector is nonzero");
    let ntz = op.codomain().norm_unchecked(&op.apply(&z));
    if ntz < norm - IN_MT_TOL * (1.0 + norm) {
        return Err(Error::Precondition(format!("z is not in M_T: ‖Tz‖ = {ntz} < ‖T‖ = {norm}")));
    }
    Ok(z)
}

/// `min_λ ‖a + λb‖`, which is `‖a‖` when `b = 0`.
fn line_min(space: &NormedSpace, a: &[f64], b: &[f64]) -> Result<f64> {
    if space.norm_unchecked(b) == 0.0 {
        return Ok(space.norm_unchecked(a));
    }
    Ok(min_along_line(space, a, b, BRUTE_FORCE_HALFWIDTH, BRUTE_FORCE_REFINEMENTS)?.1)
}

/// Tolerance for classifying `w`, scaled by its norm.
fn scaled_tol(space: &NormedSpace, w: &[f64], tol: f64) -> f64 {
    tol * space.norm_unchecked(w).max(f64::MIN_POSITIVE)
}

#[derive(Default)]
struct SearchStats {
    collinear: usize,
    not_plus: usize,
    image_not_plus: usize,
    no_delta: usize,
    unresolved: usize,
}

pub fn find_preserved_orthogonal_direction(
    op: &Operator,
    z: &[f64],
    subspace: Option<&[f64]>,
    opts: &LemmaOptions,
) -> Result<(Vec<f64>, Certificate)> {
    let norm = operator_norm(op, default_starts(op.domain().dim()), opts.seed)?.norm_value;
    let (dir, cert) = find_preserved_orthogonal_direction_with(op, z, norm, subspace, opts)?;
    Ok((dir.y, cert))
}

/// As [`find_preserved_orthogonal_direction`] with a known `‖T‖`. When
/// `subspace` is `Some(x)` the search stays in `span{x, z}`.
pub fn find_preserved_orthogonal_direction_with(
    op: &Operator,
    z: &[f64],
    norm: f64,
    subspace: Option<&[f64]>,
    opts: &LemmaOptions,
) -> Result<(PreservedDirection, Certificate)> {
    let (xs, ys) = (op.domain(), op.codomain());
    let z = require_in_mt(op, z, norm)?;
    let tz = op.apply(&z);
    if let Some(x) = subspace {
        xs.check(x)?;
        let along = linalg::dot(x, &z) / linalg::dot(&z, &z);
        if linalg::euclid(&linalg::axpy(x, -along, &z)) <= 1e-9 * (1.0 + linalg::euclid(x)) {
            return Err(Error::Precondition("subspace vector is collinear with z".into()));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut stats = SearchStats::default();
    let ctol = opts.classify_tol;

    for attempt in 1..=opts.max_attempts {
        let raw: Vec<f64> = match subspace {
            Some(x) => {
                let (a, b): (f64, f64) = (rng.sample(StandardNormal), rng.sample(StandardNormal));
                linalg::axpy(&linalg::scale(&z, a), b, x)
            }
            None => (0..xs.dim()).map(|_| rng.sample(StandardNormal)).collect(),
        };
        let Some(u) = xs.normalize(&raw) else { continue };
        let along = linalg::dot(&u, &z) / linalg::dot(&z, &z);
        if linalg::euclid(&linalg::axpy(&u, -along, &z)) <= 1e-6 * linalg::euclid(&u) {
            stats.collinear += 1;
            continue;
        }
        let cu = classify(xs, &z, &u, ctol)?;
        if cu.cell() != Cell::PlusOnly || cu.margin_minus < PLUS_SEPARATION {
            stats.not_plus += 1;
            continue;
        }
        let tu = op.apply(&u);
        if classify(ys, &tz, &tu, scaled_tol(ys, &tu, ctol))?.cell() != Cell::PlusOnly {
            stats.image_not_plus += 1;
            continue;
        }

        let mut chosen = None;
        for delta in DELTAS {
            let v = linalg::axpy(&linalg::scale(&u, -1.0), delta, &z);
            if classify(xs, &z, &v, scaled_tol(xs, &v, ctol))?.cell() != Cell::MinusOnly {
                continue;
            }
            let tv = op.apply(&v);
            if classify(ys, &tz, &tv, scaled_tol(ys, &tv, ctol))?.cell() != Cell::MinusOnly {
                continue;
            }
            let (_, clearance) =
                linalg::golden_section_min(|t| xs.norm_unchecked(&linalg::lerp(&u, &v, t)), 0.0, 1.0, 80);
            if clearance >= SEGMENT_CLEARANCE {
                chosen = Some((delta, v));
                break;
            }
        }
        let Some((delta, v)) = chosen else {
            stats.no_delta += 1;
            continue;
        };

        // invariant: T w(a) plus-only, T w(b) minus-only
        let (mut a, mut b) = (0.0_f64, 1.0_f64);
        let mut steps = 0;
        let found = loop {
            steps += 1;
            let mid = 0.5 * (a + b);
            let w = linalg::lerp(&u, &v, mid);
            let tw = op.apply(&w);
            let c = classify(ys, &tz, &tw, scaled_tol(ys, &tw, ctol))?;
            match c.cell() {
                Cell::Orthogonal => break Some((mid, w)),
                Cell::PlusOnly => a = mid,
                Cell::MinusOnly => b = mid,
            }
            if b - a < BRACKET_WIDTH {
                let mid = 0.5 * (a + b);
                let w = linalg::lerp(&u, &v, mid);
                let tw = op.apply(&w);
                let c = classify(ys, &tz, &tw, scaled_tol(ys, &tw, FALLBACK_TOL))?;
                break c.is_orthogonal().then_some((mid, w));
            }
        };
        let Some((t, w)) = found else {
            stats.unresolved += 1;
            continue;
        };
        let y = xs.normalize(&w).ok_or_else(|| Error::Search("bisection reached the origin".into()))?;
        let dir = PreservedDirection { y, u, v, delta, t, attempts: attempt, bisection_steps: steps };
        let cert = lemma_certificate(op, &z, &tz, norm, &dir, subspace)?;
        return Ok((dir, cert));
    }
    Err(Error::Search(format!(
        "no bracket after {} sampled directions: {} collinear with z, {} not plus-only at z, \
         {} with image not plus-only at Tz, {} without a valid δ, {} unresolved bisections",
        opts.max_attempts, stats.collinear, stats.not_plus, stats.image_not_plus, stats.no_delta, stats.unresolved
    )))
}

fn lemma_certificate(
    op: &Operator,
    z: &[f64],
    tz: &[f64],
    norm: f64,
    dir: &PreservedDirection,
    subspace: Option<&[f64]>,
) -> Result<Certificate> {
    let (xs, ys) = (op.domain(), op.codomain());
    let y = &dir.y;
    let ty = op.apply(y);
    let cz = classify(xs, z, y, 0.0)?;
    let ctz = classify(ys, tz, &ty, 0.0)?;
    let nty = ys.norm_unchecked(&ty);
    let defect = |mp: f64, mm: f64| 0.0_f64.max(-mp).max(mm);
    let z_margin = defect(cz.margin_plus, cz.margin_minus);
    let tz_margin = if nty > 0.0 { defect(ctz.margin_plus, ctz.margin_minus) / nty } else { 0.0 };
    let z_brute = 0.0_f64.max(1.0 - line_min(xs, z, y)?);
    let tz_brute = 0.0_f64.max(1.0 - line_min(ys, tz, &ty)? / norm);

    let inputs = json!({
        "operator": op.to_spec(),
        "z": vec_json(z),
        "subspace": subspace.map(vec_json),
    });
    let checks = vec![
        Check::new("z_margin", z_margin, 1e-6),
        Check::new("tz_margin", tz_margin, 1e-6),
        Check::new("z_brute_force", z_brute, 1e-6),
        Check::new("tz_brute_force", tz_brute, 1e-5),
    ];
    Ok(Certificate::from_checks(TheoremTag::L22, inputs, checks)
        .with_witness("y", y)
        .with_witness("ty", &ty)
        .with_witness("norm_value", norm)
        .with_witness("margins_z", [cz.margin_plus, cz.margin_minus])
        .with_witness("margins_tz", [ctz.margin_plus, ctz.margin_minus])
        .with_witness("direction", dir))
}

/// A functional in `J(z)` vanishing on `y`, given `z ⊥_B y`.
///
/// With `a = max ψ(y)` and `b = min ψ(y)` over the vertices of `J(z)`, the
/// combination `θψ⁻ + (1 − θ)ψ⁺`, `θ = a/(a − b)`, vanishes on `y` whenever
/// `b < 0 < a`. A vertex is returned when `a` or `b` is already within `tol`
/// of zero on the correct side.
pub fn find_zeroing_support_functional(space: &NormedSpace, z: &[f64], y: &[f64], tol: f64) -> Result<Functional> {
    space.check(y)?;
    if linalg::is_zero(y) {
        return Err(Error::Precondition("y must be nonzero".into()));
    }
    let j = supporting_functionals(space, z)?;
    let (a, ia) = j.max_on(y);
    let (b, ib) = j.min_on(y);
    if a < -tol || b > tol {
        return Err(Error::Precondition(format!(
            "z is not Birkhoff-James orthogonal to y: ψ(y) ranges over [{b}, {a}]"
        )));
    }
    let plus = &j.vertices()[ia];
    let minus = &j.vertices()[ib];
    if a <= 0.0 || b == a {
        return Ok(plus.clone());
    }
    if b >= 0.0 {
        return Ok(minus.clone());
    }
    let theta = a / (a - b);
    let coeffs: Vec<f64> = plus
        .coefficients()
        .iter()
        .zip(minus.coefficients())
        .map(|(p, m)| theta * m + (1.0 - theta) * p)
        .collect();
    Functional::new(space, coeffs)
}

pub fn construct_operator_sip_pair(op: &Operator, z: &[f64], x: &[f64], opts: &LemmaOptions) -> Result<OperatorSipPair> {
    if op.is_zero() {
        return Err(Error::Precondition("operator must be nonzero".into()));
    }
    let norm = operator_norm(op, default_starts(op.domain().dim()), opts.seed)?.norm_value;
    construct_operator_sip_pair_with(op, z, x, norm, opts)
}

/// As [`construct_operator_sip_pair`] with a known `‖T‖`.
pub fn construct_operator_sip_pair_with(
    op: &Operator,
    z: &[f64],
    x: &[f64],
    norm: f64,
    opts: &LemmaOptions,
) -> Result<OperatorSipPair> {
    let (xs, ys) = (op.domain(), op.codomain());
    xs.check(x)?;
    let z = require_in_mt(op, z, norm)?;
    let tz = op.apply(&z);
    let tx = op.apply(x);
    let n2 = norm * norm;
    let nx = xs.norm_unchecked(x);
    let inputs = json!({
        "operator": op.to_spec(),
        "z": vec_json(&z),
        "x": vec_json(x),
    });

    let lambda = linalg::dot(x, &z) / linalg::dot(&z, &z);
    let rest = linalg::axpy(x, -lambda, &z);
    let collinear = xs.norm_unchecked(&rest) <= DECOMPOSITION_TOL * (1.0 + nx);

    let (sip_x, sip_y, decomposition, lemma) = if collinear {
        let (dir, lemma) = find_preserved_orthogonal_direction_with(op, &z, norm, None, opts)?;
        let decomposition = PlaneDecomposition { z: z.clone(), y: dir.y, lambda0: lambda, mu0: 0.0, x: x.to_vec() };
        (SipSelection::default_selection(xs), SipSelection::default_selection(ys), decomposition, lemma)
    } else {
        let (dir, lemma) = find_preserved_orthogonal_direction_with(op, &z, norm, Some(x), opts)?;
        let y = dir.y;
        let gram = vec![
            vec![linalg::dot(&z, &z), linalg::dot(&z, &y)],
            vec![linalg::dot(&z, &y), linalg::dot(&y, &y)],
        ];
        let coef = linalg::solve(&gram, &[linalg::dot(&z, x), linalg::dot(&y, x)])
            .ok_or_else(|| Error::Inconsistency("y is collinear with z".into()))?;
        let decomposition = PlaneDecomposition { z: z.clone(), y: y.clone(), lambda0: coef[0], mu0: coef[1], x: x.to_vec() };
        let recon = decomposition.reconstruction_error(xs);
        if recon > DECOMPOSITION_TOL * (1.0 + nx) {
            return Err(Error::Inconsistency(format!("x is not in span{{z, y}}: residual {recon}")));
        }
        let psi_z = find_zeroing_support_functional(xs, &z, &y, ZEROING_TOL)?;
        let ty = op.apply(&y);
        let tz_unit = ys.normalize(&tz).expect("Tz is nonzero for z in M_T");
        let psi_tz = find_zeroing_support_functional(ys, &tz_unit, &ty, scaled_tol(ys, &ty, ZEROING_TOL))?;
        let sip_x = SipSelection::default_selection(xs).with_override_tol(&z, &psi_z, 1e-8)?;
        let sip_y = SipSelection::default_selection(ys).with_override_tol(&tz_unit, &psi_tz, 1e-8)?;
        (sip_x, sip_y, decomposition, lemma)
    };

    let lhs = sip_y.eval(&tx, &tz)?;
    let rhs = sip_x.eval(x, &z)?;
    let residual = (lhs - n2 * rhs).abs() / n2;
    let lambda0 = decomposition.lambda0;
    let scale = 1.0 + nx;
    let certificate = Certificate::new(TheoremTag::T23, inputs, residual, T23_TOL)
        .with_check(Check::new("sip_x_equals_lambda0", (rhs - lambda0).abs() / scale, T23_TOL))
        .with_check(Check::new("sip_y_equals_lambda0_norm_sq", (lhs - lambda0 * n2).abs() / (n2 * scale), T23_TOL))
        .with_check(Check::new("decomposition", decomposition.reconstruction_error(xs) / scale, DECOMPOSITION_TOL))
        .with_check(Check::new("preserved_direction", lemma.residual, lemma.tolerance))
        .with_witness("collinear", collinear)
        .with_witness("norm_value", norm)
        .with_witness("sip_x_value", rhs)
        .with_witness("sip_y_value", lhs)
        .with_witness("decomposition", &decomposition)
        .with_witness("selection_x", sip_x.to_spec())
        .with_witness("selection_y", sip_y.to_spec());
    Ok(OperatorSipPair { sip_x, sip_y, decomposition, certificate })
}
