//! Smooth domain and codomain: `z ∈ M_T` iff `[Tx, Tz] = ‖T‖²[x, z]` for
//! all `x`, with the unique s.i.p. on each side.

use serde_json::json;

use super::{vec_json, Certificate, Check, TheoremTag};
use crate::bjortho::classify;
use crate::error::{Error, Result};
use crate::linalg;
use crate::opnorm::{default_starts, operator_norm, Operator};
use crate::sip::SipSelection;

pub const T22_TOL: f64 = 1e-5;
/// Tolerance on `|ψ_{Tz}(Th)| / ‖Th‖` for the orthogonality-preservation check.
const PRESERVATION_TOL: f64 = 1e-6;

pub fn verify_smooth_characterization(
    op: &Operator,
    z: &[f64],
    sample_count: usize,
    seed: u64,
) -> Result<Certificate> {
    if op.is_zero() {
        return Err(Error::Precondition("operator must be nonzero".into()));
    }
    let norm = operator_norm(op, default_starts(op.domain().dim()), seed)?.norm_value;
    verify_smooth_characterization_with(op, z, norm, sample_count, seed, T22_TOL)
}

/// As [`verify_smooth_characterization`] with a known `‖T‖` and tolerance.
pub fn verify_smooth_characterization_with(
    op: &Operator,
    z: &[f64],
    norm: f64,
    sample_count: usize,
    seed: u64,
    tol: f64,
) -> Result<Certificate> {
    let (x_space, y_space) = (op.domain(), op.codomain());
    if !x_space.is_smooth() || !y_space.is_smooth() {
        return Err(Error::Precondition("domain and codomain must both be smooth".into()));
    }
    if op.is_zero() || norm <= 0.0 {
        return Err(Error::Precondition("operator must be nonzero".into()));
    }
    let nz = x_space.norm(z)?;
    if (nz - 1.0).abs() > 1e-6 {
        return Err(Error::Precondition(format!("z must be a unit vector, ‖z‖ = {nz}")));
    }
    let tz = op.apply(z);
    let ntz = y_space.norm_unchecked(&tz);
    if ntz == 0.0 {
        return Err(Error::Inconsistency("Tz = 0 for a nonzero operator".into()));
    }
    let sel_x = SipSelection::default_selection(x_space);
    let sel_y = SipSelection::default_selection(y_space);
    let n2 = norm * norm;

    let mut xs = vec![z.to_vec()];
    if sample_count > 0 {
        xs.extend(x_space.unit_sphere_samples(sample_count, seed)?);
    }
    let mut residual: f64 = 0.0;
    let mut worst = z.to_vec();
    for x in &xs {
        let lhs = sel_y.eval(&op.apply(x), &tz)?;
        let rhs = n2 * sel_x.eval(x, z)?;
        let r = (lhs - rhs).abs() / n2;
        if r > residual {
            residual = r;
            worst = x.clone();
        }
    }

    // h = r − ψ_z(r) z lies in z^⊥; Th should lie in (Tz)^⊥
    let psi_z = sel_x.functional_for(z)?;
    let mut preservation: f64 = 0.0;
    for r in xs.iter().skip(1) {
        let h = linalg::axpy(r, -psi_z.eval(r), z);
        let th = op.apply(&h);
        let nth = y_space.norm_unchecked(&th);
        if x_space.norm_unchecked(&h) < 1e-9 || nth < 1e-9 {
            continue;
        }
        let c = classify(y_space, &tz, &th, PRESERVATION_TOL * nth)?;
        preservation = preservation.max(c.margin_plus.abs().max(c.margin_minus.abs()) / nth);
    }

    let inputs = json!({
        "operator": op.to_spec(),
        "z": vec_json(z),
        "sample_count": sample_count,
        "seed": seed,
    });
    Ok(Certificate::new(TheoremTag::T22, inputs, residual, tol)
        .with_check(Check::new("orthogonality_preservation", preservation, PRESERVATION_TOL))
        .with_witness("norm_value", norm)
        .with_witness("tz_norm", ntz)
        .with_witness("attainment_deficit", (n2 - ntz * ntz) / n2)
        .with_witness("worst_x", worst)
        .with_witness("samples", xs.len()))
}
