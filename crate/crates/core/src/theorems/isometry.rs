//! Isometries: `T` is an isometry iff for every `x` and unit `z` there are
//! s.i.p.'s with `[Tx, Tz]_Y = ‖T‖²[x, z]_X`.
//!
//! Taking `x = z` forces `‖Tz‖ = ‖T‖` on the whole sphere, so the identity
//! as stated singles out positive multiples of isometries; the certificate
//! reports `‖T‖` and the direct isometry check next to each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use super::general::{construct_operator_sip_pair_with, LemmaOptions};
use super::{Certificate, TheoremTag};
use crate::error::{Error, Result};
use crate::opnorm::{default_starts, operator_norm, Operator};
use crate::sip::SipSelection;

pub const T24_TOL: f64 = 1e-6;
/// `max |‖Tx‖ − ‖x‖| / ‖x‖` below this counts as an isometry.
pub const ISOMETRY_DEVIATION_TOL: f64 = 1e-8;
const DIRECT_SAMPLES: usize = 1000;
const IN_MT_TOL: f64 = 1e-6;

pub fn verify_isometry_characterization(op: &Operator, pair_count: usize, seed: u64, tol: f64) -> Result<Certificate> {
    if op.is_zero() {
        return Err(Error::Precondition("operator must be nonzero".into()));
    }
    let (xs, ys) = (op.domain(), op.codomain());

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let direct = xs.unit_sphere_samples(DIRECT_SAMPLES, seed)?;
    let deviation = direct
        .iter()
        .map(|x| {
            let r = rng.random_range(0.1..10.0);
            let sx: Vec<f64> = x.iter().map(|v| v * r).collect();
            (ys.norm_unchecked(&op.apply(&sx)) - r).abs() / r
        })
        .fold(0.0, f64::max);
    let is_isometry = deviation <= ISOMETRY_DEVIATION_TOL;

    let norm = operator_norm(op, default_starts(xs.dim()), seed)?.norm_value;
    let n2 = norm * norm;
    let pair_count = pair_count.max(1);
    let pxs = xs.unit_sphere_samples(pair_count, seed.wrapping_add(1))?;
    let pzs = xs.unit_sphere_samples(pair_count, seed.wrapping_add(2))?;
    let opts = LemmaOptions { seed, ..LemmaOptions::default() };

    let mut residual: f64 = 0.0;
    let mut worst_pair = None;
    let mut outside_mt = 0usize;
    let mut witness_z: Option<(Vec<f64>, f64)> = None;
    let mut failures = Vec::new();
    for (k, (x, z)) in pxs.iter().zip(&pzs).enumerate() {
        let ntz = ys.norm_unchecked(&op.apply(z));
        let r = if ntz < norm - IN_MT_TOL * (1.0 + norm) {
            // x = z: [Tz, Tz] = ‖Tz‖² against ‖T‖²[z, z] = ‖T‖²
            outside_mt += 1;
            if witness_z.as_ref().is_none_or(|(_, d)| norm - ntz > *d) {
                witness_z = Some((z.clone(), norm - ntz));
            }
            let lhs = SipSelection::default_selection(ys).eval(&op.apply(z), &op.apply(z))?;
            let rhs = SipSelection::default_selection(xs).eval(z, z)?;
            (lhs - n2 * rhs).abs() / n2
        } else {
            match construct_operator_sip_pair_with(op, z, x, norm, &opts) {
                Ok(pair) => pair.certificate.residual,
                Err(e) => {
                    failures.push(json!({"pair": k, "error": e.to_string()}));
                    continue;
                }
            }
        };
        if r > residual || worst_pair.is_none() {
            residual = residual.max(r);
            worst_pair = Some(k);
        }
    }

    let inputs = json!({
        "operator": op.to_spec(),
        "pair_count": pair_count,
        "seed": seed,
    });
    // a failed construction counts as a violation of size 1
    let residual = if failures.is_empty() { residual } else { residual.max(1.0) };
    let cert = Certificate::new(TheoremTag::T24, inputs, residual, tol);
    let consistent = cert.pass == is_isometry;
    Ok(cert
        .with_witness("is_isometry", is_isometry)
        .with_witness("isometry_deviation", deviation)
        .with_witness("norm_value", norm)
        .with_witness("consistent", consistent)
        .with_witness("pairs", pair_count)
        .with_witness("outside_mt", outside_mt)
        .with_witness("worst_pair", worst_pair.map(|k| json!({"index": k, "x": pxs[k], "z": pzs[k]})))
        .with_witness("witness_z", witness_z.as_ref().map(|(z, _)| z))
        .with_witness("witness_deficit", witness_z.as_ref().map(|(_, d)| *d))
        .with_witness("construction_failures", failures))
}
