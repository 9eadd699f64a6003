//! Attainment set of a functional: `z ∈ M_f` iff some compatible s.i.p.
//! has `f(x) = [x, ‖f‖z]` for every `x`.

use serde_json::json;

use super::{vec_json, Certificate, Check, TheoremTag};
use crate::duality::Functional;
use crate::error::{Error, Result};
use crate::linalg;
use crate::normspace::NormedSpace;
use crate::sip::SipSelection;

pub const T21_TOL: f64 = 1e-9;

/// Relative slack on `f(z) ≥ ‖f‖` accepted as `z ∈ M_f`.
const ATTAINMENT_TOL: f64 = 1e-8;

fn inputs(space: &NormedSpace, f: &Functional, z: &[f64]) -> serde_json::Value {
    json!({
        "space": space.spec(),
        "dim": space.dim(),
        "functional": vec_json(f.coefficients()),
        "z": vec_json(z),
    })
}

fn check_unit(space: &NormedSpace, z: &[f64]) -> Result<()> {
    let nz = space.norm(z)?;
    if (nz - 1.0).abs() > 1e-9 {
        return Err(Error::Precondition(format!("z must be a unit vector, ‖z‖ = {nz}")));
    }
    Ok(())
}

/// Overrides the default selection at `z` with `f/‖f‖` and measures
/// `max_x |f(x) − [x, ‖f‖z]|` over `sample_count` seeded unit vectors and `x = z`.
pub fn construct_functional_sip(
    space: &NormedSpace,
    f: &Functional,
    z: &[f64],
    sample_count: usize,
    seed: u64,
) -> Result<(SipSelection, Certificate)> {
    space.check(f.coefficients())?;
    check_unit(space, z)?;
    let base = SipSelection::default_selection(space);
    let inputs = inputs(space, f, z);
    if f.is_zero() {
        let cert = Certificate::new(TheoremTag::T21, inputs, 0.0, T21_TOL)
            .with_witness("note", "zero functional: every z attains and [x, 0] = 0")
            .with_witness("selection", base.to_spec());
        return Ok((base, cert));
    }
    let nf = f.dual_norm();
    let fz = f.eval(z);
    if fz < nf * (1.0 - ATTAINMENT_TOL) {
        return Err(Error::Precondition(format!(
            "z is not in M_f: f(z) = {fz} < ‖f‖ = {nf}"
        )));
    }
    let z = space.normalize(z).expect("unit vector is nonzero");
    let psi = f.scaled(1.0 / nf);
    let sel = base.with_override_tol(&z, &psi, ATTAINMENT_TOL)?;

    let target = linalg::scale(&z, nf);
    let mut xs = vec![z.clone()];
    if sample_count > 0 {
        xs.extend(space.unit_sphere_samples(sample_count, seed)?);
    }
    let mut residual: f64 = 0.0;
    let mut worst = z.clone();
    let mut kernel: f64 = 0.0;
    for x in &xs {
        let r = (f.eval(x) - sel.eval(x, &target)?).abs();
        if r > residual {
            residual = r;
            worst = x.clone();
        }
        // u = f(z)x − f(x)z lies in N(f), and [u, z] must vanish
        let u = linalg::sub(&linalg::scale(x, fz), &linalg::scale(&z, f.eval(x)));
        kernel = kernel.max(sel.eval(&u, &z)?.abs());
    }
    let cert = Certificate::new(TheoremTag::T21, inputs, residual, T21_TOL)
        .with_check(Check::new("kernel_orthogonality", kernel, T21_TOL))
        .with_witness("dual_norm", nf)
        .with_witness("override_functional", psi.coefficients())
        .with_witness("worst_x", worst)
        .with_witness("samples", xs.len())
        .with_witness("selection", sel.to_spec());
    Ok((sel, cert))
}

/// The identity forced at `x = z`: any compatible s.i.p. with
/// `f(x) = [x, ‖f‖z]` gives `f(z) = ‖f‖`. The residual is `|f(z) − ‖f‖[z, z]|`.
pub fn check_functional_identity_at_z(space: &NormedSpace, f: &Functional, z: &[f64]) -> Result<Certificate> {
    space.check(f.coefficients())?;
    check_unit(space, z)?;
    let nf = f.dual_norm();
    let sel = SipSelection::default_selection(space);
    let rhs = sel.eval(z, &linalg::scale(z, nf))?;
    let residual = (f.eval(z) - rhs).abs();
    Ok(Certificate::new(TheoremTag::T21, inputs(space, f, z), residual, T21_TOL)
        .with_witness("dual_norm", nf)
        .with_witness("f_of_z", f.eval(z))
        .with_witness("attainment_margin", nf - f.eval(z)))
}

/// Runs the construction when `z ∈ M_f` and the `x = z` identity otherwise.
pub fn verify_functional_characterization(
    space: &NormedSpace,
    f: &Functional,
    z: &[f64],
    sample_count: usize,
    seed: u64,
) -> Result<Certificate> {
    space.check(f.coefficients())?;
    check_unit(space, z)?;
    if f.is_zero() || f.eval(z) >= f.dual_norm() * (1.0 - ATTAINMENT_TOL) {
        Ok(construct_functional_sip(space, f, z, sample_count, seed)?.1.with_witness("in_mf", true))
    } else {
        Ok(check_functional_identity_at_z(space, f, z)?.with_witness("in_mf", false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::opnorm::functional_attainers;

    #[test]
    fn l1_coordinate_functional() {
        let l1 = NormedSpace::lp(2, 1.0).unwrap();
        let f = Functional::new(&l1, vec![0.0, 1.0]).unwrap();
        let (sel, cert) = construct_functional_sip(&l1, &f, &[0.0, 1.0], 100, 1).unwrap();
        assert!(cert.residual <= 1e-12, "{}", cert.residual);
        assert!(cert.pass);
        assert!((sel.eval(&[0.3, -0.7], &[0.0, 1.0]).unwrap() + 0.7).abs() < 1e-15);
    }

    #[test]
    fn euclidean_functional() {
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let f = Functional::new(&l2, vec![3.0, 4.0]).unwrap();
        let (sel, cert) = construct_functional_sip(&l2, &f, &[0.6, 0.8], 100, 2).unwrap();
        assert!(cert.residual <= 1e-12);
        let v = sel.eval(&[1.0, 2.0], &[3.0, 4.0]).unwrap();
        assert!((v - 11.0).abs() < 1e-12);
    }

    #[test]
    fn sup_norm_attainer() {
        let linf = NormedSpace::lp(3, f64::INFINITY).unwrap();
        let f = Functional::new(&linf, vec![0.4, -1.3, 0.2]).unwrap();
        let z = functional_attainers(&linf, &f).unwrap().maximizers[0].clone();
        let (_, cert) = construct_functional_sip(&linf, &f, &z, 100, 3).unwrap();
        assert!(cert.pass, "{}", cert.residual);
        assert!(cert.check("kernel_orthogonality").unwrap().pass);
    }

    #[test]
    fn non_attaining_z() {
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let f = Functional::new(&l2, vec![1.0, 0.0]).unwrap();
        assert!(matches!(
            construct_functional_sip(&l2, &f, &[0.0, 1.0], 10, 0),
            Err(Error::Precondition(_))
        ));
        let cert = check_functional_identity_at_z(&l2, &f, &[0.6, 0.8]).unwrap();
        assert!((cert.residual - 0.4).abs() < 1e-12);
        assert!(!cert.pass);
        let cert = verify_functional_characterization(&l2, &f, &[0.6, 0.8], 10, 0).unwrap();
        assert!(!cert.pass);
    }

    #[test]
    fn zero_functional_passes() {
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let f = Functional::new(&l2, vec![0.0, 0.0]).unwrap();
        let (_, cert) = construct_functional_sip(&l2, &f, &[1.0, 0.0], 10, 0).unwrap();
        assert!(cert.pass);
        assert!(cert.witness.contains_key("note"));
    }
}
