//! CSV trace of a two-dimensional unit sphere.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::normspace::NormedSpace;
use crate::opnorm::{default_starts, operator_norm, Operator};

#[derive(Debug, Clone, PartialEq)]
pub struct SphereRow {
    /// angle in radians, `None` for attainment rows
    pub theta: Option<f64>,
    pub x: [f64; 2],
}

/// Sphere points `(cos θ, sin θ)/‖(cos θ, sin θ)‖` for `resolution` angles in
/// `[0, 2π)`, followed by the attainment points of `op` when given.
pub fn sphere_rows(space: &NormedSpace, resolution: usize, op: Option<&Operator>, seed: u64) -> Result<Vec<SphereRow>> {
    if space.dim() != 2 {
        return Err(Error::Usage(format!("sphere traces need dimension 2, got {}", space.dim())));
    }
    if resolution < 8 {
        return Err(Error::Usage(format!("resolution must be at least 8, got {resolution}")));
    }
    let mut rows = Vec::with_capacity(resolution);
    for k in 0..resolution {
        let theta = std::f64::consts::TAU * k as f64 / resolution as f64;
        let p = space.normalize(&[theta.cos(), theta.sin()]).expect("direction is nonzero");
        rows.push(SphereRow { theta: Some(theta), x: [p[0], p[1]] });
    }
    if let Some(op) = op {
        if op.domain() != space {
            return Err(Error::Usage("operator domain differs from the traced space".into()));
        }
        let att = operator_norm(op, default_starts(2), seed)?;
        for m in &att.maximizers {
            rows.push(SphereRow { theta: None, x: [m[0], m[1]] });
            rows.push(SphereRow { theta: None, x: [-m[0], -m[1]] });
        }
    }
    Ok(rows)
}

pub fn emit_sphere_csv(
    space: &NormedSpace,
    resolution: usize,
    op: Option<&Operator>,
    seed: u64,
    path: &Path,
) -> Result<Vec<SphereRow>> {
    let rows = sphere_rows(space, resolution, op, seed)?;
    let mut text = String::from("theta,x1,x2\n");
    for r in &rows {
        match r.theta {
            Some(t) => writeln!(text, "{t},{},{}", r.x[0], r.x[1]),
            None => writeln!(text, "MT,{},{}", r.x[0], r.x[1]),
        }
        .expect("writing to a String cannot fail");
    }
    fs::write(path, text).map_err(|e| Error::Usage(format!("cannot write {}: {e}", path.display())))?;
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_sphere() {
        let linf = NormedSpace::lp(2, f64::INFINITY).unwrap();
        let rows = sphere_rows(&linf, 360, None, 0).unwrap();
        assert_eq!(rows.len(), 360);
        assert!(rows.iter().all(|r| (r.x[0].abs().max(r.x[1].abs()) - 1.0).abs() <= 1e-12));
    }

    #[test]
    fn attainment_rows() {
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        let op = Operator::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]], l2.clone(), l2.clone()).unwrap();
        let rows = sphere_rows(&l2, 16, Some(&op), 0).unwrap();
        let mt: Vec<_> = rows.iter().filter(|r| r.theta.is_none()).collect();
        assert_eq!(mt.len(), 2);
        assert!(mt.iter().all(|r| (r.x[0].abs() - 1.0).abs() < 1e-6 && r.x[1].abs() < 1e-6));
    }

    #[test]
    fn rejects_bad_inputs() {
        let l2 = NormedSpace::lp(3, 2.0).unwrap();
        assert!(matches!(sphere_rows(&l2, 16, None, 0), Err(Error::Usage(_))));
        let l2 = NormedSpace::lp(2, 2.0).unwrap();
        assert!(matches!(sphere_rows(&l2, 4, None, 0), Err(Error::Usage(_))));
    }
}
