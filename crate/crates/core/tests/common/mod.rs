#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use sipgeom::{NormedSpace, Operator};

pub const INF: f64 = f64::INFINITY;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

pub fn matrix(rng: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<Vec<f64>> {
    (0..m).map(|_| gaussian(rng, n)).collect()
}

pub fn lp(n: usize, p: f64) -> NormedSpace {
    NormedSpace::lp(n, p).unwrap()
}

/// Coordinate functionals, cyclic neighbour pairs and an alternating row.
pub fn polyhedral(n: usize) -> NormedSpace {
    let mut gens = Vec::new();
    for i in 0..n {
        let mut e = vec![0.0; n];
        e[i] = 1.0;
        gens.push(e);
    }
    for i in 0..n {
        let mut g = vec![0.0; n];
        g[i] = 0.7;
        g[(i + 1) % n] += 0.6;
        gens.push(g);
    }
    gens.push((0..n).map(|i| if i % 2 == 0 { 0.45 } else { -0.45 }).collect());
    NormedSpace::polyhedral(gens).unwrap()
}

pub fn weighted(n: usize, p: f64) -> NormedSpace {
    NormedSpace::weighted_lp(p, (0..n).map(|i| 1.0 + 0.5 * i as f64).collect()).unwrap()
}

/// ℓ_p for p ∈ {1, 1.5, 2, 3, ∞} and the polyhedral norm, dims 2–4.
pub fn standard_spaces() -> Vec<(String, NormedSpace)> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for p in [1.0, 1.5, 2.0, 3.0, INF] {
            out.push((format!("l{p} dim {n}"), lp(n, p)));
        }
        out.push((format!("polyhedral dim {n}"), polyhedral(n)));
    }
    out
}

/// A point where the norm is typically not smooth: some coordinates zeroed
/// (ℓ_1) or pinned at the maximum modulus (ℓ_∞), or a ball vertex.
pub fn structured_point(space: &NormedSpace, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let n = space.dim();
    let mut x = gaussian(rng, n);
    match rng.random_range(0..3) {
        0 => {
            let k = rng.random_range(0..n);
            x[k] = 0.0;
        }
        1 => {
            let m = x.iter().map(|v| v.abs()).fold(0.0, f64::max);
            let k = rng.random_range(0..n);
            x[k] = if x[k] < 0.0 { -m } else { m };
        }
        _ => {
            if let Some(vs) = space.ball_vertices() {
                return vs[rng.random_range(0..vs.len())].clone();
            }
        }
    }
    x
}

pub fn operator(rng: &mut ChaCha8Rng, domain: &NormedSpace, codomain: &NormedSpace) -> Operator {
    let a = matrix(rng, codomain.dim(), domain.dim());
    Operator::new(a, domain.clone(), codomain.clone()).unwrap()
}
