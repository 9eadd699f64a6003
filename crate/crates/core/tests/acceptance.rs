//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any criterion fails.
//!
//! cargo test -p sipgeom --test acceptance

mod common;

use std::process::Command;
use std::time::Instant;

use common::*;
use rand::Rng;
use sipgeom::bjortho::{min_along_line, BRUTE_FORCE_HALFWIDTH, BRUTE_FORCE_REFINEMENTS};
use sipgeom::opnorm::{default_starts, spectral_norm};
use sipgeom::theorems::{
    check_functional_identity_at_z, construct_functional_sip, construct_operator_sip_pair_with,
    find_preserved_orthogonal_direction_with, verify_isometry_characterization, verify_smooth_characterization_with,
    LemmaOptions,
};
use sipgeom::{
    brute_force_bj, classify, functional_attainers, operator_norm, verify_axioms, Functional, NormedSpace, Operator,
    SipSelection,
};

type Outcome = (bool, String);
type SpaceFn = fn(usize) -> NormedSpace;
type Criterion = fn() -> Outcome;

fn unit(space: &NormedSpace, v: &[f64]) -> Vec<f64> {
    space.normalize(v).expect("nonzero")
}

fn axioms() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_compat: f64 = 0.0;
    let mut runs = 0;
    for (k, (_, space)) in standard_spaces().into_iter().enumerate() {
        let report = verify_axioms(&SipSelection::default_selection(&space), 1000, 100 + k as u64).unwrap();
        worst = worst.max(report.max_violation());
        worst_compat = worst_compat.max(report.compatibility);
        runs += 1;
    }
    (
        worst <= 1e-9 && worst_compat <= 1e-9,
        format!("{runs} spaces x 1000 triples, max violation {worst:.2e}, compatibility {worst_compat:.2e}"),
    )
}

fn james_equivalence() -> Outcome {
    let mut compared = 0;
    let mut skipped = 0;
    let mut disagreements = Vec::new();
    for (k, (name, space)) in standard_spaces().into_iter().enumerate() {
        let mut r = rng(200 + k as u64);
        let n = space.dim();
        for i in 0..1000 {
            let raw = if i % 2 == 0 { gaussian(&mut r, n) } else { structured_point(&space, &mut r) };
            let Some(x) = space.normalize(&raw) else { continue };
            let y = unit(&space, &gaussian(&mut r, n));
            let c = classify(&space, &x, &y, 1e-9).unwrap();
            if c.margin_plus.abs() <= 1e-6 || c.margin_minus.abs() <= 1e-6 {
                skipped += 1;
                continue;
            }
            compared += 1;
            let brute = brute_force_bj(&space, &x, &y, BRUTE_FORCE_HALFWIDTH, BRUTE_FORCE_REFINEMENTS).unwrap();
            if brute != c.is_orthogonal() {
                let dip = min_along_line(&space, &x, &y, BRUTE_FORCE_HALFWIDTH, BRUTE_FORCE_REFINEMENTS).unwrap().1 - 1.0;
                disagreements.push(format!(
                    "{name}: x = {x:?}, margins ({:.3e}, {:.3e}), line minimum − ‖x‖ = {dip:.3e}",
                    c.margin_plus, c.margin_minus
                ));
            }
        }
    }
    let mut detail = format!("{compared} pairs compared, {skipped} inside the margin band, {} disagreements", disagreements.len());
    if !disagreements.is_empty() {
        detail += &format!(" [{}]", disagreements.iter().take(5).cloned().collect::<Vec<_>>().join("; "));
    }
    (disagreements.is_empty(), detail)
}

fn functional_families() -> Vec<NormedSpace> {
    let mut out = Vec::new();
    for n in 2..=4 {
        for p in [1.0, 1.5, 2.0, 3.0, INF] {
            out.push(lp(n, p));
        }
        out.push(weighted(n, 1.0));
        out.push(weighted(n, 3.0));
        out.push(weighted(n, INF));
        out.push(polyhedral(n));
    }
    out
}

fn functional_case() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut worst_ratio = f64::INFINITY;
    let mut count = 0;
    let mut negatives = 0;
    for (k, space) in functional_families().into_iter().enumerate() {
        let mut r = rng(300 + k as u64);
        let n = space.dim();
        for i in 0..50 {
            let f = Functional::new(&space, gaussian(&mut r, n)).unwrap();
            let z = functional_attainers(&space, &f).unwrap().maximizers[0].clone();
            let (_, cert) = construct_functional_sip(&space, &f, &z, 100, i).unwrap();
            worst = worst.max(cert.residual);
            count += 1;

            // push z off M_f until the attainment margin is at least 1e-2
            let dir = gaussian(&mut r, n);
            let mut eps = 0.05;
            let (zp, margin) = loop {
                let zp = unit(&space, &sipgeom::linalg::axpy(&z, eps, &dir));
                let margin = f.dual_norm() - f.eval(&zp);
                if margin >= 1e-2 || eps > 1e3 {
                    break (zp, margin);
                }
                eps *= 2.0;
            };
            if margin < 1e-2 {
                continue;
            }
            let witness = check_functional_identity_at_z(&space, &f, &zp).unwrap();
            worst_ratio = worst_ratio.min(witness.residual / margin);
            negatives += 1;
        }
    }
    (
        worst <= 1e-9 && worst_ratio >= 0.9,
        format!(
            "{count} attaining cases, max residual {worst:.2e}; {negatives} perturbed cases, min witness/margin {worst_ratio:.6}"
        ),
    )
}

fn smooth_case() -> Outcome {
    let exps = [1.5, 2.0, 3.0];
    let mut worst: f64 = 0.0;
    let mut worst_neg = f64::INFINITY;
    let (mut pos, mut neg, mut no_witness) = (0, 0, 0);
    let mut seed = 400;
    for p in exps {
        for q in exps {
            for i in 0..20 {
                seed += 1;
                let mut r = rng(seed);
                let (n, m) = (2 + i % 2, 2 + (i / 2) % 2);
                let op = operator(&mut r, &lp(n, p), &lp(m, q));
                let att = operator_norm(&op, default_starts(n), seed).unwrap();
                let z = &att.maximizers[0];
                let cert = verify_smooth_characterization_with(&op, z, att.norm_value, 100, seed, 1e-5).unwrap();
                worst = worst.max(cert.residual);
                pos += 1;

                let samples = op.domain().unit_sphere_samples(1000, seed + 7).unwrap();
                let low = samples
                    .iter()
                    .map(|s| (op.codomain().norm(&op.apply(s)).unwrap(), s))
                    .min_by(|a, b| a.0.total_cmp(&b.0))
                    .unwrap();
                if low.0 > 0.9 * att.norm_value {
                    no_witness += 1;
                    continue;
                }
                let cert = verify_smooth_characterization_with(&op, low.1, att.norm_value, 100, seed, 1e-5).unwrap();
                worst_neg = worst_neg.min(cert.witness_f64("attainment_deficit").unwrap());
                if cert.pass {
                    worst_neg = 0.0;
                }
                neg += 1;
            }
        }
    }
    (
        worst <= 1e-5 && worst_neg >= 0.19,
        format!(
            "{pos} maximizer cases, max residual {worst:.2e}; {neg} cases with ‖Tz‖ ≤ 0.9‖T‖, min x = z residual {worst_neg:.4} ({no_witness} operators without such z)"
        ),
    )
}

fn lemma_case() -> Outcome {
    let pairs: Vec<(&str, SpaceFn, SpaceFn)> = vec![
        ("l2 -> l2", |n| lp(n, 2.0), |n| lp(n, 2.0)),
        ("l3 -> l3", |n| lp(n, 3.0), |n| lp(n, 3.0)),
        ("l1.5 -> linf", |n| lp(n, 1.5), |n| lp(n, INF)),
        ("l2 -> l1", |n| lp(n, 2.0), |n| lp(n, 1.0)),
        ("linf -> l1", |n| lp(n, INF), |n| lp(n, 1.0)),
        ("l1 -> l3", |n| lp(n, 1.0), |n| lp(n, 3.0)),
        ("polyhedral -> linf", polyhedral, |n| lp(n, INF)),
        ("l3 -> polyhedral", |n| lp(n, 3.0), polyhedral),
    ];
    let mut failures = Vec::new();
    let mut slowest: f64 = 0.0;
    let (mut worst_z, mut worst_tz): (f64, f64) = (0.0, 0.0);
    let mut count = 0;
    for (k, (name, dom, cod)) in pairs.iter().enumerate() {
        for i in 0..20u64 {
            let seed = 500 + 100 * k as u64 + i;
            let mut r = rng(seed);
            let (n, m) = (2 + (i % 2) as usize, 2 + ((i / 2) % 2) as usize);
            let op = operator(&mut r, &dom(n), &cod(m));
            let start = Instant::now();
            let att = operator_norm(&op, default_starts(n), seed).unwrap();
            let z = att.maximizers[(i as usize) % att.maximizers.len()].clone();
            let opts = LemmaOptions { seed, ..LemmaOptions::default() };
            let res = find_preserved_orthogonal_direction_with(&op, &z, att.norm_value, None, &opts);
            let elapsed = start.elapsed().as_secs_f64();
            slowest = slowest.max(elapsed);
            count += 1;
            let (dir, _) = match res {
                Ok(v) => v,
                Err(e) => {
                    failures.push(format!("{name} #{i}: {e}"));
                    continue;
                }
            };
            let y = &dir.y;
            let ny = op.domain().norm(y).unwrap();
            let mz = min_along_line(op.domain(), &z, y, BRUTE_FORCE_HALFWIDTH, BRUTE_FORCE_REFINEMENTS).unwrap().1;
            let ty = op.apply(y);
            let tz = op.apply(&z);
            let mtz = if op.codomain().norm(&ty).unwrap() == 0.0 {
                op.codomain().norm(&tz).unwrap()
            } else {
                min_along_line(op.codomain(), &tz, &ty, BRUTE_FORCE_HALFWIDTH, BRUTE_FORCE_REFINEMENTS).unwrap().1
            };
            worst_z = worst_z.max(1.0 - mz);
            worst_tz = worst_tz.max(1.0 - mtz / att.norm_value);
            if (ny - 1.0).abs() > 1e-12 || mz < 1.0 - 1e-6 || mtz < att.norm_value * (1.0 - 1e-5) || elapsed >= 1.0 {
                failures.push(format!("{name} #{i}: ‖y‖ = {ny}, min z-line {mz}, min Tz-line {mtz}, {elapsed:.3}s"));
            }
        }
    }
    let mut detail = format!(
        "{count} instances, worst z-line deficit {worst_z:.2e}, worst Tz-line deficit {worst_tz:.2e}, slowest {slowest:.3}s"
    );
    if !failures.is_empty() {
        detail += &format!(", {} failures [{}]", failures.len(), failures.iter().take(3).cloned().collect::<Vec<_>>().join("; "));
    }
    (failures.is_empty(), detail)
}

fn general_case() -> Outcome {
    let families: [(&str, SpaceFn); 3] =
        [("l1", |n| lp(n, 1.0)), ("linf", |n| lp(n, INF)), ("polyhedral", polyhedral)];
    let mut worst: f64 = 0.0;
    let mut failures = Vec::new();
    let (mut count, mut collinear) = (0, 0);
    for (k, (name, dom)) in families.iter().enumerate() {
        for i in 0..50u64 {
            let seed = 600 + 100 * k as u64 + i;
            let mut r = rng(seed);
            let (n, m) = (2 + (i % 2) as usize, 2 + ((i / 3) % 2) as usize);
            let cod = families[(k + i as usize) % 3].1;
            let op = operator(&mut r, &dom(n), &cod(m));
            let att = operator_norm(&op, default_starts(n), seed).unwrap();
            let z = att.maximizers[(i as usize) % att.maximizers.len()].clone();
            let x = if i % 5 == 0 {
                collinear += 1;
                sipgeom::linalg::scale(&z, r.random_range(-3.0..3.0))
            } else {
                gaussian(&mut r, n)
            };
            let opts = LemmaOptions { seed, ..LemmaOptions::default() };
            count += 1;
            match construct_operator_sip_pair_with(&op, &z, &x, att.norm_value, &opts) {
                Ok(pair) => {
                    worst = worst.max(pair.certificate.residual);
                    if !pair.certificate.pass {
                        failures.push(format!("{name} #{i}: residual {:.3e}", pair.certificate.residual));
                    }
                }
                Err(e) => failures.push(format!("{name} #{i}: {e}")),
            }
        }
    }
    let mut detail = format!("{count} instances ({collinear} collinear), max residual {worst:.2e}");
    if !failures.is_empty() {
        detail += &format!(", {} failures [{}]", failures.len(), failures.iter().take(3).cloned().collect::<Vec<_>>().join("; "));
    }
    (failures.is_empty() && worst <= 1e-6, detail)
}

fn isometry_case() -> Outcome {
    let mut cases: Vec<(String, Operator)> = Vec::new();
    let perm2 = vec![vec![0.0, 1.0], vec![-1.0, 0.0]];
    let perm3 = vec![vec![0.0, 0.0, -1.0], vec![1.0, 0.0, 0.0], vec![0.0, -1.0, 0.0]];
    for p in [1.0, 1.5, 2.0, 3.0, INF] {
        cases.push((format!("signed permutation on l{p} dim 2"), Operator::new(perm2.clone(), lp(2, p), lp(2, p)).unwrap()));
        cases.push((format!("signed permutation on l{p} dim 3"), Operator::new(perm3.clone(), lp(3, p), lp(3, p)).unwrap()));
    }
    for deg in [30.0_f64, 117.0] {
        let (s, c) = deg.to_radians().sin_cos();
        cases.push((format!("rotation by {deg} degrees on l2"), Operator::new(vec![vec![c, -s], vec![s, c]], lp(2, 2.0), lp(2, 2.0)).unwrap()));
    }
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for (k, (name, op)) in cases.iter().enumerate() {
        let cert = verify_isometry_characterization(op, 1000, 700 + k as u64, 1e-6).unwrap();
        worst = worst.max(cert.residual);
        if !cert.pass || cert.witness["is_isometry"] != true {
            failures.push(format!("{name}: residual {:.3e}", cert.residual));
        }
    }
    let diag = Operator::new(vec![vec![2.0, 0.0], vec![0.0, 1.0]], lp(2, 2.0), lp(2, 2.0)).unwrap();
    let cert = verify_isometry_characterization(&diag, 1000, 799, 1e-6).unwrap();
    let witness: Vec<f64> = serde_json::from_value(cert.witness["witness_z"].clone()).unwrap_or_default();
    let deficit = if witness.is_empty() { 0.0 } else { 2.0 - lp(2, 2.0).norm(&diag.apply(&witness)).unwrap() };
    let diag_ok = !cert.pass && deficit > 1e-3;
    if !diag_ok {
        failures.push(format!("diag(2,1): pass = {}, witness deficit {deficit}", cert.pass));
    }
    let mut detail = format!(
        "{} isometries x 1000 pairs, max residual {worst:.2e}; diag(2,1) fails with witness z = {:?}, ‖T‖ − ‖Tz‖ = {deficit:.4}",
        cases.len(),
        witness
    );
    if !failures.is_empty() {
        detail += &format!(" [{}]", failures.join("; "));
    }
    (failures.is_empty(), detail)
}

fn opnorm_oracles() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    let mut seed = 800;
    let mut check = |op: &Operator, oracle: f64, seed: u64| {
        let att = operator_norm(op, default_starts(op.domain().dim()), seed).unwrap();
        worst = worst.max((att.norm_value - oracle).abs() / oracle);
        count += 1;
    };
    for i in 0..100 {
        let (n, m) = (2 + i % 3, 2 + (i / 3) % 3);
        // ℓ_1 → ℓ_q: largest column norm
        for q in [1.5, 2.0, 3.0, INF] {
            seed += 1;
            let mut r = rng(seed);
            let op = operator(&mut r, &lp(n, 1.0), &lp(m, q));
            let cols = (0..n).map(|j| {
                let col: Vec<f64> = op.matrix().iter().map(|row| row[j]).collect();
                lp(m, q).norm(&col).unwrap()
            });
            check(&op, cols.fold(0.0, f64::max), seed);
        }
        // ℓ_p → ℓ_∞: largest conjugate norm of a row
        for p in [1.5, 2.0, 3.0] {
            seed += 1;
            let mut r = rng(seed);
            let op = operator(&mut r, &lp(n, p), &lp(m, INF));
            let conj = p / (p - 1.0);
            let rows = op.matrix().iter().map(|row| row.iter().map(|v| v.abs().powf(conj)).sum::<f64>().powf(1.0 / conj));
            check(&op, rows.fold(0.0, f64::max), seed);
        }
        // ℓ_2 → ℓ_2: power iteration
        seed += 1;
        let mut r = rng(seed);
        let op = operator(&mut r, &lp(n, 2.0), &lp(m, 2.0));
        check(&op, spectral_norm(op.matrix(), n), seed);
    }
    (worst <= 1e-6, format!("{count} matrices, max relative error {worst:.2e}"))
}

fn partition() -> Outcome {
    let mut uncovered = 0;
    let mut doubly_strict = 0;
    let mut counts = [0usize; 3];
    for (k, (_, space)) in standard_spaces().into_iter().enumerate() {
        let mut r = rng(900 + k as u64);
        let n = space.dim();
        for j in 0..20 {
            let z = if j % 2 == 0 { gaussian(&mut r, n) } else { structured_point(&space, &mut r) };
            if z.iter().all(|v| *v == 0.0) {
                continue;
            }
            for _ in 0..1000 {
                let y = gaussian(&mut r, n);
                let c = classify(&space, &z, &y, 1e-9).unwrap();
                let plus_strict = c.margin_minus > 1e-9;
                let minus_strict = c.margin_plus < -1e-9;
                if !c.in_plus && !c.in_minus {
                    uncovered += 1;
                }
                if plus_strict && minus_strict {
                    doubly_strict += 1;
                }
                let cell = match (c.in_plus, c.in_minus) {
                    (true, false) => 0,
                    (false, true) => 1,
                    (true, true) => 2,
                    (false, false) => continue,
                };
                counts[cell] += 1;
            }
        }
    }
    (
        uncovered == 0 && doubly_strict == 0,
        format!(
            "plus-only {}, minus-only {}, orthogonal {}; {uncovered} uncovered, {doubly_strict} doubly strict",
            counts[0], counts[1], counts[2]
        ),
    )
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_sipgeom");
    let dir = tempfile::tempdir().unwrap();
    let write = |name: &str, body: &str| {
        let p = dir.path().join(name);
        std::fs::write(&p, body).unwrap();
        p
    };
    let op = r#"{"matrix":[[2,0],[0,1]],"domain":{"kind":"lp","p":2},"codomain":{"kind":"lp","p":2}}"#;
    let pass_cfg = write("pass.json", &format!(r#"{{"theorem":"t22","operator":{op},"z":[1,0]}}"#));
    let fail_cfg = write("fail.json", &format!(r#"{{"theorem":"t22","operator":{op},"z":[0,1]}}"#));
    let bad_cfg = write("bad.json", r#"{"space":{"kind":"lq","p":2},"x":[1,0]}"#);
    let iso_cfg = write(
        "iso.json",
        r#"{"theorem":"t24","operator":{"matrix":[[0,1],[-1,0]],"domain":{"kind":"lp","p":3},"codomain":{"kind":"lp","p":3}},"pairs":200}"#,
    );
    let run = |cmd: &str, cfg: &std::path::Path, out: &str, seed: &str| {
        let out = dir.path().join(out);
        let status = Command::new(bin)
            .args([cmd, "--config", cfg.to_str().unwrap(), "--seed", seed, "--out", out.to_str().unwrap()])
            .output()
            .unwrap()
            .status
            .code();
        (status, std::fs::read(&out).unwrap_or_default())
    };
    let mut problems = Vec::new();
    for (name, cmd, cfg) in [("t22", "verify", &pass_cfg), ("t24", "verify", &iso_cfg)] {
        let (s1, a) = run(cmd, cfg, &format!("{name}_a.json"), "7");
        let (s2, b) = run(cmd, cfg, &format!("{name}_b.json"), "7");
        if a.is_empty() || a != b || s1 != s2 {
            problems.push(format!("{name} documents differ across identical runs"));
        }
        if s1 != Some(0) {
            problems.push(format!("{name} pass fixture exited with {s1:?}"));
        }
    }
    let (s, doc) = run("verify", &fail_cfg, "fail.json.out", "7");
    let residual = serde_json::from_slice::<serde_json::Value>(&doc)
        .ok()
        .and_then(|v| v["certificate"]["residual"].as_f64())
        .unwrap_or(f64::NAN);
    if s != Some(2) || (residual - 0.75).abs() > 1e-9 {
        problems.push(format!("fail fixture exited with {s:?}, residual {residual}"));
    }
    let (s, _) = run("norm", &bad_cfg, "bad.out", "7");
    if s != Some(1) {
        problems.push(format!("usage fixture exited with {s:?}"));
    }
    let detail = if problems.is_empty() {
        "golden documents identical across runs; exit statuses 0 / 2 / 1 on pass / fail / usage".to_string()
    } else {
        problems.join("; ")
    };
    (problems.is_empty(), detail)
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("s.i.p. axioms", axioms),
        ("James equivalence", james_equivalence),
        ("functional attainment", functional_case),
        ("smooth operators", smooth_case),
        ("orthogonality-preserving direction", lemma_case),
        ("general operators", general_case),
        ("isometries", isometry_case),
        ("operator-norm oracles", opnorm_oracles),
        ("partition", partition),
        ("CLI determinism and exit codes", cli_contract),
    ];
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failed = 0;
    let total = Instant::now();
    for (i, (name, run)) in criteria.iter().enumerate() {
        if !args.is_empty() && !args.iter().any(|a| name.contains(a.as_str())) {
            continue;
        }
        let start = Instant::now();
        let (ok, detail) = run();
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {:>2} {verdict} [{name}] {detail} ({:.2}s)", i + 1, start.elapsed().as_secs_f64());
        if !ok {
            failed += 1;
        }
    }
    println!("acceptance: {failed} failed, total {:.2}s", total.elapsed().as_secs_f64());
    if failed > 0 {
        std::process::exit(1);
    }
}
