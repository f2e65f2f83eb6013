//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure.

mod common;

use std::time::{Duration, Instant};

use common::{delete_row_col, haar_list, id_only_candidates, leibniz_det};
use rand::Rng;
use uctrl_core::constructions::*;
use uctrl_core::linalg::random::gaussian_matrix;
use uctrl_core::linalg::{cofactor_matrix, det, haar_state, rng_from_seed, sym_det, sym_minor, CMatrix, C64};
use uctrl_core::model::checks::{probe_states, random_phases, wrap_angle};
use uctrl_core::model::*;
use uctrl_core::topology::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn c1_dong_exactness() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for d in 2..=4 {
        let alg = dong_cUd(d).map_err(e)?;
        let task = Task::c_um(d, d as i32).map_err(e)?;
        for (i, u) in haar_list(d, 20, 100 + d as u64).iter().enumerate() {
            let r = check_exact(&alg, &task, u, 1e-9).map_err(e)?;
            let phase_err = wrap_angle(r.phase.unwrap_or(f64::NAN) + det(u).map_err(e)?.arg()).abs();
            ensure!(r.achieved, "d={d} U#{i}: not achieved (residual {:.2e})", r.residual);
            ensure!(r.residual <= 1e-9, "d={d} U#{i}: residual {:.2e}", r.residual);
            ensure!(phase_err <= 1e-8, "d={d} U#{i}: φ off by {phase_err:.2e}");
            ensure!((r.success_prob - 1.0).abs() <= 1e-10, "d={d} U#{i}: success {}", r.success_prob);
            worst = (worst.0.max(r.residual), worst.1.max(phase_err), worst.2.max((r.success_prob - 1.0).abs()));
        }
    }
    let t = start.elapsed();
    ensure!(t < Duration::from_secs(30), "took {t:?}");
    Ok(format!("max residual {:.1e}, max φ error {:.1e}, max |p−1| {:.1e}, {:.2?}", worst.0, worst.1, worst.2, t))
}

fn c2_neutralisation() -> Outcome {
    let mut failures = 0;
    for d in 2..=3 {
        let us = haar_list(d, 20, 200 + d as u64);
        let rep = check_neutralises(&neutraliser_parallel(d).map_err(e)?, &us, 1e-8).map_err(e)?;
        ensure!(rep.pass, "d={d}: neutraliser fails");
        ensure!((rep.r - 1.0).abs() <= 1e-10, "d={d}: r = {}", rep.r);
        for (phi, u) in rep.phases.iter().zip(&us) {
            let err = wrap_angle(phi - det(u).map_err(e)?.arg()).abs();
            ensure!(err <= 1e-8, "d={d}: φ off by {err:.2e}");
        }
        let sample = haar_list(d, 50, 210 + d as u64);
        for k in [1, d + 1] {
            for seed in 0..5 {
                for cand in id_only_candidates(d, k, seed) {
                    let rep = check_neutralises(&cand, &sample, 1e-8).map_err(e)?;
                    ensure!(!rep.pass, "d={d}: {}-query {} candidate neutralises", k, cand.name());
                    failures += 1;
                }
            }
        }
    }
    Ok(format!("r = 1, φ = arg det; {failures} id-only candidates all fail"))
}

fn c3_conjugation() -> Outcome {
    let mut worst = 0.0f64;
    for d in 2..=4 {
        let alg = conjugation(d).map_err(e)?;
        let task = Task::new(d, TaskKind::Conjugation).map_err(e)?;
        let us = haar_list(d, 20, 300 + d as u64);
        for (i, u) in us.iter().enumerate() {
            let r = check_exact(&alg, &task, u, 1e-9).map_err(e)?;
            ensure!(r.achieved && r.residual <= 1e-9, "d={d} U#{i}: residual {:.2e}", r.residual);
            ensure!((r.success_prob - 1.0).abs() <= 1e-10, "d={d} U#{i}: success {}", r.success_prob);
            worst = worst.max(r.residual);
        }
        ensure!(check_clean(&alg, &task, &us, 1e-8).map_err(e)?.clean, "d={d}: not clean");
    }
    Ok(format!("clean, p = 1, max residual {worst:.1e}"))
}

fn success_over_inputs(alg: &OracleAlgorithm, u: &CMatrix, seed: u64) -> Result<Vec<f64>, String> {
    let dim = alg.layout().dim_of(alg.input_register());
    let mut rng = rng_from_seed(seed);
    let mut states: Vec<Vec<C64>> = (0..dim).map(|j| CMatrix::basis(dim, j).into_vec()).collect();
    states.extend((0..5).map(|_| haar_state(dim, &mut rng).into_vec()));
    states.iter().map(|s| success_prob(alg, u, s).map_err(e)).collect()
}

fn c4_transpose_inverse() -> Outcome {
    for d in 2..=3 {
        let want = 1.0 / (d * d) as f64;
        for (alg, task) in [
            (transpose_via_teleport(d).map_err(e)?, Task::new(d, TaskKind::Transpose).map_err(e)?),
            (inverse(d).map_err(e)?, Task::new(d, TaskKind::Inverse).map_err(e)?),
        ] {
            let us = haar_list(d, 20, 400 + d as u64);
            for (i, u) in us.iter().enumerate() {
                ensure!(
                    check_exact(&alg, &task, u, 1e-8).map_err(e)?.achieved,
                    "{} d={d} U#{i}: not achieved",
                    alg.name()
                );
                for p in success_over_inputs(&alg, u, i as u64)? {
                    ensure!((p - want).abs() <= 1e-10, "{} d={d} U#{i}: success {p}", alg.name());
                }
            }
            if task.kind == TaskKind::Inverse {
                ensure!(check_clean(&alg, &task, &us, 1e-8).map_err(e)?.clean, "inverse d={d}: not clean");
                let n = alg.query_count();
                ensure!(n == d - 1 && (n + 1) % d == 0, "inverse d={d}: {n} queries");
            }
        }
    }
    Ok("p = 1/d² on every U and input; inverse clean with d−1 queries".into())
}

fn c5_spin_echo() -> Outcome {
    for d in 2..=3 {
        let alg = spin_echo_cUd(d).map_err(e)?;
        let task = Task::c_um(d, d as i32).map_err(e)?;
        let want = 1.0 / (d * d) as f64;
        for (i, u) in haar_list(d, 20, 500 + d as u64).iter().enumerate() {
            let r = check_exact(&alg, &task, u, 1e-8).map_err(e)?;
            ensure!(r.achieved, "d={d} U#{i}: residual {:.2e}", r.residual);
            for p in success_over_inputs(&alg, u, i as u64)? {
                ensure!((p - want).abs() <= 1e-10, "d={d} U#{i}: success {p}");
            }
        }
    }
    Ok("c-U^d achieved, p = 1/d²".into())
}

fn c6_determinants() -> Outcome {
    let mut rng = rng_from_seed(600);
    let mut worst = 0.0f64;
    for k in 0..200 {
        let n = 1 + k % 5;
        let m = gaussian_matrix(n, n, &mut rng);
        let want = leibniz_det(&m);
        let err = (sym_det(&m).map_err(e)? - want).norm() / want.norm().max(1.0);
        ensure!(err <= 1e-10, "{n}x{n}: sym_det off by {err:.2e}");
        worst = worst.max(err);
    }
    for n in 1..=4 {
        for _ in 0..5 {
            let m = gaussian_matrix(n, n, &mut rng);
            for i in 0..n {
                for j in 0..n {
                    let want = if n == 1 { C64::new(1.0, 0.0) } else { leibniz_det(&delete_row_col(&m, i, j)) };
                    let err = (sym_minor(&m, i, j).map_err(e)? - want).norm();
                    ensure!(err <= 1e-10 * want.norm().max(1.0), "{n}x{n} minor ({i},{j}) off by {err:.2e}");
                }
            }
        }
    }
    for d in 2..=4 {
        for u in haar_list(d, 100, 610 + d as u64) {
            let want = u.conj().scale(det(&u).map_err(e)?);
            let err = cofactor_matrix(&u).map_err(e)?.max_abs_diff(&want);
            ensure!(err <= 1e-10, "d={d}: cofactor off by {err:.2e}");
        }
    }
    Ok(format!("max relative sym_det error {worst:.1e}"))
}

fn c7_homogeneity() -> Outcome {
    let mut count = 0;
    let mut worst = 0.0f64;
    for d in 2..=4 {
        for (alg, degree) in suite(d).map_err(e)? {
            if d == 4 && alg.layout().total_dim() > 256 {
                continue;
            }
            ensure!(alg.static_degree() == degree, "{} d={d}: static degree {}", alg.name(), alg.static_degree());
            let u = haar_list(d, 1, 700 + d as u64).remove(0);
            for lambda in random_phases(10, 710 + d as u64) {
                let r = numeric_homogeneity_check(&alg, &u, lambda, degree).map_err(e)?;
                ensure!(r <= 1e-9, "{} d={d}: residual {r:.2e}", alg.name());
                worst = worst.max(r);
            }
            let us = haar_list(d, 200, 720 + d as u64);
            for pair in us.chunks(2) {
                let l = lipschitz_check(&alg, &pair[0], &pair[1]).map_err(e)?;
                ensure!(l.holds, "{} d={d}: {} > {}", alg.name(), l.lhs, l.bound);
            }
            count += 1;
        }
    }
    Ok(format!("{count} (construction, d) pairs; max homogeneity residual {worst:.1e}"))
}

fn c8_windings() -> Outcome {
    let det_of = |u: &CMatrix| det(u);
    for d in 2..=4 {
        let tr = LoopTrace::sample(LoopKind::Central, d, 256, &det_of, DEFAULT_THRESHOLD).map_err(e)?;
        ensure!(tr.valid && tr.winding == d as i64, "det d={d}: winding {} valid {}", tr.winding, tr.valid);
    }
    let mut probes = 0;
    for d in 2..=4 {
        let di = d as i32;
        for (alg, m) in [
            (dong_cUd(d).map_err(e)?, di),
            (power_cUm(d, 2 * di).map_err(e)?, 2 * di),
            (power_cUm(d, -di).map_err(e)?, -di),
        ] {
            let rep = dichotomy_probe(&alg, m, d, 256, &ProbeOptions::default()).map_err(e)?;
            ensure!(rep.valid, "{} d={d}: invalid trace", alg.name());
            ensure!(
                rep.winding == i64::from(m) && rep.divisible,
                "{} d={d}: winding {} for m={m}",
                alg.name(),
                rep.winding
            );
            probes += 1;
        }
    }
    let rep =
        dichotomy_probe(&composed_principal_root(2).map_err(e)?, 1, 2, 256, &ProbeOptions::default()).map_err(e)?;
    ensure!(!rep.valid, "composed root: trace is valid");
    let gen = rep.generator.as_ref().ok_or("no generator trace")?;
    ensure!(!gen.valid && gen.k == K_MAX, "composed root: break did not persist to K = {K_MAX}");
    let at = rep.break_at.ok_or("composed root: no break located")?;
    ensure!((at - 0.5).abs() <= 1e-3, "composed root: break at t = {at}");
    Ok(format!(
        "det winds d; {probes} dong/power probes wind m; composed root invalid at K = {}, break at t = {at:.6}",
        gen.k
    ))
}

fn c9_borsuk_ulam() -> Outcome {
    let mut rng = rng_from_seed(900);
    for _ in 0..1000 {
        let x: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
        let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        let x = x.map(|v| v / n);
        for d in [2, 4] {
            let g = bu_map_g(&x, d).map_err(e)?;
            ensure!(g.unitarity_defect() <= 1e-12, "g not unitary at {x:?}");
            let odd = bu_map_g(&x.map(|v| -v), d).map_err(e)?.max_abs_diff(&g.scale_re(-1.0));
            ensure!(odd <= 1e-12, "g not odd at {x:?}");
        }
    }
    // min over the midpoint grid of |x₁ + ix₂|, frozen from a direct enumeration
    const PINNED: f64 = 0.06935039014668734;
    let h = |u: &CMatrix| Ok(u[(0, 0)]);
    let mut mins = Vec::new();
    for n in [4, 8, 16, 32] {
        let scan = bu_scan(&h, 2, &SphereGrid::new(n).map_err(e)?).map_err(e)?;
        ensure!(scan.oddness_residual <= 1e-12, "n={n}: h∘g not odd");
        if let Some(&prev) = mins.last() {
            ensure!(scan.min_abs < prev, "n={n}: min {} did not decrease from {prev}", scan.min_abs);
        }
        mins.push(scan.min_abs);
    }
    let last = *mins.last().unwrap();
    ensure!((last - PINNED).abs() <= 1e-12, "final min {last} ≠ {PINNED}");
    Ok(format!("mins {mins:.4?}"))
}

fn c10_eps_consistency() -> Outcome {
    let mut checked = 0;
    for d in 2..=4 {
        let di = d as i32;
        let mut exact = vec![
            (dong_cUd(d).map_err(e)?, Task::c_um(d, di).map_err(e)?),
            (conjugation(d).map_err(e)?, Task::new(d, TaskKind::Conjugation).map_err(e)?),
            (transpose_via_teleport(d).map_err(e)?, Task::new(d, TaskKind::Transpose).map_err(e)?),
        ];
        if d <= 3 {
            exact.push((power_cUm(d, 2 * di).map_err(e)?, Task::c_um(d, 2 * di).map_err(e)?));
            exact.push((power_cUm(d, -di).map_err(e)?, Task::c_um(d, -di).map_err(e)?));
            exact.push((inverse(d).map_err(e)?, Task::new(d, TaskKind::Inverse).map_err(e)?));
            exact.push((spin_echo_cUd(d).map_err(e)?, Task::c_um(d, di).map_err(e)?));
        }
        let n = if d == 4 { 3 } else { 10 };
        for (alg, task) in &exact {
            for (i, u) in haar_list(d, n, 1000 + d as u64).iter().enumerate() {
                let eps = eps_distance_estimate(alg, task, u, 4, i as u64).map_err(e)?;
                ensure!(eps <= 1e-9, "{} d={d} U#{i}: eps {eps:.2e}", alg.name());
                checked += 1;
            }
        }
        // every shipped circuit, every sampled state: nonzero success
        for (alg, _) in suite(d).map_err(e)? {
            if d == 4 && alg.layout().total_dim() > 256 {
                continue;
            }
            let dim = alg.layout().dim_of(alg.input_register());
            let ctrl = alg.layout().control_index() == Some(0);
            for (i, u) in haar_list(d, 5, 1010 + d as u64).iter().enumerate() {
                for (label, rho) in probe_states(dim, ctrl, 4, i as u64) {
                    let (_, p) = apply_channel(&alg, u, &rho).map_err(e)?;
                    ensure!(p > 1e-12, "{} d={d}: zero success on {label}", alg.name());
                }
            }
        }
    }
    Ok(format!("{checked} exact (algorithm, U) pairs with eps ≤ 1e-9; no zero success probability"))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("controlled-U^d exactness", c1_dong_exactness),
        ("neutralisation", c2_neutralisation),
        ("conjugation", c3_conjugation),
        ("transpose and inverse", c4_transpose_inverse),
        ("spin-echo controlled-U^d", c5_spin_echo),
        ("determinant formulas", c6_determinants),
        ("homogeneity and Lipschitz", c7_homogeneity),
        ("dichotomy windings", c8_windings),
        ("Borsuk-Ulam probe", c9_borsuk_ulam),
        ("eps consistency", c10_eps_consistency),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let t = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail}) [{t:.2?}]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why}) [{t:.2?}]", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
