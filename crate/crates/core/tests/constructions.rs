mod common;

use common::{diag_phase, haar, haar_list};
use uctrl_core::constructions::*;
use uctrl_core::linalg::{cofactor_matrix, det, gates, kron_all, CMatrix, C64, ONE, ZERO};
use uctrl_core::model::*;

const TOL: f64 = 1e-8;

fn proj(i: usize) -> CMatrix {
    CMatrix::outer(&CMatrix::basis(2, i), &CMatrix::basis(2, i))
}

#[test]
fn kitaev_is_identity_at_identity() {
    let alg = kitaev_cswap(3).unwrap();
    assert!(alg.eval(&CMatrix::identity(3)).unwrap().approx_eq(&CMatrix::identity(18), 1e-14));
}

#[test]
fn kitaev_matches_block_form() {
    let z = gates::pauli_z();
    let id = CMatrix::identity(2);
    let want = &kron_all([&proj(0), &id, &z]) + &kron_all([&proj(1), &z, &id]);
    let got = kitaev_cswap(2).unwrap().eval(&z).unwrap();
    assert!(got.approx_eq(&want, 1e-14));
}

#[test]
fn kitaev_with_eigenvector_ancilla_is_controlled_u() {
    // U = W diag(μ, 1, e^{0.4i}) W†, eigenvector W|0⟩
    let w = haar(3, 5);
    let mu = C64::from_polar(1.0, 1.1);
    let u = &(&w * &CMatrix::diag(&[mu, ONE, C64::from_polar(1.0, 0.4)])) * &w.adjoint();
    let v = CMatrix::column(w.col(0));
    let a = kitaev_cswap(3).unwrap().eval(&u).unwrap();
    let lhs = &a * &CMatrix::identity(6).kron(&v);
    let ctrl = &proj(0).kron(&CMatrix::identity(3).scale(mu)) + &proj(1).kron(&u);
    assert!(lhs.approx_eq(&ctrl.kron(&v), 1e-12));
}

#[test]
fn kitaev_does_not_achieve_controlled_u() {
    let task = Task::c_um(2, 1).unwrap();
    let alg = kitaev_cswap(2).unwrap();
    for u in haar_list(2, 10, 1) {
        let res = check_exact(&alg, &task, &u, TOL).unwrap();
        assert!(!res.achieved);
        assert!(res.second_singular > 1e-3);
    }
}

#[test]
fn neutraliser_identity_and_phase() {
    for d in 2..=3 {
        let alg = neutraliser_parallel(d).unwrap();
        let n = alg.layout().total_dim();
        assert!(alg.eval(&CMatrix::identity(d)).unwrap().approx_eq(&CMatrix::identity(n), 1e-12));
        assert_eq!(alg.static_degree(), d as i32);
    }
    let alg = neutraliser_parallel(2).unwrap();
    for u in haar_list(2, 20, 2) {
        let a = alg.eval(&u).unwrap();
        let dt = det(&u).unwrap();
        assert!((a[(0, 0)] - dt).norm() < 1e-12);
        for i in 1..4 {
            assert!(a[(i, 0)].norm() < 1e-12);
        }
    }
}

#[test]
fn dong_identity_and_diagonal_example() {
    for d in 2..=3 {
        let alg = dong_cUd(d).unwrap();
        let n = alg.layout().total_dim();
        assert!(alg.eval(&CMatrix::identity(d)).unwrap().approx_eq(&CMatrix::identity(n), 1e-12));
    }
    let theta = 0.73;
    let u = diag_phase(2, theta);
    let alg = dong_cUd(2).unwrap();
    let res = check_exact(&alg, &Task::c_um(2, 2).unwrap(), &u, TOL).unwrap();
    assert!(res.achieved);
    // task factor |0⟩⟨0|⊗Id + e^{−iθ}|1⟩⟨1|⊗diag(1, e^{2iθ})
    assert!((res.phase.unwrap() + theta).abs() < 1e-9);
    let map = RestrictedMap::compute(&alg, &u).unwrap();
    let t = &proj(0).kron(&CMatrix::identity(2))
        + &proj(1).kron(&CMatrix::diag(&[C64::from_polar(1.0, -theta), C64::from_polar(1.0, theta)]));
    let g = map.garbage_for(&t);
    assert!(map.residual(&t, &g) < 1e-12);
}

#[test]
fn dong_achieves_with_unit_probability() {
    for d in 2..=3 {
        let alg = dong_cUd(d).unwrap();
        let task = Task::c_um(d, d as i32).unwrap();
        for u in haar_list(d, 10, 3) {
            let res = check_exact(&alg, &task, &u, TOL).unwrap();
            assert!(res.achieved, "d={d} residual {}", res.residual);
            let dt = det(&u).unwrap();
            assert!((C64::from_polar(1.0, res.phase.unwrap()) - dt.conj()).norm() < 1e-8);
            assert!((res.success_prob - 1.0).abs() < 1e-10);
            assert!((res.garbage[0] - dt).norm() < 1e-9);
            for b in 0..alg.layout().dim_of(alg.input_register()) {
                let psi: Vec<C64> = (0..2 * d).map(|k| if k == b { ONE } else { ZERO }).collect();
                assert!((success_prob(&alg, &u, &psi).unwrap() - 1.0).abs() < 1e-10);
            }
        }
    }
}

#[test]
fn power_examples() {
    let u = haar(2, 7);
    let single = power_cUm(2, 2).unwrap();
    assert!(single.eval(&u).unwrap().approx_eq(&dong_cUd(2).unwrap().eval(&u).unwrap(), 1e-12));

    let res = check_exact(&power_cUm(2, 4).unwrap(), &Task::c_um(2, 4).unwrap(), &u, TOL).unwrap();
    assert!(res.achieved);

    let theta = 0.4;
    let alg = power_cUm(2, -2).unwrap();
    assert_eq!(alg.static_degree(), -2);
    let res = check_exact(&alg, &Task::c_um(2, -2).unwrap(), &diag_phase(2, theta), TOL).unwrap();
    assert!(res.achieved);
    let wrong = check_exact(&alg, &Task::c_um(2, 2).unwrap(), &diag_phase(2, theta), TOL).unwrap();
    assert!(!wrong.achieved);
}

#[test]
fn power_rejects_non_multiples() {
    let err = power_cUm(2, 3).unwrap_err().to_string();
    assert!(err.contains("d ∤ m"), "{err}");
    assert!(power_cUm(3, 4).is_err());
    assert!(power_cUm(2, 0).is_err());
    assert!(power_cUm(2, 10).is_err());
}

#[test]
fn positive_dichotomy_branch() {
    for d in 2..=3 {
        for m in [d as i32, 2 * d as i32, -(d as i32)] {
            let alg = power_cUm(d, m).unwrap();
            let task = Task::c_um(d, m).unwrap();
            for u in haar_list(d, 20, 11) {
                assert!(check_exact(&alg, &task, &u, TOL).unwrap().achieved, "d={d} m={m}");
            }
        }
    }
}

#[test]
fn conjugation_two_is_encoder_sandwich() {
    let alg = conjugation(2).unwrap();
    let e = CMatrix::from_real(2, 2, &[0.0, -1.0, 1.0, 0.0]).unwrap();
    assert!(alg.eval(&CMatrix::identity(2)).unwrap().approx_eq(&CMatrix::identity(2), 1e-14));
    for u in haar_list(2, 10, 4) {
        let a = alg.eval(&u).unwrap();
        assert!(a.approx_eq(&(&(&e.adjoint() * &u) * &e), 1e-12));
        assert!(a.approx_eq(&cofactor_matrix(&u).unwrap(), 1e-12));
    }
}

#[test]
fn conjugation_three_is_clean_and_exact() {
    let alg = conjugation(3).unwrap();
    let task = Task::new(3, TaskKind::Conjugation).unwrap();
    let us = haar_list(3, 20, 5);
    for u in &us {
        let res = check_exact(&alg, &task, u, TOL).unwrap();
        assert!(res.achieved);
        assert!((res.success_prob - 1.0).abs() < 1e-10);
        assert!((res.garbage[0] - det(u).unwrap()).norm() < 1e-9);
    }
    assert!(check_clean(&alg, &task, &us, TOL).unwrap().clean);
}

#[test]
fn transpose_examples() {
    for d in 2..=3 {
        let alg = transpose_via_teleport(d).unwrap();
        let task = Task::new(d, TaskKind::Transpose).unwrap();
        let map = RestrictedMap::compute(&alg, &CMatrix::identity(d)).unwrap();
        let g = map.garbage_for(&CMatrix::identity(d));
        assert!(map.residual(&CMatrix::identity(d), &g) < 1e-12);
        let g_norm: f64 = g.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        assert!((g_norm - 1.0 / d as f64).abs() < 1e-12);
        for u in haar_list(d, 20, 6) {
            let res = check_exact(&alg, &task, &u, TOL).unwrap();
            assert!(res.achieved);
            assert!((res.success_prob - 1.0 / (d * d) as f64).abs() < 1e-10);
            for b in 0..d {
                let psi: Vec<C64> = (0..d).map(|k| if k == b { ONE } else { ZERO }).collect();
                assert!((success_prob(&alg, &u, &psi).unwrap() - 1.0 / (d * d) as f64).abs() < 1e-10);
            }
        }
    }
    let h = gates::hadamard();
    let alg = transpose_via_teleport(2).unwrap();
    let res = check_exact(&alg, &Task::new(2, TaskKind::Power { q: 1 }).unwrap(), &h, TOL).unwrap();
    assert!(res.achieved);
}

#[test]
fn inverse_examples() {
    for d in 2..=3 {
        let alg = inverse(d).unwrap();
        assert_eq!(alg.static_degree(), d as i32 - 1);
        assert_eq!(alg.query_count() as i32 % d as i32, d as i32 - 1);
        let task = Task::new(d, TaskKind::Inverse).unwrap();
        let map = RestrictedMap::compute(&alg, &CMatrix::identity(d)).unwrap();
        let g = map.garbage_for(&CMatrix::identity(d));
        assert!(map.residual(&CMatrix::identity(d), &g) < 1e-12);
        let us = haar_list(d, 10, 7);
        for u in &us {
            let res = check_exact(&alg, &task, u, TOL).unwrap();
            assert!(res.achieved, "d={d}");
            assert!((res.success_prob - 1.0 / (d * d) as f64).abs() < 1e-10);
        }
        assert!(check_clean(&alg, &task, &us, TOL).unwrap().clean);
    }
    assert!(inverse(4).is_err());
}

#[test]
fn spin_echo_achieves_with_teleportation_probability() {
    for d in 2..=3 {
        let alg = spin_echo_cUd(d).unwrap();
        let task = Task::c_um(d, d as i32).unwrap();
        let n = alg.layout().total_dim();
        let out = alg.eval(&CMatrix::identity(d)).unwrap();
        assert!(out.frobenius_norm() > 0.0 && n > 0);
        for u in haar_list(d, 10, 8) {
            let res = check_exact(&alg, &task, &u, TOL).unwrap();
            assert!(res.achieved, "d={d} residual {}", res.residual);
            assert!((res.success_prob - 1.0 / (d * d) as f64).abs() < 1e-10);
            let dt = det(&u).unwrap();
            assert!((C64::from_polar(1.0, res.phase.unwrap()) - dt.conj()).norm() < 1e-8);
        }
    }
}

#[test]
fn spin_echo_at_identity_is_scaled_identity() {
    for d in 2..=3 {
        let alg = spin_echo_cUd(d).unwrap();
        let map = RestrictedMap::compute(&alg, &CMatrix::identity(d)).unwrap();
        let t = CMatrix::identity(2 * d);
        let g = map.garbage_for(&t);
        assert!(map.residual(&t, &g) < 1e-12);
        let p: f64 = g.iter().map(|z| z.norm_sqr()).sum();
        assert!((p - 1.0 / (d * d) as f64).abs() < 1e-12);
    }
}

#[test]
fn composed_root_away_from_the_cut() {
    let alg = composed_principal_root(2).unwrap();
    let task = Task::c_um(2, 1).unwrap().with_alphabet(&["root"]);
    let u = diag_phase(2, 0.2);
    let res = check_exact(&alg, &task, &u, TOL).unwrap();
    assert!(res.achieved);
    // root = diag(1, e^{0.1i}) so φ = −0.1
    assert!((res.phase.unwrap() + 0.1).abs() < 1e-9);
    let n = alg.layout().total_dim();
    assert!(alg.eval(&CMatrix::identity(2)).unwrap().approx_eq(&CMatrix::identity(n), 1e-12));
    assert_eq!(alg.alphabet(), vec!["root".to_string()]);
    assert!(check_exact(&alg, &Task::c_um(2, 1).unwrap(), &u, TOL).is_err());
}

#[test]
fn composed_root_rejects_non_roots() {
    let bad = composed_root_cU(2, std::sync::Arc::new(|u: &CMatrix| Ok(u.clone()))).unwrap();
    assert!(bad.eval(&diag_phase(2, 0.5)).is_err());
}

#[test]
fn static_degrees_match_numeric_degrees() {
    for d in 2..=3 {
        for (alg, degree) in suite(d).unwrap() {
            assert_eq!(alg.static_degree(), degree, "{}", alg.name());
            let u = haar(d, 40 + d as u64);
            for lambda in checks::random_phases(3, 9) {
                let r = numeric_homogeneity_check(&alg, &u, lambda, degree).unwrap();
                assert!(r < 1e-9, "{} residual {r}", alg.name());
            }
        }
    }
}

#[test]
fn suite_is_structurally_valid() {
    for d in 2..=4 {
        for (alg, _) in suite(d).unwrap() {
            alg.validate().unwrap();
        }
    }
    assert!(by_name("nope", 2, None).is_err());
    assert!(by_name("power", 2, None).is_err());
    assert_eq!(by_name("kitaev", 3, None).unwrap().query_count(), 1);
    assert_eq!(by_name("dong", 2, None).unwrap().query_count(), 2);
}
