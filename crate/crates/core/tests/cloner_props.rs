mod common;

use common::{grid, random_params};
use entcopy::angular::{coupled_basis_matrix, coupled_labels};
use entcopy::cloner::{
    assemble_blocks, assemble_tensor, block_bases, check_inequalities, f_max, f_max_unfolded,
    fidelity_direct, fidelity_formula, optimal_params, oracle_optimize, output_blocks,
    upper_bound_curve, EntanglementClass,
};
use entcopy::linalg::herm_eig;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn class(a: f64) -> EntanglementClass {
    EntanglementClass::new(a).unwrap()
}

#[test]
fn block_and_tensor_assemblies_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let c = class(0.4);
    for _ in 0..50 {
        let p = random_params(&mut rng, 1.0);
        let b = assemble_blocks(c, &p).unwrap();
        let t = assemble_tensor(c, &p).unwrap();
        assert!(b.rho.distance(&t.rho) < 1e-12, "{}", b.rho.distance(&t.rho));
        assert!(b.rho.is_hermitian(1e-13));
        assert!((b.rho.trace().re - 1.0).abs() < 1e-12);
    }
}

#[test]
fn output_has_block_structure() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let block_of: Vec<usize> = {
        let mut v = vec![0; 16];
        for (b, basis) in block_bases().iter().enumerate() {
            for l in basis {
                v[l.position()] = b;
            }
        }
        v
    };
    for a in [0.1, 0.5] {
        let p = random_params(&mut rng, 1.0);
        let rho = assemble_tensor(class(a), &p).unwrap().rho;
        let coupled = coupled_basis_matrix()
            .adjoint()
            .matmul(&rho)
            .matmul(coupled_basis_matrix());
        for r in 0..16 {
            for c in 0..16 {
                if block_of[r] != block_of[c] {
                    assert!(
                        coupled[(r, c)].norm() < 1e-12,
                        "{} {}",
                        coupled_labels()[r],
                        coupled_labels()[c]
                    );
                }
            }
        }
    }
}

#[test]
fn fidelity_formula_matches_expectation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..100 {
        let a = if i % 2 == 0 {
            0.25
        } else {
            0.7 * (i as f64) / 100.0
        };
        let c = class(a);
        let p = random_params(&mut rng, 1.0);
        let direct = fidelity_direct(&assemble_blocks(c, &p).unwrap());
        assert!((direct - fidelity_formula(c, &p)).abs() < 1e-12);
    }
}

/// Every inequality is a necessary condition, so it must hold for each
/// parameter set whose output is a genuine state.
#[test]
fn inequalities_hold_for_positive_outputs() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut accepted = 0;
    let mut tries = 0;
    while accepted < 200 {
        tries += 1;
        assert!(tries < 200_000, "too few positive samples");
        let a = (tries % 71) as f64 / 100.0;
        let c = class(a);
        let p = random_params(&mut rng, 0.6);
        if output_blocks(c, &p).min_eigenvalue().unwrap() < 0.0 {
            continue;
        }
        accepted += 1;
        for check in check_inequalities(c, &p) {
            assert!(
                check.satisfied,
                "{} margin {} at alpha {a}",
                check.id, check.margin
            );
        }
    }
}

#[test]
fn optimum_is_consistent() {
    for a in grid(50) {
        let c = class(a);
        let p = optimal_params(c);
        p.validate().unwrap();
        let out = assemble_blocks(c, &p).unwrap();
        assert!((fidelity_direct(&out) - f_max(c)).abs() < 1e-12);
        assert!((fidelity_formula(c, &p) - f_max(c)).abs() < 1e-12);
        assert!(herm_eig(&out.rho).unwrap().min() >= -1e-12);
        assert!(out.first_copy().distance(&out.second_copy()) < 1e-12);
        let beta = (1.0 - a * a).sqrt();
        assert!((f_max_unfolded(beta).unwrap() - f_max(c)).abs() < 1e-12);
    }
}

#[test]
fn upper_bound_peaks_at_optimum() {
    for a in [0.0, 0.15, 0.3356, 0.5, std::f64::consts::FRAC_1_SQRT_2] {
        let c = class(a);
        let n = 200_000;
        let best = (0..=n)
            .map(|i| upper_bound_curve(c, 16.0 / 9.0 * i as f64 / n as f64).unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert!(
            (best - f_max(c)).abs() < 1e-6,
            "{a}: {best} vs {}",
            f_max(c)
        );
        let at_opt = upper_bound_curve(c, optimal_params(c).re(6)).unwrap();
        assert!((at_opt - f_max(c)).abs() < 1e-12);
    }
    assert!(upper_bound_curve(class(0.3), 2.0).is_err());
}

#[test]
fn oracle_brackets_closed_form() {
    let c = class(0.35);
    let r = oracle_optimize(c, 60).unwrap();
    assert!(r.fidelity <= f_max(c) + 1e-9);
    assert!(r.fidelity >= f_max(c) - 1e-3);
    let out = assemble_blocks(c, &r.params).unwrap();
    assert!(herm_eig(&out.rho).unwrap().min() >= -1e-9);
}
