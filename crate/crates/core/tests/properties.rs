mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use wandergen::fiberization::{gram_fibers, riesz_bounds, synthesize, CoefficientArray, Family, Tolerances};
use wandergen::group_model::{
    convolve, fourier, inverse_fourier, modulate, translate, GroupSpec, GroupVector, SystemSpace,
};
use wandergen::linalg::{c, hermitian_eigenvalues, max_abs, polar_unitary, random_matrix, random_unitary, CMat};
use wandergen::nonabelian::{
    are_equivalent, character, intertwiner_basis, intertwining_residual, irreducible_representations, FiniteGroup,
    Representation,
};
use wandergen::oblique::{oblique_projector, ObliqueSplit};
use wandergen::oracle::{dense_oblique_projector, dense_orbit_gram, dense_translation};

fn close(a: &[wandergen::linalg::CVec], b: &[wandergen::linalg::CVec], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).norm() <= tol)
}

fn vectors_close(a: &GroupVector, b: &GroupVector, tol: f64) -> bool {
    let mut d = a.clone();
    d.axpy(c(-1.0, 0.0), b);
    d.norm() <= tol
}

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        failure_persistence: None,
        ..ProptestConfig::default()
    }
}

fn exact_space(seed: u64, m: usize) -> SystemSpace {
    let mut r = rng(seed);
    SystemSpace::new(random_group(&mut r), m).unwrap()
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn fourier_is_unitary_and_inverts(seed in any::<u64>(), m in 1usize..4) {
        let space = exact_space(seed, m);
        let mut r = rng(seed ^ 1);
        let v = random_vector(&mut r, &space);
        let f = fourier(&v).unwrap();
        let energy: f64 = f.iter().map(|x| x.norm_squared()).sum();
        prop_assert!((energy - v.norm_squared()).abs() <= 1e-10 * v.norm_squared().max(1.0));
        prop_assert!(vectors_close(&inverse_fourier(&space, &f).unwrap(), &v, 1e-10));
    }

    #[test]
    fn translation_becomes_modulation(seed in any::<u64>(), m in 1usize..3) {
        let space = exact_space(seed, m);
        let mut r = rng(seed ^ 2);
        let v = random_vector(&mut r, &space);
        let g = r.random_range(0..space.group.order().unwrap() as i64);
        let lhs = fourier(&translate(g, &v)).unwrap();
        let rhs = modulate(&space.group, g, &fourier(&v).unwrap());
        prop_assert!(close(&lhs, &rhs, 1e-10));
    }

    #[test]
    fn convolution_theorem(seed in any::<u64>(), m in 1usize..3) {
        let space = exact_space(seed, m);
        let n = space.group.order().unwrap() as f64;
        let mut r = rng(seed ^ 3);
        let a = random_vector(&mut r, &space);
        let b = random_vector(&mut r, &space);
        let lhs = fourier(&convolve(&a, &b).unwrap()).unwrap();
        let (fa, fb) = (fourier(&a).unwrap(), fourier(&b).unwrap());
        let rhs: Vec<_> = fa.iter().zip(&fb).map(|(x, y)| x.component_mul(y) * c(n.sqrt(), 0.0)).collect();
        prop_assert!(close(&lhs, &rhs, 1e-9));
    }

    #[test]
    fn shift_transform_on_adequate_grid(seed in any::<u64>(), width in 1usize..6) {
        let space = SystemSpace::new(GroupSpec::integer_shift(4 * width).unwrap(), 2).unwrap();
        let mut r = rng(seed);
        let start = r.random_range(-5i64..5);
        let mut v = GroupVector::zero(&space);
        for k in 0..width as i64 {
            v.add(start + k, r.random_range(0..2), complex(&mut r)).unwrap();
        }
        let f = fourier(&v).unwrap();
        let mean: f64 = f.iter().map(|x| x.norm_squared()).sum::<f64>() / f.len() as f64;
        prop_assert!((mean - v.norm_squared()).abs() <= 1e-10 * v.norm_squared().max(1.0));
        let g = r.random_range(-7i64..7);
        let shifted = fourier(&translate(g, &v)).unwrap();
        prop_assert!(close(&shifted, &modulate(&space.group, g, &f), 1e-10));
    }

    #[test]
    fn synthesis_respects_riesz_bounds(seed in any::<u64>(), m in 1usize..4) {
        let space = exact_space(seed, m);
        let mut r = rng(seed ^ 4);
        let k = r.random_range(1..=m);
        let x = random_family(&mut r, &space, k);
        let tol = Tolerances::for_space(&space);
        let Ok(b) = riesz_bounds(&x.fibers().unwrap(), &tol) else { return Ok(()) };
        let mut a = CoefficientArray::new();
        for g in space.group.elements().unwrap() {
            for j in 0..k {
                if r.random_bool(0.5) {
                    a.insert(g, j, complex(&mut r));
                }
            }
        }
        let energy = synthesize(&x, &a).unwrap().norm_squared();
        let coeff = a.norm_squared();
        prop_assert!(energy >= b.lower * coeff - 1e-9 * coeff.max(1.0));
        prop_assert!(energy <= b.upper * coeff + 1e-9 * coeff.max(1.0));
    }

    #[test]
    fn orbit_gram_spectrum_is_union_of_fiber_spectra(seed in any::<u64>(), m in 1usize..3) {
        let space = exact_space(seed, m);
        let mut r = rng(seed ^ 5);
        let k = r.random_range(1..=2);
        let x = random_family(&mut r, &space, k);
        let mut fiber_eigs: Vec<f64> = gram_fibers(&x.fibers().unwrap())
            .unwrap()
            .matrices
            .iter()
            .flat_map(hermitian_eigenvalues)
            .collect();
        fiber_eigs.sort_by(f64::total_cmp);
        let dense_eigs = hermitian_eigenvalues(&dense_orbit_gram(&x).unwrap());
        prop_assert_eq!(fiber_eigs.len(), dense_eigs.len());
        for (a, b) in fiber_eigs.iter().zip(&dense_eigs) {
            prop_assert!((a - b).abs() <= 1e-8 * b.abs().max(1.0));
        }
    }

    #[test]
    fn fiber_oblique_projector_matches_dense(seed in any::<u64>()) {
        let mut r = rng(seed);
        let n = r.random_range(1..=6);
        let m = r.random_range(2..=3);
        let space = cyclic_space(n, m);
        let tol = Tolerances::for_space(&space);
        let x = random_family(&mut r, &space, 1).fibers().unwrap();
        let w = random_family(&mut r, &space, m - 1).fibers().unwrap();
        let full = Family::new(
            &space,
            (0..m).map(|ch| GroupVector::delta(&space, 0, ch).unwrap()).collect(),
        ).unwrap().fibers().unwrap();
        let Ok(split) = ObliqueSplit::new(x.clone(), w.clone(), full, &tol) else { return Ok(()) };
        let p = oblique_projector(&split, &tol).unwrap().dense().unwrap();
        let pd = dense_oblique_projector(&dense(&w), &dense(&x), &tol).unwrap();
        prop_assert!(max_abs(&(&p - &pd)) <= 1e-8 * max_abs(&pd).max(1.0));
        for g in 0..n as i64 {
            let l = dense_translation(&space, g).unwrap();
            prop_assert!(max_abs(&(&p * &l - &l * &p)) <= 1e-8 * max_abs(&p).max(1.0));
        }
    }
}

fn builtin_groups() -> Vec<std::sync::Arc<FiniteGroup>> {
    vec![
        arc(FiniteGroup::symmetric3()),
        arc(FiniteGroup::dihedral4()),
        arc(FiniteGroup::quaternion8()),
    ]
}

/// Random direct sum of irreducibles in a random basis.
fn random_rep<R: Rng>(r: &mut R, g: &std::sync::Arc<FiniteGroup>) -> Representation {
    let irreps = irreducible_representations(g).unwrap();
    let mut rep = Representation::zero_dim(g.clone());
    for _ in 0..r.random_range(1..=3) {
        rep = rep.direct_sum(&irreps[r.random_range(0..irreps.len())].1).unwrap();
    }
    rep.conjugate(&random_unitary(r, rep.dim())).unwrap()
}

proptest! {
    #![proptest_config(config(48))]

    #[test]
    fn equivalence_witnesses_compose(seed in any::<u64>()) {
        let mut r = rng(seed);
        for g in builtin_groups() {
            let a = random_rep(&mut r, &g);
            let b = a.conjugate(&random_unitary(&mut r, a.dim())).unwrap();
            let c3 = b.conjugate(&random_unitary(&mut r, b.dim())).unwrap();
            let ab = are_equivalent(&a, &b, seed).unwrap().unwrap();
            let bc = are_equivalent(&b, &c3, seed).unwrap().unwrap();
            let ba = are_equivalent(&b, &a, seed).unwrap().unwrap();
            for w in [&ab, &bc, &ba] {
                prop_assert!(w.residual <= 1e-9);
                let d = w.matrix.nrows();
                prop_assert!(max_abs(&(w.matrix.adjoint() * &w.matrix - CMat::identity(d, d))) <= 1e-9);
            }
            let composed = &bc.matrix * &ab.matrix;
            prop_assert!(intertwining_residual(&composed, &a, &c3) <= 1e-8);
            prop_assert!(are_equivalent(&a, &a, 0).unwrap().unwrap().residual == 0.0);
        }
    }

    #[test]
    fn intertwiner_space_dimension_is_character_inner_product(seed in any::<u64>()) {
        let mut r = rng(seed);
        for g in builtin_groups() {
            let a = random_rep(&mut r, &g);
            let b = random_rep(&mut r, &g);
            let basis = intertwiner_basis(&a, &b).unwrap();
            let ip = character(&b).inner(&character(&a), &g);
            prop_assert!((ip.re - basis.len() as f64).abs() < 1e-9 && ip.im.abs() < 1e-9);
            prop_assert!(basis.iter().all(|t| t.residual <= 1e-9));
            let same_dim = a.dim() == b.dim();
            let equivalent = same_dim && character(&a).approx_eq(&character(&b), 1e-9);
            prop_assert_eq!(are_equivalent(&a, &b, seed).unwrap().is_some(), equivalent);
        }
    }

    #[test]
    fn polar_factor_of_invertible_intertwiner_intertwines(seed in any::<u64>()) {
        let mut r = rng(seed);
        for g in builtin_groups() {
            let a = random_rep(&mut r, &g);
            let b = a.conjugate(&random_unitary(&mut r, a.dim())).unwrap();
            let basis = intertwiner_basis(&a, &b).unwrap();
            let coeffs = random_matrix(&mut r, basis.len(), 1);
            let mut t = CMat::zeros(b.dim(), a.dim());
            for (k, w) in basis.iter().enumerate() {
                t += &w.matrix * coeffs[(k, 0)];
            }
            prop_assert!(intertwining_residual(&polar_unitary(&t), &a, &b) <= 1e-9);
        }
    }
}

#[test]
fn characters_are_class_functions() {
    let mut r = rng(77);
    for g in builtin_groups() {
        let rep = random_rep(&mut r, &g);
        for cls in g.classes() {
            let t0 = rep.matrix(cls[0]).trace();
            for &x in cls {
                assert!((rep.matrix(x).trace() - t0).norm() <= 1e-10);
            }
        }
    }
}
