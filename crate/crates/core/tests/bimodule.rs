mod common;

use std::sync::Arc;

use common::*;
use groupoidal_core::algebra::AlgebraElement;
use groupoidal_core::bimodule::*;
use groupoidal_core::cocycle::{evolve, kernel_subgroupoid, Cocycle, KernelGroupoid};
use groupoidal_core::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use groupoidal_core::linalg::{hermitian_eigenvalues, to_c64_matrix};
use groupoidal_core::measures::to_float;
use groupoidal_core::sample;
use groupoidal_core::scalar::{real, RealScalar};
use groupoidal_core::Error;
use num_complex::Complex;
use proptest::prelude::*;

const W: Window = Window::new(3);

fn module<R: RealScalar>(g: &Arc<DiscreteGroupoid>, c: Cocycle<R>) -> Arc<KernelGroupoid<R>> {
    Arc::new(kernel_subgroupoid(g, &c))
}

fn random_module(k: &Arc<KernelGroupoid<Q>>, rng: &mut rand_chacha::ChaCha8Rng) -> ModuleElement<Q> {
    ModuleElement::new(sample::element(k.parent(), W, 4, rng), k).unwrap()
}

fn random_kernel_element(k: &Arc<KernelGroupoid<Q>>, rng: &mut rand_chacha::ChaCha8Rng) -> AlgebraElement<Q> {
    sample::element_where(k.parent(), W, 3, rng, |m| k.contains(m))
}

#[test]
fn identity_acts_trivially() {
    let k = module(&three_cycle(), Cocycle::degree());
    let mut r = rng(1);
    let phi = random_module(&k, &mut r);
    let one = AlgebraElement::identity(k.parent().clone());
    assert_eq!(act_left(&one, &phi).unwrap(), phi);
    assert_eq!(act_right(&phi, &one.restrict(|m| k.contains(m))).unwrap(), phi);
}

#[test]
fn deltas_multiply() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<Q>::degree());
    let (a, b) = (Morphism::Trans(UnitId(0), 2), Morphism::Trans(UnitId(2), -1));
    let da = AlgebraElement::delta(g.clone(), a).unwrap();
    let db = ModuleElement::new(AlgebraElement::delta(g.clone(), b).unwrap(), &k).unwrap();
    let ab = g.compose(a, b).unwrap().unwrap();
    assert_eq!(act_left(&da, &db).unwrap().function(), &AlgebraElement::delta(g.clone(), ab).unwrap());
    let not_composable = ModuleElement::new(AlgebraElement::delta(g.clone(), Morphism::Trans(UnitId(1), 0)).unwrap(), &k).unwrap();
    assert!(act_left(&da, &not_composable).unwrap().is_zero());
}

#[test]
fn actions_associate_and_commute() {
    for g in [three_cycle(), deaconu()] {
        let k = module(&g, Cocycle::<Q>::degree());
        let mut r = rng(2);
        for _ in 0..50 {
            let f: AlgebraElement<Q> = sample::element(&g, W, 3, &mut r);
            let h: AlgebraElement<Q> = sample::element(&g, W, 3, &mut r);
            let phi = random_module(&k, &mut r);
            let lhs = act_left(&f.convolve(&h).unwrap(), &phi).unwrap();
            let rhs = act_left(&f, &act_left(&h, &phi).unwrap()).unwrap();
            assert_eq!(lhs, rhs);

            let x = random_kernel_element(&k, &mut r);
            let lhs = act_right(&act_left(&f, &phi).unwrap(), &x).unwrap();
            let rhs = act_left(&f, &act_right(&phi, &x).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn right_action_on_unit_kernel_is_scaling() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<Q>::degree());
    let mut r = rng(3);
    let phi = random_module(&k, &mut r);
    let h = AlgebraElement::from_terms(g.clone(), g.units().map(|x| (g.unit(x), real(q(x.0 as i64 + 2, 3))))).unwrap();
    let out = act_right(&phi, &h).unwrap();
    for (z, v) in phi.function().iter() {
        let scale = h.get(g.unit(g.source(z).unwrap()));
        assert_eq!(out.get(z), v.clone() * scale);
    }
}

#[test]
fn right_action_rejects_outside_kernel() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<Q>::degree());
    let phi = ModuleElement::zero(&k);
    let bad = AlgebraElement::delta(g, Morphism::Trans(UnitId(0), 1)).unwrap();
    assert_eq!(act_right(&phi, &bad), Err(Error::OutsideKernel(Morphism::Trans(UnitId(0), 1))));
}

#[test]
fn delta_inner_product() {
    let g = deaconu();
    let k = module(&g, Cocycle::<Q>::degree());
    for xi in g.morphisms(Window::new(2)) {
        let d = ModuleElement::new(AlgebraElement::delta(g.clone(), xi).unwrap(), &k).unwrap();
        let ip = inner_product_h(&d, &d).unwrap();
        assert_eq!(ip, AlgebraElement::delta(g.clone(), g.unit(g.source(xi).unwrap())).unwrap());
    }
}

#[test]
fn inner_product_is_positive() {
    for g in [three_cycle(), deaconu(), integers()] {
        let k = module(&g, Cocycle::<Q>::degree());
        let mut r = rng(4);
        for _ in 0..30 {
            let phi = random_module(&k, &mut r);
            let ip = inner_product_h(&phi, &phi).unwrap();
            for u in g.units() {
                let rep = ip.regular_rep(u, Window::new(6)).unwrap();
                let spectrum = hermitian_eigenvalues(&to_c64_matrix(&rep.matrix));
                assert!(spectrum.iter().all(|&v| v >= -1e-10), "{spectrum:?}");
            }
        }
    }
}

#[test]
fn inner_product_choice_independence() {
    // exhaustive over the window: every z with d(z) = r(χ)
    let g = deaconu();
    let k = module(&g, Cocycle::<Q>::degree());
    let mut r = rng(5);
    let (phi, psi) = (random_module(&k, &mut r), random_module(&k, &mut r));
    let ip = inner_product_h(&phi, &psi).unwrap();
    for chi in g.morphisms(Window::new(3)).into_iter().filter(|&m| k.contains(m)) {
        for z in g.source_fiber(g.range(chi).unwrap(), Window::new(3)) {
            assert_eq!(inner_product_h_at(&phi, &psi, chi, z).unwrap(), ip.get(chi), "χ = {chi}, z = {z}");
        }
    }
}

#[test]
fn inner_product_symmetry_and_linearity() {
    let g = deaconu();
    let k = module(&g, Cocycle::<Q>::degree());
    let mut r = rng(6);
    for _ in 0..50 {
        let (phi, psi) = (random_module(&k, &mut r), random_module(&k, &mut r));
        assert_eq!(inner_product_h(&phi, &psi).unwrap().involute(), inner_product_h(&psi, &phi).unwrap());
        let h = random_kernel_element(&k, &mut r);
        let lhs = inner_product_h(&phi, &act_right(&psi, &h).unwrap()).unwrap();
        let rhs = inner_product_h(&phi, &psi).unwrap().convolve(&h).unwrap();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn g_valued_inner_product() {
    let g: Arc<DiscreteGroupoid> = Arc::new(groupoidal_core::groupoid::FiniteGroupoid::cyclic_group(6).unwrap().into());
    let k = module(&g, Cocycle::<Q>::zero(1));
    for xi in g.morphisms(Window::new(0)) {
        let d = ModuleElement::new(AlgebraElement::delta(g.clone(), xi).unwrap(), &k).unwrap();
        let ip = inner_product_g(&d, &d, Window::new(0)).unwrap();
        assert_eq!(ip, AlgebraElement::delta(g.clone(), g.unit(g.range(xi).unwrap())).unwrap());
    }
    let zero = ModuleElement::zero(&k);
    let mut r = rng(7);
    let phi = ModuleElement::new(sample::element(&g, W, 3, &mut r), &k).unwrap();
    assert!(inner_product_g(&zero, &phi, W).unwrap().is_zero());
}

#[test]
fn inner_products_are_compatible() {
    for g in [pair(3), three_cycle()] {
        let k = module(&g, Cocycle::<Q>::zero(g.unit_count()));
        let mut r = rng(8);
        for _ in 0..50 {
            let (phi, psi, theta) = (random_module(&k, &mut r), random_module(&k, &mut r), random_module(&k, &mut r));
            let lhs = act_left(&inner_product_g(&phi, &psi, W).unwrap(), &theta).unwrap();
            let rhs = act_right(&phi, &inner_product_h(&psi, &theta).unwrap()).unwrap();
            assert_eq!(lhs, rhs);
        }
    }
}

#[test]
fn g_valued_needs_transitivity() {
    let k = module(&three_cycle(), Cocycle::<Q>::degree());
    let phi = ModuleElement::zero(&k);
    assert!(matches!(inner_product_g(&phi, &phi, W), Err(Error::InnerProductUndefined(_))));
}

#[test]
fn d_on_integers_is_multiplication_by_n() {
    let g = integers();
    let k = module(&g, Cocycle::<Q>::degree());
    let d = OperatorD::new(&k);
    for n in -5..=5 {
        let m = Morphism::Trans(UnitId(0), n);
        let delta = ModuleElement::new(AlgebraElement::delta(g.clone(), m).unwrap(), &k).unwrap();
        assert_eq!(apply_d(&d, &delta).unwrap(), delta.scale(&real(q(n, 1))));
    }
    let unit = ModuleElement::new(AlgebraElement::identity(g.clone()), &k).unwrap();
    assert!(apply_d(&d, &unit).unwrap().is_zero());
}

#[test]
fn d_is_symmetric_derivation() {
    for g in [integers(), three_cycle(), deaconu()] {
        let k = module(&g, Cocycle::<Q>::degree());
        let d = OperatorD::new(&k);
        let mut r = rng(9);
        for _ in 0..100 {
            let f: AlgebraElement<Q> = sample::element(&g, W, 4, &mut r);
            let (phi, psi) = (random_module(&k, &mut r), random_module(&k, &mut r));
            let lhs = apply_d(&d, &act_left(&f, &phi).unwrap()).unwrap();
            let rhs = act_left(&derive(&d, &f).unwrap(), &phi)
                .unwrap()
                .plus(&act_left(&f, &apply_d(&d, &phi).unwrap()).unwrap())
                .unwrap();
            assert_eq!(lhs, rhs);
            let a = inner_product_h(&apply_d(&d, &phi).unwrap(), &psi).unwrap();
            let b = inner_product_h(&phi, &apply_d(&d, &psi).unwrap()).unwrap();
            assert_eq!(a, b);
            let h = random_kernel_element(&k, &mut r);
            assert_eq!(apply_d(&d, &act_right(&phi, &h).unwrap()).unwrap(), act_right(&apply_d(&d, &phi).unwrap(), &h).unwrap());
        }
    }
}

#[test]
fn transforms_on_kernel_support() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<Q>::degree());
    let d = OperatorD::new(&k);
    let phi = ModuleElement::new(AlgebraElement::identity(g.clone()).scale(&Complex::new(q(2, 1), q(-1, 3))), &k).unwrap();
    assert_eq!(transform_d(&d, &phi, Transform::Resolvent).unwrap(), phi);
    assert!(transform_d(&d, &phi, Transform::Bounded).unwrap().is_zero());
    assert_eq!(transform_d(&d, &phi, Transform::Cayley).unwrap(), phi.scale(&real(q(-1, 1))));
}

#[test]
fn cayley_is_unitary_exactly() {
    let g = deaconu();
    let k = module(&g, Cocycle::<Q>::degree());
    let d = OperatorD::new(&k);
    let mut r = rng(10);
    for _ in 0..50 {
        let (phi, psi) = (random_module(&k, &mut r), random_module(&k, &mut r));
        let a = transform_d(&d, &phi, Transform::Cayley).unwrap();
        let b = transform_d(&d, &psi, Transform::Cayley).unwrap();
        assert_eq!(inner_product_h(&a, &b).unwrap(), inner_product_h(&phi, &psi).unwrap());
    }
}

#[test]
fn bounded_and_resolvent_squares_sum_to_one() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<f64>::degree());
    let d = OperatorD::new(&k);
    let mut r = rng(11);
    let phi = ModuleElement::new(sample::element(&g, Window::new(6), 8, &mut r), &k).unwrap();
    let twice = |t| transform_d(&d, &transform_d(&d, &phi, t).unwrap(), t).unwrap();
    let sum = twice(Transform::Bounded).plus(&twice(Transform::Resolvent)).unwrap();
    assert!(sum.approx_eq(&phi, 1e-12));
    let exact = module(&g, Cocycle::<Q>::degree());
    let psi = ModuleElement::new(AlgebraElement::delta(g.clone(), Morphism::Trans(UnitId(0), 2)).unwrap(), &exact).unwrap();
    assert!(matches!(transform_d(&OperatorD::new(&exact), &psi, Transform::Resolvent), Err(Error::Inexact(_))));
}

#[test]
fn cutoff_matches_resolvent_on_covered_window() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<Q>::degree());
    let d = OperatorD::new(&k);
    let mut r = rng(12);
    for _ in 0..20 {
        let f: AlgebraElement<Q> = sample::element(&g, W, 4, &mut r);
        let psi = random_module(&k, &mut r);
        let approx = cutoff_approximant(&f, &d, 3).unwrap();
        let direct = act_left(&f, &transform_d(&d, &psi, Transform::ResolventSquared).unwrap()).unwrap();
        assert_eq!(approx.apply(&psi).unwrap(), direct);
    }
}

#[test]
fn cutoff_at_zero_sees_only_kernel_class() {
    let g = integers();
    let k = module(&g, Cocycle::<Q>::degree());
    let d = OperatorD::new(&k);
    let f = AlgebraElement::identity(g.clone()).scale(&real(q(5, 2)));
    let approx = cutoff_approximant(&f, &d, 0).unwrap();
    assert_eq!(approx.entries().len(), 1);
    assert_eq!(approx.entries()[0].class.value, q(0, 1));
    let psi = ModuleElement::new(
        AlgebraElement::from_terms(g.clone(), (-2..=2).map(|n| (Morphism::Trans(UnitId(0), n), real(q(1, 1))))).unwrap(),
        &k,
    )
    .unwrap();
    let out = approx.apply(&psi).unwrap();
    assert_eq!(out.function().len(), 1);
    assert_eq!(out.get(Morphism::Trans(UnitId(0), 0)), real(q(5, 2)));
}

#[test]
fn cutoffs_are_cauchy() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<f64>::degree());
    let d = OperatorD::new(&k);
    let mut r = rng(13);
    let f: AlgebraElement<f64> = sample::element(&g, W, 5, &mut r);
    let cut: Vec<_> = (0..=10).map(|m| cutoff_approximant(&f, &d, m).unwrap()).collect();
    for m in 1..10 {
        for n in m + 1..=10 {
            let diff = cut[n as usize].minus(&cut[m as usize]).i_norm().unwrap();
            assert!(diff <= f.i_norm() / (1.0 + (m * m) as f64) + 1e-15);
        }
    }
}

#[test]
fn rho_basics() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<Q>::degree());
    let unit_supported = ModuleElement::new(AlgebraElement::identity(g.clone()), &k).unwrap();
    assert_eq!(spectral_projection_rho(0, &unit_supported).unwrap(), unit_supported);
    assert!(spectral_projection_rho(2, &unit_supported).unwrap().is_zero());

    let mut r = rng(14);
    for _ in 0..30 {
        let (phi, psi) = (random_module(&k, &mut r), random_module(&k, &mut r));
        let mut total = ModuleElement::zero(&k);
        for j in -3..=3 {
            let p = spectral_projection_rho(j, &phi).unwrap();
            assert_eq!(spectral_projection_rho(j, &p).unwrap(), p);
            let a = inner_product_h(&p, &psi).unwrap();
            let b = inner_product_h(&phi, &spectral_projection_rho(j, &psi).unwrap()).unwrap();
            assert_eq!(a, b);
            total = total.plus(&p).unwrap();
        }
        assert_eq!(total, phi);
    }
    let frac = module(&g, Cocycle::potential(vec![q(0, 1), q(1, 2), q(1, 1)]));
    assert_eq!(spectral_projection_rho(0, &ModuleElement::zero(&frac)), Err(Error::NotIntegral));
}

#[test]
fn rho_eigenspace_and_quadrature() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<f64>::degree());
    let mut r = rng(15);
    for _ in 0..20 {
        let phi = ModuleElement::new(sample::element(&g, Window::new(5), 6, &mut r), &k).unwrap();
        let t = sample::small_real::<f64, _>(&mut r);
        for j in -5..=5 {
            let exact = spectral_projection_rho(j, &phi).unwrap();
            assert!(rho_by_quadrature(j, &phi, 64).unwrap().approx_eq(&exact, 1e-12));
            let lhs = spectral_projection_rho(j, &phi.evolve(&Complex::new(t, 0.0)).unwrap()).unwrap();
            let rhs = exact.scale(&Complex::new(0.0, j as f64 * t).exp());
            assert!(lhs.approx_eq(&rhs, 1e-12));
        }
    }
}

#[test]
fn ssa_witness_acts_as_f_rho() {
    let g = deaconu();
    let k = module(&g, Cocycle::<Q>::degree());
    let mut r = rng(16);
    for _ in 0..50 {
        let f: AlgebraElement<Q> = sample::element(&g, W, 3, &mut r);
        let psi = random_module(&k, &mut r);
        let j = rand::Rng::random_range(&mut r, -3..=3);
        let witness = ssa_witness(&f, j, &k).unwrap();
        let direct = act_left(&f, &spectral_projection_rho(j, &psi).unwrap()).unwrap();
        assert_eq!(witness.apply(&psi).unwrap(), direct);
    }
}

#[test]
fn ssa_witness_outside_reachable_classes() {
    let g = pair(3);
    let k = module(&g, Cocycle::potential(vec![q(0, 1), q(1, 1), q(3, 1)]));
    let f = AlgebraElement::identity(g.clone());
    assert!(ssa_witness(&f, 7, &k).unwrap().is_zero());
    let kernel_part = ssa_witness(&f, 0, &k).unwrap();
    let psi = ModuleElement::new(AlgebraElement::identity(g.clone()), &k).unwrap();
    assert_eq!(kernel_part.apply(&psi).unwrap(), psi);
}

#[test]
fn covariance_and_equivariance() {
    let g = three_cycle();
    let c = Cocycle::<f64>::degree();
    let k = module(&g, c.clone());
    let d = OperatorD::new(&k);
    let mut r = rng(17);
    for _ in 0..30 {
        let f: AlgebraElement<f64> = sample::element(&g, W, 4, &mut r);
        let h: AlgebraElement<f64> = sample::element(&g, W, 4, &mut r);
        let t = Complex::new(sample::small_real::<f64, _>(&mut r), 0.0);
        let lhs = evolve(&f.convolve(&evolve(&h, &c, &-t).unwrap()).unwrap(), &c, &t).unwrap();
        let rhs = evolve(&f, &c, &t).unwrap().convolve(&h).unwrap();
        assert!(lhs.approx_eq(&rhs, 1e-12));

        let (phi, psi) = (ModuleElement::new(f.clone(), &k).unwrap(), ModuleElement::new(h.clone(), &k).unwrap());
        let a = inner_product_h(&phi.evolve(&t).unwrap(), &psi.evolve(&t).unwrap()).unwrap();
        assert!(a.approx_eq(&inner_product_h(&phi, &psi).unwrap(), 1e-12));

        let du = apply_d(&d, &phi.evolve(&t).unwrap()).unwrap();
        let ud = apply_d(&d, &phi).unwrap().evolve(&t).unwrap();
        assert!(du.approx_eq(&ud, 1e-12));

        let commutator = apply_d(&d, &act_left(&h, &phi).unwrap())
            .unwrap()
            .minus(&act_left(&h, &apply_d(&d, &phi).unwrap()).unwrap())
            .unwrap();
        assert!(commutator.approx_eq(&act_left(&derive(&d, &h).unwrap(), &phi).unwrap(), 1e-12));
    }
}

#[test]
fn float_and_exact_agree() {
    let g = three_cycle();
    let k = module(&g, Cocycle::<Q>::degree());
    let kf = module(&g, Cocycle::<f64>::degree());
    let mut r = rng(18);
    let (phi, psi) = (random_module(&k, &mut r), random_module(&k, &mut r));
    let exact = to_float(&inner_product_h(&phi, &psi).unwrap());
    let float = inner_product_h(
        &ModuleElement::new(to_float(phi.function()), &kf).unwrap(),
        &ModuleElement::new(to_float(psi.function()), &kf).unwrap(),
    )
    .unwrap();
    assert!(exact.approx_eq(&float, 1e-12));
}

proptest! {
    #[test]
    fn derivation_identity_on_any_seed(seed in any::<u64>()) {
        let g = deaconu();
        let k = module(&g, Cocycle::<Q>::degree());
        let d = OperatorD::new(&k);
        let mut r = rng(seed);
        let f: AlgebraElement<Q> = sample::element(&g, W, 4, &mut r);
        let phi = random_module(&k, &mut r);
        let lhs = apply_d(&d, &act_left(&f, &phi).unwrap()).unwrap();
        let rhs = act_left(&derive(&d, &f).unwrap(), &phi).unwrap().plus(&act_left(&f, &apply_d(&d, &phi).unwrap()).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn cayley_preserves_inner_product(seed in any::<u64>()) {
        let g = three_cycle();
        let k = module(&g, Cocycle::<Q>::degree());
        let d = OperatorD::new(&k);
        let mut r = rng(seed);
        let (phi, psi) = (random_module(&k, &mut r), random_module(&k, &mut r));
        let a = transform_d(&d, &phi, Transform::Cayley).unwrap();
        let b = transform_d(&d, &psi, Transform::Cayley).unwrap();
        prop_assert_eq!(inner_product_h(&a, &b).unwrap(), inner_product_h(&phi, &psi).unwrap());
    }
}
