mod common;

use std::sync::Arc;

use common::*;
use groupoidal_core::algebra::AlgebraElement;
use groupoidal_core::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use groupoidal_core::sample;
use num_complex::Complex;
use proptest::prelude::*;

const W: Window = Window::new(3);

fn triple(g: &Arc<DiscreteGroupoid>, seed: u64) -> [AlgebraElement<Q>; 3] {
    let mut r = rng(seed);
    [(); 3].map(|_| sample::element(g, W, 4, &mut r))
}

#[test]
fn convolution_is_associative_on_every_model() {
    for (name, g) in all_models() {
        for seed in 0..40 {
            let [f, h, k] = triple(&g, seed);
            let lhs = f.convolve(&h).unwrap().convolve(&k).unwrap();
            let rhs = f.convolve(&h.convolve(&k).unwrap()).unwrap();
            assert_eq!(lhs, rhs, "{name}");
        }
    }
}

#[test]
fn involution_is_antimultiplicative() {
    for (name, g) in all_models() {
        for seed in 0..40 {
            let [f, h, _] = triple(&g, seed);
            assert_eq!(f.involute().involute(), f, "{name}");
            let lhs = f.convolve(&h).unwrap().involute();
            let rhs = h.involute().convolve(&f.involute()).unwrap();
            assert_eq!(lhs, rhs, "{name}");
        }
    }
}

#[test]
fn convolution_against_pairwise_oracle() {
    // direct definition: sum over all composable pairs of the two supports
    let g = deaconu();
    for seed in 0..30 {
        let [f, h, _] = triple(&g, seed);
        let mut oracle = AlgebraElement::zero(g.clone());
        for (a, x) in f.iter() {
            for (b, y) in h.iter() {
                if let Some(ab) = g.compose(a, b).unwrap() {
                    oracle.add_at(ab, x * y);
                }
            }
        }
        assert_eq!(f.convolve(&h).unwrap(), oracle);
    }
}

#[test]
fn i_norm_is_submultiplicative() {
    for (name, g) in all_models() {
        for seed in 0..40 {
            let [f, h, _] = triple(&g, seed);
            let lhs = f.convolve(&h).unwrap().i_norm();
            assert!(lhs <= f.i_norm() * h.i_norm() + 1e-12, "{name}");
        }
    }
}

#[test]
fn norm_examples() {
    let g = three_cycle();
    let one = Complex::new(q(1, 1), q(0, 1));
    let f = AlgebraElement::from_terms(
        g.clone(),
        [(Morphism::Trans(UnitId(0), 1), one.clone()), (Morphism::Trans(UnitId(0), 2), one.clone() + one.clone())],
    )
    .unwrap();
    // range fiber of 0 carries both terms; source fibers 1 and 2 one each
    assert_eq!(f.nu_norm(), 3.0);
    assert_eq!(f.nu_inv_norm(), 2.0);
    assert_eq!(f.i_norm(), 3.0);
}

#[test]
fn reduced_lower_bracket_and_monotonicity() {
    for (name, g) in all_models() {
        let mut r = rng(31);
        let sample: Vec<AlgebraElement<f64>> = (0..10).map(|_| sample::element(&g, Window::new(3), 5, &mut r)).collect();
        for f in &sample {
            let mut previous = 0.0;
            for m in [4, 8, 16] {
                let report = f.norms(Window::new(m)).unwrap();
                assert!(report.reduced_lower <= report.i_norm + 1e-9, "{name}");
                assert!(report.reduced_lower + 1e-12 >= previous, "{name}");
                previous = report.reduced_lower;
            }
        }
    }
}

#[test]
fn shift_has_reduced_norm_one() {
    let g = integers();
    let f = AlgebraElement::<f64>::delta(g, Morphism::Trans(UnitId(0), 1)).unwrap();
    let report = f.norms(Window::new(8)).unwrap();
    assert!((report.reduced_lower - 1.0).abs() < 1e-12);
    assert_eq!(report.i_norm, 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distributive(seed in any::<u64>()) {
        let g = three_cycle();
        let [f, h, k] = triple(&g, seed);
        let lhs = f.convolve(&h.plus(&k).unwrap()).unwrap();
        let rhs = f.convolve(&h).unwrap().plus(&f.convolve(&k).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn associative_on_deaconu(seed in any::<u64>()) {
        let g = deaconu();
        let [f, h, k] = triple(&g, seed);
        prop_assert_eq!(
            f.convolve(&h).unwrap().convolve(&k).unwrap(),
            f.convolve(&h.convolve(&k).unwrap()).unwrap()
        );
    }
}
