#![allow(dead_code)]

use std::sync::Arc;

use groupoidal_core::groupoid::{build_deaconu_groupoid, build_transformation_groupoid, cycle, DiscreteGroupoid, FiniteGroupoid};
use groupoidal_core::scalar::{Rational, RealScalar};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Q = Rational;

pub fn q(a: i64, b: i64) -> Q {
    Q::from_ratio(a, b)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// ℤ as the transformation groupoid of a point.
pub fn integers() -> Arc<DiscreteGroupoid> {
    Arc::new(build_transformation_groupoid(vec![0]).unwrap())
}

pub fn swap() -> Arc<DiscreteGroupoid> {
    Arc::new(build_transformation_groupoid(vec![1, 0]).unwrap())
}

pub fn three_cycle() -> Arc<DiscreteGroupoid> {
    Arc::new(build_transformation_groupoid(cycle(3)).unwrap())
}

/// σ = 0→1→2→0 with 3→0, so σ(2) = σ(3).
pub fn deaconu() -> Arc<DiscreteGroupoid> {
    Arc::new(build_deaconu_groupoid(vec![Some(1), Some(2), Some(0), Some(0)]).unwrap())
}

pub fn pair(n: usize) -> Arc<DiscreteGroupoid> {
    Arc::new(FiniteGroupoid::pair(n).unwrap().into())
}

/// pair(2) × ℤ/3, 12 morphisms.
pub fn twelve() -> FiniteGroupoid {
    FiniteGroupoid::pair(2).unwrap().product_with(&FiniteGroupoid::cyclic_group(3).unwrap()).unwrap()
}

pub fn all_models() -> Vec<(&'static str, Arc<DiscreteGroupoid>)> {
    vec![
        ("integers", integers()),
        ("swap", swap()),
        ("three-cycle", three_cycle()),
        ("deaconu", deaconu()),
        ("pair3", pair(3)),
        ("twelve", Arc::new(twelve().into())),
    ]
}
