//! Random test data: morphisms, composable chains, finitely supported
//! elements with small rational coefficients.

use num_complex::Complex;
use rand::Rng;

use crate::algebra::AlgebraElement;
use crate::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use crate::scalar::RealScalar;
use std::sync::Arc;

/// A uniformly chosen unit.
pub fn unit<G: Rng + ?Sized>(g: &DiscreteGroupoid, rng: &mut G) -> UnitId {
    UnitId(rng.random_range(0..g.unit_count()))
}

/// A morphism with `|degree| ≤ M`, chosen by first picking its range.
pub fn morphism<G: Rng + ?Sized>(g: &DiscreteGroupoid, w: Window, rng: &mut G) -> Morphism {
    let fiber = g.range_fiber(unit(g, rng), w);
    fiber[rng.random_range(0..fiber.len())]
}

/// A morphism `b` with `r(b) = u` and `|degree| ≤ M`.
pub fn morphism_from<G: Rng + ?Sized>(g: &DiscreteGroupoid, u: UnitId, w: Window, rng: &mut G) -> Morphism {
    let fiber = g.range_fiber(u, w);
    fiber[rng.random_range(0..fiber.len())]
}

/// A composable chain `a₁, …, a_k` (so `d(aᵢ) = r(aᵢ₊₁)`).
pub fn chain<G: Rng + ?Sized>(g: &DiscreteGroupoid, len: usize, w: Window, rng: &mut G) -> Vec<Morphism> {
    let mut out = Vec::with_capacity(len);
    let mut current = morphism(g, w, rng);
    out.push(current);
    while out.len() < len {
        let u = g.source(current).expect("sampled morphisms are valid");
        current = morphism_from(g, u, w, rng);
        out.push(current);
    }
    out
}

/// `p/q` with `|p| ≤ 5`, `1 ≤ q ≤ 4`.
pub fn small_real<R: RealScalar, G: Rng + ?Sized>(rng: &mut G) -> R {
    R::from_ratio(rng.random_range(-5..=5), rng.random_range(1..=4))
}

pub fn small_complex<R: RealScalar, G: Rng + ?Sized>(rng: &mut G) -> Complex<R> {
    Complex::new(small_real(rng), small_real(rng))
}

/// A random element with up to `terms` support points inside the window.
pub fn element<R: RealScalar, G: Rng + ?Sized>(
    g: &Arc<DiscreteGroupoid>,
    w: Window,
    terms: usize,
    rng: &mut G,
) -> AlgebraElement<R> {
    element_where(g, w, terms, rng, |_| true)
}

/// As [`element`], restricted to morphisms satisfying `keep`. Gives up on a
/// term after a bounded number of rejected draws.
pub fn element_where<R: RealScalar, G: Rng + ?Sized>(
    g: &Arc<DiscreteGroupoid>,
    w: Window,
    terms: usize,
    rng: &mut G,
    keep: impl Fn(Morphism) -> bool,
) -> AlgebraElement<R> {
    let mut f = AlgebraElement::zero(g.clone());
    for _ in 0..terms {
        for _ in 0..64 {
            let m = morphism(g, w, rng);
            if keep(m) {
                f.add_at(m, small_complex(rng));
                break;
            }
        }
    }
    f
}
