use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::report::{Law, ValidationReport};
use crate::sample;

use super::{DiscreteGroupoid, FiniteGroupoid, Morphism, UnitId, Window};

const MAX_VIOLATIONS: usize = 64;

/// Check the groupoid axioms.
///
/// Explicit groupoids are checked exhaustively over all pairs and triples.
/// Infinite models are checked on `sample_budget` random composable triples
/// drawn with degree at most `2|X| + 2`.
pub fn validate_axioms(g: &DiscreteGroupoid, sample_budget: usize, seed: u64) -> ValidationReport {
    match g {
        DiscreteGroupoid::Finite(f) => validate_finite(f),
        _ => validate_sampled(g, sample_budget, seed),
    }
}

fn validate_finite(g: &FiniteGroupoid) -> ValidationReport {
    let mut report = ValidationReport::default();
    let n = g.morphism_count();
    for (a, row) in g.table().iter().enumerate() {
        for (b, c) in row.iter().enumerate() {
            if let Some(c) = c.filter(|&c| c >= n) {
                report.structural.push(format!("table[{a}][{b}] = {c} out of range"));
            }
        }
    }
    if !report.structural.is_empty() {
        return report;
    }

    let e = Morphism::Explicit;
    let full = |r: &ValidationReport| r.violations.len() >= MAX_VIOLATIONS;

    for x in 0..g.unit_count() {
        let u = g.unit_morphism(UnitId(x));
        report.checked += 1;
        if g.range_of(u) != UnitId(x) || g.source_of(u) != UnitId(x) {
            report.violate(Law::UnitEndpoints, vec![e(u)], format!("unit of {x} has wrong endpoints"));
        }
    }

    for a in 0..n {
        let inv = g.inverse_of(a);
        let (r, d) = (g.range_of(a), g.source_of(a));
        report.checked += 3;
        if g.inverse_of(inv) != a {
            report.violate(Law::DoubleInverse, vec![e(a)], "inverse of inverse differs");
        }
        if g.product(a, inv) != Some(g.unit_morphism(r)) {
            report.violate(Law::Inverse, vec![e(a), e(inv)], "a·a⁻¹ is not the unit at r(a)");
        }
        if g.product(inv, a) != Some(g.unit_morphism(d)) {
            report.violate(Law::Inverse, vec![e(inv), e(a)], "a⁻¹·a is not the unit at d(a)");
        }
        report.checked += 2;
        if g.product(g.unit_morphism(r), a) != Some(a) {
            report.violate(Law::LeftIdentity, vec![e(a)], "unit at r(a) does not fix a");
        }
        if g.product(a, g.unit_morphism(d)) != Some(a) {
            report.violate(Law::RightIdentity, vec![e(a)], "unit at d(a) does not fix a");
        }
    }

    for a in 0..n {
        for b in 0..n {
            if full(&report) {
                return report;
            }
            report.checked += 1;
            let composable = g.source_of(a) == g.range_of(b);
            match (composable, g.product(a, b)) {
                (true, None) => report.violate(Law::Composability, vec![e(a), e(b)], "composable pair has no product"),
                (false, Some(c)) => report.violate(
                    Law::Composability,
                    vec![e(a), e(b), e(c)],
                    "non-composable pair has a product",
                ),
                (true, Some(c)) => {
                    if g.range_of(c) != g.range_of(a) {
                        report.violate(Law::RangeOfProduct, vec![e(a), e(b), e(c)], "r(ab) ≠ r(a)");
                    }
                    if g.source_of(c) != g.source_of(b) {
                        report.violate(Law::SourceOfProduct, vec![e(a), e(b), e(c)], "d(ab) ≠ d(b)");
                    }
                }
                (false, None) => {}
            }
        }
    }

    for a in 0..n {
        for b in g.range_fiber(g.source_of(a)) {
            for c in g.range_fiber(g.source_of(b)) {
                if full(&report) {
                    return report;
                }
                report.checked += 1;
                let left = g.product(a, b).and_then(|ab| g.product(ab, c));
                let right = g.product(b, c).and_then(|bc| g.product(a, bc));
                if left != right {
                    report.violate(
                        Law::Associativity,
                        vec![e(a), e(b), e(c)],
                        format!("(ab)c = {left:?}, a(bc) = {right:?}"),
                    );
                }
            }
        }
    }
    report
}

fn validate_sampled(g: &DiscreteGroupoid, budget: usize, seed: u64) -> ValidationReport {
    let mut report = ValidationReport::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = Window::new(2 * g.unit_count() as u32 + 2);

    for _ in 0..budget {
        if report.violations.len() >= MAX_VIOLATIONS {
            break;
        }
        let triple = sample::chain(g, 3, w, &mut rng);
        let (a, b, c) = (triple[0], triple[1], triple[2]);
        report.checked += 1;
        check_sampled_triple(g, a, b, c, &mut report);
    }
    report
}

fn check_sampled_triple(g: &DiscreteGroupoid, a: Morphism, b: Morphism, c: Morphism, report: &mut ValidationReport) {
    let product = |x: Morphism, y: Morphism| g.compose(x, y).ok().flatten();
    let Some(ab) = product(a, b) else {
        report.violate(Law::Composability, vec![a, b], "composable pair has no product");
        return;
    };
    if !g.is_valid(ab) {
        report.violate(Law::DeaconuWitness, vec![a, b, ab], "product has no validity witness");
        return;
    }
    if g.range(ab).ok() != g.range(a).ok() {
        report.violate(Law::RangeOfProduct, vec![a, b, ab], "r(ab) ≠ r(a)");
    }
    if g.source(ab).ok() != g.source(b).ok() {
        report.violate(Law::SourceOfProduct, vec![a, b, ab], "d(ab) ≠ d(b)");
    }
    let left = product(ab, c);
    let right = product(b, c).and_then(|bc| product(a, bc));
    if left.is_none() || left != right {
        report.violate(Law::Associativity, vec![a, b, c], format!("(ab)c = {left:?}, a(bc) = {right:?}"));
    }

    let Ok(inv) = g.invert(a) else {
        report.violate(Law::Inverse, vec![a], "inverse is not a valid morphism");
        return;
    };
    if g.invert(inv).ok() != Some(a) {
        report.violate(Law::DoubleInverse, vec![a], "inverse of inverse differs");
    }
    let (r, d) = (g.range(a).expect("valid"), g.source(a).expect("valid"));
    if product(a, inv) != Some(g.unit(r)) {
        report.violate(Law::Inverse, vec![a, inv], "a·a⁻¹ is not the unit at r(a)");
    }
    if product(inv, a) != Some(g.unit(d)) {
        report.violate(Law::Inverse, vec![inv, a], "a⁻¹·a is not the unit at d(a)");
    }
    if product(g.unit(r), a) != Some(a) {
        report.violate(Law::LeftIdentity, vec![a], "unit at r(a) does not fix a");
    }
    if product(a, g.unit(d)) != Some(a) {
        report.violate(Law::RightIdentity, vec![a], "unit at d(a) does not fix a");
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoid::{build_deaconu_groupoid, build_transformation_groupoid};

    #[test]
    fn pair_groupoid_is_valid() {
        let g: DiscreteGroupoid = FiniteGroupoid::pair(2).unwrap().into();
        let report = validate_axioms(&g, 0, 0);
        assert!(report.is_valid(), "{report:?}");
        assert!(report.checked > 0);
    }

    #[test]
    fn swap_action_is_valid() {
        let g = build_transformation_groupoid(vec![1, 0]).unwrap();
        let report = validate_axioms(&g, 1000, 7);
        assert!(report.is_valid(), "{report:?}");
        assert_eq!(report.checked, 1000);
    }

    #[test]
    fn deaconu_is_valid() {
        let g = build_deaconu_groupoid(vec![Some(1), Some(2), Some(0), Some(1)]).unwrap();
        assert!(validate_axioms(&g, 500, 1).is_valid());
    }

    #[test]
    fn corrupted_entry_is_detected() {
        let mut g = FiniteGroupoid::pair(2).unwrap();
        // (0,1)(1,0) = (0,0); corrupt it to (0,1).
        g.set_product(1, 2, Some(1));
        let report = validate_axioms(&g.into(), 0, 0);
        assert!(!report.is_valid());
        assert!(report.structural.is_empty());
        let laws: Vec<_> = report.violations.iter().map(|v| v.law).collect();
        assert!(laws.iter().any(|l| matches!(l, Law::Associativity | Law::SourceOfProduct | Law::Inverse)));
    }

    #[test]
    fn out_of_range_entry_is_structural() {
        let mut g = FiniteGroupoid::pair(2).unwrap();
        g.set_product(0, 0, Some(17));
        let report = validate_axioms(&g.into(), 0, 0);
        assert!(!report.structural.is_empty());
        assert!(report.violations.is_empty());
    }
}
