//! Real-valued 1-cocycles `c(ξη) = c(ξ) + c(η)`: verification, coboundary
//! solving, kernel subgroupoids, exactness and the one-parameter group
//! `u_z f(ξ) = e^{izc(ξ)} f(ξ)`.

use std::collections::{BTreeMap, VecDeque};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::One;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraElement;
use crate::error::{Error, Result};
use crate::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use crate::measures::UnitMeasure;
use crate::report::{Law, ValidationReport};
use crate::sample;
use crate::scalar::{real, RealScalar};

/// Values below this are treated as zero for floating-point cocycles.
pub const KERNEL_TOL: f64 = 1e-12;
/// Floating-point values in `(KERNEL_TOL, NEAR_ZERO)` make a cocycle non-regular.
pub const NEAR_ZERO: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq)]
pub enum CocycleKind<R: RealScalar> {
    /// The `n` coordinate of `Trans`/`Deaconu` morphisms.
    Degree,
    /// The coboundary `f(r(ξ)) − f(d(ξ))`.
    Potential(Vec<R>),
    /// A table over the morphisms of an explicit groupoid.
    Explicit(BTreeMap<Morphism, R>),
    /// `ln Δ_μ`, the Radon–Nikodym cocycle.
    LogModular(UnitMeasure<R>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Cocycle<R: RealScalar> {
    kind: CocycleKind<R>,
    integral: bool,
}

impl<R: RealScalar> Cocycle<R> {
    pub fn degree() -> Self {
        Cocycle { kind: CocycleKind::Degree, integral: true }
    }

    pub fn potential(f: Vec<R>) -> Self {
        let integral = match f.first() {
            Some(base) => f.iter().all(|v| (v.clone() - base.clone()).to_integer().is_some()),
            None => true,
        };
        Cocycle { kind: CocycleKind::Potential(f), integral }
    }

    /// The zero cocycle on `n` units.
    pub fn zero(n: usize) -> Self {
        Self::potential(vec![R::zero(); n])
    }

    pub fn explicit(table: BTreeMap<Morphism, R>) -> Self {
        let integral = table.values().all(|v| v.to_integer().is_some());
        Cocycle { kind: CocycleKind::Explicit(table), integral }
    }

    pub fn log_modular(mu: UnitMeasure<R>) -> Self {
        let integral = mu.weights().windows(2).all(|w| w[0] == w[1]);
        Cocycle { kind: CocycleKind::LogModular(mu), integral }
    }

    pub fn kind(&self) -> &CocycleKind<R> {
        &self.kind
    }

    /// True when every value is an integer.
    pub fn is_integral(&self) -> bool {
        self.integral
    }

    pub fn value(&self, g: &DiscreteGroupoid, m: Morphism) -> Result<R> {
        match &self.kind {
            CocycleKind::Degree => g
                .degree(m)
                .map(R::from_i64)
                .ok_or_else(|| Error::Precondition("degree cocycle needs Trans/Deaconu morphisms".into())),
            CocycleKind::Potential(f) => {
                let (r, d) = (g.range(m)?, g.source(m)?);
                Ok(f[r.0].clone() - f[d.0].clone())
            }
            CocycleKind::Explicit(table) => table
                .get(&m)
                .cloned()
                .ok_or_else(|| Error::Precondition(format!("cocycle table has no entry for {m}"))),
            CocycleKind::LogModular(mu) => mu.modular_ratio(g, m)?.ln().ok_or(Error::Inexact("ln Δ")),
        }
    }

    /// The value as an integer, for integral cocycles.
    pub fn int_value(&self, g: &DiscreteGroupoid, m: Morphism) -> Result<i64> {
        if !self.integral {
            return Err(Error::NotIntegral);
        }
        if let CocycleKind::Degree = self.kind {
            return g.degree(m).ok_or(Error::NotIntegral);
        }
        if let CocycleKind::LogModular(_) = self.kind {
            return Ok(0);
        }
        self.value(g, m)?.to_integer().ok_or(Error::NotIntegral)
    }

    /// `c(ξ) = 0`, decided exactly for log-modular cocycles (`Δ(ξ) = 1`).
    pub fn vanishes_at(&self, g: &DiscreteGroupoid, m: Morphism) -> Result<bool> {
        match &self.kind {
            CocycleKind::LogModular(mu) => Ok(mu.modular_ratio(g, m)?.near(&R::one(), KERNEL_TOL)),
            _ => Ok(self.value(g, m)?.abs().to_f64() <= KERNEL_TOL && (!R::EXACT || self.value(g, m)?.is_zero())),
        }
    }

    /// `e^{s·c(ξ)}` for integer `s`; exact for log-modular cocycles (`Δ^s`)
    /// and wherever `c(ξ) = 0`.
    pub fn exp_multiple(&self, g: &DiscreteGroupoid, m: Morphism, s: i64) -> Result<R> {
        if let CocycleKind::LogModular(mu) = &self.kind {
            let ratio = mu.modular_ratio(g, m)?;
            let base = if s >= 0 { ratio } else { R::one() / ratio };
            return Ok((0..s.unsigned_abs()).fold(R::one(), |acc, _| acc * base.clone()));
        }
        let v = self.value(g, m)? * R::from_i64(s);
        v.exp().ok_or(Error::Inexact("e^{sc}"))
    }

    fn additive_at(&self, g: &DiscreteGroupoid, a: Morphism, b: Morphism, ab: Morphism) -> Result<bool> {
        if let CocycleKind::LogModular(mu) = &self.kind {
            let lhs = mu.modular_ratio(g, ab)?;
            let rhs = mu.modular_ratio(g, a)? * mu.modular_ratio(g, b)?;
            return Ok(lhs.near(&rhs, KERNEL_TOL));
        }
        let lhs = self.value(g, ab)?;
        let rhs = self.value(g, a)? + self.value(g, b)?;
        Ok(lhs.near(&rhs, KERNEL_TOL))
    }
}

/// Check additivity, vanishing on units and oddness under inversion.
/// Exhaustive on explicit groupoids, otherwise `sample_budget` random pairs
/// with degree at most `2|X| + 2`.
pub fn verify_cocycle<R: RealScalar>(
    g: &DiscreteGroupoid,
    c: &Cocycle<R>,
    sample_budget: usize,
    seed: u64,
) -> ValidationReport {
    let mut report = ValidationReport::default();
    let pairs: Vec<(Morphism, Morphism)> = if g.is_finite() {
        let all = g.morphisms(Window::new(0));
        all.iter()
            .flat_map(|&a| {
                let d = g.source(a).expect("valid");
                all.iter().filter(move |&&b| g.range(b).expect("valid") == d).map(move |&b| (a, b))
            })
            .collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Window::new(2 * g.unit_count() as u32 + 2);
        (0..sample_budget)
            .map(|_| {
                let ch = sample::chain(g, 2, w, &mut rng);
                (ch[0], ch[1])
            })
            .collect()
    };

    for u in g.units() {
        report.checked += 1;
        match c.vanishes_at(g, g.unit(u)) {
            Ok(true) => {}
            Ok(false) => report.violate(Law::CocycleUnit, vec![g.unit(u)], "c(unit) ≠ 0"),
            Err(e) => report.structural.push(e.to_string()),
        }
    }
    for (a, b) in pairs {
        report.checked += 1;
        let ab = match g.compose(a, b) {
            Ok(Some(ab)) => ab,
            _ => {
                report.structural.push(format!("sampled pair {a}, {b} does not compose"));
                continue;
            }
        };
        match c.additive_at(g, a, b, ab) {
            Ok(true) => {}
            Ok(false) => report.violate(Law::CocycleAdditivity, vec![a, b, ab], "c(ab) ≠ c(a) + c(b)"),
            Err(e) => report.structural.push(e.to_string()),
        }
        let inv = g.invert(a).expect("valid");
        match c.additive_at(g, a, inv, g.unit(g.range(a).expect("valid"))) {
            Ok(true) => {}
            Ok(false) => report.violate(Law::CocycleInverse, vec![a, inv], "c(a⁻¹) ≠ −c(a)"),
            Err(e) => report.structural.push(e.to_string()),
        }
    }
    report
}

#[derive(Clone, Debug, PartialEq)]
pub enum Coboundary<R: RealScalar> {
    /// `c(ξ) = f(r(ξ)) − f(d(ξ))`, with `f = 0` at one unit per component.
    Potential(Vec<R>),
    /// A closed loop of morphisms whose total cocycle value is nonzero.
    NotCoboundary { cycle: Vec<Morphism>, discrepancy: R },
}

/// Solve `c = f∘r − f∘d` on an explicit groupoid via a spanning forest of
/// the orbit graph.
pub fn solve_coboundary<R: RealScalar>(g: &DiscreteGroupoid, c: &Cocycle<R>) -> Result<Coboundary<R>> {
    if !g.is_finite() {
        return Err(Error::NeedsFiniteGroupoid);
    }
    let n = g.unit_count();
    let all = g.morphisms(Window::new(0));
    let mut potential: Vec<Option<R>> = vec![None; n];
    // tree edge reaching each non-root unit, oriented away from the root
    let mut tree: Vec<Option<Morphism>> = vec![None; n];
    for root in g.units() {
        if potential[root.0].is_some() {
            continue;
        }
        potential[root.0] = Some(R::zero());
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for xi in g.source_fiber(u, Window::new(0)) {
                let r = g.range(xi)?;
                if potential[r.0].is_none() {
                    let fu = potential[u.0].clone().expect("visited");
                    potential[r.0] = Some(fu + c.value(g, xi)?);
                    tree[r.0] = Some(xi);
                    queue.push_back(r);
                }
            }
        }
    }
    let f: Vec<R> = potential.into_iter().map(|p| p.expect("every unit visited")).collect();

    let path_from_root = |mut u: UnitId| -> Vec<Morphism> {
        let mut path = Vec::new();
        while let Some(edge) = tree[u.0] {
            path.push(edge);
            u = g.source(edge).expect("valid");
        }
        path.reverse();
        path
    };

    for xi in all {
        let (r, d) = (g.range(xi)?, g.source(xi)?);
        let expected = f[r.0].clone() - f[d.0].clone();
        let actual = c.value(g, xi)?;
        if !actual.near(&expected, KERNEL_TOL) {
            // root → d(ξ) → r(ξ) → root, written right to left as a product
            let mut cycle: Vec<Morphism> =
                path_from_root(r).into_iter().rev().map(|m| g.invert(m).expect("valid")).collect();
            cycle.push(xi);
            cycle.extend(path_from_root(d).into_iter().rev());
            return Ok(Coboundary::NotCoboundary { cycle, discrepancy: actual - expected });
        }
    }
    Ok(Coboundary::Potential(f))
}

/// `ker c = {ξ : c(ξ) = 0}`.
#[derive(Clone, Debug)]
pub struct KernelGroupoid<R: RealScalar> {
    parent: Arc<DiscreteGroupoid>,
    cocycle: Cocycle<R>,
}

/// What the kernel looks like.
#[derive(Clone, Debug, PartialEq)]
pub enum KernelStructure {
    /// Only the units (decided structurally for degree cocycles on `X ⋊ ℤ`).
    Units,
    /// All of 𝒢 within the inspected window.
    Whole,
    /// A proper subgroupoid; its morphisms within the window.
    Proper(Vec<Morphism>),
}

impl<R: RealScalar> KernelGroupoid<R> {
    pub fn parent(&self) -> &Arc<DiscreteGroupoid> {
        &self.parent
    }

    pub fn cocycle(&self) -> &Cocycle<R> {
        &self.cocycle
    }

    pub fn contains(&self, m: Morphism) -> bool {
        self.cocycle.vanishes_at(&self.parent, m).unwrap_or(false)
    }

    /// Kernel morphisms with `|degree| ≤ M`.
    pub fn morphisms(&self, w: Window) -> Vec<Morphism> {
        self.parent.morphisms(w).into_iter().filter(|&m| self.contains(m)).collect()
    }

    pub fn structure(&self, w: Window) -> KernelStructure {
        if matches!(self.cocycle.kind, CocycleKind::Degree) {
            if let DiscreteGroupoid::Transformation(_) = *self.parent {
                return KernelStructure::Units;
            }
        }
        let all = self.parent.morphisms(w);
        let kernel: Vec<_> = all.iter().copied().filter(|&m| self.contains(m)).collect();
        if kernel.len() == all.len() {
            KernelStructure::Whole
        } else if kernel.iter().all(|&m| self.parent.is_unit(m)) {
            KernelStructure::Units
        } else {
            KernelStructure::Proper(kernel)
        }
    }

    /// A floating-point cocycle is non-regular when some value is neither
    /// clearly zero nor clearly nonzero.
    pub fn is_regular(&self, w: Window) -> bool {
        if R::EXACT {
            return true;
        }
        self.parent.morphisms(w).into_iter().all(|m| match self.cocycle.value(&self.parent, m) {
            Ok(v) => {
                let a = v.abs().to_f64();
                a <= KERNEL_TOL || a >= NEAR_ZERO
            }
            Err(_) => true,
        })
    }
}

pub fn kernel_subgroupoid<R: RealScalar>(g: &Arc<DiscreteGroupoid>, c: &Cocycle<R>) -> KernelGroupoid<R> {
    KernelGroupoid { parent: g.clone(), cocycle: c.clone() }
}

/// A class `[ξ] ∈ 𝒢/ker c`, identified with `(r(ξ), c(ξ))`.
#[derive(Clone, Debug, PartialEq)]
pub struct Class<R: RealScalar> {
    pub unit: UnitId,
    pub value: R,
}

impl<R: RealScalar> Class<R> {
    pub fn of(g: &DiscreteGroupoid, c: &Cocycle<R>, m: Morphism) -> Result<Self> {
        Ok(Class { unit: g.range(m)?, value: c.value(g, m)? })
    }

    pub fn matches(&self, other: &Self) -> bool {
        self.unit == other.unit && self.value.near(&other.value, KERNEL_TOL)
    }
}

/// The preimage `(r × c)⁻¹(u, v)` within the window.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassPreimage<R: RealScalar> {
    pub class: Class<R>,
    pub preimage: Vec<Morphism>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Exactness<R: RealScalar> {
    /// Integral cocycle on a discrete model: every class has an open
    /// preimage, listed per class.
    ExactIntegral(Vec<ClassPreimage<R>>),
    /// `r × c` is injective on classes (checked exhaustively).
    ExactInjective { classes: usize },
    NotExact { witness: (Morphism, Morphism) },
    Indeterminate(String),
}

impl<R: RealScalar> Exactness<R> {
    pub fn is_exact(&self) -> bool {
        matches!(self, Exactness::ExactIntegral(_) | Exactness::ExactInjective { .. })
    }
}

/// Certify exactness of `c`. Discrete topologies make every class map open,
/// so the certificate is the explicit class decomposition.
pub fn check_exactness<R: RealScalar>(g: &Arc<DiscreteGroupoid>, c: &Cocycle<R>, w: Window) -> Result<Exactness<R>> {
    let kernel = kernel_subgroupoid(g, c);
    if !kernel.is_regular(w) {
        return Ok(Exactness::Indeterminate("cocycle has values in (1e-12, 1e-6)".into()));
    }
    let morphisms = g.morphisms(w);
    if c.is_integral() {
        let mut classes: Vec<ClassPreimage<R>> = Vec::new();
        for m in morphisms {
            let class = Class::of(g, c, m)?;
            match classes.iter_mut().find(|p| p.class.matches(&class)) {
                Some(p) => p.preimage.push(m),
                None => classes.push(ClassPreimage { class, preimage: vec![m] }),
            }
        }
        return Ok(Exactness::ExactIntegral(classes));
    }
    if !g.is_finite() {
        return Ok(Exactness::Indeterminate("non-integral cocycle on an infinite model".into()));
    }
    // r × c injective on 𝒢/ℋ: equal (r, c) forces ξ⁻¹η ∈ ker c.
    let mut reps: Vec<(Class<R>, Morphism)> = Vec::new();
    for m in morphisms {
        let class = Class::of(g, c, m)?;
        match reps.iter().find(|(k, _)| k.matches(&class)) {
            Some(&(_, rep)) => {
                let quotient = g.compose(g.invert(rep)?, m)?.expect("same range");
                if !kernel.contains(quotient) {
                    return Ok(Exactness::NotExact { witness: (rep, m) });
                }
            }
            None => reps.push((class, m)),
        }
    }
    Ok(Exactness::ExactInjective { classes: reps.len() })
}

/// `(u_z f)(ξ) = e^{izc(ξ)} f(ξ)`.
///
/// Real `z = t` gives the one-parameter automorphism group; complex `z` its
/// entire extension. In exact fields only `z = −ik` with integer `k` (and
/// morphisms where `c` vanishes) can be evaluated; for the log-modular
/// cocycle `u_{−i}` is multiplication by `Δ`.
pub fn evolve<R: RealScalar>(f: &AlgebraElement<R>, c: &Cocycle<R>, z: &Complex<R>) -> Result<AlgebraElement<R>> {
    let g = f.parent().clone();
    // i z c = -Im(z) c + i Re(z) c
    let imaginary_integer = if z.re.is_zero() { z.im.to_integer() } else { None };
    f.try_pointwise(|m| {
        if let Some(k) = imaginary_integer {
            return Ok(real(c.exp_multiple(&g, m, -k)?));
        }
        if c.vanishes_at(&g, m)? {
            return Ok(Complex::one());
        }
        if R::EXACT {
            return Err(Error::Inexact("e^{izc}"));
        }
        let v = c.value(&g, m)?.to_f64();
        let (re, im) = (z.re.to_f64(), z.im.to_f64());
        let factor = Complex::new(-im * v, re * v).exp();
        let lift = |x: f64| R::from_f64(x).ok_or(Error::Inexact("non-finite phase"));
        Ok(Complex::new(lift(factor.re)?, lift(factor.im)?))
    })
}
