//! Discrete groupoids with finite unit space.
//!
//! Three models are supported: an explicit finite composition table, the
//! transformation groupoid `X ⋊ ℤ` of a permutation, and the
//! Deaconu–Renault groupoid `X ⋊ σ` of a partial self-map. Haar systems are
//! always the counting measures on fibers.

mod finite;
mod quotient;
mod validate;

pub use finite::FiniteGroupoid;
pub use quotient::{quotient_by_kernel, QuotientModel};
pub use validate::validate_axioms;

use std::fmt;

use crate::error::{Error, Result};

/// Index into the unit space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnitId(pub usize);

impl fmt::Display for UnitId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A morphism encoding. Equality is structural.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Morphism {
    /// Index into an explicit morphism list.
    Explicit(usize),
    /// `(x, n)` in `X ⋊ ℤ`: range `x`, source `x·n`.
    Trans(UnitId, i64),
    /// `(x, n, y)` in `X ⋊ σ`: range `x`, source `y`.
    Deaconu(UnitId, i64, UnitId),
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Morphism::Explicit(i) => write!(f, "#{i}"),
            Morphism::Trans(x, n) => write!(f, "({x},{n})"),
            Morphism::Deaconu(x, n, y) => write!(f, "({x},{n},{y})"),
        }
    }
}

/// Degree bound `|n| ≤ M` for enumerating morphisms of infinite models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Window {
    pub m: u32,
}

impl Window {
    pub const fn new(m: u32) -> Self {
        Window { m }
    }

    pub fn contains(&self, degree: i64) -> bool {
        degree.unsigned_abs() <= u64::from(self.m)
    }

    pub fn grow(&self, by: u32) -> Self {
        Window { m: self.m + by }
    }
}

/// `X ⋊ ℤ` for a permutation of `X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transformation {
    act: Vec<usize>,
    period: Vec<usize>,
}

impl Transformation {
    pub fn new(act: Vec<usize>) -> Result<Self> {
        let size = act.len();
        if size == 0 {
            return Err(Error::Structure("empty unit space".into()));
        }
        let mut inverse = vec![usize::MAX; size];
        for (x, &y) in act.iter().enumerate() {
            if y >= size {
                return Err(Error::Structure(format!("act[{x}] = {y} out of range")));
            }
            if inverse[y] != usize::MAX {
                return Err(Error::Structure(format!("act is not injective at image {y}")));
            }
            inverse[y] = x;
        }
        let period = (0..size)
            .map(|x| {
                let mut y = act[x];
                let mut p = 1;
                while y != x {
                    y = act[y];
                    p += 1;
                }
                p
            })
            .collect();
        Ok(Transformation { act, period })
    }

    pub fn size(&self) -> usize {
        self.act.len()
    }

    pub fn act(&self) -> &[usize] {
        &self.act
    }

    /// Period of the orbit through `x`.
    pub fn period(&self, x: UnitId) -> usize {
        self.period[x.0]
    }

    /// `x · n = act^n(x)`.
    pub fn apply(&self, x: UnitId, n: i64) -> UnitId {
        let p = self.period[x.0] as i64;
        let steps = n.rem_euclid(p);
        let mut y = x.0;
        for _ in 0..steps {
            y = self.act[y];
        }
        UnitId(y)
    }
}

/// `X ⋊ σ` for a partial map `σ: X ⇀ X`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeaconuRenault {
    sigma: Vec<Option<usize>>,
    orbits: Vec<Orbit>,
}

/// `x, σ(x), σ²(x), …` up to the first repeat or the first undefined step.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Orbit {
    path: Vec<usize>,
    /// Index in `path` where the eventual cycle starts.
    cycle_start: Option<usize>,
}

impl Orbit {
    fn of(sigma: &[Option<usize>], x: usize) -> Self {
        let mut path = vec![x];
        let mut seen = vec![None; sigma.len()];
        seen[x] = Some(0);
        let mut y = x;
        while let Some(next) = sigma[y] {
            if let Some(i) = seen[next] {
                return Orbit { path, cycle_start: Some(i) };
            }
            seen[next] = Some(path.len());
            path.push(next);
            y = next;
        }
        Orbit { path, cycle_start: None }
    }

    fn at(&self, k: u64) -> Option<usize> {
        let len = self.path.len() as u64;
        if k < len {
            return Some(self.path[k as usize]);
        }
        let start = self.cycle_start? as u64;
        Some(self.path[(start + (k - start) % (len - start)) as usize])
    }
}

impl DeaconuRenault {
    pub fn new(sigma: Vec<Option<usize>>) -> Result<Self> {
        if sigma.is_empty() {
            return Err(Error::Structure("empty unit space".into()));
        }
        for (x, s) in sigma.iter().enumerate() {
            if let Some(y) = s {
                if *y >= sigma.len() {
                    return Err(Error::Structure(format!("sigma[{x}] = {y} out of range")));
                }
            }
        }
        let orbits = (0..sigma.len()).map(|x| Orbit::of(&sigma, x)).collect();
        Ok(DeaconuRenault { sigma, orbits })
    }

    pub fn size(&self) -> usize {
        self.sigma.len()
    }

    pub fn sigma(&self) -> &[Option<usize>] {
        &self.sigma
    }

    /// `σ^k(x)` when defined.
    pub fn iterate(&self, x: UnitId, k: u64) -> Option<UnitId> {
        self.orbits[x.0].at(k).map(UnitId)
    }

    /// Smallest `k ≥ max(0, -n)` with `σ^{k+n}(x) = σ^k(y)`. Past
    /// `k = |X| + max(0, -n)` both orbits sit on their cycles, where `σ` is
    /// injective and the comparison can no longer change.
    pub fn witness(&self, x: UnitId, n: i64, y: UnitId) -> Option<u64> {
        if x.0 >= self.size() || y.0 >= self.size() {
            return None;
        }
        let start = (-n).max(0) as u64;
        let bound = start + self.size() as u64;
        (start..=bound).find(|&k| {
            let lhs = self.iterate(x, (k as i64 + n) as u64);
            lhs.is_some() && lhs == self.iterate(y, k)
        })
    }

    pub fn is_valid(&self, x: UnitId, n: i64, y: UnitId) -> bool {
        self.witness(x, n, y).is_some()
    }
}

/// A discrete groupoid with finite unit space.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DiscreteGroupoid {
    Finite(FiniteGroupoid),
    Transformation(Transformation),
    DeaconuRenault(DeaconuRenault),
}

impl DiscreteGroupoid {
    pub fn unit_count(&self) -> usize {
        match self {
            DiscreteGroupoid::Finite(g) => g.unit_count(),
            DiscreteGroupoid::Transformation(t) => t.size(),
            DiscreteGroupoid::DeaconuRenault(d) => d.size(),
        }
    }

    pub fn units(&self) -> impl Iterator<Item = UnitId> {
        (0..self.unit_count()).map(UnitId)
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DiscreteGroupoid::Finite(_))
    }

    /// The identity morphism at `x`.
    pub fn unit(&self, x: UnitId) -> Morphism {
        match self {
            DiscreteGroupoid::Finite(g) => Morphism::Explicit(g.unit_morphism(x)),
            DiscreteGroupoid::Transformation(_) => Morphism::Trans(x, 0),
            DiscreteGroupoid::DeaconuRenault(_) => Morphism::Deaconu(x, 0, x),
        }
    }

    pub fn is_valid(&self, m: Morphism) -> bool {
        match (self, m) {
            (DiscreteGroupoid::Finite(g), Morphism::Explicit(i)) => i < g.morphism_count(),
            (DiscreteGroupoid::Transformation(t), Morphism::Trans(x, _)) => x.0 < t.size(),
            (DiscreteGroupoid::DeaconuRenault(d), Morphism::Deaconu(x, n, y)) => d.is_valid(x, n, y),
            _ => false,
        }
    }

    fn check(&self, m: Morphism) -> Result<()> {
        if self.is_valid(m) {
            Ok(())
        } else {
            Err(Error::InvalidMorphism(m))
        }
    }

    pub fn range(&self, m: Morphism) -> Result<UnitId> {
        self.check(m)?;
        Ok(match (self, m) {
            (DiscreteGroupoid::Finite(g), Morphism::Explicit(i)) => g.range_of(i),
            (_, Morphism::Trans(x, _)) | (_, Morphism::Deaconu(x, _, _)) => x,
            _ => unreachable!(),
        })
    }

    pub fn source(&self, m: Morphism) -> Result<UnitId> {
        self.check(m)?;
        Ok(match (self, m) {
            (DiscreteGroupoid::Finite(g), Morphism::Explicit(i)) => g.source_of(i),
            (DiscreteGroupoid::Transformation(t), Morphism::Trans(x, n)) => t.apply(x, n),
            (_, Morphism::Deaconu(_, _, y)) => y,
            _ => unreachable!(),
        })
    }

    pub fn is_unit(&self, m: Morphism) -> bool {
        match m {
            Morphism::Explicit(i) => match self {
                DiscreteGroupoid::Finite(g) => g.is_unit_morphism(i),
                _ => false,
            },
            Morphism::Trans(_, n) => n == 0,
            Morphism::Deaconu(x, n, y) => n == 0 && x == y,
        }
    }

    /// `ab` when `d(a) = r(b)`, `None` when not composable.
    pub fn compose(&self, a: Morphism, b: Morphism) -> Result<Option<Morphism>> {
        if self.source(a)? != self.range(b)? {
            return Ok(None);
        }
        Ok(match (self, a, b) {
            (DiscreteGroupoid::Finite(g), Morphism::Explicit(i), Morphism::Explicit(j)) => {
                g.product(i, j).map(Morphism::Explicit)
            }
            (_, Morphism::Trans(x, n), Morphism::Trans(_, m)) => Some(Morphism::Trans(x, n + m)),
            (_, Morphism::Deaconu(x, n, _), Morphism::Deaconu(_, m, z)) => {
                Some(Morphism::Deaconu(x, n + m, z))
            }
            _ => unreachable!(),
        })
    }

    pub fn invert(&self, a: Morphism) -> Result<Morphism> {
        self.check(a)?;
        Ok(match (self, a) {
            (DiscreteGroupoid::Finite(g), Morphism::Explicit(i)) => Morphism::Explicit(g.inverse_of(i)),
            (DiscreteGroupoid::Transformation(t), Morphism::Trans(x, n)) => Morphism::Trans(t.apply(x, n), -n),
            (_, Morphism::Deaconu(x, n, y)) => Morphism::Deaconu(y, -n, x),
            _ => unreachable!(),
        })
    }

    /// The `n` coordinate for `Trans`/`Deaconu` morphisms; explicit morphisms
    /// have no degree.
    pub fn degree(&self, m: Morphism) -> Option<i64> {
        match m {
            Morphism::Explicit(_) => None,
            Morphism::Trans(_, n) | Morphism::Deaconu(_, n, _) => Some(n),
        }
    }

    /// Morphisms with source `u` and `|degree| ≤ M`, ordered by degree.
    /// Explicit groupoids ignore the window.
    pub fn source_fiber(&self, u: UnitId, w: Window) -> Vec<Morphism> {
        let m = i64::from(w.m);
        match self {
            DiscreteGroupoid::Finite(g) => g.source_fiber(u).into_iter().map(Morphism::Explicit).collect(),
            DiscreteGroupoid::Transformation(t) => {
                // d(x, n) = u  ⇔  x = u·(-n)
                (-m..=m).map(|n| Morphism::Trans(t.apply(u, -n), n)).collect()
            }
            DiscreteGroupoid::DeaconuRenault(d) => (-m..=m)
                .flat_map(|n| {
                    (0..d.size())
                        .map(UnitId)
                        .filter(move |&x| d.is_valid(x, n, u))
                        .map(move |x| Morphism::Deaconu(x, n, u))
                })
                .collect(),
        }
    }

    /// Morphisms with range `u` and `|degree| ≤ M`, ordered by degree.
    pub fn range_fiber(&self, u: UnitId, w: Window) -> Vec<Morphism> {
        let m = i64::from(w.m);
        match self {
            DiscreteGroupoid::Finite(g) => g.range_fiber(u).into_iter().map(Morphism::Explicit).collect(),
            DiscreteGroupoid::Transformation(_) => (-m..=m).map(|n| Morphism::Trans(u, n)).collect(),
            DiscreteGroupoid::DeaconuRenault(d) => (-m..=m)
                .flat_map(|n| {
                    (0..d.size())
                        .map(UnitId)
                        .filter(move |&y| d.is_valid(u, n, y))
                        .map(move |y| Morphism::Deaconu(u, n, y))
                })
                .collect(),
        }
    }

    /// All morphisms with `|degree| ≤ M`.
    pub fn morphisms(&self, w: Window) -> Vec<Morphism> {
        self.units().flat_map(|u| self.range_fiber(u, w)).collect()
    }

    /// Largest `|degree|` over a set of morphisms (0 for explicit ones).
    pub fn degree_spread<'a>(&self, ms: impl IntoIterator<Item = &'a Morphism>) -> i64 {
        ms.into_iter()
            .filter_map(|&m| self.degree(m))
            .map(i64::abs)
            .max()
            .unwrap_or(0)
    }
}

/// `X ⋊ ℤ` for the permutation `act`.
pub fn build_transformation_groupoid(act: Vec<usize>) -> Result<DiscreteGroupoid> {
    Transformation::new(act).map(DiscreteGroupoid::Transformation)
}

/// `X ⋊ σ` for the partial map `sigma`, defined exactly where it is `Some`.
pub fn build_deaconu_groupoid(sigma: Vec<Option<usize>>) -> Result<DiscreteGroupoid> {
    DeaconuRenault::new(sigma).map(DiscreteGroupoid::DeaconuRenault)
}

/// The cyclic permutation `x ↦ x + 1 mod n`.
pub fn cycle(n: usize) -> Vec<usize> {
    (0..n).map(|x| (x + 1) % n).collect()
}
