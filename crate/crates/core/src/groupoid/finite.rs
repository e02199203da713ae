use crate::error::{Error, Result};

use super::{DiscreteGroupoid, UnitId};

/// A finite groupoid given by explicit tables. Construction only checks that
/// the tables are well formed; the groupoid axioms are checked by
/// [`validate_axioms`](super::validate_axioms).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroupoid {
    /// Morphism index of the identity at each unit.
    units: Vec<usize>,
    range: Vec<UnitId>,
    source: Vec<UnitId>,
    /// `table[a][b]` is the product `ab`, `None` when undefined.
    table: Vec<Vec<Option<usize>>>,
    inverse: Vec<usize>,
}

impl FiniteGroupoid {
    pub fn new(
        units: Vec<usize>,
        range: Vec<usize>,
        source: Vec<usize>,
        table: Vec<Vec<Option<usize>>>,
        inverse: Vec<usize>,
    ) -> Result<Self> {
        let n = range.len();
        let unit_count = units.len();
        if unit_count == 0 {
            return Err(Error::Structure("empty unit space".into()));
        }
        if source.len() != n || inverse.len() != n || table.len() != n {
            return Err(Error::Structure(format!(
                "table sizes disagree: {n} morphisms, {} sources, {} inverses, {} table rows",
                source.len(),
                inverse.len(),
                table.len()
            )));
        }
        for (x, &u) in units.iter().enumerate() {
            if u >= n {
                return Err(Error::Structure(format!("units[{x}] = {u} out of range")));
            }
        }
        for (i, (&r, &d)) in range.iter().zip(&source).enumerate() {
            if r >= unit_count || d >= unit_count {
                return Err(Error::Structure(format!("morphism {i}: range/source out of range")));
            }
        }
        for (i, row) in table.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Structure(format!("table row {i} has length {}", row.len())));
            }
            if let Some((j, c)) = row.iter().enumerate().find_map(|(j, c)| c.filter(|&c| c >= n).map(|c| (j, c))) {
                return Err(Error::Structure(format!("table[{i}][{j}] = {c} out of range")));
            }
        }
        if let Some((i, &j)) = inverse.iter().enumerate().find(|(_, &j)| j >= n) {
            return Err(Error::Structure(format!("inverse[{i}] = {j} out of range")));
        }
        Ok(FiniteGroupoid {
            units,
            range: range.into_iter().map(UnitId).collect(),
            source: source.into_iter().map(UnitId).collect(),
            table,
            inverse,
        })
    }

    pub fn unit_count(&self) -> usize {
        self.units.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.range.len()
    }

    pub fn unit_morphism(&self, x: UnitId) -> usize {
        self.units[x.0]
    }

    pub fn is_unit_morphism(&self, i: usize) -> bool {
        self.units.contains(&i)
    }

    pub fn range_of(&self, i: usize) -> UnitId {
        self.range[i]
    }

    pub fn source_of(&self, i: usize) -> UnitId {
        self.source[i]
    }

    pub fn inverse_of(&self, i: usize) -> usize {
        self.inverse[i]
    }

    pub fn product(&self, a: usize, b: usize) -> Option<usize> {
        self.table[a][b]
    }

    pub fn table(&self) -> &[Vec<Option<usize>>] {
        &self.table
    }

    /// Overwrite one composition-table entry.
    pub fn set_product(&mut self, a: usize, b: usize, c: Option<usize>) {
        self.table[a][b] = c;
    }

    pub fn range_fiber(&self, u: UnitId) -> Vec<usize> {
        (0..self.morphism_count()).filter(|&i| self.range[i] == u).collect()
    }

    pub fn source_fiber(&self, u: UnitId) -> Vec<usize> {
        (0..self.morphism_count()).filter(|&i| self.source[i] == u).collect()
    }

    /// The pair groupoid `X × X` on `n` units; morphism `(i, j)` has index
    /// `i·n + j`, range `i` and source `j`.
    pub fn pair(n: usize) -> Result<Self> {
        let id = |i: usize, j: usize| i * n + j;
        let mut range = Vec::with_capacity(n * n);
        let mut source = Vec::with_capacity(n * n);
        let mut inverse = Vec::with_capacity(n * n);
        let mut table = vec![vec![None; n * n]; n * n];
        for i in 0..n {
            for j in 0..n {
                range.push(i);
                source.push(j);
                inverse.push(id(j, i));
                for k in 0..n {
                    table[id(i, j)][id(j, k)] = Some(id(i, k));
                }
            }
        }
        FiniteGroupoid::new((0..n).map(|i| id(i, i)).collect(), range, source, table, inverse)
    }

    /// The cyclic group `ℤ/k` as a one-unit groupoid; morphism `a` is the
    /// residue `a`.
    pub fn cyclic_group(k: usize) -> Result<Self> {
        let table = (0..k).map(|a| (0..k).map(|b| Some((a + b) % k)).collect()).collect();
        let inverse = (0..k).map(|a| (k - a) % k).collect();
        FiniteGroupoid::new(vec![0], vec![0; k], vec![0; k], table, inverse)
    }

    /// Product groupoid; morphism `(a, b)` has index `a·|H| + b` and unit
    /// `(x, y)` has index `x·|H⁽⁰⁾| + y`.
    pub fn product_with(&self, other: &FiniteGroupoid) -> Result<Self> {
        let (n, m) = (self.morphism_count(), other.morphism_count());
        let hu = other.unit_count();
        let id = |a: usize, b: usize| a * m + b;
        let mut range = Vec::with_capacity(n * m);
        let mut source = Vec::with_capacity(n * m);
        let mut inverse = Vec::with_capacity(n * m);
        let mut table = vec![vec![None; n * m]; n * m];
        for a in 0..n {
            for b in 0..m {
                range.push(self.range[a].0 * hu + other.range[b].0);
                source.push(self.source[a].0 * hu + other.source[b].0);
                inverse.push(id(self.inverse[a], other.inverse[b]));
                for c in 0..n {
                    for d in 0..m {
                        if let (Some(ac), Some(bd)) = (self.table[a][c], other.table[b][d]) {
                            table[id(a, b)][id(c, d)] = Some(id(ac, bd));
                        }
                    }
                }
            }
        }
        let units = (0..self.unit_count())
            .flat_map(|x| (0..hu).map(move |y| (x, y)))
            .map(|(x, y)| id(self.units[x], other.units[y]))
            .collect();
        FiniteGroupoid::new(units, range, source, table, inverse)
    }
}

impl From<FiniteGroupoid> for DiscreteGroupoid {
    fn from(g: FiniteGroupoid) -> Self {
        DiscreteGroupoid::Finite(g)
    }
}
