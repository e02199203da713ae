//! The convolution *-algebra `C_c(𝒢)` of finitely supported functions.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use crate::linalg;
use crate::scalar::{complex_near, modulus, RealScalar};

/// A finitely supported complex function on the morphisms of a groupoid.
/// Stored entries are never zero.
#[derive(Clone, Debug)]
pub struct AlgebraElement<R: RealScalar> {
    parent: Arc<DiscreteGroupoid>,
    support: BTreeMap<Morphism, Complex<R>>,
}

impl<R: RealScalar> PartialEq for AlgebraElement<R> {
    fn eq(&self, other: &Self) -> bool {
        self.same_parent(other) && self.support == other.support
    }
}

impl<R: RealScalar> AlgebraElement<R> {
    pub fn zero(parent: Arc<DiscreteGroupoid>) -> Self {
        AlgebraElement { parent, support: BTreeMap::new() }
    }

    /// `δ_m`.
    pub fn delta(parent: Arc<DiscreteGroupoid>, m: Morphism) -> Result<Self> {
        Self::from_terms(parent, [(m, Complex::one())])
    }

    /// `Σ_x δ_{unit x}`, the identity for convolution.
    pub fn identity(parent: Arc<DiscreteGroupoid>) -> Self {
        let units: Vec<_> = parent.units().map(|x| parent.unit(x)).collect();
        let mut f = Self::zero(parent);
        for u in units {
            f.add_at(u, Complex::one());
        }
        f
    }

    /// Build from `(morphism, coefficient)` pairs; repeated morphisms add up.
    pub fn from_terms(
        parent: Arc<DiscreteGroupoid>,
        terms: impl IntoIterator<Item = (Morphism, Complex<R>)>,
    ) -> Result<Self> {
        let mut f = Self::zero(parent);
        for (m, v) in terms {
            if !f.parent.is_valid(m) {
                return Err(Error::InvalidMorphism(m));
            }
            f.add_at(m, v);
        }
        Ok(f)
    }

    pub fn parent(&self) -> &Arc<DiscreteGroupoid> {
        &self.parent
    }

    pub fn same_parent(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.parent, &other.parent) || self.parent == other.parent
    }

    fn ensure_same_parent(&self, other: &Self) -> Result<()> {
        if self.same_parent(other) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    pub fn get(&self, m: Morphism) -> Complex<R> {
        self.support.get(&m).cloned().unwrap_or_else(Complex::zero)
    }

    /// `f(m) += v`, dropping the entry if it becomes zero. The caller
    /// guarantees `m` is valid.
    pub fn add_at(&mut self, m: Morphism, v: Complex<R>) {
        if v.is_zero() {
            return;
        }
        let entry = self.support.entry(m).or_insert_with(Complex::zero);
        *entry = entry.clone() + v;
        if entry.is_zero() {
            self.support.remove(&m);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (Morphism, &Complex<R>)> {
        self.support.iter().map(|(m, v)| (*m, v))
    }

    pub fn support(&self) -> impl Iterator<Item = Morphism> + '_ {
        self.support.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    /// Largest `|degree|` on the support.
    pub fn degree_spread(&self) -> i64 {
        self.parent.degree_spread(self.support.keys())
    }

    /// Pointwise `ξ ↦ φ(ξ)·f(ξ)`.
    pub fn pointwise(&self, mut phi: impl FnMut(Morphism) -> Complex<R>) -> Self {
        let mut out = Self::zero(self.parent.clone());
        for (m, v) in self.iter() {
            out.add_at(m, phi(m) * v.clone());
        }
        out
    }

    /// Pointwise with a fallible factor.
    pub fn try_pointwise(&self, mut phi: impl FnMut(Morphism) -> Result<Complex<R>>) -> Result<Self> {
        let mut out = Self::zero(self.parent.clone());
        for (m, v) in self.iter() {
            out.add_at(m, phi(m)? * v.clone());
        }
        Ok(out)
    }

    /// Keep only the entries whose morphism satisfies `keep`.
    pub fn restrict(&self, mut keep: impl FnMut(Morphism) -> bool) -> Self {
        AlgebraElement {
            parent: self.parent.clone(),
            support: self.support.iter().filter(|(m, _)| keep(**m)).map(|(m, v)| (*m, v.clone())).collect(),
        }
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        self.pointwise(|_| s.clone())
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.ensure_same_parent(other)?;
        let mut out = self.clone();
        for (m, v) in other.iter() {
            out.add_at(m, v.clone());
        }
        Ok(out)
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.ensure_same_parent(other)?;
        let mut out = self.clone();
        for (m, v) in other.iter() {
            out.add_at(m, -v.clone());
        }
        Ok(out)
    }

    /// Equality up to `tol` entrywise (exact for exact fields).
    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        if !self.same_parent(other) {
            return false;
        }
        let zero = Complex::zero();
        let keys = self.support.keys().chain(other.support.keys());
        keys.into_iter().all(|m| {
            let a = self.support.get(m).unwrap_or(&zero);
            let b = other.support.get(m).unwrap_or(&zero);
            complex_near(a, b, tol)
        })
    }

    /// `(f * g)(η) = Σ_{ξζ = η} f(ξ) g(ζ)`, iterating over `supp f × supp g`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        self.ensure_same_parent(other)?;
        let g = &*self.parent;
        let mut by_range: BTreeMap<UnitId, Vec<(Morphism, &Complex<R>)>> = BTreeMap::new();
        for (m, v) in other.iter() {
            by_range.entry(g.range(m)?).or_default().push((m, v));
        }
        let mut out = Self::zero(self.parent.clone());
        for (xi, a) in self.iter() {
            let Some(right) = by_range.get(&g.source(xi)?) else {
                continue;
            };
            for &(zeta, b) in right {
                let eta = g.compose(xi, zeta)?.expect("d(ξ) = r(ζ)");
                out.add_at(eta, a.clone() * b.clone());
            }
        }
        Ok(out)
    }

    /// `f*(ξ) = conj f(ξ⁻¹)`.
    pub fn involute(&self) -> Self {
        let g = &*self.parent;
        AlgebraElement {
            parent: self.parent.clone(),
            support: self
                .support
                .iter()
                .map(|(m, v)| (g.invert(*m).expect("stored morphisms are valid"), v.conj()))
                .collect(),
        }
    }

    /// `sup_u Σ_{r(ξ)=u} |f(ξ)|`.
    pub fn nu_norm(&self) -> f64 {
        self.fiber_l1(|m| self.parent.range(m).expect("valid"))
    }

    /// `sup_u Σ_{d(ξ)=u} |f(ξ)|`, the ν-norm of `ξ ↦ f(ξ⁻¹)`.
    pub fn nu_inv_norm(&self) -> f64 {
        self.fiber_l1(|m| self.parent.source(m).expect("valid"))
    }

    fn fiber_l1(&self, unit_of: impl Fn(Morphism) -> UnitId) -> f64 {
        let mut sums = vec![0.0; self.parent.unit_count()];
        for (m, v) in self.iter() {
            sums[unit_of(m).0] += modulus(v);
        }
        sums.into_iter().fold(0.0, f64::max)
    }

    pub fn i_norm(&self) -> f64 {
        self.nu_norm().max(self.nu_inv_norm())
    }

    fn ensure_window(&self, w: Window) -> Result<()> {
        let needed = self.degree_spread();
        if w.contains(needed) {
            Ok(())
        } else {
            Err(Error::WindowTooSmall { window: w.m, needed })
        }
    }

    /// Matrix of left convolution by `f` on `ℓ²({ξ : d(ξ) = u, |deg ξ| ≤ M})`,
    /// i.e. the compression of the regular representation on the `d`-fiber.
    pub fn regular_rep(&self, u: UnitId, w: Window) -> Result<RegularRep<R>> {
        self.ensure_window(w)?;
        let g = &*self.parent;
        let basis = g.source_fiber(u, w);
        let index: BTreeMap<Morphism, usize> = basis.iter().enumerate().map(|(i, m)| (*m, i)).collect();
        let mut matrix = DMatrix::from_element(basis.len(), basis.len(), Complex::zero());
        for (col, &zeta) in basis.iter().enumerate() {
            let r = g.range(zeta)?;
            for (xi, a) in self.iter() {
                if g.source(xi)? != r {
                    continue;
                }
                let eta = g.compose(xi, zeta)?.expect("composable");
                if let Some(&row) = index.get(&eta) {
                    matrix[(row, col)] = matrix[(row, col)].clone() + a.clone();
                }
            }
        }
        Ok(RegularRep { unit: u, basis, matrix })
    }

    /// The norm bracket: exact I-norms and a lower bound for the reduced
    /// norm from the truncated regular representation.
    pub fn norms(&self, w: Window) -> Result<NormReport> {
        self.ensure_window(w)?;
        let mut reduced_lower = 0.0f64;
        for u in self.parent.units() {
            if self.is_zero() {
                break;
            }
            let rep = self.regular_rep(u, w)?;
            reduced_lower = reduced_lower.max(linalg::operator_norm(&linalg::to_c64_matrix(&rep.matrix)));
        }
        let (nu, nu_inv) = (self.nu_norm(), self.nu_inv_norm());
        Ok(NormReport { nu, nu_inv, i_norm: nu.max(nu_inv), reduced_lower, window_used: w })
    }
}

/// A truncated regular representation on one `d`-fiber.
#[derive(Clone, Debug)]
pub struct RegularRep<R: RealScalar> {
    pub unit: UnitId,
    pub basis: Vec<Morphism>,
    pub matrix: DMatrix<Complex<R>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub nu: f64,
    pub nu_inv: f64,
    pub i_norm: f64,
    /// Largest singular value of the truncated regular representation,
    /// maximized over units. Nondecreasing in the window.
    pub reduced_lower: f64,
    pub window_used: Window,
}
