//! The `(C*(𝒢), C*(ℋ))`-bimodule `𝓔^𝒢` for `ℋ = ker c`, the operator
//! `(DΦ)(ξ) = c(ξ)Φ(ξ)`, its transforms, the compact cutoffs `k_f^m` and the
//! spectral projections `ρ_k`.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use crate::algebra::AlgebraElement;
use crate::cocycle::{evolve, Class, Cocycle, KernelGroupoid};
use crate::error::{Error, Result};
use crate::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use crate::scalar::{modulus, real, RealScalar};

/// A finitely supported element of `𝓔^𝒢`, tagged with `(𝒢, ℋ)`.
#[derive(Clone, Debug)]
pub struct ModuleElement<R: RealScalar> {
    function: AlgebraElement<R>,
    kernel: Arc<KernelGroupoid<R>>,
}

impl<R: RealScalar> PartialEq for ModuleElement<R> {
    fn eq(&self, other: &Self) -> bool {
        self.same_module(other) && self.function == other.function
    }
}

impl<R: RealScalar> ModuleElement<R> {
    pub fn new(function: AlgebraElement<R>, kernel: &Arc<KernelGroupoid<R>>) -> Result<Self> {
        let same = Arc::ptr_eq(function.parent(), kernel.parent()) || **function.parent() == **kernel.parent();
        if !same {
            return Err(Error::ParentMismatch);
        }
        Ok(ModuleElement { function, kernel: kernel.clone() })
    }

    pub fn zero(kernel: &Arc<KernelGroupoid<R>>) -> Self {
        ModuleElement { function: AlgebraElement::zero(kernel.parent().clone()), kernel: kernel.clone() }
    }

    pub fn function(&self) -> &AlgebraElement<R> {
        &self.function
    }

    pub fn into_function(self) -> AlgebraElement<R> {
        self.function
    }

    pub fn kernel(&self) -> &Arc<KernelGroupoid<R>> {
        &self.kernel
    }

    pub fn parent(&self) -> &Arc<DiscreteGroupoid> {
        self.kernel.parent()
    }

    pub fn cocycle(&self) -> &Cocycle<R> {
        self.kernel.cocycle()
    }

    pub fn get(&self, m: Morphism) -> Complex<R> {
        self.function.get(m)
    }

    pub fn is_zero(&self) -> bool {
        self.function.is_zero()
    }

    fn same_module(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.kernel, &other.kernel)
            || (self.function.same_parent(&other.function) && self.cocycle() == other.cocycle())
    }

    fn ensure_same(&self, other: &Self) -> Result<()> {
        if self.same_module(other) {
            Ok(())
        } else {
            Err(Error::ParentMismatch)
        }
    }

    fn with(&self, function: AlgebraElement<R>) -> Self {
        ModuleElement { function, kernel: self.kernel.clone() }
    }

    pub fn plus(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(self.with(self.function.plus(&other.function)?))
    }

    pub fn minus(&self, other: &Self) -> Result<Self> {
        self.ensure_same(other)?;
        Ok(self.with(self.function.minus(&other.function)?))
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        self.with(self.function.scale(s))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.same_module(other) && self.function.approx_eq(&other.function, tol)
    }

    /// `U_t Φ = e^{itc}Φ`.
    pub fn evolve(&self, t: &Complex<R>) -> Result<Self> {
        Ok(self.with(evolve(&self.function, self.cocycle(), t)?))
    }
}

/// `(g·Φ)(z) = Σ_{r(ξ)=r(z)} g(ξ)Φ(ξ⁻¹z)`, i.e. convolution.
pub fn act_left<R: RealScalar>(g: &AlgebraElement<R>, phi: &ModuleElement<R>) -> Result<ModuleElement<R>> {
    Ok(phi.with(g.convolve(&phi.function)?))
}

/// `(Φ·h)(z) = Σ_{χ∈ℋ, r(χ)=d(z)} Φ(zχ)h(χ⁻¹)`. Rejects `h` supported
/// outside `ker c`.
pub fn act_right<R: RealScalar>(phi: &ModuleElement<R>, h: &AlgebraElement<R>) -> Result<ModuleElement<R>> {
    if let Some(m) = h.support().find(|&m| !phi.kernel.contains(m)) {
        return Err(Error::OutsideKernel(m));
    }
    Ok(phi.with(phi.function.convolve(h)?))
}

/// `⟨Φ,Ψ⟩_ℋ(χ) = Σ_{d(w)=r(χ)} conj Φ(w) Ψ(wχ)`, i.e. `Φ* * Ψ` restricted to
/// `ker c`.
pub fn inner_product_h<R: RealScalar>(phi: &ModuleElement<R>, psi: &ModuleElement<R>) -> Result<AlgebraElement<R>> {
    phi.ensure_same(psi)?;
    let full = phi.function.involute().convolve(&psi.function)?;
    Ok(full.restrict(|m| phi.kernel.contains(m)))
}

/// One value `⟨Φ,Ψ⟩_ℋ(χ)` computed through an explicit choice of `z` with
/// `d(z) = r(χ)`: `Σ_{r(ξ)=r(z)} conj Φ(ξ⁻¹z) Ψ(ξ⁻¹zχ)`.
pub fn inner_product_h_at<R: RealScalar>(
    phi: &ModuleElement<R>,
    psi: &ModuleElement<R>,
    chi: Morphism,
    z: Morphism,
) -> Result<Complex<R>> {
    phi.ensure_same(psi)?;
    let g = phi.parent();
    if !phi.kernel.contains(chi) {
        return Err(Error::OutsideKernel(chi));
    }
    if g.source(z)? != g.range(chi)? {
        return Err(Error::Precondition(format!("d({z}) ≠ r({chi})")));
    }
    let mut total = Complex::zero();
    // the terms with ξ⁻¹z ∈ supp Φ are ξ = z w⁻¹ for w ∈ supp Φ, d(w) = d(z)
    for w in phi.function.support() {
        if g.source(w)? != g.source(z)? {
            continue;
        }
        let xi = g.compose(z, g.invert(w)?)?.expect("d(w) = d(z)");
        debug_assert_eq!(g.range(xi)?, g.range(z)?);
        let left = g.compose(g.invert(xi)?, z)?.expect("r(ξ) = r(z)");
        let right = g.compose(left, chi)?.expect("d(z) = r(χ)");
        total = total + phi.get(left).conj() * psi.get(right);
    }
    Ok(total)
}

/// First morphism in the window (all morphisms for explicit groupoids) on
/// which `c` does not vanish.
pub fn transitivity_witness<R: RealScalar>(kernel: &KernelGroupoid<R>, w: Window) -> Option<Morphism> {
    kernel.parent().morphisms(w).into_iter().find(|&m| !kernel.contains(m))
}

/// `⟨Φ,Ψ⟩_𝒢(η) = Σ_{χ∈ℋ, r(χ)=d(z)} Φ(ηzχ) conj Ψ(zχ)` with `r(z) = d(η)`,
/// i.e. `Φ * Ψ*`. Only well defined when ℋ acts transitively on fibers,
/// which for `ℋ = ker c` means `c ≡ 0`; checked on the window.
pub fn inner_product_g<R: RealScalar>(
    phi: &ModuleElement<R>,
    psi: &ModuleElement<R>,
    w: Window,
) -> Result<AlgebraElement<R>> {
    phi.ensure_same(psi)?;
    if let Some(m) = transitivity_witness(&phi.kernel, w) {
        return Err(Error::InnerProductUndefined(format!("c({m}) ≠ 0, so ker c is not transitive")));
    }
    let g = phi.parent();
    let mut out = AlgebraElement::zero(g.clone());
    for (a, x) in phi.function.iter() {
        for (b, y) in psi.function.iter() {
            // a = ηzχ, b = zχ
            if g.source(a)? != g.source(b)? {
                continue;
            }
            let eta = g.compose(a, g.invert(b)?)?.expect("d(a) = d(b)");
            out.add_at(eta, x.clone() * y.conj());
        }
    }
    Ok(out)
}

/// The derivation `(DΦ)(ξ) = c(ξ)Φ(ξ)`.
#[derive(Clone, Debug)]
pub struct OperatorD<R: RealScalar> {
    kernel: Arc<KernelGroupoid<R>>,
}

impl<R: RealScalar> OperatorD<R> {
    pub fn new(kernel: &Arc<KernelGroupoid<R>>) -> Self {
        OperatorD { kernel: kernel.clone() }
    }

    pub fn kernel(&self) -> &Arc<KernelGroupoid<R>> {
        &self.kernel
    }

    pub fn cocycle(&self) -> &Cocycle<R> {
        self.kernel.cocycle()
    }

    fn value(&self, m: Morphism) -> Result<R> {
        self.cocycle().value(self.kernel.parent(), m)
    }

    /// Matrix of `D` on the source fiber of `u` within the window: diagonal
    /// with entries `c(ξ)`, in the basis order of `source_fiber`.
    pub fn fiber_matrix(&self, u: UnitId, w: Window) -> Result<(Vec<Morphism>, Vec<R>)> {
        let basis = self.kernel.parent().source_fiber(u, w);
        let diag = basis.iter().map(|&m| self.value(m)).collect::<Result<_>>()?;
        Ok((basis, diag))
    }
}

pub fn apply_d<R: RealScalar>(d: &OperatorD<R>, phi: &ModuleElement<R>) -> Result<ModuleElement<R>> {
    Ok(phi.with(phi.function.try_pointwise(|m| Ok(real(d.value(m)?)))?))
}

/// `D` applied to an algebra element viewed as a module element.
pub fn derive<R: RealScalar>(d: &OperatorD<R>, f: &AlgebraElement<R>) -> Result<AlgebraElement<R>> {
    f.try_pointwise(|m| Ok(real(d.value(m)?)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Transform {
    /// `𝔯(D) = (1 + D²)^{−1/2}`.
    Resolvent,
    /// `𝔯(D)² = (1 + D²)^{−1}`.
    ResolventSquared,
    /// `𝔟(D) = D(1 + D²)^{−1/2}`.
    Bounded,
    /// `𝔠(D) = (D − i)(D + i)^{−1}`.
    Cayley,
}

/// Apply a function of `D`; all act diagonally.
pub fn transform_d<R: RealScalar>(d: &OperatorD<R>, phi: &ModuleElement<R>, kind: Transform) -> Result<ModuleElement<R>> {
    let symbol = |c: R| -> Result<Complex<R>> {
        let one_plus = R::one() + c.clone() * c.clone();
        Ok(match kind {
            Transform::ResolventSquared => real(R::one() / one_plus),
            Transform::Resolvent => real(R::one() / one_plus.sqrt().ok_or(Error::Inexact("√(1+c²)"))?),
            Transform::Bounded => real(c / one_plus.sqrt().ok_or(Error::Inexact("√(1+c²)"))?),
            Transform::Cayley => {
                let i = Complex::new(R::zero(), R::one());
                (real(c.clone()) - i.clone()) / (real(c) + i)
            }
        })
    };
    Ok(phi.with(phi.function.try_pointwise(|m| symbol(d.value(m)?))?))
}

/// One entry `k(ξ, [η])` of a kernel on `𝒢 ⋉ 𝒢/ℋ`; `class` has unit `d(ξ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct KernelEntry<R: RealScalar> {
    pub morphism: Morphism,
    pub class: Class<R>,
    pub value: Complex<R>,
}

/// A finitely supported kernel on `𝒢 ⋉ 𝒢/ℋ`, acting on `𝓔^𝒢` by
/// `(kΨ)(η) = Σ_{r(ξ)=r(η)} k(ξ, [ξ⁻¹η]) Ψ(ξ⁻¹η)`.
#[derive(Clone, Debug)]
pub struct CompactApproximant<R: RealScalar> {
    kernel: Arc<KernelGroupoid<R>>,
    entries: Vec<KernelEntry<R>>,
}

impl<R: RealScalar> CompactApproximant<R> {
    fn empty(kernel: &Arc<KernelGroupoid<R>>) -> Self {
        CompactApproximant { kernel: kernel.clone(), entries: Vec::new() }
    }

    fn add(&mut self, morphism: Morphism, class: Class<R>, value: Complex<R>) {
        if value.is_zero() {
            return;
        }
        match self.entries.iter_mut().find(|e| e.morphism == morphism && e.class.matches(&class)) {
            Some(e) => e.value = e.value.clone() + value,
            None => self.entries.push(KernelEntry { morphism, class, value }),
        }
        self.entries.retain(|e| !e.value.is_zero());
    }

    pub fn entries(&self) -> &[KernelEntry<R>] {
        &self.entries
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn apply(&self, psi: &ModuleElement<R>) -> Result<ModuleElement<R>> {
        let g = psi.parent();
        let c = psi.cocycle();
        let mut out = AlgebraElement::zero(g.clone());
        for e in &self.entries {
            let d = g.source(e.morphism)?;
            for (zeta, v) in psi.function.iter() {
                if g.range(zeta)? != d || !Class::of(g, c, zeta)?.matches(&e.class) {
                    continue;
                }
                let eta = g.compose(e.morphism, zeta)?.expect("d(ξ) = r(ζ)");
                out.add_at(eta, e.value.clone() * v.clone());
            }
        }
        Ok(psi.with(out))
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for e in &other.entries {
            out.add(e.morphism, e.class.clone(), -e.value.clone());
        }
        out
    }

    /// Sup over range classes `[ξη] = (r(ξ), c(ξ) + v)` of `Σ |k|`.
    pub fn nu_norm(&self) -> Result<f64> {
        let g = self.kernel.parent();
        let c = self.kernel.cocycle();
        let keyed = self
            .entries
            .iter()
            .map(|e| {
                let class = Class { unit: g.range(e.morphism)?, value: c.value(g, e.morphism)? + e.class.value.clone() };
                Ok((class, modulus(&e.value)))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(max_class_sum(keyed))
    }

    /// Sup over source classes `[η]` of `Σ |k|`.
    pub fn nu_inv_norm(&self) -> f64 {
        max_class_sum(self.entries.iter().map(|e| (e.class.clone(), modulus(&e.value))).collect())
    }

    pub fn i_norm(&self) -> Result<f64> {
        Ok(self.nu_norm()?.max(self.nu_inv_norm()))
    }
}

fn max_class_sum<R: RealScalar>(keyed: Vec<(Class<R>, f64)>) -> f64 {
    let mut sums: Vec<(Class<R>, f64)> = Vec::new();
    for (class, v) in keyed {
        match sums.iter_mut().find(|(k, _)| k.matches(&class)) {
            Some((_, s)) => *s += v,
            None => sums.push((class, v)),
        }
    }
    sums.into_iter().map(|(_, s)| s).fold(0.0, f64::max)
}

/// Classes `(u, v)` with `|v| ≤ m`, found among morphisms of degree at most
/// `m` with range `u` (all of them for explicit groupoids).
fn classes_at<R: RealScalar>(kernel: &KernelGroupoid<R>, u: UnitId, m: u32) -> Result<Vec<Class<R>>> {
    let g = kernel.parent();
    let bound = R::from_i64(i64::from(m));
    let mut classes: Vec<Class<R>> = Vec::new();
    for eta in g.range_fiber(u, Window::new(m)) {
        let class = Class::of(g, kernel.cocycle(), eta)?;
        if class.value.abs() <= bound && !classes.iter().any(|k| k.matches(&class)) {
            classes.push(class);
        }
    }
    Ok(classes)
}

/// `k_f^m(ξ, [η]) = (1 + c(η)²)⁻¹ f(ξ)` for `|c(η)| ≤ m`, zero otherwise.
pub fn cutoff_approximant<R: RealScalar>(
    f: &AlgebraElement<R>,
    d: &OperatorD<R>,
    m: u32,
) -> Result<CompactApproximant<R>> {
    let g = d.kernel.parent();
    let mut k = CompactApproximant::empty(&d.kernel);
    for (xi, v) in f.iter() {
        for class in classes_at(&d.kernel, g.source(xi)?, m)? {
            let weight = R::one() / (R::one() + class.value.clone() * class.value.clone());
            let value = v.clone() * real(weight);
            k.add(xi, class, value);
        }
    }
    Ok(k)
}

/// `(ρ_k Φ)(ξ) = Φ(ξ)` if `c(ξ) = k`, else 0.
pub fn spectral_projection_rho<R: RealScalar>(k: i64, phi: &ModuleElement<R>) -> Result<ModuleElement<R>> {
    let (g, c) = (phi.parent(), phi.cocycle());
    if !c.is_integral() {
        return Err(Error::NotIntegral);
    }
    let mut keep = Vec::new();
    for m in phi.function.support() {
        if c.int_value(g, m)? == k {
            keep.push(m);
        }
    }
    Ok(phi.with(phi.function.restrict(|m| keep.contains(&m))))
}

/// `f_k(ξ, [η]) = f(ξ)·1[c(η) = k]`, whose action is `Ψ ↦ f * ρ_kΨ`.
pub fn ssa_witness<R: RealScalar>(
    f: &AlgebraElement<R>,
    k: i64,
    kernel: &Arc<KernelGroupoid<R>>,
) -> Result<CompactApproximant<R>> {
    let (g, c) = (kernel.parent(), kernel.cocycle());
    if !c.is_integral() {
        return Err(Error::NotIntegral);
    }
    let reach = u32::try_from(k.unsigned_abs()).map_err(|_| Error::Precondition("k out of range".into()))?;
    let mut out = CompactApproximant::empty(kernel);
    for (xi, v) in f.iter() {
        let u = g.source(xi)?;
        let mut reachable = false;
        for eta in g.range_fiber(u, Window::new(reach)) {
            if c.int_value(g, eta)? == k {
                reachable = true;
                break;
            }
        }
        if reachable {
            out.add(xi, Class { unit: u, value: R::from_i64(k) }, v.clone());
        }
    }
    Ok(out)
}

/// `ρ_k` via its defining integral `(1/2π)∫₀^{2π} e^{−ikt} U_t dt`,
/// evaluated by an `n`-point trapezoid rule in floating point.
pub fn rho_by_quadrature(k: i64, phi: &ModuleElement<f64>, n: usize) -> Result<ModuleElement<f64>> {
    let mut acc = ModuleElement::zero(phi.kernel());
    for j in 0..n {
        let t = 2.0 * std::f64::consts::PI * j as f64 / n as f64;
        let weight = Complex::new(0.0, -(k as f64) * t).exp() / n as f64;
        acc = acc.plus(&phi.evolve(&Complex::new(t, 0.0))?.scale(&weight))?;
    }
    Ok(acc)
}
