//! The index pairing `Ind_μ: K₁(C*(𝒢)) → ℂ` of an integral cocycle with
//! unitaries over `C_c(𝒢)`, by τ-weighted Toeplitz compression and,
//! independently, by spectral flow.
//!
//! Sign convention: the degree-one shift on `X ⋊ ℤ` with a probability
//! measure has index −1.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::{One, Zero};

use crate::algebra::AlgebraElement;
use crate::bimodule::ModuleElement;
use crate::cocycle::{Cocycle, KERNEL_TOL};
use crate::error::{Error, Result};
use crate::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use crate::linalg::{self, Rank};
use crate::measures::UnitMeasure;
use crate::scalar::{to_c64, RealScalar};

/// Singular values at or below this count as zero.
pub const RANK_THRESHOLD: f64 = 1e-9;
/// Nonzero singular values must be at least this large.
pub const RANK_GAP: f64 = 1e-6;
/// Largest step count spectral flow refines to before giving up.
pub const MAX_FLOW_STEPS: usize = 4096;

/// `(PΦ)(ξ) = Φ(ξ)` if `c(ξ) ≥ 0`, else 0.
pub fn positive_spectral_projection<R: RealScalar>(phi: &ModuleElement<R>) -> Result<ModuleElement<R>> {
    let (g, c) = (phi.parent(), phi.cocycle());
    let mut keep = Vec::new();
    for m in phi.function().support() {
        if is_nonnegative(&c.value(g, m)?) {
            keep.push(m);
        }
    }
    ModuleElement::new(phi.function().restrict(|m| keep.contains(&m)), phi.kernel())
}

fn is_nonnegative<R: RealScalar>(v: &R) -> bool {
    *v >= R::zero() || v.near(&R::zero(), KERNEL_TOL)
}

/// `Σ_x δ_{(x, n)}` on `X ⋊ ℤ`: the `n`-th power of the degree-one shift.
pub fn shift<R: RealScalar>(g: &Arc<DiscreteGroupoid>, n: i64) -> Result<AlgebraElement<R>> {
    if !matches!(**g, DiscreteGroupoid::Transformation(_)) {
        return Err(Error::Precondition("shift needs a transformation groupoid".into()));
    }
    AlgebraElement::from_terms(g.clone(), g.units().map(|x| (Morphism::Trans(x, n), Complex::one())))
}

/// A `k × k` matrix over `C_c(𝒢)`, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitaryElement<R: RealScalar> {
    size: usize,
    entries: Vec<AlgebraElement<R>>,
}

impl<R: RealScalar> UnitaryElement<R> {
    pub fn new(size: usize, entries: Vec<AlgebraElement<R>>) -> Result<Self> {
        if size == 0 || entries.len() != size * size {
            return Err(Error::Precondition(format!("{} entries for a {size}×{size} matrix", entries.len())));
        }
        if entries.iter().any(|e| !e.same_parent(&entries[0])) {
            return Err(Error::ParentMismatch);
        }
        Ok(UnitaryElement { size, entries })
    }

    pub fn scalar(f: AlgebraElement<R>) -> Self {
        UnitaryElement { size: 1, entries: vec![f] }
    }

    pub fn identity(g: &Arc<DiscreteGroupoid>, size: usize) -> Self {
        let entries = (0..size * size)
            .map(|i| {
                if i / size == i % size {
                    AlgebraElement::identity(g.clone())
                } else {
                    AlgebraElement::zero(g.clone())
                }
            })
            .collect();
        UnitaryElement { size, entries }
    }

    /// Block-diagonal sum.
    pub fn direct_sum(&self, other: &Self) -> Result<Self> {
        let n = self.size + other.size;
        let zero = AlgebraElement::zero(self.parent().clone());
        let mut entries = vec![zero; n * n];
        for i in 0..self.size {
            for j in 0..self.size {
                entries[i * n + j] = self.entry(i, j).clone();
            }
        }
        for i in 0..other.size {
            for j in 0..other.size {
                entries[(self.size + i) * n + self.size + j] = other.entry(i, j).clone();
            }
        }
        Self::new(n, entries)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn entry(&self, i: usize, j: usize) -> &AlgebraElement<R> {
        &self.entries[i * self.size + j]
    }

    pub fn parent(&self) -> &Arc<DiscreteGroupoid> {
        self.entries[0].parent()
    }

    pub fn scale(&self, s: &Complex<R>) -> Self {
        UnitaryElement { size: self.size, entries: self.entries.iter().map(|e| e.scale(s)).collect() }
    }

    pub fn product(&self, other: &Self) -> Result<Self> {
        if self.size != other.size {
            return Err(Error::Precondition("amplification sizes differ".into()));
        }
        let n = self.size;
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = AlgebraElement::zero(self.parent().clone());
                for l in 0..n {
                    acc = acc.plus(&self.entry(i, l).convolve(other.entry(l, j))?)?;
                }
                entries.push(acc);
            }
        }
        Self::new(n, entries)
    }

    /// `(u*)_{ij} = (u_{ji})*`.
    pub fn adjoint(&self) -> Self {
        let n = self.size;
        let entries = (0..n * n).map(|i| self.entry(i % n, i / n).involute()).collect();
        UnitaryElement { size: n, entries }
    }

    pub fn degree_spread(&self) -> i64 {
        self.entries.iter().map(AlgebraElement::degree_spread).max().unwrap_or(0)
    }

    fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.size == other.size && self.entries.iter().zip(&other.entries).all(|(a, b)| a.approx_eq(b, tol))
    }

    /// `u*u = uu* = 1`, exactly for exact fields and to `tol` otherwise.
    pub fn check_unitary(&self, tol: f64) -> Result<()> {
        let one = Self::identity(self.parent(), self.size);
        let star = self.adjoint();
        if !star.product(self)?.approx_eq(&one, tol) {
            return Err(Error::NotUnitary("u*u ≠ 1".into()));
        }
        if !self.product(&star)?.approx_eq(&one, tol) {
            return Err(Error::NotUnitary("uu* ≠ 1".into()));
        }
        Ok(())
    }

    /// `u` applied to the basis vector `e_j ⊗ δ_ξ`, as a map `(i, η) ↦ value`.
    fn column(&self, j: usize, xi: Morphism) -> Result<BTreeMap<(usize, Morphism), Complex<R>>> {
        let g = self.parent();
        let mut out = BTreeMap::new();
        for i in 0..self.size {
            for (a, v) in self.entry(i, j).iter() {
                if let Some(eta) = g.compose(a, xi)? {
                    let slot = out.entry((i, eta)).or_insert_with(Complex::zero);
                    *slot = slot.clone() + v.clone();
                }
            }
        }
        out.retain(|_, v: &mut Complex<R>| !v.is_zero());
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Compression,
    SpectralFlow,
}

#[derive(Clone, Debug, PartialEq)]
pub enum IndexStatus {
    Determined,
    Indeterminate(String),
}

/// Per-unit contribution before weighting by `μ(x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UnitCount {
    pub unit: UnitId,
    /// `dim ker` for compression, eigenvalues rising through the level for flow.
    pub kernel: usize,
    /// `dim coker` for compression, eigenvalues falling through the level for flow.
    pub cokernel: usize,
}

impl UnitCount {
    pub fn net(&self) -> i64 {
        self.kernel as i64 - self.cokernel as i64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndexReport<R: RealScalar> {
    pub value: R,
    pub per_unit: Vec<UnitCount>,
    pub window: Window,
    /// Same value at `M + 1`.
    pub stable: bool,
    pub method: Method,
    pub status: IndexStatus,
    /// Spectral flow steps actually used.
    pub steps: Option<usize>,
    /// For [`index_mu`]: whether the other method agreed.
    pub agrees: Option<bool>,
}

impl<R: RealScalar> IndexReport<R> {
    pub fn is_determined(&self) -> bool {
        self.status == IndexStatus::Determined
    }
}

fn check_inputs<R: RealScalar>(
    u: &UnitaryElement<R>,
    c: &Cocycle<R>,
    mu: &UnitMeasure<R>,
    w: Window,
) -> Result<()> {
    if !c.is_integral() {
        return Err(Error::NotIntegral);
    }
    if mu.len() != u.parent().unit_count() {
        return Err(Error::Precondition("measure does not match the unit space".into()));
    }
    let needed = u.degree_spread() + 2;
    if !w.contains(needed) {
        return Err(Error::WindowTooSmall { window: w.m, needed });
    }
    u.check_unitary(1e-10)
}

fn weighted<R: RealScalar>(counts: &[UnitCount], mu: &UnitMeasure<R>) -> R {
    counts.iter().fold(R::zero(), |acc, k| acc + mu.weight(k.unit).clone() * R::from_i64(k.net()))
}

/// Truncated positive-part basis `{(i, ξ) : d(ξ) = x, 0 ≤ c(ξ) ≤ M}`.
fn positive_basis<R: RealScalar>(
    g: &DiscreteGroupoid,
    c: &Cocycle<R>,
    size: usize,
    x: UnitId,
    w: Window,
) -> Result<Vec<(usize, Morphism)>> {
    let top = i64::from(w.m);
    let mut basis = Vec::new();
    for xi in g.source_fiber(x, w) {
        let v = c.int_value(g, xi)?;
        if (0..=top).contains(&v) {
            basis.extend((0..size).map(|i| (i, xi)));
        }
    }
    Ok(basis)
}

/// `dim ker P u P` on the truncated positive part. Images are computed in
/// full and then projected, so every kernel vector found is a genuine one.
fn compressed_kernel<R: RealScalar>(u: &UnitaryElement<R>, c: &Cocycle<R>, x: UnitId, w: Window) -> Result<Rank> {
    let g = u.parent();
    let basis = positive_basis(g, c, u.size(), x, w)?;
    let mut rows: BTreeMap<(usize, Morphism), usize> = BTreeMap::new();
    let mut columns = Vec::with_capacity(basis.len());
    for &(j, xi) in &basis {
        let mut col = Vec::new();
        for ((i, eta), v) in u.column(j, xi)? {
            if c.int_value(g, eta)? >= 0 {
                let next = rows.len();
                col.push((*rows.entry((i, eta)).or_insert(next), v));
            }
        }
        columns.push(col);
    }
    let mut matrix = DMatrix::from_element(rows.len(), basis.len(), Complex::zero());
    for (j, col) in columns.into_iter().enumerate() {
        for (i, v) in col {
            matrix[(i, j)] = v;
        }
    }
    Ok(match linalg::rank(&matrix, RANK_THRESHOLD, RANK_GAP) {
        Rank::Determined(r) => Rank::Determined(basis.len() - r),
        other => other,
    })
}

fn compression_once<R: RealScalar>(
    u: &UnitaryElement<R>,
    c: &Cocycle<R>,
    mu: &UnitMeasure<R>,
    w: Window,
) -> Result<(R, Vec<UnitCount>, IndexStatus)> {
    let star = u.adjoint();
    let mut counts = Vec::new();
    let mut status = IndexStatus::Determined;
    for x in u.parent().units() {
        match (compressed_kernel(u, c, x, w)?, compressed_kernel(&star, c, x, w)?) {
            (Rank::Determined(kernel), Rank::Determined(cokernel)) => counts.push(UnitCount { unit: x, kernel, cokernel }),
            (Rank::Indeterminate { smallest_ambiguous }, _) | (_, Rank::Indeterminate { smallest_ambiguous }) => {
                status = IndexStatus::Indeterminate(format!(
                    "singular value {smallest_ambiguous:e} at unit {x} lies in ({RANK_THRESHOLD:e}, {RANK_GAP:e})"
                ));
                counts.push(UnitCount { unit: x, kernel: 0, cokernel: 0 });
            }
        }
    }
    Ok((weighted(&counts, mu), counts, status))
}

/// `Σ_x μ(x)(dim ker − dim coker)` of the compression `P u P` to
/// `c ≥ 0`, with the cokernel taken as `ker P u* P`.
pub fn tau_index_compression<R: RealScalar>(
    u: &UnitaryElement<R>,
    c: &Cocycle<R>,
    mu: &UnitMeasure<R>,
    w: Window,
) -> Result<IndexReport<R>> {
    check_inputs(u, c, mu, w)?;
    let (value, per_unit, status) = compression_once(u, c, mu, w)?;
    let (next, _, next_status) = compression_once(u, c, mu, w.grow(1))?;
    let stable = next_status == IndexStatus::Determined && next == value;
    Ok(IndexReport { value, per_unit, window: w, stable, method: Method::Compression, status, steps: None, agrees: None })
}

/// Fiber matrices of `D` and of the compression of `u D u*` on
/// `{(i, ξ) : d(ξ) = x, |deg ξ| ≤ M}`.
fn flow_endpoints<R: RealScalar>(
    u: &UnitaryElement<R>,
    c: &Cocycle<R>,
    x: UnitId,
    w: Window,
) -> Result<(linalg::CMatrix, linalg::CMatrix)> {
    let g = u.parent();
    let n = u.size();
    let fiber = g.source_fiber(x, w);
    let basis: Vec<(usize, Morphism)> = fiber.iter().flat_map(|&xi| (0..n).map(move |i| (i, xi))).collect();
    let index: BTreeMap<(usize, Morphism), usize> = basis.iter().enumerate().map(|(k, b)| (*b, k)).collect();
    let star = u.adjoint();
    let dim = basis.len();
    let mut d = linalg::CMatrix::zeros(dim, dim);
    let mut a = linalg::CMatrix::zeros(dim, dim);
    for (col, &(j, xi)) in basis.iter().enumerate() {
        d[(col, col)] = Complex::new(c.int_value(g, xi)? as f64, 0.0);
        // u D u* e_col, in full
        let mut image: BTreeMap<(usize, Morphism), Complex<f64>> = BTreeMap::new();
        for ((l, eta), v) in star.column(j, xi)? {
            let scaled = to_c64(&v) * c.int_value(g, eta)? as f64;
            for ((i, zeta), y) in u.column(l, eta)? {
                *image.entry((i, zeta)).or_insert_with(Complex::zero) += to_c64(&y) * scaled;
            }
        }
        for (key, v) in image {
            if let Some(&row) = index.get(&key) {
                a[(row, col)] += v;
            }
        }
    }
    Ok((d, a))
}

/// Eigenvalues of `(1 − s)D + sA` below `level`; `None` if one sits within
/// `margin` of the level.
fn count_below(d: &linalg::CMatrix, a: &linalg::CMatrix, s: f64, level: f64, margin: f64) -> Option<usize> {
    let m = d.scale(1.0 - s) + a.scale(s);
    let values = linalg::hermitian_eigenvalues(&m);
    if values.iter().any(|v| (v - level).abs() <= margin) {
        return None;
    }
    Some(values.iter().filter(|&&v| v < level).count())
}

/// Signed crossings of the level `1 − √2` along `D_s = (1 − s)D + s·uDu*`
/// on one fiber, with automatic refinement of the step count. The level
/// lies strictly between the integer eigenvalues −1 and 0 of `D` and is never
/// hit by straight-line crossings between integers at dyadic grid points.
fn fiber_flow(d: &linalg::CMatrix, a: &linalg::CMatrix, steps: usize) -> std::result::Result<(UnitCount, usize), String> {
    const LEVEL: f64 = 1.0 - std::f64::consts::SQRT_2;
    const MARGIN: f64 = 1e-9;
    let mut steps = steps;
    'refine: while steps <= MAX_FLOW_STEPS {
        let (mut down, mut up) = (0usize, 0usize);
        let Some(mut previous) = count_below(d, a, 0.0, LEVEL, MARGIN) else {
            return Err("an eigenvalue of D sits on the crossing level".into());
        };
        for k in 1..=steps {
            let s = k as f64 / steps as f64;
            let Some(now) = count_below(d, a, s, LEVEL, MARGIN) else {
                steps *= 2;
                continue 'refine;
            };
            if now > previous {
                down += now - previous;
            } else {
                up += previous - now;
            }
            previous = now;
        }
        return Ok((UnitCount { unit: UnitId(0), kernel: up, cokernel: down }, steps));
    }
    Err(format!("eigenvalue on the crossing level after refining to {MAX_FLOW_STEPS} steps"))
}

fn flow_once<R: RealScalar>(
    u: &UnitaryElement<R>,
    c: &Cocycle<R>,
    mu: &UnitMeasure<R>,
    w: Window,
    steps: usize,
) -> Result<(R, Vec<UnitCount>, IndexStatus, usize)> {
    let mut counts = Vec::new();
    let mut status = IndexStatus::Determined;
    let mut used = steps;
    for x in u.parent().units() {
        let (d, a) = flow_endpoints(u, c, x, w)?;
        match fiber_flow(&d, &a, steps) {
            Ok((count, s)) => {
                used = used.max(s);
                counts.push(UnitCount { unit: x, ..count });
            }
            Err(why) => {
                status = IndexStatus::Indeterminate(format!("unit {x}: {why}"));
                counts.push(UnitCount { unit: x, kernel: 0, cokernel: 0 });
            }
        }
    }
    Ok((weighted(&counts, mu), counts, status, used))
}

/// Spectral flow of the straight path from `D` to `uDu*`, weighted by `μ`.
pub fn spectral_flow<R: RealScalar>(
    u: &UnitaryElement<R>,
    c: &Cocycle<R>,
    mu: &UnitMeasure<R>,
    w: Window,
    steps: usize,
) -> Result<IndexReport<R>> {
    if steps < 2 {
        return Err(Error::Precondition("spectral flow needs at least 2 steps".into()));
    }
    check_inputs(u, c, mu, w)?;
    let (value, per_unit, status, used) = flow_once(u, c, mu, w, steps)?;
    let (next, _, next_status, _) = flow_once(u, c, mu, w.grow(1), steps)?;
    let stable = next_status == IndexStatus::Determined && next == value;
    Ok(IndexReport {
        value,
        per_unit,
        window: w,
        stable,
        method: Method::SpectralFlow,
        status,
        steps: Some(used),
        agrees: None,
    })
}

/// `Ind_μ(u)` by compression, cross-checked by spectral flow (64 steps).
/// Rejects data where `μ` is not invariant under `ker c`.
pub fn index_mu<R: RealScalar>(
    u: &UnitaryElement<R>,
    c: &Cocycle<R>,
    mu: &UnitMeasure<R>,
    w: Window,
) -> Result<IndexReport<R>> {
    let g = u.parent();
    for m in g.morphisms(w) {
        if c.vanishes_at(g, m)? && !mu.modular_ratio(g, m)?.near(&R::one(), KERNEL_TOL) {
            return Err(Error::Precondition(format!("Δ({m}) ≠ 1 on ker c: τ is not a trace there")));
        }
    }
    let mut report = tau_index_compression(u, c, mu, w)?;
    let flow = spectral_flow(u, c, mu, w, 64)?;
    report.agrees = Some(flow.is_determined() && report.is_determined() && flow.value.near(&report.value, 1e-9));
    report.steps = flow.steps;
    Ok(report)
}

/// One sampled instance of `Ind(uv) = Ind(u) + Ind(v)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HomomorphismSample<R: RealScalar> {
    pub left: R,
    pub right: R,
    pub product: R,
    pub holds: bool,
}

pub fn check_homomorphism<R: RealScalar>(
    u: &UnitaryElement<R>,
    v: &UnitaryElement<R>,
    c: &Cocycle<R>,
    mu: &UnitMeasure<R>,
    w: Window,
) -> Result<HomomorphismSample<R>> {
    let uv = u.product(v)?;
    let need = Window::new(w.m.max(uv.degree_spread() as u32 + 2));
    let left = tau_index_compression(u, c, mu, need)?.value;
    let right = tau_index_compression(v, c, mu, need)?.value;
    let product = tau_index_compression(&uv, c, mu, need)?.value;
    let holds = product.near(&(left.clone() + right.clone()), 1e-9);
    Ok(HomomorphismSample { left, right, product, holds })
}
