//! Quasi-invariant measures on the unit space, the modular function, the
//! functional τ and the KMS/trace identities.

use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::AlgebraElement;
use crate::cocycle::{evolve, Cocycle, KernelGroupoid};
use crate::error::{Error, Result};
use crate::groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
use crate::sample;
use crate::scalar::{complex_near, real, to_c64, RealScalar};

/// Strictly positive weights on the units.
#[derive(Clone, Debug, PartialEq)]
pub struct UnitMeasure<R: RealScalar> {
    weights: Vec<R>,
}

impl<R: RealScalar> UnitMeasure<R> {
    pub fn new(weights: Vec<R>) -> Result<Self> {
        if let Some(x) = weights.iter().position(|w| *w <= R::zero()) {
            return Err(Error::NonPositiveWeight(x));
        }
        Ok(UnitMeasure { weights })
    }

    pub fn uniform(n: usize, weight: R) -> Result<Self> {
        Self::new(vec![weight; n])
    }

    pub fn weight(&self, x: UnitId) -> &R {
        &self.weights[x.0]
    }

    pub fn weights(&self) -> &[R] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn total_mass(&self) -> R {
        self.weights.iter().cloned().fold(R::zero(), |a, b| a + b)
    }

    pub fn normalized(&self) -> Self {
        let total = self.total_mass();
        UnitMeasure { weights: self.weights.iter().map(|w| w.clone() / total.clone()).collect() }
    }

    /// `Δ(ξ) = μ(r(ξ)) / μ(d(ξ))`.
    pub fn modular_ratio(&self, g: &DiscreteGroupoid, m: Morphism) -> Result<R> {
        let (r, d) = (g.range(m)?, g.source(m)?);
        Ok(self.weight(r).clone() / self.weight(d).clone())
    }

    fn check_units(&self, g: &DiscreteGroupoid) -> Result<()> {
        if self.weights.len() == g.unit_count() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "measure has {} weights for {} units",
                self.weights.len(),
                g.unit_count()
            )))
        }
    }
}

/// The modular function of a measure and its Radon–Nikodym cocycle.
#[derive(Clone, Debug)]
pub struct ModularData<R: RealScalar> {
    parent: Arc<DiscreteGroupoid>,
    measure: UnitMeasure<R>,
}

impl<R: RealScalar> ModularData<R> {
    /// `Δ(ξ)`.
    pub fn delta(&self, m: Morphism) -> Result<R> {
        self.measure.modular_ratio(&self.parent, m)
    }

    /// `c_μ = ln Δ`.
    pub fn cocycle(&self) -> Cocycle<R> {
        Cocycle::log_modular(self.measure.clone())
    }

    pub fn measure(&self) -> &UnitMeasure<R> {
        &self.measure
    }

    /// Whether `Δ ≡ 1` on every morphism with `|degree| ≤ M` (exhaustive for
    /// explicit groupoids). Returns a witness of least `|degree|` otherwise.
    pub fn unimodular_witness(&self, w: Window) -> Result<Option<Morphism>> {
        let mut candidates = self.parent.morphisms(w);
        candidates.sort_by_key(|&m| self.parent.degree(m).map(|n| (n.abs(), n < 0)));
        for m in candidates {
            if !self.delta(m)?.near(&R::one(), 1e-12) {
                return Ok(Some(m));
            }
        }
        Ok(None)
    }
}

pub fn modular_function<R: RealScalar>(g: &Arc<DiscreteGroupoid>, mu: &UnitMeasure<R>) -> Result<ModularData<R>> {
    mu.check_units(g)?;
    Ok(ModularData { parent: g.clone(), measure: mu.clone() })
}

/// `τ(f) = Σ_x f(unit_x) μ(x)`.
pub fn tau<R: RealScalar>(f: &AlgebraElement<R>, mu: &UnitMeasure<R>) -> Complex<R> {
    let g = f.parent();
    g.units()
        .map(|x| f.get(g.unit(x)) * real(mu.weight(x).clone()))
        .fold(Complex::zero(), |a, b| a + b)
}

/// One sampled identity with both sides recorded.
#[derive(Clone, Debug, PartialEq)]
pub struct IdentitySample<R: RealScalar> {
    pub lhs: Complex<R>,
    pub rhs: Complex<R>,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IdentityReport<R: RealScalar> {
    pub samples: Vec<IdentitySample<R>>,
    /// Largest `|lhs − rhs|` seen.
    pub max_defect: f64,
}

impl<R: RealScalar> IdentityReport<R> {
    fn new() -> Self {
        IdentityReport { samples: Vec::new(), max_defect: 0.0 }
    }

    fn push(&mut self, lhs: Complex<R>, rhs: Complex<R>, tol: f64) {
        let holds = complex_near(&lhs, &rhs, tol);
        self.max_defect = self.max_defect.max((to_c64(&lhs) - to_c64(&rhs)).norm());
        self.samples.push(IdentitySample { lhs, rhs, holds });
    }

    pub fn holds(&self) -> bool {
        self.samples.iter().all(|s| s.holds)
    }

    pub fn failures(&self) -> usize {
        self.samples.iter().filter(|s| !s.holds).count()
    }
}

/// Where the trace identity is checked.
#[derive(Clone, Debug)]
pub enum TraceDomain<R: RealScalar> {
    Whole(Arc<DiscreteGroupoid>),
    Kernel(KernelGroupoid<R>),
}

/// Sample parameters shared by the randomized identity checks.
#[derive(Clone, Copy, Debug)]
pub struct SampleSpec {
    pub budget: usize,
    pub seed: u64,
    pub window: Window,
    pub terms: usize,
    pub tol: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec { budget: 100, seed: 0, window: Window::new(4), terms: 5, tol: 1e-12 }
    }
}

/// `τ(f * g) = τ(g * f)` on random elements of the (sub)groupoid. Rejects
/// the request with a witness if `Δ ≢ 1` there.
pub fn check_trace_unimodular<R: RealScalar>(
    domain: &TraceDomain<R>,
    mu: &UnitMeasure<R>,
    spec: SampleSpec,
) -> Result<IdentityReport<R>> {
    let g = match domain {
        TraceDomain::Whole(g) => g.clone(),
        TraceDomain::Kernel(k) => k.parent().clone(),
    };
    mu.check_units(&g)?;
    let in_domain = |m: Morphism| match domain {
        TraceDomain::Whole(_) => true,
        TraceDomain::Kernel(k) => k.contains(m),
    };
    let probe = Window::new(spec.window.m.max(g.unit_count() as u32 + 1));
    let mut candidates = g.morphisms(probe);
    candidates.sort_by_key(|&m| g.degree(m).map(|n| (n.abs(), n < 0)));
    for m in candidates {
        if in_domain(m) && !mu.modular_ratio(&g, m)?.near(&R::one(), spec.tol) {
            return Err(Error::Precondition(format!("Δ({m}) ≠ 1: τ is not a trace on this domain")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut report = IdentityReport::new();
    for _ in 0..spec.budget {
        let f: AlgebraElement<R> = sample::element_where(&g, spec.window, spec.terms, &mut rng, in_domain);
        let h: AlgebraElement<R> = sample::element_where(&g, spec.window, spec.terms, &mut rng, in_domain);
        report.push(tau(&f.convolve(&h)?, mu), tau(&h.convolve(&f)?, mu), spec.tol);
    }
    Ok(report)
}

/// Results of the KMS check at β = −1.
#[derive(Clone, Debug)]
pub struct KmsReport<R: RealScalar> {
    /// `τ(f * u_{−i}(g)) = τ(g * f)`, exact for exact fields.
    pub boundary: IdentityReport<R>,
    /// `F(t) = τ(f * u_t(g))` against its closed form `Σ μ(r(ξ)) f(ξ) e^{itc(ξ⁻¹)} g(ξ⁻¹)`
    /// and the shifted boundary `F(t − i) = τ(u_t(g) * f)`, in floating point.
    pub strip: IdentityReport<f64>,
}

impl<R: RealScalar> KmsReport<R> {
    pub fn holds(&self) -> bool {
        self.boundary.holds() && self.strip.holds()
    }
}

/// Checks that τ is a KMS state at β = −1 for the one-parameter group of the
/// Radon–Nikodym cocycle.
pub fn check_kms<R: RealScalar>(
    g: &Arc<DiscreteGroupoid>,
    mu: &UnitMeasure<R>,
    spec: SampleSpec,
) -> Result<KmsReport<R>> {
    mu.check_units(g)?;
    let c = Cocycle::log_modular(mu.clone());
    let minus_i = Complex::new(R::zero(), -R::one());
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut boundary = IdentityReport::new();
    let mut strip = IdentityReport::new();

    let mu_f: UnitMeasure<f64> = UnitMeasure::new(mu.weights().iter().map(RealScalar::to_f64).collect())?;
    let c_f = Cocycle::log_modular(mu_f.clone());

    for _ in 0..spec.budget {
        let f: AlgebraElement<R> = sample::element(g, spec.window, spec.terms, &mut rng);
        let h: AlgebraElement<R> = sample::element(g, spec.window, spec.terms, &mut rng);
        let lhs = tau(&f.convolve(&evolve(&h, &c, &minus_i)?)?, mu);
        let rhs = tau(&h.convolve(&f)?, mu);
        boundary.push(lhs, rhs, spec.tol);

        let t = sample::small_real::<f64, _>(&mut rng);
        let (ff, hf) = (to_float(&f), to_float(&h));
        let direct = tau(&ff.convolve(&evolve(&hf, &c_f, &Complex::new(t, 0.0))?)?, &mu_f);
        let closed = kms_closed_form(&ff, &hf, &c_f, &mu_f, Complex::new(t, 0.0))?;
        strip.push(direct, closed, 1e-10);

        let shifted = kms_closed_form(&ff, &hf, &c_f, &mu_f, Complex::new(t, -1.0))?;
        let flipped = tau(&evolve(&hf, &c_f, &Complex::new(t, 0.0))?.convolve(&ff)?, &mu_f);
        strip.push(shifted, flipped, 1e-10);
    }
    Ok(KmsReport { boundary, strip })
}

/// `F(z) = Σ_ξ μ(r(ξ)) f(ξ) e^{izc(ξ⁻¹)} g(ξ⁻¹)`, the entire continuation of
/// `t ↦ τ(f * u_t(g))` for finitely supported `f`, `g`.
pub fn kms_closed_form(
    f: &AlgebraElement<f64>,
    h: &AlgebraElement<f64>,
    c: &Cocycle<f64>,
    mu: &UnitMeasure<f64>,
    z: Complex<f64>,
) -> Result<Complex<f64>> {
    let g = f.parent();
    let mut total = Complex::zero();
    for (xi, a) in f.iter() {
        let inv = g.invert(xi)?;
        let b = h.get(inv);
        if b.is_zero() {
            continue;
        }
        let phase = (Complex::<f64>::i() * z * c.value(g, inv)?).exp();
        total += a * b * phase * mu.weight(g.range(xi)?);
    }
    Ok(total)
}

/// Lossy conversion to the floating-point regime.
pub fn to_float<R: RealScalar>(f: &AlgebraElement<R>) -> AlgebraElement<f64> {
    AlgebraElement::from_terms(f.parent().clone(), f.iter().map(|(m, v)| (m, to_c64(v))))
        .expect("support is valid")
}
