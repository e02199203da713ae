//! Check suites over a parsed document.

use std::collections::BTreeMap;
use std::sync::Arc;
use std::time::Instant;

use groupoidal_core::algebra::AlgebraElement;
use groupoidal_core::bimodule::*;
use groupoidal_core::cocycle::{
    check_exactness, kernel_subgroupoid, solve_coboundary, verify_cocycle, Coboundary, Exactness, KernelGroupoid,
    KernelStructure,
};
use groupoidal_core::groupoid::validate_axioms;
use groupoidal_core::index::{check_homomorphism, index_mu, shift, IndexStatus, Method, UnitaryElement};
use groupoidal_core::measures::{
    check_kms, check_trace_unimodular, modular_function, tau, to_float, SampleSpec, TraceDomain,
};
use groupoidal_core::report::ValidationReport;
use groupoidal_core::{sample, Cocycle, DiscreteGroupoid, Error, Morphism, Rational, RealScalar, UnitMeasure, Window};
use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

use crate::document::{CocycleSpec, Document, Regime, Scalar, UnitarySpec};
use crate::report::{digest, Check, Skipped, Status, SuiteReport};

pub const DEFAULT_WINDOW: u32 = 8;
pub const DEFAULT_TOLERANCE: f64 = 1e-12;
pub const DEFAULT_BUDGET: usize = 50;

/// Degree window random samples are drawn from.
const SAMPLE_WINDOW: Window = Window::new(3);
const SAMPLE_TERMS: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, clap::ValueEnum)]
pub enum Suite {
    Axioms,
    Algebra,
    Cocycle,
    Bimodule,
    Kms,
    Index,
    All,
}

impl Suite {
    pub fn name(&self) -> &'static str {
        match self {
            Suite::Axioms => "axioms",
            Suite::Algebra => "algebra",
            Suite::Cocycle => "cocycle",
            Suite::Bimodule => "bimodule",
            Suite::Kms => "kms",
            Suite::Index => "index",
            Suite::All => "all",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Self::EACH.into_iter().chain([Suite::All]).find(|x| x.name() == s)
    }

    const EACH: [Suite; 6] = [Suite::Axioms, Suite::Algebra, Suite::Cocycle, Suite::Bimodule, Suite::Kms, Suite::Index];
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunOptions {
    pub seed: u64,
    /// Overrides the document's window.
    pub window: Option<u32>,
    /// Overrides the document's tolerance.
    pub tolerance: Option<f64>,
    pub budget: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions { seed: 0, window: None, tolerance: None, budget: DEFAULT_BUDGET }
    }
}

/// Run the given suites on a parsed document. `input` is the raw document
/// the digest is taken over.
pub fn run_suite(doc: &Document, input: &[u8], suites: &[Suite], opts: RunOptions) -> SuiteReport {
    let window = opts.window.or(doc.window).unwrap_or(DEFAULT_WINDOW);
    let tolerance = opts.tolerance.or(doc.tolerance).unwrap_or(DEFAULT_TOLERANCE);
    let mut selected: Vec<Suite> = if suites.contains(&Suite::All) { Suite::EACH.to_vec() } else { suites.to_vec() };
    selected.sort();
    selected.dedup();
    let mut report = SuiteReport {
        version: env!("CARGO_PKG_VERSION").to_string(),
        input_digest: digest(input),
        suite: suites.iter().map(Suite::name).collect::<Vec<_>>().join(","),
        seed: opts.seed,
        window,
        tolerance,
        regime: doc.regime.name().to_string(),
        checks: Vec::new(),
        skipped: Vec::new(),
    };
    let settings = Settings { window: Window::new(window), tol: tolerance, seed: opts.seed, budget: opts.budget };
    let entries = match doc.regime {
        Regime::Exact => run_typed::<Rational>(doc, &selected, settings),
        Regime::Float => run_typed::<f64>(doc, &selected, settings),
    };
    for e in entries {
        match e {
            Entry::Check(c) => report.checks.push(c),
            Entry::Skip(s) => report.skipped.push(s),
        }
    }
    report.sort();
    report
}

#[derive(Clone, Copy)]
struct Settings {
    window: Window,
    tol: f64,
    seed: u64,
    budget: usize,
}

enum Entry {
    Check(Check),
    Skip(Skipped),
}

/// Scalars the suites can run over: converted from document scalars and
/// written back as report values.
trait Field: RealScalar {
    fn from_scalar(s: &Scalar) -> Self;
    fn encode(&self) -> Value;
}

impl Field for Rational {
    fn from_scalar(s: &Scalar) -> Self {
        s.to_rational()
    }

    fn encode(&self) -> Value {
        let part = |n: &num_bigint::BigInt| {
            num_traits::ToPrimitive::to_i64(n).map(Value::from).unwrap_or_else(|| Value::from(n.to_string()))
        };
        Value::Array(vec![part(self.numer()), part(self.denom())])
    }
}

impl Field for f64 {
    fn from_scalar(s: &Scalar) -> Self {
        s.to_f64()
    }

    fn encode(&self) -> Value {
        Value::from(*self)
    }
}

fn encode_complex<R: Field>(z: &Complex<R>) -> Value {
    Value::Array(vec![z.re.encode(), z.im.encode()])
}

struct Model<R: Field> {
    g: Arc<DiscreteGroupoid>,
    c: Cocycle<R>,
    mu: Option<UnitMeasure<R>>,
    elements: BTreeMap<String, AlgebraElement<R>>,
    unitary: Option<(UnitaryElement<R>, String)>,
}

impl<R: Field> Model<R> {
    fn build(doc: &Document) -> Result<Self, Error> {
        let g = doc.model().clone();
        let mu = match &doc.measure {
            Some(w) => Some(UnitMeasure::new(w.iter().map(R::from_scalar).collect())?),
            None => None,
        };
        let c = match doc.cocycle_or_default() {
            CocycleSpec::Degree => Cocycle::degree(),
            CocycleSpec::Zero => Cocycle::zero(g.unit_count()),
            CocycleSpec::Potential(values) => Cocycle::potential(values.iter().map(R::from_scalar).collect()),
            CocycleSpec::LogModular => Cocycle::log_modular(mu.clone().expect("validated: measure present")),
            CocycleSpec::Explicit(table) => {
                Cocycle::explicit(table.iter().map(|(m, v)| (*m, R::from_scalar(v))).collect())
            }
        };
        let mut elements = BTreeMap::new();
        for (name, terms) in &doc.elements {
            let mut f = AlgebraElement::zero(g.clone());
            for t in terms {
                f.add_at(t.morphism, Complex::new(R::from_scalar(&t.re), R::from_scalar(&t.im)));
            }
            elements.insert(name.clone(), f);
        }
        let unitary = match &doc.unitary {
            Some(UnitarySpec::Shift(n)) => Some((UnitaryElement::scalar(shift(&g, *n)?), format!("shift({n})"))),
            Some(UnitarySpec::Matrix { size, entries }) => {
                let u = UnitaryElement::new(*size, entries.iter().map(|e| elements[e].clone()).collect())?;
                Some((u, format!("[{}]", entries.join(", "))))
            }
            None if matches!(*g, DiscreteGroupoid::Transformation(_)) => {
                Some((UnitaryElement::scalar(shift(&g, 1)?), "shift(1)".to_string()))
            }
            None => None,
        };
        Ok(Model { g, c, mu, elements, unitary })
    }
}

fn run_typed<R: Field>(doc: &Document, suites: &[Suite], s: Settings) -> Vec<Entry> {
    let model = match Model::<R>::build(doc) {
        Ok(m) => m,
        Err(e) => return vec![Entry::Check(Check::new("model", Status::Fail).witness(e.to_string()))],
    };
    let mut out = Vec::new();
    for suite in suites {
        match suite {
            Suite::Axioms => axioms(&model, s, &mut out),
            Suite::Algebra => algebra(&model, s, &mut out),
            Suite::Cocycle => cocycle(&model, s, &mut out),
            Suite::Bimodule => bimodule(&model, s, &mut out),
            Suite::Kms => kms(&model, s, &mut out),
            Suite::Index => index(&model, s, &mut out),
            Suite::All => {}
        }
    }
    out
}

/// Run one check, timing it and mapping engine errors to a status:
/// inexact arithmetic is indeterminate, missing structure skips the check,
/// anything else fails with the error as witness.
fn timed(out: &mut Vec<Entry>, name: &str, run: impl FnOnce() -> Result<Check, Error>) {
    let start = Instant::now();
    let result = run();
    let elapsed = start.elapsed();
    let entry = match result {
        Ok(mut c) => {
            c.name = name.to_string();
            c.elapsed = elapsed;
            Entry::Check(c)
        }
        Err(e @ (Error::NotIntegral | Error::NeedsFiniteGroupoid)) => {
            Entry::Skip(Skipped { name: name.to_string(), reason: e.to_string() })
        }
        Err(e @ Error::Inexact(_)) => {
            let mut c = Check::new(name, Status::Indeterminate).witness(e.to_string());
            c.elapsed = elapsed;
            Entry::Check(c)
        }
        Err(e) => {
            let mut c = Check::new(name, Status::Fail).witness(e.to_string());
            c.elapsed = elapsed;
            Entry::Check(c)
        }
    };
    out.push(entry);
}

fn skip(out: &mut Vec<Entry>, name: &str, reason: &str) {
    out.push(Entry::Skip(Skipped { name: name.into(), reason: reason.into() }));
}

fn rng(seed: u64, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

fn random<R: Field>(g: &Arc<DiscreteGroupoid>, r: &mut ChaCha8Rng) -> AlgebraElement<R> {
    sample::element(g, SAMPLE_WINDOW, SAMPLE_TERMS, r)
}

fn describe<R: Field>(f: &AlgebraElement<R>) -> String {
    let terms: Vec<String> = f.iter().map(|(m, v)| format!("{m}:{}{:+}i", v.re.to_f64(), v.im.to_f64())).collect();
    format!("[{}]", terms.join(" "))
}

fn defect<R: Field>(a: &AlgebraElement<R>, b: &AlgebraElement<R>) -> Result<f64, Error> {
    Ok(to_float(&a.minus(b)?).iter().map(|(_, v)| v.norm()).fold(0.0, f64::max))
}

/// Sampled identity bookkeeping.
#[derive(Default)]
struct Tally {
    samples: usize,
    failures: usize,
    max_defect: f64,
    witness: Option<String>,
}

impl Tally {
    fn compare<R: Field>(
        &mut self,
        lhs: &AlgebraElement<R>,
        rhs: &AlgebraElement<R>,
        tol: f64,
        witness: impl FnOnce() -> String,
    ) -> Result<(), Error> {
        self.samples += 1;
        self.max_defect = self.max_defect.max(defect(lhs, rhs)?);
        if !lhs.approx_eq(rhs, tol) {
            self.failures += 1;
            self.witness.get_or_insert_with(witness);
        }
        Ok(())
    }

    fn check(self) -> Check {
        let mut c = Check::pass_if("", self.failures == 0)
            .value("samples", self.samples)
            .value("failures", self.failures)
            .value("max_defect", self.max_defect);
        c.witness = self.witness;
        c
    }
}

fn validation_check(r: &ValidationReport) -> Check {
    let mut c = Check::pass_if("", r.is_valid())
        .value("checked", r.checked)
        .value("violations", r.violations.len())
        .value("structural", r.structural.len());
    if let Some(s) = r.structural.first() {
        c = c.witness(s.clone());
    } else if let Some(v) = r.first_violation() {
        let ms: Vec<String> = v.witness.iter().map(Morphism::to_string).collect();
        c = c.witness(format!("{} at {}: {}", v.law, ms.join(" "), v.detail));
    }
    c
}

fn axioms<R: Field>(m: &Model<R>, s: Settings, out: &mut Vec<Entry>) {
    timed(out, "axioms.groupoid", || Ok(validation_check(&validate_axioms(&m.g, 4 * s.budget, s.seed))));
}

fn algebra<R: Field>(m: &Model<R>, s: Settings, out: &mut Vec<Entry>) {
    let named: Vec<&AlgebraElement<R>> = m.elements.values().collect();
    timed(out, "algebra.associativity", || {
        let mut t = Tally::default();
        let mut r = rng(s.seed, 1);
        let mut triples: Vec<[AlgebraElement<R>; 3]> = Vec::new();
        if named.len() <= 6 {
            for a in &named {
                for b in &named {
                    for c in &named {
                        triples.push([(*a).clone(), (*b).clone(), (*c).clone()]);
                    }
                }
            }
        }
        triples.extend((0..s.budget).map(|_| [random(&m.g, &mut r), random(&m.g, &mut r), random(&m.g, &mut r)]));
        for [f, g, h] in &triples {
            let lhs = f.convolve(g)?.convolve(h)?;
            let rhs = f.convolve(&g.convolve(h)?)?;
            t.compare(&lhs, &rhs, s.tol, || format!("f={} g={} h={}", describe(f), describe(g), describe(h)))?;
        }
        Ok(t.check())
    });
    timed(out, "algebra.involution", || {
        let mut t = Tally::default();
        let mut r = rng(s.seed, 2);
        let mut pairs: Vec<(AlgebraElement<R>, AlgebraElement<R>)> = Vec::new();
        for a in &named {
            for b in &named {
                pairs.push(((*a).clone(), (*b).clone()));
            }
        }
        pairs.extend((0..s.budget).map(|_| (random(&m.g, &mut r), random(&m.g, &mut r))));
        for (f, g) in &pairs {
            let lhs = f.convolve(g)?.involute();
            let rhs = g.involute().convolve(&f.involute())?;
            t.compare(&lhs, &rhs, s.tol, || format!("f={} g={}", describe(f), describe(g)))?;
            t.compare(&f.involute().involute(), f, s.tol, || format!("f={}", describe(f)))?;
        }
        Ok(t.check())
    });
    timed(out, "algebra.norm_bracket", || {
        let mut c = Check::new("", Status::Pass);
        let mut r = rng(s.seed, 3);
        let mut sampled = 0;
        for (name, f) in &m.elements {
            let n = f.norms(s.window)?;
            let mut obj = serde_json::Map::new();
            obj.insert("nu".into(), n.nu.into());
            obj.insert("nu_inv".into(), n.nu_inv.into());
            obj.insert("i_norm".into(), n.i_norm.into());
            obj.insert("reduced_lower".into(), n.reduced_lower.into());
            c = c.value(&format!("element.{name}"), Value::Object(obj));
            if n.reduced_lower > n.i_norm + 1e-9 {
                c.status = Status::Fail;
                c.witness.get_or_insert(format!("{name}: reduced_lower {} > I-norm {}", n.reduced_lower, n.i_norm));
            }
        }
        for _ in 0..s.budget.min(20) {
            let f: AlgebraElement<R> = random(&m.g, &mut r);
            let n = f.norms(s.window)?;
            sampled += 1;
            if n.reduced_lower > n.i_norm + 1e-9 {
                c.status = Status::Fail;
                c.witness.get_or_insert(format!("{}: reduced_lower {} > I-norm {}", describe(&f), n.reduced_lower, n.i_norm));
            }
        }
        Ok(c.value("sampled", sampled))
    });
}

fn cocycle<R: Field>(m: &Model<R>, s: Settings, out: &mut Vec<Entry>) {
    timed(out, "cocycle.identity", || Ok(validation_check(&verify_cocycle(&m.g, &m.c, 4 * s.budget, s.seed))));
    timed(out, "cocycle.exactness", || {
        Ok(match check_exactness(&m.g, &m.c, s.window)? {
            Exactness::ExactIntegral(classes) => {
                Check::new("", Status::Pass).value("kind", "integral").value("classes", classes.len())
            }
            Exactness::ExactInjective { classes } => {
                Check::new("", Status::Pass).value("kind", "injective").value("classes", classes)
            }
            Exactness::NotExact { witness: (a, b) } => {
                Check::new("", Status::Fail).witness(format!("{a} and {b} share (r, c) but differ modulo ker c"))
            }
            Exactness::Indeterminate(why) => Check::new("", Status::Indeterminate).witness(why),
        })
    });
    timed(out, "cocycle.kernel", || {
        let k = kernel_subgroupoid(&m.g, &m.c);
        let c = Check::new("", Status::Pass).value("regular", k.is_regular(s.window));
        Ok(match k.structure(s.window) {
            KernelStructure::Units => c.value("structure", "units"),
            KernelStructure::Whole => c.value("structure", "whole"),
            KernelStructure::Proper(ms) => c.value("structure", "proper").value("morphisms", ms.len()),
        })
    });
    if !m.g.is_finite() {
        skip(out, "cocycle.coboundary", "needs a finite groupoid");
        return;
    }
    timed(out, "cocycle.coboundary", || {
        Ok(match solve_coboundary(&m.g, &m.c)? {
            Coboundary::Potential(f) => Check::new("", Status::Pass)
                .value("coboundary", true)
                .value("potential", Value::Array(f.iter().map(Field::encode).collect())),
            Coboundary::NotCoboundary { cycle, discrepancy } => Check::new("", Status::Pass)
                .value("coboundary", false)
                .value("cycle", Value::Array(cycle.iter().map(|m| Value::from(m.to_string())).collect()))
                .value("discrepancy", discrepancy.encode()),
        })
    });
}

fn module<R: Field>(k: &Arc<KernelGroupoid<R>>, r: &mut ChaCha8Rng) -> Result<ModuleElement<R>, Error> {
    ModuleElement::new(random(k.parent(), r), k)
}

fn bimodule<R: Field>(m: &Model<R>, s: Settings, out: &mut Vec<Entry>) {
    let k = Arc::new(kernel_subgroupoid(&m.g, &m.c));
    let d = OperatorD::new(&k);
    timed(out, "bimodule.leibniz", || {
        let mut t = Tally::default();
        let mut r = rng(s.seed, 4);
        for _ in 0..s.budget {
            let f: AlgebraElement<R> = random(&m.g, &mut r);
            let phi = module(&k, &mut r)?;
            let lhs = apply_d(&d, &act_left(&f, &phi)?)?;
            let rhs = act_left(&derive(&d, &f)?, &phi)?.plus(&act_left(&f, &apply_d(&d, &phi)?)?)?;
            t.compare(lhs.function(), rhs.function(), s.tol, || {
                format!("f={} Φ={}", describe(&f), describe(phi.function()))
            })?;
        }
        Ok(t.check())
    });
    timed(out, "bimodule.symmetry", || {
        let mut t = Tally::default();
        let mut r = rng(s.seed, 5);
        for _ in 0..s.budget {
            let (phi, psi) = (module(&k, &mut r)?, module(&k, &mut r)?);
            let lhs = inner_product_h(&apply_d(&d, &phi)?, &psi)?;
            let rhs = inner_product_h(&phi, &apply_d(&d, &psi)?)?;
            t.compare(&lhs, &rhs, s.tol, || format!("Φ={} Ψ={}", describe(phi.function()), describe(psi.function())))?;
        }
        Ok(t.check())
    });
    timed(out, "bimodule.cayley", || {
        let mut t = Tally::default();
        let mut r = rng(s.seed, 6);
        for _ in 0..s.budget {
            let (phi, psi) = (module(&k, &mut r)?, module(&k, &mut r)?);
            let a = transform_d(&d, &phi, Transform::Cayley)?;
            let b = transform_d(&d, &psi, Transform::Cayley)?;
            let (lhs, rhs) = (inner_product_h(&a, &b)?, inner_product_h(&phi, &psi)?);
            t.compare(&lhs, &rhs, s.tol, || format!("Φ={} Ψ={}", describe(phi.function()), describe(psi.function())))?;
        }
        Ok(t.check())
    });
    timed(out, "bimodule.cutoff", || {
        let mut r = rng(s.seed, 7);
        let mut c = Check::new("", Status::Pass);
        let mut least_slack = f64::INFINITY;
        for _ in 0..s.budget.min(5) {
            let f: AlgebraElement<R> = random(&m.g, &mut r);
            let cut = (0..=10).map(|j| cutoff_approximant(&f, &d, j)).collect::<Result<Vec<_>, _>>()?;
            for lo in 1..10u32 {
                for hi in lo + 1..=10 {
                    let diff = cut[hi as usize].minus(&cut[lo as usize]).i_norm()?;
                    let bound = f.i_norm() / (1.0 + f64::from(lo * lo));
                    least_slack = least_slack.min(bound - diff);
                    if diff > bound * (1.0 + 1e-12) + 1e-15 && c.status == Status::Pass {
                        c.status = Status::Fail;
                        c.witness = Some(format!("f={} m={lo} n={hi}: {diff} > {bound}", describe(&f)));
                    }
                }
            }
        }
        Ok(c.value("least_slack", least_slack))
    });
    if !m.c.is_integral() {
        skip(out, "bimodule.ssa", "cocycle is not integral");
        return;
    }
    timed(out, "bimodule.ssa", || {
        let mut t = Tally::default();
        let mut r = rng(s.seed, 8);
        for _ in 0..s.budget {
            let f: AlgebraElement<R> = random(&m.g, &mut r);
            let psi = module(&k, &mut r)?;
            let j = r.random_range(-3..=3);
            let lhs = ssa_witness(&f, j, &k)?.apply(&psi)?;
            let rhs = act_left(&f, &spectral_projection_rho(j, &psi)?)?;
            t.compare(lhs.function(), rhs.function(), s.tol, || {
                format!("f={} k={j} Ψ={}", describe(&f), describe(psi.function()))
            })?;
        }
        Ok(t.check())
    });
}

fn kms<R: Field>(m: &Model<R>, s: Settings, out: &mut Vec<Entry>) {
    let Some(mu) = &m.mu else {
        skip(out, "kms", "document has no measure");
        return;
    };
    let spec = SampleSpec { budget: s.budget, seed: s.seed, window: SAMPLE_WINDOW, terms: SAMPLE_TERMS, tol: s.tol };
    let mut strip = None;
    timed(out, "kms.boundary", || {
        let report = check_kms(&m.g, mu, spec)?;
        let lhs: Vec<Value> = report.boundary.samples.iter().map(|x| encode_complex(&x.lhs)).collect();
        let rhs: Vec<Value> = report.boundary.samples.iter().map(|x| encode_complex(&x.rhs)).collect();
        let mut c = Check::pass_if("", report.boundary.holds())
            .value("samples", report.boundary.samples.len())
            .value("failures", report.boundary.failures())
            .value("max_defect", report.boundary.max_defect)
            .value("lhs", lhs)
            .value("rhs", rhs);
        if let Some(i) = report.boundary.samples.iter().position(|x| !x.holds) {
            c = c.witness(format!("sample {i}"));
        }
        strip = Some(report.strip);
        Ok(c)
    });
    if let Some(strip) = strip {
        timed(out, "kms.strip", || {
            Ok(Check::pass_if("", strip.holds())
                .value("samples", strip.samples.len())
                .value("failures", strip.failures())
                .value("max_defect", strip.max_defect))
        });
    }
    timed(out, "kms.trace_kernel", || {
        let kernel = kernel_subgroupoid(&m.g, &Cocycle::log_modular(mu.clone()));
        let report = check_trace_unimodular(&TraceDomain::Kernel(kernel), mu, SampleSpec { seed: s.seed ^ 1, ..spec })?;
        Ok(Check::pass_if("", report.holds())
            .value("samples", report.samples.len())
            .value("failures", report.failures())
            .value("max_defect", report.max_defect))
    });
    timed(out, "kms.modular", || {
        let data = modular_function(&m.g, mu)?;
        let witness = data.unimodular_witness(s.window)?;
        let mut c = Check::new("", Status::Pass)
            .value("total_mass", mu.total_mass().encode())
            .value("unimodular", witness.is_none());
        if let Some(w) = witness {
            c = c.value("non_unimodular_at", w.to_string()).value("delta", data.delta(w)?.encode());
        }
        Ok(c)
    });
    timed(out, "kms.positivity", || {
        let mut r = rng(s.seed, 9);
        let mut c = Check::new("", Status::Pass);
        let one = tau(&AlgebraElement::identity(m.g.clone()), mu);
        let mass_ok = one == Complex::new(mu.total_mass(), R::zero());
        if !mass_ok {
            c.status = Status::Fail;
            c.witness = Some("τ(1) differs from the total mass".into());
        }
        for _ in 0..s.budget {
            let f: AlgebraElement<R> = random(&m.g, &mut r);
            let v = tau(&f.involute().convolve(&f)?, mu);
            let (re, im) = (v.re.to_f64(), v.im.to_f64());
            let scale = tau(&AlgebraElement::identity(m.g.clone()), mu).re.to_f64().max(1.0);
            if re < -s.tol * scale || im.abs() > s.tol * scale.max(re.abs()) {
                c.status = Status::Fail;
                c.witness.get_or_insert(format!("τ(f*f) = {re}{im:+}i for f={}", describe(&f)));
            }
        }
        Ok(c.value("tau_one", encode_complex(&one)).value("samples", s.budget))
    });
}

fn index<R: Field>(m: &Model<R>, s: Settings, out: &mut Vec<Entry>) {
    let Some((u, label)) = &m.unitary else {
        skip(out, "index", "document has no unitary");
        return;
    };
    if !m.c.is_integral() {
        skip(out, "index", "cocycle is not integral");
        return;
    }
    let mu = m.mu.clone().unwrap_or_else(|| {
        let n = m.g.unit_count();
        UnitMeasure::uniform(n, R::one() / R::from_i64(n as i64)).expect("positive weight")
    });
    timed(out, "index.value", || {
        let r = index_mu(u, &m.c, &mu, s.window)?;
        let per_unit: Vec<Value> =
            r.per_unit.iter().map(|k| Value::from(vec![k.unit.0 as i64, k.kernel as i64, k.cokernel as i64])).collect();
        let mut c = Check::new("", Status::Pass)
            .value("unitary", label.as_str())
            .value("value", r.value.encode())
            .value("stable", r.stable)
            .value("agrees", r.agrees.map_or(Value::Null, Value::from))
            .value("method", match r.method {
                Method::Compression => "compression",
                Method::SpectralFlow => "spectral_flow",
            })
            .value("per_unit", per_unit);
        if let Some(steps) = r.steps {
            c = c.value("flow_steps", steps);
        }
        match &r.status {
            IndexStatus::Indeterminate(why) => {
                c.status = Status::Indeterminate;
                c.witness = Some(why.clone());
            }
            IndexStatus::Determined if r.agrees == Some(false) => {
                c.status = Status::Fail;
                c.witness = Some("compression and spectral flow disagree".into());
            }
            IndexStatus::Determined if !r.stable => {
                c.status = Status::Fail;
                c.witness = Some(format!("value changes between M = {} and M = {}", s.window.m, s.window.m + 1));
            }
            IndexStatus::Determined => {}
        }
        Ok(c)
    });
    timed(out, "index.homomorphism", || {
        let mut c = Check::new("", Status::Pass);
        for (tag, v) in [("u·u", u.clone()), ("u·u*", u.adjoint())] {
            let h = check_homomorphism(u, &v, &m.c, &mu, s.window)?;
            c = c.value(tag, Value::Array(vec![h.left.encode(), h.right.encode(), h.product.encode()]));
            if !h.holds && c.status == Status::Pass {
                c.status = Status::Fail;
                c.witness = Some(format!("{tag}: index of product is not the sum"));
            }
        }
        Ok(c)
    });
}
