//! Model documents: schema validation with error paths, and the canonical
//! serialization (sorted keys, compact, fixed number formatting).

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use groupoidal_core::groupoid::{
    build_deaconu_groupoid, build_transformation_groupoid, DiscreteGroupoid, FiniteGroupoid, Morphism, UnitId,
};
use groupoidal_core::Rational;
use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use serde_json::{Map, Value};

use crate::SCHEMA_VERSION;

pub const SUITE_NAMES: [&str; 7] = ["axioms", "algebra", "cocycle", "bimodule", "kms", "index", "all"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchemaError {
    /// Dotted path into the document, e.g. `groupoid.act[2]`.
    pub path: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let path = if self.path.is_empty() { "<root>" } else { &self.path };
        write!(f, "{path}: {}", self.message)
    }
}

/// Which arithmetic the engines use for this document.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regime {
    /// Every scalar was written `[num, den]`.
    Exact,
    /// Every scalar was a JSON number.
    Float,
}

impl Regime {
    pub fn name(&self) -> &'static str {
        match self {
            Regime::Exact => "exact",
            Regime::Float => "float",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(f64),
}

impl Scalar {
    pub fn to_rational(&self) -> Rational {
        match self {
            Scalar::Exact(q) => q.clone(),
            Scalar::Float(x) => Rational::from_float(*x).expect("finite"),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(q) => q.numer().to_f64().unwrap_or(f64::NAN) / q.denom().to_f64().unwrap_or(f64::NAN),
            Scalar::Float(x) => *x,
        }
    }

    fn is_positive(&self) -> bool {
        match self {
            Scalar::Exact(q) => q.is_positive(),
            Scalar::Float(x) => *x > 0.0,
        }
    }

    fn to_value(&self) -> Value {
        match self {
            Scalar::Exact(q) => Value::Array(vec![big_to_value(q.numer()), big_to_value(q.denom())]),
            Scalar::Float(x) => Value::from(*x),
        }
    }
}

fn big_to_value(n: &BigInt) -> Value {
    n.to_i64().map(Value::from).unwrap_or_else(|| Value::String(n.to_string()))
}

#[derive(Clone, Debug, PartialEq)]
pub enum GroupoidSpec {
    Transformation { act: Vec<usize> },
    Deaconu { sigma: Vec<Option<usize>> },
    Pair { size: usize },
    Cyclic { order: usize },
    Explicit {
        units: Vec<usize>,
        range: Vec<usize>,
        source: Vec<usize>,
        inverse: Vec<usize>,
        product: Vec<Vec<Option<usize>>>,
    },
}

impl GroupoidSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            GroupoidSpec::Transformation { .. } => "transformation",
            GroupoidSpec::Deaconu { .. } => "deaconu",
            GroupoidSpec::Pair { .. } => "pair",
            GroupoidSpec::Cyclic { .. } => "cyclic",
            GroupoidSpec::Explicit { .. } => "explicit",
        }
    }

    fn has_degree(&self) -> bool {
        matches!(self, GroupoidSpec::Transformation { .. } | GroupoidSpec::Deaconu { .. })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum CocycleSpec {
    Degree,
    Zero,
    Potential(Vec<Scalar>),
    LogModular,
    Explicit(Vec<(Morphism, Scalar)>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub morphism: Morphism,
    pub re: Scalar,
    pub im: Scalar,
}

#[derive(Clone, Debug, PartialEq)]
pub enum UnitarySpec {
    /// `δ` on all degree-`n` morphisms of a transformation groupoid.
    Shift(i64),
    /// Row-major matrix of named elements.
    Matrix { size: usize, entries: Vec<String> },
}

#[derive(Clone, Debug)]
pub struct Document {
    pub groupoid: GroupoidSpec,
    pub cocycle: Option<CocycleSpec>,
    pub measure: Option<Vec<Scalar>>,
    pub elements: BTreeMap<String, Vec<Term>>,
    pub unitary: Option<UnitarySpec>,
    pub suites: Vec<String>,
    pub window: Option<u32>,
    pub tolerance: Option<f64>,
    pub regime: Regime,
    model: Arc<DiscreteGroupoid>,
}

impl Document {
    pub fn model(&self) -> &Arc<DiscreteGroupoid> {
        &self.model
    }

    /// The declared cocycle, or the default: degree on transformation and
    /// Deaconu models, zero on finite ones.
    pub fn cocycle_or_default(&self) -> CocycleSpec {
        match &self.cocycle {
            Some(c) => c.clone(),
            None if self.groupoid.has_degree() => CocycleSpec::Degree,
            None => CocycleSpec::Zero,
        }
    }

    pub fn to_value(&self) -> Value {
        let mut doc = Map::new();
        doc.insert("version".into(), Value::from(SCHEMA_VERSION));
        doc.insert("groupoid".into(), groupoid_value(&self.groupoid));
        if let Some(c) = &self.cocycle {
            let mut obj = Map::new();
            let kind = match c {
                CocycleSpec::Degree => "degree",
                CocycleSpec::Zero => "zero",
                CocycleSpec::LogModular => "log_modular",
                CocycleSpec::Potential(values) => {
                    obj.insert("values".into(), Value::Array(values.iter().map(Scalar::to_value).collect()));
                    "potential"
                }
                CocycleSpec::Explicit(table) => {
                    let rows = table.iter().map(|(m, v)| Value::Array(vec![morphism_value(*m), v.to_value()]));
                    obj.insert("table".into(), Value::Array(rows.collect()));
                    "explicit"
                }
            };
            obj.insert("kind".into(), Value::from(kind));
            doc.insert("cocycle".into(), Value::Object(obj));
        }
        if let Some(weights) = &self.measure {
            let mut obj = Map::new();
            obj.insert("weights".into(), Value::Array(weights.iter().map(Scalar::to_value).collect()));
            doc.insert("measure".into(), Value::Object(obj));
        }
        if !self.elements.is_empty() {
            let elements = self
                .elements
                .iter()
                .map(|(name, terms)| {
                    let terms = terms
                        .iter()
                        .map(|t| Value::Array(vec![morphism_value(t.morphism), t.re.to_value(), t.im.to_value()]));
                    (name.clone(), Value::Array(terms.collect()))
                })
                .collect();
            doc.insert("elements".into(), Value::Object(elements));
        }
        if let Some(u) = &self.unitary {
            let mut obj = Map::new();
            match u {
                UnitarySpec::Shift(n) => {
                    obj.insert("shift".into(), Value::from(*n));
                }
                UnitarySpec::Matrix { size, entries } => {
                    obj.insert("size".into(), Value::from(*size));
                    obj.insert("entries".into(), Value::Array(entries.iter().map(|e| Value::from(e.as_str())).collect()));
                }
            }
            doc.insert("unitary".into(), Value::Object(obj));
        }
        if !self.suites.is_empty() {
            doc.insert("suites".into(), Value::Array(self.suites.iter().map(|s| Value::from(s.as_str())).collect()));
        }
        if let Some(w) = self.window {
            doc.insert("window".into(), Value::from(w));
        }
        if let Some(t) = self.tolerance {
            doc.insert("tolerance".into(), Value::from(t));
        }
        Value::Object(doc)
    }

    /// Canonical serialization: compact JSON with sorted keys and a trailing
    /// newline. Parsing the output reproduces it byte for byte.
    pub fn canonical(&self) -> String {
        let mut s = serde_json::to_string(&self.to_value()).expect("serializable");
        s.push('\n');
        s
    }
}

fn groupoid_value(g: &GroupoidSpec) -> Value {
    let mut obj = Map::new();
    obj.insert("kind".into(), Value::from(g.kind()));
    let list = |xs: &[usize]| Value::Array(xs.iter().map(|&x| Value::from(x)).collect());
    let partial = |xs: &[Option<usize>]| Value::Array(xs.iter().map(|x| x.map_or(Value::Null, Value::from)).collect());
    match g {
        GroupoidSpec::Transformation { act } => {
            obj.insert("size".into(), Value::from(act.len()));
            obj.insert("act".into(), list(act));
        }
        GroupoidSpec::Deaconu { sigma } => {
            obj.insert("size".into(), Value::from(sigma.len()));
            obj.insert("sigma".into(), partial(sigma));
        }
        GroupoidSpec::Pair { size } => {
            obj.insert("size".into(), Value::from(*size));
        }
        GroupoidSpec::Cyclic { order } => {
            obj.insert("order".into(), Value::from(*order));
        }
        GroupoidSpec::Explicit { units, range, source, inverse, product } => {
            obj.insert("units".into(), list(units));
            obj.insert("range".into(), list(range));
            obj.insert("source".into(), list(source));
            obj.insert("inverse".into(), list(inverse));
            obj.insert("product".into(), Value::Array(product.iter().map(|row| partial(row)).collect()));
        }
    }
    Value::Object(obj)
}

pub fn morphism_value(m: Morphism) -> Value {
    match m {
        Morphism::Explicit(i) => Value::from(i),
        Morphism::Trans(x, n) => Value::Array(vec![Value::from(x.0), Value::from(n)]),
        Morphism::Deaconu(x, n, y) => Value::Array(vec![Value::from(x.0), Value::from(n), Value::from(y.0)]),
    }
}

/// Parse and validate a model document. Every schema error found is
/// returned, each with its path.
pub fn parse_model(bytes: &[u8]) -> Result<Document, Vec<SchemaError>> {
    let text = std::str::from_utf8(bytes).map_err(|e| vec![err("", format!("not UTF-8: {e}"))])?;
    let value: Value = serde_json::from_str(text).map_err(|e| vec![err("", format!("invalid JSON: {e}"))])?;
    let mut p = Parser::default();
    let doc = p.document(&value);
    match doc {
        Some(doc) if p.errors.is_empty() => Ok(doc),
        _ => {
            if p.errors.is_empty() {
                p.errors.push(err("", "invalid document"));
            }
            Err(p.errors)
        }
    }
}

fn err(path: &str, message: impl Into<String>) -> SchemaError {
    SchemaError { path: path.into(), message: message.into() }
}

fn join(path: &str, key: &str) -> String {
    if path.is_empty() {
        key.to_string()
    } else {
        format!("{path}.{key}")
    }
}

fn at(path: &str, i: usize) -> String {
    format!("{path}[{i}]")
}

#[derive(Default)]
struct Parser {
    errors: Vec<SchemaError>,
    /// Regime fixed by the first scalar seen, with its path.
    regime: Option<(Regime, String)>,
}

impl Parser {
    fn fail<T>(&mut self, path: &str, message: impl Into<String>) -> Option<T> {
        self.errors.push(err(path, message));
        None
    }

    fn object<'v>(&mut self, v: &'v Value, path: &str, allowed: &[&str]) -> Option<&'v Map<String, Value>> {
        let Some(obj) = v.as_object() else {
            return self.fail(path, "expected an object");
        };
        for key in obj.keys() {
            if !allowed.contains(&key.as_str()) {
                self.errors.push(err(&join(path, key), "unknown field"));
            }
        }
        Some(obj)
    }

    fn field<'v>(&mut self, obj: &'v Map<String, Value>, path: &str, key: &str) -> Option<&'v Value> {
        match obj.get(key) {
            Some(v) => Some(v),
            None => self.fail(&join(path, key), "missing field"),
        }
    }

    fn uint(&mut self, v: &Value, path: &str) -> Option<usize> {
        match v.as_u64().and_then(|n| usize::try_from(n).ok()) {
            Some(n) => Some(n),
            None => self.fail(path, "expected a non-negative integer"),
        }
    }

    fn int(&mut self, v: &Value, path: &str) -> Option<i64> {
        match v.as_i64() {
            Some(n) if n != i64::MIN => Some(n),
            _ => self.fail(path, "expected an integer"),
        }
    }

    fn array<'v>(&mut self, v: &'v Value, path: &str) -> Option<&'v Vec<Value>> {
        match v.as_array() {
            Some(a) => Some(a),
            None => self.fail(path, "expected an array"),
        }
    }

    fn uints(&mut self, v: &Value, path: &str) -> Option<Vec<usize>> {
        let items = self.array(v, path)?;
        let parsed: Vec<_> = items.iter().enumerate().map(|(i, x)| self.uint(x, &at(path, i))).collect();
        parsed.into_iter().collect()
    }

    fn partial_uints(&mut self, v: &Value, path: &str) -> Option<Vec<Option<usize>>> {
        let items = self.array(v, path)?;
        let mut out = Vec::with_capacity(items.len());
        let mut ok = true;
        for (i, x) in items.iter().enumerate() {
            if x.is_null() {
                out.push(None);
            } else {
                match self.uint(x, &at(path, i)) {
                    Some(n) => out.push(Some(n)),
                    None => ok = false,
                }
            }
        }
        ok.then_some(out)
    }

    fn scalar(&mut self, v: &Value, path: &str) -> Option<Scalar> {
        let (scalar, regime) = match v {
            Value::Number(n) => match n.as_f64().filter(|x| x.is_finite()) {
                Some(x) => (Scalar::Float(x), Regime::Float),
                None => return self.fail(path, "number out of range"),
            },
            Value::Array(pair) if pair.len() == 2 => {
                let (num, den) = (self.int(&pair[0], &at(path, 0))?, self.int(&pair[1], &at(path, 1))?);
                if den == 0 {
                    return self.fail(&at(path, 1), "zero denominator");
                }
                (Scalar::Exact(Rational::new(num.into(), den.into())), Regime::Exact)
            }
            _ => return self.fail(path, "expected [num, den] or a number"),
        };
        match &self.regime {
            None => self.regime = Some((regime, path.to_string())),
            Some((r, first)) if *r != regime => {
                let message = format!("mixes {} and {} scalars (first scalar at {first})", regime.name(), r.name());
                return self.fail(path, message);
            }
            Some(_) => {}
        }
        Some(scalar)
    }

    fn scalars(&mut self, v: &Value, path: &str, len: usize) -> Option<Vec<Scalar>> {
        let items = self.array(v, path)?;
        if items.len() != len {
            return self.fail(path, format!("expected {len} values, found {}", items.len()));
        }
        let parsed: Vec<_> = items.iter().enumerate().map(|(i, x)| self.scalar(x, &at(path, i))).collect();
        parsed.into_iter().collect()
    }

    fn document(&mut self, v: &Value) -> Option<Document> {
        let allowed =
            ["version", "groupoid", "cocycle", "measure", "elements", "unitary", "suites", "window", "tolerance"];
        let obj = self.object(v, "", &allowed)?;
        if let Some(version) = obj.get("version") {
            if version.as_u64() != Some(SCHEMA_VERSION) {
                self.errors.push(err("version", format!("unsupported version (expected {SCHEMA_VERSION})")));
            }
        }
        let groupoid_value = self.field(obj, "", "groupoid")?;
        let (groupoid, model) = self.groupoid(groupoid_value)?;
        let model = Arc::new(model);

        let measure = obj.get("measure").and_then(|m| self.measure(m, &model));
        let cocycle = obj.get("cocycle").and_then(|c| self.cocycle(c, &groupoid, &model, obj.contains_key("measure")));
        let elements = match obj.get("elements") {
            Some(e) => self.elements(e, &model).unwrap_or_default(),
            None => BTreeMap::new(),
        };
        let unitary = obj.get("unitary").and_then(|u| self.unitary(u, &groupoid, &elements));
        let suites = match obj.get("suites") {
            Some(s) => self.suites(s).unwrap_or_default(),
            None => Vec::new(),
        };
        let window = obj.get("window").and_then(|w| match w.as_u64().and_then(|n| u32::try_from(n).ok()) {
            Some(n) => Some(n),
            None => self.fail("window", "expected a non-negative integer"),
        });
        let tolerance = obj.get("tolerance").and_then(|t| match t.as_f64() {
            Some(x) if x > 0.0 && x.is_finite() => Some(x),
            _ => self.fail("tolerance", "expected a positive number"),
        });
        let regime = self.regime.as_ref().map_or(Regime::Exact, |(r, _)| *r);
        Some(Document { groupoid, cocycle, measure, elements, unitary, suites, window, tolerance, regime, model })
    }

    fn groupoid(&mut self, v: &Value) -> Option<(GroupoidSpec, DiscreteGroupoid)> {
        let path = "groupoid";
        let allowed = ["kind", "size", "act", "sigma", "order", "units", "range", "source", "inverse", "product"];
        let obj = self.object(v, path, &allowed)?;
        let kind = self.field(obj, path, "kind")?;
        let Some(kind) = kind.as_str() else {
            return self.fail("groupoid.kind", "expected a string");
        };
        let keys: &[&str] = match kind {
            "transformation" => &["kind", "size", "act"],
            "deaconu" => &["kind", "size", "sigma"],
            "pair" => &["kind", "size"],
            "cyclic" => &["kind", "order"],
            "explicit" => &["kind", "units", "range", "source", "inverse", "product"],
            other => {
                return self.fail(
                    "groupoid.kind",
                    format!("unknown kind {other:?} (transformation, deaconu, pair, cyclic, explicit)"),
                )
            }
        };
        for key in obj.keys() {
            if allowed.contains(&key.as_str()) && !keys.contains(&key.as_str()) {
                self.errors.push(err(&join(path, key), format!("not a field of {kind} groupoids")));
            }
        }
        match kind {
            "transformation" => {
                let size = self.field(obj, path, "size").and_then(|s| self.uint(s, "groupoid.size"));
                let act = self.field(obj, path, "act").and_then(|a| self.uints(a, "groupoid.act"))?;
                let size = size?;
                self.endomap(&act.iter().map(|&x| Some(x)).collect::<Vec<_>>(), size, "groupoid.act")?;
                let mut seen = vec![None; size];
                for (i, &y) in act.iter().enumerate() {
                    if let Some(j) = seen[y] {
                        return self.fail("groupoid.act", format!("not a permutation: {j} and {i} both map to {y}"));
                    }
                    seen[y] = Some(i);
                }
                let model = build_transformation_groupoid(act.clone()).ok()?;
                Some((GroupoidSpec::Transformation { act }, model))
            }
            "deaconu" => {
                let size = self.field(obj, path, "size").and_then(|s| self.uint(s, "groupoid.size"));
                let sigma = self.field(obj, path, "sigma").and_then(|a| self.partial_uints(a, "groupoid.sigma"))?;
                self.endomap(&sigma, size?, "groupoid.sigma")?;
                match build_deaconu_groupoid(sigma.clone()) {
                    Ok(model) => Some((GroupoidSpec::Deaconu { sigma }, model)),
                    Err(e) => self.fail("groupoid.sigma", e.to_string()),
                }
            }
            "pair" => {
                let size = self.field(obj, path, "size").and_then(|s| self.uint(s, "groupoid.size"))?;
                if size == 0 {
                    return self.fail("groupoid.size", "must be positive");
                }
                let model = FiniteGroupoid::pair(size).ok()?.into();
                Some((GroupoidSpec::Pair { size }, model))
            }
            "cyclic" => {
                let order = self.field(obj, path, "order").and_then(|s| self.uint(s, "groupoid.order"))?;
                if order == 0 {
                    return self.fail("groupoid.order", "must be positive");
                }
                let model = FiniteGroupoid::cyclic_group(order).ok()?.into();
                Some((GroupoidSpec::Cyclic { order }, model))
            }
            _ => {
                let mut list = |key: &str| self.field(obj, path, key).and_then(|v| self.uints(v, &join(path, key)));
                let (units, range, source, inverse) = (list("units"), list("range"), list("source"), list("inverse"));
                let product = self.field(obj, path, "product").and_then(|v| {
                    let rows = self.array(v, "groupoid.product")?;
                    let parsed: Vec<_> =
                        rows.iter().enumerate().map(|(i, r)| self.partial_uints(r, &at("groupoid.product", i))).collect();
                    parsed.into_iter().collect::<Option<Vec<_>>>()
                });
                let (units, range, source, inverse, product) = (units?, range?, source?, inverse?, product?);
                match FiniteGroupoid::new(units.clone(), range.clone(), source.clone(), product.clone(), inverse.clone()) {
                    Ok(model) => {
                        Some((GroupoidSpec::Explicit { units, range, source, inverse, product }, model.into()))
                    }
                    Err(e) => self.fail(path, e.to_string()),
                }
            }
        }
    }

    fn endomap(&mut self, map: &[Option<usize>], size: usize, path: &str) -> Option<()> {
        if size == 0 {
            return self.fail("groupoid.size", "must be positive");
        }
        if map.len() != size {
            return self.fail(path, format!("expected {size} entries, found {}", map.len()));
        }
        if let Some((i, y)) = map.iter().enumerate().find_map(|(i, y)| y.filter(|&y| y >= size).map(|y| (i, y))) {
            return self.fail(&at(path, i), format!("{y} is not a unit (size {size})"));
        }
        Some(())
    }

    fn morphism(&mut self, v: &Value, path: &str, g: &DiscreteGroupoid) -> Option<Morphism> {
        let units = g.unit_count();
        let unit = |p: &mut Self, x: &Value, path: &str| {
            let x = p.uint(x, path)?;
            if x >= units {
                return p.fail(path, format!("{x} is not a unit"));
            }
            Some(UnitId(x))
        };
        match g {
            DiscreteGroupoid::Finite(f) => {
                let i = self.uint(v, path)?;
                if i >= f.morphism_count() {
                    return self.fail(path, format!("no morphism {i} ({} morphisms)", f.morphism_count()));
                }
                Some(Morphism::Explicit(i))
            }
            DiscreteGroupoid::Transformation(_) => match v.as_array().map(Vec::as_slice) {
                Some([x, n]) => {
                    let x = unit(self, x, &at(path, 0));
                    let n = self.int(n, &at(path, 1));
                    Some(Morphism::Trans(x?, n?))
                }
                _ => self.fail(path, "expected [x, n]"),
            },
            DiscreteGroupoid::DeaconuRenault(d) => match v.as_array().map(Vec::as_slice) {
                Some([x, n, y]) => {
                    let x = unit(self, x, &at(path, 0));
                    let n = self.int(n, &at(path, 1));
                    let y = unit(self, y, &at(path, 2));
                    let (x, n, y) = (x?, n?, y?);
                    if !d.is_valid(x, n, y) {
                        return self.fail(path, format!("({x},{n},{y}) is not a morphism: no k with σ^(k+n)(x) = σ^k(y)"));
                    }
                    Some(Morphism::Deaconu(x, n, y))
                }
                _ => self.fail(path, "expected [x, n, y]"),
            },
        }
    }

    fn measure(&mut self, v: &Value, g: &DiscreteGroupoid) -> Option<Vec<Scalar>> {
        let obj = self.object(v, "measure", &["weights"])?;
        let weights = self.field(obj, "measure", "weights")?;
        let weights = self.scalars(weights, "measure.weights", g.unit_count())?;
        if let Some(i) = weights.iter().position(|w| !w.is_positive()) {
            return self.fail(&at("measure.weights", i), "weight must be positive");
        }
        Some(weights)
    }

    fn cocycle(&mut self, v: &Value, spec: &GroupoidSpec, g: &DiscreteGroupoid, has_measure: bool) -> Option<CocycleSpec> {
        let obj = self.object(v, "cocycle", &["kind", "values", "table"])?;
        let kind = self.field(obj, "cocycle", "kind")?;
        let expected_keys: &[&str] = match kind.as_str() {
            Some("potential") => &["kind", "values"],
            Some("explicit") => &["kind", "table"],
            _ => &["kind"],
        };
        for key in obj.keys() {
            if !expected_keys.contains(&key.as_str()) && ["values", "table"].contains(&key.as_str()) {
                self.errors.push(err(&join("cocycle", key), "not a field of this cocycle kind"));
            }
        }
        match kind.as_str() {
            Some("degree") if spec.has_degree() => Some(CocycleSpec::Degree),
            Some("degree") => self.fail("cocycle.kind", "degree cocycle needs a transformation or deaconu groupoid"),
            Some("zero") => Some(CocycleSpec::Zero),
            Some("log_modular") if has_measure => Some(CocycleSpec::LogModular),
            Some("log_modular") => self.fail("cocycle.kind", "log_modular cocycle needs a measure"),
            Some("potential") => {
                let values = self.field(obj, "cocycle", "values")?;
                Some(CocycleSpec::Potential(self.scalars(values, "cocycle.values", g.unit_count())?))
            }
            Some("explicit") => {
                let DiscreteGroupoid::Finite(f) = g else {
                    return self.fail("cocycle.kind", "explicit cocycle tables need a finite groupoid");
                };
                let rows = self.field(obj, "cocycle", "table")?;
                let rows = self.array(rows, "cocycle.table")?;
                let mut table = Vec::with_capacity(rows.len());
                let mut seen = vec![false; f.morphism_count()];
                for (i, row) in rows.iter().enumerate() {
                    let path = at("cocycle.table", i);
                    let Some([m, value]) = row.as_array().map(Vec::as_slice) else {
                        self.errors.push(err(&path, "expected [morphism, value]"));
                        continue;
                    };
                    let m = self.morphism(m, &at(&path, 0), g);
                    let value = self.scalar(value, &at(&path, 1));
                    if let (Some(m), Some(value)) = (m, value) {
                        let Morphism::Explicit(j) = m else { unreachable!() };
                        if std::mem::replace(&mut seen[j], true) {
                            self.errors.push(err(&at(&path, 0), format!("duplicate entry for morphism {j}")));
                        }
                        table.push((m, value));
                    }
                }
                if let Some(j) = seen.iter().position(|s| !s) {
                    return self.fail("cocycle.table", format!("missing entry for morphism {j}"));
                }
                Some(CocycleSpec::Explicit(table))
            }
            Some(other) => self.fail(
                "cocycle.kind",
                format!("unknown kind {other:?} (degree, zero, potential, log_modular, explicit)"),
            ),
            None => self.fail("cocycle.kind", "expected a string"),
        }
    }

    fn elements(&mut self, v: &Value, g: &DiscreteGroupoid) -> Option<BTreeMap<String, Vec<Term>>> {
        let Some(obj) = v.as_object() else {
            return self.fail("elements", "expected an object of named elements");
        };
        let mut out = BTreeMap::new();
        for (name, terms) in obj {
            let path = join("elements", name);
            if name.is_empty() {
                self.errors.push(err(&path, "empty element name"));
                continue;
            }
            let Some(items) = self.array(terms, &path) else { continue };
            let mut parsed = Vec::with_capacity(items.len());
            for (i, item) in items.iter().enumerate() {
                let tp = at(&path, i);
                let Some([m, re, im]) = item.as_array().map(Vec::as_slice) else {
                    self.errors.push(err(&tp, "expected [morphism, re, im]"));
                    continue;
                };
                let m = self.morphism(m, &at(&tp, 0), g);
                let re = self.scalar(re, &at(&tp, 1));
                let im = self.scalar(im, &at(&tp, 2));
                if let (Some(morphism), Some(re), Some(im)) = (m, re, im) {
                    parsed.push(Term { morphism, re, im });
                }
            }
            out.insert(name.clone(), parsed);
        }
        Some(out)
    }

    fn unitary(&mut self, v: &Value, spec: &GroupoidSpec, elements: &BTreeMap<String, Vec<Term>>) -> Option<UnitarySpec> {
        let obj = self.object(v, "unitary", &["shift", "size", "entries"])?;
        if let Some(n) = obj.get("shift") {
            if obj.contains_key("size") || obj.contains_key("entries") {
                return self.fail("unitary", "give either shift or size and entries");
            }
            let n = self.int(n, "unitary.shift")?;
            if !matches!(spec, GroupoidSpec::Transformation { .. }) {
                return self.fail("unitary.shift", "shift unitaries need a transformation groupoid");
            }
            return Some(UnitarySpec::Shift(n));
        }
        let size = self.field(obj, "unitary", "size").and_then(|s| self.uint(s, "unitary.size"));
        let entries = self.field(obj, "unitary", "entries").and_then(|e| self.array(e, "unitary.entries"))?;
        let size = size?;
        if size == 0 || entries.len() != size * size {
            return self.fail("unitary.entries", format!("expected {} entries for size {size}", size * size));
        }
        let mut names = Vec::with_capacity(entries.len());
        for (i, e) in entries.iter().enumerate() {
            let path = at("unitary.entries", i);
            match e.as_str() {
                Some(name) if elements.contains_key(name) => names.push(name.to_string()),
                Some(name) => {
                    self.errors.push(err(&path, format!("undefined element {name:?}")));
                }
                None => {
                    self.errors.push(err(&path, "expected an element name"));
                }
            }
        }
        (names.len() == entries.len()).then_some(UnitarySpec::Matrix { size, entries: names })
    }

    fn suites(&mut self, v: &Value) -> Option<Vec<String>> {
        let items = self.array(v, "suites")?;
        let mut out = Vec::new();
        for (i, s) in items.iter().enumerate() {
            match s.as_str() {
                Some(name) if SUITE_NAMES.contains(&name) => out.push(name.to_string()),
                _ => self.errors.push(err(&at("suites", i), format!("expected one of {}", SUITE_NAMES.join(", ")))),
            }
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> Result<Document, Vec<SchemaError>> {
        parse_model(s.as_bytes())
    }

    #[test]
    fn minimal_document() {
        let doc = parse(r#"{"groupoid":{"kind":"transformation","size":1,"act":[0]}}"#).unwrap();
        assert_eq!(doc.model().unit_count(), 1);
        assert_eq!(doc.regime, Regime::Exact);
        assert_eq!(doc.cocycle_or_default(), CocycleSpec::Degree);
    }

    #[test]
    fn act_must_be_a_permutation() {
        let errors = parse(r#"{"groupoid":{"kind":"transformation","size":3,"act":[0,0,1]}}"#).unwrap_err();
        assert_eq!(errors[0].path, "groupoid.act");
        assert!(errors[0].message.contains("not a permutation"));
    }

    #[test]
    fn mixed_regimes_rejected() {
        let errors = parse(
            r#"{"groupoid":{"kind":"pair","size":2},"measure":{"weights":[[1,2],0.5]}}"#,
        )
        .unwrap_err();
        assert_eq!(errors[0].path, "measure.weights[1]");
    }

    #[test]
    fn deaconu_triples_checked() {
        let doc = r#"{"groupoid":{"kind":"deaconu","size":2,"sigma":[0,1]},"elements":{"f":[[[0,0,1],[1,1],[0,1]]]}}"#;
        let errors = parse(doc).unwrap_err();
        assert_eq!(errors[0].path, "elements.f[0][0]");
    }

    #[test]
    fn every_error_reported() {
        let doc = r#"{"groupoid":{"kind":"pair","size":2},"window":-1,"suites":["nope"],"extra":1}"#;
        let mut paths: Vec<_> = parse(doc).unwrap_err().into_iter().map(|e| e.path).collect();
        paths.sort();
        assert_eq!(paths, ["extra", "suites[0]", "window"]);
    }

    #[test]
    fn rationals_are_reduced() {
        let doc = parse(r#"{"groupoid":{"kind":"pair","size":2},"measure":{"weights":[[2,4],[3,-6]]}}"#);
        let errors = doc.unwrap_err();
        assert_eq!(errors[0].path, "measure.weights[1]");
        let doc = parse(r#"{"groupoid":{"kind":"pair","size":2},"measure":{"weights":[[2,4],[-3,-6]]}}"#).unwrap();
        assert!(doc.canonical().contains(r#""weights":[[1,2],[1,2]]"#));
    }
}
