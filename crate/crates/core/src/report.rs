use std::fmt;

use crate::groupoid::Morphism;

/// Laws checked by the validators.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Law {
    Composability,
    RangeOfProduct,
    SourceOfProduct,
    Associativity,
    LeftIdentity,
    RightIdentity,
    UnitEndpoints,
    Inverse,
    DoubleInverse,
    DeaconuWitness,
    CocycleAdditivity,
    CocycleUnit,
    CocycleInverse,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::Composability => "composability",
            Law::RangeOfProduct => "range of product",
            Law::SourceOfProduct => "source of product",
            Law::Associativity => "associativity",
            Law::LeftIdentity => "left identity",
            Law::RightIdentity => "right identity",
            Law::UnitEndpoints => "unit endpoints",
            Law::Inverse => "inverse",
            Law::DoubleInverse => "double inverse",
            Law::DeaconuWitness => "deaconu witness",
            Law::CocycleAdditivity => "cocycle additivity",
            Law::CocycleUnit => "cocycle vanishes on units",
            Law::CocycleInverse => "cocycle odd under inversion",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub law: Law,
    pub witness: Vec<Morphism>,
    pub detail: String,
}

/// Outcome of an axiom or cocycle check. Structural errors (malformed input)
/// are kept apart from law violations.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub structural: Vec<String>,
    pub violations: Vec<Violation>,
    /// Number of law instances evaluated.
    pub checked: usize,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.structural.is_empty() && self.violations.is_empty()
    }

    pub fn is_structurally_sound(&self) -> bool {
        self.structural.is_empty()
    }

    pub(crate) fn violate(&mut self, law: Law, witness: Vec<Morphism>, detail: impl Into<String>) {
        self.violations.push(Violation { law, witness, detail: detail.into() });
    }

    pub fn first_violation(&self) -> Option<&Violation> {
        self.violations.first()
    }
}
