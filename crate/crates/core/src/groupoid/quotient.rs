use std::sync::Arc;

use crate::cocycle::{verify_cocycle, Class, Cocycle, KernelGroupoid};
use crate::error::{Error, Result};
use crate::scalar::RealScalar;

use super::{DiscreteGroupoid, Morphism, Window};

/// The coset space `𝒢/ker c` within a degree window, as classes labelled by
/// `(r(ξ), c(ξ))`.
#[derive(Clone, Debug)]
pub struct QuotientModel<R: RealScalar> {
    pub kernel: KernelGroupoid<R>,
    pub classes: Vec<Class<R>>,
    /// Each morphism in the window with the index of its class.
    pub assignments: Vec<(Morphism, usize)>,
}

impl<R: RealScalar> QuotientModel<R> {
    pub fn class_of(&self, m: Morphism) -> Option<&Class<R>> {
        self.assignments.iter().find(|(x, _)| *x == m).map(|&(_, i)| &self.classes[i])
    }

    /// Morphisms in the window lying in class `i`.
    pub fn members(&self, i: usize) -> impl Iterator<Item = Morphism> + '_ {
        self.assignments.iter().filter(move |(_, j)| *j == i).map(|&(m, _)| m)
    }
}

/// Build `𝒢/ker c`, rejecting `c` if it fails the cocycle identity.
pub fn quotient_by_kernel<R: RealScalar>(
    g: &Arc<DiscreteGroupoid>,
    c: &Cocycle<R>,
    w: Window,
) -> Result<QuotientModel<R>> {
    let report = verify_cocycle(g, c, 200, 0);
    if let Some(v) = report.first_violation() {
        return Err(Error::Precondition(format!("not a cocycle: {} at {:?}", v.law, v.witness)));
    }
    let mut classes: Vec<Class<R>> = Vec::new();
    let mut assignments = Vec::new();
    for m in g.morphisms(w) {
        let class = Class::of(g, c, m)?;
        let i = match classes.iter().position(|k| k.matches(&class)) {
            Some(i) => i,
            None => {
                classes.push(class);
                classes.len() - 1
            }
        };
        assignments.push((m, i));
    }
    Ok(QuotientModel { kernel: crate::cocycle::kernel_subgroupoid(g, c), classes, assignments })
}
