use thiserror::Error;

use crate::groupoid::Morphism;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("malformed groupoid: {0}")]
    Structure(String),

    #[error("invalid morphism {0:?}")]
    InvalidMorphism(Morphism),

    #[error("operands belong to different groupoids")]
    ParentMismatch,

    #[error("window M={window} does not cover degree {needed}")]
    WindowTooSmall { window: u32, needed: i64 },

    #[error("element is supported outside the kernel subgroupoid at {0:?}")]
    OutsideKernel(Morphism),

    #[error("cocycle is not integral")]
    NotIntegral,

    #[error("value leaves the exact scalar field: {0}")]
    Inexact(&'static str),

    #[error("operation needs an explicit (finite) groupoid")]
    NeedsFiniteGroupoid,

    #[error("non-positive measure weight at unit {0}")]
    NonPositiveWeight(usize),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("element is not unitary: {0}")]
    NotUnitary(String),

    #[error("inner product not defined: {0}")]
    InnerProductUndefined(String),
}

pub type Result<T> = std::result::Result<T, Error>;
