//! Convolution algebras of discrete groupoids, real-valued cocycles, the
//! unbounded bimodules they induce, KMS weights and index pairings.
//!
//! Everything is generic over a real scalar field `R: RealScalar`
//! (`f32`, `f64` or exact [`Rational`]); coefficients live in `Complex<R>`.

pub mod algebra;
pub mod bimodule;
pub mod cocycle;
pub mod error;
pub mod groupoid;
pub mod index;
pub mod linalg;
pub mod measures;
pub mod report;
pub mod sample;
pub mod scalar;

pub use algebra::AlgebraElement;
pub use cocycle::{Cocycle, KernelGroupoid};
pub use error::{Error, Result};
pub use groupoid::{DiscreteGroupoid, Morphism, UnitId, Window};
pub use measures::UnitMeasure;
pub use scalar::{Rational, RealScalar};

pub type ExactElement = AlgebraElement<Rational>;
pub type FloatElement = AlgebraElement<f64>;
pub type SingleElement = AlgebraElement<f32>;
pub type ExactCocycle = Cocycle<Rational>;
pub type FloatCocycle = Cocycle<f64>;
pub type ExactMeasure = UnitMeasure<Rational>;
pub type FloatMeasure = UnitMeasure<f64>;
