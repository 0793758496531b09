//! Exact two-product algebras: a Lie-type product α and a Jordan-type
//! product σ over paired scalars `a + bJ` with `J² ∈ {−1, 0, +1}`.
//!
//! Representations are square matrices ([`matrix`]) and phase-space
//! polynomials with Moyal brackets ([`phase`]). [`tensor`] composes two
//! systems through a coproduct table, [`solver`] recovers that table from
//! the unit and Leibniz laws, and [`audit`] checks the algebraic identities
//! on seeded samples. Everything is exact rational arithmetic except
//! [`chsh`].

pub mod algebra;
pub mod audit;
pub mod chsh;
pub mod class;
pub mod error;
pub mod exact;
pub mod matrix;
pub mod parse;
pub mod phase;
pub mod sample;
pub mod scalar;
pub mod solver;
pub mod tensor;

pub use algebra::{AlgebraElement, Product, Sign};
pub use class::{CompositionClass, Hbar};
pub use error::{Error, Result};
pub use scalar::{Epsilon, PairScalar, Rational};
