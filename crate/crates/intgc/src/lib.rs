//! Decision-procedure toolkit for intuitionistic propositional logic extended
//! with an adjoint modal pair `<>` / `[]` (a Galois connection).
//!
//! The crate provides:
//!
//! - [`formula`]: the formula language, parser, subformula and closure sets,
//!   and prefix normalization;
//! - [`kripke`]: Kripke frames and models with the frame closure condition,
//!   persistence-checked valuations, and a bitset model checker;
//! - [`filtration`]: quotients of models by agreement on the closure set,
//!   producing finite countermodels, plus a verifier for every step of the
//!   construction;
//! - [`algebra`]: finite distributive lattices with a Galois-connected
//!   operator pair, and the complex algebra of a frame;
//! - [`search`]: exhaustive frame enumeration and bounded countermodel
//!   search, with random model generation for property tests.

pub mod algebra;
pub mod bits;
pub mod filtration;
pub mod formula;
pub mod kripke;
pub mod reference;
pub mod search;

pub use bits::{Relation, WorldSet};
pub use formula::{parse, render, ClosureBasis, Formula, FormulaError};
pub use kripke::{KripkeFrame, KripkeModel};
