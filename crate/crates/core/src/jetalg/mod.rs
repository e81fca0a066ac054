//! Exact-rational differential polynomials over a graded jet context.

mod context;
mod multi_index;
mod ops;
mod poly;
mod symbol;

pub use context::{FieldDecl, JetContext};
pub use multi_index::MultiIndex;
pub use ops::{evolutionary_apply, substitute_section, EvoField};
pub use poly::{rat, ratio, DiffPoly, Monomial, Rational};
pub use symbol::{FieldRef, Symbol};
