//! The derived direction of the variational tri-complex.

mod cohomology;
mod delta;
mod key;
mod linalg;
mod presymplectic;

pub use cohomology::{
    bounded_cohomology, enumerate_monomials, BettiEntry, BettiTable, BoundedComplex, ClassBasis, Differential, Strand,
    Truncation,
};
pub use delta::{extend_delta, induced_map, total_differential, AlgebraMorphism, InternalDifferential};
pub use key::{
    closure_check, key_differential, relation_list, ClosureMode, ClosureReport, FormKey, KeyOp, Relation,
    RelationResult, RelationStatus, RelationTerm,
};
pub use linalg::{eliminate, Echelon, Elimination, SparseVec};
pub use presymplectic::{presymplectic_form, Presymplectic};
