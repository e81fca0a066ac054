//! Variational calculus on jet spaces.

mod bracket;
mod euler;
mod functional;
mod operator;
mod system;

pub use bracket::{lie_bracket, schouten_bracket};
pub use euler::{
    classes_equal, euler_component, euler_operator, insertion_map, is_variational_symmetry, triviality_check,
};
pub use functional::evaluate_functional;
pub use operator::{adjoint_operator, frechet_derivative, helmholtz_check, TotalDiffOperator};
pub use system::{
    conservation_check, noether_identity_check, symmetry_check, volume_coefficient, PdeSystem, SolvedRelation,
    SymmetryTarget, Verdict, REDUCTION_BOUND,
};
