//! Exact symbolic algebra on jet spaces: differential polynomials, horizontal
//! and contact forms, variational operators, the tri-complex of the
//! Koszul-Tate / BV construction, and bounded cohomology computations.

pub mod error;
pub mod expr;
pub mod forms;
pub mod jetalg;
pub mod ktbv;
pub mod random;
pub mod tricomplex;
pub mod varops;

pub use error::{Error, Result};
