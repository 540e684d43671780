//! Exact local algebra over real valued fields.
//!
//! The crate models convergent power series by jets (truncations at an
//! explicit degree `D`) with exact coefficients, and provides Grauert division
//! with norm certificates, standard bases for the local degree ordering,
//! Cartan's bounded linear solver, invariants and normal forms of
//! hypersurface and complete intersection singularities, and an order by
//! order solver for nested equations.

pub mod cartan;
pub mod error;
pub mod division;
pub mod field;
pub mod jetsolve;
pub mod linalg;
pub mod parse;
pub mod series;
pub mod singularity;
pub mod standard_basis;

pub use error::{Error, ErrorFamily, Result};
pub use field::{FieldSpec, NormValue, Scalar};
pub use series::{
    deglex_compare, Exponent, Jet, JetRing, JetVector, LeadingData, ModuleMonomial, RadiusVector,
};
