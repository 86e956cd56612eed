//! Exact arithmetic for ternary brackets on the two-family basis
//! `{L_r, M_r : r ∈ ℤ}`: structure constants, law checkers, windowed
//! ⅓-derivation solvers and transposed Poisson products.

pub mod algebra;
pub mod derivations;
pub mod element;
pub mod error;
pub mod lab;
pub mod linalg;
pub mod scalar;
pub mod tp;
pub mod window;

pub use algebra::{
    BilinearProduct, BracketDef, FiniteFunctional, LinearMap, LinearOperator, ProductDef, TernaryBracket,
};
pub use derivations::{Ansatz, AnsatzKind, ClassificationVerdict, OneThirdFamily};
pub use element::{BasisSymbol, Element, Family};
pub use error::{Error, Result};
pub use lab::{CheckReport, Law, Mode, Sampling, Violation};
pub use linalg::{ConstraintSystem, SolutionSpace, UnknownId};
pub use scalar::Scalar;
pub use tp::{PoissonClass, TpParams, TpProduct, TpValidationReport};
pub use window::Window;
