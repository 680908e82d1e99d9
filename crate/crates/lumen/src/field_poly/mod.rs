//! Prime-field arithmetic, dense polynomials, evaluation domains.

pub mod domain;
pub mod field;
pub mod ntt;
pub mod poly;

pub use domain::{bivariate_lambda, lagrange_eval, vanishing_poly, EvaluationDomain};
pub use field::{batch_inverse, FieldElement, Fp, FIELD_BYTES, GOLDILOCKS};
pub use poly::{add, div_rem, eval, mod_cyclotomic, mul, sub, DensePolynomial};

/// Protocol polynomial type over [`FieldElement`].
pub type Poly = DensePolynomial<GOLDILOCKS>;
/// Protocol evaluation domain.
pub type Domain = EvaluationDomain<GOLDILOCKS>;
