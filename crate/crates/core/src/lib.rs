//! Finite-dimensional C*-bases, relative tensor products, fiber products and
//! C*-pseudo-multiplicative unitaries, with the canonical unitary of a finite
//! groupoid as the main source of examples.

pub mod corpus;
pub mod cstar_base;
mod decomp;
pub mod error;
pub mod fiber;
pub mod groupoid;
pub mod groupoid_pmu;
pub mod linalg;
pub mod measure;
pub mod pmu;
pub mod report;
pub mod rtp;
pub mod specfile;

pub use error::{Error, Result};
pub use linalg::{
    gram_quotient, solve_operator_constraints, span_equal, span_intersect, span_normalize, span_normalize_in,
    span_product, CMat, Constraint, GramQuotient, HilbertSpace, Operator, OperatorSpan, C, DEFAULT_TOL,
};
