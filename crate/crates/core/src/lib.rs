//! Rearrangement calculus, symmetric (quasi-)Banach function space norms,
//! Boyd and Matuszewska-Orlicz indices, the interpolation operators
//! `Φ_q`, `Ψ_p`, `Θ_{p,q}` and Calderón's `S_{p,q}`, and desk-scale
//! noncommutative checks on finite matrices under the standard trace.

// `!(x > 0.0)` is used on purpose so NaN fails the check too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod stepfn;

pub use error::{Error, Result};
pub use stepfn::StepFunction;
pub mod ncmatrix;
pub mod operators;
mod par;
pub mod quad;
pub mod report;
pub mod sample;
pub mod spaces;
pub mod suites;
