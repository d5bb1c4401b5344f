//! Exact symbolic-numeric analysis of quasi-homogeneous planar polynomial
//! vector fields `x' = P(x, y), y' = Q(x, y)`.
//!
//! The pipeline is:
//!
//! 1. [`decomposition`]: infer admissible types `t = (t1, t2)` and split the
//!    field into its conservative and dissipative parts, `F = X_h + mu * D0`.
//! 2. [`monodromy`]: decide exactly whether orbits rotate around the origin
//!    from the factor structure of `h`.
//! 3. [`classification`]: evaluate the first Lyapunov quantity `f0` by complex
//!    residues and label the origin as a global center or a focus.
//! 4. [`reversibility`] and [`integrability`]: search the finite family of
//!    degree-zero changes for an axis-reversible form, and decide analytic
//!    integrability with an exactly verified first integral.
//!
//! [`oracle`] is an independent numerical cross-check built on ODE
//! integration, [`catalog`] encodes the classical low-degree families and
//! [`cli`] holds the expression parser, report types and command runner.

pub mod catalog;
pub mod classification;
pub mod cli;
pub mod decomposition;
pub mod error;
pub mod integrability;
pub mod monodromy;
pub mod normal_forms;
pub mod oracle;
pub mod poly;
pub mod precision;
pub mod reversibility;
pub mod roots;

pub use classification::{classify, Label, Verdict};
pub use decomposition::{decompose, infer_types, Decomposition, QHField};
pub use error::{Error, Result};
pub use poly::{BiPoly, Rational, TypeVector, UniPoly};
