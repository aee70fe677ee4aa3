//! Certified bounds for the shift/sine criterion for membership in `L^p`,
//! and certified counterexamples for the pairs where it fails.
//!
//! * [`criterion`] turns enclosures of `‖Δ_t f‖_p` and `‖sin(s·) f‖_p` into an
//!   explicit bound on `‖f‖_p` when `ts ∉ πZ`.
//! * [`counterexamples`] builds functions outside `L^p` whose shift and sine
//!   norms are certified finite when `ts ∈ πZ`.
//! * [`numerics`], [`lattice`] and [`trig`] supply the enclosures, exact
//!   lattice counts and trigonometric identities behind both.

pub mod counterexamples;
pub mod criterion;
pub mod error;
pub mod function_model;
pub mod lattice;
pub mod numerics;
pub mod symbolic;
pub mod trig;

pub use error::{Error, Result};
pub use numerics::{DivergenceCertificate, Enclosure, Provenance, SeriesSpec};
pub use symbolic::SymReal;
