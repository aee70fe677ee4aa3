//! Certified enclosures for the integrals and series that the criterion and
//! its counterexamples rely on.

pub mod enclosure;
pub mod monte_carlo;
pub mod quad;
pub mod series;
pub mod sum;

pub use enclosure::{Enclosure, Provenance};
pub use monte_carlo::{monte_carlo_mass, SampleBox};
pub use quad::{sin_power_integral, sin_power_integral_fast, sin_power_integral_with, QuadOptions};
pub use series::{
    certify_divergence, sum_with_tail, sum_with_tail_detailed, DivergenceCertificate,
    DivergenceFormula, PowerEnvelope, SeriesSpec, TailSum,
};
