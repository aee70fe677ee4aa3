//! Functions outside `L^p` whose shift-difference and sine-weighted norms are
//! certified finite, one for each way the quantization condition can fail.
//!
//! Every verification produces the same triple: a divergence certificate for
//! the p-mass, and finite enclosures for the sine and shift norms.

mod lattice_nd;
mod one_d;
mod singleton;
mod trivial;

pub use lattice_nd::{
    lattice_mass_series, lattice_shift_series, lattice_sine_series, make_lattice_nd,
    shift_closure, shift_norm_by_enumeration, validate_gamma, verify_lattice_nd,
    verify_multi_sine_closure, LATTICE_CUTOFF,
};
pub use one_d::{make_one_d_pi, one_d_sine_cap_series, verify_one_d, ONE_D_SINE_CUTOFF};
pub use singleton::{make_singleton_nd, verify_singleton_nd, SingletonCase, SingletonConstruction};
pub use trivial::{
    make_constant_counterexample, make_trivial_pair_counterexample, verify_trivial_pair, TrivialPair,
};

use serde::Serialize;

use crate::error::Result;
use crate::numerics::enclosure::{down, up};
use crate::numerics::{certify_divergence, DivergenceCertificate, Enclosure, SeriesSpec};
use crate::symbolic::SymReal;

/// Which construction a report belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CounterexampleKind {
    OneDPi,
    TZero,
    SZero,
    LatticeNd,
    SingletonDependent,
    SingletonIndependent,
}

impl CounterexampleKind {
    pub fn tag(&self) -> &'static str {
        match self {
            CounterexampleKind::OneDPi => "one_d_pi",
            CounterexampleKind::TZero => "t_zero",
            CounterexampleKind::SZero => "s_zero",
            CounterexampleKind::LatticeNd => "lattice_nd",
            CounterexampleKind::SingletonDependent => "singleton_dependent",
            CounterexampleKind::SingletonIndependent => "singleton_independent",
        }
    }

    pub fn from_tag(tag: &str) -> Result<Self> {
        Ok(match tag {
            "one_d_pi" => CounterexampleKind::OneDPi,
            "t_zero" => CounterexampleKind::TZero,
            "s_zero" => CounterexampleKind::SZero,
            "lattice_nd" => CounterexampleKind::LatticeNd,
            "singleton_dependent" => CounterexampleKind::SingletonDependent,
            "singleton_independent" => CounterexampleKind::SingletonIndependent,
            // the singleton case is decided by (a, b)
            "singleton" => CounterexampleKind::SingletonDependent,
            other => {
                return Err(crate::error::invalid(
                    "kind",
                    format!("unknown counterexample kind `{other}`"),
                ))
            }
        })
    }
}

/// One norm in a report: `∫|·|^p` and its p-th root.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NormReport {
    pub label: String,
    pub pth_power: Enclosure,
    pub norm: Enclosure,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<u64>,
}

impl NormReport {
    pub fn new(label: impl Into<String>, pth_power: Enclosure, p: f64) -> Self {
        Self {
            label: label.into(),
            norm: pth_power.powf_nonneg(1.0 / p),
            pth_power,
            tail_exponent: None,
            cutoff: None,
        }
    }

    pub fn with_tail(mut self, exponent: f64, cutoff: u64) -> Self {
        self.tail_exponent = Some(exponent);
        self.cutoff = Some(cutoff);
        self
    }

    pub fn is_finite(&self) -> bool {
        self.pth_power.upper.is_finite()
    }
}

/// Parameters a construction was built from.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Parameters {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exponent: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<SymReal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<SymReal>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

/// Cumulative sums per layer, for tables and plots.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LayerRow {
    pub layer: u64,
    pub partial_mass_lower: f64,
    pub partial_sine_upper: f64,
    pub partial_shift_upper: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub kind: CounterexampleKind,
    pub p: f64,
    pub parameters: Parameters,
    /// One certificate per requested threshold.
    pub mass: Vec<DivergenceCertificate>,
    pub sine: Vec<NormReport>,
    pub shift: Vec<NormReport>,
    #[serde(skip)]
    pub layers: Vec<LayerRow>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Divergent mass, finite sine norms and finite shift norms, all at once.
    pub fn trichotomy(&self) -> bool {
        !self.mass.is_empty()
            && self.mass.iter().all(|c| c.lower_bound >= c.threshold)
            && !self.sine.is_empty()
            && self.sine.iter().all(NormReport::is_finite)
            && !self.shift.is_empty()
            && self.shift.iter().all(NormReport::is_finite)
    }

    pub fn max_witness_u64(&self) -> Option<u64> {
        self.mass.iter().map(|c| c.witness_u64()).max().flatten()
    }
}

pub(crate) fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(crate::error::invalid("p", "require 1 <= p < inf"));
    }
    Ok(())
}

pub(crate) fn certify_all(spec: &SeriesSpec, thresholds: &[f64]) -> Result<Vec<DivergenceCertificate>> {
    if thresholds.is_empty() {
        return Err(crate::error::invalid("M", "at least one threshold is required"));
    }
    thresholds.iter().map(|&m| certify_divergence(spec, m)).collect()
}

pub(crate) const MIN_ROWS: u64 = 20;
pub(crate) const MAX_ROWS: u64 = 10_000;

/// Number of layers shown in tables: past the largest enumerable witness.
pub(crate) fn table_len(certs: &[DivergenceCertificate]) -> u64 {
    let w = certs
        .iter()
        .filter_map(|c| c.witness_u64())
        .max()
        .unwrap_or(0);
    (w + 1).clamp(MIN_ROWS, MAX_ROWS)
}

/// Rounded-down cumulative sums of `spec`.
pub(crate) fn cumulative_lower(spec: &SeriesSpec, rows: u64) -> Vec<f64> {
    let rel = spec.term_rel + 4.0 * f64::EPSILON;
    spec.partial_sums(rows - 1)
        .into_iter()
        .map(|v| down(v * (1.0 - rel)).max(0.0))
        .collect()
}

/// Rounded-up cumulative sums of `spec`.
pub(crate) fn cumulative_upper(spec: &SeriesSpec, rows: u64) -> Vec<f64> {
    let rel = spec.term_rel + 4.0 * f64::EPSILON;
    spec.partial_sums(rows - 1)
        .into_iter()
        .map(|v| up(v * (1.0 + rel)))
        .collect()
}

pub(crate) fn rows_from(mass: &[f64], sine: &[f64], shift: &[f64]) -> Vec<LayerRow> {
    mass.iter()
        .enumerate()
        .map(|(i, &m)| LayerRow {
            layer: i as u64,
            partial_mass_lower: m,
            partial_sine_upper: sine.get(i).copied().unwrap_or(*sine.last().unwrap_or(&0.0)),
            partial_shift_upper: shift.get(i).copied().unwrap_or(*shift.last().unwrap_or(&0.0)),
        })
        .collect()
}
