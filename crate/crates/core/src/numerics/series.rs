//! Certified sums of nonnegative series and divergence certificates.
//!
//! A series is described by its terms plus a two-sided power envelope
//! `L·(k + s)^e ≤ term(k) ≤ U·(k + s)^e` valid for `k ≥ from`. The upper side
//! bounds tails by the integral test when `e < −1`; the lower side bounds
//! partial sums from below when `e ≥ −1`. A spec is accepted by exactly one of
//! [`sum_with_tail`] and [`certify_divergence`].

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{FromPrimitive, ToPrimitive};
use serde::{Serialize, Serializer};

use super::enclosure::{down, up, Enclosure, Provenance};
use super::sum::{blocked_sum_counted, nonneg_sum_enclosure, Neumaier};
use crate::error::{invalid, Error, Result};

/// Largest witness searched by direct enumeration.
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

const DEFAULT_TERM_REL: f64 = 8.0 * f64::EPSILON;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerEnvelope {
    pub lower_coeff: f64,
    pub upper_coeff: f64,
    pub shift: f64,
    pub exponent: f64,
    pub from: u64,
}

impl PowerEnvelope {
    /// Envelope whose bounds coincide with the terms themselves.
    pub fn exact(coeff: f64, shift: f64, exponent: f64, from: u64) -> Self {
        Self {
            lower_coeff: coeff,
            upper_coeff: coeff,
            shift,
            exponent,
            from,
        }
    }

    pub fn shape(&self, k: f64) -> f64 {
        (k + self.shift).powf(self.exponent)
    }

    pub fn is_summable(&self) -> bool {
        self.exponent < -1.0
    }

    /// `U·∫_K^∞ (x + s)^e dx`, an upper bound on `Σ_{k>K}` when `e < −1`.
    pub fn tail_bound(&self, cutoff: u64) -> f64 {
        let e1 = self.exponent + 1.0;
        let base = cutoff as f64 + self.shift;
        up(up(self.upper_coeff * base.powf(e1) / -e1) * (1.0 + 8.0 * f64::EPSILON))
    }
}

type TermFn = Arc<dyn Fn(u64) -> f64 + Send + Sync>;

/// A nonnegative series `Σ_{k ≥ start} term(k)`.
#[derive(Clone)]
pub struct SeriesSpec {
    term: TermFn,
    pub envelope: PowerEnvelope,
    pub start: u64,
    /// Relative error of one evaluation of `term`.
    pub term_rel: f64,
    pub label: String,
}

impl fmt::Debug for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SeriesSpec")
            .field("label", &self.label)
            .field("start", &self.start)
            .field("envelope", &self.envelope)
            .finish()
    }
}

impl SeriesSpec {
    pub fn new(
        label: impl Into<String>,
        start: u64,
        envelope: PowerEnvelope,
        term: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            term: Arc::new(term),
            envelope,
            start,
            term_rel: DEFAULT_TERM_REL,
            label: label.into(),
        }
    }

    pub fn with_term_rel(mut self, rel: f64) -> Self {
        self.term_rel = rel;
        self
    }

    pub fn term(&self, k: u64) -> f64 {
        if k < self.start {
            0.0
        } else {
            (self.term)(k)
        }
    }

    /// Multiply every term (and the envelope) by a positive factor.
    pub fn scaled(&self, factor: f64) -> SeriesSpec {
        let inner = self.term.clone();
        let mut env = self.envelope;
        env.lower_coeff *= factor;
        env.upper_coeff *= factor;
        SeriesSpec {
            term: Arc::new(move |k| inner(k) * factor),
            envelope: env,
            start: self.start,
            term_rel: self.term_rel + 2.0 * f64::EPSILON,
            label: self.label.clone(),
        }
    }

    /// Cumulative partial sums `S_0..=S_K` (uncertified, for tables and plots).
    pub fn partial_sums(&self, cutoff: u64) -> Vec<f64> {
        let mut acc = Neumaier::default();
        (0..=cutoff)
            .map(|k| {
                acc.add(self.term(k));
                acc.value()
            })
            .collect()
    }

    /// Certified enclosure of the finite partial sum up to `cutoff`.
    pub fn partial_enclosure(&self, cutoff: u64) -> Enclosure {
        if cutoff < self.start {
            return Enclosure::zero();
        }
        let (s, nonzero) = blocked_sum_counted(self.start, cutoff, |k| (self.term)(k));
        nonneg_sum_enclosure(s, nonzero, self.term_rel)
    }

    /// Spot-check that the upper envelope dominates terms past `cutoff`.
    fn check_upper_envelope(&self, cutoff: u64) -> Result<()> {
        let env = &self.envelope;
        let mut probes: Vec<u64> = (1..=64).filter_map(|d| cutoff.checked_add(d)).collect();
        let mut k = cutoff.max(1);
        for _ in 0..40 {
            match k.checked_mul(2) {
                Some(next) => {
                    probes.push(next);
                    k = next;
                }
                None => break,
            }
        }
        for k in probes {
            let t = self.term(k);
            let bound = env.upper_coeff * env.shape(k as f64);
            if t > bound * (1.0 + 1e-9) + f64::MIN_POSITIVE {
                return Err(Error::Envelope(format!(
                    "{}: term({k}) = {t:e} exceeds upper envelope {bound:e}",
                    self.label
                )));
            }
        }
        Ok(())
    }
}

/// Result of [`sum_with_tail_detailed`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailSum {
    pub enclosure: Enclosure,
    pub partial: Enclosure,
    pub tail_bound: f64,
    pub cutoff: u64,
    pub tail_exponent: f64,
}

/// `Σ_{k ≤ K} term(k)` plus an integral-test bound on the remainder.
pub fn sum_with_tail(spec: &SeriesSpec, cutoff: u64) -> Result<Enclosure> {
    sum_with_tail_detailed(spec, cutoff).map(|t| t.enclosure)
}

pub fn sum_with_tail_detailed(spec: &SeriesSpec, cutoff: u64) -> Result<TailSum> {
    let env = &spec.envelope;
    if cutoff < env.from {
        return Err(Error::Envelope(format!(
            "{}: cutoff {cutoff} precedes the envelope start {}",
            spec.label, env.from
        )));
    }
    if env.exponent >= 0.0 {
        return Err(Error::Envelope(format!(
            "{}: envelope exponent {} is not decreasing",
            spec.label, env.exponent
        )));
    }
    if !env.is_summable() {
        return Err(Error::NotSummable(format!(
            "{}: tail exponent {} >= -1 fails the integral test",
            spec.label, env.exponent
        )));
    }
    if cutoff as f64 + env.shift <= 0.0 {
        return Err(Error::Envelope(format!(
            "{}: cutoff + shift must be positive",
            spec.label
        )));
    }
    spec.check_upper_envelope(cutoff)?;

    let partial = spec.partial_enclosure(cutoff);
    let tail_bound = if env.upper_coeff == 0.0 {
        0.0
    } else {
        env.tail_bound(cutoff)
    };
    let enclosure = Enclosure {
        lower: partial.lower,
        upper: if tail_bound == 0.0 {
            partial.upper
        } else {
            up(partial.upper + tail_bound)
        },
        provenance: Provenance::SeriesTail,
    };
    Ok(TailSum {
        enclosure,
        partial,
        tail_bound,
        cutoff,
        tail_exponent: env.exponent,
    })
}

/// Which bound certifies a divergence witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DivergenceFormula {
    /// No terms needed (`M ≤ 0`).
    Empty,
    /// Terms were summed one by one up to the witness.
    DirectSum,
    /// Enumerated prefix up to `prefix_end` plus
    /// `L·∫_{prefix_end+1}^{K+1} (x + s)^e dx`.
    IntegralLowerBound {
        prefix_end: u64,
        prefix_lower: f64,
        lower_coeff: f64,
        shift: f64,
        exponent: f64,
    },
}

/// Witness that a nonnegative series exceeds a threshold.
///
/// Divergence is never represented as a floating point infinity: a certificate
/// exists for every finite threshold, which is what "= ∞" means here.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DivergenceCertificate {
    pub threshold: f64,
    #[serde(serialize_with = "as_decimal")]
    pub witness: BigUint,
    pub lower_bound: f64,
    pub formula: DivergenceFormula,
    /// True when the bound was checked against a term-by-term partial sum.
    pub cross_checked: bool,
}

fn as_decimal<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl DivergenceCertificate {
    pub fn witness_u64(&self) -> Option<u64> {
        self.witness.to_u64()
    }

    /// Certificate at a caller-chosen index, checked by direct summation.
    pub fn at_index(spec: &SeriesSpec, witness: u64, threshold: f64) -> Result<Self> {
        if witness > 100 * ENUMERATION_LIMIT {
            return Err(invalid("witness", "too large to check by enumeration"));
        }
        let partial = spec.partial_enclosure(witness);
        if partial.lower < threshold {
            return Err(Error::NotDivergent(format!(
                "{}: partial sum through {witness} is at least {} but below {threshold}",
                spec.label, partial.lower
            )));
        }
        Ok(Self {
            threshold,
            witness: BigUint::from(witness),
            lower_bound: partial.lower,
            formula: DivergenceFormula::DirectSum,
            cross_checked: true,
        })
    }
}

/// Find `K` with a certified partial sum `Σ_{k ≤ K} term(k) ≥ M`.
pub fn certify_divergence(spec: &SeriesSpec, threshold: f64) -> Result<DivergenceCertificate> {
    let env = spec.envelope;
    if env.is_summable() {
        return Err(Error::NotDivergent(format!(
            "{}: envelope exponent {} < -1, series is summable",
            spec.label, env.exponent
        )));
    }
    if !(env.lower_coeff > 0.0) {
        return Err(Error::NotDivergent(format!(
            "{}: no positive lower envelope declared",
            spec.label
        )));
    }
    if !threshold.is_finite() {
        return Err(invalid("threshold", "must be finite"));
    }
    if threshold <= 0.0 {
        return Ok(DivergenceCertificate {
            threshold,
            witness: BigUint::from(0u32),
            lower_bound: 0.0,
            formula: DivergenceFormula::Empty,
            cross_checked: true,
        });
    }

    // direct enumeration
    let rel = spec.term_rel + f64::EPSILON;
    let mut acc = Neumaier::default();
    let mut count = 0u64;
    let mut prefix_lower = 0.0;
    for k in 0..=ENUMERATION_LIMIT {
        let t = spec.term(k);
        acc.add(t);
        if t != 0.0 {
            count += 1;
        }
        let lower = nonneg_sum_enclosure(acc.value(), count, rel).lower;
        prefix_lower = lower;
        if lower >= threshold {
            return Ok(DivergenceCertificate {
                threshold,
                witness: BigUint::from(k),
                lower_bound: lower,
                formula: DivergenceFormula::DirectSum,
                cross_checked: true,
            });
        }
    }

    // analytic continuation from the enumerated prefix
    let prefix_end = ENUMERATION_LIMIT.max(env.from.saturating_sub(1));
    if prefix_end > ENUMERATION_LIMIT {
        prefix_lower = spec.partial_enclosure(prefix_end).lower;
    }
    let n0 = prefix_end as f64 + 1.0;
    let s = env.shift;
    let e = env.exponent;
    let l = env.lower_coeff;
    let need = threshold - prefix_lower;
    // smallest real K with the integral bound >= need, padded
    let k_real = if e == -1.0 {
        (n0 + s) * (need / l).exp() - 1.0 - s
    } else if e < 0.0 {
        let e1 = e + 1.0;
        ((n0 + s).powf(e1) + e1 * need / l).powf(1.0 / e1) - 1.0 - s
    } else {
        n0 - 1.0 + (need / (l * env.shape(n0))).ceil()
    };
    if !k_real.is_finite() {
        return Err(Error::Overflow(format!(
            "{}: witness for threshold {threshold} exceeds f64 range",
            spec.label
        )));
    }
    let k_pad = (k_real * (1.0 + 1e-9)).ceil() + 2.0;
    let bound = integral_lower_bound(prefix_lower, n0, k_pad, &env);
    if !(bound >= threshold) {
        return Err(Error::NotDivergent(format!(
            "{}: integral bound {bound} at K = {k_pad:e} does not reach {threshold}",
            spec.label
        )));
    }
    let witness = BigUint::from_f64(k_pad)
        .ok_or_else(|| Error::Overflow(format!("cannot represent witness {k_pad:e}")))?;
    Ok(DivergenceCertificate {
        threshold,
        witness,
        lower_bound: bound,
        formula: DivergenceFormula::IntegralLowerBound {
            prefix_end,
            prefix_lower,
            lower_coeff: l,
            shift: s,
            exponent: e,
        },
        cross_checked: false,
    })
}

/// `prefix + L·Σ_{k=n0}^{K} (k+s)^e`, bounded below by an integral, rounded down.
fn integral_lower_bound(prefix: f64, n0: f64, k: f64, env: &PowerEnvelope) -> f64 {
    let (s, e, l) = (env.shift, env.exponent, env.lower_coeff);
    let integral = if e == -1.0 {
        ((k + 1.0 + s) / (n0 + s)).ln()
    } else if e < 0.0 {
        let e1 = e + 1.0;
        ((k + 1.0 + s).powf(e1) - (n0 + s).powf(e1)) / e1
    } else {
        (k - n0 + 1.0) * env.shape(n0)
    };
    down(prefix + down(l * integral * (1.0 - 1e-12)))
}
