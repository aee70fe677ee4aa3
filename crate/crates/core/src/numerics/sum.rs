//! Deterministic compensated summation.
//!
//! Terms are grouped into fixed-size blocks. Each block is reduced with
//! Neumaier summation (possibly on another thread) and the block partials are
//! then combined sequentially in index order, so the result is bit-identical
//! for a given block size regardless of how rayon schedules the work.

use rayon::prelude::*;

use super::enclosure::{down, up, Enclosure, Provenance};

pub const BLOCK: u64 = 4096;

/// Running Neumaier accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// Sum `term(k)` for `k` in `start..=end` with fixed blocking.
pub fn blocked_sum<F>(start: u64, end: u64, term: F) -> f64
where
    F: Fn(u64) -> f64 + Sync,
{
    blocked_sum_counted(start, end, term).0
}

/// Like [`blocked_sum`], also returning how many terms were nonzero.
pub fn blocked_sum_counted<F>(start: u64, end: u64, term: F) -> (f64, u64)
where
    F: Fn(u64) -> f64 + Sync,
{
    if end < start {
        return (0.0, 0);
    }
    let count = end - start + 1;
    let blocks = count.div_ceil(BLOCK);
    let partials: Vec<(f64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let lo = start + b * BLOCK;
            let hi = (lo + BLOCK - 1).min(end);
            let mut acc = Neumaier::default();
            let mut nonzero = 0;
            for k in lo..=hi {
                let t = term(k);
                if t != 0.0 {
                    nonzero += 1;
                }
                acc.add(t);
            }
            (acc.value(), nonzero)
        })
        .collect();
    let mut acc = Neumaier::default();
    let mut nonzero = 0;
    for (p, n) in partials {
        acc.add(p);
        nonzero += n;
    }
    (acc.value(), nonzero)
}

/// Enclosure of a sum of nonnegative terms, each evaluated with relative
/// error at most `term_rel`.
///
/// The pad covers the term errors plus the Neumaier bound
/// `2u|S| + O(N u^2) Σ|x|`; for nonnegative terms `Σ|x| = S`.
/// With at most one nonzero term the summation itself is exact.
pub fn nonneg_sum_enclosure(sum: f64, terms: u64, term_rel: f64) -> Enclosure {
    let u = f64::EPSILON * 0.5;
    let rel = if terms <= 1 {
        term_rel
    } else {
        term_rel + 2.0 * u + 2.0 * (terms as f64) * u * u
    };
    if rel == 0.0 || sum == 0.0 {
        return Enclosure::exact(sum, Provenance::SeriesTail);
    }
    let pad = sum.abs() * rel;
    Enclosure {
        lower: down(sum - pad).max(0.0),
        upper: up(sum + pad),
        provenance: Provenance::SeriesTail,
    }
}
