//! Seeded Monte Carlo estimates over axis-aligned boxes.
//!
//! Used only as a statistical cross-check; results carry the
//! `monte-carlo-estimate` provenance and are never treated as certified.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::enclosure::{Enclosure, Provenance};
use crate::error::{invalid, Result};
use crate::function_model::PointFunction;

const SAMPLES_PER_BLOCK: u64 = 1 << 14;
pub const MIN_SAMPLES: u64 = 1000;

/// Axis-aligned box `Π [lo_j, hi_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBox {
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl SampleBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() || lo.len() != hi.len() {
            return Err(invalid("box", "bounds must be nonempty and of equal dimension"));
        }
        if lo.iter().zip(&hi).any(|(a, b)| !(a < b) || !a.is_finite() || !b.is_finite()) {
            return Err(invalid("box", "every side must satisfy lo < hi"));
        }
        Ok(Self { lo, hi })
    }

    pub fn cube(n: usize, lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(a, b)| b - a).product()
    }
}

/// Mean estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_error: f64,
}

impl Estimate {
    /// `mean ± k·SE` as an enclosure tagged as an estimate.
    pub fn band(&self, k: f64) -> Enclosure {
        Enclosure {
            lower: self.mean - k * self.std_error,
            upper: self.mean + k * self.std_error,
            provenance: Provenance::MonteCarloEstimate,
        }
    }
}

/// Estimate `∫_box g` from `samples` uniform points.
///
/// Each block of samples draws from its own ChaCha stream derived from
/// `seed`, and block moments are merged in order, so the result depends only
/// on `(seed, samples)`.
pub fn integrate<G>(g: G, region: &SampleBox, samples: u64, seed: u64) -> Result<Estimate>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    if samples < MIN_SAMPLES {
        return Err(invalid("samples", format!("need at least {MIN_SAMPLES}")));
    }
    let n = region.dim();
    let blocks = samples.div_ceil(SAMPLES_PER_BLOCK);
    let moments: Vec<(f64, f64, u64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b);
            let count = SAMPLES_PER_BLOCK.min(samples - b * SAMPLES_PER_BLOCK);
            let mut x = vec![0.0; n];
            let (mut s1, mut s2) = (0.0, 0.0);
            for _ in 0..count {
                for j in 0..n {
                    x[j] = rng.random_range(region.lo[j]..region.hi[j]);
                }
                let v = g(&x);
                s1 += v;
                s2 += v * v;
            }
            (s1, s2, count)
        })
        .collect();
    let (mut s1, mut s2) = (0.0, 0.0);
    for (a, b, _) in &moments {
        s1 += a;
        s2 += b;
    }
    let m = samples as f64;
    let mean = s1 / m;
    let var = ((s2 / m - mean * mean) * m / (m - 1.0)).max(0.0);
    let vol = region.volume();
    Ok(Estimate {
        mean: mean * vol,
        std_error: (var / m).sqrt() * vol,
    })
}

/// Band `mean ± 3·SE` for `∫_box |f|^p`.
pub fn monte_carlo_mass<F: PointFunction + ?Sized>(
    f: &F,
    region: &SampleBox,
    p: f64,
    samples: u64,
    seed: u64,
) -> Result<Enclosure> {
    if region.dim() != f.dim() {
        return Err(invalid("box", "dimension does not match the function"));
    }
    if !(p >= 1.0) {
        return Err(invalid("p", "require p >= 1"));
    }
    let est = integrate(|x| f.value(x).abs().powf(p), region, samples, seed)?;
    Ok(est.band(3.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_given_seed() {
        let region = SampleBox::cube(2, 0.0, 1.0).unwrap();
        let g = |x: &[f64]| x[0] * x[1];
        let a = integrate(g, &region, 50_000, 7).unwrap();
        let b = integrate(g, &region, 50_000, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.band(3.0).contains(0.25));
    }

    #[test]
    fn rejects_small_or_empty_inputs() {
        let region = SampleBox::cube(1, 0.0, 1.0).unwrap();
        assert!(integrate(|_| 1.0, &region, 10, 0).is_err());
        assert!(SampleBox::new(vec![1.0], vec![1.0]).is_err());
        assert!(SampleBox::new(vec![], vec![]).is_err());
    }
}
