//! Lattice layers of `Z^n` under the ℓ¹ norm, and exact integrals over the
//! standard simplex `Δ_a^n = {ξ ≥ 0, Σ ξ_j ≤ a}`.

use statrs::function::gamma::ln_gamma;

use crate::error::{invalid, Error, Result};
use crate::numerics::series::{sum_with_tail, PowerEnvelope, SeriesSpec};
use crate::numerics::{Enclosure, Provenance};

/// Relative error budget for the log-gamma route of [`simplex_moment`].
pub const LN_GAMMA_REL: f64 = 1e-12;

/// Binomial coefficient with overflow detection.
pub fn binomial(n: u64, k: u64) -> Result<u128> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        let num = (n - i) as u128;
        let den = (i + 1) as u128;
        let g = gcd(acc, den);
        let (a, d) = (acc / g, den / g);
        let g2 = gcd(num, d);
        acc = a
            .checked_mul(num / g2)
            .ok_or_else(|| Error::Overflow(format!("C({n}, {k}) exceeds u128")))?
            / (d / g2);
    }
    Ok(acc)
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "dimension must be positive"));
    }
    Ok(())
}

/// `#{κ ∈ Z^n_+ : Σ κ_j = k} = C(k + n − 1, n − 1)`.
pub fn count_layer_nonneg(n: usize, k: u64) -> Result<u128> {
    check_dim(n)?;
    binomial(k + n as u64 - 1, n as u64 - 1)
}

/// `#{κ ∈ Z^n : Σ |κ_j| = k}`, summing over the number `j` of nonzero coordinates:
/// `Σ_j C(n, j)·2^j·C(k − 1, j − 1)`.
pub fn count_layer_full(n: usize, k: u64) -> Result<u128> {
    check_dim(n)?;
    count_full_allow_zero(n, k)
}

/// Same as [`count_layer_full`] but with `Z^0 = {0}`.
pub(crate) fn count_full_allow_zero(n: usize, k: u64) -> Result<u128> {
    if k == 0 {
        return Ok(1);
    }
    if n == 0 {
        return Ok(0);
    }
    let mut total: u128 = 0;
    for j in 1..=(n as u64).min(k) {
        let term = binomial(n as u64, j)?
            .checked_mul(1u128 << j)
            .and_then(|t| t.checked_mul(binomial(k - 1, j - 1).ok()?))
            .ok_or_else(|| Error::Overflow(format!("layer count n={n}, k={k}")))?;
        total = total
            .checked_add(term)
            .ok_or_else(|| Error::Overflow(format!("layer count n={n}, k={k}")))?;
    }
    Ok(total)
}

/// [`count_full_allow_zero`] as a float; exact while the count fits in
/// `u128`, a floating point evaluation of the same sum beyond that.
pub(crate) fn count_full_f64(n: usize, k: u64) -> f64 {
    if let Ok(c) = count_full_allow_zero(n, k) {
        return c as f64;
    }
    let kf = k as f64;
    let mut total = 0.0;
    for j in 1..=n.min(k as usize) {
        let mut c = 2f64.powi(j as i32) * binomial(n as u64, j as u64).unwrap_or(0) as f64;
        for i in 0..(j - 1) {
            c *= (kf - 1.0 - i as f64) / (i as f64 + 1.0);
        }
        total += c;
    }
    total
}

/// Which part of the lattice a layer ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orthant {
    /// All of `Z^n`.
    Full,
    /// `Z^n_+`.
    Nonneg,
}

/// The points of `Z^n` (or `Z^n_+`) with ℓ¹ norm `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LatticeLayer {
    pub n: usize,
    pub k: u64,
    pub orthant: Orthant,
}

impl LatticeLayer {
    pub fn new(n: usize, k: u64, orthant: Orthant) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { n, k, orthant })
    }

    pub fn count(&self) -> Result<u128> {
        match self.orthant {
            Orthant::Full => count_layer_full(self.n, self.k),
            Orthant::Nonneg => count_layer_nonneg(self.n, self.k),
        }
    }

    /// Enumerate every point of the layer, in lexicographic order of the
    /// nonnegative composition followed by sign patterns.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::new();
        let mut comp = vec![0u64; self.n];
        compositions(self.k, 0, &mut comp, &mut |c| match self.orthant {
            Orthant::Nonneg => out.push(c.iter().map(|&v| v as i64).collect()),
            Orthant::Full => {
                let nz: Vec<usize> = (0..c.len()).filter(|&j| c[j] != 0).collect();
                for mask in 0u64..(1 << nz.len()) {
                    let mut p: Vec<i64> = c.iter().map(|&v| v as i64).collect();
                    for (bit, &j) in nz.iter().enumerate() {
                        if mask >> bit & 1 == 1 {
                            p[j] = -p[j];
                        }
                    }
                    out.push(p);
                }
            }
        });
        out
    }
}

fn compositions(rest: u64, pos: usize, comp: &mut [u64], emit: &mut impl FnMut(&[u64])) {
    if pos + 1 == comp.len() {
        comp[pos] = rest;
        emit(comp);
        return;
    }
    for v in 0..=rest {
        comp[pos] = v;
        compositions(rest - v, pos + 1, comp, emit);
    }
}

/// ℓ¹ norm of a lattice point.
pub fn l1(kappa: &[i64]) -> u64 {
    kappa.iter().map(|v| v.unsigned_abs()).sum()
}

fn factorial(n: u64) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `a^n / n!`.
pub fn simplex_volume(n: usize, a: f64) -> Result<f64> {
    check_dim(n)?;
    if !(a > 0.0) {
        return Err(invalid("a", "simplex size must be positive"));
    }
    Ok(a.powi(n as i32) / factorial(n as u64))
}

/// `∫_{Δ_a^n} ξ_j^p dξ = a^{n+p}·Γ(p+1)/Γ(n+p+1)`.
///
/// Integer `p` goes through factorials; other `p` through log-gamma.
pub fn simplex_moment(n: usize, a: f64, p: f64) -> Result<f64> {
    check_dim(n)?;
    if !(a > 0.0) {
        return Err(invalid("a", "simplex size must be positive"));
    }
    if !(p >= 0.0) || !p.is_finite() {
        return Err(invalid("p", "moment order must be finite and nonnegative"));
    }
    let scale = a.powf(n as f64 + p);
    Ok(scale * moment_constant(n, p))
}

/// `Γ(p+1)/Γ(n+p+1)`, the moment of the unit simplex.
pub fn moment_constant(n: usize, p: f64) -> f64 {
    if p.fract() == 0.0 && p <= 150.0 {
        let pi = p as u64;
        // p!/(n+p)! = 1 / ((p+1)(p+2)...(p+n))
        1.0 / ((pi + 1)..=(pi + n as u64)).map(|i| i as f64).product::<f64>()
    } else {
        (ln_gamma(p + 1.0) - ln_gamma(n as f64 + p + 1.0)).exp()
    }
}

/// [`simplex_moment`] with its evaluation error budget.
pub fn simplex_moment_enclosure(n: usize, a: f64, p: f64) -> Result<Enclosure> {
    let v = simplex_moment(n, a, p)?;
    let rel = if p.fract() == 0.0 {
        (n as f64 + 4.0) * f64::EPSILON
    } else {
        LN_GAMMA_REL
    };
    Ok(Enclosure::around(v, rel, Provenance::ClosedForm))
}

/// Weight on lattice layers together with a declared envelope
/// `w(k) ≤ coeff·(k + shift)^exponent` (shift ≥ 1), used for the tail.
#[derive(Clone)]
pub struct LayerWeight {
    pub weight: std::sync::Arc<dyn Fn(u64) -> f64 + Send + Sync>,
    pub coeff: f64,
    pub shift: f64,
    pub exponent: f64,
}

impl LayerWeight {
    pub fn new(
        coeff: f64,
        shift: f64,
        exponent: f64,
        weight: impl Fn(u64) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            weight: std::sync::Arc::new(weight),
            coeff,
            shift,
            exponent,
        }
    }

    /// `w(k) = (1 + k)^exponent` with the exact envelope.
    pub fn power(exponent: f64) -> Self {
        Self::new(1.0, 1.0, exponent, move |k| (1.0 + k as f64).powf(exponent))
    }
}

/// The layer series `Σ_k #layer_k · w(k)` with an envelope derived from
/// `#layer_k ≤ 2^n·C(k+n−1, n−1) ≤ 2^n (k+1)^{n−1}`.
pub fn layer_series(n: usize, label: &str, w: &LayerWeight) -> Result<SeriesSpec> {
    check_dim(n)?;
    if w.shift < 1.0 {
        return Err(invalid("weight", "envelope shift must be at least 1"));
    }
    let weight = w.weight.clone();
    // only an upper envelope is declared for w
    let env = PowerEnvelope {
        lower_coeff: 0.0,
        upper_coeff: 2f64.powi(n as i32) * w.coeff,
        shift: w.shift,
        exponent: n as f64 - 1.0 + w.exponent,
        from: 0,
    };
    Ok(SeriesSpec::new(label, 0, env, move |k| {
        count_full_f64(n, k) * weight(k)
    }))
}

/// `Σ_{k ≤ K} #layer_k·w(k)` exactly, plus an integral-test tail.
pub fn layer_sum(n: usize, w: &LayerWeight, cutoff: u64) -> Result<Enclosure> {
    let spec = layer_series(n, "layer sum", w)?;
    sum_with_tail(&spec, cutoff)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_count(n: usize, k: u64, nonneg: bool) -> u128 {
        let r = k as i64;
        let lo = if nonneg { 0 } else { -r };
        let mut count = 0;
        let mut p = vec![lo; n];
        loop {
            if l1(&p) == k {
                count += 1;
            }
            let mut j = 0;
            loop {
                if j == n {
                    return count;
                }
                p[j] += 1;
                if p[j] <= r {
                    break;
                }
                p[j] = lo;
                j += 1;
            }
        }
    }

    #[test]
    fn nonneg_counts_match_examples() {
        assert_eq!(count_layer_nonneg(2, 7).unwrap(), 8);
        assert_eq!(count_layer_nonneg(1, 123).unwrap(), 1);
        assert_eq!(count_layer_nonneg(3, 4).unwrap(), 15);
        assert_eq!(brute_count(3, 4, true), 15);
    }

    #[test]
    fn full_counts_match_examples_and_brute_force() {
        assert_eq!(count_layer_full(2, 3).unwrap(), 12);
        assert_eq!(count_layer_full(2, 0).unwrap(), 1);
        assert_eq!(count_layer_full(3, 1).unwrap(), 6);
        for n in 1..=3 {
            for k in 0..=8 {
                let full = count_layer_full(n, k).unwrap();
                assert_eq!(full, brute_count(n, k, false), "n={n} k={k}");
                assert!(full <= (1u128 << n) * count_layer_nonneg(n, k).unwrap());
            }
        }
    }

    #[test]
    fn enumeration_is_exhaustive_and_duplicate_free() {
        for n in 1..=4 {
            for k in 0..=6 {
                for orthant in [Orthant::Full, Orthant::Nonneg] {
                    let layer = LatticeLayer::new(n, k, orthant).unwrap();
                    let pts = layer.points();
                    assert_eq!(pts.len() as u128, layer.count().unwrap());
                    assert!(pts.iter().all(|p| l1(p) == k));
                    let mut sorted = pts.clone();
                    sorted.sort();
                    sorted.dedup();
                    assert_eq!(sorted.len(), pts.len());
                }
            }
        }
    }

    #[test]
    fn overflow_is_reported() {
        assert!(matches!(count_layer_nonneg(60, u64::MAX / 4), Err(Error::Overflow(_))));
        assert!(count_layer_nonneg(0, 3).is_err());
    }

    #[test]
    fn simplex_formulas() {
        assert_eq!(simplex_volume(2, 1.0).unwrap(), 0.5);
        assert_eq!(simplex_volume(1, 0.25).unwrap(), 0.25);
        assert!((simplex_volume(4, 0.5).unwrap() - 0.5f64.powi(4) / 24.0).abs() < 1e-18);
        assert!((simplex_moment(1, 1.0, 2.0).unwrap() - 1.0 / 3.0).abs() < 1e-16);
        assert!((simplex_moment(2, 1.0, 2.0).unwrap() - 1.0 / 12.0).abs() < 1e-16);
        for n in 1..=5 {
            let a = 0.7f64;
            let p1 = simplex_moment(n, a, 1.0).unwrap();
            let cap = a.powi(n as i32 + 1) / factorial(n as u64 + 1);
            assert!((p1 - cap).abs() <= 1e-15 * cap);
        }
        assert!(simplex_volume(2, 0.0).is_err());
        assert!(simplex_moment(2, -1.0, 1.0).is_err());
    }

    #[test]
    fn real_moment_agrees_with_integer_route() {
        for n in 1..=5 {
            for p in 1..=6 {
                let exact = moment_constant(n, p as f64);
                let lg = (ln_gamma(p as f64 + 1.0) - ln_gamma((n + p) as f64 + 1.0)).exp();
                assert!((exact - lg).abs() <= LN_GAMMA_REL * exact);
            }
        }
    }

    #[test]
    fn layer_sum_one_dimension() {
        // 1 + 2(ζ(2) − 1) = π²/3 − 1
        let target = std::f64::consts::PI.powi(2) / 3.0 - 1.0;
        let e = layer_sum(1, &LayerWeight::power(-2.0), 100_000).unwrap();
        assert!(e.contains(target), "{e:?}");
        let zero = layer_sum(2, &LayerWeight::new(0.0, 1.0, -3.0, |_| 0.0), 10).unwrap();
        assert_eq!((zero.lower, zero.upper), (0.0, 0.0));
    }
}
