use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::series::{PowerEnvelope, SeriesSpec};

/// Length of the interval attached to index `k`, as a function of `|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum LengthRule {
    /// `head` at `k = 0`, `coeff / |k|` otherwise.
    Reciprocal { head: f64, coeff: f64 },
    /// `coeff · (1 + |k|)^(−gamma)`.
    Power { coeff: f64, gamma: f64 },
}

impl LengthRule {
    pub fn length(&self, k: i64) -> f64 {
        let m = k.unsigned_abs();
        match *self {
            LengthRule::Reciprocal { head, coeff } => {
                if m == 0 {
                    head
                } else {
                    coeff / m as f64
                }
            }
            LengthRule::Power { coeff, gamma } => coeff * (1.0 + m as f64).powf(-gamma),
        }
    }

    /// `(coeff, shift, exponent)` with `length(±k) = coeff·(k + shift)^exponent` for `k ≥ 1`.
    pub fn envelope(&self) -> (f64, f64, f64) {
        match *self {
            LengthRule::Reciprocal { coeff, .. } => (coeff, 0.0, -1.0),
            LengthRule::Power { coeff, gamma } => (coeff, 1.0, -gamma),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            LengthRule::Reciprocal { head, coeff } => head > 0.0 && coeff > 0.0 && head >= coeff,
            LengthRule::Power { coeff, gamma } => coeff > 0.0 && gamma > 0.0,
        };
        if ok {
            Ok(())
        } else {
            Err(invalid(
                "lengths",
                "lengths must be positive and nonincreasing in |k|",
            ))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "range", rename_all = "snake_case")]
pub enum IndexRange {
    All,
    Finite { lo: i64, hi: i64 },
}

impl IndexRange {
    pub fn contains(&self, k: i64) -> bool {
        match *self {
            IndexRange::All => true,
            IndexRange::Finite { lo, hi } => lo <= k && k <= hi,
        }
    }
}

/// Indicator of `∪_k {x : d·x ∈ [k·anchor, k·anchor + len_k]}`.
///
/// `d` is the accumulated dilation (1 for a freshly built family). Lengths are
/// nonincreasing in `|k|` and shorter than `anchor`, so the intervals are
/// pairwise disjoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalFamily1D {
    anchor: f64,
    lengths: LengthRule,
    range: IndexRange,
    dilation: f64,
}

impl IntervalFamily1D {
    pub fn new(anchor: f64, lengths: LengthRule, range: IndexRange) -> Result<Self> {
        if !(anchor > 0.0) || !anchor.is_finite() {
            return Err(invalid("anchor", "period anchor must be positive"));
        }
        lengths.validate()?;
        if lengths.length(0) >= anchor {
            return Err(invalid("lengths", "intervals must be shorter than the anchor spacing"));
        }
        if let IndexRange::Finite { lo, hi } = range {
            if lo > hi {
                return Err(invalid("range", "empty index range"));
            }
        }
        Ok(Self {
            anchor,
            lengths,
            range,
            dilation: 1.0,
        })
    }

    /// `I_k = [kπ, kπ + a_k]` with `a_0 = 1/4` and `a_k = 1/(5|k|)`.
    pub fn one_d_pi() -> Self {
        Self::new(
            PI,
            LengthRule::Reciprocal {
                head: 0.25,
                coeff: 0.2,
            },
            IndexRange::All,
        )
        .expect("valid constants")
    }

    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn lengths(&self) -> LengthRule {
        self.lengths
    }

    pub fn range(&self) -> IndexRange {
        self.range
    }

    pub fn dilation(&self) -> f64 {
        self.dilation
    }

    /// Length of the undilated interval `k` (zero outside the range).
    pub fn length(&self, k: i64) -> f64 {
        if self.range.contains(k) {
            self.lengths.length(k)
        } else {
            0.0
        }
    }

    /// Endpoints of interval `k` in the variable of the (possibly dilated) model.
    pub fn interval_of(&self, k: i64) -> Result<(f64, f64)> {
        if !self.range.contains(k) {
            return Err(Error::IndexOutOfRange { index: k });
        }
        let lo = k as f64 * self.anchor;
        let hi = lo + self.lengths.length(k);
        let (a, b) = (lo / self.dilation, hi / self.dilation);
        Ok(if a <= b { (a, b) } else { (b, a) })
    }

    pub fn value(&self, x: f64) -> f64 {
        let u = self.dilation * x;
        let k = (u / self.anchor).floor();
        if !k.is_finite() || k.abs() > i64::MAX as f64 / 2.0 {
            return 0.0;
        }
        let k = k as i64;
        if !self.range.contains(k) {
            return 0.0;
        }
        let off = u - k as f64 * self.anchor;
        if off >= 0.0 && off <= self.lengths.length(k) {
            1.0
        } else {
            0.0
        }
    }

    pub fn dilate(&self, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(invalid("a", "dilation factor must be finite and nonzero"));
        }
        let mut out = self.clone();
        out.dilation *= a;
        Ok(out)
    }

    /// Indices by increasing `|k|`: `0, 1, −1, 2, −2, …`, restricted to the range.
    pub fn indices(&self) -> impl Iterator<Item = i64> + '_ {
        let bound = match self.range {
            IndexRange::All => u64::MAX / 2,
            IndexRange::Finite { lo, hi } => lo.unsigned_abs().max(hi.unsigned_abs()),
        };
        (0..=bound)
            .flat_map(|m| {
                let m = m as i64;
                if m == 0 {
                    vec![0]
                } else {
                    vec![m, -m]
                }
            })
            .filter(move |k| self.range.contains(*k))
    }

    /// Measure of the intervals with `|k| = layer`.
    pub fn layer_measure(&self, layer: u64) -> f64 {
        let m = layer as i64;
        let raw = if m == 0 {
            self.length(0)
        } else {
            self.length(m) + self.length(-m)
        };
        raw / self.dilation.abs()
    }

    /// `∫|f|^p` restricted to layers `0..=layer` (independent of `p`).
    pub fn mass_prefix(&self, layer: u64) -> f64 {
        (0..=layer).map(|k| self.layer_measure(k)).sum()
    }

    /// The layer series of the p-mass, used for divergence certificates.
    pub fn mass_series(&self) -> Result<SeriesSpec> {
        if self.range != IndexRange::All {
            return Err(Error::Unsupported(
                "mass series of a finite family is a finite sum".into(),
            ));
        }
        let (c, shift, e) = self.lengths.envelope();
        let coeff = 2.0 * c / self.dilation.abs();
        let fam = self.clone();
        Ok(SeriesSpec::new(
            "interval family mass",
            0,
            PowerEnvelope::exact(coeff, shift, e, 1),
            move |k| fam.layer_measure(k),
        ))
    }

    /// Exact measure of the support of `f(· + m·anchor/d) − f(·)`.
    ///
    /// With lengths nonincreasing in `|k|` and tending to zero the sum
    /// `Σ_k |len_k − len_{k+m}|` telescopes over `k ≥ 0` and `k ≤ −m`, leaving
    /// finitely many terms. Only valid for the full index range.
    pub fn shift_measure_by_periods(&self, m: i64) -> Result<f64> {
        if self.range != IndexRange::All {
            return Err(Error::Unsupported("period shift of a finite family".into()));
        }
        let m = m.abs();
        if m == 0 {
            return Ok(0.0);
        }
        let len = |k: i64| self.lengths.length(k);
        let mut total = 0.0;
        // k >= 0: Σ (len_k − len_{k+m}) = Σ_{j=0}^{m−1} len_j
        for j in 0..m {
            total += len(j);
        }
        // k <= −m: Σ (len_{k+m} − len_k) = Σ_{i=−m+1}^{0} len_i
        for i in (-m + 1)..=0 {
            total += len(i);
        }
        // −m < k < 0
        for k in (-m + 1)..0 {
            total += (len(k) - len(k + m)).abs();
        }
        Ok(total / self.dilation.abs())
    }

    /// Direct partial sum `Σ_{|k| ≤ K} |len_k − len_{k+m}|` (cross-check).
    pub fn shift_measure_direct(&self, m: i64, cutoff: u64) -> f64 {
        let c = cutoff as i64;
        (-c..=c)
            .map(|k| (self.length(k) - self.length(k + m)).abs())
            .sum::<f64>()
            / self.dilation.abs()
    }

    /// Pairwise disjointness of the intervals with `|k| ≤ layer`.
    pub fn check_disjoint_prefix(&self, layer: u64) -> Result<()> {
        let mut ivs: Vec<(f64, f64)> = self
            .indices()
            .take_while(|k| k.unsigned_abs() <= layer)
            .map(|k| self.interval_of(k))
            .collect::<Result<_>>()?;
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in ivs.windows(2) {
            if w[0].1 >= w[1].0 {
                return Err(invalid(
                    "family",
                    format!("intervals {:?} and {:?} overlap", w[0], w[1]),
                ));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_d_pi_intervals() {
        let f = IntervalFamily1D::one_d_pi();
        assert_eq!(f.interval_of(0).unwrap(), (0.0, 0.25));
        let (a, b) = f.interval_of(1).unwrap();
        assert_eq!(a, PI);
        assert!((b - (PI + 0.2)).abs() < 1e-15);
        let (a, b) = f.interval_of(-2).unwrap();
        assert_eq!(a, -2.0 * PI);
        assert!((b - (-2.0 * PI + 0.1)).abs() < 1e-15);
        let (a, b) = f.interval_of(3).unwrap();
        assert!((b - a - 1.0 / 15.0).abs() < 1e-15);
    }

    #[test]
    fn evaluation() {
        let f = IntervalFamily1D::one_d_pi();
        assert_eq!(f.value(0.1), 1.0);
        assert_eq!(f.value(PI / 2.0), 0.0);
        assert_eq!(f.value(-2.0 * PI + 0.05), 1.0);
        assert_eq!(f.value(-0.01), 0.0);
    }

    #[test]
    fn total_length_of_first_layers() {
        let f = IntervalFamily1D::one_d_pi();
        assert!((f.mass_prefix(2) - 0.85).abs() < 1e-15);
    }

    #[test]
    fn finite_range_rejects_outside_indices() {
        let f = IntervalFamily1D::new(
            PI,
            LengthRule::Power {
                coeff: 0.5,
                gamma: 1.0,
            },
            IndexRange::Finite { lo: -1, hi: 2 },
        )
        .unwrap();
        assert!(matches!(f.interval_of(3), Err(Error::IndexOutOfRange { index: 3 })));
        assert_eq!(f.indices().collect::<Vec<_>>(), vec![0, 1, -1, 2]);
        assert!(f.mass_series().is_err());
    }

    #[test]
    fn rejects_invalid_families() {
        let bad = LengthRule::Reciprocal {
            head: 0.1,
            coeff: 0.2,
        };
        assert!(IntervalFamily1D::new(PI, bad, IndexRange::All).is_err());
        let long = LengthRule::Power {
            coeff: 4.0,
            gamma: 1.0,
        };
        assert!(IntervalFamily1D::new(PI, long, IndexRange::All).is_err());
        assert!(IntervalFamily1D::one_d_pi().dilate(0.0).is_err());
    }

    #[test]
    fn shift_by_one_period_is_half() {
        let f = IntervalFamily1D::one_d_pi();
        assert_eq!(f.shift_measure_by_periods(1).unwrap(), 0.5);
        assert_eq!(f.shift_measure_by_periods(-1).unwrap(), 0.5);
        assert_eq!(f.shift_measure_by_periods(0).unwrap(), 0.0);
        for m in 1..5 {
            let closed = f.shift_measure_by_periods(m).unwrap();
            let direct = f.shift_measure_direct(m, 200_000);
            // the truncated remainder is at most 2·Σ_{j>K} len_j·… ≤ 2m·a_K
            assert!((closed - direct).abs() <= 2.0 * m as f64 * 0.2 / 200_000.0, "m={m}");
        }
    }

    #[test]
    fn disjoint_prefixes() {
        let f = IntervalFamily1D::one_d_pi();
        f.check_disjoint_prefix(500).unwrap();
        f.dilate(-3.0).unwrap().check_disjoint_prefix(100).unwrap();
    }
}
