use std::f64::consts::PI;

use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use super::intervals::IntervalFamily1D;
use super::simplex::SimplexFamilyND;
use crate::error::{invalid, Error, Result};
use crate::lattice::LN_GAMMA_REL;
use crate::numerics::enclosure::{down, up};
use crate::numerics::{Enclosure, Provenance};

/// `φ(y) = (1 + |y|²)^(−exponent)` on `ℝ^dim`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadialTail {
    pub dim: usize,
    pub exponent: f64,
}

const RADIAL_STEP: f64 = 1e-3;
const RADIAL_CUTOFF: f64 = 1e12;

impl RadialTail {
    pub fn value(&self, y: &[f64]) -> f64 {
        let r2: f64 = y.iter().map(|v| v * v).sum();
        (1.0 + r2).powf(-self.exponent)
    }

    fn check(&self, p: f64) -> Result<f64> {
        let q = self.exponent * p;
        if self.dim > 0 && !(2.0 * q > self.dim as f64) {
            return Err(Error::InfiniteNorm(format!(
                "(1+|y|^2)^-{} is not in L^{p}(R^{})",
                self.exponent, self.dim
            )));
        }
        Ok(q)
    }

    /// `|S^{d−1}| = 2π^{d/2}/Γ(d/2)`.
    fn sphere_area(d: usize) -> f64 {
        let h = d as f64 / 2.0;
        2.0 * PI.powf(h) / ln_gamma(h).exp()
    }

    /// `‖φ‖_p^p` by radial quadrature on geometric cells over `[0, R]` plus the tail
    /// `∫_R^∞ ρ^{d−1−2q} dρ`, with `q = exponent·p`.
    pub fn norm_pow(&self, p: f64) -> Result<Enclosure> {
        let q = self.check(p)?;
        if self.dim == 0 {
            return Ok(Enclosure::exact(1.0, Provenance::ClosedForm));
        }
        let d = self.dim as f64;
        let g = |r: f64| r.powf(d - 1.0) * (1.0 + r * r).powf(-q);
        // g increases up to its peak and decreases after
        let peak = ((d - 1.0) / (2.0 * q - d + 1.0)).max(0.0).sqrt();
        // cutoff where the tail drops below 1e-9 of the unit-ball scale
        let cutoff = (1e-9 * (2.0 * q - d)).powf(1.0 / (d - 2.0 * q)).clamp(8.0, RADIAL_CUTOFF);
        let (mut lo, mut hi) = (0.0, 0.0);
        let mut a = 0.0;
        while a < cutoff {
            let b = (a + RADIAL_STEP * (1.0 + a)).min(cutoff);
            let (ga, gb) = (g(a), g(b));
            let top = if a <= peak && peak <= b { g(peak) } else { ga.max(gb) };
            lo += ga.min(gb) * (b - a);
            hi += top * (b - a);
            a = b;
        }
        let tail = cutoff.powf(d - 2.0 * q) / (2.0 * q - d);
        let area = Self::sphere_area(self.dim);
        let rel = 1e-12;
        Ok(Enclosure {
            lower: down(lo * area * (1.0 - rel)),
            upper: up((hi + tail) * area * (1.0 + rel)),
            provenance: Provenance::Quadrature,
        })
    }

    /// `π^{d/2}·Γ(q − d/2)/Γ(q)`, the Beta-function form of `‖φ‖_p^p`.
    pub fn norm_pow_closed(&self, p: f64) -> Result<Enclosure> {
        let q = self.check(p)?;
        if self.dim == 0 {
            return Ok(Enclosure::exact(1.0, Provenance::ClosedForm));
        }
        let h = self.dim as f64 / 2.0;
        let v = (h * PI.ln() + ln_gamma(q - h) - ln_gamma(q)).exp();
        Ok(Enclosure::around(v, 4.0 * LN_GAMMA_REL, Provenance::ClosedForm))
    }
}

/// The factor that depends on the first one or two frame coordinates.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "head", rename_all = "snake_case")]
pub enum Head {
    OneD(IntervalFamily1D),
    TwoD(SimplexFamilyND),
}

impl Head {
    pub fn dim(&self) -> usize {
        match self {
            Head::OneD(_) => 1,
            Head::TwoD(f) => f.dim(),
        }
    }

    fn value(&self, y: &[f64]) -> f64 {
        match self {
            Head::OneD(f) => f.value(y[0]),
            Head::TwoD(f) => f.value(y),
        }
    }
}

/// `F(x) = head(y_head)·φ(y_rest)` with `y = C·x` for an invertible frame `C`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProductFunction {
    frame: Vec<Vec<f64>>,
    head: Head,
    tail: RadialTail,
}

impl ProductFunction {
    pub fn new(frame: Vec<Vec<f64>>, head: Head, tail: RadialTail) -> Result<Self> {
        let n = frame.len();
        if n == 0 || frame.iter().any(|row| row.len() != n) {
            return Err(invalid("frame", "frame must be a nonempty square matrix"));
        }
        if head.dim() + tail.dim != n {
            return Err(invalid("frame", "head and tail dimensions must add up to n"));
        }
        if !(tail.exponent > 0.0) {
            return Err(invalid("tail", "radial exponent must be positive"));
        }
        let out = Self { frame, head, tail };
        if !(out.abs_det() > 1e-12) {
            return Err(invalid("frame", "frame matrix is singular"));
        }
        Ok(out)
    }

    pub fn dim(&self) -> usize {
        self.frame.len()
    }

    pub fn frame(&self) -> &[Vec<f64>] {
        &self.frame
    }

    pub fn head(&self) -> &Head {
        &self.head
    }

    pub fn tail(&self) -> RadialTail {
        self.tail
    }

    /// `|det C|`; every p-th power integral of `F` equals the one of
    /// `head·φ` divided by this.
    pub fn abs_det(&self) -> f64 {
        let mut m = self.frame.clone();
        let n = m.len();
        let mut det = 1.0;
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs()))
                .unwrap();
            if m[piv][c] == 0.0 {
                return 0.0;
            }
            m.swap(c, piv);
            det *= m[c][c];
            for r in c + 1..n {
                let f = m[r][c] / m[c][c];
                for k in c..n {
                    m[r][k] -= f * m[c][k];
                }
            }
        }
        det.abs()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return 0.0;
        }
        let y: Vec<f64> = self
            .frame
            .iter()
            .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
            .collect();
        let h = self.head.dim();
        let head = self.head.value(&y[..h]);
        if head == 0.0 {
            return 0.0;
        }
        head * self.tail.value(&y[h..])
    }

    pub fn dilate(&self, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(invalid("a", "dilation factor must be finite and nonzero"));
        }
        let mut out = self.clone();
        for row in &mut out.frame {
            for v in row.iter_mut() {
                *v *= a;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn radial_norm_matches_beta_form() {
        for (dim, e, p) in [(1, 3.0, 2.0), (2, 3.0, 2.0), (2, 2.0, 1.0), (1, 1.0, 1.0)] {
            let t = RadialTail { dim, exponent: e };
            let quad = t.norm_pow(p).unwrap();
            let closed = t.norm_pow_closed(p).unwrap();
            assert!(quad.lower <= closed.upper && closed.lower <= quad.upper, "{dim} {e} {p}");
            assert!(quad.width() < 1e-2 * closed.midpoint());
        }
        // d = 1, q = 1: ∫ 1/(1+y²) = π
        let t = RadialTail { dim: 1, exponent: 1.0 };
        assert!(t.norm_pow_closed(1.0).unwrap().contains(PI));
        assert_eq!(RadialTail { dim: 0, exponent: 3.0 }.norm_pow(2.0).unwrap().upper, 1.0);
        assert!(RadialTail { dim: 2, exponent: 0.5 }.norm_pow(1.0).is_err());
    }

    #[test]
    fn product_evaluation_and_determinant() {
        let frame = vec![vec![1.0, 0.0], vec![1.0, 2.0]];
        let f = ProductFunction::new(
            frame,
            Head::OneD(IntervalFamily1D::one_d_pi()),
            RadialTail { dim: 1, exponent: 2.0 },
        )
        .unwrap();
        assert!((f.abs_det() - 2.0).abs() < 1e-15);
        // y = (0.1, 0.1 + 2·0.2)
        let v = f.value(&[0.1, 0.2]);
        assert!((v - (1.0f64 + 0.25).powi(-2)).abs() < 1e-15);
        assert_eq!(f.value(&[1.0, 0.0]), 0.0);
        assert!((f.dilate(2.0).unwrap().abs_det() - 8.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_frames() {
        let head = Head::OneD(IntervalFamily1D::one_d_pi());
        let tail = RadialTail { dim: 1, exponent: 2.0 };
        assert!(ProductFunction::new(vec![vec![1.0, 2.0], vec![2.0, 4.0]], head.clone(), tail).is_err());
        assert!(ProductFunction::new(vec![vec![1.0]], head, tail).is_err());
    }
}
