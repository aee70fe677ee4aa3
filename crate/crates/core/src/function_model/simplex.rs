use serde::Serialize;

use crate::error::{invalid, Result};
use crate::lattice::{l1, LatticeLayer, Orthant};

/// The simplex `Δ_a^n = {ξ ≥ 0, Σ ξ_j ≤ a}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimplexND {
    pub n: usize,
    pub a: f64,
}

impl SimplexND {
    pub fn new(n: usize, a: f64) -> Result<Self> {
        if n == 0 {
            return Err(invalid("n", "dimension must be positive"));
        }
        if !(a > 0.0) || !a.is_finite() {
            return Err(invalid("a", "simplex size must be positive"));
        }
        Ok(Self { n, a })
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.n && x.iter().all(|&v| v >= 0.0) && x.iter().sum::<f64>() <= self.a
    }
}

/// Radii `r(κ) = c·(1 + ‖κ‖₁)^(−γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusRule {
    pub scale: f64,
    pub gamma: f64,
}

impl RadiusRule {
    pub fn radius_at_layer(&self, k: u64) -> f64 {
        self.scale * (1.0 + k as f64).powf(-self.gamma)
    }
}

/// Indicator of `∪_κ (offset(κ) + Δ_{r(κ)}^n)` with `offset(κ)_j = steps_j·κ_j`,
/// evaluated at `d·x` for the accumulated dilation `d`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexFamilyND {
    steps: Vec<f64>,
    radius: RadiusRule,
    dilation: f64,
}

impl SimplexFamilyND {
    pub fn new(steps: Vec<f64>, radius: RadiusRule) -> Result<Self> {
        if steps.is_empty() {
            return Err(invalid("n", "dimension must be positive"));
        }
        if steps.iter().any(|s| !(*s > 0.0) || !s.is_finite()) {
            return Err(invalid("steps", "offset steps must be positive"));
        }
        if !(radius.scale > 0.0) || radius.scale > 1.0 {
            return Err(invalid("scale", "radii must lie in (0, 1]"));
        }
        if !(radius.gamma >= 0.0) || !radius.gamma.is_finite() {
            return Err(invalid("gamma", "decay exponent must be nonnegative"));
        }
        let min_step = steps.iter().cloned().fold(f64::INFINITY, f64::min);
        if radius.scale > min_step {
            return Err(invalid(
                "scale",
                "simplices would overlap: largest radius exceeds the smallest step",
            ));
        }
        Ok(Self {
            steps,
            radius,
            dilation: 1.0,
        })
    }

    /// Offsets `πκ` on `ℤⁿ`.
    pub fn lattice(n: usize, radius: RadiusRule) -> Result<Self> {
        Self::new(vec![std::f64::consts::PI; n], radius)
    }

    pub fn dim(&self) -> usize {
        self.steps.len()
    }

    pub fn steps(&self) -> &[f64] {
        &self.steps
    }

    pub fn radius_rule(&self) -> RadiusRule {
        self.radius
    }

    pub fn dilation(&self) -> f64 {
        self.dilation
    }

    pub fn radius(&self, kappa: &[i64]) -> f64 {
        self.radius.radius_at_layer(l1(kappa))
    }

    pub fn offset(&self, kappa: &[i64]) -> Vec<f64> {
        kappa
            .iter()
            .zip(&self.steps)
            .map(|(&k, s)| k as f64 * s)
            .collect()
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        if x.len() != self.dim() {
            return 0.0;
        }
        let mut kappa = Vec::with_capacity(x.len());
        let mut local = Vec::with_capacity(x.len());
        for (xi, s) in x.iter().zip(&self.steps) {
            let u = self.dilation * xi;
            let k = (u / s).floor();
            if !k.is_finite() || k.abs() > 1e15 {
                return 0.0;
            }
            kappa.push(k as i64);
            local.push(u - k * s);
        }
        let r = self.radius(&kappa);
        if local.iter().sum::<f64>() <= r {
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

    /// Each simplex sits in the box `offset(κ) + [0, r(κ)]ⁿ`; for every κ in
    /// layers `0..=layer` the box must fit inside its own lattice cell.
    pub fn check_disjoint_prefix(&self, layer: u64) -> Result<()> {
        for k in 0..=layer {
            for kappa in LatticeLayer::new(self.dim(), k, Orthant::Full)?.points() {
                let r = self.radius(&kappa);
                if let Some(s) = self.steps.iter().find(|&&s| r > s) {
                    return Err(invalid(
                        "family",
                        format!("simplex at {kappa:?} with radius {r} leaves its cell of width {s}"),
                    ));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn membership_matches_definition() {
        let s = SimplexND::new(3, 0.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100_000 {
            let x: Vec<f64> = (0..3).map(|_| rng.random_range(-0.2..0.8)).collect();
            let expect = x[0] >= 0.0 && x[1] >= 0.0 && x[2] >= 0.0 && x[0] + x[1] + x[2] <= 0.7;
            assert_eq!(s.contains(&x), expect);
        }
        assert!(SimplexND::new(2, 0.0).is_err());
    }

    #[test]
    fn lattice_family_evaluation() {
        let rule = RadiusRule {
            scale: 1.0,
            gamma: 0.7,
        };
        let f = SimplexFamilyND::lattice(2, rule).unwrap();
        assert!((f.radius(&[1, 1]) - 3f64.powf(-0.7)).abs() < 1e-15);
        assert_eq!(f.radius(&[0, 0]), 1.0);
        // r((1,0)) = 2^-0.7 ≈ 0.6156 ≥ 0.1
        assert_eq!(f.value(&[PI + 0.05, 0.05]), 1.0);
        assert_eq!(f.value(&[PI + 0.4, 0.3]), 0.0);
        assert_eq!(f.value(&[-PI + 0.3, 0.2]), 1.0);
        assert_eq!(f.value(&[1.5, 1.5]), 0.0);
        f.check_disjoint_prefix(10).unwrap();
    }

    #[test]
    fn dilation_rescales_support() {
        let rule = RadiusRule {
            scale: 1.0,
            gamma: 1.0,
        };
        let f = SimplexFamilyND::lattice(2, rule).unwrap();
        let g = f.dilate(2.0).unwrap();
        assert_eq!(g.value(&[0.2, 0.2]), 1.0);
        assert_eq!(g.value(&[0.3, 0.3]), 0.0);
        assert!(f.dilate(0.0).is_err());
    }

    #[test]
    fn rejects_overlapping_families() {
        let rule = RadiusRule {
            scale: 1.0,
            gamma: 1.0,
        };
        assert!(SimplexFamilyND::new(vec![PI, 0.5], rule).is_err());
        assert!(SimplexFamilyND::new(vec![], rule).is_err());
    }
}
