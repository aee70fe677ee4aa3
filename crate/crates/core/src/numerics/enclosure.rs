use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// How an enclosure was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    Quadrature,
    SeriesTail,
    MonteCarloEstimate,
}

/// A real interval `[lower, upper]` known to contain some quantity.
///
/// All constructors that combine floating point values round outward, so an
/// enclosure built from enclosures stays valid under `f64` rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Enclosure {
    pub lower: f64,
    pub upper: f64,
    pub provenance: Provenance,
}

impl Enclosure {
    pub fn new(lower: f64, upper: f64, provenance: Provenance) -> Result<Self> {
        if lower.is_nan() || upper.is_nan() || lower > upper {
            return Err(invalid(
                "enclosure",
                format!("require lower <= upper, got [{lower}, {upper}]"),
            ));
        }
        Ok(Self {
            lower,
            upper,
            provenance,
        })
    }

    pub fn exact(value: f64, provenance: Provenance) -> Self {
        Self {
            lower: value,
            upper: value,
            provenance,
        }
    }

    pub fn zero() -> Self {
        Self::exact(0.0, Provenance::ClosedForm)
    }

    /// A point value padded by a relative error budget, rounded outward.
    pub fn around(value: f64, rel: f64, provenance: Provenance) -> Self {
        let pad = value.abs() * rel;
        Self {
            lower: down(value - pad),
            upper: up(value + pad),
            provenance,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lower + self.upper)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    pub fn is_finite(&self) -> bool {
        self.lower.is_finite() && self.upper.is_finite()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    pub fn add(&self, other: &Enclosure) -> Enclosure {
        Enclosure {
            lower: down(self.lower + other.lower),
            upper: up(self.upper + other.upper),
            provenance: self.provenance,
        }
    }

    /// Product of two enclosures of nonnegative quantities.
    pub fn mul_nonneg(&self, other: &Enclosure) -> Enclosure {
        debug_assert!(self.lower >= 0.0 && other.lower >= 0.0);
        Enclosure {
            lower: down(self.lower * other.lower),
            upper: up(self.upper * other.upper),
            provenance: self.provenance,
        }
    }

    /// Multiply by an exact nonnegative scalar.
    pub fn scale(&self, factor: f64) -> Enclosure {
        debug_assert!(factor >= 0.0);
        Enclosure {
            lower: down(self.lower * factor),
            upper: up(self.upper * factor),
            provenance: self.provenance,
        }
    }

    /// `x ↦ x^e` for `e > 0` on an enclosure of a nonnegative quantity.
    pub fn powf_nonneg(&self, e: f64) -> Enclosure {
        debug_assert!(e > 0.0);
        let lo = self.lower.max(0.0);
        Enclosure {
            lower: down(down(lo.powf(e)) * (1.0 - 4.0 * f64::EPSILON)).max(0.0),
            upper: up(up(self.upper.powf(e)) * (1.0 + 4.0 * f64::EPSILON)),
            provenance: self.provenance,
        }
    }

    /// Intersection of two enclosures of the same quantity.
    pub fn intersect(&self, other: &Enclosure) -> Option<Enclosure> {
        let lower = self.lower.max(other.lower);
        let upper = self.upper.min(other.upper);
        (lower <= upper).then_some(Enclosure {
            lower,
            upper,
            provenance: self.provenance,
        })
    }
}

#[inline]
pub(crate) fn down(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        x.next_down()
    } else {
        x
    }
}

#[inline]
pub(crate) fn up(x: f64) -> f64 {
    if x.is_finite() && x != 0.0 {
        x.next_up()
    } else {
        x
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_reversed_bounds() {
        assert!(Enclosure::new(2.0, 1.0, Provenance::Quadrature).is_err());
        assert!(Enclosure::new(f64::NAN, 1.0, Provenance::Quadrature).is_err());
    }

    #[test]
    fn arithmetic_rounds_outward() {
        let a = Enclosure::exact(0.1, Provenance::ClosedForm);
        let b = Enclosure::exact(0.2, Provenance::ClosedForm);
        let s = a.add(&b);
        assert!(s.contains(0.1 + 0.2));
        assert!(s.lower < s.upper);
        let r = Enclosure::exact(2.0, Provenance::ClosedForm).powf_nonneg(0.5);
        assert!(r.contains(std::f64::consts::SQRT_2));
    }

    #[test]
    fn serializes_with_kebab_provenance() {
        let e = Enclosure::exact(0.5, Provenance::SeriesTail);
        let json = serde_json::to_string(&e).unwrap();
        assert_eq!(json, r#"{"lower":0.5,"upper":0.5,"provenance":"series-tail"}"#);
    }
}
