//! Reals of the form `q·π^e` with rational `q`, parsed from tokens such as
//! `pi`, `pi/2`, `3pi`, `-2*pi` or `3/4`, so that membership in `πZ` can be
//! decided exactly instead of through a truncated decimal.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use num_traits::{CheckedAdd, CheckedMul, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SymReal {
    /// `coeff·π^pi_exp`.
    Exact { coeff: Rational, pi_exp: u32 },
    Float(f64),
}

impl SymReal {
    pub fn rational(q: Rational) -> Self {
        SymReal::Exact {
            coeff: q,
            pi_exp: 0,
        }
    }

    pub fn pi_multiple(q: Rational) -> Self {
        SymReal::Exact {
            coeff: q,
            pi_exp: 1,
        }
    }

    pub fn value(&self) -> f64 {
        match *self {
            SymReal::Exact { coeff, pi_exp } => {
                let c = coeff.to_f64().unwrap_or(f64::NAN);
                c * PI.powi(pi_exp as i32)
            }
            SymReal::Float(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, SymReal::Exact { .. })
    }

    pub fn is_zero(&self) -> bool {
        match self {
            SymReal::Exact { coeff, .. } => coeff.is_zero(),
            SymReal::Float(v) => *v == 0.0,
        }
    }

    /// Product, kept exact when both factors are and nothing overflows.
    pub fn mul(&self, other: &SymReal) -> SymReal {
        if let (
            SymReal::Exact { coeff: a, pi_exp: e },
            SymReal::Exact { coeff: b, pi_exp: f },
        ) = (self, other)
        {
            if let Some(c) = a.checked_mul(b) {
                return SymReal::Exact {
                    coeff: c,
                    pi_exp: e + f,
                };
            }
        }
        SymReal::Float(self.value() * other.value())
    }

    /// Sum, kept exact when both terms carry the same power of π (or one is zero).
    pub fn add(&self, other: &SymReal) -> SymReal {
        match (self, other) {
            (SymReal::Exact { coeff: a, .. }, _) if a.is_zero() => *other,
            (_, SymReal::Exact { coeff: b, .. }) if b.is_zero() => *self,
            (
                SymReal::Exact { coeff: a, pi_exp: e },
                SymReal::Exact { coeff: b, pi_exp: f },
            ) if e == f => match a.checked_add(b) {
                Some(c) => SymReal::Exact {
                    coeff: c,
                    pi_exp: *e,
                },
                None => SymReal::Float(self.value() + other.value()),
            },
            _ => SymReal::Float(self.value() + other.value()),
        }
    }

    pub fn abs(&self) -> SymReal {
        match *self {
            SymReal::Exact { coeff, pi_exp } => SymReal::Exact {
                coeff: coeff.abs(),
                pi_exp,
            },
            SymReal::Float(v) => SymReal::Float(v.abs()),
        }
    }
}

impl From<f64> for SymReal {
    fn from(v: f64) -> Self {
        SymReal::Float(v)
    }
}

impl fmt::Display for SymReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SymReal::Exact { coeff, pi_exp } => {
                let pi = match pi_exp {
                    0 => String::new(),
                    1 => "pi".to_string(),
                    e => format!("pi^{e}"),
                };
                if pi.is_empty() {
                    return write!(f, "{coeff}");
                }
                let (n, d) = (*coeff.numer(), *coeff.denom());
                match n {
                    0 => write!(f, "0"),
                    1 => write!(f, "{pi}"),
                    -1 => write!(f, "-{pi}"),
                    _ => write!(f, "{n}{pi}"),
                }?;
                if d != 1 && n != 0 {
                    write!(f, "/{d}")?;
                }
                Ok(())
            }
            SymReal::Float(v) => write!(f, "{v}"),
        }
    }
}

impl Serialize for SymReal {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn parse_error(input: &str) -> Error {
    Error::Parse(format!(
        "cannot read `{input}` as a number or a rational multiple of pi"
    ))
}

fn parse_int(s: &str, input: &str) -> Result<i64> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
        return Err(parse_error(input));
    }
    s.parse().map_err(|_| parse_error(input))
}

impl FromStr for SymReal {
    type Err = Error;

    fn from_str(input: &str) -> Result<Self> {
        let s: String = input
            .trim()
            .to_ascii_lowercase()
            .chars()
            .filter(|c| !c.is_whitespace())
            .collect();
        if s.is_empty() {
            return Err(parse_error(input));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(&s)),
        };
        if body.starts_with(['-', '+']) {
            return Err(parse_error(input));
        }
        let (head, den) = match body.rsplit_once('/') {
            Some((h, d)) => (h, parse_int(d, input)?),
            None => (body, 1),
        };
        if den == 0 {
            return Err(parse_error(input));
        }
        let (num_part, has_pi) = match head.strip_suffix("pi").or_else(|| head.strip_suffix('π')) {
            Some(rest) => (rest.strip_suffix('*').unwrap_or(rest), true),
            None => (head, false),
        };
        let sign = if neg { -1 } else { 1 };
        let pi_exp = u32::from(has_pi);
        if num_part.is_empty() {
            if !has_pi {
                return Err(parse_error(input));
            }
            return Ok(SymReal::Exact {
                coeff: Rational::new(sign, den),
                pi_exp,
            });
        }
        if num_part.bytes().all(|b| b.is_ascii_digit()) {
            let n = parse_int(num_part, input)?;
            return Ok(SymReal::Exact {
                coeff: Rational::new(sign * n, den),
                pi_exp,
            });
        }
        let v: f64 = num_part.parse().map_err(|_| parse_error(input))?;
        if !v.is_finite() {
            return Err(parse_error(input));
        }
        let pi = if has_pi { PI } else { 1.0 };
        Ok(SymReal::Float(sign as f64 * v * pi / den as f64))
    }
}
