//! `sin⟨b, x⟩ = Σ_j Q_j^b(x)·sin x_j` for integer frequency vectors `b`.
//!
//! The `Q_j^b` are polynomials in `cos x_i, sin x_i` with integer coefficients.
//! They are built by peeling axes left to right with the angle-addition rule,
//! and within one axis by the Chebyshev identities
//! `sin(m u) = U_{m−1}(cos u)·sin u` and `cos(m u) = T_m(cos u)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{invalid, Error, Result};
use crate::numerics::{Enclosure, Provenance};

/// Exponents of `cos x_j` and `sin x_j` for every axis.
type Monomial = Vec<(u32, u32)>;

/// Finite sum of integer multiples of `Π_j cos^{c_j}(x_j) sin^{s_j}(x_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrigPolynomial {
    n: usize,
    terms: BTreeMap<Monomial, i64>,
}

impl TrigPolynomial {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(n: usize, c: i64) -> Self {
        let mut p = Self::zero(n);
        p.add_term(vec![(0, 0); n], c);
        p
    }

    /// `c · cos(x_axis)^e`.
    fn cos_power(n: usize, axis: usize, e: u32, c: i64) -> Self {
        let mut m = vec![(0, 0); n];
        m[axis].0 = e;
        let mut p = Self::zero(n);
        p.add_term(m, c);
        p
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficients keyed by per-axis `(cos exponent, sin exponent)`.
    pub fn coefficients(&self) -> impl Iterator<Item = (&[(u32, u32)], i64)> {
        self.terms.iter().map(|(m, &c)| (m.as_slice(), c))
    }

    fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let sum = self.terms.get(&m).copied().unwrap_or(0) + c;
        if sum == 0 {
            self.terms.remove(&m);
        } else {
            self.terms.insert(m, sum);
        }
    }

    fn checked_add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (m, &c) in &other.terms {
            let cur = out.terms.get(m).copied().unwrap_or(0);
            let sum = cur.checked_add(c).ok_or_else(overflow)?;
            if sum == 0 {
                out.terms.remove(m);
            } else {
                out.terms.insert(m.clone(), sum);
            }
        }
        Ok(out)
    }

    fn checked_mul(&self, other: &Self) -> Result<Self> {
        let mut out = Self::zero(self.n);
        for (ma, &ca) in &self.terms {
            for (mb, &cb) in &other.terms {
                let m: Monomial = ma.iter().zip(mb).map(|(a, b)| (a.0 + b.0, a.1 + b.1)).collect();
                let c = ca.checked_mul(cb).ok_or_else(overflow)?;
                out = out.checked_add(&Self {
                    n: self.n,
                    terms: BTreeMap::from([(m, c)]),
                })?;
            }
        }
        Ok(out)
    }

    fn neg(&self) -> Self {
        Self {
            n: self.n,
            terms: self.terms.iter().map(|(m, &c)| (m.clone(), -c)).collect(),
        }
    }

    /// Multiply by `sin x_axis`.
    fn times_sin(&self, axis: usize) -> Self {
        Self {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|(m, &c)| {
                    let mut m = m.clone();
                    m[axis].1 += 1;
                    (m, c)
                })
                .collect(),
        }
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        let cs: Vec<(f64, f64)> = x.iter().map(|v| (v.cos(), v.sin())).collect();
        self.terms
            .iter()
            .map(|(m, &c)| {
                m.iter()
                    .zip(&cs)
                    .fold(c as f64, |acc, (&(ce, se), &(cv, sv))| {
                        acc * cv.powi(ce as i32) * sv.powi(se as i32)
                    })
            })
            .sum()
    }

    /// Sum of absolute coefficients, an upper bound on the sup norm.
    pub fn coefficient_l1(&self) -> u64 {
        self.terms.values().map(|c| c.unsigned_abs()).sum()
    }

    /// `[max over a grid of [0, 2π]^n, ℓ¹ norm of the coefficients]`.
    pub fn sup_norm(&self) -> Enclosure {
        let upper = self.coefficient_l1() as f64;
        if self.is_zero() {
            return Enclosure::exact(0.0, Provenance::ClosedForm);
        }
        let lower = grid_max(self, 200_000);
        Enclosure {
            lower: lower.min(upper),
            upper,
            provenance: Provenance::ClosedForm,
        }
    }
}

fn overflow() -> Error {
    Error::Overflow("trigonometric polynomial coefficient".into())
}

fn grid_max(q: &TrigPolynomial, budget: usize) -> f64 {
    let n = q.n.max(1);
    let per_axis = ((budget as f64).powf(1.0 / n as f64).floor() as usize).max(4);
    let step = std::f64::consts::TAU / per_axis as f64;
    let mut idx = vec![0usize; q.n];
    let mut x = vec![0.0; q.n];
    let mut best: f64 = 0.0;
    loop {
        for j in 0..q.n {
            x[j] = idx[j] as f64 * step;
        }
        best = best.max(q.evaluate(&x).abs());
        let mut j = 0;
        loop {
            if j == q.n {
                return best;
            }
            idx[j] += 1;
            if idx[j] < per_axis {
                break;
            }
            idx[j] = 0;
            j += 1;
        }
    }
}

/// Chebyshev polynomial in `cos x_axis`, as a [`TrigPolynomial`].
/// `second_kind` selects `U_m` instead of `T_m`.
fn chebyshev(n: usize, axis: usize, m: u32, second_kind: bool) -> Result<TrigPolynomial> {
    // coefficient vectors in powers of c; T: T0=1, T1=c; U: U0=1, U1=2c
    let mut prev: Vec<i64> = vec![1];
    let mut cur: Vec<i64> = if second_kind { vec![0, 2] } else { vec![0, 1] };
    let coeffs = if m == 0 {
        prev
    } else {
        for _ in 1..m {
            let mut next = vec![0i64; cur.len() + 1];
            for (i, &c) in cur.iter().enumerate() {
                next[i + 1] = next[i + 1].checked_add(c.checked_mul(2).ok_or_else(overflow)?).ok_or_else(overflow)?;
            }
            for (i, &c) in prev.iter().enumerate() {
                next[i] = next[i].checked_sub(c).ok_or_else(overflow)?;
            }
            prev = cur;
            cur = next;
        }
        cur
    };
    let mut out = TrigPolynomial::zero(n);
    for (e, c) in coeffs.into_iter().enumerate() {
        out = out.checked_add(&TrigPolynomial::cos_power(n, axis, e as u32, c))?;
    }
    Ok(out)
}

/// The canonical decomposition of `sin⟨b, x⟩`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub b: Vec<i64>,
    pub q: Vec<TrigPolynomial>,
}

impl Decomposition {
    /// `Σ_j Q_j(x) sin x_j`.
    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.q.iter().zip(x).map(|(q, xj)| q.evaluate(x) * xj.sin()).sum()
    }

    /// Sup-norm enclosures. By construction `|Q_j| ≤ |b_j|` pointwise, which
    /// tightens the coefficient bound.
    pub fn sup_norms(&self) -> Vec<Enclosure> {
        self.q
            .iter()
            .zip(&self.b)
            .map(|(q, &bj)| {
                let e = q.sup_norm();
                let cap = bj.unsigned_abs() as f64;
                Enclosure {
                    lower: e.lower.min(cap),
                    upper: e.upper.min(cap),
                    provenance: e.provenance,
                }
            })
            .collect()
    }

    /// `min(ℓ¹ norm of the coefficients, |b_j|)`, the same upper bounds as
    /// [`Decomposition::sup_norms`] without the grid search.
    pub fn sup_bounds(&self) -> Vec<f64> {
        self.q
            .iter()
            .zip(&self.b)
            .map(|(q, &bj)| (q.coefficient_l1() as f64).min(bj.unsigned_abs() as f64))
            .collect()
    }

    /// Maximum residual `|sin⟨b,x⟩ − Σ Q_j sin x_j|` over seeded random points.
    pub fn residual(&self, trials: usize, seed: u64) -> f64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let n = self.b.len();
        let mut worst: f64 = 0.0;
        for _ in 0..trials {
            let x: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
            let dot: f64 = self.b.iter().zip(&x).map(|(b, v)| *b as f64 * v).sum();
            worst = worst.max((dot.sin() - self.evaluate(&x)).abs());
        }
        worst
    }
}

/// Build `Q_1^b..Q_n^b` for an integer vector `b`.
pub fn decompose(b: &[i64]) -> Result<Decomposition> {
    if b.is_empty() {
        return Err(invalid("b", "frequency vector must be nonempty"));
    }
    let n = b.len();
    let (q, _) = sin_cos(b, 0, n)?;
    Ok(Decomposition { b: b.to_vec(), q })
}

/// Decomposition for real input, rejecting non-integer entries.
pub fn decompose_real(b: &[f64]) -> Result<Decomposition> {
    let ints: Result<Vec<i64>> = b
        .iter()
        .map(|&v| {
            if v.fract() == 0.0 && v.abs() < 1e15 {
                Ok(v as i64)
            } else {
                Err(invalid("b", format!("entry {v} is not an integer")))
            }
        })
        .collect();
    decompose(&ints?)
}

/// For the sub-vector `b[from..]`, returns `(Q_from..Q_{n−1}, C)` with
/// `sin⟨b', x'⟩ = Σ Q_j sin x_j` and `cos⟨b', x'⟩ = C`. Entries of `Q`
/// before `from` are zero.
fn sin_cos(b: &[i64], from: usize, n: usize) -> Result<(Vec<TrigPolynomial>, TrigPolynomial)> {
    if from == n {
        return Ok((vec![TrigPolynomial::zero(n); n], TrigPolynomial::constant(n, 1)));
    }
    let (rest_q, rest_c) = sin_cos(b, from + 1, n)?;
    let m = b[from].unsigned_abs() as u32;
    let sign = b[from].signum();
    let t = chebyshev(n, from, m, false)?;
    // sin(b u) = sign·U_{m−1}(cos u)·sin u
    let u = if m == 0 {
        TrigPolynomial::zero(n)
    } else {
        let u = chebyshev(n, from, m - 1, true)?;
        if sign < 0 {
            u.neg()
        } else {
            u
        }
    };

    // sin(bu + R) = sin(bu) cos R + cos(bu) sin R
    let mut q = Vec::with_capacity(n);
    for j in 0..n {
        let qj = if j < from {
            TrigPolynomial::zero(n)
        } else if j == from {
            u.checked_mul(&rest_c)?
        } else {
            t.checked_mul(&rest_q[j])?
        };
        q.push(qj);
    }
    // cos(bu + R) = cos(bu) cos R − sin(bu) sin R
    let mut sin_r = TrigPolynomial::zero(n);
    for j in (from + 1)..n {
        sin_r = sin_r.checked_add(&rest_q[j].times_sin(j))?;
    }
    let c = t
        .checked_mul(&rest_c)?
        .checked_add(&u.times_sin(from).checked_mul(&sin_r)?.neg())?;
    Ok((q, c))
}

impl fmt::Display for TrigPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        // highest degree first
        let mut entries: Vec<(&Monomial, i64)> = self.terms.iter().map(|(m, &c)| (m, c)).collect();
        entries.sort_by(|a, b| {
            let deg = |m: &Monomial| m.iter().map(|(c, s)| c + s).sum::<u32>();
            deg(b.0).cmp(&deg(a.0)).then_with(|| b.0.cmp(a.0))
        });
        for (i, (m, c)) in entries.iter().enumerate() {
            let factors: Vec<String> = m
                .iter()
                .enumerate()
                .flat_map(|(j, &(ce, se))| {
                    let mut v = Vec::new();
                    for (name, e) in [("cos", ce), ("sin", se)] {
                        match e {
                            0 => {}
                            1 => v.push(format!("{name}(x{})", j + 1)),
                            e => v.push(format!("{name}(x{})^{e}", j + 1)),
                        }
                    }
                    v
                })
                .collect();
            let mag = c.unsigned_abs();
            let body = match (factors.is_empty(), mag) {
                (true, _) => mag.to_string(),
                (false, 1) => factors.join("*"),
                (false, _) => format!("{mag}*{}", factors.join("*")),
            };
            match (i, *c < 0) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Display for Decomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .q
            .iter()
            .enumerate()
            .map(|(j, q)| format!("Q{} = {q}", j + 1))
            .collect();
        write!(f, "{}", parts.join("; "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_vector_gives_constant_one() {
        let d = decompose(&[1, 0, 0]).unwrap();
        assert_eq!(d.q[0], TrigPolynomial::constant(3, 1));
        assert!(d.q[1].is_zero() && d.q[2].is_zero());
    }

    #[test]
    fn angle_addition_and_double_angle() {
        let d = decompose(&[1, 1]).unwrap();
        assert_eq!(d.to_string(), "Q1 = cos(x2); Q2 = cos(x1)");
        let d = decompose(&[2, 0]).unwrap();
        assert_eq!(d.to_string(), "Q1 = 2*cos(x1); Q2 = 0");
        let d = decompose(&[3, 0]).unwrap();
        assert_eq!(d.q[0].to_string(), "4*cos(x1)^2 - 1");
    }

    #[test]
    fn sup_norms_match_grid_oracle() {
        let d = decompose(&[3, 0]).unwrap();
        let s = d.sup_norms()[0];
        assert!(s.contains(3.0) && s.upper <= 3.0);
        let d = decompose(&[2, 0]).unwrap();
        assert!(d.sup_norms()[0].contains(2.0));
        let d = decompose(&[1, 1]).unwrap();
        let s = d.q[0].sup_norm();
        assert!(s.contains(1.0) && s.upper <= 1.0 + 1e-12);
    }

    #[test]
    fn identity_residuals() {
        assert!(decompose(&[1, 1]).unwrap().residual(1000, 1) <= 1e-12);
        assert_eq!(decompose(&[0, 0]).unwrap().residual(100, 1), 0.0);
        assert!(decompose(&[3, -2, 1]).unwrap().residual(1000, 2) <= 1e-10);
    }

    #[test]
    fn parity() {
        for b in [vec![2, -1, 3], vec![-4, 1], vec![1, 1, 1, 1]] {
            let neg: Vec<i64> = b.iter().map(|v| -v).collect();
            let d = decompose(&b).unwrap();
            let dn = decompose(&neg).unwrap();
            for (q, qn) in d.q.iter().zip(&dn.q) {
                assert_eq!(qn, &q.neg());
            }
        }
    }

    #[test]
    fn rejects_non_integer_frequencies() {
        assert!(decompose_real(&[1.5, 0.0]).is_err());
        assert!(decompose_real(&[2.0, -1.0]).is_ok());
        assert!(decompose(&[]).is_err());
    }
}
