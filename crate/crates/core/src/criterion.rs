//! The bound engine: `‖f‖_p ≤ (1/sin δ)·(2‖sin(s·)f‖_p + ‖Δ_t f‖_p)` whenever
//! `ts ∉ πZ`.
//!
//! In the variable `ξ = s·x` let `T = ts = mπ + τ` and
//! `E = ∪_k [kπ − δ, kπ + δ]` with `2δ ≤ τ ≤ π − 2δ`. Off `E`,
//! `|F| ≤ |sin ξ·F|/sin δ`. On `E`, `F(ξ) = F(ξ + T) − Δ_T F(ξ)` and
//! `ξ + T ∉ E`, so `F(ξ + T)` is again controlled by the sine term. The
//! change of variables multiplies all three norms by `|s|^{1/p}`, so the bound
//! holds verbatim in `x`.

use std::f64::consts::PI;

use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::function_model::TestFunction1D;
use crate::numerics::enclosure::up;
use crate::numerics::Enclosure;
use crate::symbolic::SymReal;

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_EPS_Q: f64 = 1e-9;
const E_SAMPLES_PER_PERIOD: usize = 257;
const E_PERIODS: i64 = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Assertive,
    Violated,
}

/// `T = ts = mπ + τ` with `0 ≤ τ < π`, and the distance of `T` to `πZ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuantizationReport {
    pub product: f64,
    pub m: i64,
    pub tau: f64,
    pub distance: f64,
    pub eps: f64,
    /// True when `T` was decided from exact rational multiples of π.
    pub exact: bool,
    pub verdict: Verdict,
}

impl QuantizationReport {
    pub fn is_assertive(&self) -> bool {
        self.verdict == Verdict::Assertive
    }

    fn from_parts(product: f64, m: i64, tau: f64, eps: f64, exact: bool) -> Self {
        let distance = tau.min(PI - tau).max(0.0);
        let verdict = if distance < eps || (exact && tau == 0.0) {
            Verdict::Violated
        } else {
            Verdict::Assertive
        };
        Self {
            product,
            m,
            tau,
            distance,
            eps,
            exact,
            verdict,
        }
    }
}

fn split_product(product: f64) -> (i64, f64) {
    let m = (product / PI).floor();
    let mut tau = (-m).mul_add(PI, product);
    let mut m = m as i64;
    if tau < 0.0 {
        tau += PI;
        m -= 1;
    } else if tau >= PI {
        tau -= PI;
        m += 1;
    }
    (m, tau.clamp(0.0, PI))
}

/// Decide whether `ts` lies within `eps` of `πZ`.
pub fn check_quantization(t: f64, s: f64, eps: f64) -> QuantizationReport {
    quantization_of_product(t * s, eps)
}

fn quantization_of_product(product: f64, eps: f64) -> QuantizationReport {
    if !product.is_finite() {
        return QuantizationReport {
            product,
            m: 0,
            tau: 0.0,
            distance: 0.0,
            eps,
            exact: false,
            verdict: Verdict::Violated,
        };
    }
    let (m, tau) = split_product(product);
    QuantizationReport::from_parts(product, m, tau, eps, false)
}

/// As [`check_quantization`], but exact when `t·s` is a rational multiple of
/// `π^0` or `π^1` (for instance `t = 3pi/2`, `s = 2`).
pub fn check_quantization_sym(t: &SymReal, s: &SymReal, eps: f64) -> QuantizationReport {
    quantization_of_sym(&t.mul(s), eps)
}

fn quantization_of_sym(product: &SymReal, eps: f64) -> QuantizationReport {
    match *product {
        SymReal::Exact { coeff, pi_exp: 1 } => {
            let (q, r) = coeff.numer().div_mod_floor(coeff.denom());
            let frac = r as f64 / *coeff.denom() as f64;
            let tau = frac * PI;
            let mut report = QuantizationReport::from_parts(product.value(), q, tau, eps, true);
            if r == 0 {
                report.verdict = Verdict::Violated;
            }
            report
        }
        SymReal::Exact { coeff, .. } if coeff.is_zero() => {
            QuantizationReport::from_parts(0.0, 0, 0.0, eps, true)
        }
        SymReal::Exact { coeff, pi_exp: 0 } => {
            // a nonzero rational is never in πZ; the distance still matters
            let mut report = quantization_of_product(coeff.to_f64().unwrap_or(f64::NAN), eps);
            report.exact = true;
            if report.distance < eps {
                report.verdict = Verdict::Violated;
            }
            report
        }
        _ => quantization_of_product(product.value(), eps),
    }
}

/// Options shared by the bound routines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriterionOptions {
    pub eps_q: f64,
    /// User-chosen `δ`; must satisfy `2δ ≤ τ ≤ π − 2δ`.
    pub delta: Option<f64>,
}

impl Default for CriterionOptions {
    fn default() -> Self {
        Self {
            eps_q: DEFAULT_EPS_Q,
            delta: None,
        }
    }
}

/// The exceptional set around the zeros of the sine.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ESet {
    /// `∪_k [kπ − δ, kπ + δ]` in `ξ = s·x`.
    IntervalUnion { delta: f64 },
    /// `{x : dist(⟨b, x⟩, πZ) ≤ δ}`, the lifted interval union.
    Strip { delta: f64, normal: Vec<f64> },
}

/// Deterministic sample check of `E + T ⊆ E^∁`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShiftCheck {
    pub samples: usize,
    /// Smallest `dist(ξ + T, πZ)` over the sampled `ξ ∈ E`.
    pub min_distance: f64,
    pub passed: bool,
}

/// `δ`, `E` and the multiplier norm, before any function is involved.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Decomposition {
    pub quantization: QuantizationReport,
    pub delta: f64,
    pub multiplier_norm: f64,
    pub e_set: ESet,
    pub shift_check: ShiftCheck,
}

fn dist_to_pi_z(x: f64) -> f64 {
    let r = x.rem_euclid(PI);
    r.min(PI - r)
}

fn choose_delta(report: &QuantizationReport, over: Option<f64>) -> Result<f64> {
    let tau = report.tau;
    match over {
        None => Ok(tau.min(PI - tau) / 4.0),
        Some(d) => {
            if !(d > 0.0) || !(2.0 * d <= tau) || !(tau <= PI - 2.0 * d) {
                return Err(invalid(
                    "delta",
                    format!("need 2*delta <= tau <= pi - 2*delta with tau = {tau}, got delta = {d}"),
                ));
            }
            Ok(d)
        }
    }
}

fn refuse(report: &QuantizationReport) -> Error {
    Error::Quantization {
        product: report.product,
        eps: report.eps,
    }
}

fn sample_shift_check(tau: f64, delta: f64) -> ShiftCheck {
    // ξ = kπ + u with |u| ≤ δ; then ξ + T = (k + m)π + (u + τ)
    let mut min_distance = f64::INFINITY;
    let mut samples = 0;
    for k in -E_PERIODS..=E_PERIODS {
        for i in 0..E_SAMPLES_PER_PERIOD {
            let u = -delta + 2.0 * delta * i as f64 / (E_SAMPLES_PER_PERIOD - 1) as f64;
            let shifted = k as f64 * PI + u + tau;
            let d = dist_to_pi_z(u + tau).min(dist_to_pi_z(shifted));
            min_distance = min_distance.min(d);
            samples += 1;
        }
    }
    // the direct remainder of kπ + u + τ carries ~|k|π ulps of error
    let slack = 64.0 * f64::EPSILON * (E_PERIODS as f64 + 1.0) * PI;
    ShiftCheck {
        samples,
        min_distance,
        passed: min_distance + slack >= delta,
    }
}

fn decomposition_from(report: QuantizationReport, opts: &CriterionOptions, e_set: impl FnOnce(f64) -> ESet) -> Result<Decomposition> {
    if !report.is_assertive() {
        return Err(refuse(&report));
    }
    let delta = choose_delta(&report, opts.delta)?;
    let shift_check = sample_shift_check(report.tau, delta);
    if !shift_check.passed {
        return Err(invalid("delta", "E + T meets E on the sample grid"));
    }
    let multiplier_norm = up(up(1.0 / delta.sin()) * (1.0 + 4.0 * f64::EPSILON));
    Ok(Decomposition {
        quantization: report,
        delta,
        multiplier_norm,
        e_set: e_set(delta),
        shift_check,
    })
}

/// `δ`, `E` and `‖h‖_∞ = ‖H‖_∞ = 1/sin δ` for the pair `(t, s)`.
pub fn build_decomposition(t: f64, s: f64, opts: &CriterionOptions) -> Result<Decomposition> {
    check_finite(t, s)?;
    decomposition_from(check_quantization(t, s, opts.eps_q), opts, |delta| {
        ESet::IntervalUnion { delta }
    })
}

pub fn build_decomposition_sym(t: &SymReal, s: &SymReal, opts: &CriterionOptions) -> Result<Decomposition> {
    check_finite(t.value(), s.value())?;
    decomposition_from(check_quantization_sym(t, s, opts.eps_q), opts, |delta| {
        ESet::IntervalUnion { delta }
    })
}

fn check_finite(t: f64, s: f64) -> Result<()> {
    if !t.is_finite() || !s.is_finite() {
        return Err(invalid("t, s", "must be finite"));
    }
    Ok(())
}

/// Enclosures of `‖Δ_t f‖_p` and `‖sin(s·) f‖_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InputNorms {
    pub shift: Enclosure,
    pub sine: Enclosure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundCertificate {
    pub schema_version: u32,
    pub t: f64,
    pub s: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    pub p: f64,
    pub m: i64,
    pub tau: f64,
    pub delta: f64,
    pub multiplier_norm: f64,
    pub e_set: ESet,
    pub shift_check: ShiftCheck,
    pub input_norms: InputNorms,
    /// `(1/sin δ)(2·sine + shift)` with upper endpoints.
    pub bound: f64,
    /// `(2/sin δ)·sine + shift`, which the same argument also yields.
    pub refined_bound: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub true_norm: Option<Enclosure>,
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", "require 1 <= p < inf"));
    }
    Ok(())
}

fn check_norms(norms: &InputNorms) -> Result<()> {
    for (name, e) in [("shift", norms.shift), ("sine", norms.sine)] {
        if !e.upper.is_finite() || e.lower < 0.0 || e.lower > e.upper {
            return Err(Error::InfiniteNorm(format!("{name} norm enclosure {e:?}")));
        }
    }
    Ok(())
}

fn finish(dec: Decomposition, t: f64, s: f64, p: f64, norms: InputNorms) -> BoundCertificate {
    let c = dec.multiplier_norm;
    let bound = up(c * up(up(2.0 * norms.sine.upper) + norms.shift.upper));
    let refined_bound = up(up(2.0 * c * norms.sine.upper) + norms.shift.upper);
    BoundCertificate {
        schema_version: SCHEMA_VERSION,
        t,
        s,
        a: None,
        b: None,
        p,
        m: dec.quantization.m,
        tau: dec.quantization.tau,
        delta: dec.delta,
        multiplier_norm: c,
        e_set: dec.e_set,
        shift_check: dec.shift_check,
        input_norms: norms,
        bound,
        refined_bound: refined_bound.min(bound),
        true_norm: None,
    }
}

/// Bound from given norm enclosures.
pub fn certify_bound(norms: InputNorms, t: f64, s: f64, p: f64, opts: &CriterionOptions) -> Result<BoundCertificate> {
    check_p(p)?;
    let dec = build_decomposition(t, s, opts)?;
    check_norms(&norms)?;
    Ok(finish(dec, t, s, p, norms))
}

pub fn certify_bound_sym(norms: InputNorms, t: &SymReal, s: &SymReal, p: f64, opts: &CriterionOptions) -> Result<BoundCertificate> {
    check_p(p)?;
    let dec = build_decomposition_sym(t, s, opts)?;
    check_norms(&norms)?;
    Ok(finish(dec, t.value(), s.value(), p, norms))
}

/// Norms of a closed-form test function for the pair `(t, s)`.
pub fn input_norms(f: &TestFunction1D, t: f64, s: f64, p: f64) -> Result<InputNorms> {
    Ok(InputNorms {
        shift: f.shift_norm(t, p)?,
        sine: f.sine_norm(s, p)?,
    })
}

/// Compute the norms of `f` and certify the bound; also attaches `‖f‖_p`
/// when it is available in closed form, for comparison.
pub fn certify_bound_fn(f: &TestFunction1D, t: f64, s: f64, p: f64, opts: &CriterionOptions) -> Result<BoundCertificate> {
    check_p(p)?;
    let dec = build_decomposition(t, s, opts)?;
    let norms = input_norms(f, t, s, p)?;
    let mut cert = finish(dec, t, s, p, norms);
    cert.true_norm = f.lp_norm(p).ok();
    Ok(cert)
}

pub fn certify_bound_fn_sym(f: &TestFunction1D, t: &SymReal, s: &SymReal, p: f64, opts: &CriterionOptions) -> Result<BoundCertificate> {
    check_p(p)?;
    let dec = build_decomposition_sym(t, s, opts)?;
    let (tv, sv) = (t.value(), s.value());
    let norms = input_norms(f, tv, sv, p)?;
    let mut cert = finish(dec, tv, sv, p, norms);
    cert.true_norm = f.lp_norm(p).ok();
    Ok(cert)
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Quantization report for the pair `(a, b)` in `ℝⁿ`, using `T = ⟨a, b⟩`.
pub fn check_quantization_nd(a: &[SymReal], b: &[SymReal], eps: f64) -> Result<QuantizationReport> {
    if a.len() != b.len() || a.is_empty() {
        return Err(invalid("a, b", "vectors must be nonempty and of equal length"));
    }
    if b.iter().all(|v| v.is_zero()) {
        return Err(invalid("b", "frequency vector must be nonzero"));
    }
    let t = a
        .iter()
        .zip(b)
        .fold(SymReal::rational(0.into()), |acc, (x, y)| acc.add(&x.mul(y)));
    Ok(quantization_of_sym(&t, eps))
}

/// nD bound for shifts by `a` and the multiplier `sin⟨b, ·⟩`.
///
/// `E = {x : dist(⟨b, x⟩, πZ) ≤ δ}` with `δ = τ/4`, `τ = dist(⟨a, b⟩, πZ)`;
/// in coordinates with `b` along the first axis this is the strip
/// `∪_k [kπ − δ, kπ + δ] × ℝ^{n−1}`. Norms are `‖F(· + a) − F‖_p` and
/// `‖sin⟨b, ·⟩ F‖_p`.
pub fn certify_bound_nd(norms: InputNorms, a: &[SymReal], b: &[SymReal], p: f64, opts: &CriterionOptions) -> Result<BoundCertificate> {
    check_p(p)?;
    let report = check_quantization_nd(a, b, opts.eps_q)?;
    let bv: Vec<f64> = b.iter().map(|v| v.value()).collect();
    let av: Vec<f64> = a.iter().map(|v| v.value()).collect();
    let normal = bv.clone();
    let dec = decomposition_from(report, opts, |delta| ESet::Strip { delta, normal })?;
    check_norms(&norms)?;
    let t = dot(&av, &bv);
    let mut cert = finish(dec, t, 1.0, p, norms);
    cert.a = Some(av);
    cert.b = Some(bv);
    Ok(cert)
}

pub fn parse_vector(s: &str) -> Result<Vec<SymReal>> {
    s.split(',').map(|tok| tok.parse()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::Provenance;

    fn sym(s: &str) -> SymReal {
        s.parse().unwrap()
    }

    #[test]
    fn quantization_examples() {
        let r = check_quantization(PI / 2.0, 1.0, DEFAULT_EPS_Q);
        assert!(r.is_assertive());
        assert_eq!(r.m, 0);
        assert!((r.tau - PI / 2.0).abs() < 1e-15);
        assert!(!check_quantization(PI, 1.0, DEFAULT_EPS_Q).is_assertive());
        assert!(!check_quantization(1.5 * PI, 2.0, DEFAULT_EPS_Q).is_assertive());
        assert!(!check_quantization(0.0, 1.0, DEFAULT_EPS_Q).is_assertive());
        let r = check_quantization(-1.0, 1.0, DEFAULT_EPS_Q);
        assert_eq!(r.m, -1);
        assert!((r.tau - (PI - 1.0)).abs() < 1e-15);
    }

    #[test]
    fn symbolic_quantization_is_exact() {
        for (t, s) in [("0", "1"), ("pi", "1"), ("-2pi", "1"), ("3pi/2", "2"), ("pi/3", "3")] {
            let r = check_quantization_sym(&sym(t), &sym(s), DEFAULT_EPS_Q);
            assert!(r.exact && !r.is_assertive(), "{t} {s}");
        }
        let r = check_quantization_sym(&sym("pi/2"), &sym("1"), DEFAULT_EPS_Q);
        assert!(r.exact && r.is_assertive());
        assert_eq!(r.tau, PI / 2.0);
        let r = check_quantization_sym(&sym("-pi/4"), &sym("1"), DEFAULT_EPS_Q);
        assert_eq!(r.m, -1);
        assert!((r.tau - 0.75 * PI).abs() < 1e-15);
    }

    #[test]
    fn decomposition_constants() {
        let d = build_decomposition(PI / 2.0, 1.0, &CriterionOptions::default()).unwrap();
        assert!((d.delta - PI / 8.0).abs() < 1e-15);
        assert!((d.multiplier_norm - 2.6131259).abs() < 1e-6);
        assert!(d.shift_check.passed);

        let opts = CriterionOptions {
            delta: Some(1e-6),
            ..Default::default()
        };
        let d = build_decomposition(PI / 2.0, 1.0, &opts).unwrap();
        assert!(d.multiplier_norm <= 1e7);

        let bad = CriterionOptions {
            delta: Some(1.0),
            ..Default::default()
        };
        assert!(build_decomposition(PI / 2.0, 1.0, &bad).is_err());
        assert!(matches!(
            build_decomposition(PI, 1.0, &CriterionOptions::default()),
            Err(Error::Quantization { .. })
        ));
    }

    #[test]
    fn multiplier_sup_on_complement() {
        for tau in [0.3, 1.0, PI / 2.0, 2.9] {
            let d = build_decomposition(tau, 1.0, &CriterionOptions::default()).unwrap();
            let n = 100_000;
            let mut sup: f64 = 0.0;
            for i in 0..=n {
                let xi = d.delta + (PI - 2.0 * d.delta) * i as f64 / n as f64;
                sup = sup.max(1.0 / xi.sin().abs());
            }
            assert!(sup <= d.multiplier_norm * (1.0 + 1e-12));
        }
    }

    #[test]
    fn unit_box_bound() {
        let f = TestFunction1D::boxed(0.0, 1.0).unwrap();
        let c = certify_bound_fn(&f, PI / 2.0, 1.0, 2.0, &CriterionOptions::default()).unwrap();
        assert!((c.bound - 6.425).abs() < 0.01 * 6.425, "{}", c.bound);
        assert!(c.bound >= 1.0);
        assert!(c.refined_bound <= c.bound);

        let c = certify_bound_fn(&f, 1.0, 1.0, 2.0, &CriterionOptions::default()).unwrap();
        assert!((c.delta - 0.25).abs() < 1e-15);
        assert!(c.bound >= 1.0);
    }

    #[test]
    fn zero_norms_give_zero_bound() {
        let z = InputNorms {
            shift: Enclosure::zero(),
            sine: Enclosure::zero(),
        };
        let c = certify_bound(z, 1.0, 1.0, 2.0, &CriterionOptions::default()).unwrap();
        assert_eq!(c.bound, 0.0);
        let inf = InputNorms {
            shift: Enclosure::exact(f64::INFINITY, Provenance::ClosedForm),
            sine: Enclosure::zero(),
        };
        assert!(certify_bound(inf, 1.0, 1.0, 2.0, &CriterionOptions::default()).is_err());
    }

    #[test]
    fn nd_examples() {
        let z = InputNorms {
            shift: Enclosure::exact(1.0, Provenance::ClosedForm),
            sine: Enclosure::exact(1.0, Provenance::ClosedForm),
        };
        let opts = CriterionOptions::default();
        let c = certify_bound_nd(z, &parse_vector("pi/2,5").unwrap(), &parse_vector("1,0").unwrap(), 2.0, &opts).unwrap();
        assert!((c.delta - PI / 8.0).abs() < 1e-15);
        let one_d = certify_bound(z, PI / 2.0, 1.0, 2.0, &opts).unwrap();
        assert_eq!(c.bound, one_d.bound);
        for (a, b) in [("pi,0", "1,0"), ("0,1", "1,0")] {
            let r = certify_bound_nd(z, &parse_vector(a).unwrap(), &parse_vector(b).unwrap(), 2.0, &opts);
            assert!(matches!(r, Err(Error::Quantization { .. })), "{a} {b}");
        }
        assert!(certify_bound_nd(z, &parse_vector("1,1").unwrap(), &parse_vector("0,0").unwrap(), 2.0, &opts).is_err());
    }
}
