use std::f64::consts::PI;

use serde::Serialize;

use super::lattice_nd::{lattice_mass_series, lattice_sine_series, shift_norm_by_enumeration, LATTICE_CUTOFF};
use super::one_d::{one_d_sine_cap_series, ONE_D_SINE_CUTOFF};
use super::{
    certify_all, check_p, cumulative_lower, cumulative_upper, rows_from, table_len, CounterexampleKind,
    NormReport, Parameters, VerificationReport,
};
use crate::criterion::{check_quantization_nd, QuantizationReport, DEFAULT_EPS_Q, SCHEMA_VERSION};
use crate::error::{invalid, Result};
use crate::function_model::{
    Head, IntervalFamily1D, ProductFunction, RadialTail, RadiusRule, SimplexFamilyND,
};
use crate::numerics::enclosure::{down, up};
use crate::numerics::{sum_with_tail_detailed, Enclosure, Provenance, SeriesSpec};
use crate::symbolic::SymReal;

/// Relative size of the component of `a` orthogonal to `b` below which the
/// two are treated as parallel.
const PARALLEL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SingletonCase {
    /// `a` parallel to `b`.
    Dependent,
    /// `a = (mπ/|b|²)·b + a⊥` with `τ = |a⊥| > 0`.
    Independent,
}

/// A counterexample for the single pair `A = {a}`, `B = {b}` with `⟨a, b⟩ = mπ`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingletonConstruction {
    pub case: SingletonCase,
    pub function: ProductFunction,
    pub m: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    pub quantization: QuantizationReport,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Extend orthonormal `basis` to an orthonormal basis of `ℝⁿ`.
fn complete_basis(mut basis: Vec<Vec<f64>>, n: usize) -> Vec<Vec<f64>> {
    for i in 0..n {
        if basis.len() == n {
            break;
        }
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        // project twice for stability
        for _ in 0..2 {
            for u in &basis {
                let c = dot(&v, u);
                for (x, y) in v.iter_mut().zip(u) {
                    *x -= c * y;
                }
            }
        }
        let len = norm(&v);
        if len > 1e-6 {
            basis.push(v.iter().map(|x| x / len).collect());
        }
    }
    basis
}

/// Product counterexample for a pair with `⟨a, b⟩ ∈ πZ`.
///
/// With `y₁ = ⟨b, x⟩` the shift by `a` moves `y₁` by `mπ`. If `a ∥ b` the head
/// is the interval family in `y₁` and `φ = (1 + |y'|²)^(−n)` runs over `b⊥`.
/// Otherwise `y₂ = ⟨a⊥/τ, x⟩` moves by `τ`, the head is the simplex family on
/// offsets `(ℓ₁π, ℓ₂τ)` with radii `min(1, τ)/(1 + |ℓ₁| + |ℓ₂|)`, and `φ` runs
/// over the remaining `n − 2` directions.
pub fn make_singleton_nd(a: &[SymReal], b: &[SymReal], p: f64) -> Result<SingletonConstruction> {
    check_p(p)?;
    let report = check_quantization_nd(a, b, DEFAULT_EPS_Q)?;
    if report.is_assertive() {
        return Err(invalid(
            "a, b",
            format!(
                "<a, b> = {} is not in pi*Z; the pair is assertive, use the criterion engine",
                report.product
            ),
        ));
    }
    let m = if report.tau > PI / 2.0 { report.m + 1 } else { report.m };
    let n = a.len();
    let av: Vec<f64> = a.iter().map(SymReal::value).collect();
    let bv: Vec<f64> = b.iter().map(SymReal::value).collect();
    let bb = dot(&bv, &bv);
    let b_hat: Vec<f64> = bv.iter().map(|x| x / bb.sqrt()).collect();
    let along = dot(&av, &bv) / bb;
    let perp: Vec<f64> = av.iter().zip(&bv).map(|(x, y)| x - along * y).collect();
    let tau = norm(&perp);
    let tail = |dim: usize| RadialTail {
        dim,
        exponent: n as f64,
    };

    if tau <= PARALLEL_TOL * norm(&av).max(1.0) {
        let mut frame = vec![bv.clone()];
        frame.extend(complete_basis(vec![b_hat], n).into_iter().skip(1));
        let function = ProductFunction::new(frame, Head::OneD(IntervalFamily1D::one_d_pi()), tail(n - 1))?;
        return Ok(SingletonConstruction {
            case: SingletonCase::Dependent,
            function,
            m,
            tau: None,
            quantization: report,
        });
    }

    let p_hat: Vec<f64> = perp.iter().map(|x| x / tau).collect();
    let mut frame = vec![bv.clone(), p_hat.clone()];
    frame.extend(complete_basis(vec![b_hat, p_hat], n).into_iter().skip(2));
    let head = SimplexFamilyND::new(
        vec![PI, tau],
        RadiusRule {
            scale: tau.min(1.0),
            gamma: 1.0,
        },
    )?;
    let function = ProductFunction::new(frame, Head::TwoD(head), tail(n - 2))?;
    Ok(SingletonConstruction {
        case: SingletonCase::Independent,
        function,
        m,
        tau: Some(tau),
        quantization: report,
    })
}

/// Scale a nonnegative series by an enclosed positive factor, rounding so
/// the result stays a lower bound.
fn scaled_lower(spec: &SeriesSpec, factor: &Enclosure) -> SeriesSpec {
    spec.scaled(down(factor.lower * (1.0 - 4.0 * f64::EPSILON)))
}

/// Certified trichotomy for the singleton construction of `(a, b)`.
pub fn verify_singleton_nd(a: &[SymReal], b: &[SymReal], p: f64, thresholds: &[f64]) -> Result<VerificationReport> {
    let c = make_singleton_nd(a, b, p)?;
    let f = &c.function;
    let n = f.dim();
    let bv: Vec<f64> = b.iter().map(SymReal::value).collect();
    let det = norm(&bv);
    if (f.abs_det() - det).abs() > 1e-9 * det {
        return Err(invalid("frame", "frame determinant does not match |b|"));
    }
    let inv_det = Enclosure::new(down(1.0 / det * (1.0 - 4.0 * f64::EPSILON)), up(1.0 / det * (1.0 + 4.0 * f64::EPSILON)), Provenance::ClosedForm)?;
    let phi = f.tail().norm_pow(p)?;
    let weight = phi.mul_nonneg(&inv_det);

    let (mass, head_sine, head_sine_pow, head_shift, kind) = match f.head() {
        Head::OneD(fam) => {
            let mass = fam.mass_series()?;
            let cap = one_d_sine_cap_series(fam, p)?;
            let sine = sum_with_tail_detailed(&cap, ONE_D_SINE_CUTOFF)?;
            let shift = Enclosure::exact(fam.shift_measure_by_periods(c.m)?, Provenance::ClosedForm);
            (mass, cap, sine, shift, CounterexampleKind::SingletonDependent)
        }
        Head::TwoD(fam) => {
            let mass = lattice_mass_series(fam)?;
            let sine_spec = lattice_sine_series(fam, 0, p)?;
            let sine = sum_with_tail_detailed(&sine_spec, LATTICE_CUTOFF)?;
            let shift = shift_norm_by_enumeration(fam, &[c.m, 1], None)?;
            (mass, sine_spec, sine, shift, CounterexampleKind::SingletonIndependent)
        }
    };
    let mass = scaled_lower(&mass, &weight);
    let certs = certify_all(&mass, thresholds)?;
    let sine_upper = Enclosure::new(0.0, head_sine_pow.enclosure.upper, Provenance::SeriesTail)?;
    let sine_pow = sine_upper.mul_nonneg(&weight);
    let shift_pow = head_shift.mul_nonneg(&weight);

    let rows = table_len(&certs);
    let sine_col: Vec<f64> = cumulative_upper(&head_sine, rows)
        .into_iter()
        .map(|v| up(v * weight.upper))
        .collect();
    let layers = rows_from(&cumulative_lower(&mass, rows), &sine_col, &[shift_pow.upper]);

    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        kind,
        p,
        parameters: Parameters {
            n: Some(n),
            a: Some(a.to_vec()),
            b: Some(b.to_vec()),
            m: Some(c.m),
            tau: c.tau,
            ..Default::default()
        },
        mass: certs,
        sine: vec![NormReport::new("sin<b,x> F", sine_pow, p)
            .with_tail(head_sine_pow.tail_exponent, head_sine_pow.cutoff)],
        shift: vec![NormReport::new("F(x + a) - F(x)", shift_pow, p)],
        layers,
        notes: vec![format!(
            "phi = (1 + |y|^2)^-{n} on R^{}, |det| = {det}",
            f.tail().dim
        )],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_of(s: &str) -> Vec<SymReal> {
        crate::criterion::parse_vector(s).unwrap()
    }

    #[test]
    fn refuses_assertive_pairs() {
        assert!(make_singleton_nd(&vec_of("pi/2,0,0"), &vec_of("1,0,0"), 2.0).is_err());
    }

    #[test]
    fn dependent_case() {
        let c = make_singleton_nd(&vec_of("pi,0,0"), &vec_of("1,0,0"), 2.0).unwrap();
        assert_eq!(c.case, SingletonCase::Dependent);
        assert_eq!(c.m, 1);
        assert!((c.function.abs_det() - 1.0).abs() < 1e-12);
        // F(x) = f(x₁)·φ(x₂, x₃)
        let v = c.function.value(&[0.1, 0.5, 0.0]);
        assert!((v - 1.25f64.powi(-3)).abs() < 1e-12);
    }

    #[test]
    fn independent_case() {
        let c = make_singleton_nd(&vec_of("pi,2,0"), &vec_of("1,0,0"), 2.0).unwrap();
        assert_eq!(c.case, SingletonCase::Independent);
        assert_eq!(c.m, 1);
        assert!((c.tau.unwrap() - 2.0).abs() < 1e-12);
        let Head::TwoD(h) = c.function.head() else {
            panic!("expected a 2D head")
        };
        assert_eq!(h.steps(), &[PI, 2.0]);
        assert_eq!(h.radius_rule().scale, 1.0);
    }

    #[test]
    fn oblique_frames_have_determinant_b() {
        let c = make_singleton_nd(&vec_of("pi,pi,1"), &vec_of("1,1,0"), 1.0).unwrap();
        assert_eq!(c.case, SingletonCase::Independent);
        assert_eq!(c.m, 2);
        assert!((c.function.abs_det() - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn both_cases_verify() {
        for a in ["pi,0,0", "pi,2,0"] {
            let r = verify_singleton_nd(&vec_of(a), &vec_of("1,0,0"), 2.0, &[1.0, 10.0]).unwrap();
            assert!(r.trichotomy(), "{a}");
        }
    }

    #[test]
    fn dependent_shift_matches_one_d() {
        let r = verify_singleton_nd(&vec_of("pi,0,0"), &vec_of("1,0,0"), 2.0, &[1.0]).unwrap();
        // 1/2 times ‖(1 + |y|²)^-3‖_2^2 over R², which is π/5
        let expect = 0.5 * PI / 5.0;
        let e = r.shift[0].pth_power;
        assert!(e.lower <= expect && expect <= e.upper, "{e:?}");
    }
}
