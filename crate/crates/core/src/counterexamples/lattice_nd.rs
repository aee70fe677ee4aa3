use std::f64::consts::PI;

use super::{
    certify_all, check_p, cumulative_lower, cumulative_upper, rows_from, table_len, CounterexampleKind,
    NormReport, Parameters, VerificationReport,
};
use crate::criterion::SCHEMA_VERSION;
use crate::error::{invalid, Error, Result};
use crate::function_model::{RadiusRule, SimplexFamilyND};
use crate::lattice::{count_full_f64, l1, moment_constant, LatticeLayer, Orthant};
use crate::numerics::enclosure::{down, up};
use crate::numerics::{sum_with_tail_detailed, Enclosure, PowerEnvelope, Provenance, SeriesSpec};
use crate::trig::decompose_real;

/// Cutoff for the lattice layer sums.
pub const LATTICE_CUTOFF: u64 = 1_000_000;
/// Layers summed by quadrature-free lower bounds for the sine norm.
const SINE_LOWER_LAYERS: u64 = 200;
/// Upper limit on lattice points visited by [`shift_norm_by_enumeration`].
const ENUMERATION_BUDGET: f64 = 400_000.0;
const LATTICE_TERM_REL: f64 = 1e-11;

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// Admissible decay for the lattice family: `1 ≥ γ > 1 − 1/(n+1)`.
pub fn validate_gamma(n: usize, gamma: f64) -> Result<()> {
    if n == 0 {
        return Err(invalid("n", "dimension must be positive"));
    }
    let lo = 1.0 - 1.0 / (n as f64 + 1.0);
    if !(gamma > lo && gamma <= 1.0) {
        return Err(invalid(
            "gamma",
            format!("require 1 >= gamma > {lo} for n = {n}, got {gamma}"),
        ));
    }
    Ok(())
}

/// Simplices `πκ + Δ_{r(κ)}` with `r(κ) = (1 + ‖κ‖₁)^(−γ)`.
pub fn make_lattice_nd(n: usize, gamma: f64, p: f64) -> Result<SimplexFamilyND> {
    check_p(p)?;
    validate_gamma(n, gamma)?;
    SimplexFamilyND::lattice(n, RadiusRule { scale: 1.0, gamma })
}

fn undilated(f: &SimplexFamilyND) -> Result<()> {
    if f.dilation() != 1.0 {
        return Err(Error::Unsupported(
            "layer sums are implemented for undilated families".into(),
        ));
    }
    Ok(())
}

/// `Σ_k #layer_k · r_k^n / n!`, the p-mass of the indicator family.
///
/// Lower envelope from `#layer_k ≥ C(k+n−1, n−1) ≥ (k+1)^{n−1}/(n−1)!`,
/// upper from `#layer_k ≤ 2^n (k+1)^{n−1}`.
pub fn lattice_mass_series(f: &SimplexFamilyND) -> Result<SeriesSpec> {
    undilated(f)?;
    let n = f.dim();
    let RadiusRule { scale, gamma } = f.radius_rule();
    let vol = scale.powi(n as i32) / factorial(n);
    let env = PowerEnvelope {
        lower_coeff: vol / factorial(n - 1),
        upper_coeff: 2f64.powi(n as i32) * vol,
        shift: 1.0,
        exponent: n as f64 - 1.0 - gamma * n as f64,
        from: 0,
    };
    let e = -gamma * n as f64;
    Ok(SeriesSpec::new("lattice family mass", 0, env, move |k| {
        count_full_f64(n, k) * vol * (1.0 + k as f64).powf(e)
    })
    .with_term_rel(64.0 * f64::EPSILON))
}

fn check_axis(f: &SimplexFamilyND, axis: usize) -> Result<()> {
    let step = *f
        .steps()
        .get(axis)
        .ok_or_else(|| invalid("axis", format!("axis {axis} out of range")))?;
    if step != PI {
        return Err(Error::Unsupported(format!(
            "sine layer sum needs offsets on pi*Z along axis {axis}, step is {step}"
        )));
    }
    Ok(())
}

/// Upper layer series for `∫|sin(x_axis) F|^p`: on every simplex
/// `|sin ξ| ≤ ξ`, whose p-th moment is exact. The decay is not validated, so
/// the tail test is what decides finiteness.
pub fn lattice_sine_series(f: &SimplexFamilyND, axis: usize, p: f64) -> Result<SeriesSpec> {
    check_p(p)?;
    undilated(f)?;
    check_axis(f, axis)?;
    let n = f.dim();
    let RadiusRule { scale, gamma } = f.radius_rule();
    let mc = moment_constant(n, p) * scale.powf(n as f64 + p);
    let e = -gamma * (n as f64 + p);
    let env = PowerEnvelope {
        lower_coeff: 0.0,
        upper_coeff: 2f64.powi(n as i32) * mc,
        shift: 1.0,
        exponent: n as f64 - 1.0 + e,
        from: 0,
    };
    Ok(SeriesSpec::new(format!("lattice sine axis {}", axis + 1), 0, env, move |k| {
        count_full_f64(n, k) * mc * (1.0 + k as f64).powf(e)
    })
    .with_term_rel(LATTICE_TERM_REL))
}

/// Lower bound on `∫|sin(x_axis) F|^p` from `sin ξ ≥ ξ·sin(r)/r` on `[0, r]`.
fn lattice_sine_lower(f: &SimplexFamilyND, p: f64) -> f64 {
    let n = f.dim();
    let rule = f.radius_rule();
    let mc = moment_constant(n, p);
    let total: f64 = (0..=SINE_LOWER_LAYERS)
        .map(|k| {
            let r = rule.radius_at_layer(k);
            count_full_f64(n, k) * mc * r.powf(n as f64 + p) * (r.sin() / r).powf(p)
        })
        .sum();
    down(total * (1.0 - 1e-10)).max(0.0)
}

/// Exact series for `∫|F(x + π e_j) − F(x)|^p`, the same for every axis.
///
/// Shifting by one cell moves index `κ` to `κ + e_j`, whose layer differs by
/// one. The edges between layers `m` and `m+1` along an axis number
/// `#layer_m(ℤⁿ) + #layer_m(ℤ^{n−1})`, each contributing
/// `(r_m^n − r_{m+1}^n)/n!`; the tail uses `Rⁿ(1+m) − Rⁿ(2+m) ≤ γn(1+m)^{−γn−1}`.
pub fn lattice_shift_series(f: &SimplexFamilyND) -> Result<SeriesSpec> {
    undilated(f)?;
    let n = f.dim();
    let RadiusRule { scale, gamma } = f.radius_rule();
    let vol = scale.powi(n as i32) / factorial(n);
    let gn = gamma * n as f64;
    let env = PowerEnvelope {
        lower_coeff: 0.0,
        upper_coeff: (2f64.powi(n as i32) + 2f64.powi(n as i32 - 1)) * gn * vol,
        shift: 1.0,
        exponent: n as f64 - 2.0 - gn,
        from: 0,
    };
    Ok(SeriesSpec::new("lattice unit shift", 0, env, move |m| {
        let edges = count_full_f64(n, m) + count_full_f64(n - 1, m);
        let m1 = 1.0 + m as f64;
        let drop = -(-gn * (1.0 / m1).ln_1p()).exp_m1();
        edges * vol * m1.powf(-gn) * drop
    })
    .with_term_rel(64.0 * f64::EPSILON))
}

/// `∫|F(x + Σ v_j·step_j e_j) − F(x)|^p` by visiting every index up to a
/// layer limit, plus a mean-value tail. Returns the p-th power.
pub fn shift_norm_by_enumeration(f: &SimplexFamilyND, v: &[i64], layers: Option<u64>) -> Result<Enclosure> {
    undilated(f)?;
    let n = f.dim();
    if v.len() != n {
        return Err(invalid("v", "shift index must have one entry per axis"));
    }
    let d = l1(v);
    if d == 0 {
        return Ok(Enclosure::exact(0.0, Provenance::ClosedForm));
    }
    let rule = f.radius_rule();
    let vol = rule.scale.powi(n as i32) / factorial(n);
    let gn = rule.gamma * n as f64;
    if !(n as f64 - 2.0 - gn < -1.0) {
        return Err(Error::NotSummable(format!(
            "shift tail exponent {} >= -1",
            n as f64 - 2.0 - gn
        )));
    }
    let limit = layers.unwrap_or_else(|| {
        let mut visited = 0.0;
        let mut k = 0;
        while visited < ENUMERATION_BUDGET {
            visited += count_full_f64(n, k);
            k += 1;
        }
        k
    });
    let limit = limit.max(d + 1);
    let rn = |k: u64| vol * (1.0 + k as f64).powf(-gn);
    let (mut sum, mut slack) = (0.0, 0.0);
    let mut shifted = vec![0i64; n];
    for k in 0..=limit {
        for kappa in LatticeLayer::new(n, k, Orthant::Full)?.points() {
            for ((s, a), b) in shifted.iter_mut().zip(&kappa).zip(v) {
                *s = a + b;
            }
            let k2 = l1(&shifted);
            let (x, y) = (rn(k), rn(k2));
            sum += (x - y).abs();
            slack += 4.0 * f64::EPSILON * x.max(y);
        }
    }
    // |r^n(κ) − r^n(κ')| ≤ d·γn·vol·(1 + k − d)^{−γn−1} for ‖κ‖₁ = k > d
    let tail = PowerEnvelope {
        lower_coeff: 0.0,
        upper_coeff: 2f64.powi(n as i32) * (d as f64 + 1.0).powi(n as i32 - 1) * d as f64 * gn * vol,
        shift: 1.0 - d as f64,
        exponent: n as f64 - 2.0 - gn,
        from: d,
    }
    .tail_bound(limit);
    Ok(Enclosure {
        lower: down(sum * (1.0 - 1e-12) - slack).max(0.0),
        upper: up(up(sum * (1.0 + 1e-12) + slack) + tail),
        provenance: Provenance::SeriesTail,
    })
}

/// Certified `∫|Δ_{π e_j} F|^p` for one axis.
fn unit_shift_pow(f: &SimplexFamilyND) -> Result<(Enclosure, f64)> {
    let spec = lattice_shift_series(f)?;
    let s = sum_with_tail_detailed(&spec, LATTICE_CUTOFF)?;
    Ok((s.enclosure, s.tail_exponent))
}

/// Upper bound on `‖F(· + πv) − F‖_p` from the unit steps:
/// `Σ_j |v_j|·‖Δ_{π e_j} F‖_p`.
pub fn shift_closure(f: &SimplexFamilyND, v: &[i64], p: f64) -> Result<Enclosure> {
    check_p(p)?;
    if v.len() != f.dim() {
        return Err(invalid("v", "shift index must have one entry per axis"));
    }
    let (unit, _) = unit_shift_pow(f)?;
    let unit_norm = unit.powf_nonneg(1.0 / p).upper;
    let total = up(l1(v) as f64 * unit_norm * (1.0 + 4.0 * f64::EPSILON));
    Enclosure::new(0.0, total, Provenance::SeriesTail)
}

/// Upper bound on `‖F·sin⟨b,·⟩‖_p` for integer `b`, through
/// `sin⟨b,x⟩ = Σ_j Q_j^b(x) sin x_j` and the per-axis norms.
pub fn verify_multi_sine_closure(f: &SimplexFamilyND, b: &[f64], p: f64) -> Result<Enclosure> {
    check_p(p)?;
    if b.len() != f.dim() {
        return Err(invalid("b", "frequency vector must have one entry per axis"));
    }
    let dec = decompose_real(b)?;
    let sups = dec.sup_norms();
    let axis_norm = |j: usize| -> Result<Enclosure> {
        let spec = lattice_sine_series(f, j, p)?;
        let s = sum_with_tail_detailed(&spec, LATTICE_CUTOFF)?;
        let lower = lattice_sine_lower(f, p).min(s.enclosure.upper);
        Ok(Enclosure::new(lower, s.enclosure.upper, Provenance::SeriesTail)?.powf_nonneg(1.0 / p))
    };
    let active: Vec<usize> = (0..dec.q.len()).filter(|&j| !dec.q[j].is_zero()).collect();
    if let [j] = active[..] {
        if dec.q[j] == crate::trig::TrigPolynomial::constant(f.dim(), dec.b[j].signum()) {
            return axis_norm(j);
        }
    }
    let mut total = 0.0;
    for j in active {
        total = up(total + up(sups[j].upper * axis_norm(j)?.upper));
    }
    Enclosure::new(0.0, total, Provenance::SeriesTail)
}

/// Certified trichotomy for the lattice family: divergent mass, and finite
/// sine and unit-shift norms along every axis.
pub fn verify_lattice_nd(n: usize, gamma: f64, p: f64, thresholds: &[f64]) -> Result<VerificationReport> {
    let family = make_lattice_nd(n, gamma, p)?;
    let mass = lattice_mass_series(&family)?;
    let certs = certify_all(&mass, thresholds)?;

    let sine_lower = lattice_sine_lower(&family, p);
    let mut sine = Vec::with_capacity(n);
    let mut sine_cols = Vec::new();
    for axis in 0..n {
        let spec = lattice_sine_series(&family, axis, p)?;
        let s = sum_with_tail_detailed(&spec, LATTICE_CUTOFF)?;
        let e = Enclosure::new(sine_lower.min(s.enclosure.upper), s.enclosure.upper, Provenance::SeriesTail)?;
        sine.push(
            NormReport::new(format!("sin(x_{}) F", axis + 1), e, p).with_tail(s.tail_exponent, LATTICE_CUTOFF),
        );
        if axis == 0 {
            sine_cols = cumulative_upper(&spec, table_len(&certs));
        }
    }

    let shift_spec = lattice_shift_series(&family)?;
    let (unit, tail_exponent) = unit_shift_pow(&family)?;
    let shift = (0..n)
        .map(|axis| {
            NormReport::new(format!("F(x + pi e_{}) - F(x)", axis + 1), unit, p)
                .with_tail(tail_exponent, LATTICE_CUTOFF)
        })
        .collect();

    let rows = table_len(&certs);
    let layers = rows_from(
        &cumulative_lower(&mass, rows),
        &sine_cols,
        &cumulative_upper(&shift_spec, rows),
    );
    let nf = n as f64;
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        kind: CounterexampleKind::LatticeNd,
        p,
        parameters: Parameters {
            n: Some(n),
            gamma: Some(gamma),
            ..Default::default()
        },
        mass: certs,
        sine,
        shift,
        layers,
        notes: vec![
            format!("mass layer exponent {}", nf - 1.0 - gamma * nf),
            format!("sine layer exponent at p = 1: {}", nf - 1.0 - gamma * (nf + 1.0)),
        ],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::count_layer_full;
    use crate::numerics::certify_divergence;

    #[test]
    fn gamma_range() {
        assert!(validate_gamma(2, 0.7).is_ok());
        assert!(validate_gamma(2, 1.0).is_ok());
        assert!(validate_gamma(2, 0.6).is_err());
        assert!(validate_gamma(2, 2.0 / 3.0).is_err());
        assert!(validate_gamma(2, 1.01).is_err());
        assert!(make_lattice_nd(2, 0.6, 1.0).is_err());
    }

    #[test]
    fn radii() {
        let f = make_lattice_nd(2, 0.7, 1.0).unwrap();
        assert_eq!(f.radius(&[0, 0]), 1.0);
        assert!((f.radius(&[1, 1]) - 3f64.powf(-0.7)).abs() < 1e-15);
        assert!((f.radius(&[1, 1]) - 0.4638).abs() < 1e-3);
    }

    #[test]
    fn mass_terms_match_direct_enumeration() {
        let f = make_lattice_nd(2, 0.7, 1.0).unwrap();
        let spec = lattice_mass_series(&f).unwrap();
        for k in 0..30u64 {
            let direct: f64 = LatticeLayer::new(2, k, Orthant::Full)
                .unwrap()
                .points()
                .iter()
                .map(|kappa| f.radius(kappa).powi(2) / 2.0)
                .sum();
            assert!((spec.term(k) - direct).abs() <= 1e-13 * direct);
        }
        let c = certify_divergence(&spec, 5.0).unwrap();
        assert!(c.lower_bound >= 5.0);
    }

    #[test]
    fn shift_edges_match_enumeration() {
        // edge count between layers m and m+1 along axis 0
        for n in 1..=3usize {
            for m in 0..8u64 {
                let brute = LatticeLayer::new(n, m, Orthant::Full)
                    .unwrap()
                    .points()
                    .iter()
                    .filter(|k| k[0] >= 0)
                    .count()
                    + LatticeLayer::new(n, m + 1, Orthant::Full)
                        .unwrap()
                        .points()
                        .iter()
                        .filter(|k| k[0] < 0)
                        .count();
                let lower = if n == 1 { (m == 0) as u128 } else { count_layer_full(n - 1, m).unwrap() };
                assert_eq!(brute as u128, count_layer_full(n, m).unwrap() + lower, "n={n} m={m}");
            }
        }
    }

    #[test]
    fn unit_shift_agrees_with_enumeration() {
        let f = make_lattice_nd(2, 0.9, 1.0).unwrap();
        let (exact, _) = unit_shift_pow(&f).unwrap();
        let en = shift_norm_by_enumeration(&f, &[1, 0], Some(300)).unwrap();
        assert!(en.lower <= exact.upper && exact.lower <= en.upper, "{exact:?} {en:?}");
        let en2 = shift_norm_by_enumeration(&f, &[0, -1], Some(300)).unwrap();
        assert!(en2.lower <= exact.upper && exact.lower <= en2.upper);
    }

    #[test]
    fn exponents_for_the_reference_case() {
        let r = verify_lattice_nd(2, 0.7, 1.0, &[5.0]).unwrap();
        assert!(r.trichotomy());
        assert!((r.sine[0].tail_exponent.unwrap() + 1.1).abs() < 1e-12);
        assert!((r.shift[0].tail_exponent.unwrap() + 1.4).abs() < 1e-12);
    }

    #[test]
    fn sine_tail_refuses_below_threshold() {
        let f = SimplexFamilyND::lattice(2, RadiusRule { scale: 1.0, gamma: 0.66 }).unwrap();
        let spec = lattice_sine_series(&f, 0, 1.0).unwrap();
        assert!(spec.envelope.exponent >= -1.0);
        assert!(matches!(
            sum_with_tail_detailed(&spec, LATTICE_CUTOFF),
            Err(Error::NotSummable(_))
        ));
    }

    #[test]
    fn multi_sine_closure() {
        let f = make_lattice_nd(2, 0.7, 1.0).unwrap();
        let axis = verify_multi_sine_closure(&f, &[1.0, 0.0], 1.0).unwrap();
        let spec = lattice_sine_series(&f, 0, 1.0).unwrap();
        let direct = sum_with_tail_detailed(&spec, LATTICE_CUTOFF).unwrap().enclosure;
        assert_eq!(axis.upper, direct.powf_nonneg(1.0).upper);
        let both = verify_multi_sine_closure(&f, &[1.0, 1.0], 1.0).unwrap();
        assert!(both.upper <= up(2.0 * axis.upper * (1.0 + 1e-12)));
        let double = verify_multi_sine_closure(&f, &[2.0, 0.0], 1.0).unwrap();
        assert!((double.upper - 2.0 * axis.upper).abs() <= 1e-12 * axis.upper);
        assert!(verify_multi_sine_closure(&f, &[0.5, 1.0], 1.0).is_err());
    }

    #[test]
    fn shift_closure_by_triangle_inequality() {
        let f = make_lattice_nd(2, 0.7, 1.0).unwrap();
        let one = shift_closure(&f, &[1, 0], 1.0).unwrap();
        let three = shift_closure(&f, &[2, -1], 1.0).unwrap();
        assert!((three.upper - 3.0 * one.upper).abs() < 1e-12 * three.upper);
        let direct = shift_norm_by_enumeration(&f, &[2, -1], Some(200)).unwrap();
        assert!(direct.lower <= three.upper);
    }
}
