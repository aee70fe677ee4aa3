use super::{
    certify_all, check_p, cumulative_lower, cumulative_upper, rows_from, table_len, CounterexampleKind,
    NormReport, Parameters, VerificationReport,
};
use crate::criterion::SCHEMA_VERSION;
use crate::error::Result;
use crate::function_model::IntervalFamily1D;
use crate::numerics::enclosure::down;
use crate::numerics::{
    sin_power_integral, sum_with_tail_detailed, Enclosure, PowerEnvelope, Provenance, SeriesSpec,
};

/// Cutoff for the sine cap series; its tail is below `1e-12`.
pub const ONE_D_SINE_CUTOFF: u64 = 100_000;
/// Layers whose sine integrals are enclosed by quadrature for the lower bound.
const SINE_LOWER_LAYERS: u64 = 200;

/// The family `I_k = [kπ, kπ + a_k]`, `a_0 = 1/4`, `a_k = 1/(5|k|)`; the same
/// family serves every `p`.
pub fn make_one_d_pi(p: f64) -> Result<IntervalFamily1D> {
    check_p(p)?;
    Ok(IntervalFamily1D::one_d_pi())
}

/// `Σ_{|k| = layer} a_k^{p+1}/(p+1)`, the cap `|sin t| ≤ t` integrated over
/// each interval.
pub fn one_d_sine_cap_series(family: &IntervalFamily1D, p: f64) -> Result<SeriesSpec> {
    check_p(p)?;
    let fam = family.clone();
    let q = p + 1.0;
    let (c, shift, e) = fam.lengths().envelope();
    let jac = 1.0 / fam.dilation().abs();
    let cap = move |k: i64| fam.length(k).powf(q) / q;
    let env = PowerEnvelope::exact(2.0 * c.powf(q) / q * jac, shift, e * q, 1);
    Ok(SeriesSpec::new("interval family sine cap", 0, env, move |layer| {
        let m = layer as i64;
        let raw = if m == 0 { cap(0) } else { cap(m) + cap(-m) };
        raw * jac
    })
    .with_term_rel(8.0 * f64::EPSILON))
}

fn sine_lower(family: &IntervalFamily1D, p: f64) -> Result<f64> {
    let mut total = 0.0;
    for k in family
        .indices()
        .take_while(|k| k.unsigned_abs() <= SINE_LOWER_LAYERS)
    {
        total += sin_power_integral(0.0, family.length(k), p)?.lower;
    }
    Ok(down(total * (1.0 - 1e-12)) / family.dilation().abs())
}

/// Certified trichotomy for the 1D family at the pair `(π, 1)`.
pub fn verify_one_d(p: f64, thresholds: &[f64]) -> Result<VerificationReport> {
    let family = make_one_d_pi(p)?;
    let mass = family.mass_series()?;
    let certs = certify_all(&mass, thresholds)?;

    let cap = one_d_sine_cap_series(&family, p)?;
    let sine_sum = sum_with_tail_detailed(&cap, ONE_D_SINE_CUTOFF)?;
    let lower = sine_lower(&family, p)?.min(sine_sum.enclosure.upper);
    let sine_pow = Enclosure::new(lower, sine_sum.enclosure.upper, Provenance::SeriesTail)?;

    // differences telescope to an indicator of measure 2·a_0 = 1/2
    let shift_pow = Enclosure::exact(family.shift_measure_by_periods(1)?, Provenance::ClosedForm);

    let rows = table_len(&certs);
    let shift_col = vec![shift_pow.upper; rows as usize];
    let layers = rows_from(
        &cumulative_lower(&mass, rows),
        &cumulative_upper(&cap, rows),
        &shift_col,
    );

    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        kind: CounterexampleKind::OneDPi,
        p,
        parameters: Parameters {
            t: Some(std::f64::consts::PI),
            s: Some(1.0),
            ..Default::default()
        },
        mass: certs,
        sine: vec![NormReport::new("sin(x) f", sine_pow, p)
            .with_tail(cap.envelope.exponent, ONE_D_SINE_CUTOFF)],
        shift: vec![NormReport::new("f(x + pi) - f(x)", shift_pow, p)],
        layers,
        notes: vec!["intervals I_k = [k*pi, k*pi + a_k], a_0 = 1/4, a_k = 1/(5|k|)".into()],
    })
}
