use super::{
    certify_all, check_p, cumulative_lower, rows_from, table_len, CounterexampleKind, NormReport,
    Parameters, VerificationReport,
};
use crate::criterion::SCHEMA_VERSION;
use crate::error::{invalid, Result};
use crate::function_model::{Profile, TestFunction1D};

/// The degenerate pairs: one of `t`, `s` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrivialPair {
    /// `t = 0`: the shift condition is empty, `1/x` on `(0, 1)` works.
    TZero,
    /// `s = 0`: the sine condition is empty, `(1 + |x|)^(−a)` works.
    SZero,
}

/// The function for the degenerate pair. For `s_zero`, `a` must lie strictly
/// inside `(1/p − 1, 1/p)` and defaults to the midpoint; `a` is ignored for
/// `t_zero`.
pub fn make_trivial_pair_counterexample(
    which: TrivialPair,
    p: f64,
    a: Option<f64>,
) -> Result<TestFunction1D> {
    check_p(p)?;
    match which {
        TrivialPair::TZero => TestFunction1D::new(Profile::TruncatedReciprocal),
        TrivialPair::SZero => {
            let (lo, hi) = (1.0 / p - 1.0, 1.0 / p);
            let a = a.unwrap_or((lo + hi) / 2.0);
            if !(lo < a && a < hi) {
                return Err(invalid(
                    "a",
                    format!("exponent {a} must lie strictly inside ({lo}, {hi})"),
                ));
            }
            TestFunction1D::power(a)
        }
    }
}

/// `g ≡ value`, the other witness for `s = 0`: every shift difference vanishes.
pub fn make_constant_counterexample(value: f64) -> Result<TestFunction1D> {
    if value == 0.0 {
        return Err(invalid("value", "the zero function is in every L^p"));
    }
    TestFunction1D::new(Profile::Constant { value })
}

/// Trichotomy for a degenerate pair. `t_zero` is checked against the sine
/// weight `sin(s x)`, `s_zero` against the shift by `t`.
pub fn verify_trivial_pair(
    f: &TestFunction1D,
    which: TrivialPair,
    p: f64,
    t: f64,
    s: f64,
    thresholds: &[f64],
) -> Result<VerificationReport> {
    check_p(p)?;
    let mass = f.mass_layers(p)?;
    let certs = certify_all(&mass, thresholds)?;
    let (t, s) = match which {
        TrivialPair::TZero => (0.0, s),
        TrivialPair::SZero => (t, 0.0),
    };
    let sine = f.sine_norm_pow(s, p)?;
    let shift = f.shift_norm_pow(t, p)?;

    let rows = table_len(&certs);
    let layers = rows_from(&cumulative_lower(&mass, rows), &[sine.upper], &[shift.upper]);
    let (kind, exponent) = match f.profile {
        Profile::PowerProfile { exponent } => (CounterexampleKind::SZero, Some(exponent)),
        Profile::Constant { .. } => (CounterexampleKind::SZero, None),
        _ => (CounterexampleKind::TZero, None),
    };
    Ok(VerificationReport {
        schema_version: SCHEMA_VERSION,
        kind,
        p,
        parameters: Parameters {
            exponent,
            t: Some(t),
            s: Some(s),
            ..Default::default()
        },
        mass: certs,
        sine: vec![NormReport::new(format!("sin({s} x) f"), sine, p)],
        shift: vec![NormReport::new(format!("f(x + {t}) - f(x)"), shift, p)],
        layers,
        notes: vec![format!("{:?}", f.profile)],
    })
}
