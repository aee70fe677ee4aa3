//! Integrals of `|sin t|^p`.
//!
//! The rigorous route folds the range onto `[0, π]` using `|sin(t + jπ)| = |sin t|`,
//! splits `[0, π]` at the points where `sin^p` changes convexity or monotonicity,
//! and brackets each convex (concave) segment between the composite midpoint and
//! trapezoid sums. The upper bound is also capped by `∫ min(1, dist(t, πZ))^p`,
//! which is the elementary estimate `sin t ≤ t`.

use std::f64::consts::PI;

use super::enclosure::{down, up, Enclosure, Provenance};
use crate::error::{invalid, Result};

/// Controls the subdivision of the rigorous quadrature.
///
/// Raising `level` by one doubles every segment's cell count, which nests the
/// midpoint/trapezoid brackets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct QuadOptions {
    pub level: u32,
}

const BASE_DENSITY: f64 = 1024.0;
const MIN_CELLS: usize = 16;
// sin and powf are each within a couple of ulps on the ranges used here
const EVAL_REL: f64 = 16.0 * f64::EPSILON;

/// Certified enclosure of `∫_lo^hi |sin t|^p dt`.
pub fn sin_power_integral(lo: f64, hi: f64, p: f64) -> Result<Enclosure> {
    sin_power_integral_with(lo, hi, p, QuadOptions::default())
}

pub fn sin_power_integral_with(lo: f64, hi: f64, p: f64, opts: QuadOptions) -> Result<Enclosure> {
    validate(lo, hi, p)?;
    if lo == hi {
        return Ok(Enclosure::exact(0.0, Provenance::ClosedForm));
    }
    let k0 = (lo / PI).floor();
    let k1 = (hi / PI).floor();
    let u0 = (lo - k0 * PI).clamp(0.0, PI);
    let u1 = (hi - k1 * PI).clamp(0.0, PI);

    let mut total = if k0 == k1 {
        piece(u0, u1, p, opts)
    } else {
        let head = piece(u0, PI, p, opts);
        let tail = piece(0.0, u1, p, opts);
        let full = k1 - k0 - 1.0;
        let mut acc = head.add(&tail);
        if full > 0.0 {
            acc = acc.add(&piece(0.0, PI, p, opts).scale(full));
        }
        acc
    };

    // folding error: abscissae move by a few ulps of the inputs and of k*PI
    let slack = 8.0 * f64::EPSILON * (lo.abs() + hi.abs() + PI) * if k0 == k1 { 1.0 } else { 2.0 };
    total.lower = down(total.lower - slack).max(0.0);
    total.upper = up(total.upper + slack).min(up(hi - lo));
    total.provenance = Provenance::Quadrature;
    Ok(total)
}

/// Non-certified estimate by adaptive Simpson; useful as a cross-check.
pub fn sin_power_integral_fast(lo: f64, hi: f64, p: f64) -> Result<f64> {
    validate(lo, hi, p)?;
    let f = |t: f64| t.sin().abs().powf(p);
    // break at multiples of pi so each panel is smooth
    let mut cuts = vec![lo];
    let mut k = (lo / PI).floor() + 1.0;
    while k * PI < hi {
        cuts.push(k * PI);
        k += 1.0;
    }
    cuts.push(hi);
    Ok(cuts
        .windows(2)
        .map(|w| adaptive_simpson(&f, w[0], w[1], 1e-13, 40))
        .sum())
}

/// `∫_u^v min(1, t, π − t)^p dt` for `0 ≤ u ≤ v ≤ π`.
pub fn distance_cap(u: f64, v: f64, p: f64) -> f64 {
    let q = p + 1.0;
    let rise = |a: f64, b: f64| (b.powf(q) - a.powf(q)) / q;
    let mut total = 0.0;
    // [0, 1]: t^p
    let (a, b) = (u.max(0.0), v.min(1.0));
    if a < b {
        total += rise(a, b);
    }
    // [1, π − 1]: 1
    let (a, b) = (u.max(1.0), v.min(PI - 1.0));
    if a < b {
        total += b - a;
    }
    // [π − 1, π]: (π − t)^p
    let (a, b) = (u.max(PI - 1.0), v.min(PI));
    if a < b {
        total += rise(PI - b, PI - a);
    }
    total
}

fn validate(lo: f64, hi: f64, p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", format!("require 1 <= p < inf, got {p}")));
    }
    if !lo.is_finite() || !hi.is_finite() {
        return Err(invalid("interval", "endpoints must be finite"));
    }
    if lo > hi {
        return Err(invalid("interval", format!("reversed interval [{lo}, {hi}]")));
    }
    Ok(())
}

/// Enclosure of `∫_u^v sin^p` with `0 ≤ u ≤ v ≤ π`.
fn piece(u: f64, v: f64, p: f64, opts: QuadOptions) -> Enclosure {
    if u >= v {
        return Enclosure::exact(0.0, Provenance::Quadrature);
    }
    let inflect = (p - 1.0).sqrt().atan();
    // (segment end, convex?) over [0, π]
    let segments = [
        (0.0, inflect, true),
        (inflect, PI - inflect, false),
        (PI - inflect, PI, true),
    ];
    let mut lower = 0.0;
    let mut upper = 0.0;
    for &(a, b, convex) in &segments {
        let (a, b) = (a.max(u), b.min(v));
        if a >= b {
            continue;
        }
        let (mid, trap) = composite(a, b, p, opts);
        let (lo, hi) = if convex { (mid, trap) } else { (trap, mid) };
        lower += lo;
        upper += hi;
    }
    let lower = down(lower * (1.0 - EVAL_REL)).max(0.0);
    let upper = up(upper * (1.0 + EVAL_REL));
    let cap = up(distance_cap(u, v, p) * (1.0 + EVAL_REL));
    Enclosure {
        lower: lower.min(cap),
        upper: upper.min(cap),
        provenance: Provenance::Quadrature,
    }
}

fn composite(a: f64, b: f64, p: f64, opts: QuadOptions) -> (f64, f64) {
    let base = ((b - a) * BASE_DENSITY).ceil().max(MIN_CELLS as f64) as usize;
    let n = base << opts.level;
    let h = (b - a) / n as f64;
    let f = |t: f64| t.sin().max(0.0).powf(p);
    let mut mid = 0.0;
    let mut trap = 0.5 * (f(a) + f(b));
    for i in 0..n {
        let x0 = a + i as f64 * h;
        mid += f(x0 + 0.5 * h);
        if i > 0 {
            trap += f(x0);
        }
    }
    (mid * h, trap * h)
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64, depth: u32) -> f64 {
    fn simpson<F: Fn(f64) -> f64>(f: &F, a: f64, fa: f64, b: f64, fb: f64) -> (f64, f64, f64) {
        let m = 0.5 * (a + b);
        let fm = f(m);
        (m, fm, (b - a) / 6.0 * (fa + 4.0 * fm + fb))
    }
    #[allow(clippy::too_many_arguments)]
    fn rec<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        fa: f64,
        b: f64,
        fb: f64,
        whole: f64,
        m: f64,
        fm: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let (lm, flm, left) = simpson(f, a, fa, m, fm);
        let (rm, frm, right) = simpson(f, m, fm, b, fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        rec(f, a, fa, m, fm, left, lm, flm, tol / 2.0, depth - 1)
            + rec(f, m, fm, b, fb, right, rm, frm, tol / 2.0, depth - 1)
    }
    let (fa, fb) = (f(a), f(b));
    let (m, fm, whole) = simpson(f, a, fa, b, fb);
    rec(f, a, fa, b, fb, whole, m, fm, tol, depth)
}
