use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::numerics::enclosure::{down, up};
use crate::numerics::{sin_power_integral, Enclosure, PowerEnvelope, Provenance, SeriesSpec};

/// Closed-form profiles `g(u)`; a [`TestFunction1D`] evaluates `g(scale·x)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "profile", rename_all = "snake_case")]
pub enum Profile {
    /// Indicator of `[lo, hi]`.
    Box { lo: f64, hi: f64 },
    /// `(1 + |u|)^(−exponent)`.
    PowerProfile { exponent: f64 },
    /// `1/u` on `(0, 1)`, zero elsewhere.
    TruncatedReciprocal,
    Constant { value: f64 },
}

impl Profile {
    pub fn value(&self, u: f64) -> f64 {
        match *self {
            Profile::Box { lo, hi } => {
                if lo <= u && u <= hi {
                    1.0
                } else {
                    0.0
                }
            }
            Profile::PowerProfile { exponent } => (1.0 + u.abs()).powf(-exponent),
            Profile::TruncatedReciprocal => {
                if 0.0 < u && u < 1.0 {
                    1.0 / u
                } else {
                    0.0
                }
            }
            Profile::Constant { value } => value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TestFunction1D {
    pub profile: Profile,
    pub scale: f64,
}

// relative cell width of the geometric grids below
const CELL_REL: f64 = 1e-3;
const SHIFT_CELL_REL: f64 = 1e-3;
const GRID_CUTOFF: f64 = 1e8;
const SHIFT_CUTOFF: f64 = 1e6;
const SUM_REL: f64 = 1e-10;
const RECIPROCAL_CELLS: usize = 4096;

impl TestFunction1D {
    pub fn new(profile: Profile) -> Result<Self> {
        match profile {
            Profile::Box { lo, hi } if !(lo < hi) || !lo.is_finite() || !hi.is_finite() => {
                Err(invalid("box", "require finite lo < hi"))
            }
            Profile::PowerProfile { exponent } if !exponent.is_finite() => {
                Err(invalid("exponent", "must be finite"))
            }
            Profile::Constant { value } if !value.is_finite() => {
                Err(invalid("value", "must be finite"))
            }
            _ => Ok(Self {
                profile,
                scale: 1.0,
            }),
        }
    }

    pub fn boxed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(Profile::Box { lo, hi })
    }

    pub fn power(exponent: f64) -> Result<Self> {
        Self::new(Profile::PowerProfile { exponent })
    }

    pub fn value(&self, x: f64) -> f64 {
        self.profile.value(self.scale * x)
    }

    pub fn dilate(&self, a: f64) -> Result<Self> {
        if a == 0.0 || !a.is_finite() {
            return Err(invalid("a", "dilation factor must be finite and nonzero"));
        }
        Ok(Self {
            profile: self.profile,
            scale: self.scale * a,
        })
    }

    fn jac(&self) -> f64 {
        1.0 / self.scale.abs()
    }

    /// `∫|f|^p`.
    pub fn mass_pow(&self, p: f64) -> Result<Enclosure> {
        check_p(p)?;
        let base = match self.profile {
            Profile::Box { lo, hi } => Enclosure::around(hi - lo, f64::EPSILON, Provenance::ClosedForm),
            Profile::PowerProfile { exponent } => {
                let q = exponent * p;
                if q <= 1.0 {
                    return Err(Error::InfiniteNorm(format!(
                        "(1+|x|)^-{exponent} is not in L^{p}"
                    )));
                }
                Enclosure::around(2.0 / (q - 1.0), 4.0 * f64::EPSILON, Provenance::ClosedForm)
            }
            Profile::TruncatedReciprocal => {
                return Err(Error::InfiniteNorm(format!("1/x on (0,1) is not in L^{p}")))
            }
            Profile::Constant { value } => {
                if value != 0.0 {
                    return Err(Error::InfiniteNorm("nonzero constant".into()));
                }
                Enclosure::zero()
            }
        };
        Ok(base.scale(self.jac()))
    }

    /// `‖f‖_p`.
    pub fn lp_norm(&self, p: f64) -> Result<Enclosure> {
        Ok(self.mass_pow(p)?.powf_nonneg(1.0 / p))
    }

    /// `∫|sin(s x)·f(x)|^p dx`.
    pub fn sine_norm_pow(&self, s: f64, p: f64) -> Result<Enclosure> {
        check_p(p)?;
        if !s.is_finite() {
            return Err(invalid("s", "must be finite"));
        }
        let sigma = (s / self.scale).abs();
        if sigma == 0.0 {
            return Ok(Enclosure::zero());
        }
        let base = match self.profile {
            Profile::Box { lo, hi } => {
                let (a, b) = (sigma * lo, sigma * hi);
                let mut e = sin_power_integral(a, b, p)?;
                let slack = 4.0 * f64::EPSILON * (a.abs() + b.abs());
                e.lower = down(e.lower - slack).max(0.0);
                e.upper = up(e.upper + slack);
                e.scale(1.0 / sigma)
            }
            Profile::PowerProfile { exponent } => power_sine(exponent * p, sigma, p)?,
            Profile::TruncatedReciprocal => reciprocal_sine(sigma, p),
            Profile::Constant { value } => {
                if value != 0.0 {
                    return Err(Error::InfiniteNorm("sin(s x) times a nonzero constant".into()));
                }
                Enclosure::zero()
            }
        };
        Ok(base.scale(self.jac()))
    }

    pub fn sine_norm(&self, s: f64, p: f64) -> Result<Enclosure> {
        Ok(self.sine_norm_pow(s, p)?.powf_nonneg(1.0 / p))
    }

    /// `∫|f(x + t) − f(x)|^p dx`.
    pub fn shift_norm_pow(&self, t: f64, p: f64) -> Result<Enclosure> {
        check_p(p)?;
        if !t.is_finite() {
            return Err(invalid("t", "must be finite"));
        }
        let tau = (t * self.scale).abs();
        if tau == 0.0 {
            return Ok(Enclosure::zero());
        }
        let base = match self.profile {
            Profile::Box { lo, hi } => {
                Enclosure::around(2.0 * tau.min(hi - lo), 2.0 * f64::EPSILON, Provenance::ClosedForm)
            }
            Profile::PowerProfile { exponent } => power_shift(exponent, tau, p)?,
            Profile::TruncatedReciprocal => {
                return Err(Error::InfiniteNorm(
                    "shift difference of 1/x on (0,1) is not p-integrable".into(),
                ))
            }
            Profile::Constant { .. } => Enclosure::zero(),
        };
        Ok(base.scale(self.jac()))
    }

    pub fn shift_norm(&self, t: f64, p: f64) -> Result<Enclosure> {
        Ok(self.shift_norm_pow(t, p)?.powf_nonneg(1.0 / p))
    }

    /// Certified lower bounds on the p-mass of unit layers, for functions
    /// whose p-mass diverges.
    ///
    /// Power profiles and constants use the layers `{k ≤ |u| ≤ k+1}`; the
    /// truncated reciprocal uses `{1/(k+2) ≤ u ≤ 1/(k+1)}`.
    pub fn mass_layers(&self, p: f64) -> Result<SeriesSpec> {
        check_p(p)?;
        let jac = self.jac();
        match self.profile {
            Profile::PowerProfile { exponent } => {
                let q = exponent * p;
                if q > 1.0 {
                    return Err(Error::NotDivergent(format!(
                        "(1+|x|)^-{exponent} is in L^{p}"
                    )));
                }
                // min of (1+u)^-q over [k, k+1]
                let shift = if q >= 0.0 { 2.0 } else { 1.0 };
                Ok(SeriesSpec::new(
                    "power profile mass layers (lower bounds)",
                    0,
                    PowerEnvelope::exact(2.0 * jac, shift, -q, 0),
                    move |k| 2.0 * jac * (k as f64 + shift).powf(-q),
                ))
            }
            Profile::Constant { value } if value != 0.0 => {
                let c = 2.0 * jac * value.abs().powf(p);
                Ok(SeriesSpec::new(
                    "constant mass layers",
                    0,
                    PowerEnvelope::exact(c, 1.0, 0.0, 0),
                    move |_| c,
                ))
            }
            Profile::TruncatedReciprocal => {
                // (1/(k+1) − 1/(k+2))·(k+1)^p ≥ 1/(k+2)
                let env = PowerEnvelope {
                    lower_coeff: jac,
                    upper_coeff: f64::INFINITY,
                    shift: 2.0,
                    exponent: -1.0,
                    from: 0,
                };
                Ok(SeriesSpec::new(
                    "reciprocal mass layers (lower bounds)",
                    0,
                    env,
                    move |k| {
                        let k1 = k as f64 + 1.0;
                        jac * k1.powf(p - 1.0) / (k1 + 1.0)
                    },
                ))
            }
            _ => Err(Error::NotDivergent("function has finite p-mass".into())),
        }
    }
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(invalid("p", "require 1 <= p < inf"));
    }
    Ok(())
}

fn pad(lo: f64, hi: f64, prov: Provenance) -> Enclosure {
    Enclosure {
        lower: down(lo * (1.0 - SUM_REL)).max(0.0),
        upper: up(hi * (1.0 + SUM_REL)),
        provenance: prov,
    }
}

/// `∫_ℝ |sin(σu)|^p (1+|u|)^(−q) du` for `q > 1`.
///
/// Far from the origin the cells are unions of whole half-periods, on which
/// `∫|sin|^p` is known exactly and the weight is monotone; near the origin
/// half-periods are split and integrated by quadrature.
fn power_sine(q: f64, sigma: f64, p: f64) -> Result<Enclosure> {
    if q <= 1.0 {
        return Err(Error::InfiniteNorm(format!(
            "|sin|^p (1+|x|)^-{q} is not integrable"
        )));
    }
    let w = |x: f64| (1.0 + x).powf(-q);
    let period = sin_power_integral(0.0, PI, p)?;
    let hp = PI / sigma;
    let (mut lo, mut hi) = (0.0, 0.0);
    let mut j = 0.0f64;
    loop {
        let x = j * hp;
        if x >= GRID_CUTOFF {
            break;
        }
        let target = CELL_REL * (1.0 + x);
        if hp <= target {
            let m = (target / hp).floor();
            let y = (j + m) * hp;
            lo += w(y) * m * period.lower;
            hi += w(x) * m * period.upper;
            j += m;
        } else {
            let pieces = (hp / target).ceil() as usize;
            for i in 0..pieces {
                let a = i as f64 * PI / pieces as f64;
                let b = (i + 1) as f64 * PI / pieces as f64;
                let piece = sin_power_integral(a, b, p)?;
                lo += w(x + b / sigma) * piece.lower;
                hi += w(x + a / sigma) * piece.upper;
            }
            j += 1.0;
        }
    }
    let tail = (1.0 + j * hp).powf(1.0 - q) / (q - 1.0);
    Ok(pad(2.0 * lo / sigma, 2.0 * (hi / sigma + tail), Provenance::Quadrature))
}

/// `∫_0^1 |sin(σu)/u|^p du`.
fn reciprocal_sine(sigma: f64, p: f64) -> Enclosure {
    // sin(σu)/u = σ·sinc(σu) and sinc decreases on [0, π]
    let sinc = |v: f64| if v == 0.0 { 1.0 } else { v.sin() / v };
    let h = 1.0 / RECIPROCAL_CELLS as f64;
    let (mut lo, mut hi) = (0.0, 0.0);
    for i in 0..RECIPROCAL_CELLS {
        let a = i as f64 * h;
        let b = a + h;
        if sigma * b <= PI {
            lo += (sigma * sinc(sigma * b)).powf(p) * h;
            hi += (sigma * sinc(sigma * a)).powf(p) * h;
        } else {
            let cap = if a == 0.0 { sigma } else { sigma.min(1.0 / a) };
            hi += cap.powf(p) * h;
        }
    }
    let e = pad(lo, hi, Provenance::Quadrature);
    Enclosure {
        upper: e.upper.min(up(sigma.powf(p) * (1.0 + 4.0 * f64::EPSILON))),
        ..e
    }
}

/// `∫_ℝ |g(x+τ) − g(x)|^p dx` for `g = (1+|x|)^(−α)`, `τ > 0`.
///
/// `g(x)` and `g(x+τ)` are monotone on each of `(−∞, −τ]`, `[−τ, 0]`,
/// `[0, ∞)`, so cell extremes sit at cell endpoints. Outside `[−X−τ, X]` the
/// mean value theorem gives `|Δ| ≤ τ|α|(1+|y|)^(−α−1)` with `y` the nearer
/// of `x, x+τ` to the origin.
fn power_shift(alpha: f64, tau: f64, p: f64) -> Result<Enclosure> {
    let g = |x: f64| (1.0 + x.abs()).powf(-alpha);
    let d_range = |a: f64, b: f64| {
        let (g1, g2) = (g(a + tau), g(b + tau));
        let (h1, h2) = (g(a), g(b));
        let lo = g1.min(g2) - h1.max(h2);
        let hi = g1.max(g2) - h1.min(h2);
        let top = lo.abs().max(hi.abs()).powf(p);
        let bottom = if lo <= 0.0 && 0.0 <= hi {
            0.0
        } else {
            lo.abs().min(hi.abs()).powf(p)
        };
        (bottom, top)
    };
    let (mut lo, mut hi) = (0.0, 0.0);
    let mut cover = |start: f64, end: f64, dist: &dyn Fn(f64) -> f64| {
        let mut a = start;
        while a < end {
            let b = (a + SHIFT_CELL_REL * (1.0 + dist(a))).min(end);
            let (m, mx) = d_range(a, b);
            lo += m * (b - a);
            hi += mx * (b - a);
            a = b;
        }
    };
    cover(0.0, SHIFT_CUTOFF, &|x: f64| x);
    cover(-tau, 0.0, &|x: f64| x.abs().min(x + tau));
    // mirror: x ≤ −τ corresponds to y = −x − τ ≥ 0
    cover(-SHIFT_CUTOFF - tau, -tau, &|x: f64| (-x - tau).max(0.0));
    let e = (alpha + 1.0) * p;
    if e <= 1.0 {
        return Err(Error::InfiniteNorm("shift tail is not integrable".into()));
    }
    let tail = 2.0 * (tau * alpha.abs()).powf(p) * (1.0 + SHIFT_CUTOFF).powf(1.0 - e) / (e - 1.0);
    Ok(pad(lo, hi + tail, Provenance::Quadrature))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::sin_power_integral_fast;

    fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn box_norms() {
        let f = TestFunction1D::boxed(0.0, 1.0).unwrap();
        assert!(f.mass_pow(2.0).unwrap().contains(1.0));
        let sine = f.sine_norm(1.0, 2.0).unwrap();
        // ∫_0^1 sin² = 1/2 − sin(2)/4
        let oracle = (0.5 - 2f64.sin() / 4.0).sqrt();
        assert!(sine.contains(oracle), "{sine:?} vs {oracle}");
        assert!((oracle - 0.52218).abs() < 1e-5);
        let shift = f.shift_norm(PI / 2.0, 2.0).unwrap();
        assert!(shift.contains(2f64.sqrt()));
        assert!(f.shift_norm_pow(0.3, 3.0).unwrap().contains(0.6));
    }

    #[test]
    fn dilation_scales_mass() {
        let f = TestFunction1D::boxed(0.0, 1.0).unwrap();
        for a in [1.0, -1.0, 2.0, -2.0, 1.0 / 3.0] {
            let g = f.dilate(a).unwrap();
            let m = g.mass_pow(2.0).unwrap();
            assert!(m.contains(1.0 / a.abs()), "a = {a}");
        }
        let g = f.dilate(2.0).unwrap();
        assert_eq!(g.value(0.49), 1.0);
        assert_eq!(g.value(0.51), 0.0);
        assert_eq!(f.dilate(1.0).unwrap(), f);
        assert!(f.dilate(0.0).is_err());
    }

    #[test]
    fn power_profile_sine_contains_oracle() {
        let f = TestFunction1D::power(2.0).unwrap();
        for (s, p) in [(1.0, 2.0), (0.3, 1.0), (3.7, 4.0)] {
            let e = f.sine_norm_pow(s, p).unwrap();
            let oracle = 2.0
                * simpson(
                    |x| (s * x).sin().abs().powf(p) * (1.0 + x).powf(-2.0 * p),
                    0.0,
                    2000.0,
                    4_000_000,
                );
            let q = 2.0 * p;
            let truncated = 2.0 * 2001f64.powf(1.0 - q) / (q - 1.0);
            assert!(e.lower <= oracle + truncated && oracle <= e.upper, "{s} {p}: {e:?} vs {oracle}");
            assert!(e.width() < 0.05 * e.upper, "{e:?}");
        }
    }

    #[test]
    fn power_profile_shift_contains_oracle() {
        let f = TestFunction1D::power(2.0).unwrap();
        for (t, p) in [(1.0, 2.0), (0.5, 1.0), (-2.0, 4.0)] {
            let e = f.shift_norm_pow(t, p).unwrap();
            let g = |x: f64| (1.0 + x.abs()).powf(-2.0);
            let h = |x: f64| (g(x + t) - g(x)).abs().powf(p);
            let oracle: f64 = [(-2000.0, -t.abs() - 1.0), (-t.abs() - 1.0, t.abs() + 1.0), (t.abs() + 1.0, 2000.0)]
                .iter()
                .map(|&(a, b)| {
                    // split at the kinks
                    let mut cuts = vec![a, b];
                    for k in [0.0, -t] {
                        if a < k && k < b {
                            cuts.push(k);
                        }
                    }
                    cuts.sort_by(f64::total_cmp);
                    cuts.windows(2).map(|w| simpson(h, w[0], w[1], 200_000)).sum::<f64>()
                })
                .sum();
            assert!(e.lower <= oracle && oracle <= e.upper * (1.0 + 1e-9), "{t} {p}: {e:?} vs {oracle}");
            assert!(e.width() < 0.05 * e.upper);
        }
    }

    #[test]
    fn reciprocal_sine_is_bounded_by_frequency() {
        let f = TestFunction1D::new(Profile::TruncatedReciprocal).unwrap();
        for s in [0.5, 2.0, 10.0] {
            let e = f.sine_norm_pow(s, 1.0).unwrap();
            let oracle = simpson(|u| if u == 0.0 { s } else { (s * u).sin().abs() / u }, 0.0, 1.0, 200_000);
            assert!(e.contains(oracle) || (e.lower <= oracle && oracle <= e.upper + 1e-9));
            assert!(e.upper <= s * (1.0 + 1e-12));
        }
        assert!(f.mass_pow(1.0).is_err());
        assert!(f.shift_norm_pow(1.0, 1.0).is_err());
    }

    #[test]
    fn mass_layers_diverge_only_when_needed() {
        assert!(TestFunction1D::power(2.0).unwrap().mass_layers(1.0).is_err());
        let g = TestFunction1D::power(0.25).unwrap();
        let spec = g.mass_layers(2.0).unwrap();
        // lower bounds 2(k+2)^-0.5 never exceed ∫_k^{k+1} 2(1+u)^-0.5
        for k in 0..50 {
            let exact = 4.0 * ((k as f64 + 2.0).sqrt() - (k as f64 + 1.0).sqrt());
            assert!(spec.term(k) <= exact);
        }
        let r = TestFunction1D::new(Profile::TruncatedReciprocal).unwrap();
        let spec = r.mass_layers(1.0).unwrap();
        for k in 0..50 {
            let exact = ((k as f64 + 2.0) / (k as f64 + 1.0)).ln();
            assert!(spec.term(k) <= exact);
        }
    }

    #[test]
    fn box_sine_agrees_with_fast_mode() {
        let f = TestFunction1D::boxed(-1.0, 2.0).unwrap();
        let e = f.sine_norm_pow(2.0, 4.0).unwrap();
        let fast = sin_power_integral_fast(-2.0, 4.0, 4.0).unwrap() / 2.0;
        assert!(e.contains(fast));
    }
}
