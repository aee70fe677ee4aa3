use std::f64::consts::PI;

use lpcrit::counterexamples::{make_lattice_nd, shift_closure, verify_lattice_nd, verify_multi_sine_closure};
use lpcrit::criterion::{certify_bound_fn, check_quantization, CriterionOptions, Verdict};
use lpcrit::function_model::{IntervalFamily1D, TestFunction1D};
use lpcrit::lattice::{binomial, count_layer_full, count_layer_nonneg, l1, simplex_moment, simplex_volume, LatticeLayer, Orthant};
use lpcrit::numerics::{certify_divergence, sum_with_tail, PowerEnvelope};
use lpcrit::symbolic::Rational;
use lpcrit::trig::decompose;
use lpcrit::{Enclosure, Provenance, SeriesSpec, SymReal};
use proptest::prelude::*;

fn enclosure() -> impl Strategy<Value = (f64, f64)> {
    (0.0..100.0f64, 0.0..10.0f64).prop_map(|(lo, w)| (lo, lo + w))
}

proptest! {
    #[test]
    fn enclosure_arithmetic_contains_point_values(
        (al, ah) in enclosure(),
        (bl, bh) in enclosure(),
        ta in 0.0..=1.0f64,
        tb in 0.0..=1.0f64,
        e in 0.1..4.0f64,
    ) {
        let a = Enclosure::new(al, ah, Provenance::ClosedForm).unwrap();
        let b = Enclosure::new(bl, bh, Provenance::ClosedForm).unwrap();
        let x = al + ta * (ah - al);
        let y = bl + tb * (bh - bl);
        prop_assert!(a.add(&b).contains(x + y));
        prop_assert!(a.mul_nonneg(&b).contains(x * y));
        prop_assert!(a.scale(3.0).contains(3.0 * x));
        prop_assert!(a.powf_nonneg(e).contains(x.powf(e)));
    }

    #[test]
    fn quantization_splits_the_product(t in -20.0..20.0f64, s in -5.0..5.0f64) {
        let q = check_quantization(t, s, 1e-12);
        let ts = t * s;
        prop_assert!((0.0..PI).contains(&q.tau));
        prop_assert!((ts - (q.m as f64 * PI + q.tau)).abs() <= 1e-12 * (1.0 + ts.abs()));
        prop_assert!((q.distance - q.tau.min(PI - q.tau)).abs() <= 1e-15);
        prop_assert_eq!(q.verdict == Verdict::Violated, q.distance < q.eps);
    }

    #[test]
    fn pi_shift_cancels_on_the_common_part(k in -200i64..200, u in 0.001..0.999f64) {
        let f = IntervalFamily1D::one_d_pi();
        let common = f.length(k).min(f.length(k + 1));
        let longer = f.length(k).max(f.length(k + 1));
        let x = k as f64 * PI + u * common;
        prop_assert_eq!(f.value(x + PI) - f.value(x), 0.0);
        if longer > common {
            let y = k as f64 * PI + common + u * (longer - common);
            prop_assert_eq!((f.value(y + PI) - f.value(y)).abs(), 1.0);
        }
    }

    #[test]
    fn layer_counts_match_enumeration(n in 1usize..=4, k in 0u64..=8) {
        let nonneg = count_layer_nonneg(n, k).unwrap();
        prop_assert_eq!(nonneg, binomial(k + n as u64 - 1, n as u64 - 1).unwrap());
        let pts = LatticeLayer::new(n, k, Orthant::Full).unwrap().points();
        prop_assert_eq!(pts.len() as u128, count_layer_full(n, k).unwrap());
        prop_assert!(pts.iter().all(|p| l1(p) == k));
        let pos = LatticeLayer::new(n, k, Orthant::Nonneg).unwrap().points();
        prop_assert_eq!(pos.len() as u128, nonneg);
    }

    #[test]
    fn trig_identity_holds_pointwise(
        b in prop::collection::vec(-4i64..=4, 1..=5),
        seed in prop::collection::vec(-10.0..10.0f64, 5),
    ) {
        let x = &seed[..b.len()];
        let d = decompose(&b).unwrap();
        let dot: f64 = b.iter().zip(x).map(|(bj, xj)| *bj as f64 * xj).sum();
        let l1: i64 = b.iter().map(|v| v.abs()).sum();
        prop_assert!((dot.sin() - d.evaluate(x)).abs() <= 1e-9);
        for (q, sup) in d.q.iter().zip(d.sup_bounds()) {
            prop_assert!(q.evaluate(x).abs() <= sup + 1e-9);
            prop_assert!(sup <= l1 as f64);
        }
    }

    #[test]
    fn zeta_tail_enclosure_contains_closed_form(cutoff in 10u64..5000) {
        // Σ_{k≥1} k^{-2} = π²/6
        let spec = SeriesSpec::new("basel", 1, PowerEnvelope::exact(1.0, 0.0, -2.0, 1), |k| 1.0 / (k as f64 * k as f64));
        let e = sum_with_tail(&spec, cutoff).unwrap();
        prop_assert!(e.contains(PI * PI / 6.0));
        prop_assert!(e.width() <= 2.0 / cutoff as f64);
    }

    #[test]
    fn divergence_witness_is_least(m in 0.3..4.0f64) {
        let spec = IntervalFamily1D::one_d_pi().mass_series().unwrap();
        let c = certify_divergence(&spec, m).unwrap();
        let k = c.witness_u64().unwrap();
        let mut s = 0.25;
        let mut oracle = 0;
        while s < m {
            oracle += 1;
            s += 2.0 / (5.0 * oracle as f64);
        }
        prop_assert_eq!(k, oracle);
        prop_assert!(c.lower_bound >= m);
    }

    #[test]
    fn simplex_formulas_scale(n in 1usize..=6, a in 0.1..3.0f64, p in 0.5..4.0f64) {
        let fact: f64 = (1..=n).map(|i| i as f64).product();
        let vol = simplex_volume(n, a).unwrap();
        prop_assert!((vol - a.powi(n as i32) / fact).abs() <= 1e-12 * vol);
        let m1 = simplex_moment(n, 1.0, p).unwrap();
        let ma = simplex_moment(n, a, p).unwrap();
        prop_assert!((ma - a.powf(n as f64 + p) * m1).abs() <= 1e-10 * ma);
    }

    #[test]
    fn symbolic_display_round_trips(num in -50i64..50, den in 1i64..20, pi in any::<bool>()) {
        prop_assume!(num != 0);
        let q = Rational::new(num, den);
        let v = if pi { SymReal::pi_multiple(q) } else { SymReal::rational(q) };
        let back: SymReal = v.to_string().parse().unwrap();
        prop_assert_eq!(back, v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn bound_dominates_box_norm(
        lo in -5.0..5.0f64,
        w in 0.1..5.0f64,
        t in 0.2..3.0f64,
        s in 0.2..3.0f64,
        p in 1.0..4.0f64,
    ) {
        let ts = t * s;
        prop_assume!((ts - PI * (ts / PI).round()).abs() >= 0.05);
        let f = TestFunction1D::boxed(lo, lo + w).unwrap();
        let c = certify_bound_fn(&f, t, s, p, &CriterionOptions::default()).unwrap();
        prop_assert!(c.bound >= w.powf(1.0 / p));
        prop_assert!(c.refined_bound <= c.bound);
    }

    #[test]
    fn closures_are_finite(
        b in prop::collection::vec(-2i64..=2, 2),
        v in prop::collection::vec(-2i64..=2, 2),
    ) {
        let f = make_lattice_nd(2, 0.8, 1.0).unwrap();
        let bf: Vec<f64> = b.iter().map(|&x| x as f64).collect();
        prop_assert!(verify_multi_sine_closure(&f, &bf, 1.0).unwrap().is_finite());
        prop_assert!(shift_closure(&f, &v, 1.0).unwrap().is_finite());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(4))]

    #[test]
    fn lattice_family_is_a_counterexample(gamma in 0.7..0.95f64) {
        let r = verify_lattice_nd(2, gamma, 1.0, &[2.0]).unwrap();
        prop_assert!(r.trichotomy());
    }
}
