//! Shot-noise sampling, characteristic functions, Monte Carlo reductions and seeds.

use euler_primitive::moments::{empirical_moment, jackknife_stderr, support_prob_integral, ShotWindow};
use euler_primitive::seed::{complex_estimate, derive_seed, order_free_sum};
use euler_primitive::shotnoise::{
    empirical_cf, gaussian_log_cf_1d, mc_gamma_at_origin, sample_germs, CfQuadrature, CharacteristicFunction,
    GermSample, KernelModel, ShotField,
};
use euler_primitive::{Jet2, Point, ScalarField, TestFunction};
use num_complex::Complex64;
use proptest::prelude::*;
use std::collections::HashSet;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Binned evaluation against the sum over every germ, for a two-kernel mixture.
    #[test]
    fn shot_field_is_the_sum_over_germs(seed in any::<u64>(), x in -9.0f64..9.0, y in -9.0f64..9.0) {
        let model = KernelModel::named("mixed").unwrap();
        let s = sample_germs(6.0, 1.5, &model, seed).unwrap();
        let f = ShotField::new(&s, &model);
        let p = Point::new(x, y);
        let brute = s.germs.iter().fold(Jet2::default(), |acc, g| {
            let k = &model.components[g.kernel].1;
            let d = p - g.position;
            if d.norm_sq() < k.truncation_radius * k.truncation_radius {
                acc.add(&k.jet(d).scaled(g.amplitude))
            } else {
                acc
            }
        });
        let j = f.jet(p);
        prop_assert!((j.value - brute.value).abs() < 1e-12);
        prop_assert!((j.grad[0] - brute.grad[0]).abs() < 1e-12 && (j.grad[1] - brute.grad[1]).abs() < 1e-12);
        prop_assert!((j.hess.xx - brute.hess.xx).abs() < 1e-12 && (j.hess.xy - brute.hess.xy).abs() < 1e-12);
    }

    #[test]
    fn germ_text_round_trip(seed in any::<u64>(), r in 0.5f64..6.0, lambda in 0.1f64..3.0) {
        let s = sample_germs(r, lambda, &KernelModel::named("mixed").unwrap(), seed).unwrap();
        prop_assert_eq!(GermSample::from_text(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn order_free_sum_ignores_order(mut v in prop::collection::vec(-1e6f64..1e6, 1..200), k in any::<usize>()) {
        let a = order_free_sum(&v);
        let n = v.len();
        v.rotate_left(k % n);
        v.reverse();
        prop_assert_eq!(a.to_bits(), order_free_sum(&v).to_bits());
    }
}

#[test]
fn characteristic_function_bounds_and_conjugation() {
    let model = KernelModel::named("mixed").unwrap();
    let cf = CharacteristicFunction::new(&model, 1.3, &CfQuadrature::default()).unwrap();
    for i in [1, 2] {
        assert!((cf.psi(i, 0.0, [0.0, 0.0], 0.0).unwrap() - 1.0).norm() < 1e-15);
        for (t, s, v) in [(0.7, [0.3, -1.1], 0.4), (-2.0, [1.5, 0.2], -0.3), (4.0, [0.0, 0.0], 2.0)] {
            let p = cf.psi(i, t, s, v).unwrap();
            let m = cf.psi(i, -t, [-s[0], -s[1]], -v).unwrap();
            assert!(p.norm() <= 1.0 + 1e-12);
            assert!((p - m.conj()).norm() < 1e-12);
        }
    }
    assert!(cf.psi(3, 1.0, [0.0, 0.0], 0.0).is_err());
}

#[test]
fn empirical_cf_matches_closed_form() {
    let model = KernelModel::gaussian();
    let r = 5.0 * model.max_truncation_radius();
    for t in [0.5, 1.0, 2.0] {
        let mc = empirical_cf(&model, r, 1.0, t, 4000, derive_seed(11, t.to_bits())).unwrap();
        let exact = gaussian_log_cf_1d(t, &model, 1.0).exp();
        assert!((mc.mean - exact).norm() < 4.0 * mc.stderr.max(1e-3), "t={t}: {} vs {exact}", mc.mean);
    }
}

#[test]
fn monte_carlo_is_reproducible_and_seed_sensitive() {
    let model = KernelModel::gaussian();
    let r = 5.0 * model.max_truncation_radius();
    let a = mc_gamma_at_origin(1.0, &model, r, 1.0, 300, 5).unwrap();
    let b = mc_gamma_at_origin(1.0, &model, r, 1.0, 300, 5).unwrap();
    let c = mc_gamma_at_origin(1.0, &model, r, 1.0, 300, 6).unwrap();
    assert_eq!(a, b);
    assert_ne!(a.mean, c.mean);
}

#[test]
fn complex_estimate_of_constant_has_zero_error() {
    let v = vec![Complex64::new(0.25, -1.0); 17];
    let e = complex_estimate(&v);
    assert_eq!(e.mean, v[0]);
    assert_eq!(e.stderr, 0.0);
}

#[test]
fn jackknife_error_shrinks_like_root_n() {
    let v: Vec<Complex64> = (0..4000u64)
        .map(|k| {
            let u = (derive_seed(3, k) >> 11) as f64 / (1u64 << 53) as f64;
            Complex64::new(u, 0.5 * u)
        })
        .collect();
    let small = jackknife_stderr(&v[..1000], 2.0).unwrap();
    let large = jackknife_stderr(&v, 2.0).unwrap();
    let ratio = small / large;
    assert!((ratio - 2.0).abs() < 0.2, "{ratio}");
    let m = empirical_moment(&v, 2.0).unwrap();
    // |v|^2 = 1.25 u^2 with u uniform, so the mean is 1.25 / 3
    assert!((m - 1.25 / 3.0).abs() < 4.0 * large);
}

#[test]
fn support_probability_integral_is_stable_across_seeds() {
    let model = KernelModel::gaussian();
    let h = TestFunction::bump(0.2, 0.8).unwrap();
    let w = ShotWindow { resolution: 64, ..ShotWindow::default() };
    let a = support_prob_integral(&model, &h, 2.0, &w, 200, 1).unwrap();
    let b = support_prob_integral(&model, &h, 2.0, &w, 200, 2).unwrap();
    assert!(a > 0.0 && (a - b).abs() / a < 0.05, "{a} {b}");
}

#[test]
fn derived_seeds_do_not_collide() {
    let one: HashSet<u64> = (0..1_000_000).map(|i| derive_seed(42, i)).collect();
    assert_eq!(one.len(), 1_000_000);
    let masters: HashSet<u64> = (0..100).map(|m| derive_seed(m, 0)).collect();
    assert_eq!(masters.len(), 100);
}
