use std::f64::consts::PI;

use proptest::prelude::*;
use sincd::estimators::{
    coin_estimate, identity_estimate, interpolation_estimate, mle, rbe, InterpolationFn, MleConfig,
};
use sincd::sinc::{sincd_pi, verify_identities};
use sincd::uncertainty::d_n;
use sincd::{FejerModel, Frequencies};

/// `(n, t)` with `t` at least `margin` away from any integer.
fn model_params(max_n: u32, margin: f64) -> impl Strategy<Value = (u32, f64)> {
    model_params_from(1, max_n, margin)
}

fn model_params_from(min_n: u32, max_n: u32, margin: f64) -> impl Strategy<Value = (u32, f64)> {
    (min_n..=max_n).prop_flat_map(move |n| {
        let dim = 1u64 << n;
        (Just(n), 0..dim, margin..(1.0 - margin)).prop_map(|(n, m, d)| (n, m as f64 + d))
    })
}

fn exact(n: u32, t: f64) -> Frequencies {
    Frequencies::exact(&FejerModel::new(n, t).unwrap().pmf(), 1e6).unwrap()
}

proptest! {
    #[test]
    fn product_form_matches_sine_ratio((n, t) in model_params(10, 1e-3)) {
        let model = FejerModel::new(n, t).unwrap();
        let dim = model.dim() as f64;
        for (k, c) in model.amplitude_coeffs().iter().enumerate() {
            let x = t - k as f64;
            let ratio = (x * PI).sin() / (dim * (x * PI / dim).sin());
            prop_assert!((c - ratio).abs() < 1e-10, "k={} c={} ratio={}", k, c, ratio);
            prop_assert!((c - sincd_pi(n, x)).abs() == 0.0);
        }
    }

    #[test]
    fn pmf_is_normalised_and_matches_amplitudes((n, t) in model_params(10, 1e-6)) {
        let model = FejerModel::new(n, t).unwrap();
        let pmf = model.pmf();
        prop_assert!((pmf.total() - 1.0).abs() < 1e-12);
        let state = model.state_vector();
        prop_assert!((state.norm_squared() - 1.0).abs() < 1e-12);
        for (a, p) in state.amplitudes.iter().zip(&pmf.probs) {
            prop_assert!((a.norm_sqr() - p).abs() < 1e-13);
        }
    }

    #[test]
    fn identities_hold((n, t) in model_params(8, 1e-4)) {
        // Near an integer the tangent terms reach ~1/(π·margin), so compare on their scale.
        let report = verify_identities(&FejerModel::new(n, t).unwrap()).unwrap();
        for e in &report.entries {
            let scale = e.left.abs().max(e.right.abs()).max(1.0);
            prop_assert!(e.residual < 1e-9 * scale, "{} residual {}", e.name, e.residual);
        }
    }

    #[test]
    fn d_n_complement(n in 1u32..=10, log_r in -8.0f64..8.0) {
        let dim = 1usize << n;
        let r = 10f64.powf(log_r);
        let sum = d_n(dim, r).unwrap() + d_n(dim, 1.0 / r).unwrap();
        prop_assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn d_n_is_decreasing(n in 1u32..=10, log_r in -6.0f64..6.0) {
        let dim = 1usize << n;
        let r = 10f64.powf(log_r);
        prop_assert!(d_n(dim, r * 1.01).unwrap() < d_n(dim, r).unwrap());
    }

    #[test]
    fn rbe_and_identity_exact((n, t) in model_params_from(2, 8, 0.02)) {
        let q = exact(n, t);
        prop_assert!((rbe(&q).unwrap().t_hat - t).abs() < 1e-9);
        prop_assert!((identity_estimate(&q).unwrap().t_hat - t).abs() < 1e-8);
        prop_assert!((interpolation_estimate(&q, &InterpolationFn::default()).unwrap().t_hat - t).abs() < 1e-6);
    }

    #[test]
    fn label_invariance(
        (n, m, shift) in (2u32..=6).prop_flat_map(|n| {
            let dim = 1u64 << n;
            (Just(n), 0..dim - 1).prop_flat_map(move |(n, m)| (Just(n), Just(m), 1..dim - m))
        }),
        d in 0.03f64..0.97,
    ) {
        let (t, u) = (m as f64 + d, (m + shift) as f64 + d);
        let (a, b) = (exact(n, t), exact(n, u));
        let s = shift as f64;
        prop_assert!((rbe(&b).unwrap().t_hat - rbe(&a).unwrap().t_hat - s).abs() < 1e-9);
        prop_assert!((coin_estimate(&b).unwrap().t_hat - coin_estimate(&a).unwrap().t_hat - s).abs() < 1e-9);
        prop_assert!((identity_estimate(&b).unwrap().t_hat - identity_estimate(&a).unwrap().t_hat - s).abs() < 1e-8);
        let config = MleConfig::default();
        prop_assert!((mle(&b, &config).unwrap().t_hat - mle(&a, &config).unwrap().t_hat - s).abs() < 1e-6);
    }

    #[test]
    fn coin_error_bounded((n, t) in model_params_from(3, 6, 1e-3)) {
        let q = exact(n, t);
        prop_assert!((coin_estimate(&q).unwrap().t_hat - t).abs() <= 0.01);
    }
}

#[test]
fn floor_and_ceiling_forms_agree() {
    // t̂ = k + D(q_k/q_{k+1}) = (k+1) - D(q_{k+1}/q_k)
    for n in 2..=8u32 {
        let dim = 1usize << n;
        for j in 1..20 {
            let t = 1.0 + j as f64 * 0.05;
            let p = FejerModel::new(n, t).unwrap().pmf().probs;
            let floor_form = 1.0 + d_n(dim, p[1] / p[2]).unwrap();
            let ceil_form = 2.0 - d_n(dim, p[2] / p[1]).unwrap();
            assert!((floor_form - ceil_form).abs() < 1e-10);
        }
    }
}

#[test]
fn two_qubit_values_are_not_identifiable() {
    // For N = 2 the distribution of t equals that of 2 - t.
    for j in 1..20 {
        let t = j as f64 * 0.05;
        let a = FejerModel::new(1, t).unwrap().pmf().probs;
        let b = FejerModel::new(1, 2.0 - t).unwrap().pmf().probs;
        assert!((a[0] - b[0]).abs() < 1e-14 && (a[1] - b[1]).abs() < 1e-14);
    }
}
