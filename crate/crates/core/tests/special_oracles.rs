use sincd::uncertainty::special::{ln_gamma, normal_cdf, regularized_beta};
use sincd::uncertainty::{beta_credible, beta_quantile, normal_quantile};
use statrs::distribution::{Beta, ContinuousCDF, Normal};
use statrs::function::gamma;

#[test]
fn normal_against_statrs() {
    let normal = Normal::new(0.0, 1.0).unwrap();
    for &p in &[1e-10, 1e-4, 0.001, 0.025, 0.1, 0.3, 0.5, 0.77, 0.975, 0.9999] {
        let z = normal_quantile(p).unwrap();
        assert!((z - normal.inverse_cdf(p)).abs() < 1e-9, "p={p}");
    }
    // statrs' own erfc is good to roughly 1e-10 relative in the tails.
    for &x in &[-8.0, -3.0, -1.0, 0.0, 0.5, 2.0, 6.0] {
        let rel = (normal_cdf(x) - normal.cdf(x)).abs() / normal.cdf(x);
        assert!(rel < 1e-9, "x={x} rel={rel}");
    }
}

#[test]
fn normal_cdf_reference_values() {
    for &(x, expected) in &[
        (-1.0, 0.158_655_253_931_457_05),
        (-3.0, 1.349_898_031_630_094_6e-3),
        (-8.0, 6.220_960_574_271_785e-16),
    ] {
        let rel: f64 = (normal_cdf(x) - expected) / expected;
        assert!(rel.abs() < 1e-13, "x={x} rel={rel}");
    }
}

#[test]
fn ln_gamma_against_statrs() {
    for &x in &[0.1, 0.5, 1.5, 3.7, 10.0, 31.6, 141.4, 1000.0] {
        let expected = gamma::ln_gamma(x);
        assert!(
            (ln_gamma(x) - expected).abs() < 1e-12 * expected.abs().max(1.0),
            "x={x}"
        );
    }
}

#[test]
fn beta_against_statrs() {
    for &(a, b) in &[(0.5, 0.5), (2.0, 5.0), (22.36, 14.14), (27.2, 11.8), (141.0, 31.6)] {
        let dist = Beta::new(a, b).unwrap();
        for &x in &[0.01, 0.2, 0.5, 0.8, 0.99] {
            assert!(
                (regularized_beta(x, a, b) - dist.cdf(x)).abs() < 1e-12,
                "a={a} b={b} x={x}"
            );
        }
        for &p in &[0.005, 0.025, 0.5, 0.975, 0.995] {
            let q = beta_quantile(p, a, b).unwrap();
            assert!((q - dist.inverse_cdf(p)).abs() < 1e-9, "a={a} b={b} p={p}");
        }
    }
}

#[test]
fn credible_interval_uses_square_root_counts() {
    let ci = beta_credible(300.0, 700.0, 4, 0.05).unwrap();
    let dist = Beta::new(700f64.sqrt(), 300f64.sqrt()).unwrap();
    assert!((ci.lo - 4.0 - dist.inverse_cdf(0.025)).abs() < 1e-9);
    assert!((ci.hi - 4.0 - dist.inverse_cdf(0.975)).abs() < 1e-9);
}
