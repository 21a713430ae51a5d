use sincd::sampler::{apply_readout_noise, derive_seed, sample_shots};
use sincd::FejerModel;
use statrs::distribution::{ChiSquared, ContinuousCDF};

#[test]
fn frequency_within_three_sigma() {
    let pmf = FejerModel::new(3, 5.3).unwrap().pmf();
    let counts = sample_shots(&(&pmf).into(), 20_000, 1).unwrap().to_counts().unwrap();
    let p = pmf.probs[5];
    let sigma = (p * (1.0 - p) / 20_000.0).sqrt();
    let freq = counts.counts()[5] as f64 / 20_000.0;
    assert!((freq - p).abs() < 3.0 * sigma, "freq {freq} p {p}");
}

#[test]
fn chi_square_goodness_of_fit() {
    let pmf = FejerModel::new(4, 9.37).unwrap().pmf();
    let dist = apply_readout_noise(&pmf, 0.05).unwrap();
    let shots = 200_000;
    let mut p_values = Vec::new();
    for i in 0..5 {
        let counts = sample_shots(&dist, shots, derive_seed(77, i))
            .unwrap()
            .to_counts()
            .unwrap();
        let stat: f64 = counts
            .counts()
            .iter()
            .zip(&dist.probs)
            .map(|(&c, &p)| {
                let e = p * shots as f64;
                (c as f64 - e).powi(2) / e
            })
            .sum();
        let df = (dist.dim() - 1) as f64;
        p_values.push(1.0 - ChiSquared::new(df).unwrap().cdf(stat));
    }
    // Five independent p-values all below 1e-3 would be a sampler bug.
    assert!(p_values.iter().any(|&p| p > 1e-3), "{p_values:?}");
    assert!(p_values.iter().all(|&p| p > 1e-6), "{p_values:?}");
}

#[test]
fn seeds_reproduce_and_differ() {
    let pmf = FejerModel::new(3, 2.7).unwrap().pmf();
    let dist = (&pmf).into();
    let a = sample_shots(&dist, 5000, 42).unwrap();
    let b = sample_shots(&dist, 5000, 42).unwrap();
    let c = sample_shots(&dist, 5000, 43).unwrap();
    assert_eq!(a.outcomes, b.outcomes);
    assert_ne!(a.outcomes, c.outcomes);
}

#[test]
fn rounds_partition_the_record() {
    let pmf = FejerModel::new(3, 6.3).unwrap().pmf();
    let record = sample_shots(&(&pmf).into(), 20_500, 3).unwrap();
    let split = record.split_rounds(1000).unwrap();
    assert_eq!(split.rounds.len(), 20);
    assert_eq!(split.dropped, 500);
    let mut merged = split.rounds[0].clone();
    for r in &split.rounds[1..] {
        merged.merge(r).unwrap();
    }
    assert_eq!(merged.shots(), 20_000);
}
