//! First- and second-order moments of the ratio estimator `r̂ = q(k)/q(k+1)`
//! and of the ratio-based decimal estimate `D_N(r̂)` after `L` shots.

use serde::{Deserialize, Serialize};

use super::{d_n, d_n_prime, d_n_second};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MomentForm {
    /// Large-sample mean and variance of the ratio itself.
    Ratio,
    /// The literal expansion: leading term `D'_N(μ)` and variance
    /// correction `-¼ D''_N(μ)² σ²`.
    Literal,
    /// Textbook second-order delta method: mean `D_N(μ) + ½ D''_N(μ) σ²`,
    /// variance `D'_N(μ)² σ²`.
    StandardDelta,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub mean: f64,
    pub variance: f64,
    pub form: MomentForm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RbeMoments {
    pub literal: MomentReport,
    pub standard_delta: MomentReport,
}

fn check(p_k: f64, p_k1: f64, shots: f64) -> Result<()> {
    for p in [p_k, p_k1] {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "probabilities must lie in (0, 1), got {p}"
            )));
        }
    }
    if shots.is_nan() || shots < 1.0 {
        return Err(Error::NoShots);
    }
    Ok(())
}

/// `E[r̂] ≈ (p_k/p_{k+1}) (1 + 1/(L p_{k+1}))` and
/// `Var[r̂] ≈ (1/L) (p_k/p_{k+1})² (1/p_k + 1/p_{k+1})`.
pub fn ratio_moments(p_k: f64, p_k1: f64, shots: f64) -> Result<MomentReport> {
    check(p_k, p_k1, shots)?;
    let r = p_k / p_k1;
    Ok(MomentReport {
        mean: r * (1.0 + 1.0 / (shots * p_k1)),
        variance: r * r * (1.0 / p_k + 1.0 / p_k1) / shots,
        form: MomentForm::Ratio,
    })
}

/// Moments of the decimal estimate `D_N(r̂)` in both forms, expanded around
/// `μ = E[r̂]`.
pub fn rbe_moments(dim: usize, p_k: f64, p_k1: f64, shots: f64) -> Result<RbeMoments> {
    let ratio = ratio_moments(p_k, p_k1, shots)?;
    let (mu, var) = (ratio.mean, ratio.variance);
    let d0 = d_n(dim, mu)?;
    let d1 = d_n_prime(dim, mu)?;
    let d2 = d_n_second(dim, mu)?;
    Ok(RbeMoments {
        literal: MomentReport {
            mean: d1 + 0.5 * d2 * var,
            variance: d1 * d1 * var - 0.25 * d2 * d2 * var,
            form: MomentForm::Literal,
        },
        standard_delta: MomentReport {
            mean: d0 + 0.5 * d2 * var,
            variance: d1 * d1 * var,
            form: MomentForm::StandardDelta,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sinc::FejerModel;

    #[test]
    fn ratio_moment_examples() {
        let m = ratio_moments(0.4, 0.4, 1000.0).unwrap();
        assert!((m.mean - 1.0025).abs() < 1e-12);
        assert!((m.variance - 0.005).abs() < 1e-12);

        let m = ratio_moments(0.3, 0.6, 1e9).unwrap();
        assert!((m.mean - 0.5).abs() < 1e-8);

        assert!(ratio_moments(0.0, 0.5, 10.0).is_err());
        assert!(ratio_moments(0.5, 0.5, 0.0).is_err());
    }

    #[test]
    fn plug_in_variance_matches_sigma_form() {
        // (1/L) r² (1/p_k + 1/p_{k+1}) == r (1 + r)² / (s L)
        for &(pk, pk1, l) in &[(0.4, 0.3, 1000.0), (0.05, 0.8, 250.0), (0.7, 0.01, 20_000.0)] {
            let m = ratio_moments(pk, pk1, l).unwrap();
            let r: f64 = pk / pk1;
            let s = pk + pk1;
            let sigma_form = r * (1.0 + r).powi(2) / (s * l);
            assert!((m.variance - sigma_form).abs() <= 1e-12 * sigma_form.max(1.0));
        }
    }

    #[test]
    fn standard_delta_centres_on_decimal() {
        let p = FejerModel::new(3, 6.5).unwrap().pmf().probs;
        let m = rbe_moments(8, p[6], p[7], 1000.0).unwrap();
        assert!((m.standard_delta.mean - 0.5).abs() < 1e-3);
        assert!(m.standard_delta.variance > 0.0);
        // D'_N < 0, so the literal leading term cannot be a decimal part.
        assert!(m.literal.mean < 0.0);
    }
}
