//! The discrete sinc state and its Fejér outcome distribution.
//!
//! For `n` qubits, `N = 2^n` and an encoded value `t ∈ [0, N)` the state is
//!
//! ```text
//! |φ⟩ = Σ_k exp(iπ (N-1)/N (t-k)) c(k) |k⟩,   c(k) = Π_{j=1..n} cos((t-k)π / 2^j)
//! ```
//!
//! and measuring it yields outcome `k` with probability
//! `p(k) = sin²(tπ) / (N² sin²((t-k)π/N))` for non-integer `t`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{cos_pi, cot_pi, is_integer, parity_sign, sin_pi, tan_pi};

/// Largest supported register width.
pub const MAX_QUBITS: u32 = 30;

/// Normalised discrete sinc: `Π_{j=1..n} cos(xπ / 2^j)`.
///
/// Equals `sin(xπ) / (2^n sin(xπ / 2^n))` wherever the quotient is defined
/// and extends it continuously (to 1) at `x = 0`.
pub fn sincd_pi(n: u32, x: f64) -> f64 {
    let mut scale = 1.0;
    let mut prod = 1.0;
    for _ in 0..n {
        scale *= 0.5;
        prod *= cos_pi(x * scale);
    }
    prod
}

/// The triple `(n, N = 2^n, t)` describing one discrete sinc state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FejerModel {
    n: u32,
    dim: usize,
    t: f64,
}

impl FejerModel {
    /// Values of `t` outside `[0, N)` are rejected rather than wrapped.
    pub fn new(n: u32, t: f64) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return Err(Error::InvalidQubitCount(n));
        }
        let dim = 1usize << n;
        if !t.is_finite() || t < 0.0 || t >= dim as f64 {
            return Err(Error::ValueOutOfRange { t, dim });
        }
        Ok(Self { n, dim, t })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `N = 2^n`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn is_integer(&self) -> bool {
        is_integer(self.t)
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.dim {
            return Err(Error::IndexOutOfRange {
                index: k,
                dim: self.dim,
            });
        }
        Ok(())
    }

    /// The real coefficient `c_{N,t}(k)`, evaluated as a product of cosines so
    /// that `t = k` needs no special case.
    pub fn amplitude_coeff(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        Ok(sincd_pi(self.n, self.t - k as f64))
    }

    pub fn amplitude_coeffs(&self) -> Vec<f64> {
        (0..self.dim).map(|k| sincd_pi(self.n, self.t - k as f64)).collect()
    }

    pub fn state_vector(&self) -> StateVector {
        let dim = self.dim as f64;
        let amplitudes = (0..self.dim)
            .map(|k| {
                let delta = self.t - k as f64;
                let angle = (dim - 1.0) * delta / dim;
                Complex64::new(cos_pi(angle), sin_pi(angle)) * sincd_pi(self.n, delta)
            })
            .collect();
        StateVector { amplitudes }
    }

    /// Outcome distribution. Integer `t` gives the point mass at `k = t`, the
    /// limit of the closed form.
    pub fn pmf(&self) -> FejerPmf {
        let probs = if self.is_integer() {
            let mut probs = vec![0.0; self.dim];
            probs[self.t as usize] = 1.0;
            probs
        } else {
            let dim = self.dim as f64;
            let numerator = sin_pi(self.t).powi(2) / (dim * dim);
            (0..self.dim)
                .map(|k| numerator / sin_pi((self.t - k as f64) / dim).powi(2))
                .collect()
        };
        FejerPmf { model: *self, probs }
    }

    /// `log p_{N,t}(k)` without forming the (possibly underflowing) ratio.
    pub fn log_pmf(&self, k: usize) -> Result<f64> {
        self.check_index(k)?;
        if self.is_integer() {
            return Err(Error::IntegerValue(self.t));
        }
        Ok(self.log_pmf_unchecked(k))
    }

    pub(crate) fn log_pmf_unchecked(&self, k: usize) -> f64 {
        let dim = self.dim as f64;
        2.0 * (sin_pi(self.t).abs().ln() - dim.ln() - sin_pi((self.t - k as f64) / dim).abs().ln())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub amplitudes: Vec<Complex64>,
}

impl StateVector {
    pub fn norm_squared(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn amplitude_sum(&self) -> Complex64 {
        self.amplitudes.iter().sum()
    }

    /// Indices of the `count` largest-magnitude amplitudes, largest first.
    pub fn largest(&self, count: usize) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.amplitudes.len()).collect();
        idx.sort_by(|&a, &b| {
            self.amplitudes[b]
                .norm()
                .total_cmp(&self.amplitudes[a].norm())
                .then(a.cmp(&b))
        });
        idx.truncate(count);
        idx
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FejerPmf {
    pub model: FejerModel,
    pub probs: Vec<f64>,
}

impl FejerPmf {
    pub fn dim(&self) -> usize {
        self.probs.len()
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityResidual {
    pub name: String,
    pub left: f64,
    pub right: f64,
    pub residual: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub entries: Vec<IdentityResidual>,
}

impl IdentityReport {
    fn push(&mut self, name: impl Into<String>, left: f64, right: f64) {
        self.entries.push(IdentityResidual {
            name: name.into(),
            left,
            right,
            residual: (left - right).abs(),
        });
    }

    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .map(|e| e.residual)
            .fold(0.0, |acc, r| if r.is_nan() || r > acc { r } else { acc })
    }

    pub fn worst(&self) -> Option<&IdentityResidual> {
        self.entries.iter().max_by(|a, b| a.residual.total_cmp(&b.residual))
    }

    /// Entries whose residual exceeds `tolerance` (NaN residuals included).
    pub fn failures(&self, tolerance: f64) -> impl Iterator<Item = &IdentityResidual> {
        self.entries
            .iter()
            .filter(move |e| e.residual.is_nan() || e.residual > tolerance)
    }
}

/// Evaluates every closed-form identity of the state at `model`.
pub fn verify_identities(model: &FejerModel) -> Result<IdentityReport> {
    if model.is_integer() {
        return Err(Error::IntegerValue(model.t()));
    }
    let coeffs = model.amplitude_coeffs();
    let pmf = model.pmf();
    check_identities(model, &coeffs, &pmf.probs)
}

/// Same as [`verify_identities`] but on caller-supplied coefficients and
/// probabilities, which lets a harness feed in perturbed values.
pub fn check_identities(model: &FejerModel, coeffs: &[f64], probs: &[f64]) -> Result<IdentityReport> {
    let dim = model.dim();
    if coeffs.len() != dim || probs.len() != dim {
        return Err(Error::InvalidArgument(format!(
            "expected {dim} coefficients and probabilities, got {} and {}",
            coeffs.len(),
            probs.len()
        )));
    }
    if model.is_integer() {
        return Err(Error::IntegerValue(model.t()));
    }
    let t = model.t();
    let n = dim as f64;
    let floor = t.floor() as i64;
    let offset = |k: usize| (t - k as f64) / n;

    let mut report = IdentityReport::default();

    let mut amp_sum = Complex64::new(0.0, 0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        let angle = (n - 1.0) * (t - k as f64) / n;
        amp_sum += Complex64::new(cos_pi(angle), sin_pi(angle)) * c;
    }
    report.push("amplitude_sum.re", amp_sum.re, 1.0);
    report.push("amplitude_sum.im", amp_sum.im, 0.0);

    for (k, (&c, &p)) in coeffs.iter().zip(probs).enumerate() {
        let gap = floor - k as i64;
        let sgn = if gap < 0 { -1.0 } else { 1.0 };
        report.push(format!("sign_law[{k}]"), c, parity_sign(gap) * sgn * p.sqrt());
    }

    let cot_t = cot_pi(t);
    let weighted: f64 = probs.iter().enumerate().map(|(k, &p)| p * cot_pi(offset(k))).sum();
    report.push("mle_identity", weighted / n, cot_t);
    let complement: f64 = probs
        .iter()
        .enumerate()
        .map(|(k, &p)| (1.0 - p) * cot_pi(offset(k)))
        .sum();
    report.push("mle_identity_complement", complement / n, 0.0);
    let cosine_form: f64 = probs
        .iter()
        .zip(coeffs)
        .enumerate()
        .map(|(k, (&p, &c))| p * parity_sign(k as i64) * cos_pi(offset(k)) * c)
        .sum();
    report.push("mle_identity_cosine", cosine_form, cos_pi(t));

    let half = dim / 2;
    for k in 0..dim {
        let partner = probs[(k + half) % dim];
        report.push(
            format!("tangent_shift[{k}]"),
            tan_pi(offset(k)).abs(),
            (partner / probs[k]).sqrt(),
        );
    }

    let mut sine_sum = 0.0;
    let mut cosine_sum = 0.0;
    let mut alt_sine_sum = 0.0;
    let mut phase_sum = Complex64::new(0.0, 0.0);
    let mut alt_cos_nodes = 0.0;
    let mut alt_sin_nodes = 0.0;
    let mut cot_sum = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        let x = offset(k);
        let alt = parity_sign(k as i64);
        let node = k as f64 / n;
        let node_phase = (n - 1.0) * k as f64 / n;
        sine_sum += sin_pi(x) * c;
        cosine_sum += cos_pi(x) * c;
        alt_sine_sum += alt * sin_pi(x) * c;
        phase_sum += Complex64::new(cos_pi(node_phase), sin_pi(node_phase)) * c;
        alt_cos_nodes += alt * cos_pi(node) * c;
        alt_sin_nodes += alt * sin_pi(node) * c;
        cot_sum += cot_pi(x);
    }
    let target_phase = t * (n - 1.0) / n;
    report.push("sine_sum", sine_sum, 0.0);
    report.push("cosine_sum", cosine_sum, 1.0);
    report.push("alternating_sine_sum", alt_sine_sum, sin_pi(t));
    report.push("phase_sum.re", phase_sum.re, cos_pi(target_phase));
    report.push("phase_sum.im", phase_sum.im, sin_pi(target_phase));
    report.push("alternating_cosine_node_sum", alt_cos_nodes, cos_pi(target_phase));
    report.push("alternating_sine_node_sum", alt_sin_nodes, -sin_pi(target_phase));
    report.push("cotangent_sum", cot_sum / n, cot_t);

    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Independent sine-ratio form of `c_{N,t}(k)`, reduced by hand.
    fn sine_ratio(n: u32, x: f64) -> f64 {
        let dim = (1u64 << n) as f64;
        let whole = x.round();
        let sign = if (whole as i64).rem_euclid(2) == 0 { 1.0 } else { -1.0 };
        sign * (PI * (x - whole)).sin() / (dim * (PI * x / dim).sin())
    }

    #[test]
    fn sincd_examples() {
        assert_eq!(sincd_pi(3, 0.0), 1.0);
        assert!(sincd_pi(3, 4.0).abs() < 1e-15);
        assert!((sincd_pi(3, 0.3) - sine_ratio(3, 0.3)).abs() < 1e-12);
    }

    #[test]
    fn rejects_out_of_range_models() {
        assert!(matches!(FejerModel::new(0, 0.5), Err(Error::InvalidQubitCount(0))));
        assert!(matches!(FejerModel::new(3, 8.0), Err(Error::ValueOutOfRange { .. })));
        assert!(matches!(FejerModel::new(3, -0.1), Err(Error::ValueOutOfRange { .. })));
        assert!(FejerModel::new(3, f64::NAN).is_err());
    }

    #[test]
    fn amplitude_examples() {
        let m = FejerModel::new(3, 5.0).unwrap();
        assert_eq!(m.amplitude_coeff(5).unwrap(), 1.0);
        assert!(matches!(m.amplitude_coeff(8), Err(Error::IndexOutOfRange { .. })));

        let m = FejerModel::new(3, 5.3).unwrap();
        let p = m.pmf().probs;
        assert!((m.amplitude_coeff(5).unwrap() - p[5].sqrt()).abs() < 1e-12);
        // (-1)^(-1) sgn(-1) = +1: the first neighbour above the floor is positive.
        assert!((m.amplitude_coeff(6).unwrap() - p[6].sqrt()).abs() < 1e-12);
        assert!((m.amplitude_coeff(4).unwrap() + p[4].sqrt()).abs() < 1e-12);
        assert!((p[5] - 0.7402).abs() < 1e-4);
    }

    #[test]
    fn state_vector_examples() {
        let s = FejerModel::new(1, 0.0).unwrap().state_vector();
        assert!((s.amplitudes[0] - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(s.amplitudes[1].norm() < 1e-15);

        let s = FejerModel::new(3, 5.3).unwrap().state_vector();
        assert_eq!(s.largest(2), vec![5, 6]);

        let s = FejerModel::new(3, 2.7).unwrap().state_vector();
        assert!((s.amplitude_sum() - Complex64::new(1.0, 0.0)).norm() < 1e-10);
        assert!((s.norm_squared() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pmf_examples() {
        let p = FejerModel::new(3, 5.0).unwrap().pmf();
        assert_eq!(p.probs[5], 1.0);
        assert_eq!(p.total(), 1.0);

        let m = FejerModel::new(3, 5.3).unwrap();
        let p = m.pmf();
        for k in 0..8 {
            let oracle = sincd_pi(3, 5.3 - k as f64).powi(2);
            assert!((p.probs[k] - oracle).abs() < 1e-14);
        }
        assert!((p.probs[6] - 0.1388).abs() < 1e-4);
        assert!((p.total() - 1.0).abs() < 1e-12);

        let p = FejerModel::new(3, 4.5).unwrap().pmf();
        assert!((p.probs[4] - p.probs[5]).abs() < 1e-15);
    }

    #[test]
    fn log_pmf_examples() {
        let m = FejerModel::new(3, 5.3).unwrap();
        let p = m.pmf();
        assert!((m.log_pmf(5).unwrap() - p.probs[5].ln()).abs() < 1e-12);

        let m = FejerModel::new(3, 4.5).unwrap();
        assert_eq!(m.log_pmf(4).unwrap(), m.log_pmf(5).unwrap());

        // p(0) at t = 5 + 1e-6 is sin²(1e-6 π) / (64 sin²(5π/8)) to first order.
        let m = FejerModel::new(3, 5.000001).unwrap();
        let lp = m.log_pmf(0).unwrap();
        let delta = 5.000001 - 5.0;
        let approx = ((PI * delta).sin().powi(2) / (64.0 * (5.000001 * PI / 8.0).sin().powi(2))).ln();
        assert!(lp.is_finite());
        assert!((lp - approx).abs() < 1e-9);

        assert!(matches!(
            FejerModel::new(3, 5.0).unwrap().log_pmf(0),
            Err(Error::IntegerValue(_))
        ));
    }

    #[test]
    fn identities_hold_at_examples() {
        for (n, t) in [(3, 2.7), (4, 12.5), (1, 0.25)] {
            let report = verify_identities(&FejerModel::new(n, t).unwrap()).unwrap();
            assert!(report.max_residual() < 1e-9, "{n} {t}: {:?}", report.worst());
        }
    }

    #[test]
    fn identities_reject_integer_values() {
        let m = FejerModel::new(3, 2.0).unwrap();
        assert!(matches!(verify_identities(&m), Err(Error::IntegerValue(_))));
    }

    #[test]
    fn signed_tangent_form_fails_above_t() {
        // The tangent identity only holds in absolute value: for k > t the
        // left side is negative while the square root is not.
        let m = FejerModel::new(3, 2.7).unwrap();
        let p = m.pmf().probs;
        let k = 5;
        let signed = tan_pi((2.7 - k as f64) / 8.0);
        let root = (p[(k + 4) % 8] / p[k]).sqrt();
        assert!(signed < 0.0);
        assert!((signed.abs() - root).abs() < 1e-12);
    }

    #[test]
    fn perturbed_probabilities_are_detected() {
        let m = FejerModel::new(3, 2.7).unwrap();
        let coeffs = m.amplitude_coeffs();
        let mut probs = m.pmf().probs;
        probs[2] += 1e-6;
        let report = check_identities(&m, &coeffs, &probs).unwrap();
        assert!(report.failures(1e-9).count() > 0);
    }

    #[test]
    fn near_integer_mass_concentrates() {
        for t in [5.0 - 1e-9, 5.0 + 1e-9] {
            let p = FejerModel::new(3, t).unwrap().pmf();
            assert!(p.probs[5] >= 1.0 - 1e-8);
        }
    }
}
