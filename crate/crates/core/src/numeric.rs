//! Trigonometry in units of π with exact argument reduction.
//!
//! `sin(πx)` evaluated as `(x * PI).sin()` loses all relative accuracy near
//! integer `x`, which is exactly where the Fejér distribution concentrates.

use std::f64::consts::PI;

fn reduce(x: f64) -> (f64, bool) {
    let whole = x.round();
    // x - whole is exact for |x| < 2^52 and lies in [-0.5, 0.5].
    (x - whole, whole % 2.0 != 0.0)
}

pub(crate) fn sin_pi(x: f64) -> f64 {
    let (r, odd) = reduce(x);
    let s = (PI * r).sin();
    if odd {
        -s
    } else {
        s
    }
}

/// Exactly zero at half-integers.
pub(crate) fn cos_pi(x: f64) -> f64 {
    let (r, odd) = reduce(x);
    let c = (PI * (0.5 - r.abs())).sin();
    if odd {
        -c
    } else {
        c
    }
}

pub(crate) fn cot_pi(x: f64) -> f64 {
    cos_pi(x) / sin_pi(x)
}

pub(crate) fn tan_pi(x: f64) -> f64 {
    sin_pi(x) / cos_pi(x)
}

/// `(-1)^m` for an integer-valued `m`.
pub(crate) fn parity_sign(m: i64) -> f64 {
    if m.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

pub(crate) fn is_integer(x: f64) -> bool {
    x.fract() == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reduced_sine_is_exact_at_integers_and_accurate_nearby() {
        for m in -5..=300 {
            assert_eq!(sin_pi(m as f64), 0.0);
        }
        let x = 257.0 + 1e-9;
        let expected = parity_sign(257) * (PI * (x - 257.0)).sin();
        assert!((sin_pi(x) - expected).abs() <= 1e-24);
    }

    #[test]
    fn cosine_vanishes_at_half_integers() {
        for m in -4..=40 {
            assert_eq!(cos_pi(m as f64 + 0.5), 0.0);
        }
        assert_eq!(cos_pi(2.0), 1.0);
        assert_eq!(cos_pi(3.0), -1.0);
    }

    #[test]
    fn agrees_with_naive_evaluation_for_moderate_arguments() {
        for i in 0..200 {
            let x = -3.0 + i as f64 * 0.0371;
            assert!((sin_pi(x) - (PI * x).sin()).abs() < 1e-14);
            assert!((cos_pi(x) - (PI * x).cos()).abs() < 1e-14);
        }
    }
}
