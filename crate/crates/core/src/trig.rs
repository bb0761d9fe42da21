//! Sampling and `L^p` norms of trigonometric polynomials on the unit circle
//! (normalized arc-length measure).

use std::cell::RefCell;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;

use crate::exponent::Exponent;
use crate::logmath::Neumaier;

/// Default oversampling factor for sup-norm certification.
pub const SUP_OVERSAMPLE: usize = 16;

/// Oversampling factor for quadrature of `|P|^p` at non-even `p`.
pub const QUAD_OVERSAMPLE: usize = 4;

thread_local! {
    static PLANS: RefCell<(FftPlanner<f64>, HashMap<usize, Arc<dyn Fft<f64>>>)> =
        RefCell::new((FftPlanner::new(), HashMap::new()));
}

fn inverse_plan(n: usize) -> Arc<dyn Fft<f64>> {
    PLANS.with(|cell| {
        let mut guard = cell.borrow_mut();
        let (planner, cache) = &mut *guard;
        cache
            .entry(n)
            .or_insert_with(|| planner.plan_fft_inverse(n))
            .clone()
    })
}

/// Values of `θ ↦ Σ c_k e^{ikθ}` at `θ_j = 2πj/n`, `j = 0..n`.
///
/// Exponents are reduced mod `n`, which is exact at the sample points, so
/// any spread of exponents is allowed.
pub fn sample(terms: &[(i64, Complex64)], n: usize) -> Vec<Complex64> {
    assert!(n > 0, "sample count must be positive");
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    for &(k, c) in terms {
        buf[k.rem_euclid(n as i64) as usize] += c;
    }
    inverse_plan(n).process(&mut buf);
    buf
}

/// Difference between the largest and smallest exponent.
pub fn span(terms: &[(i64, Complex64)]) -> u64 {
    let lo = terms.iter().map(|t| t.0).min().unwrap_or(0);
    let hi = terms.iter().map(|t| t.0).max().unwrap_or(0);
    (hi - lo) as u64
}

/// A norm value with a two-sided error bracket.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub samples: usize,
}

/// Certified bracket for `sup_θ |P(θ)|`.
///
/// With `D` the exponent span, `P·e^{-icθ}` has degree `⌈D/2⌉` for a suitable
/// centre `c`, and Bernstein's inequality bounds the derivative by
/// `⌈D/2⌉·‖P‖∞`. Every point is within `π/N` of a sample, hence
/// `‖P‖∞ ≤ S / (1 − ⌈D/2⌉π/N)` where `S` is the sampled maximum.
pub fn sup_norm(terms: &[(i64, Complex64)], oversample: usize) -> NormEstimate {
    if terms.is_empty() {
        return NormEstimate { value: 0.0, lower: 0.0, upper: 0.0, samples: 0 };
    }
    let d = span(terms);
    let n = (oversample.max(4) * (d as usize + 1)).next_power_of_two();
    let max = sample(terms, n)
        .iter()
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    let degree = d.div_ceil(2) as f64;
    let slack = 1.0 - degree * PI / n as f64;
    NormEstimate {
        value: max,
        lower: max,
        upper: max / slack * (1.0 + 1e-14),
        samples: n,
    }
}

/// Mean of `|P|^p` over `n` uniform samples.
pub fn power_mean(terms: &[(i64, Complex64)], p: f64, n: usize) -> f64 {
    let vals = sample(terms, n);
    let half_integer = (2.0 * p).fract() == 0.0 && p < 64.0;
    let whole = p.floor() as i32;
    let acc: Neumaier = vals
        .iter()
        .map(|z| {
            let s = z.norm_sqr();
            if p == 2.0 {
                s
            } else if half_integer {
                let r = s.sqrt();
                let base = r.powi(whole);
                if p.fract() == 0.0 { base } else { base * r.sqrt() }
            } else {
                s.powf(0.5 * p)
            }
        })
        .collect();
    acc.value() / n as f64
}

/// `‖P‖_p` for finite `p`.
///
/// For even integer `p`, `|P|^p = (P·P̄)^{p/2}` has exponent span `p·D`, so
/// more than `p·D` uniform samples integrate it exactly. Otherwise the sample count is `4·(2·D·⌈p⌉ + 1)` and the result
/// is compared against a doubled grid; the difference is the error bar.
pub fn lp_norm_finite(terms: &[(i64, Complex64)], p: f64) -> NormEstimate {
    if terms.is_empty() {
        return NormEstimate { value: 0.0, lower: 0.0, upper: 0.0, samples: 0 };
    }
    let d = span(terms) as usize;
    let even = p.fract() == 0.0 && (p as u64) % 2 == 0;
    if even {
        let n = (p as usize * d + 1).next_power_of_two().max(16);
        let value = power_mean(terms, p, n).powf(1.0 / p);
        let err = value * 1e-14;
        return NormEstimate { value, lower: value - err, upper: value + err, samples: n };
    }
    let base = 2 * d * (p.ceil() as usize).max(1) + 1;
    let n = (QUAD_OVERSAMPLE * base).next_power_of_two().max(16);
    let coarse = power_mean(terms, p, n);
    let fine = power_mean(terms, p, 2 * n);
    let value = fine.powf(1.0 / p);
    // m ↦ m^{1/p} has derivative m^{1/p-1}/p, largest at the smaller mean.
    let m_lo = coarse.min(fine);
    let deriv = if m_lo > 0.0 { m_lo.powf(1.0 / p - 1.0) } else { 0.0 };
    let err = (fine - coarse).abs() * deriv / p + value * 1e-14;
    NormEstimate { value, lower: (value - err).max(0.0), upper: value + err, samples: 2 * n }
}

/// `‖P‖_p` on the circle for any `p ∈ [1, ∞]`.
pub fn lp_norm(terms: &[(i64, Complex64)], p: Exponent) -> NormEstimate {
    match p {
        Exponent::Infinity => sup_norm(terms, SUP_OVERSAMPLE),
        Exponent::Finite(p) => lp_norm_finite(terms, p),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn samples_match_direct_evaluation() {
        let terms = vec![(-3, c(1.0)), (0, Complex64::new(0.5, -2.0)), (7, c(-1.25))];
        let n = 8;
        let got = sample(&terms, n);
        for (j, z) in got.iter().enumerate() {
            let theta = 2.0 * PI * j as f64 / n as f64;
            let direct: Complex64 = terms
                .iter()
                .map(|&(k, a)| a * Complex64::from_polar(1.0, k as f64 * theta))
                .sum();
            assert!((z - direct).norm() < 1e-12);
        }
    }

    #[test]
    fn sup_norm_brackets() {
        let est = sup_norm(&[(0, c(1.0)), (1, c(1.0))], SUP_OVERSAMPLE);
        assert!(est.lower <= 2.0 + 1e-12 && est.upper >= 2.0);
        assert!(est.upper < 2.0 * 1.11);
    }

    #[test]
    fn two_norm_is_parseval() {
        let terms: Vec<_> = (0..37).map(|k| (k, c(((k * 7) % 5) as f64 - 2.0))).collect();
        let ss: f64 = terms.iter().map(|t| t.1.norm_sqr()).sum();
        let est = lp_norm_finite(&terms, 2.0);
        assert!((est.value - ss.sqrt()).abs() < 1e-12 * ss.sqrt());
    }

    #[test]
    fn empty_is_zero() {
        assert_eq!(lp_norm(&[], Exponent::Infinity).upper, 0.0);
        assert_eq!(lp_norm(&[], Exponent::Finite(1.5)).value, 0.0);
    }
}
