//! Log-domain helpers for quantities such as `r^j / j!`, which over- or
//! underflow any fixed-range float long before the radii of interest.

use std::f64::consts::{LN_10, PI};
use std::sync::OnceLock;

/// Compensated (Neumaier) summation. The running value is `sum + comp`.
#[derive(Clone, Copy, Debug, Default)]
pub struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Unevaluated pair `(hi, lo)` so callers can subtract a large
    /// neighbour from `hi` before folding in `lo`.
    pub fn parts(&self) -> (f64, f64) {
        (self.sum, self.comp)
    }
}

impl FromIterator<f64> for Neumaier {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Neumaier::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

const TABLE_LEN: usize = 32;

fn small_ln_factorials() -> &'static [f64; TABLE_LEN] {
    static TABLE: OnceLock<[f64; TABLE_LEN]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [0.0; TABLE_LEN];
        let mut acc = Neumaier::new();
        for (j, slot) in t.iter_mut().enumerate().skip(1) {
            acc.add((j as f64).ln());
            *slot = acc.value();
        }
        t
    })
}

/// Tail of the Stirling series, `ln j! - (j ln j - j + ln(2πj)/2)`.
/// Valid for `j >= 32`, where the truncation error is below `1e-17`.
fn stirling_remainder(j: f64) -> f64 {
    let inv = 1.0 / j;
    let inv2 = inv * inv;
    inv * (1.0 / 12.0 - inv2 * (1.0 / 360.0 - inv2 * (1.0 / 1260.0 - inv2 / 1680.0)))
}

/// `ln j!`.
pub fn ln_factorial(j: u64) -> f64 {
    if (j as usize) < TABLE_LEN {
        return small_ln_factorials()[j as usize];
    }
    let x = j as f64;
    x * x.ln() - x + 0.5 * (2.0 * PI * x).ln() + stirling_remainder(x)
}

/// `ln j!` by direct compensated summation of `ln i`, returned as an
/// unevaluated `(hi, lo)` pair. Independent of the Stirling series; `O(j)`.
pub fn ln_factorial_summed(j: u64) -> (f64, f64) {
    let acc: Neumaier = (2..=j).map(|i| (i as f64).ln()).collect();
    acc.parts()
}

/// `ln(r^j e^{-r} / j!)`, the log of the Poisson weight with mean `r`.
///
/// For large `j` the three large terms `j ln r`, `ln j!` and `r` nearly
/// cancel; the expression is rearranged around `δ = (r - j)/j` so that the
/// result keeps absolute accuracy near `1e-13` even for `j ≈ r ≈ 10^7`.
pub fn log_poisson_weight(j: u64, r: f64) -> f64 {
    debug_assert!(r > 0.0);
    if j == 0 {
        return -r;
    }
    if (j as usize) < TABLE_LEN {
        return j as f64 * r.ln() - small_ln_factorials()[j as usize] - r;
    }
    let x = j as f64;
    let delta = (r - x) / x;
    let core = if delta.abs() < 0.5 {
        x * (delta.ln_1p() - delta)
    } else {
        x * (r / x).ln() + (x - r)
    };
    core - 0.5 * (2.0 * PI * x).ln() - stirling_remainder(x)
}

/// `ln Σ exp(x_i)`; `-inf` for an empty input.
pub fn log_sum_exp<I>(terms: I) -> f64
where
    I: IntoIterator<Item = f64>,
{
    let terms: Vec<f64> = terms.into_iter().collect();
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let acc: Neumaier = terms.iter().map(|t| (t - max).exp()).collect();
    max + acc.value().ln()
}

/// Decimal scientific rendering of `exp(ln_value)`, valid far outside the
/// `f64` range (e.g. `1.234567e+434294`).
pub fn format_ln(ln_value: f64) -> String {
    if ln_value == f64::NEG_INFINITY {
        return "0".to_string();
    }
    if !ln_value.is_finite() {
        return format!("{ln_value}");
    }
    if ln_value.abs() < 700.0 {
        return format!("{:.6e}", ln_value.exp());
    }
    let log10 = ln_value / LN_10;
    let mut exponent = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exponent);
    if mantissa >= 9.9999995 {
        mantissa /= 10.0;
        exponent += 1.0;
    }
    format!("{mantissa:.6}e{exponent:+}")
}

#[cfg(test)]
mod tests {
    use super::*;
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn ln_factorial_matches_lgamma() {
        for j in [0u64, 1, 2, 5, 31, 32, 33, 100, 1000, 123_456] {
            let expect = ln_gamma(j as f64 + 1.0);
            let got = ln_factorial(j);
            assert!((got - expect).abs() <= 1e-12 * expect.abs().max(1.0), "j={j}");
        }
    }

    #[test]
    fn summed_factorial_agrees() {
        for j in [0u64, 1, 7, 40, 10_000] {
            let (hi, lo) = ln_factorial_summed(j);
            assert!((hi + lo - ln_factorial(j)).abs() < 1e-10 * (hi.abs() + 1.0));
        }
    }

    #[test]
    fn poisson_weight_small_cases() {
        // r = 1: weights e^{-1}/j!.
        for j in 0..10u64 {
            let expect = -1.0 - ln_factorial(j);
            assert!((log_poisson_weight(j, 1.0) - expect).abs() < 1e-14);
        }
        // Mode of the Poisson law near j = r: weight ≈ 1/sqrt(2πr).
        let r = 1.0e6;
        let w = log_poisson_weight(1_000_000, r);
        let approx = -0.5 * (2.0 * PI * r).ln();
        assert!((w - approx).abs() < 1e-6);
    }

    #[test]
    fn poisson_weight_against_ratio_recursion() {
        // Independent route: ln(r^j/j!) - ln(r^i/i!) = Σ ln(r/t), t = i+1..j.
        let r = 2.5e5_f64;
        let anchor = 250_000u64;
        let base = log_poisson_weight(anchor, r);
        let mut acc = Neumaier::new();
        for t in anchor + 1..=anchor + 3000 {
            acc.add(((r - t as f64) / t as f64).ln_1p());
            if t % 500 == 0 {
                let w = log_poisson_weight(t, r);
                assert!((w - (base + acc.value())).abs() < 1e-10, "t={t}");
            }
        }
    }

    #[test]
    fn lse_basic() {
        assert_eq!(log_sum_exp(Vec::<f64>::new()), f64::NEG_INFINITY);
        let v = log_sum_exp([0.0, 0.0]);
        assert!((v - 2f64.ln()).abs() < 1e-15);
        let big = log_sum_exp([1e6, 1e6 - 1000.0]);
        assert!((big - 1e6).abs() < 1e-12);
    }

    #[test]
    fn formats_huge_values() {
        assert_eq!(format_ln(0.0), "1.000000e0");
        assert_eq!(format_ln(f64::NEG_INFINITY), "0");
        assert_eq!(format_ln(1000.0 * LN_10), "1.000000e+1000");
        assert!(format_ln(-1.0e6).ends_with("e-434295"));
    }

    #[test]
    fn neumaier_beats_naive() {
        let mut acc = Neumaier::new();
        acc.add(1.0);
        for _ in 0..1000 {
            acc.add(1e-16);
        }
        assert!((acc.value() - (1.0 + 1e-13)).abs() < 1e-18);
    }
}
