//! Values frozen from independent oracles: `statrs`, closed forms, and
//! modified Bessel values `I_0` computed at 30 digits with mpmath.

use fhc_core::analysis::{heat_kernel_mass, pmean, LN_FLOOR};
use fhc_core::kernel_polys::{fejer_kernel, poly_pnorm, rudin_shapiro_sign, vallee_poussin_poly};
use fhc_core::logmath::{ln_factorial, ln_factorial_summed, log_poisson_weight};
use fhc_core::source::{ExpSeries, SparseSeries};
use fhc_core::Exponent;
use num_complex::Complex64;
use num_traits::One;
use statrs::distribution::{Discrete, Poisson};
use statrs::function::factorial;
use statrs::function::gamma::ln_gamma;

#[test]
fn ln_factorial_matches_statrs() {
    for j in 0..=170u64 {
        let want = factorial::ln_factorial(j);
        assert!((ln_factorial(j) - want).abs() <= 1e-13 * want.max(1.0), "j = {j}");
    }
    for j in [171u64, 500, 10_000, 123_457, 1_000_000] {
        let want = ln_gamma(j as f64 + 1.0);
        assert!((ln_factorial(j) - want).abs() <= 1e-13 * want, "j = {j}");
        let (hi, lo) = ln_factorial_summed(j);
        assert!((ln_factorial(j) - (hi + lo)).abs() <= 2e-15 * want, "j = {j}");
    }
}

#[test]
fn poisson_weight_matches_statrs() {
    for r in [0.3, 1.0, 7.5, 40.0, 250.0] {
        let dist = Poisson::new(r).unwrap();
        for j in [0u64, 1, 2, 5, 17, 40, 100, 400] {
            let want = dist.ln_pmf(j);
            let got = log_poisson_weight(j, r);
            assert!((got - want).abs() <= 1e-9 * want.abs().max(1.0), "r = {r}, j = {j}: {got} vs {want}");
        }
    }
}

#[test]
fn poisson_weight_at_the_mode() {
    // At j = r the weight is -ln(2πj)/2 - 1/(12j) + O(j^-3).
    for j in [1_000u64, 100_000, 10_000_000] {
        let x = j as f64;
        let want = -0.5 * (2.0 * std::f64::consts::PI * x).ln() - 1.0 / (12.0 * x) + 1.0 / (360.0 * x.powi(3));
        assert!((log_poisson_weight(j, x) - want).abs() <= 1e-13, "j = {j}");
    }
}

#[test]
fn rudin_shapiro_recursion() {
    let mut s = vec![1i64];
    for n in 1..8192u64 {
        let half = s[(n / 2) as usize];
        s.push(if n % 2 == 0 { half } else if (n / 2) % 2 == 0 { half } else { -half });
    }
    for (n, want) in s.iter().enumerate() {
        assert_eq!(rudin_shapiro_sign(n as u64), *want, "n = {n}");
    }
    let prefix: Vec<i64> = (0..16).map(rudin_shapiro_sign).collect();
    assert_eq!(prefix, [1, 1, 1, -1, 1, 1, -1, 1, 1, 1, 1, -1, -1, -1, 1, -1]);
}

#[test]
fn fejer_and_vallee_poussin_closed_forms() {
    for k in 1..200usize {
        let f = fejer_kernel(k).unwrap();
        let l1 = poly_pnorm(&f, Exponent::Finite(1.0)).unwrap();
        assert!((l1.value - 1.0).abs() <= 1e-12, "k = {k}");
        let l2 = poly_pnorm(&f, Exponent::Finite(2.0)).unwrap();
        let want = ((2 * k * k + 1) as f64 / (3 * k) as f64).sqrt();
        assert!((l2.value / want - 1.0).abs() <= 1e-12, "k = {k}");
    }
    for m in 4..400usize {
        let v = vallee_poussin_poly(m).unwrap();
        let k = m / 4;
        assert_eq!(v.count_ones(), 2 * k + 1, "m = {m}");
        for j in 0..=2 * k as i64 {
            assert!(v.coeff(k as i64 + j).is_one(), "m = {m}");
        }
    }
}

#[test]
fn exponential_means_match_bessel() {
    // ln I_0(r) and ln I_0(2r) / 2, mpmath at 30 digits.
    let table = [
        (0.5, 0.061_549_719_185_481_304, 0.117_957_179_253_589_32),
        (1.0, 0.235_914_358_507_178_65, 0.411_996_770_741_478_14),
        (10.0, 7.942_972_083_118_695_6, 8.794_805_214_122_137),
        (100.0, 96.779_732_689_942_58, 98.216_264_677_111_73),
        (1000.0, 995.627_308_889_869_5, 997.640_336_376_328_7),
    ];
    for (r, ln_l1, ln_l2) in table {
        let one = pmean(&ExpSeries, Exponent::Finite(1.0), r).unwrap();
        assert!((one.ln_value - ln_l1).abs() <= 1e-9 * ln_l1.abs().max(1.0), "r = {r}: {}", one.ln_value);
        assert!(one.ln_lower <= ln_l1 + 1e-12 && ln_l1 <= one.ln_upper + 1e-12);
        let two = pmean(&ExpSeries, Exponent::Finite(2.0), r).unwrap();
        assert!((two.ln_value - ln_l2).abs() <= 1e-12 * ln_l2.abs().max(1.0), "r = {r}: {}", two.ln_value);
        let sup = pmean(&ExpSeries, Exponent::Infinity, r).unwrap();
        assert!((sup.ln_value - r).abs() <= 1e-12 * r.max(1.0));
    }
}

#[test]
fn linear_polynomial_means() {
    let f = SparseSeries::new([(0, Complex64::new(1.0, 0.0)), (1, Complex64::new(1.0, 0.0))]);
    for r in [0.01, 0.5, 2.0, 37.0] {
        let sup = pmean(&f, Exponent::Infinity, r).unwrap();
        assert!((sup.value() / (1.0 + r) - 1.0).abs() <= 1e-12);
        let two = pmean(&f, Exponent::Finite(2.0), r).unwrap();
        assert!((two.value() / (1.0 + r * r).sqrt() - 1.0).abs() <= 1e-12);
        // Jensen: the geometric mean is max(1, r), so p = 1 sits above it.
        let one = pmean(&f, Exponent::Finite(1.0), r).unwrap();
        assert!(one.value() >= r.max(1.0) * (1.0 - 1e-12));
    }
}

#[test]
fn monomial_means() {
    for s in [0u64, 1, 5, 40, 300] {
        for r in [0.2, 3.0, 80.0, 900.0] {
            let m = pmean(&SparseSeries::monomial(s), Exponent::Finite(1.5), r).unwrap();
            let want = s as f64 * f64::ln(r) - factorial::ln_factorial(s);
            assert!(m.ln_lower <= want + 1e-9 && want <= m.ln_upper + 1e-9, "s = {s}, r = {r}");
            if want > LN_FLOOR {
                assert!((m.ln_value - want).abs() <= 1e-11 * want.abs().max(1.0), "s = {s}, r = {r}: {} vs {want}", m.ln_value);
            }
        }
    }
}

#[test]
fn heat_kernel_is_a_probability_density() {
    for n in [1u64, 2, 8, 64, 512] {
        let h = heat_kernel_mass(n, None).unwrap();
        assert!((h.mass - 1.0).abs() <= 1e-12, "n = {n}: {}", h.mass);
    }
}
