use fhc_core::analysis::{lambda_table, lemma_sum_check, loglinear_check, pmean};
use fhc_core::construction::SparseCoeffStream;
use fhc_core::enumeration::{
    alpha, block_class, gauss, gauss_to_c64, ConstructionParams, Enumerator, GaussRational, RationalPoly,
};
use fhc_core::hypercyclicity::{derivative_sup_error, visit_density};
use fhc_core::kernel_polys::{poly_pnorm, rudin_shapiro_poly, vallee_poussin_poly};
use fhc_core::source::SparseSeries;
use fhc_core::Exponent;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;
use statrs::function::gamma::ln_gamma;

fn small_rational() -> impl Strategy<Value = BigRational> {
    (-3i64..=3, 1i64..=3).prop_map(|(n, d)| BigRational::new(BigInt::from(n), BigInt::from(d)))
}

fn gauss_coeff() -> impl Strategy<Value = GaussRational> {
    (small_rational(), small_rational()).prop_map(|(re, im)| gauss(re, im))
}

fn target_poly() -> impl Strategy<Value = RationalPoly> {
    prop::collection::vec(gauss_coeff(), 1..4).prop_map(RationalPoly::new)
}

fn sparse() -> impl Strategy<Value = SparseSeries> {
    prop::collection::vec((0u64..60, -2.0f64..2.0, -2.0f64..2.0), 1..8)
        .prop_map(|t| SparseSeries::new(t.into_iter().map(|(j, re, im)| (j, Complex64::new(re, im)))))
        .prop_filter("nonzero", |s| !s.is_empty())
}

fn exponent() -> impl Strategy<Value = Exponent> {
    prop_oneof![
        Just(Exponent::Infinity),
        Just(Exponent::Finite(1.0)),
        Just(Exponent::Finite(1.5)),
        Just(Exponent::Finite(2.0)),
        Just(Exponent::Finite(3.0)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rudin_shapiro_flat_and_parseval(m in 1usize..2048) {
        let p = rudin_shapiro_poly(m).unwrap();
        let two = poly_pnorm(&p, Exponent::Finite(2.0)).unwrap();
        prop_assert!((two.value * two.value / m as f64 - 1.0).abs() <= 1e-12);
        prop_assert!(poly_pnorm(&p, Exponent::Infinity).unwrap().upper <= 5.0 * (m as f64).sqrt());
        prop_assert!(p.count_ones() >= m.div_ceil(2));
    }

    #[test]
    fn pnorm_monotone_in_p(m in 4usize..400, i in 0usize..4) {
        let ps = [Exponent::Finite(1.0), Exponent::Finite(1.5), Exponent::Finite(2.0), Exponent::Finite(3.0), Exponent::Infinity];
        let q = vallee_poussin_poly(m).unwrap();
        let lo = poly_pnorm(&q, ps[i]).unwrap();
        let hi = poly_pnorm(&q, ps[i + 1]).unwrap();
        prop_assert!(lo.lower <= hi.upper);
        let two = poly_pnorm(&q, Exponent::Finite(2.0)).unwrap();
        prop_assert!((two.value * two.value / q.sum_squares() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn block_class_inverts_generator(k in 1u32..30, j in 1u64..1_000_000) {
        prop_assert_eq!(block_class((1u64 << k) * (2 * j - 1)).unwrap(), k);
    }

    #[test]
    fn spacing_dominates(q in target_poly(), extra in 0u64..3, gamma in 1.0f64..50.0, p in exponent()) {
        prop_assume!(p.value() > 1.0);
        let ell = q.min_ell() + extra;
        let e = Enumerator::with_overrides(vec![(q.clone(), ell)]).unwrap();
        let pair = e.pair(1).unwrap();
        let params = ConstructionParams::standard(p, 1.0, gamma).unwrap();
        let a = alpha(&pair, &params).unwrap() as f64;
        prop_assert!(a >= (2 * q.degree() as u64 + 8 * ell + 1) as f64);
        let power = p.conjugate().value().max(2.0);
        prop_assert!(a >= (gamma * ell as f64).powf(power) * (1.0 - 1e-12));
    }

    #[test]
    fn multiplier_deviation(n in 1u64..3000) {
        let t = lambda_table(n).unwrap();
        prop_assert!(t.max_deviation <= 12.0 / n as f64);
    }

    #[test]
    fn lemma_sum_holds(m in 1u64..400, a in 0.0f64..=1.0) {
        prop_assert!(lemma_sum_check(m, a).unwrap().pass);
    }

    #[test]
    fn loglinear_holds(a in 0.0f64..6.0, x0 in 1e-3f64..1e4, stretch in 1.0001f64..10.0) {
        prop_assert!(loglinear_check(a, x0, x0 * stretch, 400).unwrap().pass);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn means_monotone_in_radius_and_exponent(f in sparse(), r in 0.1f64..200.0, step in 1.01f64..3.0, i in 0usize..4) {
        let ps = [Exponent::Finite(1.0), Exponent::Finite(1.5), Exponent::Finite(2.0), Exponent::Finite(3.0), Exponent::Infinity];
        let a = pmean(&f, ps[i], r).unwrap();
        let b = pmean(&f, ps[i], r * step).unwrap();
        prop_assert!(a.ln_lower <= b.ln_upper + 1e-12);
        let c = pmean(&f, ps[i + 1], r).unwrap();
        prop_assert!(a.ln_lower <= c.ln_upper + 1e-12);
    }

    #[test]
    fn log_convex_in_log_radius(f in sparse(), r in 0.1f64..200.0, step in 1.05f64..3.0, p in exponent()) {
        let m: Vec<_> = [r, r * step, r * step * step].iter().map(|&x| pmean(&f, p, x).unwrap()).collect();
        prop_assert!(2.0 * m[1].ln_lower <= m[0].ln_upper + m[2].ln_upper + 1e-9);
    }

    #[test]
    fn parseval(f in sparse(), r in 0.05f64..300.0) {
        let m = pmean(&f, Exponent::Finite(2.0), r).unwrap();
        let logs: Vec<f64> = f
            .terms()
            .map(|(j, a)| 2.0 * (a.norm().ln() + j as f64 * r.ln() - ln_gamma(j as f64 + 1.0)))
            .collect();
        let max = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let direct = 0.5 * (max + logs.iter().map(|l| (l - max).exp()).sum::<f64>().ln());
        prop_assert!((m.ln_value - direct).abs() <= 1e-10, "{} vs {}", m.ln_value, direct);
    }

    #[test]
    fn derivative_error_is_linear(
        f in sparse(),
        q in target_poly(),
        h in target_poly(),
        s in 0u64..40,
        ell in 1u64..4,
    ) {
        let shifted = SparseSeries::new(
            f.terms().chain(h.coeffs().iter().enumerate().map(|(i, c)| (s + i as u64, gauss_to_c64(c)))),
        );
        let mut sum: Vec<GaussRational> = q.coeffs().to_vec();
        sum.resize(q.coeffs().len().max(h.coeffs().len()), gauss(BigRational::zero(), BigRational::zero()));
        for (i, c) in h.coeffs().iter().enumerate() {
            sum[i] = &sum[i] + c;
        }
        let base = derivative_sup_error(&f, s, &q, ell as f64, 256).unwrap();
        let moved = derivative_sup_error(&shifted, s, &RationalPoly::new(sum), ell as f64, 256).unwrap();
        let scale = 1.0 + base.estimate.max(moved.estimate);
        prop_assert!((base.estimate - moved.estimate).abs() <= 1e-9 * scale);
    }
}

fn stream(q: RationalPoly, ell: u64) -> SparseCoeffStream {
    let params = ConstructionParams::standard(Exponent::Infinity, 1.0, 1.0).unwrap();
    SparseCoeffStream::new(params, Enumerator::with_overrides(vec![(q, ell)]).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gap_property_and_support(q in target_poly(), extra in 0u64..2) {
        let ell = q.min_ell() + extra;
        let f = stream(q, ell);
        let zero = gauss(BigRational::zero(), BigRational::zero());
        for n in f.active_blocks(1, 700).unwrap() {
            let (pair, _) = f.class(f.block_spec(n).unwrap().class.unwrap()).unwrap();
            let (q, ell) = (pair.poly, pair.ell);
            let d = q.degree() as u64;
            let block = f.block(n).unwrap();
            for (j, a) in block.entries() {
                prop_assert!(*j >= n * n && *j < (n + 1) * (n + 1));
                prop_assert!(gauss_to_c64(a).norm() <= *j as f64);
            }
            for s in f.b_set(n).unwrap() {
                for i in 0..=d {
                    let want = q.coeffs().get(i as usize).cloned().unwrap_or_else(|| zero.clone());
                    prop_assert_eq!(f.coeff(s + i).unwrap(), want);
                }
                for i in d + 1..=d + 8 * ell {
                    prop_assert_eq!(f.coeff(s + i).unwrap(), zero.clone());
                }
            }
        }
    }

    #[test]
    fn visit_count_grows_with_horizon(q in target_poly(), n1 in 100u64..600, extra in 1u64..400) {
        let ell = q.min_ell();
        let f = stream(q, ell);
        let a = visit_density(&f, 1, n1 * n1).unwrap();
        let b = visit_density(&f, 1, (n1 + extra) * (n1 + extra)).unwrap();
        prop_assert!(a.visits <= b.visits);
        prop_assert!(a.pass && b.pass);
    }
}
