//! Checks of the hypercyclic mechanism: at every visit index `s ∈ B_n`
//! the shifted derivative `D^s f` is close to the target `q_k` on
//! `|z| = ℓ_k`, and the visits have positive density.

use num_complex::Complex64;
use num_traits::Zero;
use rayon::prelude::*;
use serde::Serialize;

use crate::analysis::pmean;
use crate::construction::SparseCoeffStream;
use crate::enumeration::{gauss_to_c64, PolyFamily, RationalPoly};
use crate::error::{invalid, Result};
use crate::exponent::Exponent;
use crate::logmath::{ln_factorial, Neumaier};
use crate::source::TaylorSource;
use crate::trig;

/// `sup_{|z|=ℓ} |q(z) - D^s f(z)|` with its pieces.
#[derive(Clone, Debug, Serialize)]
pub struct DerivativeError {
    /// Certified upper estimate.
    pub sup_error: f64,
    /// Plain sampled maximum.
    pub estimate: f64,
    /// Bound on the terms beyond `s + truncation`.
    pub tail_bound: f64,
    pub truncation: u64,
}

fn ln_weight(ell: f64, i: u64) -> f64 {
    i as f64 * ell.ln() - ln_factorial(i)
}

/// `(a_{s+i} - c_i) ℓ^i / i!` for `0 ≤ i ≤ I`, where `q = Σ c_i z^i/i!`.
fn error_terms<S: TaylorSource + ?Sized>(source: &S, s: u64, q: &RationalPoly, ell: f64, top: u64) -> Vec<(i64, Complex64)> {
    let mut diff: Vec<Complex64> = vec![Complex64::zero(); top as usize + 1];
    for (j, a) in source.nonzero_in(s, s + top + 1) {
        diff[(j - s) as usize] += a;
    }
    for (i, c) in q.coeffs().iter().enumerate() {
        if (i as u64) <= top {
            diff[i] -= gauss_to_c64(c);
        }
    }
    diff.into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i as i64, c * ln_weight(ell, i as u64).exp()))
        .collect()
}

/// Evaluates `D^s f = Σ_{j≥s} a_j z^{j-s}/(j-s)!` against `q` on `|z| = ℓ`.
///
/// Terms past `i = 16ℓ + 64` are bounded by a geometric series with ratio
/// at most `1/2`. `samples` is a floor on the sampling density.
pub fn derivative_sup_error<S: TaylorSource + ?Sized>(
    source: &S,
    s: u64,
    q: &RationalPoly,
    ell: f64,
    samples: usize,
) -> Result<DerivativeError> {
    if !(ell >= 1.0) || !ell.is_finite() {
        return invalid(format!("radius ℓ must be at least 1, got {ell}"));
    }
    let top = (16.0 * ell).ceil() as u64 + 64;
    if (q.degree() as u64) > top {
        return invalid("target degree exceeds the evaluation window");
    }
    let terms = error_terms(source, s, q, ell, top);
    let i = top + 1;
    let ratio = 2.0 * ell / (i + 1) as f64;
    let b = source.coeff_bound(s + i);
    let tail_bound = if b > 0.0 {
        (b.ln() + ln_weight(ell, i)).exp() / (1.0 - ratio)
    } else {
        0.0
    };
    let oversample = samples.div_ceil(top as usize + 1).max(trig::SUP_OVERSAMPLE);
    let est = trig::sup_norm(&terms, oversample);
    Ok(DerivativeError { sup_error: est.upper + tail_bound, estimate: est.value, tail_bound, truncation: top })
}

/// One certified visit.
#[derive(Clone, Debug, Serialize)]
pub struct VisitReport {
    pub k: u32,
    pub n: u64,
    pub s: u64,
    pub ell: u64,
    pub sup_error: f64,
    pub tolerance: f64,
    /// `2 ℓ^{8ℓ+1}/(8ℓ)!`.
    pub s1_bound: f64,
    /// `ℓ² Σ_{m≥8ℓ} ℓ^m/m! ≤ 2 ℓ^{8ℓ+2}/(8ℓ)!`.
    pub s2_bound: f64,
    pub pass: bool,
    /// Sampled sup of the rest of block `n` after the target window.
    pub s1_measured: f64,
    /// Sampled sup of everything past block `n`, plus the tail bound.
    pub s2_measured: f64,
    /// `a_s..a_{s+d}` equal the target exactly and the next `8ℓ` vanish.
    pub window_exact: bool,
}

/// Verifies the smallest visit `s = min B_n` of the first active block of
/// class `k`. `None` if the class has no addressable active block.
pub fn visit_report(stream: &SparseCoeffStream, k: u32, samples: usize) -> Result<Option<VisitReport>> {
    let Some(n) = stream.first_active(k)? else { return Ok(None) };
    let (pair, _) = stream.class(k)?;
    let visits = stream.b_set(n)?;
    let Some(&s) = visits.first() else { return Ok(None) };
    let q = &pair.poly;
    let ell = pair.ell;
    let d = q.degree() as u64;

    let mut window_exact = true;
    for (i, c) in q.coeffs().iter().enumerate() {
        window_exact &= stream.coeff(s + i as u64)? == *c;
    }
    for j in s + d + 1..=s + d + 8 * ell {
        window_exact &= stream.coeff(j)?.is_zero();
    }

    let err = derivative_sup_error(stream, s, q, ell as f64, samples)?;
    let block_end = (n + 1) * (n + 1);
    let all = error_terms(stream, s, q, ell as f64, err.truncation);
    let split = (block_end - s) as i64;
    let s1: Vec<_> = all.iter().copied().filter(|t| t.0 > d as i64 && t.0 < split).collect();
    let s2: Vec<_> = all.iter().copied().filter(|t| t.0 >= split).collect();
    let s1_measured = trig::sup_norm(&s1, trig::SUP_OVERSAMPLE).upper;
    let s2_measured = trig::sup_norm(&s2, trig::SUP_OVERSAMPLE).upper + err.tail_bound;

    let l = ell as f64;
    let e = 8 * ell;
    let s1_bound = 2.0 * (ln_weight(l, e) + l.ln()).exp();
    let s2_bound = 2.0 * (ln_weight(l, e) + 2.0 * l.ln()).exp();
    let tolerance = 1.0 / l;
    Ok(Some(VisitReport {
        k,
        n,
        s,
        ell,
        sup_error: err.sup_error,
        tolerance,
        s1_bound,
        s2_bound,
        pass: window_exact && err.sup_error <= tolerance,
        s1_measured,
        s2_measured,
        window_exact,
    }))
}

/// Visit reports for classes `1..=k_max`, in `k` order.
pub fn visit_reports(stream: &SparseCoeffStream, k_max: u32, samples: usize) -> Result<Vec<VisitReport>> {
    let reports = (1..=k_max)
        .into_par_iter()
        .map(|k| visit_report(stream, k, samples))
        .collect::<Result<Vec<_>>>()?;
    Ok(reports.into_iter().flatten().collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockVisits {
    pub n: u64,
    pub m: u64,
    pub count: u64,
    /// `#B_n / (2n + 1)`.
    pub fraction: f64,
    /// Guaranteed fraction: `⌈m/2⌉` (Rudin–Shapiro) or `⌊m/4⌋`
    /// (de la Vallée-Poussin) ones over `2n + 1`.
    pub provable: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DensityReport {
    pub k: u32,
    pub horizon: u64,
    pub visits: u64,
    pub density: f64,
    pub blocks: Vec<BlockVisits>,
    pub pass: bool,
}

/// Visit indices `s ≤ N` from active blocks of class `k`, divided by `N`.
pub fn visit_density(stream: &SparseCoeffStream, k: u32, horizon: u64) -> Result<DensityReport> {
    if horizon == 0 {
        return invalid("horizon must be positive");
    }
    let mut blocks = Vec::new();
    let mut visits = 0u64;
    if let Some(first) = stream.first_active(k)? {
        let step = 1u64 << (k + 1);
        let mut n = first;
        while n.checked_mul(n).is_some_and(|sq| sq <= horizon) {
            let spec = stream.block_spec(n)?;
            let b = stream.b_set(n)?;
            let count = b.iter().filter(|&&s| s <= horizon).count() as u64;
            visits += count;
            let m = spec.repeat;
            let ones = match stream.params().family() {
                PolyFamily::RudinShapiro => m.div_ceil(2),
                PolyFamily::ValleePoussin => m / 4,
            };
            let len = (2 * n + 1) as f64;
            blocks.push(BlockVisits { n, m, count: b.len() as u64, fraction: b.len() as f64 / len, provable: ones as f64 / len });
            n += step;
        }
    }
    let pass = blocks.iter().all(|b| b.fraction >= b.provable);
    Ok(DensityReport { k, horizon, visits, density: visits as f64 / horizon as f64, blocks, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    /// `(n, M_{f,p}(n²) n^{2a} e^{-n²})`.
    pub rows: Vec<(u64, f64)>,
    pub min: f64,
}

/// Minimum over `ns` of `M_{f,p}(n²) n^{2a} e^{-n²}`, from the certified
/// lower estimate.
pub fn lower_bound_probe<S: TaylorSource + ?Sized>(source: &S, p: Exponent, a: f64, ns: &[u64]) -> Result<ProbeReport> {
    let rows = ns
        .par_iter()
        .map(|&n| {
            let r = (n * n) as f64;
            let m = pmean(source, p, r)?;
            Ok((n, (m.ln_lower + 2.0 * a * (n as f64).ln() - r).exp()))
        })
        .collect::<Result<Vec<_>>>()?;
    let min = if rows.is_empty() { 0.0 } else { rows.iter().map(|r| r.1).fold(f64::INFINITY, f64::min) };
    Ok(ProbeReport { rows, min })
}

/// `#{1 ≤ j ≤ N : |a_j| ≥ 1} / N` for an arbitrary source, decided in
/// floating point (`|a_j|² ≥ 1 - 4ε`).
pub fn coefficient_h_density<S: TaylorSource + ?Sized>(source: &S, horizon: u64) -> Result<f64> {
    if horizon == 0 {
        return invalid("horizon must be positive");
    }
    const CHUNK: u64 = 1 << 20;
    let mut count = Neumaier::new();
    let mut lo = 1;
    while lo <= horizon {
        let hi = (lo + CHUNK).min(horizon + 1);
        let c = source
            .nonzero_in(lo, hi)
            .iter()
            .filter(|(_, a)| a.norm_sqr() >= 1.0 - 4.0 * f64::EPSILON)
            .count();
        count.add(c as f64);
        lo = hi;
    }
    Ok(count.value() / horizon as f64)
}

/// The same density for the constructed stream, decided exactly.
pub fn exact_h_density(stream: &SparseCoeffStream, horizon: u64) -> Result<f64> {
    if horizon == 0 {
        return invalid("horizon must be positive");
    }
    Ok(stream.count_large_coeffs(horizon)? as f64 / horizon as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::{gauss_int, ConstructionParams, Enumerator};
    use crate::source::{ExpSeries, SparseSeries};

    fn fixture() -> SparseCoeffStream {
        let params = ConstructionParams::standard(Exponent::Infinity, 1.0, 10.0).unwrap();
        let e = Enumerator::with_overrides(vec![(RationalPoly::constant(gauss_int(1)), 1)]).unwrap();
        SparseCoeffStream::new(params, e).unwrap()
    }

    #[test]
    fn monomial_derivative_is_exact() {
        let f = SparseSeries::monomial(500);
        let one = RationalPoly::constant(gauss_int(1));
        let e = derivative_sup_error(&f, 500, &one, 3.0, 64).unwrap();
        assert!(e.sup_error < 1e-14, "{}", e.sup_error);
        let e = derivative_sup_error(&f, 900, &RationalPoly::zero(), 3.0, 64).unwrap();
        assert_eq!(e.sup_error, 0.0);
    }

    #[test]
    fn first_visit_of_fixture() {
        let f = fixture();
        let rep = visit_report(&f, 1, 256).unwrap().unwrap();
        assert_eq!((rep.n, rep.s), (1010, 1010 * 1010));
        assert!(rep.window_exact);
        assert!(rep.pass, "{rep:?}");
        assert!(rep.s1_measured <= rep.s1_bound);
    }

    #[test]
    fn density_of_fixture() {
        let f = fixture();
        assert_eq!(visit_density(&f, 1, 1000).unwrap().density, 0.0);
        let rep = visit_density(&f, 1, 2000 * 2000).unwrap();
        assert!(rep.density > 0.0 && rep.pass);
        for b in &rep.blocks {
            assert!(b.fraction >= (b.m as f64 / 2.0 - 1.0) / (2 * b.n + 1) as f64);
        }
    }

    #[test]
    fn probes() {
        let e = lower_bound_probe(&ExpSeries, Exponent::Infinity, 0.0, &[3, 10]).unwrap();
        assert!((e.min - 1.0).abs() < 1e-10);
        let f = fixture();
        let none = lower_bound_probe(&f, Exponent::Infinity, 0.25, &[20, 30]).unwrap();
        assert_eq!(none.min, 0.0);
        let some = lower_bound_probe(&f, Exponent::Infinity, 0.25, &[1010]).unwrap();
        assert!(some.min > 0.0);
    }

    #[test]
    fn h_density_examples() {
        assert_eq!(coefficient_h_density(&ExpSeries, 5000).unwrap(), 1.0);
        assert_eq!(coefficient_h_density(&SparseSeries::default(), 5000).unwrap(), 0.0);
        let f = fixture();
        let n = 1200 * 1200;
        let exact = exact_h_density(&f, n).unwrap();
        assert!(exact > 0.0);
        assert_eq!(exact, coefficient_h_density(&f, n).unwrap());
    }
}
