//! Evaluation of `f` on circles and the numerical lemma checks.
//!
//! Magnitudes are carried as natural logarithms. A value on the circle of
//! radius `r` is written `Σ a_j e^{w_j} e^{ijθ} · e^r` with the log Poisson
//! weights `w_j = j ln r - ln j! - r`, so nothing overflows even where
//! `e^r` is far outside the `f64` range.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, FhcError, Result};
use crate::exponent::Exponent;
use crate::logmath::{ln_factorial_summed, log_poisson_weight, log_sum_exp, Neumaier};
use crate::source::{TaylorSource, Window};
use crate::trig;

/// Default certified tail level, in units of `e^r`.
pub const TAIL_TOLERANCE: f64 = 1e-12;

/// Terms smaller than `e^{-NEAR_CUT}` times the largest one are not sampled;
/// their absolute sum is added to the error bar instead.
const NEAR_CUT: f64 = 40.0;

/// Absolute level, as a logarithm, below which a function counts as zero.
pub const LN_FLOOR: f64 = -700.0;

/// `ln` of the bound `Σ_{i>j} B(i) r^i/i! e^{-r}` on the tail after degree
/// `j`. Requires `j + 1 > r`.
fn ln_tail_after<S: TaylorSource + ?Sized>(source: &S, r: f64, j: u64) -> f64 {
    let i = j + 1;
    let b = source.coeff_bound(i);
    if b <= 0.0 {
        return f64::NEG_INFINITY;
    }
    b.ln() + log_poisson_weight(i, r) - (-(r / i as f64)).ln_1p()
}

/// A certified truncation degree.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TailCertificate {
    pub degree: u64,
    /// `ln` of the bound on `Σ_{j>degree} |a_j| r^j/j! · e^{-r}`.
    pub ln_tail: f64,
}

impl TailCertificate {
    pub fn tail(&self) -> f64 {
        self.ln_tail.exp()
    }
}

/// Smallest `J ≥ ⌊r⌋` whose tail bound is at most `e^{ln_target}`.
fn truncate<S: TaylorSource + ?Sized>(source: &S, r: f64, ln_target: f64) -> Result<TailCertificate> {
    let lo = r.floor() as u64;
    let ok = |j: u64| ln_tail_after(source, r, j) <= ln_target;
    if ok(lo) {
        return Ok(TailCertificate { degree: lo, ln_tail: ln_tail_after(source, r, lo) });
    }
    let mut step = (r.sqrt() as u64).max(8);
    let mut hi = lo + step;
    while !ok(hi) {
        step = step.saturating_mul(2);
        hi = hi.checked_add(step).filter(|h| *h < u64::MAX / 4).ok_or_else(|| {
            FhcError::Precision { wanted: ln_target.exp(), achieved: ln_tail_after(source, r, hi).exp() }
        })?;
    }
    let mut lo = lo;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(TailCertificate { degree: hi, ln_tail: ln_tail_after(source, r, hi) })
}

/// Certified truncation for the bound `|a_j| ≤ j`, at level
/// `TAIL_TOLERANCE`.
pub fn truncation_degree(r: f64) -> Result<TailCertificate> {
    if r.is_nan() || r <= 0.0 {
        return invalid(format!("radius must be positive, got {r}"));
    }
    struct Linear;
    impl TaylorSource for Linear {
        fn nonzero_in(&self, _: u64, _: u64) -> Vec<(u64, Complex64)> {
            Vec::new()
        }
    }
    truncate(&Linear, r, TAIL_TOLERANCE.ln())
}

/// `ln` of the tail bound after degree `j` under `|a_j| ≤ j`.
pub fn ln_linear_tail_bound(r: f64, j: u64) -> f64 {
    let i = j + 1;
    (i as f64).ln() + log_poisson_weight(i, r) - (-(r / i as f64)).ln_1p()
}

/// The Taylor expansion on one circle, scaled by `e^{-log_scale}`.
struct Expansion {
    log_scale: f64,
    near: Vec<(i64, Complex64)>,
    far_mass: f64,
    cert: TailCertificate,
    tail_scaled: f64,
}

fn expand<S: TaylorSource + ?Sized>(source: &S, r: f64, keep_all: bool) -> Result<Expansion> {
    if r.is_nan() || r <= 0.0 || r.is_infinite() {
        return invalid(format!("radius must be positive and finite, got {r}"));
    }
    let mut cert = truncate(source, r, TAIL_TOLERANCE.ln())?;
    let mut terms = source.nonzero_in(0, cert.degree + 1);
    let weight = |(j, a): &(u64, Complex64)| a.norm().ln() + log_poisson_weight(*j, r);
    let mut lead = terms.iter().map(weight).fold(f64::NEG_INFINITY, f64::max);
    // Push the tail well below the largest term so small functions keep
    // their relative accuracy; stop once it is below the f64 range.
    let floor = -r + LN_FLOOR;
    while !(lead - NEAR_CUT >= cert.ln_tail) && cert.ln_tail > floor {
        let target = if lead.is_finite() { lead - NEAR_CUT } else { (2.0 * cert.ln_tail - 50.0).max(floor) };
        let deeper = truncate(source, r, target)?;
        terms.extend(source.nonzero_in(cert.degree + 1, deeper.degree + 1));
        cert = deeper;
        lead = terms.iter().map(weight).fold(lead, f64::max);
    }
    let log_scale = if lead.is_finite() { lead + r } else { r };
    let mut near = Vec::with_capacity(terms.len());
    let mut far = Neumaier::new();
    for t in &terms {
        let w = weight(t) - lead;
        if keep_all || w >= -NEAR_CUT {
            near.push((t.0 as i64, t.1 / t.1.norm() * w.exp()));
        } else {
            far.add(w.exp());
        }
    }
    let tail_scaled = (cert.ln_tail + r - log_scale).exp();
    Ok(Expansion { log_scale, near, far_mass: far.value(), cert, tail_scaled })
}

/// Samples of `f(r e^{iθ_j}) · e^{-log_scale}` at `θ_j = 2πj/N`.
#[derive(Clone, Debug)]
pub struct CircleSamples {
    pub r: f64,
    pub log_scale: f64,
    pub samples: Vec<Complex64>,
    pub truncation: TailCertificate,
}

impl CircleSamples {
    /// The samples of `e^{-r} f(r e^{iθ_j})`.
    pub fn scaled_by_er(&self) -> Vec<Complex64> {
        let s = (self.log_scale - self.r).exp();
        self.samples.iter().map(|z| z * s).collect()
    }
}

/// Evaluates `f` at `N` equally spaced points of the circle `|z| = r`.
///
/// `precision_bits` is 53 (FFT) or 106 (direct compensated summation of
/// every sample).
pub fn eval_circle<S: TaylorSource + ?Sized>(
    source: &S,
    r: f64,
    n: usize,
    precision_bits: u32,
) -> Result<CircleSamples> {
    if n == 0 {
        return invalid("sample count must be positive");
    }
    let e = expand(source, r, true)?;
    let samples = match precision_bits {
        53 => trig::sample(&e.near, n),
        106 => (0..n)
            .map(|l| {
                let mut re = Neumaier::new();
                let mut im = Neumaier::new();
                for &(j, c) in &e.near {
                    let k = j.rem_euclid(n as i64) as f64 * l as f64 % n as f64;
                    let z = c * Complex64::from_polar(1.0, 2.0 * PI * k / n as f64);
                    re.add(z.re);
                    im.add(z.im);
                }
                Complex64::new(re.value(), im.value())
            })
            .collect(),
        bits => {
            return Err(FhcError::Precision { wanted: 2f64.powi(-(bits as i32)), achieved: f64::EPSILON / 2.0 })
        }
    };
    Ok(CircleSamples { r, log_scale: e.log_scale, samples, truncation: e.cert })
}

/// `M_{f,p}(r)` as logarithms with a two-sided error bracket.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct PMean {
    pub r: f64,
    pub ln_value: f64,
    pub ln_lower: f64,
    pub ln_upper: f64,
    /// `ln_value = log_scale + ln(mantissa)`; the split keeps full relative
    /// precision where `ln_value` alone has lost it to magnitude.
    pub log_scale: f64,
    pub mantissa: f64,
    pub truncation: TailCertificate,
    pub samples: usize,
}

impl PMean {
    /// `M_{f,p}(r)`; may overflow to infinity.
    pub fn value(&self) -> f64 {
        self.ln_value.exp()
    }

    /// `M_{f,p}(r) e^{-r}`.
    pub fn scaled(&self) -> f64 {
        (self.ln_value - self.r).exp()
    }

    pub fn relative_error(&self) -> f64 {
        if self.ln_value == f64::NEG_INFINITY {
            return 0.0;
        }
        (self.ln_upper - self.ln_value).exp() - 1.0
    }
}

/// `M_{f,p}(r) = (∫ |f(re^{iθ})|^p dθ/2π)^{1/p}`, or the maximum modulus for
/// `p = ∞`.
pub fn pmean<S: TaylorSource + ?Sized>(source: &S, p: Exponent, r: f64) -> Result<PMean> {
    let e = expand(source, r, false)?;
    let est = trig::lp_norm(&e.near, p);
    let slack = e.far_mass + e.tail_scaled;
    let ln = |x: f64| if x > 0.0 { x.ln() + e.log_scale } else { f64::NEG_INFINITY };
    Ok(PMean {
        r,
        ln_value: ln(est.value),
        ln_lower: ln(est.lower - slack),
        ln_upper: ln(est.upper + slack),
        log_scale: e.log_scale,
        mantissa: est.value,
        truncation: e.cert,
        samples: est.samples,
    })
}

/// `ln(Σ |a_j| r^j/j! + tail)`, the triangle-inequality bound on `M_f(r)`.
pub fn ln_triangle_bound<S: TaylorSource + ?Sized>(source: &S, r: f64) -> f64 {
    match expand(source, r, true) {
        Ok(e) => {
            let mut acc: Neumaier = e.near.iter().map(|t| t.1.norm()).collect();
            acc.add(e.tail_scaled);
            let v = acc.value();
            if v > 0.0 {
                v.ln() + e.log_scale
            } else {
                f64::NEG_INFINITY
            }
        }
        Err(_) => f64::INFINITY,
    }
}

/// Radii `m²` for `m_lo ≤ m ≤ m_hi`, plus 8 geometric points inside each
/// `(m², (m+1)²)`.
pub fn radius_grid_between(m_lo: u64, m_hi: u64) -> Vec<f64> {
    let mut out = Vec::new();
    for m in m_lo.max(1)..=m_hi {
        let r0 = (m * m) as f64;
        out.push(r0);
        if m < m_hi {
            let ratio = ((m + 1) * (m + 1)) as f64 / r0;
            out.extend((1..=8).map(|i| r0 * ratio.powf(i as f64 / 9.0)));
        }
    }
    out
}

/// The default grid: all squares `m² ≤ r_max` with their interior points.
pub fn radius_grid(r_max: f64) -> Vec<f64> {
    radius_grid_between(1, r_max.max(1.0).sqrt().floor() as u64)
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub r: f64,
    pub ln_m: f64,
    pub ln_m_upper: f64,
    /// `M_{f,p}(r) r^a e^{-r}`.
    pub ratio: f64,
    pub ratio_upper: f64,
    pub truncation_degree: u64,
    /// Certified tail, in units of `e^r`.
    pub tail_bound: f64,
}

/// `M_{f,p}` over a radius grid, scaled by the target growth `e^r r^{-a}`.
#[derive(Clone, Debug, Serialize)]
pub struct GrowthReport {
    pub p: Exponent,
    pub a: f64,
    pub rows: Vec<GrowthRow>,
    pub max_ratio: f64,
    pub max_ratio_upper: f64,
    pub argmax_r: f64,
}

pub fn growth_report<S: TaylorSource + ?Sized>(
    source: &S,
    p: Exponent,
    a: f64,
    radii: &[f64],
) -> Result<GrowthReport> {
    let rows = radii
        .par_iter()
        .map(|&r| {
            let m = pmean(source, p, r)?;
            let scale = a * r.ln() - r;
            Ok(GrowthRow {
                r,
                ln_m: m.ln_value,
                ln_m_upper: m.ln_upper,
                ratio: (m.ln_value + scale).exp(),
                ratio_upper: (m.ln_upper + scale).exp(),
                truncation_degree: m.truncation.degree,
                tail_bound: m.truncation.tail(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut max_ratio = 0.0f64;
    let mut max_ratio_upper = 0.0f64;
    let mut argmax_r = rows.first().map_or(0.0, |row| row.r);
    for row in &rows {
        if row.ratio > max_ratio {
            max_ratio = row.ratio;
            argmax_r = row.r;
        }
        max_ratio_upper = max_ratio_upper.max(row.ratio_upper);
    }
    Ok(GrowthReport { p, a, rows, max_ratio, max_ratio_upper, argmax_r })
}

impl GrowthReport {
    /// `r,M,ratio,J,tail_bound`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,M,ratio,J,tail_bound\n");
        for row in &self.rows {
            out.push_str(&format!(
                "{},{},{:.9e},{},{:.3e}\n",
                row.r,
                crate::logmath::format_ln(row.ln_m),
                row.ratio,
                row.truncation_degree,
                row.tail_bound
            ));
        }
        out
    }

    /// JSON with a caller-supplied metadata object.
    pub fn to_json(&self, metadata: &serde_json::Value) -> Result<String> {
        let doc = serde_json::json!({ "metadata": metadata, "report": self });
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Largest excess of `ln M` over the chord of its neighbours in
    /// `ln r`; positive values violate log-convexity.
    pub fn convexity_defect(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .rows
            .iter()
            .filter(|row| row.ln_m.is_finite())
            .map(|row| (row.r.ln(), row.ln_m))
            .collect();
        pts.windows(3)
            .map(|w| {
                let (x0, y0) = w[0];
                let (x1, y1) = w[1];
                let (x2, y2) = w[2];
                let t = (x1 - x0) / (x2 - x0);
                y1 - (y0 + t * (y2 - y0))
            })
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Heat-kernel multipliers for one block size.
#[derive(Clone, Debug, Serialize)]
pub struct MultiplierTable {
    pub n: u64,
    /// `λ_{n,k}`, `0 ≤ k ≤ 2n`.
    pub inner: Vec<f64>,
    /// `λ′_{n,k}`, `1 ≤ k ≤ 2n+1` (index `k-1`).
    pub outer: Vec<f64>,
    /// `e^{-k²/2n²}`, `0 ≤ k ≤ 2n`.
    pub gaussian: Vec<f64>,
    pub deviation: Vec<f64>,
    pub max_deviation: f64,
    pub bound: f64,
    pub pass: bool,
}

/// `λ_{n,k} = Π_{i≤k} n²/(n²+i)` and `λ′_{n,k} = Π_{i<k} ((n+1)²-i)/(n+1)²`
/// against the Gaussian `e^{-k²/2n²}`.
pub fn lambda_table(n: u64) -> Result<MultiplierTable> {
    if n == 0 {
        return invalid("lambda_table needs n ≥ 1");
    }
    let n2 = (n * n) as f64;
    let np2 = ((n + 1) * (n + 1)) as f64;
    let mut inner = Vec::with_capacity(2 * n as usize + 1);
    let mut log = Neumaier::new();
    inner.push(1.0);
    for i in 1..=2 * n {
        log.add(-(i as f64 / n2).ln_1p());
        inner.push(log.value().exp());
    }
    let mut outer = Vec::with_capacity(2 * n as usize + 1);
    let mut log = Neumaier::new();
    for k in 1..=2 * n + 1 {
        if k > 1 {
            log.add((-((k - 1) as f64) / np2).ln_1p());
        }
        outer.push(log.value().exp());
    }
    let gaussian: Vec<f64> = (0..=2 * n).map(|k| (-((k * k) as f64) / (2.0 * n2)).exp()).collect();
    let deviation: Vec<f64> = inner.iter().zip(&gaussian).map(|(l, g)| (l - g).abs()).collect();
    let max_deviation = deviation.iter().copied().fold(0.0, f64::max);
    let bound = 12.0 / n as f64;
    let shape_ok = inner[0] == 1.0
        && outer[0] == 1.0
        && inner.windows(2).all(|w| w[1] < w[0])
        && outer.windows(2).all(|w| w[1] < w[0])
        && inner.iter().chain(&outer).all(|&l| l > 0.0 && l <= 1.0);
    Ok(MultiplierTable {
        n,
        inner,
        outer,
        gaussian,
        deviation,
        max_deviation,
        bound,
        pass: shape_ok && max_deviation <= bound,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatKernelReport {
    pub n: u64,
    pub samples: usize,
    /// `∫ g dθ/2π` by the periodic trapezoid rule.
    pub mass: f64,
    pub g_at_zero: f64,
    /// `min ln g` over the grid; finite means strictly positive.
    pub min_ln_g: f64,
    pub pass: bool,
}

/// `ln g(θ)` for `g(θ) = Σ_ℓ √(2π) n e^{-n²(θ-2πℓ)²/2}`.
fn ln_heat_kernel(n: u64, theta: f64) -> f64 {
    let nf = n as f64;
    // Terms with |ℓ| > 2 are below e^{-18 n²} relative to the central one.
    let exps = (-3i64..=3).map(|l| {
        let x = theta - 2.0 * PI * l as f64;
        -nf * nf * x * x / 2.0
    });
    (2.0 * PI).sqrt().ln() + nf.ln() + log_sum_exp(exps)
}

/// Mass and positivity of the periodized Gaussian on an `N`-point grid
/// (`N = 16n + 64` when `samples` is `None`).
pub fn heat_kernel_mass(n: u64, samples: Option<usize>) -> Result<HeatKernelReport> {
    if n == 0 {
        return invalid("heat kernel needs n ≥ 1");
    }
    let big_n = samples.unwrap_or(16 * n as usize + 64);
    if big_n == 0 {
        return invalid("sample count must be positive");
    }
    let lns: Vec<f64> = (0..big_n)
        .map(|j| {
            let theta = 2.0 * PI * j as f64 / big_n as f64;
            // Centre the argument in (-π, π].
            ln_heat_kernel(n, if theta > PI { theta - 2.0 * PI } else { theta })
        })
        .collect();
    let mass = lns.iter().map(|l| l.exp()).collect::<Neumaier>().value() / big_n as f64;
    let min_ln_g = lns.iter().copied().fold(f64::INFINITY, f64::min);
    let g_at_zero = lns[0].exp();
    Ok(HeatKernelReport {
        n,
        samples: big_n,
        mass,
        g_at_zero,
        min_ln_g,
        pass: min_ln_g.is_finite() && (mass - 1.0).abs() <= 1e-10,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaSumReport {
    pub m: u64,
    pub a: f64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub ln_remainder: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// `Σ_{n≥1} e^{n²} n^{-2a} (m²/n²)^{n²}` against `10 e^{m²} m^{-2a}`.
pub fn lemma_sum_check(m: u64, a: f64) -> Result<LemmaSumReport> {
    if m == 0 || !(0.0..=1.0).contains(&a) {
        return invalid(format!("lemma_sum_check needs m ≥ 1 and a ∈ [0,1], got m={m}, a={a}"));
    }
    let lm = (m as f64).ln();
    let ln_term = |n: u64| {
        let nf = n as f64;
        let ln_n = nf.ln();
        nf * nf * (1.0 + 2.0 * (lm - ln_n)) - 2.0 * a * ln_n
    };
    let top = m + 50;
    let mut logs: Vec<f64> = (1..=top).map(ln_term).collect();
    // Past n = m the log-terms are concave in n, so successive ratios
    // decrease and a geometric majorant bounds the remainder.
    let rho = (ln_term(top + 2) - ln_term(top + 1)).exp();
    let ln_remainder = ln_term(top + 1) - (-rho).ln_1p();
    logs.push(ln_remainder);
    let ln_lhs = log_sum_exp(logs);
    let ln_rhs = 10f64.ln() + (m * m) as f64 - 2.0 * a * lm;
    let ratio = (ln_lhs - ln_rhs).exp();
    Ok(LemmaSumReport { m, a, ln_lhs, ln_rhs, ln_remainder, ratio, pass: ratio <= 1.0 })
}

#[derive(Clone, Debug, Serialize)]
pub struct LoglinearReport {
    pub a: f64,
    pub x0: f64,
    pub x1: f64,
    pub max_u: f64,
    pub argmax: f64,
    pub bound: f64,
    pub pass: bool,
}

/// Maximizes `u(x) = a ln x - (cx + d)`, the linear part fitted so that
/// `u(x0) = u(x1) = 0`, and compares with `a(x1/x0 - 1)²/8`.
pub fn loglinear_check(a: f64, x0: f64, x1: f64, grid: usize) -> Result<LoglinearReport> {
    if !(x0 > 0.0 && x0 < x1) {
        return invalid(format!("loglinear_check needs 0 < x0 < x1, got {x0}, {x1}"));
    }
    if a.is_nan() || a < 0.0 {
        return invalid(format!("loglinear_check needs a ≥ 0, got {a}"));
    }
    let c = a * (x1 / x0).ln() / (x1 - x0);
    // u(x) = a ln(x/x0) - c (x - x0) vanishes at both ends.
    let u = |x: f64| a * (x / x0).ln() - c * (x - x0);
    let mut best = (0.0f64, x0);
    let steps = grid.max(2);
    for i in 0..=steps {
        let x = x0 + (x1 - x0) * i as f64 / steps as f64;
        let v = u(x);
        if v > best.0 {
            best = (v, x);
        }
    }
    if c > 0.0 {
        let xs = a / c;
        if xs > x0 && xs < x1 && u(xs) > best.0 {
            best = (u(xs), xs);
        }
    }
    let bound = a * (x1 / x0 - 1.0).powi(2) / 8.0;
    Ok(LoglinearReport { a, x0, x1, max_u: best.0, argmax: best.1, bound, pass: best.0 <= bound * (1.0 + 1e-12) + 1e-15 })
}

#[derive(Clone, Debug, Serialize)]
pub struct StirlingRow {
    /// `"square"` for `(n²)^{n²}/(n²)! ≤ e^{n²}/(√(2π) n)`, `"octuple"` for
    /// `x^{8x}/(8x)! ≤ 1/(4x³)`.
    pub kind: &'static str,
    pub arg: u64,
    pub ln_lhs: f64,
    pub ln_rhs: f64,
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StirlingReport {
    pub rows: Vec<StirlingRow>,
    pub pass: bool,
}

fn ln_fact_exact(j: u64) -> f64 {
    let (hi, lo) = ln_factorial_summed(j);
    hi + lo
}

/// Both Stirling-type inequalities, with `ln j!` summed term by term.
pub fn stirling_checks(
    ns: impl IntoIterator<Item = u64>,
    xs: impl IntoIterator<Item = u64>,
) -> Result<StirlingReport> {
    let mut rows = Vec::new();
    for n in ns {
        if n == 0 {
            return invalid("square check needs n ≥ 1");
        }
        let n2 = n * n;
        let ln_lhs = n2 as f64 * (n2 as f64).ln() - ln_fact_exact(n2);
        let ln_rhs = n2 as f64 - (2.0 * PI).sqrt().ln() - (n as f64).ln();
        rows.push(StirlingRow { kind: "square", arg: n, ln_lhs, ln_rhs, margin: ln_rhs - ln_lhs, pass: ln_lhs <= ln_rhs });
    }
    for x in xs {
        if x < 2 {
            return invalid("octuple check needs x ≥ 2");
        }
        let xf = x as f64;
        let ln_lhs = 8.0 * xf * xf.ln() - ln_fact_exact(8 * x);
        let ln_rhs = -(4.0f64).ln() - 3.0 * xf.ln();
        rows.push(StirlingRow { kind: "octuple", arg: x, ln_lhs, ln_rhs, margin: ln_rhs - ln_lhs, pass: ln_lhs <= ln_rhs });
    }
    let pass = rows.iter().all(|r| r.pass);
    Ok(StirlingReport { rows, pass })
}

#[derive(Clone, Debug, Serialize)]
pub struct BlockBoundReport {
    pub n: u64,
    /// `B = ‖Σ_k b_{n²+k} e^{ikθ}‖_p` (upper estimate).
    pub b_norm: f64,
    pub ln_m_inner: f64,
    pub ln_m_outer: f64,
    pub ln_bound_inner: f64,
    pub ln_bound_outer: f64,
    /// Measured over guaranteed, from the upper error bars.
    pub ratio_inner: f64,
    pub ratio_outer: f64,
    /// Disagreement between the direct evaluation and the multiplier
    /// identity `|P_n g(n² e^{iθ})| = (n²)^{n²}/(n²)! |Σ λ_{n,k} b_{n²+k} e^{ikθ}|`
    /// (and its outer counterpart).
    pub identity_error: f64,
    pub pass: bool,
}

/// Checks `M_{P_n g,p}(r) ≤ 20 B e^r/√r` at `r = n²` and `r = (n+1)²`.
pub fn block_bound_check<S: TaylorSource + ?Sized>(source: &S, n: u64, p: Exponent) -> Result<BlockBoundReport> {
    if n == 0 {
        return invalid("block_bound_check needs n ≥ 1");
    }
    let lo = n * n;
    let hi = (n + 1) * (n + 1);
    let coeffs = source.nonzero_in(lo, hi);
    if coeffs.is_empty() {
        return Ok(BlockBoundReport {
            n,
            b_norm: 0.0,
            ln_m_inner: f64::NEG_INFINITY,
            ln_m_outer: f64::NEG_INFINITY,
            ln_bound_inner: f64::NEG_INFINITY,
            ln_bound_outer: f64::NEG_INFINITY,
            ratio_inner: 0.0,
            ratio_outer: 0.0,
            identity_error: 0.0,
            pass: true,
        });
    }
    let poly: Vec<(i64, Complex64)> = coeffs.iter().map(|&(j, a)| ((j - lo) as i64, a)).collect();
    let b = trig::lp_norm(&poly, p);
    let window = Window::block(source, n);
    let m_in = pmean(&window, p, lo as f64)?;
    let m_out = pmean(&window, p, hi as f64)?;
    let ln_bound = |r: f64| 20f64.ln() + b.lower.ln() + r - 0.5 * r.ln();
    let ln_bound_inner = ln_bound(lo as f64);
    let ln_bound_outer = ln_bound(hi as f64);

    let table = lambda_table(n)?;
    let inner_poly: Vec<(i64, Complex64)> =
        poly.iter().map(|&(k, a)| (k, a * table.inner[k as usize])).collect();
    let outer_poly: Vec<(i64, Complex64)> = coeffs
        .iter()
        .map(|&(j, a)| {
            let k = hi - j;
            (k as i64, a.conj() * table.outer[k as usize - 1])
        })
        .collect();
    // Compared relative to each mean's own scale: the raw logarithms are of
    // size n² and would lose the digits being checked.
    let rel = |r: u64, q: &[(i64, Complex64)], m: &PMean| {
        let ln_ratio = log_poisson_weight(r, r as f64) - (m.log_scale - m.r) + (trig::lp_norm(q, p).value / m.mantissa).ln();
        ln_ratio.exp_m1().abs()
    };
    let identity_error = rel(lo, &inner_poly, &m_in).max(rel(hi, &outer_poly, &m_out));

    let ratio_inner = (m_in.ln_upper - ln_bound_inner).exp();
    let ratio_outer = (m_out.ln_upper - ln_bound_outer).exp();
    Ok(BlockBoundReport {
        n,
        b_norm: b.upper,
        ln_m_inner: m_in.ln_value,
        ln_m_outer: m_out.ln_value,
        ln_bound_inner,
        ln_bound_outer,
        ratio_inner,
        ratio_outer,
        identity_error,
        pass: ratio_inner <= 1.0 + 1e-9 && ratio_outer <= 1.0 + 1e-9,
    })
}

/// Smallest `b` for which every block `1 ≤ n ≤ n_max` satisfies
/// `M_{P_n g,p}(n²) ≤ b e^{n²} n^{-2a}` and
/// `M_{P_n g,p}((n+1)²) ≤ b e^{(n+1)²} (n+1)^{-2a}`. Requires `a_0 = 0`.
pub fn glue_constant<S: TaylorSource + ?Sized>(source: &S, a: f64, p: Exponent, n_max: u64) -> Result<f64> {
    if !source.nonzero_in(0, 1).is_empty() {
        return invalid("glue hypotheses need P_0 g = 0");
    }
    let per_block = (1..=n_max)
        .into_par_iter()
        .map(|n| {
            if source.nonzero_in(n * n, (n + 1) * (n + 1)).is_empty() {
                return Ok(0.0);
            }
            let window = Window::block(source, n);
            let at = |m: u64| -> Result<f64> {
                let r = (m * m) as f64;
                let mean = pmean(&window, p, r)?;
                Ok((mean.ln_upper - r + 2.0 * a * (m as f64).ln()).exp())
            };
            Ok(at(n)?.max(at(n + 1)?))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(per_block.into_iter().fold(0.0, f64::max))
}

#[derive(Clone, Debug, Serialize)]
pub struct GlueReport {
    pub b: f64,
    pub a: f64,
    /// `(r, M_{g,p}(r) r^a e^{-r} / (10³ b))`.
    pub rows: Vec<(f64, f64)>,
    pub max_ratio: f64,
    pub argmax_r: f64,
    pub pass: bool,
}

/// Checks `M_{g,p}(r) ≤ 10³ b e^r r^{-a}` on the given radii.
pub fn glue_check<S: TaylorSource + ?Sized>(
    b: f64,
    a: f64,
    p: Exponent,
    source: &S,
    radii: &[f64],
) -> Result<GlueReport> {
    if b.is_nan() || b < 0.0 {
        return invalid(format!("block constant must be nonnegative, got {b}"));
    }
    let rows = radii
        .par_iter()
        .map(|&r| {
            let m = pmean(source, p, r)?;
            let ln_scaled = m.ln_upper + a * r.ln() - r;
            let ratio = if ln_scaled == f64::NEG_INFINITY {
                0.0
            } else if b == 0.0 {
                f64::INFINITY
            } else {
                (ln_scaled - (1e3 * b).ln()).exp()
            };
            Ok((r, ratio))
        })
        .collect::<Result<Vec<_>>>()?;
    let (argmax_r, max_ratio) = rows.iter().copied().fold((0.0, 0.0), |acc, row| if row.1 > acc.1 { row } else { acc });
    Ok(GlueReport { b, a, rows, max_ratio, argmax_r, pass: max_ratio <= 1.0 + 1e-9 })
}
