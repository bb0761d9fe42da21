//! The Taylor coefficients `a_j` of `f`, assembled block by block.
//!
//! Block `n` covers indices `n² ≤ j < (n+1)²`. It is empty unless `n` is
//! even, `n ∈ A_k` and `n ≥ 10α_k`; in that case
//! `P̃_n f = z^{n²} · p_m(z^{α_k}) · q̃_k(z)` with `m = ⌊n/α_k⌋`, where `p_m`
//! is the Rudin–Shapiro polynomial (`p ≥ 2`) or the shifted de la
//! Vallée-Poussin kernel (`p < 2` and the `p = 1` mode). Everything here is
//! exact rational arithmetic.

use std::collections::HashMap;
use std::io::Write;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Zero};
use serde::Serialize;

use crate::analysis;
use crate::enumeration::{
    alpha, alpha_p1, block_class, gauss_to_c64, ConstructionParams,
    EnumeratedPair, Enumerator, GaussRational, Mode, PhiSchedule, PolyFamily, RationalPoly,
};
use crate::error::{invalid, FhcError, Result};
use crate::exponent::Exponent;
use crate::kernel_polys::{rudin_shapiro_poly, vallee_poussin_poly};
use crate::source::TaylorSource;

/// Shape of one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BlockSpec {
    pub n: u64,
    /// Class `k` with `n ∈ A_k`; `None` for odd `n` or `n = 0`.
    pub class: Option<u32>,
    pub alpha: Option<u128>,
    /// `m = ⌊n/α_k⌋`, zero for inactive blocks.
    pub repeat: u64,
    pub active: bool,
}

/// A materialized block: exact coefficients, float copies and the visit set.
#[derive(Debug)]
pub struct Block {
    pub spec: BlockSpec,
    entries: Vec<(u64, GaussRational)>,
    approx: Vec<(u64, Complex64)>,
    visits: Vec<u64>,
}

impl Block {
    pub fn entries(&self) -> &[(u64, GaussRational)] {
        &self.entries
    }

    pub fn approx(&self) -> &[(u64, Complex64)] {
        &self.approx
    }

    /// `B_n`.
    pub fn visits(&self) -> &[u64] {
        &self.visits
    }

    fn empty(spec: BlockSpec) -> Self {
        Self { spec, entries: Vec::new(), approx: Vec::new(), visits: Vec::new() }
    }
}

#[derive(Clone, Debug)]
struct ClassInfo {
    pair: EnumeratedPair,
    /// `None` when `α_k` is beyond any addressable index.
    alpha: Option<u128>,
}

/// The coefficient stream of `f`, materialized lazily one block at a time.
///
/// Blocks and class data are cached behind mutexes; a racing first access
/// may compute a block twice, and only one copy is kept.
pub struct SparseCoeffStream {
    params: ConstructionParams,
    enumerator: Arc<Enumerator>,
    only_class: Option<u32>,
    classes: Mutex<HashMap<u32, Arc<ClassInfo>>>,
    blocks: Mutex<HashMap<u64, Arc<Block>>>,
}

impl std::fmt::Debug for SparseCoeffStream {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SparseCoeffStream")
            .field("params", &self.params)
            .field("only_class", &self.only_class)
            .finish()
    }
}

impl SparseCoeffStream {
    pub fn new(params: ConstructionParams, enumerator: Enumerator) -> Result<Self> {
        params.validate()?;
        Ok(Self {
            params,
            enumerator: Arc::new(enumerator),
            only_class: None,
            classes: Mutex::new(HashMap::new()),
            blocks: Mutex::new(HashMap::new()),
        })
    }

    /// A stream containing only class `k`, with a prescribed `α`.
    fn single_class(params: ConstructionParams, pair: EnumeratedPair, k: u32, alpha: u128) -> Self {
        let mut classes = HashMap::new();
        classes.insert(k, Arc::new(ClassInfo { pair, alpha: Some(alpha) }));
        Self {
            params,
            enumerator: Arc::new(Enumerator::new()),
            only_class: Some(k),
            classes: Mutex::new(classes),
            blocks: Mutex::new(HashMap::new()),
        }
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    pub fn enumerator(&self) -> &Enumerator {
        &self.enumerator
    }

    /// `f_k = Σ_{n ∈ A_k} P_n f`.
    pub fn class_view(&self, k: u32) -> Result<SparseCoeffStream> {
        let info = self.class_info(k)?;
        let classes = HashMap::from([(k, info)]);
        Ok(Self {
            params: self.params,
            enumerator: self.enumerator.clone(),
            only_class: Some(k),
            classes: Mutex::new(classes),
            blocks: Mutex::new(HashMap::new()),
        })
    }

    fn class_info(&self, k: u32) -> Result<Arc<ClassInfo>> {
        if let Some(info) = self.classes.lock().expect("class cache poisoned").get(&k) {
            return Ok(info.clone());
        }
        if self.only_class.is_some_and(|only| only != k) {
            return Ok(Arc::new(ClassInfo {
                pair: EnumeratedPair { index: k as u64, poly: RationalPoly::zero(), ell: 1 },
                alpha: None,
            }));
        }
        let pair = self.enumerator.pair(k as u64)?;
        let alpha = match self.params.mode {
            Mode::Standard => match alpha(&pair, &self.params) {
                Ok(a) => Some(a),
                Err(FhcError::ResourceExhausted(_)) => None,
                Err(e) => return Err(e),
            },
            Mode::P1(phi) => Some(p1_schedule(k, &pair, phi, &self.params)?.alpha),
        };
        let info = Arc::new(ClassInfo { pair, alpha });
        let mut cache = self.classes.lock().expect("class cache poisoned");
        Ok(cache.entry(k).or_insert(info).clone())
    }

    /// `(q_k, ℓ_k)` together with `α_k` (`None` if unaddressable).
    pub fn class(&self, k: u32) -> Result<(EnumeratedPair, Option<u128>)> {
        let info = self.class_info(k)?;
        Ok((info.pair.clone(), info.alpha))
    }

    pub fn block_spec(&self, n: u64) -> Result<BlockSpec> {
        if n == 0 || n % 2 == 1 {
            return Ok(BlockSpec { n, class: None, alpha: None, repeat: 0, active: false });
        }
        let k = block_class(n)?;
        let info = self.class_info(k)?;
        let (active, repeat) = match info.alpha {
            Some(a) if n as u128 >= 10 * a => (true, (n as u128 / a) as u64),
            _ => (false, 0),
        };
        Ok(BlockSpec { n, class: Some(k), alpha: info.alpha, repeat, active })
    }

    /// The materialized block `n`.
    pub fn block(&self, n: u64) -> Result<Arc<Block>> {
        if let Some(b) = self.blocks.lock().expect("block cache poisoned").get(&n) {
            return Ok(b.clone());
        }
        let spec = self.block_spec(n)?;
        let block = if spec.active {
            let info = self.class_info(spec.class.expect("active block has a class"))?;
            build_block(spec, &info.pair, self.params.family())?
        } else {
            Block::empty(spec)
        };
        let mut cache = self.blocks.lock().expect("block cache poisoned");
        Ok(cache.entry(n).or_insert(Arc::new(block)).clone())
    }

    /// Nonzero coefficients of `P̃_n f` as `(j, a_j)`.
    pub fn block_poly(&self, n: u64) -> Result<Vec<(u64, GaussRational)>> {
        Ok(self.block(n)?.entries.clone())
    }

    /// `a_j`.
    pub fn coeff(&self, j: u64) -> Result<GaussRational> {
        let block = self.block(j.isqrt())?;
        Ok(block
            .entries
            .binary_search_by_key(&j, |e| e.0)
            .map(|i| block.entries[i].1.clone())
            .unwrap_or_else(|_| GaussRational::zero()))
    }

    /// `B_n`: the indices `s = n² + α_k i` where the block polynomial has
    /// coefficient exactly `+1`. Empty for inactive blocks.
    pub fn b_set(&self, n: u64) -> Result<Vec<u64>> {
        Ok(self.block(n)?.visits.clone())
    }

    /// Active blocks with `lo ≤ n < hi`.
    pub fn active_blocks(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for n in lo.max(2)..hi {
            if n % 2 == 0 && self.block_spec(n)?.active {
                out.push(n);
            }
        }
        Ok(out)
    }

    /// Active blocks with `lo ≤ n < hi` that carry a nonzero target.
    pub fn nonzero_blocks(&self, lo: u64, hi: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for n in self.active_blocks(lo, hi)? {
            if !self.block(n)?.entries.is_empty() {
                out.push(n);
            }
        }
        Ok(out)
    }

    /// Smallest active block of class `k`.
    pub fn first_active(&self, k: u32) -> Result<Option<u64>> {
        let info = self.class_info(k)?;
        let Some(a) = info.alpha else { return Ok(None) };
        let step = 1u128 << (k + 1);
        let base = 1u128 << k;
        // n = 2^k (2j - 1) ≥ 10α.
        let need = 10 * a;
        let j = if need <= base { 0 } else { (need - base).div_ceil(step) };
        let n = base + j * step;
        Ok(u64::try_from(n).ok())
    }

    /// Number of `j` in `1..=horizon` with `|a_j| ≥ 1`, decided exactly.
    pub fn count_large_coeffs(&self, horizon: u64) -> Result<u64> {
        let one = BigRational::one();
        let mut count = 0;
        for n in 1..=horizon.isqrt() {
            let block = self.block(n)?;
            count += block
                .entries
                .iter()
                .filter(|(j, a)| (1..=horizon).contains(j) && modulus_sq(a) >= one)
                .count() as u64;
        }
        Ok(count)
    }

    /// CSV dump of `a_j` for `lo ≤ j < hi`:
    /// `j,numerator,denominator,imag_numerator,imag_denominator`.
    pub fn write_csv<W: Write>(&self, lo: u64, hi: u64, nonzero_only: bool, mut out: W) -> Result<()> {
        writeln!(out, "j,numerator,denominator,imag_numerator,imag_denominator")?;
        if lo >= hi {
            return Ok(());
        }
        let mut n_cur = u64::MAX;
        let mut block = None;
        for j in lo..hi {
            let n = j.isqrt();
            if n != n_cur {
                block = Some(self.block(n)?);
                n_cur = n;
            }
            let b = block.as_ref().expect("block loaded");
            let value = b
                .entries
                .binary_search_by_key(&j, |e| e.0)
                .ok()
                .map(|i| &b.entries[i].1);
            match value {
                Some(a) => writeln!(
                    out,
                    "{j},{},{},{},{}",
                    a.re.numer(),
                    a.re.denom(),
                    a.im.numer(),
                    a.im.denom()
                )?,
                None if !nonzero_only => writeln!(out, "{j},0,1,0,1")?,
                None => {}
            }
        }
        Ok(())
    }
}

fn modulus_sq(a: &GaussRational) -> BigRational {
    &a.re * &a.re + &a.im * &a.im
}

fn to_big(r: Rational64) -> BigRational {
    BigRational::new((*r.numer()).into(), (*r.denom()).into())
}

fn build_block(spec: BlockSpec, pair: &EnumeratedPair, family: PolyFamily) -> Result<Block> {
    let n = spec.n;
    let alpha = spec.alpha.expect("active block has alpha") as u64;
    let m = spec.repeat as usize;
    let kernel = match family {
        PolyFamily::RudinShapiro => rudin_shapiro_poly(m)?,
        PolyFamily::ValleePoussin => vallee_poussin_poly(m)?,
    };
    let start = n * n;
    let top = start + alpha * (m as u64 - 1) + pair.poly.degree() as u64;
    if top > (n + 1) * (n + 1) - 1 {
        return Err(FhcError::InvariantViolation(format!(
            "block {n}: top degree {top} leaves the window ending at {}",
            (n + 1) * (n + 1) - 1
        )));
    }
    let mut entries = Vec::new();
    let mut visits = Vec::new();
    for (i, b) in kernel.nonzero() {
        let base = start + alpha * i as u64;
        if b.is_one() {
            visits.push(base);
        }
        let b = to_big(b);
        for (t, q) in pair.poly.coeffs().iter().enumerate() {
            if q.is_zero() {
                continue;
            }
            let value = GaussRational::new(&b * &q.re, &b * &q.im);
            entries.push((base + t as u64, value));
        }
    }
    // α_k > d_k keeps the shifted copies of q̃_k disjoint.
    entries.sort_by_key(|e| e.0);
    if entries.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(FhcError::InvariantViolation(format!("block {n}: overlapping copies")));
    }
    let approx = entries.iter().map(|(j, a)| (*j, gauss_to_c64(a))).collect();
    Ok(Block { spec, entries, approx, visits })
}

impl TaylorSource for SparseCoeffStream {
    /// # Panics
    /// If class data cannot be computed (a `p = 1` schedule that exhausts its
    /// budget). Call [`SparseCoeffStream::class`] first to surface the error.
    fn nonzero_in(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)> {
        if lo >= hi {
            return Vec::new();
        }
        let mut out = Vec::new();
        for n in lo.isqrt()..=(hi - 1).isqrt() {
            if n == 0 || n % 2 == 1 {
                continue;
            }
            let block = self.block(n).unwrap_or_else(|e| panic!("block {n}: {e}"));
            out.extend(block.approx.iter().filter(|(j, _)| (lo..hi).contains(j)).copied());
        }
        out
    }
}

/// Result of fitting the `p = 1` spacing for one class.
#[derive(Clone, Debug, Serialize)]
pub struct P1Fit {
    pub k: u32,
    pub extra: u128,
    pub alpha: u128,
    pub radii_checked: usize,
    /// Largest `M_{f_k,1}(r) / (2^{-k} φ(r) e^r r^{-1/2})` on the grid.
    pub max_ratio: f64,
}

/// Smallest power of two `E` such that, with `α_k = 1 + max(2d + 8ℓ, E)`,
/// the class piece satisfies `M_{f_k,1}(r) ≤ 2^{-k} φ(r) e^r r^{-1/2}` on the
/// schedule's radius grid.
pub fn p1_schedule(
    k: u32,
    pair: &EnumeratedPair,
    phi: PhiSchedule,
    params: &ConstructionParams,
) -> Result<P1Fit> {
    if k == 0 {
        return invalid("class index starts at 1");
    }
    let grid = analysis::radius_grid(phi.grid_r_max);
    if pair.poly.is_zero() {
        return Ok(P1Fit { k, extra: 1, alpha: alpha_p1(pair, 1), radii_checked: 0, max_ratio: 0.0 });
    }
    let mut last_ratio = f64::INFINITY;
    for doubling in 0..=phi.max_doublings {
        let extra = 1u128 << doubling;
        let a = alpha_p1(pair, extra);
        let piece = SparseCoeffStream::single_class(*params, pair.clone(), k, a);
        let ratio = p1_max_ratio(&piece, k, phi, &grid)?;
        if ratio <= 1.0 {
            return Ok(P1Fit { k, extra, alpha: a, radii_checked: grid.len(), max_ratio: ratio });
        }
        last_ratio = ratio;
    }
    Err(FhcError::ResourceExhausted(format!(
        "p = 1 schedule for class {k}: bound still violated (ratio {last_ratio:.3}) after {} doublings",
        phi.max_doublings
    )))
}

fn p1_max_ratio(piece: &SparseCoeffStream, k: u32, phi: PhiSchedule, grid: &[f64]) -> Result<f64> {
    let mut worst = 0.0f64;
    for &r in grid {
        let ln_bound = -(k as f64) * std::f64::consts::LN_2 + phi.phi(r).ln() + r - 0.5 * r.ln();
        // Triangle inequality first; only radii near a block need quadrature.
        let cheap = analysis::ln_triangle_bound(piece, r);
        let ln_m = if cheap <= ln_bound - 5.0 {
            cheap
        } else {
            analysis::pmean(piece, Exponent::Finite(1.0), r)?.ln_upper
        };
        worst = worst.max((ln_m - ln_bound).exp());
    }
    Ok(worst)
}
