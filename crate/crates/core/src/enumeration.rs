//! The dense sequence of target polynomials `(q_k, ℓ_k)`, the partition of
//! the even integers into the classes `A_k = {2^k(2j − 1)}`, and the block
//! spacing `α_k`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Mutex;

use num_bigint::BigInt;
use num_complex::{Complex, Complex64};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{invalid, FhcError, Result};
use crate::exponent::Exponent;

/// A complex number with rational real and imaginary parts.
pub type GaussRational = Complex<BigRational>;

pub fn gauss(re: BigRational, im: BigRational) -> GaussRational {
    Complex::new(re, im)
}

pub fn gauss_int(re: i64) -> GaussRational {
    Complex::new(BigRational::from_integer(re.into()), BigRational::zero())
}

pub fn gauss_to_c64(z: &GaussRational) -> Complex64 {
    Complex64::new(
        z.re.to_f64().unwrap_or(f64::NAN),
        z.im.to_f64().unwrap_or(f64::NAN),
    )
}

/// `|re| + |im|`, an exact rational upper bound for `|z|`.
pub fn gauss_l1(z: &GaussRational) -> BigRational {
    z.re.abs() + z.im.abs()
}

/// `|z|² ≤ bound²`, decided exactly.
pub fn gauss_abs_le(z: &GaussRational, bound: &BigRational) -> bool {
    &z.re * &z.re + &z.im * &z.im <= bound * bound
}

/// A polynomial `q(z) = Σ q_j z^j / j!` given by its Taylor coefficients.
///
/// `q̃(z) = Σ q_j z^j` shares the coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RationalPoly {
    taylor: Vec<GaussRational>,
}

impl RationalPoly {
    /// Trailing zero coefficients are dropped; the zero polynomial keeps a
    /// single zero coefficient and has degree 0.
    pub fn new(mut taylor: Vec<GaussRational>) -> Self {
        while taylor.len() > 1 && taylor.last().is_some_and(|c| c.is_zero()) {
            taylor.pop();
        }
        if taylor.is_empty() {
            taylor.push(GaussRational::zero());
        }
        Self { taylor }
    }

    pub fn zero() -> Self {
        Self::new(Vec::new())
    }

    pub fn constant(c: GaussRational) -> Self {
        Self::new(vec![c])
    }

    pub fn degree(&self) -> usize {
        self.taylor.len() - 1
    }

    pub fn coeffs(&self) -> &[GaussRational] {
        &self.taylor
    }

    pub fn is_zero(&self) -> bool {
        self.taylor.len() == 1 && self.taylor[0].is_zero()
    }

    /// Exact `Σ (|Re q_j| + |Im q_j|)`. Equals `‖q̃‖_{ℓ¹}` for real
    /// coefficients and dominates it in general.
    pub fn l1_bound(&self) -> BigRational {
        self.taylor.iter().map(gauss_l1).fold(BigRational::zero(), |a, b| a + b)
    }

    /// `‖q̃‖_{ℓ¹} = Σ |q_j|` in floating point.
    pub fn l1_norm(&self) -> f64 {
        self.taylor.iter().map(|c| gauss_to_c64(c).norm()).sum()
    }

    /// Smallest admissible `ℓ`: `max(1, ⌈l1_bound⌉)`.
    pub fn min_ell(&self) -> u64 {
        let ceil = self.l1_bound().ceil().to_integer();
        ceil.to_u64().unwrap_or(u64::MAX).max(1)
    }

    /// Coefficients of `q̃` as `(exponent, value)` pairs, zeros skipped.
    pub fn tilde_terms(&self) -> Vec<(i64, Complex64)> {
        self.taylor
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| (j as i64, gauss_to_c64(c)))
            .collect()
    }

    /// Largest numerator or denominator magnitude over all parts.
    pub fn height(&self) -> u64 {
        self.taylor.iter().map(gauss_height).max().unwrap_or(1)
    }
}

impl fmt::Display for RationalPoly {
    /// The override-file syntax: `degree, c_0, …, c_d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.degree())?;
        for c in &self.taylor {
            write!(f, ", {}", format_gauss(c))?;
        }
        Ok(())
    }
}

pub fn format_gauss(c: &GaussRational) -> String {
    if c.im.is_zero() {
        return c.re.to_string();
    }
    let sign = if c.im.is_negative() { '-' } else { '+' };
    if c.re.is_zero() {
        return format!("{}{}i", if c.im.is_negative() { "-" } else { "" }, c.im.abs());
    }
    format!("{}{sign}{}i", c.re, c.im.abs())
}

/// `(k, q_k, ℓ_k)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnumeratedPair {
    pub index: u64,
    pub poly: RationalPoly,
    pub ell: u64,
}

fn rational_height(q: &BigRational) -> u64 {
    let num = q.numer().abs().to_u64().unwrap_or(u64::MAX);
    let den = q.denom().to_u64().unwrap_or(u64::MAX);
    num.max(den)
}

fn gauss_height(z: &GaussRational) -> u64 {
    rational_height(&z.re).max(rational_height(&z.im))
}

/// Canonical order on rationals: height, then denominator, then |numerator|,
/// positive before negative. Zero comes first.
fn rational_key(q: &BigRational) -> (u64, u64, u64, bool) {
    (
        rational_height(q),
        q.denom().to_u64().unwrap_or(u64::MAX),
        q.numer().abs().to_u64().unwrap_or(u64::MAX),
        q.is_negative(),
    )
}

fn gauss_cmp(a: &GaussRational, b: &GaussRational) -> Ordering {
    rational_key(&a.re)
        .cmp(&rational_key(&b.re))
        .then_with(|| rational_key(&a.im).cmp(&rational_key(&b.im)))
}

/// All Gaussian rationals whose parts have height at most `h`, sorted.
fn values_up_to(h: u64) -> Vec<GaussRational> {
    let h = h as i64;
    let mut reals = vec![BigRational::zero()];
    for den in 1..=h {
        for num in 1..=h {
            if num.gcd(&den) == 1 {
                reals.push(BigRational::new(num.into(), den.into()));
                reals.push(BigRational::new((-num).into(), den.into()));
            }
        }
    }
    let mut out = Vec::with_capacity(reals.len() * reals.len());
    for re in &reals {
        for im in &reals {
            out.push(Complex::new(re.clone(), im.clone()));
        }
    }
    out.sort_by(gauss_cmp);
    out
}

/// One height level of the default enumeration, stored compactly as indices
/// into the value table.
struct Level {
    values: Vec<GaussRational>,
    items: Vec<(u64, Vec<u32>)>,
}

fn build_level(h: u64) -> Level {
    let values = values_up_to(h);
    let l1: Vec<BigRational> = values.iter().map(gauss_l1).collect();
    let heights: Vec<u64> = values.iter().map(gauss_height).collect();
    let mut items = Vec::new();
    let mut stack = Vec::new();
    for ell in 1..=h {
        let budget = BigRational::from_integer(ell.into());
        for d in 0..h as usize {
            dfs(
                d,
                &mut stack,
                &BigRational::zero(),
                &budget,
                &l1,
                &heights,
                &mut |coeffs: &[u32]| {
                    let vh = coeffs.iter().map(|&i| heights[i as usize]).max().unwrap_or(1);
                    if ell.max(d as u64 + 1).max(vh) == h {
                        items.push((ell, coeffs.to_vec()));
                    }
                },
            );
        }
    }
    Level { values, items }
}

fn dfs(
    degree: usize,
    stack: &mut Vec<u32>,
    used: &BigRational,
    budget: &BigRational,
    l1: &[BigRational],
    heights: &[u64],
    emit: &mut dyn FnMut(&[u32]),
) {
    let pos = stack.len();
    if pos > degree {
        emit(stack);
        return;
    }
    for (i, w) in l1.iter().enumerate() {
        if pos == degree && degree > 0 && w.is_zero() {
            continue;
        }
        let total = used + w;
        if &total > budget {
            continue;
        }
        stack.push(i as u32);
        dfs(degree, stack, &total, budget, l1, heights, emit);
        stack.pop();
    }
}

/// Deterministic enumeration of all pairs `(q, ℓ)` with Gaussian-rational
/// `q` and integer `ℓ ≥ max(1, l1_bound(q))`.
///
/// Items are diagonalized by height `h = max(ℓ, deg q + 1, coefficient
/// heights)`; within a height they are ordered by `ℓ`, then degree, then
/// coefficients lexicographically. An optional override list replaces the
/// first entries; the default sequence continues after it.
pub struct Enumerator {
    overrides: Vec<(RationalPoly, u64)>,
    levels: Mutex<Vec<Level>>,
}

impl Default for Enumerator {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for Enumerator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Enumerator").field("overrides", &self.overrides).finish()
    }
}

impl Enumerator {
    pub fn new() -> Self {
        Self { overrides: Vec::new(), levels: Mutex::new(Vec::new()) }
    }

    pub fn with_overrides(overrides: Vec<(RationalPoly, u64)>) -> Result<Self> {
        for (i, (q, ell)) in overrides.iter().enumerate() {
            if *ell < q.min_ell() {
                return invalid(format!(
                    "override {}: ell = {ell} is below the coefficient l1 bound of {q}",
                    i + 1
                ));
            }
        }
        Ok(Self { overrides, levels: Mutex::new(Vec::new()) })
    }

    pub fn overrides(&self) -> &[(RationalPoly, u64)] {
        &self.overrides
    }

    /// `(q_k, ℓ_k)`.
    pub fn pair(&self, k: u64) -> Result<EnumeratedPair> {
        if k == 0 {
            return invalid("enumeration index starts at 1");
        }
        let (poly, ell) = match self.overrides.get(k as usize - 1) {
            Some((q, ell)) => (q.clone(), *ell),
            None => self.default_item(k - self.overrides.len() as u64)?,
        };
        Ok(EnumeratedPair { index: k, poly, ell })
    }

    /// Number of default items with height at most `h`.
    pub fn count_up_to_height(&self, h: u64) -> u64 {
        let mut levels = self.levels.lock().expect("enumeration cache poisoned");
        while (levels.len() as u64) < h {
            let next = levels.len() as u64 + 1;
            levels.push(build_level(next));
        }
        levels.iter().take(h as usize).map(|l| l.items.len() as u64).sum()
    }

    fn default_item(&self, k: u64) -> Result<(RationalPoly, u64)> {
        let mut levels = self.levels.lock().expect("enumeration cache poisoned");
        let mut offset = 0u64;
        let mut h = 0usize;
        loop {
            if h == levels.len() {
                if h >= 4 {
                    return Err(FhcError::ResourceExhausted(format!(
                        "enumeration index {k} lies beyond height 4"
                    )));
                }
                levels.push(build_level(h as u64 + 1));
            }
            let level = &levels[h];
            let len = level.items.len() as u64;
            if k <= offset + len {
                let (ell, idx) = &level.items[(k - offset - 1) as usize];
                let coeffs = idx.iter().map(|&i| level.values[i as usize].clone()).collect();
                return Ok((RationalPoly::new(coeffs), *ell));
            }
            offset += len;
            h += 1;
        }
    }
}

/// The class `k` with `n ∈ A_k = {2^k(2j − 1)}`.
pub fn block_class(n: u64) -> Result<u32> {
    if n == 0 || n % 2 == 1 {
        return invalid(format!("block index {n} must be even and positive"));
    }
    Ok(n.trailing_zeros())
}

/// `a(p)`: `1/4` for `p ≥ 2`, `1/(2p)` for `1 < p < 2`.
pub fn a_exponent(p: Exponent) -> Result<f64> {
    match p {
        Exponent::Infinity => Ok(0.25),
        Exponent::Finite(v) if v >= 2.0 => Ok(0.25),
        Exponent::Finite(v) if v > 1.0 => Ok(1.0 / (2.0 * v)),
        Exponent::Finite(v) => invalid(format!("a(p) needs p > 1, got {v}")),
    }
}

/// Growth function `φ(r) = scale · (1 + ln(1 + r))` for the `p = 1` mode,
/// with the radius grid and search budget used to fit the class spacings.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PhiSchedule {
    pub scale: f64,
    pub grid_r_max: f64,
    pub max_doublings: u32,
}

impl Default for PhiSchedule {
    fn default() -> Self {
        Self { scale: 1.0, grid_r_max: 2.0e5, max_doublings: 24 }
    }
}

impl PhiSchedule {
    pub fn phi(&self, r: f64) -> f64 {
        self.scale * (1.0 + r.ln_1p())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum Mode {
    Standard,
    P1(PhiSchedule),
}

/// Which ±1 / kernel family fills the blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum PolyFamily {
    RudinShapiro,
    ValleePoussin,
}

/// Parameters of the construction.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConstructionParams {
    pub p: Exponent,
    pub c: f64,
    pub gamma: f64,
    pub mode: Mode,
}

impl ConstructionParams {
    /// Standard mode with the given `p`, `c` and growth constant `Γ`.
    pub fn standard(p: Exponent, c: f64, gamma: f64) -> Result<Self> {
        let params = Self { p, c, gamma, mode: Mode::Standard };
        params.validate()?;
        Ok(params)
    }

    /// The `p = 1` mode driven by `φ`.
    pub fn p1(phi: PhiSchedule) -> Result<Self> {
        let params = Self { p: Exponent::Finite(1.0), c: 1.0, gamma: 1.0, mode: Mode::P1(phi) };
        params.validate()?;
        Ok(params)
    }

    /// Full-scale defaults for `p` and `c`: `Γ = 10^10`.
    pub fn full_scale(p: Exponent, c: f64) -> Result<Self> {
        Self::standard(p, c, 1.0e10)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c.is_finite() && self.c > 0.0) {
            return invalid(format!("c must be positive, got {}", self.c));
        }
        if !(self.gamma.is_finite() && self.gamma >= 1.0) {
            return invalid(format!("growth constant must be >= 1, got {}", self.gamma));
        }
        match self.mode {
            Mode::Standard => {
                a_exponent(self.p)?;
            }
            Mode::P1(phi) => {
                if !(phi.scale >= 1.0 && phi.grid_r_max > 1.0) {
                    return invalid("phi schedule needs scale >= 1 and grid_r_max > 1");
                }
            }
        }
        Ok(())
    }

    pub fn family(&self) -> PolyFamily {
        match (self.mode, self.p) {
            (Mode::Standard, Exponent::Infinity) => PolyFamily::RudinShapiro,
            (Mode::Standard, Exponent::Finite(p)) if p >= 2.0 => PolyFamily::RudinShapiro,
            _ => PolyFamily::ValleePoussin,
        }
    }

    /// The exponent `a` in `M_{f,p}(r) ≲ e^r r^{-a}`: `a(p)`, or `1/2` in
    /// the `p = 1` mode.
    pub fn growth_exponent(&self) -> f64 {
        match self.mode {
            Mode::Standard => a_exponent(self.p).unwrap_or(0.25),
            Mode::P1(_) => 0.5,
        }
    }

    /// `max(2, p')`.
    pub fn alpha_power(&self) -> f64 {
        self.p.conjugate().value().max(2.0)
    }
}

/// `α_k = 1 + ⌊max((Γℓ/c)^{max(2,p')}, 2d + 8ℓ)⌋` in standard mode.
///
/// Integer powers are evaluated in exact rational arithmetic so that
/// `(Γℓ/c)^2` lands on the right integer.
pub fn alpha(pair: &EnumeratedPair, params: &ConstructionParams) -> Result<u128> {
    if params.mode != Mode::Standard {
        return invalid("alpha() covers standard mode; use alpha_p1 for the p = 1 mode");
    }
    let structural = structural_spacing(pair);
    let power = params.alpha_power();
    let scaled = if power.fract() == 0.0 && power <= 64.0 {
        let base = to_rational(params.gamma)? * BigRational::from_integer(pair.ell.into())
            / to_rational(params.c)?;
        let value = num_traits::pow(base, power as usize).floor().to_integer();
        value.to_u128().ok_or_else(|| overflow(pair.index))?
    } else {
        let value = (params.gamma * pair.ell as f64 / params.c).powf(power).floor();
        if !(value.is_finite() && value < 1.0e38) {
            return Err(overflow(pair.index));
        }
        value as u128
    };
    Ok(1 + scaled.max(structural))
}

/// `α_k = 1 + max(2d + 8ℓ, extra)` in the `p = 1` mode.
pub fn alpha_p1(pair: &EnumeratedPair, extra: u128) -> u128 {
    1 + structural_spacing(pair).max(extra)
}

/// `2d + 8ℓ`: the gap that keeps each target window followed by `8ℓ` zeros.
pub fn structural_spacing(pair: &EnumeratedPair) -> u128 {
    2 * pair.poly.degree() as u128 + 8 * pair.ell as u128
}

fn to_rational(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| FhcError::InvalidArgument(format!("{x} is not finite")))
}

fn overflow(k: u64) -> FhcError {
    FhcError::ResourceExhausted(format!("alpha_{k} exceeds the 128-bit index range"))
}

/// Parse an override list: one pair per line, `degree, c_0, …, c_d, ell`.
/// Coefficients are `a`, `a/b`, `a/b+c/di` or `c/di`. `#` starts a comment.
pub fn parse_overrides(text: &str) -> Result<Vec<(RationalPoly, u64)>> {
    let mut out = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let perr = |msg: String| FhcError::Parse { line: lineno + 1, msg };
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 3 {
            return Err(perr("expected `degree, c_0, ..., c_d, ell`".into()));
        }
        let degree: usize = fields[0].parse().map_err(|_| perr(format!("bad degree {:?}", fields[0])))?;
        if fields.len() != degree + 3 {
            return Err(perr(format!("degree {degree} needs {} coefficients", degree + 1)));
        }
        let coeffs = fields[1..=degree + 1]
            .iter()
            .map(|s| parse_gauss(s).ok_or_else(|| perr(format!("bad coefficient {s:?}"))))
            .collect::<Result<Vec<_>>>()?;
        let ell: u64 = fields[degree + 2]
            .parse()
            .map_err(|_| perr(format!("bad ell {:?}", fields[degree + 2])))?;
        out.push((RationalPoly::new(coeffs), ell));
    }
    Ok(out)
}

fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().ok()?;
            let d: BigInt = d.trim().parse().ok()?;
            (!d.is_zero()).then(|| BigRational::new(n, d))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// Parse `a`, `a/b`, `a/b+c/di`, `a/b-c/di`, `c/di`, `i`, `-i`.
pub fn parse_gauss(s: &str) -> Option<GaussRational> {
    let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let Some(body) = s.strip_suffix('i') else {
        return Some(Complex::new(parse_rational(&s)?, BigRational::zero()));
    };
    // Split at the last sign that is not the leading one.
    let split = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').last();
    let (re, im) = match split {
        Some((i, _)) => (parse_rational(&body[..i])?, &body[i..]),
        None => (BigRational::zero(), body),
    };
    let im = match im {
        "" | "+" => BigRational::one(),
        "-" => -BigRational::one(),
        other => parse_rational(other.strip_prefix('+').unwrap_or(other))?,
    };
    Some(Complex::new(re, im))
}
