//! The two polynomial families used to build the blocks of `f`:
//! ±1 Rudin–Shapiro polynomials `p_m` (flat in every `L^p`, `p ≥ 2`) and
//! shifted de la Vallée-Poussin kernels `p*_m` (small in `L^1`).

use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{invalid, Result};
use crate::exponent::Exponent;
use crate::trig::{self, NormEstimate};

/// A (Laurent) polynomial `Σ_{j=lo}^{hi} b_j e^{ijθ}` with exact rational
/// coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffPoly {
    degree_lo: i64,
    coeffs: Vec<Rational64>,
}

impl CoeffPoly {
    pub fn new(degree_lo: i64, coeffs: Vec<Rational64>) -> Result<Self> {
        if coeffs.is_empty() {
            return invalid("coefficient list is empty");
        }
        Ok(Self { degree_lo, coeffs })
    }

    pub fn degree_lo(&self) -> i64 {
        self.degree_lo
    }

    pub fn degree_hi(&self) -> i64 {
        self.degree_lo + self.coeffs.len() as i64 - 1
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeffs(&self) -> &[Rational64] {
        &self.coeffs
    }

    /// Coefficient of `e^{ijθ}`, zero outside the stored range.
    pub fn coeff(&self, degree: i64) -> Rational64 {
        if degree < self.degree_lo || degree > self.degree_hi() {
            return Rational64::zero();
        }
        self.coeffs[(degree - self.degree_lo) as usize]
    }

    /// `(degree, coefficient)` pairs with nonzero coefficient.
    pub fn nonzero(&self) -> impl Iterator<Item = (i64, Rational64)> + '_ {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(move |(i, c)| (self.degree_lo + i as i64, *c))
    }

    pub fn count_ones(&self) -> usize {
        self.coeffs.iter().filter(|c| c.is_one()).count()
    }

    pub fn max_abs_coeff(&self) -> Rational64 {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// `Σ |b_j|²`.
    pub fn sum_squares(&self) -> f64 {
        self.coeffs.iter().map(|c| to_f64(c).powi(2)).sum()
    }

    pub fn terms(&self) -> Vec<(i64, Complex64)> {
        self.nonzero()
            .map(|(d, c)| (d, Complex64::new(to_f64(&c), 0.0)))
            .collect()
    }

    fn negate(&mut self) {
        for c in &mut self.coeffs {
            *c = -*c;
        }
    }
}

fn to_f64(c: &Rational64) -> f64 {
    c.to_f64().expect("small rational")
}

/// Sign of the `i`-th Golay–Rudin–Shapiro term: `(-1)^{#adjacent 11 pairs in i}`.
/// Equivalent to `s_0 = 1, s_{2n} = s_n, s_{2n+1} = (-1)^n s_n`.
pub fn rudin_shapiro_sign(i: u64) -> i64 {
    if (i & (i >> 1)).count_ones() % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `p_m`: the length-`m` prefix of the Golay–Rudin–Shapiro sequence, negated
/// if needed so that at least `⌈m/2⌉` coefficients equal `+1`.
pub fn rudin_shapiro_poly(m: usize) -> Result<CoeffPoly> {
    if m == 0 {
        return invalid("Rudin-Shapiro length must be at least 1");
    }
    let coeffs = (0..m as u64)
        .map(|i| Rational64::from_integer(rudin_shapiro_sign(i)))
        .collect();
    let mut poly = CoeffPoly::new(0, coeffs)?;
    if poly.count_ones() < m.div_ceil(2) {
        poly.negate();
    }
    Ok(poly)
}

/// The Fejér kernel `F_k = Σ_{|j|<k} (1 − |j|/k) e^{ijθ}`.
pub fn fejer_kernel(k: usize) -> Result<CoeffPoly> {
    if k == 0 {
        return invalid("Fejer kernel order must be at least 1");
    }
    let k = k as i64;
    let coeffs = (-(k - 1)..k)
        .map(|j| Rational64::new(k - j.abs(), k))
        .collect();
    CoeffPoly::new(-(k - 1), coeffs)
}

/// `p*_m = e^{2kiθ}(2F_{2k} − F_k)`, `k = ⌊m/4⌋`, stored on degrees `0..m`.
/// For `m < 4` this is the constant `1`.
pub fn vallee_poussin_poly(m: usize) -> Result<CoeffPoly> {
    if m == 0 {
        return invalid("de la Vallee-Poussin length must be at least 1");
    }
    let mut coeffs = vec![Rational64::zero(); m];
    if m < 4 {
        coeffs[0] = Rational64::one();
        return CoeffPoly::new(0, coeffs);
    }
    let k = (m / 4) as i64;
    let wide = fejer_kernel(2 * k as usize)?;
    let narrow = fejer_kernel(k as usize)?;
    let two = Rational64::from_integer(2);
    for j in wide.degree_lo()..=wide.degree_hi() {
        coeffs[(j + 2 * k) as usize] = two * wide.coeff(j) - narrow.coeff(j);
    }
    CoeffPoly::new(0, coeffs)
}

/// `‖q‖_p` on the circle with normalized measure. For `p = ∞` the `upper`
/// field is a certified upper bound.
pub fn poly_pnorm(q: &CoeffPoly, p: Exponent) -> Result<NormEstimate> {
    if q.is_empty() {
        return invalid("empty polynomial");
    }
    Ok(trig::lp_norm(&q.terms(), p))
}

/// Sup-norm bound `5√m` for `p_m` (valid for every `p ∈ [2, ∞]`).
pub fn rudin_shapiro_bound(m: usize) -> f64 {
    5.0 * (m as f64).sqrt()
}

/// `3·m^{1/p'}` for `p*_m`, `p ∈ [1, 2]`.
pub fn vallee_poussin_bound(m: usize, p: Exponent) -> f64 {
    3.0 * (m as f64).powf(p.conjugate().reciprocal())
}
