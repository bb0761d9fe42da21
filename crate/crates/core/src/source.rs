//! Taylor coefficient sources `f(z) = Σ a_j z^j / j!` consumed by the
//! evaluation and verification routines.

use std::collections::BTreeMap;

use num_complex::Complex64;

/// Read access to the Taylor coefficients `a_j` of an entire function
/// written as `Σ a_j z^j / j!`.
pub trait TaylorSource: Sync {
    /// Nonzero coefficients with `lo ≤ j < hi`, ascending in `j`.
    fn nonzero_in(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)>;

    /// A bound `|a_j| ≤ coeff_bound(j)` valid for every `j`; drives the
    /// truncation certificates, which also rely on
    /// `B(j+1) ≤ B(j)·(j+1)/j` for `j ≥ 1`. The default `max(j, 1)` holds for
    /// the constructed function.
    fn coeff_bound(&self, j: u64) -> f64 {
        (j as f64).max(1.0)
    }
}

impl<T: TaylorSource + ?Sized> TaylorSource for &T {
    fn nonzero_in(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)> {
        (**self).nonzero_in(lo, hi)
    }
    fn coeff_bound(&self, j: u64) -> f64 {
        (**self).coeff_bound(j)
    }
}

/// `e^z`: every `a_j = 1`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ExpSeries;

impl TaylorSource for ExpSeries {
    fn nonzero_in(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)> {
        (lo..hi).map(|j| (j, Complex64::new(1.0, 0.0))).collect()
    }
    fn coeff_bound(&self, _j: u64) -> f64 {
        1.0
    }
}

/// A polynomial given by finitely many nonzero `a_j`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct SparseSeries {
    terms: BTreeMap<u64, Complex64>,
}

impl SparseSeries {
    pub fn new<I: IntoIterator<Item = (u64, Complex64)>>(terms: I) -> Self {
        let mut map = BTreeMap::new();
        for (j, a) in terms {
            *map.entry(j).or_insert(Complex64::new(0.0, 0.0)) += a;
        }
        map.retain(|_, a| *a != Complex64::new(0.0, 0.0));
        Self { terms: map }
    }

    /// `z^s / s!`, i.e. `a_s = 1`.
    pub fn monomial(s: u64) -> Self {
        Self::new([(s, Complex64::new(1.0, 0.0))])
    }

    /// `f(z) = z`.
    pub fn identity() -> Self {
        Self::monomial(1)
    }

    pub fn terms(&self) -> impl Iterator<Item = (u64, Complex64)> + '_ {
        self.terms.iter().map(|(j, a)| (*j, *a))
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

impl TaylorSource for SparseSeries {
    fn nonzero_in(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)> {
        if lo >= hi {
            return Vec::new();
        }
        self.terms.range(lo..hi).map(|(j, a)| (*j, *a)).collect()
    }
    fn coeff_bound(&self, j: u64) -> f64 {
        match self.terms.keys().next_back() {
            Some(&last) if j <= last => self.terms.values().map(|a| a.norm()).fold(0.0, f64::max),
            _ => 0.0,
        }
    }
}

/// Coefficients of `inner` restricted to `lo ≤ j < hi`; the restriction of
/// `f` to one block is `Window::new(f, n², (n+1)²)`.
#[derive(Clone, Copy, Debug)]
pub struct Window<S> {
    inner: S,
    lo: u64,
    hi: u64,
}

impl<S: TaylorSource> Window<S> {
    pub fn new(inner: S, lo: u64, hi: u64) -> Self {
        Self { inner, lo, hi }
    }

    /// The block `P_n` of `inner`.
    pub fn block(inner: S, n: u64) -> Self {
        Self::new(inner, n * n, (n + 1) * (n + 1))
    }
}

impl<S: TaylorSource> TaylorSource for Window<S> {
    fn nonzero_in(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)> {
        let lo = lo.max(self.lo);
        let hi = hi.min(self.hi);
        if lo >= hi {
            return Vec::new();
        }
        self.inner.nonzero_in(lo, hi)
    }
    fn coeff_bound(&self, j: u64) -> f64 {
        // Not zeroed below `lo`: the bound must never grow back from zero.
        if j >= self.hi {
            0.0
        } else {
            self.inner.coeff_bound(j)
        }
    }
}

/// `f + g`.
#[derive(Clone, Copy, Debug)]
pub struct SumSeries<A, B>(pub A, pub B);

impl<A: TaylorSource, B: TaylorSource> TaylorSource for SumSeries<A, B> {
    fn nonzero_in(&self, lo: u64, hi: u64) -> Vec<(u64, Complex64)> {
        let mut map: BTreeMap<u64, Complex64> = BTreeMap::new();
        for (j, a) in self.0.nonzero_in(lo, hi).into_iter().chain(self.1.nonzero_in(lo, hi)) {
            *map.entry(j).or_default() += a;
        }
        map.into_iter().filter(|(_, a)| a.norm() != 0.0).collect()
    }
    fn coeff_bound(&self, j: u64) -> f64 {
        self.0.coeff_bound(j) + self.1.coeff_bound(j)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn window_restricts() {
        let w = Window::block(ExpSeries, 3);
        let got: Vec<u64> = w.nonzero_in(0, 100).into_iter().map(|t| t.0).collect();
        assert_eq!(got, (9..16).collect::<Vec<_>>());
        assert_eq!(w.coeff_bound(16), 0.0);
        assert_eq!(w.coeff_bound(8), 1.0);
    }

    #[test]
    fn sparse_merges_and_drops_zeros() {
        let one = Complex64::new(1.0, 0.0);
        let s = SparseSeries::new([(4, one), (4, -one), (7, one)]);
        assert_eq!(s.nonzero_in(0, 10), vec![(7, one)]);
        let sum = SumSeries(SparseSeries::monomial(7), SparseSeries::monomial(2));
        assert_eq!(sum.nonzero_in(0, 10), vec![(2, one), (7, one)]);
    }
}
