//! Sparse Laurent polynomials on the circle and their squared-modulus
//! expansions.

use std::collections::BTreeMap;
use std::ops::Mul;

use num_complex::Complex64;

use crate::error::{FlatError, Result};
use crate::grid::Grid;

/// Off-center coefficients of `|P|²` below this modulus are float dust and
/// get dropped.
pub const SPECTRUM_DUST: f64 = 1e-13;

/// A trigonometric polynomial `Σ c_e z^e` with finitely many nonzero terms.
///
/// Exponents may be negative. Every stored coefficient is nonzero.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TrigPoly {
    terms: BTreeMap<i64, Complex64>,
}

impl TrigPoly {
    pub fn zero() -> Self {
        TrigPoly::default()
    }

    pub fn constant(c: Complex64) -> Self {
        TrigPoly::monomial(0, c)
    }

    pub fn monomial(e: i64, c: Complex64) -> Self {
        let mut terms = BTreeMap::new();
        if c != Complex64::new(0.0, 0.0) {
            terms.insert(e, c);
        }
        TrigPoly { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs.
    ///
    /// Repeated exponents are rejected; zero coefficients are skipped.
    pub fn from_terms<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (i64, Complex64)>,
    {
        let mut map = BTreeMap::new();
        for (e, c) in terms {
            if map.insert(e, c).is_some() {
                return Err(FlatError::DuplicateExponent(e));
            }
        }
        map.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        Ok(TrigPoly { terms: map })
    }

    /// Dense analytic polynomial `Σ_k coeffs[k] z^k`.
    pub fn from_dense(coeffs: &[Complex64]) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != Complex64::new(0.0, 0.0))
            .map(|(k, c)| (k as i64, *c))
            .collect();
        TrigPoly { terms }
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (i64, Complex64)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, *c))
    }

    pub fn coeff(&self, e: i64) -> Complex64 {
        self.terms.get(&e).copied().unwrap_or_default()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    /// `max exponent − min exponent`, zero for the empty polynomial.
    pub fn span(&self) -> u64 {
        match (self.min_exp(), self.max_exp()) {
            (Some(lo), Some(hi)) => (hi - lo) as u64,
            _ => 0,
        }
    }

    pub fn is_analytic(&self) -> bool {
        self.min_exp().is_none_or(|e| e >= 0)
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * z.powi(*e as i32))
            .sum()
    }

    /// `P(e^{iθ})`.
    pub fn eval_angle(&self, theta: f64) -> Complex64 {
        self.terms
            .iter()
            .map(|(e, c)| c * Complex64::from_polar(1.0, *e as f64 * theta))
            .sum()
    }

    pub fn scale(&self, k: Complex64) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (*e, c * k))
            .filter(|(_, c)| *c != Complex64::new(0.0, 0.0))
            .collect();
        TrigPoly { terms }
    }

    /// `P(z^s)`.
    pub fn dilate(&self, s: u64) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e * s as i64, *c)).collect();
        TrigPoly { terms }
    }

    /// `z^k · P(z)`.
    pub fn shift(&self, k: i64) -> Self {
        let terms = self.terms.iter().map(|(e, c)| (e + k, *c)).collect();
        TrigPoly { terms }
    }

    /// Drops coefficients whose modulus is below `threshold`.
    pub fn prune(&self, threshold: f64) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(_, c)| c.norm() >= threshold)
            .map(|(e, c)| (*e, *c))
            .collect();
        TrigPoly { terms }
    }

    /// Exact `L²(dz)` norm: `sqrt(Σ |c_e|²)`.
    pub fn l2_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize_l2(&self) -> Result<Self> {
        let norm = self.l2_norm();
        if norm == 0.0 {
            return Err(FlatError::EmptyPolynomial);
        }
        Ok(self.scale(Complex64::new(1.0 / norm, 0.0)))
    }

    /// Grid estimate of `∫ |P| dz`.
    pub fn l1_modulus(&self, grid: &Grid) -> f64 {
        grid.mean(grid.sample(self).iter().map(|v| v.norm()))
    }

    /// Grid maximum of `|P|`. This is a lower bound on the true sup norm.
    pub fn sup_modulus(&self, grid: &Grid) -> Result<f64> {
        grid.check_sup_resolution(self)?;
        Ok(grid.sample(self).iter().map(|v| v.norm()).fold(0.0, f64::max))
    }

    /// The expansion `|P|² = center + Σ b_k z^{n_k}` on the circle.
    pub fn squared_modulus(&self) -> ModulusSpectrum {
        ModulusSpectrum::of(self)
    }
}

impl Mul for &TrigPoly {
    type Output = TrigPoly;

    fn mul(self, rhs: &TrigPoly) -> TrigPoly {
        let mut terms: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                *terms.entry(ea + eb).or_default() += ca * cb;
            }
        }
        terms.retain(|_, c| *c != Complex64::new(0.0, 0.0));
        TrigPoly { terms }
    }
}

/// `|P|²` written as `center + Σ_{k≠0} b_k z^{n_k}`.
///
/// `offcenter` is sorted by exponent and Hermitian: the entry at `-n` is the
/// exact conjugate of the entry at `n`. `N` counts the positive exponents.
#[derive(Debug, Clone, PartialEq)]
pub struct ModulusSpectrum {
    center: f64,
    offcenter: Vec<(i64, Complex64)>,
}

impl ModulusSpectrum {
    fn of(p: &TrigPoly) -> Self {
        let terms: Vec<(i64, Complex64)> = p.terms().collect();
        let center = terms.iter().map(|(_, c)| c.norm_sqr()).sum();

        // |P|² on the circle is Σ_{i,j} c_i conj(c_j) z^{e_i - e_j}; only the
        // pairs with e_i > e_j are accumulated, the rest follow by symmetry.
        let mut positive: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (i, (ei, ci)) in terms.iter().enumerate() {
            for (ej, cj) in &terms[..i] {
                *positive.entry(ei - ej).or_default() += ci * cj.conj();
            }
        }
        positive.retain(|_, b| b.norm() >= SPECTRUM_DUST);

        let mut offcenter: Vec<(i64, Complex64)> =
            positive.iter().rev().map(|(n, b)| (-n, b.conj())).collect();
        offcenter.extend(positive.iter().map(|(n, b)| (*n, *b)));
        ModulusSpectrum { center, offcenter }
    }

    /// Coefficient of `z^0`, which is `Σ |c_e|²`.
    pub fn center(&self) -> f64 {
        self.center
    }

    /// Every `(n_k, b_k)`, both signs, ascending in `n_k`.
    pub fn offcenter(&self) -> &[(i64, Complex64)] {
        &self.offcenter
    }

    /// The `(n_k, b_k)` with `n_k > 0`, ascending.
    pub fn positive(&self) -> &[(i64, Complex64)] {
        &self.offcenter[self.offcenter.len() / 2..]
    }

    /// Number of positive-exponent off-center terms.
    pub fn n(&self) -> usize {
        self.offcenter.len() / 2
    }

    /// `L = Σ_{k≠0} b_k`. Real by Hermitian symmetry.
    pub fn l_sum(&self) -> f64 {
        2.0 * self.positive().iter().map(|(_, b)| b.re).sum::<f64>()
    }

    /// Fourier coefficient of `|P|²` at exponent `k`.
    pub fn coeff(&self, k: i64) -> Complex64 {
        if k == 0 {
            return Complex64::new(self.center, 0.0);
        }
        match self.offcenter.binary_search_by_key(&k, |(n, _)| *n) {
            Ok(i) => self.offcenter[i].1,
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    /// Nonzero exponents of `|P|²`, including 0 when the center is nonzero.
    pub fn support(&self) -> Vec<i64> {
        let mut s: Vec<i64> = self.offcenter.iter().map(|(n, _)| *n).collect();
        if self.center != 0.0 {
            let pos = s.partition_point(|n| *n < 0);
            s.insert(pos, 0);
        }
        s
    }

    /// The same expansion as a `TrigPoly`.
    pub fn to_poly(&self) -> TrigPoly {
        let mut terms: BTreeMap<i64, Complex64> = self.offcenter.iter().copied().collect();
        if self.center != 0.0 {
            terms.insert(0, Complex64::new(self.center, 0.0));
        }
        TrigPoly { terms }
    }

    /// Real samples of `|P|²` on a grid, summed from the expansion.
    pub fn sample(&self, grid: &Grid) -> Vec<f64> {
        grid.sample(&self.to_poly()).iter().map(|v| v.re).collect()
    }
}
