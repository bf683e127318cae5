//! Polynomial families and van der Corput certificates for their sup norms.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FlatError, Result};
use crate::poly::TrigPoly;

/// Exponents of a class-B polynomial `(1/√m)(1 + Σ z^{R_k})`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassBSpec {
    exponents: Vec<i64>,
}

impl ClassBSpec {
    /// Sorts the exponents; they must be distinct and positive.
    pub fn new(mut exponents: Vec<i64>) -> Result<Self> {
        exponents.sort_unstable();
        if let Some(w) = exponents.windows(2).find(|w| w[0] == w[1]) {
            return Err(FlatError::DuplicateExponent(w[0]));
        }
        if let Some(e) = exponents.iter().find(|e| **e <= 0) {
            return Err(FlatError::InvalidExponent(format!(
                "class-B exponents must be positive, got {e}"
            )));
        }
        Ok(ClassBSpec { exponents })
    }

    /// The Dirichlet-kernel case `R = {1, …, m−1}`.
    pub fn consecutive(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(FlatError::InvalidParameter("class-B needs m >= 1".into()));
        }
        ClassBSpec::new((1..m as i64).collect())
    }

    /// Number of terms, counting the constant.
    pub fn m(&self) -> usize {
        self.exponents.len() + 1
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }
}

pub fn class_b(spec: &ClassBSpec) -> TrigPoly {
    let w = Complex64::new(1.0 / (spec.m() as f64).sqrt(), 0.0);
    let terms = std::iter::once(0)
        .chain(spec.exponents.iter().copied())
        .map(|e| (e, w));
    TrigPoly::from_terms(terms).expect("exponents validated")
}

/// `G_n(z) = (1/√n) Σ_{k<n} exp(πi k²/n) z^k`.
pub fn gauss_fresnel(n: usize) -> Result<TrigPoly> {
    if n == 0 {
        return Err(FlatError::InvalidParameter("gauss_fresnel needs n >= 1".into()));
    }
    let w = 1.0 / (n as f64).sqrt();
    let period = 2 * n as u64;
    let terms = (0..n as u64).map(|k| {
        // exp(πi k²/n) depends only on k² mod 2n
        let phase = ((k * k) % period) as f64 * PI / n as f64;
        (k as i64, Complex64::from_polar(w, phase))
    });
    TrigPoly::from_terms(terms)
}

/// `H_n(z) = (1/√n)(1 + Σ_{k=1}^{n−1} exp(2πi c k ln k / n) z^k)`.
pub fn hardy_littlewood(n: usize, c: f64) -> Result<TrigPoly> {
    if n < 2 {
        return Err(FlatError::InvalidParameter("hardy_littlewood needs n >= 2".into()));
    }
    if c == 0.0 {
        return Err(FlatError::DegenerateHLConstant);
    }
    let w = 1.0 / (n as f64).sqrt();
    let terms = std::iter::once((0, Complex64::new(w, 0.0))).chain((1..n).map(|k| {
        let kf = k as f64;
        let phase = 2.0 * PI * c * kf * kf.ln() / n as f64;
        (k as i64, Complex64::from_polar(w, phase))
    }));
    TrigPoly::from_terms(terms)
}

/// `(1 + δ zⁿ)/√(1+δ²)`, a perturbation of the constant polynomial 1.
pub fn single_spike(n: i64, delta: f64) -> Result<TrigPoly> {
    if n < 1 {
        return Err(FlatError::InvalidParameter("single_spike needs n >= 1".into()));
    }
    if !(delta > 0.0) {
        return Err(FlatError::InvalidParameter("single_spike needs delta > 0".into()));
    }
    let s = 1.0 / (1.0 + delta * delta).sqrt();
    TrigPoly::from_terms([(0, Complex64::new(s, 0.0)), (n, Complex64::new(delta * s, 0.0))])
}

/// Taylor polynomial of degree `d` of `Π (z−α)/(1−ᾱz)`. Not renormalized.
pub fn blaschke_partial_sum(zeros: &[Complex64], d: usize) -> Result<TrigPoly> {
    if let Some(a) = zeros.iter().find(|a| a.norm() >= 1.0) {
        return Err(FlatError::ZeroNotInsideDisk { re: a.re, im: a.im });
    }
    let one = Complex64::new(1.0, 0.0);
    let mut num = vec![one];
    let mut den = vec![one];
    for a in zeros {
        num = poly_mul(&num, &[-a, one]);
        den = poly_mul(&den, &[one, -a.conj()]);
    }
    // den[0] == 1, so the series quotient needs no division.
    let mut q = vec![Complex64::new(0.0, 0.0); d + 1];
    for k in 0..=d {
        let mut acc = num.get(k).copied().unwrap_or_default();
        for i in 1..den.len().min(k + 1) {
            acc -= den[i] * q[k - i];
        }
        q[k] = acc;
    }
    Ok(TrigPoly::from_dense(&q))
}

fn poly_mul(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Phase functions covered by the van der Corput second-derivative test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VdcKind {
    /// `f(u) = uθ + u²/(2N)`
    Quadratic { theta: f64, n: f64 },
    /// `f(u) = c·u·ln u + uθ`
    XLogX { c: f64, theta: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VdcFunctionSpec {
    pub kind: VdcKind,
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct VdcCertificate {
    /// `|Σ_{a≤n≤b} exp(2πi f(n))|` by direct summation.
    pub lhs: f64,
    /// `(|f'(b) − f'(a)| + 2)(4/√ρ + 3)`.
    pub rhs: f64,
    pub rho: f64,
}

impl VdcCertificate {
    pub fn holds(&self) -> bool {
        self.lhs <= self.rhs
    }
}

impl VdcFunctionSpec {
    pub fn value(&self, u: f64) -> f64 {
        match self.kind {
            VdcKind::Quadratic { theta, n } => u * theta + u * u / (2.0 * n),
            VdcKind::XLogX { c, theta } => c * u * u.ln() + u * theta,
        }
    }

    pub fn derivative(&self, u: f64) -> f64 {
        match self.kind {
            VdcKind::Quadratic { theta, n } => theta + u / n,
            VdcKind::XLogX { c, theta } => c * (u.ln() + 1.0) + theta,
        }
    }

    /// `min |f''|` on `[a, b]` in closed form: `1/|N|`, or `|c|/b`.
    pub fn rho(&self) -> f64 {
        match self.kind {
            VdcKind::Quadratic { n, .. } => 1.0 / n.abs(),
            VdcKind::XLogX { c, .. } => c.abs() / self.b,
        }
    }

    fn validate(&self) -> Result<f64> {
        if !(self.a <= self.b) || !self.a.is_finite() || !self.b.is_finite() {
            return Err(FlatError::InvalidParameter(format!(
                "interval [{}, {}] is empty or unbounded",
                self.a, self.b
            )));
        }
        if let VdcKind::XLogX { .. } = self.kind {
            if self.a < 1.0 {
                return Err(FlatError::InvalidParameter(
                    "x·ln x phase needs a >= 1".into(),
                ));
            }
        }
        let rho = self.rho();
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(FlatError::SecondDerivativeNotBoundedAway(rho));
        }
        Ok(rho)
    }
}

pub fn vdc_certificate(spec: &VdcFunctionSpec) -> Result<VdcCertificate> {
    let rho = spec.validate()?;
    let lo = spec.a.ceil() as i64;
    let hi = spec.b.floor() as i64;
    let sum: Complex64 = (lo..=hi)
        .map(|k| {
            let f = spec.value(k as f64);
            Complex64::from_polar(1.0, 2.0 * PI * (f - f.floor()))
        })
        .sum();
    let spread = (spec.derivative(spec.b) - spec.derivative(spec.a)).abs();
    Ok(VdcCertificate {
        lhs: sum.norm(),
        rhs: (spread + 2.0) * (4.0 / rho.sqrt() + 3.0),
        rho,
    })
}

/// Uniform bound on `|G_n(e^{2πiθ})|` from one van der Corput block over
/// `[0, n−1]`. The right-hand side does not depend on `θ`.
pub fn gauss_fresnel_vdc_bound(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(FlatError::InvalidParameter("gauss_fresnel needs n >= 1".into()));
    }
    let spec = VdcFunctionSpec {
        kind: VdcKind::Quadratic {
            theta: 0.0,
            n: n as f64,
        },
        a: 0.0,
        b: (n - 1) as f64,
    };
    Ok(vdc_certificate(&spec)?.rhs / (n as f64).sqrt())
}

/// Upper bound for `|H_n(e^{2πiθ})|`: the van der Corput right-hand sides of
/// the dyadic blocks `[2^j, 2^{j+1}−1] ∩ [1, n−1]`, plus 1 for the constant
/// term, over `√n`.
///
/// The phase of `H_n` is `(c/n)·k ln k + kθ`, so each block uses the
/// constant `c/n` and `ρ_j = |c| / (n · b_j)` at its right end `b_j`.
pub fn hl_dyadic_certificate(n: usize, c: f64, theta: f64) -> Result<f64> {
    if n < 2 {
        return Err(FlatError::InvalidParameter("hardy_littlewood needs n >= 2".into()));
    }
    let c_eff = c / n as f64;
    let mut total = 1.0;
    let mut lo = 1usize;
    while lo < n {
        let hi = (2 * lo - 1).min(n - 1);
        let spec = VdcFunctionSpec {
            kind: VdcKind::XLogX { c: c_eff, theta },
            a: lo as f64,
            b: hi as f64,
        };
        total += vdc_certificate(&spec)?.rhs;
        lo *= 2;
    }
    Ok(total / (n as f64).sqrt())
}
