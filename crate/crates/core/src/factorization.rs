//! Inner/outer factorization of analytic polynomials.
//!
//! For `P` with zeros `E` strictly inside the disk and `F` on or outside it,
//!
//! ```text
//! B(z) = γ Π_{α∈E} (z − α)/(1 − ᾱz)
//! Q(z) = γ̄ · lead · Π_{α∈E} (1 − ᾱz) Π_{α∈F} (z − α)
//! ```
//!
//! so that `P = B·Q`, `|B| = 1` on the circle and `Q(0) > 0`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::grid::Grid;
use crate::poly::TrigPoly;
use crate::roots::find_roots;

pub const DEFAULT_ROOT_TOLERANCE: f64 = 1e-8;

/// Values of `|p|` below this make the log integral singular.
pub const LOG_FLOOR: f64 = 1e-13;

const UNIMODULAR_TOL: f64 = 1e-8;
const MODULUS_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq)]
pub struct InnerOuterFactorization {
    pub inside: Vec<Complex64>,
    pub outside: Vec<Complex64>,
    pub gamma: Complex64,
    pub leading: Complex64,
    pub q: TrigPoly,
    pub root_tolerance: f64,
    /// Some root lies within `root_tolerance` of the unit circle.
    pub boundary_root: bool,
}

impl InnerOuterFactorization {
    /// `Q(0)`, real and positive.
    pub fn q0(&self) -> f64 {
        self.q.coeff(0).re
    }

    /// The Blaschke factor `B(z)`.
    pub fn inner(&self, z: Complex64) -> Complex64 {
        self.inside
            .iter()
            .fold(self.gamma, |acc, a| acc * (z - a) / (1.0 - a.conj() * z))
    }
}

pub fn inner_outer(p: &TrigPoly) -> Result<InnerOuterFactorization> {
    inner_outer_with_tolerance(p, DEFAULT_ROOT_TOLERANCE)
}

pub fn inner_outer_with_tolerance(p: &TrigPoly, tol: f64) -> Result<InnerOuterFactorization> {
    let Some(lo) = p.min_exp() else {
        return Err(FlatError::EmptyPolynomial);
    };
    if lo < 0 {
        return Err(FlatError::NotAnalytic(lo));
    }
    let hi = p.max_exp().expect("nonempty");
    let leading = p.coeff(hi);

    let roots = find_roots(p)?;
    let mut inside = Vec::new();
    let mut outside = Vec::new();
    let mut boundary_root = false;
    for r in roots {
        let dist = r.norm() - 1.0;
        if dist.abs() < tol {
            boundary_root = true;
            outside.push(r);
        } else if dist < 0.0 {
            inside.push(r);
        } else {
            outside.push(r);
        }
    }

    let one = Complex64::new(1.0, 0.0);
    let mut q_dense = vec![leading];
    for a in &inside {
        q_dense = mul_linear(&q_dense, one, -a.conj());
    }
    for a in &outside {
        q_dense = mul_linear(&q_dense, -a, one);
    }
    let gamma = q_dense[0] / q_dense[0].norm();
    for c in q_dense.iter_mut() {
        *c *= gamma.conj();
    }
    q_dense[0] = Complex64::new(q_dense[0].norm(), 0.0);

    let fact = InnerOuterFactorization {
        inside,
        outside,
        gamma,
        leading,
        q: TrigPoly::from_dense(&q_dense),
        root_tolerance: tol,
        boundary_root,
    };
    verify(p, &fact)?;
    Ok(fact)
}

/// `(c0 + c1 z) · poly`
fn mul_linear(poly: &[Complex64], c0: Complex64, c1: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); poly.len() + 1];
    for (k, c) in poly.iter().enumerate() {
        out[k] += c * c0;
        out[k + 1] += c * c1;
    }
    out
}

fn verify(p: &TrigPoly, f: &InnerOuterFactorization) -> Result<()> {
    if !(f.q0() > 0.0) {
        return Err(FlatError::FactorizationInconsistent(format!(
            "Q(0) = {} is not positive",
            f.q0()
        )));
    }
    let grid = Grid::default_for(p);
    let pv = grid.sample(p);
    let qv = grid.sample(&f.q);
    let pmax = pv.iter().map(|v| v.norm()).fold(0.0, f64::max);
    for t in 0..grid.size() {
        let b = f.inner(grid.point(t));
        if (b.norm() - 1.0).abs() > UNIMODULAR_TOL {
            return Err(FlatError::FactorizationInconsistent(format!(
                "|B| = {} at grid index {t}",
                b.norm()
            )));
        }
        if (pv[t].norm() - qv[t].norm()).abs() > MODULUS_TOL * pmax {
            return Err(FlatError::FactorizationInconsistent(format!(
                "|P| = {} but |Q| = {} at grid index {t}",
                pv[t].norm(),
                qv[t].norm()
            )));
        }
        if (b * qv[t] - pv[t]).norm() > MODULUS_TOL * pmax {
            return Err(FlatError::FactorizationInconsistent(format!(
                "B·Q differs from P at grid index {t}"
            )));
        }
    }
    Ok(())
}

/// Grid estimate of `∫ log|p| dz`.
pub fn log_integral(p: &TrigPoly, grid: &Grid) -> Result<f64> {
    let vals = grid.sample(p);
    let mut total = 0.0;
    for (index, v) in vals.iter().enumerate() {
        let m = v.norm();
        if m < LOG_FLOOR {
            return Err(FlatError::LogSingularOnGrid { index, value: m });
        }
        total += m.ln();
    }
    Ok(total / grid.size() as f64)
}

/// `log Q(0) − ∫ log|P| dz`. Zero up to quadrature error when no root of
/// `P` sits on the circle.
pub fn jensen_residual(p: &TrigPoly, f: &InnerOuterFactorization, grid: &Grid) -> Result<f64> {
    Ok(f.q0().ln() - log_integral(p, grid)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterTrack {
    pub q0: f64,
    pub eps: f64,
}

/// `Q_j(0)` for each polynomial, with its grid ε = sup ||P|² − 1|.
pub fn outer_constant_track(seq: &[TrigPoly]) -> Result<Vec<OuterTrack>> {
    seq.iter()
        .map(|p| {
            let f = inner_outer(p)?;
            let grid = Grid::default_for(p);
            let eps = grid
                .sample(p)
                .iter()
                .map(|v| (v.norm_sqr() - 1.0).abs())
                .fold(0.0, f64::max);
            Ok(OuterTrack { q0: f.q0(), eps })
        })
        .collect()
}
