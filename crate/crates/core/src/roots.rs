//! Simultaneous root finding (Aberth–Ehrlich) for analytic polynomials.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{FlatError, Result};
use crate::poly::TrigPoly;

pub const MAX_SWEEPS: usize = 500;

/// Returned roots satisfy `|p(α)| ≤ RESIDUAL_TOL · max|c| · max(1, |α|)^deg`.
pub const RESIDUAL_TOL: f64 = 1e-10;

/// Roots closer than this are treated as one multiple root.
pub const CLUSTER_TOL: f64 = 1e-7;

/// All roots of `p` with multiplicity.
///
/// `p` is split as `z^d · A(z)` with `A(0) ≠ 0`; the result holds the roots of
/// `A` followed by `d` zeros (none when `d < 0`).
pub fn find_roots(p: &TrigPoly) -> Result<Vec<Complex64>> {
    let Some(d) = p.min_exp() else {
        return Err(FlatError::EmptyPolynomial);
    };
    let analytic = p.shift(-d);
    let degree = analytic.max_exp().unwrap_or(0) as usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); degree + 1];
    for (e, c) in analytic.terms() {
        coeffs[e as usize] = c;
    }

    let mut roots = aberth(&coeffs)?;
    cluster(&mut roots);

    let residuals = scaled_residuals(&coeffs, &roots);
    let worst = residuals.iter().copied().fold(0.0, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(FlatError::RootFindingDiverged {
            sweeps: MAX_SWEEPS,
            max_residual: worst,
            residuals,
        });
    }

    roots.extend(std::iter::repeat_n(Complex64::new(0.0, 0.0), d.max(0) as usize));
    Ok(roots)
}

/// `|p(α)| / (max|c| · max(1, |α|)^deg)` for each root.
pub fn scaled_residuals(coeffs: &[Complex64], roots: &[Complex64]) -> Vec<f64> {
    let scale = coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let degree = coeffs.len().saturating_sub(1) as i32;
    roots
        .iter()
        .map(|r| horner(coeffs, *r).norm() / (scale * r.norm().max(1.0).powi(degree)))
        .collect()
}

fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * z + c)
}

/// `(p(z), p'(z))` in one pass.
fn horner_with_derivative(coeffs: &[Complex64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for c in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
    }
    (p, dp)
}

fn aberth(coeffs: &[Complex64]) -> Result<Vec<Complex64>> {
    let degree = coeffs.len() - 1;
    if degree == 0 {
        return Ok(Vec::new());
    }
    // geometric mean of the root moduli; coeffs[0] ≠ 0 after the shift
    let radius = (coeffs[0].norm() / coeffs[degree].norm()).powf(1.0 / degree as f64);

    // deterministic starts on a circle, rotated off the real axis
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / degree as f64 + 0.4))
        .collect();

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut max_step: f64 = 0.0;
        for i in 0..degree {
            let (p, dp) = horner_with_derivative(coeffs, z[i]);
            if p == Complex64::new(0.0, 0.0) {
                continue;
            }
            let ratio = p / dp;
            let repulsion: Complex64 = (0..degree)
                .filter(|j| *j != i)
                .map(|j| 1.0 / (z[i] - z[j]))
                .sum();
            let step = ratio / (1.0 - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if max_step < 1e-15 {
            converged = true;
            break;
        }
    }

    // Newton polish; harmless for simple roots, a no-op at exact zeros
    for r in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = horner_with_derivative(coeffs, *r);
            let step = p / dp;
            if !step.is_finite() || step.norm() == 0.0 {
                break;
            }
            let cand = *r - step;
            if horner(coeffs, cand).norm() < p.norm() {
                *r = cand;
            } else {
                break;
            }
        }
    }

    if !converged {
        let residuals = scaled_residuals(coeffs, &z);
        let worst = residuals.iter().copied().fold(0.0, f64::max);
        if !(worst <= RESIDUAL_TOL) {
            return Err(FlatError::RootFindingDiverged {
                sweeps: MAX_SWEEPS,
                max_residual: worst,
                residuals,
            });
        }
    }
    Ok(z)
}

/// Replaces each cluster of roots within `CLUSTER_TOL` by its centroid.
fn cluster(roots: &mut [Complex64]) {
    let n = roots.len();
    let mut assigned = vec![false; n];
    for i in 0..n {
        if assigned[i] {
            continue;
        }
        let members: Vec<usize> = (i..n)
            .filter(|j| !assigned[*j] && (roots[*j] - roots[i]).norm() < CLUSTER_TOL)
            .collect();
        if members.len() > 1 {
            let centroid =
                members.iter().map(|j| roots[*j]).sum::<Complex64>() / members.len() as f64;
            for j in &members {
                roots[*j] = centroid;
            }
        }
        for j in members {
            assigned[j] = true;
        }
    }
}
