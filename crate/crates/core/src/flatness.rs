//! Scalar flatness diagnostics: ε, L, N, the Gram matrix of the variables
//! `z^{n_k} − conj(b_k)` under `|P|²dz`, its entry sum `r`, and the
//! derived ratios.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::grid::Grid;
use crate::poly::{ModulusSpectrum, TrigPoly};

/// Slack added to both sides of the `r` sandwich, since grid ε can only
/// undershoot the true sup.
pub const SANDWICH_SLACK: f64 = 1e-6;

/// The two routes to `r` must agree to this, relative to `max(1, |r|)`.
pub const GRAM_ROUTE_TOL: f64 = 1e-9;

const UNIT_NORM_TOL: f64 = 1e-10;

/// Denominators below this count as vanished.
const VANISHING: f64 = 1e-12;

/// Gram matrix on the signed indices `k = −N..−1, 1..N`, ordered by
/// exponent. Entry `(k, l)` is `∫ z^{n_k − n_l} |P|² dz − conj(b_k) b_l`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    exponents: Vec<i64>,
    b: Vec<Complex64>,
    entries: DMatrix<Complex64>,
}

impl GramMatrix {
    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn b(&self) -> &[Complex64] {
        &self.b
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    /// `(MV, V)` for the all-ones `V`.
    pub fn sum(&self) -> Complex64 {
        self.entries.iter().sum()
    }

    /// Largest `|m(k,l) − conj(m(l,k))|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.entries[(i, j)] - self.entries[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// Smallest eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.entries + self.entries.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }
}

pub fn gram_matrix(p: &TrigPoly) -> Result<GramMatrix> {
    gram_from_spectrum(&p.squared_modulus())
}

fn gram_from_spectrum(s: &ModulusSpectrum) -> Result<GramMatrix> {
    if s.n() == 0 {
        return Err(FlatError::ConstantModulus);
    }
    let (exponents, b): (Vec<i64>, Vec<Complex64>) = s.offcenter().iter().copied().unzip();
    let dim = exponents.len();
    // ∫ z^d |P|² dz is the coefficient of |P|² at −d
    let entries = DMatrix::from_fn(dim, dim, |k, l| {
        s.coeff(exponents[l] - exponents[k]) - b[k].conj() * b[l]
    });
    Ok(GramMatrix {
        exponents,
        b,
        entries,
    })
}

/// `r` from the entrywise sum, and from `∫|f|²|P|²dz − L²` with
/// `f = Σ_{k≠0} z^{n_k}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GramSumRoutes {
    pub entrywise: f64,
    pub identity: f64,
}

pub fn gram_sum_routes(p: &TrigPoly) -> Result<GramSumRoutes> {
    routes_from_spectrum(&p.squared_modulus())
}

fn routes_from_spectrum(s: &ModulusSpectrum) -> Result<GramSumRoutes> {
    if s.n() == 0 {
        return Err(FlatError::ConstantModulus);
    }
    let off = s.offcenter();

    let mut entry_sum = Complex64::new(0.0, 0.0);
    for (nk, bk) in off {
        for (nl, bl) in off {
            entry_sum += s.coeff(nl - nk) - bk.conj() * bl;
        }
    }
    let scale = entry_sum.re.abs().max(1.0);
    if entry_sum.im.abs() > 1e-10 * scale {
        return Err(FlatError::GramIdentityViolation {
            entrywise: entry_sum.re,
            identity: f64::NAN,
        });
    }

    // |f|² has coefficient #{(k,l) : n_k − n_l = e} at e
    let mut f_auto: BTreeMap<i64, u64> = BTreeMap::new();
    for (nk, _) in off {
        for (nl, _) in off {
            *f_auto.entry(nk - nl).or_default() += 1;
        }
    }
    let integral: Complex64 = f_auto
        .iter()
        .map(|(e, count)| s.coeff(-e) * *count as f64)
        .sum();
    let l = s.l_sum();
    let identity = integral.re - l * l;

    Ok(GramSumRoutes {
        entrywise: entry_sum.re,
        identity,
    })
}

/// `r(P)`, checked against the integral identity.
pub fn gram_sum_r(p: &TrigPoly) -> Result<f64> {
    checked_r(&p.squared_modulus())
}

fn checked_r(s: &ModulusSpectrum) -> Result<f64> {
    let routes = routes_from_spectrum(s)?;
    let scale = routes.entrywise.abs().max(1.0);
    if (routes.entrywise - routes.identity).abs() > GRAM_ROUTE_TOL * scale {
        return Err(FlatError::GramIdentityViolation {
            entrywise: routes.entrywise,
            identity: routes.identity,
        });
    }
    Ok(routes.entrywise)
}

/// Everything measured about one unit-norm polynomial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FlatnessReport {
    /// Number of nonzero terms of `P`.
    pub m: usize,
    /// Grid sup of `||P|² − 1|`; a lower bound on the true value.
    pub eps: f64,
    #[serde(rename = "L")]
    pub l: f64,
    #[serde(rename = "N")]
    pub n: usize,
    pub r: Option<f64>,
    #[serde(rename = "r_over_N")]
    pub r_over_n: Option<f64>,
    #[serde(rename = "N_over_L2")]
    pub n_over_l2: Option<f64>,
    #[serde(rename = "r_over_2N")]
    pub r_over_2n: Option<f64>,
    /// `(1/M) Σ ||P(z_t)| − 1|`
    pub l1_deviation: f64,
    /// Fraction of the grid where `||P(z_t)| − 1| > tau`.
    pub measure_deviation: f64,
    pub tau: f64,
    /// `2N(1−ε)−ε ≤ r ≤ 2N(1+ε)+ε` with slack; absent when `r` is.
    pub bounds_ok: Option<bool>,
    pub grid: usize,
}

impl FlatnessReport {
    /// Lower and upper ends of the `r` sandwich at this report's ε and N.
    pub fn sandwich(&self) -> (f64, f64) {
        let two_n = 2.0 * self.n as f64;
        (
            two_n * (1.0 - self.eps) - self.eps,
            two_n * (1.0 + self.eps) + self.eps,
        )
    }
}

pub fn flatness_report(p: &TrigPoly, grid: &Grid, tau: f64) -> Result<FlatnessReport> {
    let norm = p.l2_norm();
    if (norm - 1.0).abs() > UNIT_NORM_TOL {
        return Err(FlatError::NotUnitNorm(norm));
    }
    grid.check_sup_resolution(p)?;

    let vals = grid.sample(p);
    let eps = vals
        .iter()
        .map(|v| (v.norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    let l1_deviation = grid.mean(vals.iter().map(|v| (v.norm() - 1.0).abs()));
    let exceed = vals.iter().filter(|v| (v.norm() - 1.0).abs() > tau).count();

    let spec = p.squared_modulus();
    let n = spec.n();
    let l = spec.l_sum();
    let r = if n == 0 { None } else { Some(checked_r(&spec)?) };

    let mut report = FlatnessReport {
        m: p.len(),
        eps,
        l,
        n,
        r,
        r_over_n: r.map(|r| r / n as f64),
        n_over_l2: (n > 0 && l.abs() > VANISHING).then(|| n as f64 / (l * l)),
        r_over_2n: r.map(|r| r / (2.0 * n as f64)),
        l1_deviation,
        measure_deviation: exceed as f64 / grid.size() as f64,
        tau,
        bounds_ok: None,
        grid: grid.size(),
    };
    let (lo, hi) = report.sandwich();
    report.bounds_ok = r.map(|r| lo - SANDWICH_SLACK <= r && r <= hi + SANDWICH_SLACK);
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioRow {
    pub j: usize,
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "L")]
    pub l: f64,
    pub eps: f64,
    pub r: Option<f64>,
    #[serde(rename = "r_over_N")]
    pub r_over_n: Option<f64>,
    #[serde(rename = "N_over_L2")]
    pub n_over_l2: Option<f64>,
    #[serde(rename = "r_over_2N")]
    pub r_over_2n: Option<f64>,
}

impl From<(usize, &FlatnessReport)> for RatioRow {
    fn from((j, rep): (usize, &FlatnessReport)) -> Self {
        RatioRow {
            j,
            m: rep.m,
            n: rep.n,
            l: rep.l,
            eps: rep.eps,
            r: rep.r,
            r_over_n: rep.r_over_n,
            n_over_l2: rep.n_over_l2,
            r_over_2n: rep.r_over_2n,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioTable {
    pub rows: Vec<RatioRow>,
    /// Largest `N_j/L_j²` over rows where it is defined.
    pub max_n_over_l2: Option<f64>,
    pub max_r_over_n: Option<f64>,
    pub min_r_over_n: Option<f64>,
    pub r_over_n_nondecreasing: bool,
    pub r_over_n_nonincreasing: bool,
    /// Largest `|r_j/(2N_j) − 1|` over the last quarter of the rows.
    pub r_over_2n_tail_gap: Option<f64>,
}

/// Header of the CSV form of a [`RatioTable`].
pub const RATIO_CSV_HEADER: &str = "j,m,N,L,eps,r,r_over_N,N_over_L2,r_over_2N";

/// Reports for each polynomial (rows numbered from 1) and the sequence
/// summary. `grid_size` overrides the per-polynomial default grid.
pub fn ratio_diagnostics(seq: &[TrigPoly], grid_size: Option<usize>) -> Result<RatioTable> {
    let reports = seq
        .iter()
        .map(|p| {
            let grid = match grid_size {
                Some(m) => Grid::new(m)?,
                None => Grid::default_for(p),
            };
            flatness_report(p, &grid, 0.5)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ratio_table(&reports))
}

pub fn ratio_table(reports: &[FlatnessReport]) -> RatioTable {
    let rows: Vec<RatioRow> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| RatioRow::from((i + 1, r)))
        .collect();
    let fmax = |it: &mut dyn Iterator<Item = f64>| it.reduce(f64::max);
    let fmin = |it: &mut dyn Iterator<Item = f64>| it.reduce(f64::min);
    let ratios: Vec<f64> = rows.iter().filter_map(|r| r.r_over_n).collect();
    let tail_start = rows.len() - rows.len() / 4;
    RatioTable {
        max_n_over_l2: fmax(&mut rows.iter().filter_map(|r| r.n_over_l2)),
        max_r_over_n: fmax(&mut ratios.iter().copied()),
        min_r_over_n: fmin(&mut ratios.iter().copied()),
        r_over_n_nondecreasing: ratios.windows(2).all(|w| w[1] >= w[0]),
        r_over_n_nonincreasing: ratios.windows(2).all(|w| w[1] <= w[0]),
        r_over_2n_tail_gap: fmax(
            &mut rows[tail_start.min(rows.len().saturating_sub(1))..]
                .iter()
                .filter_map(|r| r.r_over_2n.map(|v| (v - 1.0).abs())),
        ),
        rows,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EgorovPick {
    /// Position in the input sequence, from 0.
    pub index: usize,
    /// Pick number, from 1; the pick must satisfy the `2^{−k}` schedule.
    pub k: u32,
    /// Grid measure of `{ |1 − |P(z_t)|| ≥ 2^{−k} }`.
    pub deviation_measure: f64,
}

/// Greedy subsequence `j_1 < j_2 < …` with the grid measure of
/// `{ |1 − |P_{j_k}|| ≥ 2^{−k} }` at most `2^{−k}`.
pub fn egorov_select(seq: &[TrigPoly], grid: &Grid) -> Vec<EgorovPick> {
    let mut picks = Vec::new();
    let mut k = 1u32;
    for (index, p) in seq.iter().enumerate() {
        let thresh = 0.5f64.powi(k as i32);
        let bad = grid
            .sample(p)
            .iter()
            .filter(|v| (1.0 - v.norm()).abs() >= thresh)
            .count();
        let measure = bad as f64 / grid.size() as f64;
        if measure <= thresh {
            picks.push(EgorovPick {
                index,
                k,
                deviation_measure: measure,
            });
            k += 1;
        }
    }
    picks
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{class_b, gauss_fresnel, single_spike, ClassBSpec};
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn dirichlet(m: usize) -> TrigPoly {
        class_b(&ClassBSpec::consecutive(m).unwrap())
    }

    #[test]
    fn gram_of_two_term_polynomial() {
        let g = gram_matrix(&dirichlet(2)).unwrap();
        assert_eq!(g.exponents(), &[-1, 1]);
        let want = [[0.75, -0.25], [-0.25, 0.75]];
        for (i, row) in want.iter().enumerate() {
            for (j, w) in row.iter().enumerate() {
                assert_abs_diff_eq!(g.entries()[(i, j)].re, *w, epsilon = 1e-15);
                assert_abs_diff_eq!(g.entries()[(i, j)].im, 0.0, epsilon = 1e-15);
            }
        }
        assert_abs_diff_eq!(g.sum().re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(g.min_eigenvalue(), 0.5, epsilon = 1e-12);
    }

    #[test]
    fn gram_of_spike() {
        let (n, d) = (4, 0.3);
        let b = d / (1.0 + d * d);
        let g = gram_matrix(&single_spike(n, d).unwrap()).unwrap();
        assert_abs_diff_eq!(g.entries()[(0, 0)].re, 1.0 - b * b, epsilon = 1e-15);
        assert_abs_diff_eq!(g.entries()[(0, 1)].re, -b * b, epsilon = 1e-15);
        let r = gram_sum_r(&single_spike(n, d).unwrap()).unwrap();
        let l = 2.0 * b;
        assert_abs_diff_eq!(r, 2.0 - l * l, epsilon = 1e-14);
    }

    #[test]
    fn gram_diagonal_and_hermitian_for_complex_input() {
        let p = gauss_fresnel(12).unwrap();
        let g = gram_matrix(&p).unwrap();
        for (i, b) in g.b().iter().enumerate() {
            assert_abs_diff_eq!(g.entries()[(i, i)].re, 1.0 - b.norm_sqr(), epsilon = 1e-12);
            assert_abs_diff_eq!(g.entries()[(i, i)].im, 0.0, epsilon = 1e-12);
        }
        assert!(g.hermitian_defect() < 1e-12);
        assert!(g.min_eigenvalue() > -1e-9);
    }

    #[test]
    fn gram_sum_routes_agree_on_examples() {
        let r2 = gram_sum_routes(&dirichlet(2)).unwrap();
        assert_abs_diff_eq!(r2.entrywise, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(r2.identity, 1.0, epsilon = 1e-14);

        let r3 = gram_sum_routes(&dirichlet(3)).unwrap();
        assert_abs_diff_eq!(r3.entrywise, 10.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(r3.identity, 22.0 / 3.0 - 4.0, epsilon = 1e-13);
    }

    #[test]
    fn constant_modulus_has_no_gram() {
        let z9 = TrigPoly::monomial(9, c(1.0, 0.0));
        assert_eq!(gram_matrix(&z9), Err(FlatError::ConstantModulus));
        let rep = flatness_report(&z9, &Grid::new(4096).unwrap(), 0.1).unwrap();
        assert_eq!(rep.n, 0);
        assert_abs_diff_eq!(rep.eps, 0.0, epsilon = 1e-12);
        assert_eq!(rep.r, None);
        assert_eq!(rep.r_over_n, None);
        assert_eq!(rep.bounds_ok, None);
    }

    #[test]
    fn report_examples() {
        let g = Grid::new(4096).unwrap();
        let rep = flatness_report(&dirichlet(2), &g, 0.5).unwrap();
        assert_abs_diff_eq!(rep.eps, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep.l, 1.0, epsilon = 1e-14);
        assert_eq!(rep.n, 1);
        assert_abs_diff_eq!(rep.r.unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.r_over_n.unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(rep.n_over_l2.unwrap(), 1.0, epsilon = 1e-14);
        assert_eq!(rep.bounds_ok, Some(true));

        let rep3 = flatness_report(&dirichlet(3), &g, 0.5).unwrap();
        assert_abs_diff_eq!(rep3.eps, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rep3.r_over_n.unwrap(), 5.0 / 3.0, epsilon = 1e-13);
        assert_abs_diff_eq!(rep3.n_over_l2.unwrap(), 0.5, epsilon = 1e-13);
        let (lo, hi) = rep3.sandwich();
        assert_abs_diff_eq!(lo, -6.0, epsilon = 1e-12);
        assert_abs_diff_eq!(hi, 14.0, epsilon = 1e-12);
        assert_eq!(rep3.bounds_ok, Some(true));
    }

    #[test]
    fn report_requires_unit_norm() {
        let p = TrigPoly::from_dense(&[c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            flatness_report(&p, &Grid::new(4096).unwrap(), 0.5),
            Err(FlatError::NotUnitNorm(_))
        ));
    }

    #[test]
    fn l_matches_value_at_one() {
        for p in [dirichlet(7), gauss_fresnel(9).unwrap(), single_spike(3, 0.2).unwrap()] {
            let s = p.squared_modulus();
            let at_one = p.eval(c(1.0, 0.0)).norm_sqr() - 1.0;
            assert_abs_diff_eq!(s.l_sum(), at_one, epsilon = 1e-12);
        }
    }

    #[test]
    fn spike_ratio_table() {
        let seq: Vec<_> = (1..=20).map(|j| single_spike(j, 1.0 / j as f64).unwrap()).collect();
        let table = ratio_diagnostics(&seq, None).unwrap();
        for (j, row) in (1..=20).zip(&table.rows) {
            let d = 1.0 / j as f64;
            let l = 2.0 * d / (1.0 + d * d);
            assert_abs_diff_eq!(row.r_over_2n.unwrap(), 1.0 - l * l / 2.0, epsilon = 1e-12);
        }
        assert!(table.r_over_n_nondecreasing);
        assert!(table.r_over_2n_tail_gap.unwrap() < 0.01);
    }

    #[test]
    fn dirichlet_ratio_bound() {
        let seq: Vec<_> = (2..=32).map(dirichlet).collect();
        let table = ratio_diagnostics(&seq, None).unwrap();
        for (m, row) in (2..=32).zip(&table.rows) {
            assert_eq!(row.n, m - 1);
            assert_abs_diff_eq!(row.n_over_l2.unwrap(), 1.0 / (m as f64 - 1.0), epsilon = 1e-12);
        }
        assert!(table.max_n_over_l2.unwrap() <= 2.0);
    }

    #[test]
    fn egorov_examples() {
        let g = Grid::new(4096).unwrap();
        let ones = vec![TrigPoly::constant(c(1.0, 0.0)); 8];
        let picks = egorov_select(&ones, &g);
        assert_eq!(picks.iter().map(|p| p.index).collect::<Vec<_>>(), (0..8).collect::<Vec<_>>());

        let spikes: Vec<_> = (1..=20)
            .map(|j| single_spike(j, 0.5f64.powi(j as i32)).unwrap())
            .collect();
        assert!(egorov_select(&spikes, &g).len() >= 10);

        let kernels: Vec<_> = (2..=32).map(dirichlet).collect();
        assert!(egorov_select(&kernels, &g).len() < 3);
    }

    #[test]
    fn dilation_preserves_diagnostics() {
        let p = class_b(&ClassBSpec::new(vec![2, 3, 7]).unwrap());
        let q = p.dilate(5);
        let (sp, sq) = (p.squared_modulus(), q.squared_modulus());
        assert_eq!(sp.n(), sq.n());
        assert_eq!(sp.l_sum(), sq.l_sum());
        assert_eq!(gram_sum_r(&p).unwrap(), gram_sum_r(&q).unwrap());
    }
}
