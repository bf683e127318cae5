//! Dissociated families and partial generalized Riesz products.
//!
//! A family `P_1(z^{l_1}), P_2(z^{l_2}), …` is dissociated when every
//! exponent of the formal expansion of `Π |P_j(z^{l_j})|²` arises from a
//! single choice of one term per factor. The Fourier coefficients of the
//! partial products then stabilize exactly, and the measures
//! `Π_{j≤n} |P_j(z^{l_j})|² dz` converge weakly to the Riesz product `μ`.
//! The partial products `Π_{j≤n} |P_j(z^{l_j})|` converge in `L¹(dz)` to
//! `sqrt(dμ/dz)`, so an `L¹` trace drifting to zero is a sign that `μ` is
//! singular.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{FlatError, Result};
use crate::flatness::FlatnessReport;
use crate::grid::Grid;
use crate::poly::{ModulusSpectrum, TrigPoly};

pub const DEFAULT_TERM_CAP: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct ScaledFactor {
    pub poly: TrigPoly,
    pub scale: u64,
}

/// Factors `P_j(z^{l_j})` with strictly increasing scales.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaledFamily {
    factors: Vec<ScaledFactor>,
    verified: bool,
}

impl ScaledFamily {
    /// Unverified family; scales must be positive and strictly increasing.
    pub fn new(factors: Vec<ScaledFactor>) -> Result<Self> {
        if factors.iter().any(|f| f.scale == 0) {
            return Err(FlatError::InvalidParameter("scales must be positive".into()));
        }
        if factors.windows(2).any(|w| w[1].scale <= w[0].scale) {
            return Err(FlatError::InvalidParameter(
                "scales must be strictly increasing".into(),
            ));
        }
        Ok(ScaledFamily {
            factors,
            verified: false,
        })
    }

    /// One polynomial at the scales `base^1, base^2, …, base^depth`.
    pub fn geometric(p: &TrigPoly, base: u64, depth: usize) -> Result<Self> {
        let mut scale = 1u64;
        let mut factors = Vec::with_capacity(depth);
        for _ in 0..depth {
            scale = scale.checked_mul(base).ok_or_else(|| {
                FlatError::InvalidParameter("scale overflows u64".into())
            })?;
            factors.push(ScaledFactor {
                poly: p.clone(),
                scale,
            });
        }
        ScaledFamily::new(factors)
    }

    pub fn factors(&self) -> &[ScaledFactor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_verified(&self) -> bool {
        self.verified
    }

    pub fn scales(&self) -> Vec<u64> {
        self.factors.iter().map(|f| f.scale).collect()
    }

    /// Runs [`is_dissociated`] and marks the family verified on success.
    pub fn verify(mut self) -> Result<Self> {
        match is_dissociated(&self)? {
            Dissociation::Dissociated => {
                self.verified = true;
                Ok(self)
            }
            Dissociation::Collision { factor, exponent } => {
                Err(FlatError::NotDissociated { factor, exponent })
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Dissociation {
    Dissociated,
    /// Adding factor `factor` (from 0) produced `exponent` more than once.
    Collision { factor: usize, exponent: i64 },
}

impl Dissociation {
    pub fn is_ok(&self) -> bool {
        matches!(self, Dissociation::Dissociated)
    }
}

/// Dissociation of the squared moduli `|P_j(z^{l_j})|²`.
pub fn is_dissociated(fam: &ScaledFamily) -> Result<Dissociation> {
    is_dissociated_with_cap(fam, DEFAULT_TERM_CAP)
}

pub fn is_dissociated_with_cap(fam: &ScaledFamily, cap: usize) -> Result<Dissociation> {
    is_dissociated_factors(&fam.factors, cap)
}

/// [`is_dissociated`] on bare factors, which may repeat a scale.
pub fn is_dissociated_factors(factors: &[ScaledFactor], cap: usize) -> Result<Dissociation> {
    let supports: Vec<Vec<i64>> = factors
        .iter()
        .map(|f| dilated(&f.poly.squared_modulus().support(), f.scale))
        .collect();
    first_collision(&supports, cap)
}

/// Dissociation of the polynomials `P_j(z^{l_j})` themselves.
pub fn polys_dissociated(fam: &ScaledFamily) -> Result<Dissociation> {
    polys_dissociated_factors(&fam.factors)
}

/// [`polys_dissociated`] on bare factors, which may repeat a scale.
pub fn polys_dissociated_factors(factors: &[ScaledFactor]) -> Result<Dissociation> {
    let supports: Vec<Vec<i64>> = factors
        .iter()
        .map(|f| {
            let mut s: Vec<i64> = f.poly.terms().map(|(e, _)| e).collect();
            s.push(0);
            s.sort_unstable();
            s.dedup();
            dilated(&s, f.scale)
        })
        .collect();
    first_collision(&supports, DEFAULT_TERM_CAP)
}

fn dilated(support: &[i64], scale: u64) -> Vec<i64> {
    support.iter().map(|e| e * scale as i64).collect()
}

/// Expands the sum set one factor at a time. Each support must contain 0,
/// which stands for leaving the factor out of a sub-product.
fn first_collision(supports: &[Vec<i64>], cap: usize) -> Result<Dissociation> {
    let mut reached: Vec<i64> = vec![0];
    for (factor, support) in supports.iter().enumerate() {
        let needed = reached.len() * support.len();
        if needed > cap {
            return Err(FlatError::ExpansionTooLarge { needed, cap });
        }
        let mut counts: BTreeMap<i64, u32> = BTreeMap::new();
        for s in &reached {
            for d in support {
                *counts.entry(s + d).or_default() += 1;
            }
        }
        let mut repeated = counts.iter().filter(|(_, c)| **c > 1).map(|(e, _)| *e);
        let smallest_positive = repeated.clone().find(|e| *e > 0);
        if let Some(exponent) = smallest_positive.or_else(|| repeated.next_back()) {
            return Ok(Dissociation::Collision { factor, exponent });
        }
        reached = counts.into_keys().collect();
    }
    Ok(Dissociation::Dissociated)
}

/// Greedy scales: `l_1 = 1`, then each next scale is the smallest integer
/// above twice the two-sided exponent span of the product so far (and above
/// the previous scale).
pub fn choose_scales(polys: &[TrigPoly]) -> Result<ScaledFamily> {
    if polys.is_empty() {
        return Err(FlatError::InvalidParameter("choose_scales needs a polynomial".into()));
    }
    let mut factors = Vec::with_capacity(polys.len());
    let mut reach: u64 = 0;
    let mut prev: u64 = 0;
    for p in polys {
        let scale = if factors.is_empty() {
            1
        } else {
            (2 * reach + 1).max(prev + 1)
        };
        reach += scale * p.span();
        prev = scale;
        factors.push(ScaledFactor {
            poly: p.clone(),
            scale,
        });
    }
    ScaledFamily::new(factors)?.verify()
}

/// Partial Riesz product state, extended one factor at a time.
///
/// Each factor enters through its unit-mass spectrum `|P_j|² / ‖P_j‖²`, so
/// the constant coefficient of every partial product is exactly 1.
#[derive(Debug, Clone)]
pub struct RieszProductState {
    family: ScaledFamily,
    grid: Grid,
    term_cap: usize,
    depth: usize,
    coeffs: BTreeMap<i64, Complex64>,
    first_touch: BTreeMap<i64, usize>,
    sqrt_density: Vec<f64>,
    l1_trace: Vec<f64>,
    mass_trace: Vec<f64>,
}

impl RieszProductState {
    /// Depth-0 state: coefficient map `{0 ↦ 1}`, density 1.
    pub fn new(family: ScaledFamily, grid: Grid) -> Self {
        let size = grid.size();
        RieszProductState {
            family,
            grid,
            term_cap: DEFAULT_TERM_CAP,
            depth: 0,
            coeffs: BTreeMap::from([(0, Complex64::new(1.0, 0.0))]),
            first_touch: BTreeMap::from([(0, 0)]),
            sqrt_density: vec![1.0; size],
            l1_trace: vec![1.0],
            mass_trace: vec![1.0],
        }
    }

    pub fn with_term_cap(mut self, cap: usize) -> Self {
        self.term_cap = cap;
        self
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn family(&self) -> &ScaledFamily {
        &self.family
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    /// Exact coefficients of `Π_{j≤depth} |P_j(z^{l_j})|²`.
    pub fn coeffs(&self) -> &BTreeMap<i64, Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, e: i64) -> Complex64 {
        self.coeffs.get(&e).copied().unwrap_or_default()
    }

    /// Depth at which each exponent first became nonzero.
    pub fn first_touch(&self) -> &BTreeMap<i64, usize> {
        &self.first_touch
    }

    /// Grid samples of `Π_{j≤depth} |P_j(z^{l_j})|`.
    pub fn sqrt_density(&self) -> &[f64] {
        &self.sqrt_density
    }

    /// `(1/M) Σ_t Π_{j≤n} |P_j|` for `n = 0..=depth`.
    pub fn l1_of_sqrt_density(&self) -> &[f64] {
        &self.l1_trace
    }

    /// Grid mass `(1/M) Σ_t Π_{j≤n} |P_j|²` for `n = 0..=depth`.
    pub fn mass_trace(&self) -> &[f64] {
        &self.mass_trace
    }

    /// Multiplies in the next factor. Returns the exponents it created.
    pub fn extend(&mut self) -> Result<Vec<i64>> {
        let Some(factor) = self.family.factors.get(self.depth) else {
            return Err(FlatError::InvalidParameter(format!(
                "family has only {} factors",
                self.family.len()
            )));
        };
        let required = 8 * factor.scale as usize * factor.poly.span() as usize;
        if self.grid.size() < required {
            return Err(FlatError::GridTooCoarse {
                size: self.grid.size(),
                required,
            });
        }
        let spec = unit_mass(&factor.poly.squared_modulus())?;
        let needed = self.coeffs.len() * spec.len();
        if needed > self.term_cap {
            return Err(FlatError::ExpansionTooLarge {
                needed,
                cap: self.term_cap,
            });
        }

        let next_depth = self.depth + 1;
        let scale = factor.scale as i64;
        let mut next: BTreeMap<i64, Complex64> = BTreeMap::new();
        for (s, cs) in &self.coeffs {
            for (d, cd) in &spec {
                let e = s + scale * d;
                if next.insert(e, cs * cd).is_some() {
                    return Err(FlatError::NotDissociated {
                        factor: self.depth,
                        exponent: e,
                    });
                }
            }
        }
        for (e, c) in &self.coeffs {
            if next.get(e) != Some(c) {
                return Err(FlatError::StabilizationViolated(*e));
            }
        }
        let fresh: Vec<i64> = next
            .keys()
            .filter(|e| !self.coeffs.contains_key(e))
            .copied()
            .collect();
        for e in &fresh {
            self.first_touch.insert(*e, next_depth);
        }
        self.coeffs = next;

        let norm = factor.poly.l2_norm();
        let vals = self.grid.sample_dilated(&factor.poly, factor.scale);
        for (d, v) in self.sqrt_density.iter_mut().zip(&vals) {
            *d *= v.norm() / norm;
        }
        self.l1_trace.push(self.grid.mean(self.sqrt_density.iter().copied()));
        self.mass_trace
            .push(self.grid.mean(self.sqrt_density.iter().map(|d| d * d)));
        self.depth = next_depth;
        Ok(fresh)
    }

    /// Coefficients with `|exponent| ≤ window`, each with its first depth.
    pub fn stabilized_coeffs(&self, window: i64) -> BTreeMap<i64, StableCoeff> {
        self.coeffs
            .range(-window..=window)
            .map(|(e, c)| {
                (
                    *e,
                    StableCoeff {
                        value: *c,
                        first_depth: self.first_touch[e],
                    },
                )
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableCoeff {
    pub value: Complex64,
    pub first_depth: usize,
}

fn unit_mass(s: &ModulusSpectrum) -> Result<Vec<(i64, Complex64)>> {
    let center = s.center();
    if center == 0.0 {
        return Err(FlatError::EmptyPolynomial);
    }
    let mut out: Vec<(i64, Complex64)> = s
        .offcenter()
        .iter()
        .map(|(n, b)| (*n, b / center))
        .collect();
    let pos = out.partition_point(|(n, _)| *n < 0);
    out.insert(pos, (0, Complex64::new(1.0, 0.0)));
    Ok(out)
}

/// State after multiplying in the first `depth` factors of `fam`.
pub fn partial_product(fam: &ScaledFamily, depth: usize, grid: &Grid) -> Result<RieszProductState> {
    if depth > fam.len() {
        return Err(FlatError::InvalidParameter(format!(
            "depth {depth} exceeds the {} factors",
            fam.len()
        )));
    }
    let mut state = RieszProductState::new(fam.clone(), grid.clone());
    for _ in 0..depth {
        state.extend()?;
    }
    Ok(state)
}

/// The quantities of one polynomial that enter the singularity series.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesInput {
    #[serde(rename = "N")]
    pub n: usize,
    pub r: f64,
    #[serde(rename = "L")]
    pub l: f64,
}

impl TryFrom<&FlatnessReport> for SeriesInput {
    type Error = FlatError;

    fn try_from(rep: &FlatnessReport) -> Result<Self> {
        match rep.r {
            Some(r) => Ok(SeriesInput { n: rep.n, r, l: rep.l }),
            None => Err(FlatError::ConstantModulus),
        }
    }
}

/// Finite-sample stand-in for divergence of `Σ s_j`. Heuristic: no finite
/// computation certifies divergence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceWitness {
    /// The partial sum must reach this.
    pub min_total: f64,
    /// Fraction of the terms forming the tail.
    pub tail_fraction: f64,
    /// The tail must contribute at least this share of the total.
    pub min_tail_share: f64,
}

impl Default for DivergenceWitness {
    fn default() -> Self {
        DivergenceWitness {
            min_total: 10.0,
            tail_fraction: 0.25,
            min_tail_share: 0.05,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Verdict {
    DivergentCriterionMet,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SingularityDiagnostic {
    /// `s_j = min{1, sqrt(N_j / r_j)}`
    pub s: Vec<f64>,
    /// `A_n = Σ_{j≤n} s_j`
    pub partial_sums: Vec<f64>,
    pub lambda: Vec<f64>,
    /// Partial sums of `Σ λ_j s_j`.
    pub series5: Vec<f64>,
    /// Partial sums of `Σ λ_j² s_j² N_j / L_j²`; absent from the first
    /// index where `L_j` vanishes.
    pub series6: Vec<Option<f64>>,
    pub verdict: Verdict,
    pub heuristic: bool,
    pub witness: DivergenceWitness,
}

/// Default weights `λ_j = s_j / A_j`. This does not reproduce the existence
/// argument's guarantee in general; pass explicit weights to override.
pub fn default_lambda(s: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    s.iter()
        .map(|sj| {
            acc += sj;
            sj / acc
        })
        .collect()
}

pub fn singularity_diagnostic(
    inputs: &[SeriesInput],
    lambda: Option<&[f64]>,
    witness: DivergenceWitness,
) -> Result<SingularityDiagnostic> {
    let s = inputs
        .iter()
        .enumerate()
        .map(|(index, inp)| {
            if !(inp.r > 0.0) {
                return Err(FlatError::InvalidGramSum { index, r: inp.r });
            }
            Ok((inp.n as f64 / inp.r).sqrt().min(1.0))
        })
        .collect::<Result<Vec<f64>>>()?;
    let partial_sums: Vec<f64> = s
        .iter()
        .scan(0.0, |acc, x| {
            *acc += x;
            Some(*acc)
        })
        .collect();

    let lambda = match lambda {
        Some(l) => l.to_vec(),
        None => default_lambda(&s),
    };
    let series = peyriere_series(inputs, &s, &lambda)?;

    let verdict = match partial_sums.last() {
        Some(&total) if total >= witness.min_total => {
            let n = s.len();
            let tail_len = ((n as f64 * witness.tail_fraction).ceil() as usize).max(1);
            let tail: f64 = s[n - tail_len..].iter().sum();
            if tail >= witness.min_tail_share * total {
                Verdict::DivergentCriterionMet
            } else {
                Verdict::Inconclusive
            }
        }
        _ => Verdict::Inconclusive,
    };

    Ok(SingularityDiagnostic {
        s,
        partial_sums,
        lambda,
        series5: series.series5,
        series6: series.series6,
        verdict,
        heuristic: true,
        witness,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeyriereSeries {
    pub series5: Vec<f64>,
    pub series6: Vec<Option<f64>>,
}

/// Partial sums of `Σ λ_j s_j` and `Σ λ_j² s_j² N_j / L_j²`.
pub fn peyriere_series(inputs: &[SeriesInput], s: &[f64], lambda: &[f64]) -> Result<PeyriereSeries> {
    for len in [s.len(), lambda.len()] {
        if len != inputs.len() {
            return Err(FlatError::SeriesLengthMismatch {
                expected: inputs.len(),
                got: len,
            });
        }
    }
    let mut acc5 = 0.0;
    let mut acc6 = Some(0.0);
    let mut series5 = Vec::with_capacity(s.len());
    let mut series6 = Vec::with_capacity(s.len());
    for ((inp, sj), lj) in inputs.iter().zip(s).zip(lambda) {
        acc5 += lj * sj;
        series5.push(acc5);
        acc6 = match acc6 {
            Some(a) if inp.l.abs() > 1e-12 => {
                Some(a + lj * lj * sj * sj * inp.n as f64 / (inp.l * inp.l))
            }
            _ => None,
        };
        series6.push(acc6);
    }
    Ok(PeyriereSeries { series5, series6 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{class_b, single_spike, ClassBSpec};
    use std::f64::consts::PI;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn one_plus_z() -> TrigPoly {
        TrigPoly::from_dense(&[c(1.0), c(1.0)])
    }

    fn half_pair() -> TrigPoly {
        one_plus_z().normalize_l2().unwrap()
    }

    fn fam(polys: &[(TrigPoly, u64)]) -> ScaledFamily {
        ScaledFamily::new(
            polys
                .iter()
                .map(|(p, l)| ScaledFactor {
                    poly: p.clone(),
                    scale: *l,
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn textbook_products() {
        // (1+z)(1+z²) = 1 + z + z² + z³
        let ok = fam(&[(one_plus_z(), 1), (one_plus_z(), 2)]);
        assert!(polys_dissociated(&ok).unwrap().is_ok());
        // the squared moduli need a wider gap: z·1 and z⁻¹·z² collide
        assert_eq!(
            is_dissociated(&ok).unwrap(),
            Dissociation::Collision { factor: 1, exponent: 1 }
        );
        assert!(is_dissociated(&fam(&[(one_plus_z(), 1), (one_plus_z(), 3)])).unwrap().is_ok());

        // (1+z)(1+z) = 1 + 2z + z²; a family cannot repeat a scale
        let clash = [
            ScaledFactor { poly: one_plus_z(), scale: 1 },
            ScaledFactor { poly: one_plus_z(), scale: 1 },
        ];
        assert_eq!(
            polys_dissociated_factors(&clash).unwrap(),
            Dissociation::Collision { factor: 1, exponent: 1 }
        );
        assert_eq!(
            is_dissociated_factors(&clash, DEFAULT_TERM_CAP).unwrap(),
            Dissociation::Collision { factor: 1, exponent: 1 }
        );
    }

    #[test]
    fn powers_of_three_are_dissociated() {
        let f = ScaledFamily::geometric(&half_pair(), 3, 4).unwrap();
        assert_eq!(f.scales(), vec![3, 9, 27, 81]);
        assert!(is_dissociated(&f).unwrap().is_ok());
        // base 2 collides: 2·1 + 4·(−1) = −2 = 2·(−1)
        let g = ScaledFamily::geometric(&half_pair(), 2, 3).unwrap();
        assert!(!is_dissociated(&g).unwrap().is_ok());
    }

    #[test]
    fn expansion_cap() {
        let f = ScaledFamily::geometric(&half_pair(), 3, 6).unwrap();
        assert!(matches!(
            is_dissociated_with_cap(&f, 100),
            Err(FlatError::ExpansionTooLarge { .. })
        ));
    }

    #[test]
    fn greedy_scale_examples() {
        let f = choose_scales(&[half_pair(), half_pair()]).unwrap();
        assert_eq!(f.scales(), vec![1, 3]);
        assert!(f.is_verified());

        assert_eq!(choose_scales(&[half_pair()]).unwrap().scales(), vec![1]);

        let tri = class_b(&ClassBSpec::consecutive(3).unwrap());
        let f3 = choose_scales(&[tri.clone(), tri.clone(), tri]).unwrap();
        assert_eq!(f3.scales(), vec![1, 5, 25]);

        let consts = vec![TrigPoly::constant(c(1.0)); 3];
        assert_eq!(choose_scales(&consts).unwrap().scales(), vec![1, 2, 3]);
    }

    #[test]
    fn empty_product() {
        let f = ScaledFamily::geometric(&half_pair(), 3, 2).unwrap();
        let st = partial_product(&f, 0, &Grid::new(1024).unwrap()).unwrap();
        assert_eq!(st.coeffs().len(), 1);
        assert_eq!(st.coeff(0), c(1.0));
        assert!(st.sqrt_density().iter().all(|d| *d == 1.0));
        assert_eq!(st.l1_of_sqrt_density(), &[1.0]);
    }

    #[test]
    fn depth_two_coefficients() {
        let f = ScaledFamily::geometric(&half_pair(), 3, 2).unwrap();
        let st = partial_product(&f, 2, &Grid::new(4096).unwrap()).unwrap();
        assert_eq!(st.coeff(0), c(1.0));
        assert_eq!(st.coeff(3), c(0.5));
        assert_eq!(st.coeff(9), c(0.5));
        assert_eq!(st.coeff(12), c(0.25));
        assert_eq!(st.coeff(6), c(0.25));
        assert_eq!(st.coeff(15), c(0.0));
        assert_eq!(st.coeffs().len(), 9);
        assert!((st.mass_trace()[2] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn window_and_first_touch() {
        let f = ScaledFamily::geometric(&half_pair(), 3, 3).unwrap();
        let st = partial_product(&f, 3, &Grid::new(4096).unwrap()).unwrap();
        let w = st.stabilized_coeffs(10);
        let got: Vec<(i64, f64, usize)> =
            w.iter().map(|(e, s)| (*e, s.value.re, s.first_depth)).collect();
        assert_eq!(
            got,
            vec![
                (-9, 0.5, 2),
                (-6, 0.25, 2),
                (-3, 0.5, 1),
                (0, 1.0, 0),
                (3, 0.5, 1),
                (6, 0.25, 2),
                (9, 0.5, 2),
            ]
        );
        let zero = st.stabilized_coeffs(0);
        assert_eq!(zero.len(), 1);
        assert_eq!(zero[&0].value, c(1.0));
    }

    #[test]
    fn non_dissociated_product_is_rejected() {
        let f = ScaledFamily::geometric(&half_pair(), 2, 3).unwrap();
        let err = partial_product(&f, 3, &Grid::new(4096).unwrap()).unwrap_err();
        assert!(matches!(err, FlatError::NotDissociated { .. }));
    }

    #[test]
    fn coarse_grid_is_rejected() {
        let f = ScaledFamily::geometric(&half_pair(), 3, 4).unwrap();
        let err = partial_product(&f, 4, &Grid::new(256).unwrap()).unwrap_err();
        assert_eq!(err, FlatError::GridTooCoarse { size: 256, required: 648 });
    }

    #[test]
    fn l1_trace_first_factor_and_range() {
        let f = ScaledFamily::geometric(&half_pair(), 3, 5).unwrap();
        let st = partial_product(&f, 5, &Grid::new(1 << 14).unwrap()).unwrap();
        let trace = st.l1_of_sqrt_density();
        assert!((trace[1] - 2.0 * 2f64.sqrt() / PI).abs() < 1e-6);
        for w in trace.windows(2) {
            assert!(w[1] > 0.0 && w[1] <= w[0]);
        }
    }

    #[test]
    fn spike_family_trace_bounded_below() {
        let polys: Vec<_> = (1..=8)
            .map(|j| single_spike(1, 0.5f64.powi(j)).unwrap())
            .collect();
        let f = choose_scales(&polys).unwrap();
        let top = *f.scales().last().unwrap();
        let grid = Grid::new(((8 * top) as usize).next_power_of_two()).unwrap();
        let st = partial_product(&f, 8, &grid).unwrap();
        // pointwise |P_j| ≥ (1 − δ_j)/sqrt(1 + δ_j²)
        let floor: f64 = (1..=8)
            .map(|j| {
                let d = 0.5f64.powi(j);
                (1.0 - d) / (1.0 + d * d).sqrt()
            })
            .product();
        for v in st.l1_of_sqrt_density() {
            assert!(*v >= floor);
        }
    }

    #[test]
    fn singularity_examples() {
        let flat: Vec<SeriesInput> = (0..10).map(|_| SeriesInput { n: 3, r: 3.0, l: 2.0 }).collect();
        let d = singularity_diagnostic(&flat, None, DivergenceWitness::default()).unwrap();
        assert!(d.s.iter().all(|s| *s == 1.0));
        assert_eq!(d.partial_sums.last(), Some(&10.0));
        assert_eq!(d.verdict, Verdict::DivergentCriterionMet);
        let d9 = singularity_diagnostic(&flat[..9], None, DivergenceWitness::default()).unwrap();
        assert_eq!(d9.verdict, Verdict::Inconclusive);

        let harmonic: Vec<SeriesInput> = (1..=50)
            .map(|j| SeriesInput { n: 4, r: 4.0 * (j * j) as f64, l: 2.0 })
            .collect();
        let h = singularity_diagnostic(&harmonic, None, DivergenceWitness::default()).unwrap();
        for (j, s) in (1..=50).zip(&h.s) {
            assert!((s - 1.0 / j as f64).abs() < 1e-15);
        }
        assert_eq!(h.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn singularity_rejects_nonpositive_r() {
        let bad = [SeriesInput { n: 1, r: 0.0, l: 1.0 }];
        assert_eq!(
            singularity_diagnostic(&bad, None, DivergenceWitness::default()),
            Err(FlatError::InvalidGramSum { index: 0, r: 0.0 })
        );
    }

    #[test]
    fn peyriere_series_examples() {
        assert_eq!(
            peyriere_series(&[], &[], &[]).unwrap(),
            PeyriereSeries { series5: vec![], series6: vec![] }
        );

        let one = [SeriesInput { n: 6, r: 24.0, l: 3.0 }];
        let s = [0.5];
        let lam = [0.8];
        let out = peyriere_series(&one, &s, &lam).unwrap();
        assert_eq!(out.series5, vec![0.8 * 0.5]);
        assert!((out.series6[0].unwrap() - 0.64 * 0.25 * 6.0 / 9.0).abs() < 1e-15);

        assert_eq!(
            peyriere_series(&one, &s, &[0.1, 0.2]),
            Err(FlatError::SeriesLengthMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn default_lambda_bounds_series6() {
        let inputs: Vec<SeriesInput> = (1..=200)
            .map(|j| SeriesInput { n: j, r: j as f64, l: (j as f64).sqrt() * 1.5 })
            .collect();
        let d = singularity_diagnostic(&inputs, None, DivergenceWitness::default()).unwrap();
        let max_ratio = inputs
            .iter()
            .map(|i| i.n as f64 / (i.l * i.l))
            .fold(0.0, f64::max);
        let bound = PI * PI / 6.0 * max_ratio;
        assert!(d.series6.iter().all(|v| v.unwrap() <= bound + 1e-12));
        // λ_j = 1/j here, so series (5) is the harmonic series
        assert!((d.series5[199] - (1..=200).map(|j| 1.0 / j as f64).sum::<f64>()).abs() < 1e-12);
    }
}
