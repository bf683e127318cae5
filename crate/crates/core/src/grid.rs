//! Uniform sampling grids on the unit circle.
//!
//! A grid of size `M` samples `z_t = exp(2πi (t + s) / M)` for `t = 0..M`,
//! where the phase offset `s` is `0` for the standard grid and `1/2` for the
//! shifted grid used when a polynomial vanishes at a standard grid point.
//! Sample angles are reduced through an integer twiddle index, so evaluating
//! `z^e` for large `e` loses no accuracy to argument reduction.

use std::f64::consts::PI;
use std::sync::{Arc, OnceLock};

use num_complex::Complex64;

use crate::error::{FlatError, Result};
use crate::poly::TrigPoly;

/// Smallest grid size ever chosen by default.
pub const MIN_DEFAULT_GRID: usize = 4096;

#[derive(Debug, Clone)]
pub struct Grid {
    size: usize,
    half_shift: bool,
    twiddles: OnceLock<Arc<Vec<Complex64>>>,
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size && self.half_shift == other.half_shift
    }
}

impl Grid {
    /// Standard grid; `size` must be a power of two.
    pub fn new(size: usize) -> Result<Self> {
        if size == 0 || !size.is_power_of_two() {
            return Err(FlatError::InvalidGrid(size));
        }
        Ok(Grid {
            size,
            half_shift: false,
            twiddles: OnceLock::new(),
        })
    }

    /// Grid offset by half a step, `z_t = exp(2πi (t + 1/2) / M)`.
    pub fn shifted(size: usize) -> Result<Self> {
        let mut g = Grid::new(size)?;
        g.half_shift = true;
        Ok(g)
    }

    /// `max(4096, 8·span + 8)` rounded up to a power of two.
    pub fn default_size(span: u64) -> usize {
        let want = (8 * span as usize + 8).max(MIN_DEFAULT_GRID);
        want.next_power_of_two()
    }

    pub fn default_for(p: &TrigPoly) -> Self {
        Grid::new(Grid::default_size(p.span())).expect("power of two")
    }

    /// Size needed for sup-norm estimation of a polynomial with this span.
    pub fn sup_requirement(span: u64) -> usize {
        4 * span as usize + 4
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_shifted(&self) -> bool {
        self.half_shift
    }

    pub fn angle(&self, t: usize) -> f64 {
        let s = if self.half_shift { 0.5 } else { 0.0 };
        2.0 * PI * (t as f64 + s) / self.size as f64
    }

    pub fn point(&self, t: usize) -> Complex64 {
        self.twiddles()[self.phase_index(1, t)]
    }

    /// Fails with `GridTooCoarse` unless the grid can resolve the sup of `p`.
    pub fn check_sup_resolution(&self, p: &TrigPoly) -> Result<()> {
        let required = Grid::sup_requirement(p.span());
        if self.size < required {
            return Err(FlatError::GridTooCoarse {
                size: self.size,
                required,
            });
        }
        Ok(())
    }

    /// Samples of `p(z^dilation)` at every grid point.
    pub fn sample_dilated(&self, p: &TrigPoly, dilation: u64) -> Vec<Complex64> {
        let tw = self.twiddles();
        let period = 2 * self.size as u64;
        let mut out = vec![Complex64::new(0.0, 0.0); self.size];
        for (e, c) in p.terms() {
            // z_t^e = tw[e·(2t + s) mod 2M]
            let step = (e as i128 * dilation as i128).rem_euclid(period as i128) as u64;
            let mut idx = if self.half_shift { step } else { 0 };
            let inc = (2 * step) % period;
            for v in out.iter_mut() {
                *v += c * tw[idx as usize];
                idx += inc;
                if idx >= period {
                    idx -= period;
                }
            }
        }
        out
    }

    /// Samples of `p` at every grid point.
    pub fn sample(&self, p: &TrigPoly) -> Vec<Complex64> {
        self.sample_dilated(p, 1)
    }

    /// Mean of `f` over the grid, i.e. the quadrature of `∫ f dz`.
    pub fn mean<I: IntoIterator<Item = f64>>(&self, values: I) -> f64 {
        values.into_iter().sum::<f64>() / self.size as f64
    }

    fn phase_index(&self, e: i64, t: usize) -> usize {
        let period = 2 * self.size as i128;
        let s = if self.half_shift { 1 } else { 0 };
        ((e as i128) * (2 * t as i128 + s)).rem_euclid(period) as usize
    }

    fn twiddles(&self) -> &Arc<Vec<Complex64>> {
        self.twiddles.get_or_init(|| {
            let period = 2 * self.size;
            let table = (0..period)
                .map(|j| {
                    let (s, c) = (2.0 * PI * j as f64 / period as f64).sin_cos();
                    Complex64::new(c, s)
                })
                .collect();
            Arc::new(table)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_power_of_two() {
        assert_eq!(Grid::new(100), Err(FlatError::InvalidGrid(100)));
        assert!(Grid::new(0).is_err());
        assert!(Grid::new(64).is_ok());
    }

    #[test]
    fn default_size_tracks_span() {
        assert_eq!(Grid::default_size(0), 4096);
        assert_eq!(Grid::default_size(511), 4096);
        assert_eq!(Grid::default_size(512), 8192);
        assert_eq!(Grid::default_size(6000), 65536);
    }

    #[test]
    fn points_match_direct_exponential() {
        for g in [Grid::new(16).unwrap(), Grid::shifted(16).unwrap()] {
            for t in 0..16 {
                let want = Complex64::from_polar(1.0, g.angle(t));
                assert!((g.point(t) - want).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn dilated_sampling_matches_direct_evaluation() {
        let p = TrigPoly::from_terms([
            (-3, Complex64::new(0.5, 0.25)),
            (2, Complex64::new(-1.0, 0.0)),
            (7, Complex64::new(0.0, 2.0)),
        ])
        .unwrap();
        let g = Grid::shifted(64).unwrap();
        let vals = g.sample_dilated(&p, 5);
        for (t, v) in vals.iter().enumerate() {
            let z = Complex64::from_polar(1.0, 5.0 * g.angle(t));
            assert!((p.eval(z) - v).norm() < 1e-12);
        }
    }
}
