//! Flatness diagnostics for trigonometric polynomials.
//!
//! The crate builds polynomial families on the unit circle (class-B,
//! Gauss-Fresnel, Hardy-Littlewood, single-spike perturbations of 1, and
//! partial sums of finite Blaschke products) and measures how far their
//! moduli are from the constant 1:
//!
//! * [`poly`]: exact sparse Laurent polynomials and the expansion
//!   `|P|² = 1 + Σ b_k z^{n_k}`.
//! * [`flatness`]: ε, L, N, the Gram matrix of `z^{n_k} − conj(b_k)` under
//!   `|P|²dz`, its entry sum `r`, and the ratios `r/N`, `N/L²`.
//! * [`factorization`]: inner/outer factorization and Jensen checks.
//! * [`riesz`]: dissociated families, partial generalized Riesz products and
//!   the `Σ min{1, sqrt(N_j/r_j)}` singularity series.
//!
//! The guide in `book/` walks through each of these with runnable examples.

// `!(x > 0.0)` is used on purpose so that NaN takes the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod factorization;
pub mod flatness;
pub mod generators;
pub mod grid;
pub mod io;
pub mod poly;
pub mod riesz;
pub mod roots;

pub use error::{FlatError, Result};
pub use grid::Grid;
pub use num_complex::Complex64;
pub use poly::{ModulusSpectrum, TrigPoly};

// The guide's code blocks run as doc-tests, one module per chapter.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/polynomials.md")]
    mod polynomials {}
    #[doc = include_str!("../../../book/src/families.md")]
    mod families {}
    #[doc = include_str!("../../../book/src/factorization.md")]
    mod factorization {}
    #[doc = include_str!("../../../book/src/gram.md")]
    mod gram {}
    #[doc = include_str!("../../../book/src/riesz.md")]
    mod riesz {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
