//! Numerical toolkit for the point spectrum of biharmonic operators `Δ² + V`
//! with complex potentials in dimensions 1, 2 and 3.
//!
//! The crate is `no_std` (it needs `alloc`) and performs no IO. It provides:
//!
//! - [`branch`]: principal square roots, spectral points `λ ↦ (k, √k, √-k)` and
//!   the Macdonald function `K₀` for complex arguments;
//! - [`green`]: Laplacian and biharmonic resolvent kernels, their pointwise
//!   bounds and the two-dimensional constant estimate;
//! - [`potential`]: complex potentials and the norms consumed by the
//!   enclosure theorems (L¹, Rollnik, Hardy, L^{3/2}, Rayleigh bracket);
//! - [`birman_schwinger`]: Nyström discretisation of the Birman–Schwinger
//!   operator, its Hilbert–Schmidt and operator norms and Fredholm determinant;
//! - [`locator`]: determinant scans, Muller refinement and weak-coupling fits;
//! - [`enclosure`]: eigenvalue enclosure disks and candidate verification;
//! - [`delta`]: closed-form and regularised delta-potential spectra;
//! - [`inequality`]: residual checks for the elementary exponential-trigonometric
//!   inequalities behind the sharp constants.
#![no_std]
// when std is anywhere in the build graph its inherent float methods shadow `Float`
#![allow(unused_imports)]
// `!(x > 0.0)` deliberately rejects NaN; series coefficients are kept as published
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

extern crate alloc;

pub mod birman_schwinger;
pub mod branch;
pub mod delta;
pub mod enclosure;
mod error;
pub mod exec;
pub mod green;
pub mod inequality;
pub mod linalg;
pub mod locator;
pub mod potential;
pub mod quadrature;

pub use error::Error;
pub use num_complex::Complex64;

pub type Result<T> = core::result::Result<T, Error>;

/// Spatial dimension of the underlying operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Dim {
    One,
    Two,
    Three,
}

impl Dim {
    pub fn from_usize(d: usize) -> Result<Self> {
        match d {
            1 => Ok(Dim::One),
            2 => Ok(Dim::Two),
            3 => Ok(Dim::Three),
            _ => Err(Error::DimensionUnsupported(d)),
        }
    }

    pub fn as_usize(self) -> usize {
        match self {
            Dim::One => 1,
            Dim::Two => 2,
            Dim::Three => 3,
        }
    }

    pub fn as_f64(self) -> f64 {
        self.as_usize() as f64
    }

    /// The weak-coupling / enclosure exponent `4 / (4 - d)`.
    pub fn coupling_exponent(self) -> f64 {
        4.0 / (4.0 - self.as_f64())
    }
}

impl core::fmt::Display for Dim {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.as_usize())
    }
}
