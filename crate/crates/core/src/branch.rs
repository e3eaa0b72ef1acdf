//! Branch-safe complex arithmetic.
//!
//! Every square root taken of a spectral parameter goes through
//! [`principal_sqrt`], with `arg` in `(-π, π]`. A [`SpectralPoint`] fixes the
//! chain `λ ↦ k = √λ ↦ (√k, √-k)` once so downstream kernels never choose a
//! branch themselves.

use core::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use num_traits::Float;

use crate::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Principal square root with `Re ≥ 0`; points on the negative real axis
/// (either sign of zero imaginary part) map to the upper half-plane.
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    if x == 0.0 && y == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let m = x.hypot(y);
    if x >= 0.0 {
        let t = ((m + x) * 0.5).sqrt();
        Complex64::new(t, y / (2.0 * t))
    } else {
        let t = ((m - x) * 0.5).sqrt();
        let re = y.abs() / (2.0 * t);
        let im = if y < 0.0 { -t } else { t };
        Complex64::new(re, im)
    }
}

/// Principal argument in `(-π, π]`; the negative real axis maps to `+π`.
pub fn principal_arg(z: Complex64) -> f64 {
    if z.im == 0.0 && z.re < 0.0 {
        PI
    } else {
        z.im.atan2(z.re)
    }
}

/// Principal logarithm consistent with [`principal_arg`].
pub fn principal_ln(z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), principal_arg(z))
}

/// Whether `λ` lies on the closed half-axis `[0, ∞)`.
pub fn on_positive_axis(lambda: Complex64) -> bool {
    lambda.im == 0.0 && lambda.re >= 0.0
}

/// A spectral parameter together with its branch-consistent roots.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralPoint {
    lambda: Complex64,
    k: Complex64,
    sqrt_k: Complex64,
    sqrt_neg_k: Complex64,
}

impl SpectralPoint {
    pub fn new(lambda: Complex64) -> Result<Self> {
        spectral_point(lambda)
    }

    pub fn lambda(&self) -> Complex64 {
        self.lambda
    }

    /// `k` with `k² = λ`, principal branch.
    pub fn k(&self) -> Complex64 {
        self.k
    }

    pub fn sqrt_k(&self) -> Complex64 {
        self.sqrt_k
    }

    pub fn sqrt_neg_k(&self) -> Complex64 {
        self.sqrt_neg_k
    }

    /// The fourth root `κ` of `λ` with `Re κ > 0` and `Im κ > 0`.
    ///
    /// The decaying solutions of `ψ'''' = λψ` on `(0, ∞)` are `e^{-κx}` and
    /// `e^{iκx}`; they coincide with `e^{-√k x}` and `e^{-√(-k) x}` up to order.
    pub fn decay_root(&self) -> Complex64 {
        if self.sqrt_k.im > 0.0 {
            self.sqrt_k
        } else {
            I * self.sqrt_k
        }
    }
}

/// Builds the spectral point for `λ ∉ [0, ∞)`.
pub fn spectral_point(lambda: Complex64) -> Result<SpectralPoint> {
    if !(lambda.re.is_finite() && lambda.im.is_finite()) {
        return Err(Error::InvalidInput("non-finite spectral parameter"));
    }
    if on_positive_axis(lambda) {
        return Err(Error::LambdaOnPositiveAxis(lambda));
    }
    let k = principal_sqrt(lambda);
    Ok(SpectralPoint {
        lambda,
        k,
        sqrt_k: principal_sqrt(k),
        sqrt_neg_k: principal_sqrt(-k),
    })
}

const K0_SERIES_RADIUS: f64 = 2.0;
const K0_ASYMPTOTIC_RADIUS: f64 = 25.0;

/// Modified Bessel function of the second kind `K₀(z)` for `Re z > 0`.
///
/// Ascending series for `|z| < 2`, Steed's continued fraction for the
/// confluent hypergeometric representation on `2 ≤ |z| < 25`, and the
/// Hankel asymptotic expansion beyond.
pub fn macdonald_k0(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) || z.re <= 0.0 {
        return Err(Error::DomainError(z));
    }
    let r = z.norm();
    Ok(if r < K0_SERIES_RADIUS {
        let (i0, tail) = k0_series_parts(z);
        -(principal_ln(z * 0.5) + EULER_GAMMA) * i0 + tail
    } else if r < K0_ASYMPTOTIC_RADIUS {
        k0_continued_fraction(z)
    } else {
        k0_asymptotic(z)
    })
}

/// Returns `(I₀(z), Σ_{m≥1} H_m (z²/4)^m / (m!)²)` where `H_m` is the
/// harmonic number, so that `K₀(z) = -(ln(z/2) + γ) I₀(z) + tail`.
///
/// Suitable for `|z|` up to about 2; the caller owns the logarithm so that
/// differences of `K₀` at two arguments can cancel it analytically.
pub(crate) fn k0_series_parts(z: Complex64) -> (Complex64, Complex64) {
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut i0 = term;
    let mut tail = Complex64::new(0.0, 0.0);
    let mut harmonic = 0.0;
    for m in 1..200 {
        let mf = m as f64;
        term = term * q / (mf * mf);
        harmonic += 1.0 / mf;
        i0 += term;
        tail += term * harmonic;
        if term.norm() * harmonic < 1e-18 * (i0.norm() + tail.norm()) {
            break;
        }
    }
    (i0, tail)
}

/// Power series of `I₀(z) - 1`, accurate without cancellation for small `|z|`.
pub(crate) fn i0_minus_one(z: Complex64) -> Complex64 {
    let q = z * z * 0.25;
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    for m in 1..200 {
        let mf = m as f64;
        term = term * q / (mf * mf);
        sum += term;
        if term.norm() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

fn k0_continued_fraction(z: Complex64) -> Complex64 {
    // Temme's variant of Steed's algorithm for K_ν, specialised to ν = 0.
    let one = Complex64::new(1.0, 0.0);
    let a1 = 0.25;
    let mut b = (one + z) * 2.0;
    let mut d = one / b;
    let mut delh = d;
    let mut q1 = Complex64::new(0.0, 0.0);
    let mut q2 = one;
    let mut q = Complex64::new(a1, 0.0);
    let mut c = a1;
    let mut a = -a1;
    let mut s = one + q * delh;
    for i in 2..20_000 {
        let fi = i as f64;
        a -= 2.0 * (fi - 1.0);
        c = -a * c / fi;
        let qnew = (q1 - b * q2) / a;
        q1 = q2;
        q2 = qnew;
        q += qnew * c;
        b += 2.0;
        d = one / (b + d * a);
        delh = (b * d - 1.0) * delh;
        let dels = q * delh;
        s += dels;
        if dels.norm() < 1e-17 * s.norm() {
            break;
        }
    }
    principal_sqrt(Complex64::new(FRAC_PI_2, 0.0) / z) * (-z).exp() / s
}

fn k0_asymptotic(z: Complex64) -> Complex64 {
    let mut term = Complex64::new(1.0, 0.0);
    let mut sum = term;
    let mut last = 1.0;
    for n in 1..200 {
        let nf = n as f64;
        let odd = 2.0 * nf - 1.0;
        let next = term * (-(odd * odd)) / (z * (8.0 * nf));
        let size = next.norm();
        if size > last {
            break;
        }
        term = next;
        sum += term;
        last = size;
        if size < 1e-17 * sum.norm() {
            break;
        }
    }
    principal_sqrt(Complex64::new(FRAC_PI_2, 0.0) / z) * (-z).exp() * sum
}
