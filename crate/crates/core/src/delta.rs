//! Delta potentials: closed-form spectra and the δ_ε regularisations.
//!
//! Eigenvalues are written `λ = κ⁴` with `Re κ > 0`, `Im κ > 0`. The
//! regularised problems are solved by matching an entire fundamental system
//! inside the bump to the decaying exponentials outside; the resulting
//! determinant is analytic in `λ` off `[0, ∞)` and is located with the
//! spectral locator.

use alloc::vec::Vec;
use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4};

use num_complex::Complex64;
use num_traits::Float;

use crate::branch::spectral_point;
use crate::enclosure::l1_disk;
use crate::linalg::{lu_log_det, LogDet, Matrix};
use crate::locator::{locate, Characteristic, ScanRegion};
use crate::{Dim, Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaSpectrum {
    pub alpha: Complex64,
    pub dim: Dim,
    pub eigenvalue: Option<Complex64>,
    /// The fourth root of the eigenvalue in the first quadrant.
    pub k: Option<Complex64>,
}

impl DeltaSpectrum {
    /// `‖V‖₁`: `|α|` in 1D, `4π|α|` in 3D.
    pub fn l1(&self) -> f64 {
        match self.dim {
            Dim::One => self.alpha.norm(),
            _ => 4.0 * core::f64::consts::PI * self.alpha.norm(),
        }
    }

    /// Radius of the L¹ disk minus `|λ|`.
    pub fn disk_margin(&self) -> Option<f64> {
        let disk = l1_disk(self.dim, self.l1(), None).ok()?;
        self.eigenvalue.map(|l| disk.margin(l))
    }
}

/// `αδ` on the line: an eigenvalue exists iff `Re α < |Im α|`, and then
/// `κ³ = 2^{-3/2} α e^{-iπ/4}` has exactly one root in the open first quadrant.
pub fn exact_1d(alpha: Complex64) -> DeltaSpectrum {
    let mut out = DeltaSpectrum {
        alpha,
        dim: Dim::One,
        eigenvalue: None,
        k: None,
    };
    if !(alpha.re < alpha.im.abs()) {
        return out;
    }
    let k = cube_roots(alpha * Complex64::from_polar(2f64.powf(-1.5), -FRAC_PI_4))
        .into_iter()
        .max_by(|a, b| a.re.min(a.im).total_cmp(&b.re.min(b.im)))
        .unwrap();
    out.k = Some(k);
    out.eigenvalue = Some(k.powi(4));
    out
}

/// The three cube roots of `z`.
pub fn cube_roots(z: Complex64) -> [Complex64; 3] {
    let r = z.norm().cbrt();
    let t = z.arg() / 3.0;
    let step = 2.0 * core::f64::consts::PI / 3.0;
    [0.0, 1.0, -1.0].map(|m| Complex64::from_polar(r, t + m * step))
}

/// `4παδ` in 3D, radial sector: an eigenvalue exists iff `Re α < -|Im α|`,
/// with `κ = -α e^{iπ/4} / √2` and `λ = -α⁴ / 4`.
pub fn exact_3d(alpha: Complex64) -> DeltaSpectrum {
    let mut out = DeltaSpectrum {
        alpha,
        dim: Dim::Three,
        eigenvalue: None,
        k: None,
    };
    if !(alpha.re < -alpha.im.abs()) {
        return out;
    }
    let k = -alpha * Complex64::from_polar(FRAC_1_SQRT_2, FRAC_PI_4);
    out.k = Some(k);
    out.eigenvalue = Some(k.powi(4));
    out
}

/// Exact spectra for `α = e^{iθ}`.
pub fn boundary_sweep(d: Dim, thetas: &[f64]) -> Result<Vec<DeltaSpectrum>> {
    let solve = match d {
        Dim::One => exact_1d,
        Dim::Three => exact_3d,
        Dim::Two => return Err(Error::DimensionUnsupported(2)),
    };
    Ok(thetas.iter().map(|&t| solve(Complex64::from_polar(1.0, t))).collect())
}

/// `y_j(x) = Σ_n mⁿ x^{4n+j} / (4n+j)!` for `j = 0..3`: the fundamental system
/// of `y'''' = m y` with `y_j^{(p)}(0) = δ_{jp}`, entire in `m`.
fn taylor_system(m: Complex64, x: f64) -> [Complex64; 4] {
    let x4 = x.powi(4);
    core::array::from_fn(|j| {
        let mut term = Complex64::new(x.powi(j as i32) / [1.0, 1.0, 2.0, 6.0][j], 0.0);
        let mut sum = term;
        for n in 0..200 {
            let base = (4 * n + j) as f64;
            term *= m * x4 / ((base + 1.0) * (base + 2.0) * (base + 3.0) * (base + 4.0));
            sum += term;
            if term.norm() <= 1e-17 * sum.norm() {
                break;
            }
        }
        sum
    })
}

/// `y_j^{(p)}`: derivatives shift the index down, wrapping with a factor `m`.
fn taylor_derivative(y: &[Complex64; 4], m: Complex64, j: usize, p: usize) -> Complex64 {
    if j >= p {
        y[j - p]
    } else {
        m * y[j + 4 - p]
    }
}

/// Matching determinant of `Δ² + V_ε` with `V_ε = α δ_ε` (1D, 8×8) or the
/// radial `4πα δ_ε` (3D, 4×4), normalised by its modulus at a reference
/// point outside the L¹ disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaEpsMatching {
    dim: Dim,
    alpha: Complex64,
    eps: f64,
    log_norm: f64,
}

impl DeltaEpsMatching {
    pub fn new(dim: Dim, alpha: Complex64, eps: f64) -> Result<Self> {
        if dim == Dim::Two {
            return Err(Error::DimensionUnsupported(2));
        }
        if !(eps > 0.0 && eps <= 0.1) {
            return Err(Error::InvalidInput("eps must lie in (0, 0.1]"));
        }
        if !(alpha.re.is_finite() && alpha.im.is_finite()) {
            return Err(Error::InvalidInput("alpha must be finite"));
        }
        let mut out = Self {
            dim,
            alpha,
            eps,
            log_norm: 0.0,
        };
        let radius = out.disk_radius();
        let reference = Complex64::new(-(4.0 * radius).max(1e-3), 0.0);
        out.log_norm = out.raw(reference)?.log_abs;
        Ok(out)
    }

    /// Radius of the L¹ disk, which contains every eigenvalue.
    pub fn disk_radius(&self) -> f64 {
        let l1 = match self.dim {
            Dim::One => self.alpha.norm(),
            _ => 4.0 * core::f64::consts::PI * self.alpha.norm(),
        };
        l1_disk(self.dim, l1, None).map(|d| d.radius).unwrap_or(0.0)
    }

    fn raw(&self, lambda: Complex64) -> Result<LogDet> {
        let kappa = spectral_point(lambda)?.decay_root();
        let pow = |z: Complex64, p: usize| z.powi(p as i32);
        match self.dim {
            Dim::One => {
                let h = 0.5 * self.eps;
                let m = lambda - self.alpha / self.eps;
                let right = taylor_system(m, h);
                let left = taylor_system(m, -h);
                let mut a = Matrix::zeros(8);
                for p in 0..4 {
                    for j in 0..4 {
                        a[(p, j)] = taylor_derivative(&right, m, j, p);
                        a[(p + 4, j)] = taylor_derivative(&left, m, j, p);
                    }
                    a[(p, 4)] = -pow(-kappa, p);
                    a[(p, 5)] = -pow(I * kappa, p);
                    a[(p + 4, 6)] = -pow(kappa, p);
                    a[(p + 4, 7)] = -pow(-I * kappa, p);
                }
                Ok(lu_log_det(a))
            }
            _ => {
                // f = r g: regular inside means f(0) = f''(0) = 0, spanned by y₁, y₃
                let m = lambda - self.alpha * (3.0 / self.eps.powi(3));
                let y = taylor_system(m, self.eps);
                let mut a = Matrix::zeros(4);
                for p in 0..4 {
                    a[(p, 0)] = taylor_derivative(&y, m, 1, p);
                    a[(p, 1)] = taylor_derivative(&y, m, 3, p);
                    a[(p, 2)] = -pow(-kappa, p);
                    a[(p, 3)] = -pow(I * kappa, p);
                }
                Ok(lu_log_det(a))
            }
        }
    }
}

impl Characteristic for DeltaEpsMatching {
    fn log_det(&self, lambda: Complex64) -> Result<LogDet> {
        let mut d = self.raw(lambda)?;
        d.log_abs -= self.log_norm;
        Ok(d)
    }
}

/// Default search square: twice the exact eigenvalue modulus when the delta
/// model has one, else twice the L¹ disk radius.
pub fn default_region(dim: Dim, alpha: Complex64) -> Result<ScanRegion> {
    let exact = match dim {
        Dim::One => exact_1d(alpha),
        Dim::Three => exact_3d(alpha),
        Dim::Two => return Err(Error::DimensionUnsupported(2)),
    };
    let radius = match exact.eigenvalue {
        Some(l) => 2.0 * l.norm(),
        None => 2.0 * l1_disk(dim, exact.l1(), None)?.radius,
    }
    .max(1e-12);
    ScanRegion::new((-radius, radius), (-radius, radius), (16, 16), radius * 1e-6)
}

fn delta_eps(dim: Dim, alpha: Complex64, eps: f64, region: Option<ScanRegion>) -> Result<Complex64> {
    let ch = DeltaEpsMatching::new(dim, alpha, eps)?;
    let region = match region {
        Some(r) => r,
        None => default_region(dim, alpha)?,
    };
    let exact = match dim {
        Dim::One => exact_1d(alpha).eigenvalue,
        _ => exact_3d(alpha).eigenvalue,
    };
    let found = locate(&ch, &region, &[])?;
    let best = match exact {
        Some(e) => found.iter().min_by(|a, b| (a.lambda - e).norm().total_cmp(&(b.lambda - e).norm())),
        None => found.iter().min_by(|a, b| a.residual_log_abs_det.total_cmp(&b.residual_log_abs_det)),
    };
    best.map(|c| c.lambda).ok_or(Error::NoRootInRegion)
}

/// Eigenvalue of `Δ² + α δ_ε` on the line, `δ_ε = ε^{-1} 𝟙_{|x|<ε/2}`.
pub fn delta_eps_1d(alpha: Complex64, eps: f64, region: Option<ScanRegion>) -> Result<Complex64> {
    delta_eps(Dim::One, alpha, eps, region)
}

/// Radial eigenvalue of `Δ² + 4πα δ_ε` in 3D, `δ_ε = 3/(4πε³) 𝟙_{|x|<ε}`.
pub fn delta_eps_3d(alpha: Complex64, eps: f64, region: Option<ScanRegion>) -> Result<Complex64> {
    delta_eps(Dim::Three, alpha, eps, region)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LadderRow {
    pub eps: f64,
    pub eigenvalue: Complex64,
    /// `|λ_ε - λ| / |λ|` against the delta model, when it has an eigenvalue.
    pub rel_error: Option<f64>,
}

/// δ_ε eigenvalues along a sequence of widths.
pub fn convergence_ladder(dim: Dim, alpha: Complex64, eps: &[f64]) -> Result<Vec<LadderRow>> {
    let exact = match dim {
        Dim::One => exact_1d(alpha),
        Dim::Three => exact_3d(alpha),
        Dim::Two => return Err(Error::DimensionUnsupported(2)),
    }
    .eigenvalue;
    eps.iter()
        .map(|&e| {
            let l = delta_eps(dim, alpha, e, None)?;
            Ok(LadderRow {
                eps: e,
                eigenvalue: l,
                rel_error: exact.map(|x| (l - x).norm() / x.norm()),
            })
        })
        .collect()
}
