//! Eigenvalue candidates as zeros of `λ ↦ det(I + K_λ)`.
//!
//! A rectangular scan of `log|det|` yields seeds at strict local minima;
//! Muller's method refines each seed and a residual gate accepts or rejects
//! the result. Any determinant-valued function can be located through
//! [`Characteristic`], which is how the δ_ε matching problems reuse this code.

use alloc::vec::Vec;

use num_complex::Complex64;
use num_traits::Float;

use crate::birman_schwinger::{assemble_with, fredholm_det};
use crate::branch::{on_positive_axis, principal_sqrt};
use crate::enclosure::{l1_disk, DiskSource, EnclosureDisk};
use crate::exec::{Executor, Sequential};
use crate::linalg::LogDet;
use crate::potential::{l1_norm, Potential};
use crate::quadrature::Quadrature;
use crate::{Error, Result};

/// Accept a refined root when `|det| ≤` this.
pub const RESIDUAL_GATE: f64 = 1e-8;
/// Relative distance under which two candidates are merged.
pub const DEDUPE_RADIUS: f64 = 1e-6;

pub trait Characteristic: Sync {
    fn log_det(&self, lambda: Complex64) -> Result<LogDet>;

    fn det(&self, lambda: Complex64) -> Result<Complex64> {
        self.log_det(lambda).map(|d| d.value())
    }
}

/// `det(I + K_λ)` for a potential on a fixed quadrature.
pub struct BirmanSchwinger<'a, E: Executor> {
    pub potential: &'a Potential,
    pub quad: &'a Quadrature,
    pub exec: &'a E,
}

impl<'a> BirmanSchwinger<'a, Sequential> {
    pub fn new(potential: &'a Potential, quad: &'a Quadrature) -> Self {
        Self {
            potential,
            quad,
            exec: &Sequential,
        }
    }
}

impl<E: Executor> Characteristic for BirmanSchwinger<'_, E> {
    fn log_det(&self, lambda: Complex64) -> Result<LogDet> {
        Ok(fredholm_det(&assemble_with(self.exec, self.potential, lambda, self.quad)?))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRegion {
    pub re_range: (f64, f64),
    pub im_range: (f64, f64),
    pub grid: (usize, usize),
    /// Points on `[0, ∞)` are evaluated at `λ + i·eps_shift`.
    pub eps_shift: f64,
}

impl ScanRegion {
    pub fn new(re_range: (f64, f64), im_range: (f64, f64), grid: (usize, usize), eps_shift: f64) -> Result<Self> {
        let region = Self {
            re_range,
            im_range,
            grid,
            eps_shift,
        };
        region.validate()?;
        Ok(region)
    }

    /// The square `[-R, R]²` with an `n × n` grid.
    pub fn square(radius: f64, n: usize) -> Result<Self> {
        Self::new((-radius, radius), (-radius, radius), (n, n), radius * 1e-6)
    }

    pub fn validate(&self) -> Result<()> {
        let ordered = |r: (f64, f64)| r.0.is_finite() && r.1.is_finite() && r.0 < r.1;
        if !ordered(self.re_range) || !ordered(self.im_range) {
            return Err(Error::InvalidInput("scan ranges must be finite and increasing"));
        }
        if self.grid.0 < 8 || self.grid.1 < 8 {
            return Err(Error::InvalidInput("scan grid must be at least 8x8"));
        }
        if self.touches_positive_axis() && !(self.eps_shift > 0.0) {
            return Err(Error::InvalidInput("eps_shift must be positive when the region meets [0, inf)"));
        }
        Ok(())
    }

    pub fn touches_positive_axis(&self) -> bool {
        self.re_range.1 >= 0.0 && self.im_range.0 <= 0.0 && self.im_range.1 >= 0.0
    }

    pub fn point(&self, i: usize, j: usize) -> Complex64 {
        let (nx, ny) = self.grid;
        let t = |k: usize, n: usize, r: (f64, f64)| r.0 + (r.1 - r.0) * k as f64 / (n - 1) as f64;
        Complex64::new(t(i, nx, self.re_range), t(j, ny, self.im_range))
    }

    pub fn spacing(&self) -> f64 {
        let dx = (self.re_range.1 - self.re_range.0) / (self.grid.0 - 1) as f64;
        let dy = (self.im_range.1 - self.im_range.0) / (self.grid.1 - 1) as f64;
        dx.max(dy)
    }

    /// Where a point is actually evaluated.
    pub fn shifted(&self, lambda: Complex64) -> Complex64 {
        if on_positive_axis(lambda) {
            lambda + Complex64::new(0.0, self.eps_shift)
        } else {
            lambda
        }
    }

    fn contains_padded(&self, lambda: Complex64, pad: f64) -> bool {
        let wx = (self.re_range.1 - self.re_range.0) * pad;
        let wy = (self.im_range.1 - self.im_range.0) * pad;
        lambda.re >= self.re_range.0 - wx
            && lambda.re <= self.re_range.1 + wx
            && lambda.im >= self.im_range.0 - wy
            && lambda.im <= self.im_range.1 + wy
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub lambda: Complex64,
    pub log_abs_det: f64,
    pub seed: bool,
}

/// Row-major over the imaginary axis: index `j * nx + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct DetScan {
    pub region: ScanRegion,
    pub points: Vec<ScanPoint>,
}

impl DetScan {
    /// Seeds ordered by increasing `log|det|`.
    pub fn seeds(&self) -> Vec<Complex64> {
        let mut s: Vec<&ScanPoint> = self.points.iter().filter(|p| p.seed).collect();
        s.sort_by(|a, b| a.log_abs_det.total_cmp(&b.log_abs_det));
        s.into_iter().map(|p| p.lambda).collect()
    }
}

pub fn det_scan<C: Characteristic>(ch: &C, region: &ScanRegion) -> Result<DetScan> {
    det_scan_with(&Sequential, ch, region)
}

pub fn det_scan_with<E: Executor, C: Characteristic>(exec: &E, ch: &C, region: &ScanRegion) -> Result<DetScan> {
    region.validate()?;
    let (nx, ny) = region.grid;
    let values = exec.map(nx * ny, |idx| {
        let lambda = region.point(idx % nx, idx / nx);
        ch.log_det(region.shifted(lambda)).map(|d| d.log_abs)
    });
    let values: Vec<f64> = values.into_iter().collect::<Result<_>>()?;
    let mut points = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let v = values[j * nx + i];
            // ties (conjugate rows around the real axis) go to the lower index;
            // a plateau is never a seed
            let me = j * nx + i;
            let mut seed = v.is_finite();
            let mut rises = false;
            'nb: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    let (ii, jj) = (i as i64 + di, j as i64 + dj);
                    if (di, dj) == (0, 0) || ii < 0 || jj < 0 || ii >= nx as i64 || jj >= ny as i64 {
                        continue;
                    }
                    let other = jj as usize * nx + ii as usize;
                    let w = values[other];
                    if w < v || (w == v && other < me) {
                        seed = false;
                        break 'nb;
                    }
                    rises |= w > v;
                }
            }
            seed &= rises;
            points.push(ScanPoint {
                lambda: region.point(i, j),
                log_abs_det: v,
                seed,
            });
        }
    }
    Ok(DetScan {
        region: *region,
        points,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineOptions {
    /// Converged when `|Δλ| ≤ tol · max(scale, |λ|)`.
    pub tol: f64,
    pub scale: f64,
    pub max_iter: usize,
    /// Initial Muller spread around the seed.
    pub step: f64,
    pub eps_shift: f64,
    /// Iterates beyond this modulus abort with `DivergedOutOfRegion`.
    pub max_modulus: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            scale: 1.0,
            max_iter: 100,
            step: 1e-3,
            eps_shift: 1e-9,
            max_modulus: f64::INFINITY,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenvalueCandidate {
    pub lambda: Complex64,
    pub residual_log_abs_det: f64,
    pub refine_iters: usize,
    pub accepted: bool,
    /// Sits on `[0, ∞)` (up to the evaluation shift), where only one
    /// direction of the Birman–Schwinger principle holds.
    pub one_sided: bool,
    pub enclosure_report: Vec<(DiskSource, bool, f64)>,
}

/// Muller iteration on `det` from three points around `seed`.
pub fn refine<C: Characteristic>(ch: &C, seed: Complex64, opts: &RefineOptions) -> Result<EigenvalueCandidate> {
    let eval = |z: Complex64| -> Result<Complex64> {
        let z = if on_positive_axis(z) {
            z + Complex64::new(0.0, opts.eps_shift)
        } else {
            z
        };
        ch.det(z)
    };
    let h = Complex64::new(opts.step, 0.0);
    let mut x = [seed - h, seed + h * Complex64::new(0.0, 1.0), seed];
    let mut f = [eval(x[0])?, eval(x[1])?, eval(x[2])?];
    for iter in 1..=opts.max_iter {
        let q = (x[2] - x[1]) / (x[1] - x[0]);
        let a = q * f[2] - q * (q + 1.0) * f[1] + q * q * f[0];
        let b = (q * 2.0 + 1.0) * f[2] - (q + 1.0) * (q + 1.0) * f[1] + q * q * f[0];
        let c = (q + 1.0) * f[2];
        let disc = principal_sqrt(b * b - a * c * 4.0);
        let den = if (b + disc).norm() >= (b - disc).norm() {
            b + disc
        } else {
            b - disc
        };
        let next = if den.norm() == 0.0 || !den.is_finite() {
            x[2] + (x[2] - x[1]) * 0.5
        } else {
            x[2] - (x[2] - x[1]) * c * 2.0 / den
        };
        if !next.is_finite() {
            return Err(Error::NoConvergence { iterations: iter });
        }
        if next.norm() > opts.max_modulus {
            return Err(Error::DivergedOutOfRegion(next));
        }
        let step = (next - x[2]).norm();
        let fnext = eval(next)?;
        x = [x[1], x[2], next];
        f = [f[1], f[2], fnext];
        if step <= opts.tol * opts.scale.max(next.norm()) || fnext.norm() == 0.0 {
            let resid = ch.log_det(if on_positive_axis(next) {
                next + Complex64::new(0.0, opts.eps_shift)
            } else {
                next
            })?;
            return Ok(EigenvalueCandidate {
                lambda: next,
                residual_log_abs_det: resid.log_abs,
                refine_iters: iter,
                accepted: resid.log_abs <= RESIDUAL_GATE.ln(),
                one_sided: next.re >= 0.0 && next.im.abs() <= 10.0 * opts.eps_shift,
                enclosure_report: Vec::new(),
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: opts.max_iter,
    })
}

/// Scan, refine every seed, keep accepted roots inside the (padded) region,
/// merge near-duplicates and annotate each with `disks`.
pub fn locate<C: Characteristic>(
    ch: &C,
    region: &ScanRegion,
    disks: &[EnclosureDisk],
) -> Result<Vec<EigenvalueCandidate>> {
    locate_with(&Sequential, ch, region, disks)
}

pub fn locate_with<E: Executor, C: Characteristic>(
    exec: &E,
    ch: &C,
    region: &ScanRegion,
    disks: &[EnclosureDisk],
) -> Result<Vec<EigenvalueCandidate>> {
    let scan = det_scan_with(exec, ch, region)?;
    let seeds = scan.seeds();
    let extent = region.re_range.0.abs().max(region.re_range.1.abs()).max(region.im_range.0.abs()).max(region.im_range.1.abs());
    let opts = RefineOptions {
        scale: extent,
        step: 0.25 * region.spacing(),
        eps_shift: region.eps_shift.min(extent * 1e-9).max(f64::MIN_POSITIVE),
        max_modulus: 4.0 * extent,
        ..RefineOptions::default()
    };
    let refined = exec.map(seeds.len(), |s| refine(ch, seeds[s], &opts));
    let mut found: Vec<EigenvalueCandidate> = Vec::new();
    for cand in refined.into_iter().flatten() {
        if !cand.accepted || !region.contains_padded(cand.lambda, 0.05) {
            continue;
        }
        match found
            .iter_mut()
            .find(|c| (c.lambda - cand.lambda).norm() <= DEDUPE_RADIUS * c.lambda.norm().max(cand.lambda.norm()).max(opts.scale * 1e-6))
        {
            Some(existing) => {
                if cand.residual_log_abs_det < existing.residual_log_abs_det {
                    *existing = cand;
                }
            }
            None => found.push(cand),
        }
    }
    for c in &mut found {
        c.enclosure_report = disks.iter().map(|d| (d.source, d.contains(c.lambda), d.margin(c.lambda))).collect();
    }
    found.sort_by(|a, b| a.lambda.re.total_cmp(&b.lambda.re).then(a.lambda.im.total_cmp(&b.lambda.im)));
    Ok(found)
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeakCouplingFit {
    /// Least-squares slope of `log|λ|` against `log β`.
    pub exponent: f64,
    /// `c_d ‖V‖₁^{4/(4-d)}` from the intercept at the theoretical exponent.
    pub constant: f64,
    /// `constant / ‖V‖₁^{4/(4-d)}`.
    pub c_d: f64,
    pub l1: f64,
    /// `(β, λ(β))`.
    pub points: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WeakCouplingOptions {
    pub panels: usize,
    pub order: usize,
    /// Samples along the negative axis per β.
    pub samples: usize,
}

impl Default for WeakCouplingOptions {
    fn default() -> Self {
        Self {
            panels: 16,
            order: 10,
            samples: 48,
        }
    }
}

/// Lowest eigenvalue of `Δ² + βV` for each β, then a log–log fit.
pub fn weak_coupling_fit(v: &Potential, betas: &[f64], opts: &WeakCouplingOptions) -> Result<WeakCouplingFit> {
    weak_coupling_fit_with(&Sequential, v, betas, opts)
}

pub fn weak_coupling_fit_with<E: Executor>(
    exec: &E,
    v: &Potential,
    betas: &[f64],
    opts: &WeakCouplingOptions,
) -> Result<WeakCouplingFit> {
    if betas.len() < 2 || betas.iter().any(|b| !(*b > 0.0)) {
        return Err(Error::InvalidInput("weak coupling needs at least two positive betas"));
    }
    let d = v.dimension();
    let quad = v.quadrature(opts.panels, opts.order)?;
    let l1 = l1_norm(v, &quad)?;
    if l1 == 0.0 {
        return Err(Error::EmptySpectrum { beta: betas[0] });
    }
    let p = d.coupling_exponent();
    let lowest = exec.map(betas.len(), |i| -> Result<f64> {
        let beta = betas[i];
        let vb = v.scaled(Complex64::new(beta, 0.0));
        let radius = 2.0 * l1_disk(d, beta * l1, None)?.radius;
        let ch = BirmanSchwinger::new(&vb, &quad);
        lowest_negative_root(&ch, radius, opts.samples).ok_or(Error::EmptySpectrum { beta })
    });
    let mut points = Vec::with_capacity(betas.len());
    for (b, l) in betas.iter().zip(lowest) {
        points.push((*b, l?));
    }
    let xs: Vec<f64> = points.iter().map(|(b, _)| b.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|(_, l)| l.abs().ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let exponent = sxy / sxx;
    let constant = (my - p * mx).exp();
    Ok(WeakCouplingFit {
        exponent,
        constant,
        c_d: constant / l1.powf(p),
        l1,
        points,
    })
}

/// Most negative accepted root of `det` on `(-radius, 0)`.
fn lowest_negative_root<C: Characteristic>(ch: &C, radius: f64, samples: usize) -> Option<f64> {
    let n = samples.max(8);
    let xs: Vec<f64> = (1..n).map(|i| -radius * (n - i) as f64 / n as f64).collect();
    let vals: Vec<f64> = xs
        .iter()
        .map(|&x| ch.det(Complex64::new(x, 0.0)).map(|d| d.re).unwrap_or(f64::NAN))
        .collect();
    let opts = RefineOptions {
        scale: radius,
        step: 0.25 * radius / n as f64,
        max_modulus: 4.0 * radius,
        ..RefineOptions::default()
    };
    // det is real on the negative axis for real V; seed at sign changes first,
    // then at local minima of |det|
    let mut seeds = Vec::new();
    for i in 0..xs.len() - 1 {
        if vals[i].signum() != vals[i + 1].signum() {
            seeds.push(0.5 * (xs[i] + xs[i + 1]));
        }
    }
    for i in 1..xs.len() - 1 {
        if vals[i].abs() < vals[i - 1].abs() && vals[i].abs() < vals[i + 1].abs() {
            seeds.push(xs[i]);
        }
    }
    seeds
        .into_iter()
        .filter_map(|s| refine(ch, Complex64::new(s, 0.0), &opts).ok())
        .filter(|c| c.accepted && c.lambda.re < 0.0 && c.lambda.im.abs() <= 1e-6 * c.lambda.norm())
        .map(|c| c.lambda.re)
        .reduce(f64::min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enclosure::l1_disk;
    use crate::Dim;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// `(λ - r₁)(λ - r₂)` through the trait.
    struct Quadratic(Complex64, Complex64);

    impl Characteristic for Quadratic {
        fn log_det(&self, l: Complex64) -> Result<LogDet> {
            let v = (l - self.0) * (l - self.1);
            Ok(LogDet {
                log_abs: v.norm().ln(),
                arg: v.arg(),
                singular: false,
            })
        }
    }

    #[test]
    fn region_validation() {
        assert!(ScanRegion::new((0.0, 1.0), (0.0, 1.0), (4, 8), 1e-3).is_err());
        assert!(ScanRegion::new((1.0, 0.0), (0.0, 1.0), (8, 8), 1e-3).is_err());
        assert!(ScanRegion::new((-1.0, 1.0), (-1.0, 1.0), (8, 8), 0.0).is_err());
        assert!(ScanRegion::new((-2.0, -1.0), (-1.0, 1.0), (8, 8), 0.0).is_ok());
    }

    #[test]
    fn muller_finds_polynomial_roots() {
        let ch = Quadratic(c(0.3, -0.2), c(-1.0, 0.5));
        let region = ScanRegion::new((-1.5, 1.0), (-1.0, 1.0), (24, 24), 1e-9).unwrap();
        let found = locate(&ch, &region, &[]).unwrap();
        assert_eq!(found.len(), 2);
        assert!((found[0].lambda - c(-1.0, 0.5)).norm() < 1e-10);
        assert!((found[1].lambda - c(0.3, -0.2)).norm() < 1e-10);
    }

    #[test]
    fn zero_potential_has_no_seeds() {
        let v = Potential::zero(Dim::One);
        let q = v.quadrature(4, 10).unwrap();
        let ch = BirmanSchwinger::new(&v, &q);
        let scan = det_scan(&ch, &ScanRegion::square(1.0, 9).unwrap()).unwrap();
        assert!(scan.points.iter().all(|p| p.log_abs_det == 0.0));
        assert!(scan.seeds().is_empty());
    }

    #[test]
    fn narrow_well_eigenvalue() {
        let v = Potential::delta_eps(Dim::One, c(-1.0, 0.0), 1e-3).unwrap();
        let q = v.quadrature(8, 10).unwrap();
        let ch = BirmanSchwinger::new(&v, &q);
        let cand = refine(&ch, c(-0.24, 0.0), &RefineOptions::default()).unwrap();
        assert!(cand.accepted);
        assert!((cand.lambda.re + 0.25).abs() < 0.25 * 5e-3);
        let disks = [l1_disk(Dim::One, 1.0, None).unwrap()];
        let found = locate(&ch, &ScanRegion::new((-0.5, 0.5), (-0.5, 0.5), (16, 16), 1e-6).unwrap(), &disks).unwrap();
        assert_eq!(found.len(), 1);
        assert!((found[0].lambda - cand.lambda).norm() < 1e-8);
        assert!(found[0].enclosure_report[0].2 >= -1e-3);
    }

    #[test]
    fn complex_coupling_eigenvalue() {
        let v = Potential::delta_eps(Dim::One, c(0.0, 1.0), 1e-3).unwrap();
        let q = v.quadrature(8, 10).unwrap();
        let ch = BirmanSchwinger::new(&v, &q);
        let want = Complex64::from_polar(0.25, core::f64::consts::PI / 3.0);
        let cand = refine(&ch, want * 0.95, &RefineOptions::default()).unwrap();
        assert!(cand.accepted);
        assert!((cand.lambda - want).norm() < 0.01 * want.norm());
    }

    #[test]
    fn conjugate_potential_gives_conjugate_candidates() {
        let v = Potential::well(Dim::One, c(-2.0, 1.0), 0.5).unwrap();
        let vc = v.conj();
        let q = v.quadrature(8, 10).unwrap();
        let region = ScanRegion::square(1.5, 16).unwrap();
        let mirrored = ScanRegion::new(region.re_range, region.im_range, region.grid, region.eps_shift).unwrap();
        let a = locate(&BirmanSchwinger::new(&v, &q), &region, &[]).unwrap();
        let b = locate(&BirmanSchwinger::new(&vc, &q), &mirrored, &[]).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a.len(), b.len());
        for x in &a {
            assert!(b.iter().any(|y| (y.lambda - x.lambda.conj()).norm() < 1e-8));
        }
        assert_eq!(a, locate(&BirmanSchwinger::new(&v, &q), &region, &[]).unwrap());
    }

    #[test]
    fn region_outside_the_disk_has_no_candidates() {
        let v = Potential::delta_eps(Dim::One, c(-1.0, 0.0), 1e-2).unwrap();
        let q = v.quadrature(8, 10).unwrap();
        let region = ScanRegion::new((-2.0, -0.5), (-1.0, 1.0), (12, 12), 1e-6).unwrap();
        let found = locate(&BirmanSchwinger::new(&v, &q), &region, &[]).unwrap();
        assert!(found.is_empty());
    }

    #[test]
    fn weak_coupling_rejects_zero() {
        let v = Potential::zero(Dim::One);
        assert!(matches!(
            weak_coupling_fit(&v, &[1e-3, 1e-2], &WeakCouplingOptions::default()),
            Err(Error::EmptySpectrum { .. })
        ));
    }

    #[test]
    fn weak_coupling_short_ladder() {
        let v = Potential::well(Dim::One, c(-1.0, 0.0), 0.5).unwrap();
        let fit = weak_coupling_fit(&v, &[1e-4, 1e-3], &WeakCouplingOptions::default()).unwrap();
        assert_relative_eq!(fit.exponent, 4.0 / 3.0, epsilon = 0.02);
        assert_relative_eq!(fit.c_d, 0.25, max_relative = 0.05);
    }
}
