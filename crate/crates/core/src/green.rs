//! Laplacian and biharmonic resolvent kernels in dimensions 1, 2, 3.
//!
//! The biharmonic kernel is assembled from two Laplacian kernels,
//! `G̃_λ = (G_k - G_{-k}) / 2k` with `k² = λ`. In dimensions 2 and 3 the two
//! terms are individually singular (or nearly equal) on the diagonal, so the
//! difference is taken analytically there.

use alloc::vec::Vec;
use core::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use num_traits::Float;

use crate::branch::{
    i0_minus_one, k0_series_parts, macdonald_k0, on_positive_axis, principal_ln, principal_sqrt,
    spectral_point, SpectralPoint, EULER_GAMMA,
};
use crate::exec::{Executor, Sequential};
use crate::{Dim, Error, Result};

/// Pointwise bound constant in dimension 1, `1 / (2√2)`.
pub const C1: f64 = 1.0 / (2.0 * SQRT_2);
/// Pointwise bound constant in dimension 3, `1 / (4√2 π)`.
pub const C3: f64 = 1.0 / (4.0 * SQRT_2 * PI);
/// `|k| |G̃_λ(0)|` in dimension 2, which is `1/8` for every `λ`.
pub const C2_DIAGONAL: f64 = 0.125;

/// Both `|√k r|` and `|√(-k) r|` must fall below this for the diagonal series.
pub const DIAGONAL_THRESHOLD: f64 = 1e-4;

/// Below this `|√±k r|` the two-dimensional difference is taken from the
/// ascending series with the logarithms cancelled by hand.
const SERIES_DIFF_RADIUS: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Generic,
    DiagonalSeries,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GreenValue {
    pub value: Complex64,
    pub regime: Regime,
}

/// Kernel of `(-Δ - k)^{-1}` at distance `r`, with `√(-k)` on the principal branch.
pub fn laplace_green(d: Dim, k: Complex64, r: f64) -> Result<Complex64> {
    if on_positive_axis(k) {
        return Err(Error::LambdaOnPositiveAxis(k));
    }
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput("distance must be finite and non-negative"));
    }
    let s = principal_sqrt(-k);
    match d {
        Dim::One => Ok((-s * r).exp() / (s * 2.0)),
        Dim::Two if r == 0.0 => Err(Error::DiagonalSingularity(2)),
        Dim::Two => Ok(macdonald_k0(s * r)? / (2.0 * PI)),
        Dim::Three if r == 0.0 => Err(Error::DiagonalSingularity(3)),
        Dim::Three => Ok((-s * r).exp() / (4.0 * PI * r)),
    }
}

/// Kernel of `(Δ² - λ)^{-1}` at distance `r`; finite on the diagonal in every dimension.
pub fn biharmonic_green(d: Dim, sp: &SpectralPoint, r: f64) -> Result<GreenValue> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(Error::InvalidInput("distance must be finite and non-negative"));
    }
    let k = sp.k();
    let a = sp.sqrt_neg_k();
    let b = sp.sqrt_k();
    let near = (a * r).norm() < DIAGONAL_THRESHOLD && (b * r).norm() < DIAGONAL_THRESHOLD;
    let regime = if near && d != Dim::One {
        Regime::DiagonalSeries
    } else {
        Regime::Generic
    };
    let value = match d {
        Dim::One => ((-a * r).exp() / (a * 2.0) - (-b * r).exp() / (b * 2.0)) / (k * 2.0),
        Dim::Two => laplace_difference_2d(a, b, r)? / (k * 4.0 * PI),
        Dim::Three if near => {
            // (e^{-ar} - e^{-br}) / r expanded in r; the r³ coefficient a⁴ - b⁴ vanishes
            let r2 = r * r;
            let series = (b - a) - k * r + (b * b * b - a * a * a) * (r2 / 6.0)
                + (b.powi(5) - a.powi(5)) * (r2 * r2 / 120.0);
            series / (k * 8.0 * PI)
        }
        Dim::Three => ((-a * r).exp() - (-b * r).exp()) / (k * 8.0 * PI * r),
    };
    Ok(GreenValue { value, regime })
}

/// `K₀(ar) - K₀(br)`, including the diagonal value `ln b - ln a`.
fn laplace_difference_2d(a: Complex64, b: Complex64, r: f64) -> Result<Complex64> {
    let log_gap = principal_ln(b) - principal_ln(a);
    if r == 0.0 {
        return Ok(log_gap);
    }
    let (za, zb) = (a * r, b * r);
    if za.norm() < SERIES_DIFF_RADIUS && zb.norm() < SERIES_DIFF_RADIUS {
        let (i0a, sa) = k0_series_parts(za);
        let (_, sb) = k0_series_parts(zb);
        let ell = (0.5 * r).ln() + EULER_GAMMA;
        let i0_gap = i0_minus_one(za) - i0_minus_one(zb);
        Ok(log_gap * i0a - (principal_ln(b) + ell) * i0_gap + (sa - sb))
    } else {
        Ok(macdonald_k0(za)? - macdonald_k0(zb)?)
    }
}

/// The pointwise bound `c_d / |k|^{2 - d/2}` on `|G̃_λ|`.
///
/// Dimension 2 has no closed-form constant; `c2` must be supplied.
pub fn green_bound(d: Dim, sp: &SpectralPoint, c2: Option<f64>) -> Result<f64> {
    let c = match d {
        Dim::One => C1,
        Dim::Two => c2.ok_or(Error::MissingC2)?,
        Dim::Three => C3,
    };
    Ok(c / sp.k().norm().powf(2.0 - 0.5 * d.as_f64()))
}

/// `|G̃_λ(r)|` relative to its pointwise bound.
pub fn bound_ratio(d: Dim, sp: &SpectralPoint, r: f64, c2: Option<f64>) -> Result<f64> {
    let bound = green_bound(d, sp, c2)?;
    Ok(biharmonic_green(d, sp, r)?.value.norm() / bound)
}

/// Relative residual `|D⁴_h G̃ - λG̃| / |λG̃|` of the one-dimensional kernel
/// under the centred fourth-difference stencil with step `h`.
pub fn pde_residual(sp: &SpectralPoint, r: f64, h: f64) -> Result<f64> {
    if !(h > 0.0) || !(r > 10.0 * h) {
        return Err(Error::StencilTouchesDiagonal {
            r,
            half_width: 10.0 * h,
        });
    }
    let g = |x: f64| biharmonic_green(Dim::One, sp, x).map(|v| v.value);
    let centre = g(r)?;
    let d4 = (g(r - 2.0 * h)? - g(r - h)? * 4.0 + centre * 6.0 - g(r + h)? * 4.0 + g(r + 2.0 * h)?)
        / h.powi(4);
    let target = sp.lambda() * centre;
    Ok((d4 - target).norm() / target.norm())
}

/// Largest sampled value of `|k| |G̃_λ(r)|` in dimension 2.
#[derive(Debug, Clone, PartialEq)]
pub struct C2Estimate {
    pub value: f64,
    /// `arg λ` of the maximiser.
    pub arg_lambda: f64,
    /// `|k|^{1/2} r` of the maximiser.
    pub scaled_radius: f64,
    /// Running maximum after the coarse grid and after each refinement level.
    pub levels: Vec<f64>,
}

const C2_RADIUS_WINDOW: f64 = 40.0;

pub fn estimate_c2(arg_grid: usize, radius_grid: usize, refinement_levels: usize) -> Result<C2Estimate> {
    estimate_c2_with(&Sequential, arg_grid, radius_grid, refinement_levels)
}

/// Scans `arg λ ∈ (0, π]` (conjugation covers the lower half) and
/// `s ∈ [0, 40]` at `|k| = 1`, then refines dyadically around the maximiser.
pub fn estimate_c2_with<E: Executor>(
    exec: &E,
    arg_grid: usize,
    radius_grid: usize,
    refinement_levels: usize,
) -> Result<C2Estimate> {
    if arg_grid < 2 || radius_grid < 2 {
        return Err(Error::InvalidInput("c2 grids need at least two points per axis"));
    }
    let sample = |theta: f64, s: f64| -> Result<f64> {
        let sp = spectral_point(Complex64::from_polar(1.0, theta))?;
        Ok(biharmonic_green(Dim::Two, &sp, s)?.value.norm())
    };
    let mut d_theta = PI / arg_grid as f64;
    let mut d_s = C2_RADIUS_WINDOW / (radius_grid - 1) as f64;
    let coarse: Vec<(f64, f64)> = (0..arg_grid)
        .flat_map(|j| (0..radius_grid).map(move |i| (d_theta * (j + 1) as f64, d_s * i as f64)))
        .collect();
    let mut best = (f64::NEG_INFINITY, 0.0, 0.0);
    let mut levels = Vec::with_capacity(refinement_levels + 1);
    let mut points = coarse;
    for level in 0..=refinement_levels {
        let values = exec.map(points.len(), |idx| sample(points[idx].0, points[idx].1));
        for (p, v) in points.iter().zip(values) {
            let v = v?;
            if v > best.0 {
                best = (v, p.0, p.1);
            }
        }
        levels.push(best.0);
        if level == refinement_levels {
            break;
        }
        // local grid of the same shape spanning ±2 old spacings, half the spacing
        let (t0, s0) = (best.1, best.2);
        let (span_t, span_s) = (2.0 * d_theta, 2.0 * d_s);
        d_theta *= 0.5;
        d_s *= 0.5;
        let nt = (2.0 * span_t / d_theta) as usize + 1;
        let ns = (2.0 * span_s / d_s) as usize + 1;
        points = (0..nt)
            .flat_map(|j| (0..ns).map(move |i| (t0 - span_t + d_theta * j as f64, s0 - span_s + d_s * i as f64)))
            .filter(|&(t, s)| t > 0.0 && t <= PI && s >= 0.0)
            .collect();
    }
    Ok(C2Estimate {
        value: best.0,
        arg_lambda: best.1,
        scaled_radius: best.2,
        levels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sp(re: f64, im: f64) -> SpectralPoint {
        spectral_point(c(re, im)).unwrap()
    }

    #[test]
    fn laplace_examples() {
        let one = laplace_green(Dim::One, c(-1.0, 0.0), 0.0).unwrap();
        assert_relative_eq!(one.re, 0.5, max_relative = 1e-15);
        let three = laplace_green(Dim::Three, c(-1.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(three.re, (-1.0f64).exp() / (4.0 * PI), max_relative = 1e-14);
        assert_relative_eq!(three.re, 0.029_274_1, max_relative = 1e-4);
        let two = laplace_green(Dim::Two, c(-1.0, 0.0), 1.0).unwrap();
        assert_relative_eq!(two.re, 0.421_024_438_240_708_3 / (2.0 * PI), max_relative = 1e-13);
        assert!(matches!(laplace_green(Dim::Three, c(-1.0, 0.0), 0.0), Err(Error::DiagonalSingularity(3))));
        assert!(matches!(laplace_green(Dim::Two, c(-1.0, 0.0), 0.0), Err(Error::DiagonalSingularity(2))));
    }

    #[test]
    fn biharmonic_diagonal_values() {
        let p = sp(-1.0, 0.0);
        let v1 = biharmonic_green(Dim::One, &p, 0.0).unwrap();
        assert!((v1.value - c(SQRT_2 / 4.0, 0.0)).norm() < 1e-15);
        let v3 = biharmonic_green(Dim::Three, &p, 0.0).unwrap();
        assert_eq!(v3.regime, Regime::DiagonalSeries);
        assert!((v3.value - c(SQRT_2 / (8.0 * PI), 0.0)).norm() < 1e-16);
        let far = biharmonic_green(Dim::One, &p, 50.0).unwrap();
        assert!(far.value.norm() < 1e-15);
    }

    #[test]
    fn two_dimensional_diagonal_is_one_eighth() {
        for theta in [0.1, 1.0, 2.0, PI, -0.5, -3.0] {
            let p = sp(theta.cos(), theta.sin());
            let v = biharmonic_green(Dim::Two, &p, 0.0).unwrap();
            assert_relative_eq!(v.value.norm(), C2_DIAGONAL, max_relative = 1e-14);
        }
        // at λ = -1 the value is real: (ln e^{iπ/4} - ln e^{-iπ/4}) / (4π i) = 1/8
        let v = biharmonic_green(Dim::Two, &sp(-1.0, 0.0), 0.0).unwrap();
        assert!((v.value - c(0.125, 0.0)).norm() < 1e-16);
    }

    #[test]
    fn two_dimensional_matches_laplace_difference_off_diagonal() {
        for (lam, r) in [(c(-1.0, 0.0), 1.5), (c(0.3, 2.0), 0.7), (c(-4.0, -1.0), 3.0), (c(2.0, 0.1), 0.2)] {
            let p = spectral_point(lam).unwrap();
            let direct = (laplace_green(Dim::Two, p.k(), r).unwrap() - laplace_green(Dim::Two, -p.k(), r).unwrap())
                / (p.k() * 2.0);
            let v = biharmonic_green(Dim::Two, &p, r).unwrap().value;
            assert!((v - direct).norm() < 1e-12 * direct.norm(), "{lam} {r}: {v} vs {direct}");
        }
    }

    #[test]
    fn three_dimensional_matches_laplace_difference_off_diagonal() {
        let p = sp(0.5, -2.0);
        let r = 0.8;
        let direct = (laplace_green(Dim::Three, p.k(), r).unwrap() - laplace_green(Dim::Three, -p.k(), r).unwrap())
            / (p.k() * 2.0);
        let v = biharmonic_green(Dim::Three, &p, r).unwrap();
        assert_eq!(v.regime, Regime::Generic);
        assert!((v.value - direct).norm() < 1e-14 * direct.norm());
    }

    #[test]
    fn bound_constants() {
        let p = sp(-1.0, 0.0);
        assert_relative_eq!(green_bound(Dim::One, &p, None).unwrap(), 0.353_553_4, max_relative = 1e-7);
        assert_relative_eq!(green_bound(Dim::Three, &p, None).unwrap(), 0.056_269_8, max_relative = 1e-6);
        // |k| = 4
        let p = sp(-16.0, 0.0);
        assert_relative_eq!(green_bound(Dim::One, &p, None).unwrap(), 0.044_194_2, max_relative = 1e-6);
        assert_eq!(green_bound(Dim::Two, &p, None), Err(Error::MissingC2));
        assert_eq!(bound_ratio(Dim::Two, &p, 0.0, None), Err(Error::MissingC2));
    }

    #[test]
    fn bound_ratio_examples() {
        let p = sp(-1.0, 0.0);
        assert_relative_eq!(bound_ratio(Dim::One, &p, 0.0, None).unwrap(), 1.0, max_relative = 1e-14);
        assert_relative_eq!(bound_ratio(Dim::Three, &p, 1e-9, None).unwrap(), 1.0, max_relative = 1e-8);
        let q = bound_ratio(Dim::One, &sp(0.0, 1.0), 3.0, None).unwrap();
        assert!(q > 0.0 && q < 1.0);
    }

    #[test]
    fn pde_residual_second_order() {
        let p = sp(-1.0, 0.0);
        let coarse = pde_residual(&p, 2.0, 1e-2).unwrap();
        let fine = pde_residual(&p, 2.0, 5e-3).unwrap();
        assert!(coarse < 1e-4);
        let ratio = coarse / fine;
        assert!((3.0..5.0).contains(&ratio), "ratio {ratio}");
        assert!(matches!(pde_residual(&p, 0.1, 1e-2), Err(Error::StencilTouchesDiagonal { .. })));
    }

    #[test]
    fn c2_estimate_is_one_eighth() {
        let est = estimate_c2(64, 64, 3).unwrap();
        assert!(est.value >= C2_DIAGONAL * (1.0 - 1e-14));
        assert!(est.levels.windows(2).all(|w| w[1] >= w[0]));
        assert_relative_eq!(est.value, C2_DIAGONAL, max_relative = 1e-6);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(256))]

        #[test]
        fn conjugation_symmetry(re in -5.0f64..5.0, im in 0.01f64..5.0, r in 0.0f64..4.0) {
            let p = sp(re, im);
            let q = sp(re, -im);
            for d in [Dim::One, Dim::Two, Dim::Three] {
                let g = biharmonic_green(d, &p, r).unwrap().value;
                let h = biharmonic_green(d, &q, r).unwrap().value;
                prop_assert!((g.conj() - h).norm() <= 1e-12 * g.norm().max(1e-300));
            }
        }

        #[test]
        fn pointwise_bound_holds(re in -10.0f64..10.0, im in -10.0f64..10.0, r in 0.0f64..6.0) {
            prop_assume!(!on_positive_axis(c(re, im)));
            let p = sp(re, im);
            prop_assert!(bound_ratio(Dim::One, &p, r, None).unwrap() <= 1.0 + 1e-10);
            prop_assert!(bound_ratio(Dim::Three, &p, r, None).unwrap() <= 1.0 + 1e-10);
        }

        #[test]
        fn diagonal_regime_switch_is_continuous(re in -3.0f64..3.0, im in 0.05f64..3.0) {
            let p = sp(re, im);
            let scale = p.sqrt_k().norm().max(p.sqrt_neg_k().norm());
            let edge = DIAGONAL_THRESHOLD / scale;
            for d in [Dim::Two, Dim::Three] {
                let inside = biharmonic_green(d, &p, edge * (1.0 - 1e-9)).unwrap();
                let outside = biharmonic_green(d, &p, edge * (1.0 + 1e-9)).unwrap();
                prop_assert_eq!(inside.regime, Regime::DiagonalSeries);
                prop_assert_eq!(outside.regime, Regime::Generic);
                prop_assert!((inside.value - outside.value).norm() <= 1e-10 * inside.value.norm());
            }
        }
    }
}
