//! Nyström discretisation of the Birman–Schwinger operator
//! `K_λ = |V|^{1/2} (Δ² - λ)^{-1} V_{1/2}` with `V_{1/2} = |V|^{1/2} sgn V`.
//!
//! Entries carry the symmetric weighting `√w_i · |V|^{1/2}(x_i) G̃(x_i, x_j)
//! V_{1/2}(x_j) · √w_j`, so the Frobenius norm of the matrix is the discrete
//! Hilbert–Schmidt norm. Radial potentials in 2D and 3D are reduced to the
//! s-wave sector on the half-line; delta potentials give a 1×1 matrix.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::branch::{spectral_point, SpectralPoint};
use crate::exec::{Executor, Sequential};
use crate::green::biharmonic_green;
use crate::linalg::{largest_singular_value, lu_log_det, LogDet, Matrix};
use crate::potential::{integrate_abs, Kind, Potential};
use crate::quadrature::{graded_breaks, Domain, Quadrature, Rule, DEFAULT_ORDER};
use crate::{Dim, Error, Result};

/// How the kernel was reduced to a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Reduction {
    /// Full line, `d = 1`.
    Line,
    /// s-wave sector of a radial potential on `(0, L)`.
    SWave,
    /// A delta potential: the single entry `α G̃(0, 0)` (times `4π` in 3D).
    RankOne,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelMatrix {
    matrix: Matrix,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    point: SpectralPoint,
    dim: Dim,
    reduction: Reduction,
}

impl KernelMatrix {
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self) -> &SpectralPoint {
        &self.point
    }

    pub fn dimension(&self) -> Dim {
        self.dim
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    pub fn len(&self) -> usize {
        self.matrix.dim()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `(|V|^{1/2}, V_{1/2})` at one point, with `sgn 0 = 0`.
fn split_root(v: Complex64) -> (f64, Complex64) {
    let m = v.norm();
    if m == 0.0 {
        (0.0, Complex64::new(0.0, 0.0))
    } else {
        let s = m.sqrt();
        (s, v / s)
    }
}

pub fn assemble(v: &Potential, lambda: Complex64, quad: &Quadrature) -> Result<KernelMatrix> {
    assemble_with(&Sequential, v, lambda, quad)
}

/// Rows are computed independently through `exec`.
pub fn assemble_with<E: Executor>(
    exec: &E,
    v: &Potential,
    lambda: Complex64,
    quad: &Quadrature,
) -> Result<KernelMatrix> {
    let sp = spectral_point(lambda)?;
    let dim = v.dimension();
    if v.kind() == Kind::Delta {
        return rank_one(v, sp);
    }
    match dim {
        Dim::One => {
            if quad.domain() != Domain::Line {
                return Err(Error::InvalidInput("one-dimensional assembly needs a line quadrature"));
            }
            let nodes = quad.nodes();
            // G̃ only depends on |x - y|; evaluate it lazily per entry
            let green = |r: f64| biharmonic_green(Dim::One, &sp, r).map(|g| g.value);
            build(exec, v, sp, quad, Reduction::Line, |i, j| green((nodes[i] - nodes[j]).abs()), |x| {
                v.evaluate(&[x])
            })
        }
        Dim::Two => {
            if !v.is_radial() {
                return Err(Error::DimensionUnsupported(2));
            }
            swave_2d_with(exec, v, sp, quad)
        }
        Dim::Three => radial_reduce_3d_with(exec, v, lambda, quad),
    }
}

fn rank_one(v: &Potential, sp: SpectralPoint) -> Result<KernelMatrix> {
    let dim = v.dimension();
    let g0 = biharmonic_green(dim, &sp, 0.0)?.value;
    let mass = match dim {
        Dim::One => 1.0,
        _ => 4.0 * PI,
    };
    let entry = v.amplitude() * g0 * mass;
    Ok(KernelMatrix {
        matrix: Matrix::from_fn(1, |_, _| entry),
        nodes: alloc::vec![0.0],
        weights: alloc::vec![1.0],
        point: sp,
        dim,
        reduction: Reduction::RankOne,
    })
}

fn build<E, G, P>(
    exec: &E,
    v: &Potential,
    sp: SpectralPoint,
    quad: &Quadrature,
    reduction: Reduction,
    kernel: G,
    value: P,
) -> Result<KernelMatrix>
where
    E: Executor,
    G: Fn(usize, usize) -> Result<Complex64> + Sync + Send,
    P: Fn(f64) -> Complex64,
{
    let n = quad.len();
    let (left, right): (Vec<f64>, Vec<Complex64>) = quad
        .nodes()
        .iter()
        .zip(quad.weights())
        .map(|(&x, &w)| {
            let (m, s) = split_root(value(x));
            (w.sqrt() * m, s * w.sqrt())
        })
        .unzip();
    let rows = exec.map(n, |i| -> Result<Vec<Complex64>> {
        (0..n)
            .map(|j| {
                if left[i] == 0.0 || right[j] == Complex64::new(0.0, 0.0) {
                    Ok(Complex64::new(0.0, 0.0))
                } else {
                    Ok(kernel(i, j)? * right[j] * left[i])
                }
            })
            .collect()
    });
    let mut data = Vec::with_capacity(n * n);
    for row in rows {
        data.extend(row?);
    }
    Ok(KernelMatrix {
        matrix: Matrix::from_rows(n, data)?,
        nodes: quad.nodes().to_vec(),
        weights: quad.weights().to_vec(),
        point: sp,
        dim: v.dimension(),
        reduction,
    })
}

/// s-wave kernel of `(Δ² - λ)^{-1}` in 3D acting on `f = r g`:
/// `(g_k - g_{-k}) / 2k` with the image-method half-line kernel
/// `g_k(r, r') = e^{-√(-k) r_>} sinh(√(-k) r_<) / √(-k)`.
pub fn swave_kernel_3d(sp: &SpectralPoint, r: f64, rp: f64) -> Complex64 {
    let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
    let half = |a: Complex64| (-a * hi).exp() * (a * lo).sinh() / a;
    (half(sp.sqrt_neg_k()) - half(sp.sqrt_k())) / (sp.k() * 2.0)
}

pub fn radial_reduce_3d(v: &Potential, lambda: Complex64, quad: &Quadrature) -> Result<KernelMatrix> {
    radial_reduce_3d_with(&Sequential, v, lambda, quad)
}

pub fn radial_reduce_3d_with<E: Executor>(
    exec: &E,
    v: &Potential,
    lambda: Complex64,
    quad: &Quadrature,
) -> Result<KernelMatrix> {
    if v.dimension() != Dim::Three {
        return Err(Error::WrongDimension {
            expected: 3,
            got: v.dimension().as_usize(),
        });
    }
    if !v.is_radial() {
        return Err(Error::NotRadial);
    }
    let sp = spectral_point(lambda)?;
    if v.kind() == Kind::Delta {
        return rank_one(v, sp);
    }
    if quad.domain() != Domain::HalfLine {
        return Err(Error::InvalidInput("radial assembly needs a half-line quadrature"));
    }
    let nodes = quad.nodes();
    build(
        exec,
        v,
        sp,
        quad,
        Reduction::SWave,
        |i, j| Ok(swave_kernel_3d(&sp, nodes[i], nodes[j])),
        |r| v.radial_value(r),
    )
}

/// s-wave kernel in 2D acting on `f = √r g`:
/// `√(r r') ∫_0^{2π} G̃(|x - y|) dθ`, by panels graded towards `θ = 0`.
pub fn swave_kernel_2d(sp: &SpectralPoint, r: f64, rp: f64) -> Result<Complex64> {
    let rule = Rule::new(DEFAULT_ORDER);
    let breaks = graded_breaks(0.0, PI, 8, 0.5);
    let mut sum = Complex64::new(0.0, 0.0);
    for w in breaks.windows(2) {
        let h = 0.5 * (w[1] - w[0]);
        for (x, wt) in rule.nodes().iter().zip(rule.weights()) {
            let t = w[0] + h * (x + 1.0);
            let rho = (r * r + rp * rp - 2.0 * r * rp * t.cos()).max(0.0).sqrt();
            sum += biharmonic_green(Dim::Two, sp, rho)?.value * (h * wt);
        }
    }
    Ok(sum * (2.0 * (r * rp).sqrt()))
}

fn swave_2d_with<E: Executor>(exec: &E, v: &Potential, sp: SpectralPoint, quad: &Quadrature) -> Result<KernelMatrix> {
    if quad.domain() != Domain::HalfLine {
        return Err(Error::InvalidInput("radial assembly needs a half-line quadrature"));
    }
    let nodes = quad.nodes();
    build(
        exec,
        v,
        sp,
        quad,
        Reduction::SWave,
        |i, j| swave_kernel_2d(&sp, nodes[i], nodes[j]),
        |r| v.radial_value(r),
    )
}

/// Frobenius norm, the discrete Hilbert–Schmidt norm.
pub fn hs_norm(k: &KernelMatrix) -> f64 {
    k.matrix.frobenius_norm()
}

/// Largest singular value by power iteration on `K*K`.
pub fn op_norm(k: &KernelMatrix, tol: f64, max_iter: usize) -> Result<f64> {
    largest_singular_value(&k.matrix, tol, max_iter)
}

/// `det(I + K)` in log-polar form.
pub fn fredholm_det(k: &KernelMatrix) -> LogDet {
    let n = k.len();
    let mut a = k.matrix.clone();
    for i in 0..n {
        a[(i, i)] += 1.0;
    }
    lu_log_det(a)
}

/// Squared Hilbert–Schmidt norms of `M_ε = χ_Ω |V|^{1/2} (Δ² - λ - iε)^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MEpsHs {
    /// Upper bound after splitting `|G_k - G_{-k}|² ≤ 2(|G_k|² + |G_{-k}|²)`.
    pub closed_form: f64,
    /// The double integral itself, by quadrature in `|x - y|`.
    pub quadrature: f64,
}

pub fn m_eps_hs(v: &Potential, omega_radius: f64, lambda: f64, eps: f64) -> Result<MEpsHs> {
    let dim = v.dimension();
    if dim == Dim::Two {
        return Err(Error::DimensionUnsupported(2));
    }
    if !(lambda > 0.0) || eps == 0.0 || !eps.is_finite() {
        return Err(Error::InvalidInput("m_eps_hs needs lambda > 0 and eps != 0"));
    }
    if !(omega_radius > 0.0) {
        return Err(Error::InvalidInput("omega radius must be positive"));
    }
    let mass = local_l1(v, omega_radius)?;
    let sp = spectral_point(Complex64::new(lambda, eps))?;
    let (a, b) = (sp.sqrt_neg_k(), sp.sqrt_k());
    let km = sp.k().norm();
    let roots = 1.0 / a.re + 1.0 / b.re;
    let closed = match dim {
        Dim::One => roots / (8.0 * km * km * km),
        _ => roots / (16.0 * PI * km * km),
    } * mass;
    // |G_k - G_{-k}|² r^{d-1} integrated over ℝ^d, up to the prefactor
    let (ca, cb, pre) = match dim {
        Dim::One => (a.inv() * 0.5, b.inv() * 0.5, 2.0),
        _ => (Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0), 4.0 * PI / (16.0 * PI * PI)),
    };
    let integrand = |r: f64| (ca * (-a * r).exp() - cb * (-b * r).exp()).norm_sqr();
    let direct = pre * exponential_tail_integral(a, b, integrand) / (4.0 * km * km);
    Ok(MEpsHs {
        closed_form: closed,
        quadrature: direct * mass,
    })
}

/// `∫_0^∞ f` for `f` built from `e^{-ar}`, `e^{-br}`: oscillation-resolving
/// panels while the faster exponential is alive, coarse panels on the slow tail.
fn exponential_tail_integral<F: Fn(f64) -> f64>(a: Complex64, b: Complex64, f: F) -> f64 {
    let rule = Rule::new(DEFAULT_ORDER);
    let (slow, fast) = if a.re < b.re { (a.re, b.re) } else { (b.re, a.re) };
    let omega = a.im.abs().max(b.im.abs()).max(1e-300);
    let near = 40.0 / fast;
    let far = 40.0 / slow;
    let h = (PI / omega).min(1.0 / fast) * 0.5;
    let panels = ((near / h).ceil() as usize).clamp(1, 2_000_000);
    let mut total = rule.composite(0.0, near, panels, &f);
    if far > near {
        total += rule.composite(near, far, 200, &f);
    }
    total
}

/// `∫_{|x| < R} |V|`.
fn local_l1(v: &Potential, radius: f64) -> Result<f64> {
    match v.kind() {
        Kind::Delta => {
            let alpha = v.amplitude().norm();
            return Ok(match v.dimension() {
                Dim::One => alpha,
                _ => 4.0 * PI * alpha,
            });
        }
        _ if v.support_radius() == 0.0 => return Ok(0.0),
        _ => {}
    }
    let lim = match v.truncation_radius() {
        Ok(l) => l.min(radius),
        Err(_) => radius,
    };
    let domain = if v.dimension() == Dim::One {
        Domain::Line
    } else {
        Domain::HalfLine
    };
    let mut breaks = Vec::new();
    if domain == Domain::Line {
        breaks.push(-lim);
    } else {
        breaks.push(0.0);
    }
    for b in v.breakpoints().into_iter().filter(|&b| b < lim) {
        if domain == Domain::Line {
            breaks.push(-b);
        }
        breaks.push(b);
    }
    breaks.push(lim);
    breaks.sort_by(|x, y| x.partial_cmp(y).unwrap());
    breaks.dedup();
    let quad = Quadrature::from_breakpoints(&breaks, 48, 4, DEFAULT_ORDER, domain)?;
    Ok(integrate_abs(v, &quad, |m, _| m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::green::green_bound;
    use crate::potential::l1_norm;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn narrow(alpha: f64) -> (Potential, Quadrature) {
        let v = Potential::delta_eps(Dim::One, c(alpha, 0.0), 1e-3).unwrap();
        let q = v.quadrature(8, 10).unwrap();
        (v, q)
    }

    #[test]
    fn zero_potential() {
        let v = Potential::zero(Dim::One);
        let q = Quadrature::line(1.0, 4, 10).unwrap();
        let k = assemble(&v, c(-1.0, 0.0), &q).unwrap();
        assert_eq!(hs_norm(&k), 0.0);
        assert_eq!(op_norm(&k, 1e-10, 10).unwrap(), 0.0);
        let det = fredholm_det(&k);
        assert_eq!((det.log_abs, det.arg), (0.0, 0.0));
    }

    #[test]
    fn narrow_well_is_rank_one() {
        let (v, q) = narrow(-1.0);
        let k = assemble(&v, c(-1.0, 0.0), &q).unwrap();
        assert!((hs_norm(&k) - 0.5 / 2f64.sqrt()).abs() < 1e-3);
        let op = op_norm(&k, 1e-12, 500).unwrap();
        assert_relative_eq!(op, hs_norm(&k), max_relative = 1e-9);
        let det = fredholm_det(&k).value();
        assert!((det - c(1.0 - 0.5 / 2f64.sqrt(), 0.0)).norm() < 1e-2);
        assert!((det - c(0.64645, 0.0)).norm() < 1e-2);
        let k = assemble(&v, c(-0.25, 0.0), &q).unwrap();
        assert!(fredholm_det(&k).value().norm() < 1e-2);
    }

    #[test]
    fn narrow_well_approaches_delta() {
        let lambda = c(-0.3, 0.8);
        let delta = Potential::delta(Dim::One, c(0.7, -0.2)).unwrap();
        let exact = fredholm_det(&assemble(&delta, lambda, &Quadrature::empty(Domain::Line)).unwrap()).value();
        let mut last = f64::INFINITY;
        for eps in [1e-1, 1e-2, 1e-3] {
            let v = Potential::delta_eps(Dim::One, c(0.7, -0.2), eps).unwrap();
            let q = v.quadrature(8, 10).unwrap();
            let err = (fredholm_det(&assemble(&v, lambda, &q).unwrap()).value() - exact).norm();
            assert!(err < last);
            last = err;
        }
        assert!(last < 1e-3);
    }

    #[test]
    fn three_dimensional_delta_matches_bump() {
        let lambda = c(-0.25, 0.0);
        let delta = Potential::delta(Dim::Three, c(-1.0, 0.0)).unwrap();
        let k = assemble(&delta, lambda, &Quadrature::empty(Domain::HalfLine)).unwrap();
        assert!(fredholm_det(&k).value().norm() < 1e-12);
        let v = Potential::delta_eps(Dim::Three, c(-1.0, 0.0), 1e-3).unwrap();
        let q = v.quadrature(8, 10).unwrap();
        assert!(fredholm_det(&assemble(&v, lambda, &q).unwrap()).value().norm() < 1e-2);
    }

    #[test]
    fn conjugation_symmetry() {
        let v = Potential::gaussian(Dim::One, c(-1.0, 0.6), 0.8).unwrap();
        let q = v.quadrature(12, 10).unwrap();
        let lambda = c(-0.4, 0.9);
        let k = assemble(&v, lambda, &q).unwrap();
        let kc = assemble(&v.conj(), lambda.conj(), &q).unwrap();
        for (x, y) in k.matrix().as_slice().iter().zip(kc.matrix().as_slice()) {
            assert!((x.conj() - y).norm() <= 1e-14 * (1.0 + x.norm()));
        }
        let w = Potential::well(Dim::Three, c(0.5, -1.0), 1.2).unwrap();
        let q = w.quadrature(8, 10).unwrap();
        let k = assemble(&w, lambda, &q).unwrap();
        let kc = assemble(&w.conj(), lambda.conj(), &q).unwrap();
        for (x, y) in k.matrix().as_slice().iter().zip(kc.matrix().as_slice()) {
            assert!((x.conj() - y).norm() <= 1e-14 * (1.0 + x.norm()));
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let v = Potential::gaussian(Dim::One, c(1.0, 0.0), 1.0).unwrap();
        let q = v.quadrature(4, 10).unwrap();
        assert_eq!(assemble(&v, c(2.0, 0.0), &q), Err(Error::LambdaOnPositiveAxis(c(2.0, 0.0))));
        let s = Potential::shifted_gaussian(Dim::Three, c(1.0, 0.0), 1.0, [0.5, 0.0, 0.0]).unwrap();
        assert_eq!(assemble(&s, c(-1.0, 0.0), &Quadrature::half_line(5.0, 4, 10).unwrap()), Err(Error::NotRadial));
        let s2 = Potential::shifted_gaussian(Dim::Two, c(1.0, 0.0), 1.0, [0.5, 0.0, 0.0]).unwrap();
        assert_eq!(
            assemble(&s2, c(-1.0, 0.0), &Quadrature::half_line(5.0, 4, 10).unwrap()),
            Err(Error::DimensionUnsupported(2))
        );
    }

    #[test]
    fn swave_3d_vanishes_at_origin() {
        let sp = spectral_point(c(-0.7, 0.4)).unwrap();
        assert_eq!(swave_kernel_3d(&sp, 0.0, 1.3), c(0.0, 0.0));
        assert_eq!(swave_kernel_3d(&sp, 2.0, 0.0), c(0.0, 0.0));
    }

    #[test]
    fn swave_3d_matches_spherical_average() {
        // 4π r r' ⟨G̃(|r e - r' ω|)⟩ over ω ∈ S², by Monte Carlo
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (r, rp, lambda) in [(0.4, 1.1, c(-1.0, 0.3)), (1.5, 0.2, c(0.5, 2.0)), (0.9, 0.95, c(-2.0, -1.0))] {
            let sp = spectral_point(lambda).unwrap();
            let n = 200_000;
            let (mut s_re, mut s_im, mut q_re, mut q_im) = (0.0, 0.0, 0.0, 0.0);
            for _ in 0..n {
                let z: f64 = 2.0 * rng.gen::<f64>() - 1.0;
                let rho = (r * r + rp * rp - 2.0 * r * rp * z).max(0.0).sqrt();
                let g = biharmonic_green(Dim::Three, &sp, rho).unwrap().value * (4.0 * PI * r * rp);
                s_re += g.re;
                s_im += g.im;
                q_re += g.re * g.re;
                q_im += g.im * g.im;
            }
            let nf = n as f64;
            let (m_re, m_im) = (s_re / nf, s_im / nf);
            let se_re = ((q_re / nf - m_re * m_re) / nf).sqrt();
            let se_im = ((q_im / nf - m_im * m_im) / nf).sqrt();
            let got = swave_kernel_3d(&sp, r, rp);
            assert!((got.re - m_re).abs() <= 3.0 * se_re + 1e-12, "{got} vs {m_re}");
            assert!((got.im - m_im).abs() <= 3.0 * se_im + 1e-12, "{got} vs {m_im}");
        }
    }

    #[test]
    fn swave_2d_matches_addition_theorem() {
        // ∫_0^{2π} K₀(a|x - y|) dθ = 2π I₀(a r_<) K₀(a r_>)
        use crate::branch::{k0_series_parts, macdonald_k0};
        for (r, rp, lambda) in [(0.3, 0.8, c(-1.0, 0.5)), (0.5, 0.5, c(-0.3, -0.2)), (1.1, 0.2, c(0.4, 1.0))] {
            let sp = spectral_point(lambda).unwrap();
            let (lo, hi) = if r < rp { (r, rp) } else { (rp, r) };
            let part = |a: Complex64| k0_series_parts(a * lo).0 * macdonald_k0(a * hi).unwrap();
            let want = (part(sp.sqrt_neg_k()) - part(sp.sqrt_k())) / (sp.k() * 2.0) * (r * rp).sqrt();
            let got = swave_kernel_2d(&sp, r, rp).unwrap();
            assert!((got - want).norm() <= 1e-9 * want.norm(), "{got} vs {want}");
        }
    }

    #[test]
    fn operator_norm_matches_dense_svd() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=8 {
            let data: Vec<Complex64> = (0..n * n).map(|_| c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)).collect();
            let dense = nalgebra::DMatrix::from_row_slice(n, n, &data);
            let want = dense.singular_values().max();
            let km = KernelMatrix {
                matrix: Matrix::from_rows(n, data).unwrap(),
                nodes: alloc::vec![0.0; n],
                weights: alloc::vec![1.0; n],
                point: spectral_point(c(-1.0, 0.0)).unwrap(),
                dim: Dim::One,
                reduction: Reduction::Line,
            };
            assert_relative_eq!(op_norm(&km, 1e-14, 100_000).unwrap(), want, max_relative = 1e-8);
        }
    }

    #[test]
    fn grid_refinement_converges() {
        let v = Potential::gaussian(Dim::One, c(-1.5, 0.5), 0.7).unwrap();
        let lambda = c(-0.5, 0.3);
        let run = |panels| {
            let q = v.quadrature(panels, 10).unwrap();
            let k = assemble(&v, lambda, &q).unwrap();
            (hs_norm(&k), fredholm_det(&k).value())
        };
        let (h1, d1) = run(8);
        let (h2, d2) = run(16);
        let (h3, d3) = run(32);
        // the kernel has a |x - y|³ kink on the diagonal, so the rate is h⁴
        assert!((h3 - h2).abs() * 8.0 <= (h2 - h1).abs());
        assert!((d3 - d2).norm() * 8.0 <= (d2 - d1).norm());
        assert!((h3 - h2).abs() < 1e-7 && (d3 - d2).norm() < 1e-7);
    }

    #[test]
    fn m_eps_examples() {
        let v = Potential::well(Dim::One, c(1.0, 0.0), 1.0).unwrap();
        let zero = m_eps_hs(&Potential::zero(Dim::One), 1.0, 1.0, 1e-2).unwrap();
        assert_eq!((zero.closed_form, zero.quadrature), (0.0, 0.0));
        let mut prev: Option<f64> = None;
        for eps in [1e-1, 5e-2, 2.5e-2, 1.25e-2] {
            let m = m_eps_hs(&v, 2.0, 1.0, eps).unwrap();
            assert!(m.quadrature <= m.closed_form * (1.0 + 1e-6));
            if let Some(p) = prev {
                assert!(m.closed_form / p <= 2f64.powf(1.75) * 1.05);
            }
            prev = Some(m.closed_form);
        }
    }

    #[test]
    fn m_eps_quadrature_matches_exponential_integrals() {
        // ∫_0^∞ |A e^{-ar} - B e^{-br}|² = |A|²/2Re a + |B|²/2Re b - 2 Re(A B̄ / (a + b̄))
        let exact = |ca: Complex64, cb: Complex64, a: Complex64, b: Complex64| {
            ca.norm_sqr() / (2.0 * a.re) + cb.norm_sqr() / (2.0 * b.re) - 2.0 * (ca * cb.conj() / (a + b.conj())).re
        };
        for (d, eps) in [(Dim::One, 1e-1), (Dim::One, 1e-3), (Dim::Three, 1e-2), (Dim::Three, -1e-3)] {
            let v = Potential::well(d, c(0.0, 2.0), 1.0).unwrap();
            let m = m_eps_hs(&v, 5.0, 1.0, eps).unwrap();
            let q = v.quadrature(16, 10).unwrap();
            let mass = l1_norm(&v, &q).unwrap();
            let sp = spectral_point(c(1.0, eps)).unwrap();
            let (a, b) = (sp.sqrt_neg_k(), sp.sqrt_k());
            let km = sp.k().norm();
            let want = match d {
                Dim::One => 2.0 * exact(a.inv() * 0.5, b.inv() * 0.5, a, b),
                _ => exact(c(1.0, 0.0), c(1.0, 0.0), a, b) / (4.0 * PI),
            } / (4.0 * km * km)
                * mass;
            assert_relative_eq!(m.quadrature, want, max_relative = 1e-8);
            assert!(m.quadrature <= m.closed_form);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn hs_bound_holds(
            re in -3.0f64..3.0, im in -3.0f64..3.0,
            mag in 0.05f64..5.0, arg in -3.1f64..3.1,
            width in 0.2f64..2.0, which in 0usize..3,
        ) {
            let amp = c(re, im);
            let v = match which {
                0 => Potential::gaussian(Dim::One, amp, width).unwrap(),
                1 => Potential::well(Dim::One, amp, width).unwrap(),
                _ => Potential::well(Dim::Three, amp, width).unwrap(),
            };
            let q = v.quadrature(16, 10).unwrap();
            let lambda = Complex64::from_polar(mag, arg);
            prop_assume!(!crate::branch::on_positive_axis(lambda));
            let k = assemble(&v, lambda, &q).unwrap();
            let sp = spectral_point(lambda).unwrap();
            let bound = green_bound(v.dimension(), &sp, None).unwrap() * l1_norm(&v, &q).unwrap();
            let hs = hs_norm(&k);
            prop_assert!(hs <= bound * (1.0 + 1e-6), "{} > {}", hs, bound);
            let op = op_norm(&k, 1e-9, 20_000).unwrap();
            prop_assert!(op <= hs * (1.0 + 1e-9));
        }
    }
}
