//! Residuals of the elementary exponential–trigonometric inequalities behind
//! the sharp one- and three-dimensional constants. Every residual is
//! mathematically `≤ 0` on `p, q ≥ 0`.

use alloc::vec::Vec;

use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::{Executor, Sequential};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Which {
    Sin1d,
    Cos3d,
    Cos,
    PhiDerivative,
}

impl Which {
    pub const ALL: [Which; 4] = [Which::Sin1d, Which::Cos3d, Which::Cos, Which::PhiDerivative];

    pub fn name(self) -> &'static str {
        match self {
            Which::Sin1d => "sin_1d",
            Which::Cos3d => "cos_3d",
            Which::Cos => "cos_remark",
            Which::PhiDerivative => "phi_derivative",
        }
    }

    /// Residual at `(p, q)`; the derivative check orders its arguments.
    pub fn eval(self, p: f64, q: f64) -> Result<f64> {
        match self {
            Which::Sin1d => residual_sin(p, q),
            Which::Cos3d => residual_cos3d(p, q),
            Which::Cos => residual_cos(p, q),
            Which::PhiDerivative => phi_derivative_3d(p.min(q), p.max(q)),
        }
    }
}

fn check(p: f64, q: f64) -> Result<()> {
    if !(p >= 0.0 && q >= 0.0) {
        return Err(Error::NegativeInput);
    }
    Ok(())
}

/// `e^{-2p} + e^{-2q} + 2e^{-(p+q)} sin(p+q) - 2`.
pub fn residual_sin(p: f64, q: f64) -> Result<f64> {
    check(p, q)?;
    let s = p + q;
    Ok((-2.0 * p).exp() + (-2.0 * q).exp() + 2.0 * (-s).exp() * s.sin() - 2.0)
}

/// `e^{-2p} + e^{-2q} - 2e^{-(p+q)} cos(p+q) - 2(p² + q²)`.
pub fn residual_cos3d(p: f64, q: f64) -> Result<f64> {
    check(p, q)?;
    let s = p + q;
    Ok((-2.0 * p).exp() + (-2.0 * q).exp() - 2.0 * (-s).exp() * s.cos() - 2.0 * (p * p + q * q))
}

/// `e^{-2p} + e^{-2q} - 2e^{-(p+q)} cos(p+q) - 2`.
pub fn residual_cos(p: f64, q: f64) -> Result<f64> {
    check(p, q)?;
    let s = p + q;
    Ok((-2.0 * p).exp() + (-2.0 * q).exp() - 2.0 * (-s).exp() * s.cos() - 2.0)
}

/// `Φ'(q) = -2e^{-2q} + 2e^{-(p₀+q)}(cos(p₀+q) + sin(p₀+q)) - 4q` for `q ≥ p₀`.
pub fn phi_derivative_3d(p0: f64, q: f64) -> Result<f64> {
    check(p0, q)?;
    if q < p0 {
        return Err(Error::InvalidInput("phi_derivative_3d needs q >= p0"));
    }
    let s = p0 + q;
    Ok(-2.0 * (-2.0 * q).exp() + 2.0 * (-s).exp() * (s.cos() + s.sin()) - 4.0 * q)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sampler {
    /// Uniform tensor grid including the corners.
    Grid,
    /// Seeded uniform samples.
    Random,
    /// Tensor grid log-spaced from `1e-8` to `pmax`, plus zero: probes the
    /// near-equality corner.
    LogGrid,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualSample {
    pub p: f64,
    pub q: f64,
    pub residual: f64,
    pub which: Which,
}

pub fn max_residual(which: Which, sampler: Sampler, n: usize, pmax: f64, seed: u64) -> Result<ResidualSample> {
    max_residual_with(&Sequential, which, sampler, n, pmax, seed)
}

const BLOCK: usize = 1 << 14;

/// Largest residual over `n` samples of `[0, pmax]²`. Grids use
/// `⌈√n⌉²` points.
pub fn max_residual_with<E: Executor>(
    exec: &E,
    which: Which,
    sampler: Sampler,
    n: usize,
    pmax: f64,
    seed: u64,
) -> Result<ResidualSample> {
    if n == 0 || !(pmax > 0.0) || !pmax.is_finite() {
        return Err(Error::InvalidInput("need at least one sample and a positive finite pmax"));
    }
    let side = (n as f64).sqrt().ceil() as usize;
    let axis: Vec<f64> = match sampler {
        Sampler::Grid => (0..side).map(|i| pmax * i as f64 / (side.max(2) - 1) as f64).collect(),
        Sampler::LogGrid => {
            let lo: f64 = 1e-8_f64.min(pmax);
            let ratio = (pmax / lo).powf(1.0 / (side.max(3) - 2) as f64);
            core::iter::once(0.0).chain((0..side - 1).map(|i| lo * ratio.powi(i as i32))).collect()
        }
        Sampler::Random => Vec::new(),
    };
    let total = if sampler == Sampler::Random { n } else { side * side };
    let blocks = total.div_ceil(BLOCK);
    let best = exec.map(blocks, |b| -> Result<ResidualSample> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let mut top = ResidualSample {
            p: 0.0,
            q: 0.0,
            residual: f64::NEG_INFINITY,
            which,
        };
        for idx in b * BLOCK..((b + 1) * BLOCK).min(total) {
            let (p, q) = match sampler {
                Sampler::Random => (pmax * rng.gen::<f64>(), pmax * rng.gen::<f64>()),
                _ => (axis[idx % side], axis[idx / side]),
            };
            let r = which.eval(p, q)?;
            if r > top.residual {
                top = ResidualSample { p, q, residual: r, which };
            }
        }
        Ok(top)
    });
    let mut out: Option<ResidualSample> = None;
    for s in best {
        let s = s?;
        if out.is_none_or(|o| s.residual > o.residual) {
            out = Some(s);
        }
    }
    out.ok_or(Error::InvalidInput("no samples"))
}
