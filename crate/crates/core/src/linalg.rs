//! Dense complex linear algebra: pivoted LU determinants and the largest
//! singular value by power iteration.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::{Error, Result};

/// Square matrix stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    n: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![Complex64::new(0.0, 0.0); n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(n: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                data.push(f(i, j));
            }
        }
        Self { n, data }
    }

    pub fn from_rows(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput("matrix data length is not n²"));
        }
        Ok(Self { n, data })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn conj(&self) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// `y = A x`
    pub fn mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.row(i).iter().zip(x).map(|(a, b)| a * b).sum();
        }
    }

    /// `y = A* x`
    pub fn adjoint_mul_vec(&self, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (i, xi) in x.iter().enumerate() {
            for (yj, a) in y.iter_mut().zip(self.row(i)) {
                *yj += a.conj() * xi;
            }
        }
    }
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.n + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.n + j]
    }
}

/// Determinant in polar log form, `det = exp(log_abs + i·arg)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDet {
    pub log_abs: f64,
    /// Argument wrapped to `(-π, π]`.
    pub arg: f64,
    /// A pivot fell below `n·ε·max|a_ij|`; the matrix is singular to
    /// working precision. Not an error: for `I + K` this is the eigenvalue
    /// signal.
    pub singular: bool,
}

impl LogDet {
    pub fn one() -> Self {
        Self {
            log_abs: 0.0,
            arg: 0.0,
            singular: false,
        }
    }

    /// The determinant value, which may under- or overflow for large `|log_abs|`.
    pub fn value(&self) -> Complex64 {
        Complex64::from_polar(self.log_abs.exp(), self.arg)
    }
}

pub(crate) fn wrap_angle(mut a: f64) -> f64 {
    while a > PI {
        a -= 2.0 * PI;
    }
    while a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Log-determinant by LU factorisation with partial pivoting; consumes `a`.
pub fn lu_log_det(mut a: Matrix) -> LogDet {
    let n = a.n;
    if n == 0 {
        return LogDet::one();
    }
    let scale = a.data.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tiny = n as f64 * f64::EPSILON * scale;
    let mut log_abs = 0.0;
    let mut arg = 0.0;
    let mut singular = false;
    for col in 0..n {
        let (piv, piv_norm) = (col..n)
            .map(|r| (r, a[(r, col)].norm()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if piv != col {
            for j in 0..n {
                a.data.swap(col * n + j, piv * n + j);
            }
            arg += PI;
        }
        let p = a[(col, col)];
        if piv_norm <= tiny {
            singular = true;
        }
        if piv_norm == 0.0 {
            log_abs += f64::MIN_POSITIVE.ln();
            continue;
        }
        log_abs += piv_norm.ln();
        arg += p.im.atan2(p.re);
        let inv = p.inv();
        for r in (col + 1)..n {
            let factor = a[(r, col)] * inv;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in (col + 1)..n {
                let u = a[(col, j)];
                a[(r, j)] -= factor * u;
            }
        }
    }
    LogDet {
        log_abs,
        arg: wrap_angle(arg),
        singular,
    }
}

/// Largest singular value of `a` via power iteration on `A*A`.
///
/// Stops once successive estimates of `σ_max` agree to relative `tol`.
pub fn largest_singular_value(a: &Matrix, tol: f64, max_iter: usize) -> Result<f64> {
    let n = a.n;
    if n == 0 || a.frobenius_norm() == 0.0 {
        return Ok(0.0);
    }
    // deterministic start vector with no special alignment
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| Complex64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), 0.0))
        .collect();
    normalize(&mut v);
    let mut av = vec![Complex64::new(0.0, 0.0); n];
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut sigma = 0.0;
    for _ in 0..max_iter {
        a.mul_vec(&v, &mut av);
        a.adjoint_mul_vec(&av, &mut w);
        let lambda = norm(&w);
        if lambda == 0.0 {
            return Ok(0.0);
        }
        let next = lambda.sqrt();
        w.iter_mut().for_each(|z| *z /= lambda);
        core::mem::swap(&mut v, &mut w);
        if (next - sigma).abs() <= tol * next {
            return Ok(next);
        }
        sigma = next;
    }
    Err(Error::NoConvergence {
        iterations: max_iter,
    })
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(v: &mut [Complex64]) {
    let s = norm(v);
    v.iter_mut().for_each(|z| *z /= s);
}
