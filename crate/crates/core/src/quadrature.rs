//! Composite Gauss–Legendre rules.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_traits::Float;

use crate::{Error, Result};

pub const DEFAULT_ORDER: usize = 10;

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let n = order;
    let mut nodes = alloc::vec![0.0; n];
    let mut weights = alloc::vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// A reference rule on `[-1, 1]` reused across panels.
#[derive(Debug, Clone)]
pub struct Rule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Rule {
    pub fn new(order: usize) -> Self {
        let (nodes, weights) = gauss_legendre(order);
        Self { nodes, weights }
    }

    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Integrates `f` over `[a, b]` with a single panel.
    pub fn panel<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        let mut acc = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Composite rule with `panels` equal panels on `[a, b]`.
    pub fn composite<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, panels: usize, mut f: F) -> f64 {
        let h = (b - a) / panels as f64;
        (0..panels)
            .map(|p| {
                let lo = a + h * p as f64;
                self.panel(lo, lo + h, &mut f)
            })
            .sum()
    }

    /// Composite rule on panels graded geometrically towards `a`: the panel
    /// touching `a` has width `(b - a) · ratio^(panels - 1) · (1 - ratio)`-ish,
    /// which resolves integrable endpoint singularities.
    pub fn graded<F: FnMut(f64) -> f64>(
        &self,
        a: f64,
        b: f64,
        panels: usize,
        ratio: f64,
        mut f: F,
    ) -> f64 {
        let breaks = graded_breaks(a, b, panels, ratio);
        breaks.windows(2).map(|w| self.panel(w[0], w[1], &mut f)).sum()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Breakpoints from `a` to `b` with widths shrinking geometrically towards `a`.
pub fn graded_breaks(a: f64, b: f64, panels: usize, ratio: f64) -> Vec<f64> {
    let mut breaks = Vec::with_capacity(panels + 1);
    breaks.push(a);
    for p in 1..panels {
        let t = ratio.powi((panels - p) as i32);
        breaks.push(a + (b - a) * t);
    }
    breaks.push(b);
    breaks
}

/// Integration domain of a Nyström grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// The interval `[-L, L]`.
    Line,
    /// The radial interval `(0, L)`.
    HalfLine,
}

/// Nodes and positive weights of a composite Gauss–Legendre rule on a
/// truncated domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Quadrature {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    truncation: f64,
    panels: usize,
    order: usize,
    domain: Domain,
}

impl Quadrature {
    /// Panels of equal width on each segment between consecutive
    /// breakpoints; every segment receives a share of `panels`
    /// proportional to its length, and at least `min_per_segment`.
    pub fn from_breakpoints(
        breaks: &[f64],
        panels: usize,
        min_per_segment: usize,
        order: usize,
        domain: Domain,
    ) -> Result<Self> {
        if breaks.len() < 2 || order == 0 || panels == 0 {
            return Err(Error::InvalidInput("quadrature needs a segment, panels and order"));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(Error::InvalidInput("quadrature breakpoints must increase"));
        }
        let lo = breaks[0];
        let hi = *breaks.last().unwrap();
        let truncation = match domain {
            Domain::Line => hi.max(-lo),
            Domain::HalfLine => hi,
        };
        let rule = Rule::new(order);
        let total = hi - lo;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let mut used = 0;
        for w in breaks.windows(2) {
            let share = ((w[1] - w[0]) / total * panels as f64).round() as usize;
            let count = share.max(min_per_segment).max(1);
            used += count;
            let h = (w[1] - w[0]) / count as f64;
            for p in 0..count {
                let a = w[0] + h * p as f64;
                for (x, wt) in rule.nodes.iter().zip(&rule.weights) {
                    nodes.push(a + 0.5 * h * (x + 1.0));
                    weights.push(0.5 * h * wt);
                }
            }
        }
        Ok(Self {
            nodes,
            weights,
            truncation,
            panels: used,
            order,
            domain,
        })
    }

    /// `[-L, L]` split into `panels` equal panels.
    pub fn line(truncation: f64, panels: usize, order: usize) -> Result<Self> {
        if !(truncation > 0.0) {
            return Err(Error::InvalidInput("truncation must be positive"));
        }
        Self::from_breakpoints(&[-truncation, truncation], panels, 1, order, Domain::Line)
    }

    /// `(0, L)` split into `panels` equal panels.
    pub fn half_line(truncation: f64, panels: usize, order: usize) -> Result<Self> {
        if !(truncation > 0.0) {
            return Err(Error::InvalidInput("truncation must be positive"));
        }
        Self::from_breakpoints(&[0.0, truncation], panels, 1, order, Domain::HalfLine)
    }

    /// An empty rule, used by point interactions that carry no grid.
    pub fn empty(domain: Domain) -> Self {
        Self {
            nodes: Vec::new(),
            weights: Vec::new(),
            truncation: 0.0,
            panels: 0,
            order: 0,
            domain,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn truncation(&self) -> f64 {
        self.truncation
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Sum of the weights, i.e. the length of the covered interval.
    pub fn measure(&self) -> f64 {
        self.weights.iter().sum()
    }
}
