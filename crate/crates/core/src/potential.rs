//! Complex potentials and the norms the enclosure bounds consume.
//!
//! A [`Potential`] is a complex amplitude times a real profile. Profiles are
//! radial unless stated otherwise; in one dimension "radial" means even.
//!
//! Delta potentials follow the three-dimensional convention `4π α δ`, so the
//! L¹ norm of `delta(Dim::Three, α)` is `4π|α|`. The regularised `delta_eps`
//! keeps that mass for every `ε`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec::{Executor, Sequential};
use crate::quadrature::{Domain, Quadrature, Rule, DEFAULT_ORDER};
use crate::{Dim, Error, Result};

/// Relative level below which a decaying potential is treated as zero.
pub const TAIL_LEVEL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Analytic,
    Grid,
    Delta,
    DeltaEps,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Profile {
    Zero,
    /// `exp(-|x - c|² / w²)`.
    Gaussian { width: f64, center: [f64; 3] },
    /// Indicator of the open ball `|x| < radius` (an interval in 1D).
    Well { radius: f64 },
    /// `|x|^{-2}`.
    InverseSquare,
    /// Piecewise-linear samples: positions in 1D, radii in 2D/3D; zero outside.
    Grid { nodes: Vec<f64>, values: Vec<Complex64> },
    Delta,
    DeltaEps { eps: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Potential {
    dim: Dim,
    amplitude: Complex64,
    profile: Profile,
}

impl Potential {
    pub fn zero(dim: Dim) -> Self {
        Self {
            dim,
            amplitude: Complex64::new(0.0, 0.0),
            profile: Profile::Zero,
        }
    }

    pub fn gaussian(dim: Dim, amplitude: Complex64, width: f64) -> Result<Self> {
        Self::shifted_gaussian(dim, amplitude, width, [0.0; 3])
    }

    /// A Gaussian centred at `center`; components beyond `dim` are ignored.
    pub fn shifted_gaussian(dim: Dim, amplitude: Complex64, width: f64, center: [f64; 3]) -> Result<Self> {
        if !(width > 0.0) || !width.is_finite() {
            return Err(Error::InvalidInput("gaussian width must be positive"));
        }
        let mut c = [0.0; 3];
        c[..dim.as_usize()].copy_from_slice(&center[..dim.as_usize()]);
        Ok(Self {
            dim,
            amplitude,
            profile: Profile::Gaussian { width, center: c },
        })
    }

    pub fn well(dim: Dim, amplitude: Complex64, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidInput("well radius must be positive"));
        }
        Ok(Self {
            dim,
            amplitude,
            profile: Profile::Well { radius },
        })
    }

    pub fn inverse_square(dim: Dim, amplitude: Complex64) -> Self {
        Self {
            dim,
            amplitude,
            profile: Profile::InverseSquare,
        }
    }

    /// Linear interpolation through `(nodes[i], values[i])`. In 2D and 3D the
    /// nodes are radii.
    pub fn grid(dim: Dim, nodes: Vec<f64>, values: Vec<Complex64>) -> Result<Self> {
        if nodes.len() < 2 || nodes.len() != values.len() {
            return Err(Error::InvalidInput("grid needs at least two nodes and one value per node"));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) || nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("grid nodes must be finite and strictly increasing"));
        }
        if dim != Dim::One && nodes[0] < 0.0 {
            return Err(Error::InvalidInput("radial grid nodes must be non-negative"));
        }
        if values.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::InvalidInput("grid values must be finite"));
        }
        Ok(Self {
            dim,
            amplitude: Complex64::new(1.0, 0.0),
            profile: Profile::Grid { nodes, values },
        })
    }

    /// `αδ` in 1D, `4παδ` in 3D.
    pub fn delta(dim: Dim, alpha: Complex64) -> Result<Self> {
        if dim == Dim::Two {
            return Err(Error::DimensionUnsupported(2));
        }
        Ok(Self {
            dim,
            amplitude: alpha,
            profile: Profile::Delta,
        })
    }

    /// Unit-mass bump times `α` (1D) or `4πα` (3D): `α/ε` on `|x| < ε/2` in 1D,
    /// `3α/ε³` on `|x| < ε` in 3D.
    pub fn delta_eps(dim: Dim, alpha: Complex64, eps: f64) -> Result<Self> {
        if dim == Dim::Two {
            return Err(Error::DimensionUnsupported(2));
        }
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidInput("delta_eps width must be positive"));
        }
        Ok(Self {
            dim,
            amplitude: alpha,
            profile: Profile::DeltaEps { eps },
        })
    }

    pub fn dimension(&self) -> Dim {
        self.dim
    }

    pub fn amplitude(&self) -> Complex64 {
        self.amplitude
    }

    pub fn profile(&self) -> &Profile {
        &self.profile
    }

    pub fn kind(&self) -> Kind {
        match self.profile {
            Profile::Grid { .. } => Kind::Grid,
            Profile::Delta => Kind::Delta,
            Profile::DeltaEps { .. } => Kind::DeltaEps,
            _ => Kind::Analytic,
        }
    }

    /// Coupling `α` of delta and delta_eps potentials.
    pub fn alpha(&self) -> Option<Complex64> {
        matches!(self.profile, Profile::Delta | Profile::DeltaEps { .. }).then_some(self.amplitude)
    }

    pub fn eps(&self) -> Option<f64> {
        match self.profile {
            Profile::DeltaEps { eps } => Some(eps),
            _ => None,
        }
    }

    pub fn is_radial(&self) -> bool {
        match &self.profile {
            Profile::Gaussian { center, .. } => center.iter().all(|&c| c == 0.0),
            Profile::Grid { nodes, values } if self.dim == Dim::One => {
                // even grids only: mirrored nodes and values
                let n = nodes.len();
                (0..n).all(|i| nodes[i] == -nodes[n - 1 - i] && values[i] == values[n - 1 - i])
            }
            _ => true,
        }
    }

    /// Smallest `R` with `V = 0` outside `|x| < R`, `+∞` if there is none.
    pub fn support_radius(&self) -> f64 {
        match &self.profile {
            Profile::Zero | Profile::Delta => 0.0,
            Profile::Gaussian { .. } | Profile::InverseSquare => f64::INFINITY,
            Profile::Well { radius } => *radius,
            Profile::Grid { nodes, .. } => nodes[0].abs().max(nodes[nodes.len() - 1].abs()),
            Profile::DeltaEps { eps } => match self.dim {
                Dim::One => 0.5 * eps,
                _ => *eps,
            },
        }
    }

    /// Radius of the integration domain: the support radius when finite,
    /// otherwise where `|V|` falls below [`TAIL_LEVEL`] times its maximum.
    pub fn truncation_radius(&self) -> Result<f64> {
        match &self.profile {
            Profile::Gaussian { width, center } => {
                let offset = center.iter().map(|c| c * c).sum::<f64>().sqrt();
                Ok(offset + width * (-TAIL_LEVEL.ln()).sqrt())
            }
            Profile::InverseSquare => Err(Error::UnboundedSupportWithoutTail),
            _ => Ok(self.support_radius()),
        }
    }

    /// Radii (positions in 1D) where the profile is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.profile {
            Profile::Well { .. } | Profile::DeltaEps { .. } => alloc::vec![self.support_radius()],
            Profile::Grid { nodes, .. } => nodes.clone(),
            _ => Vec::new(),
        }
    }

    /// Value at `x ∈ ℝ^d` (`x.len()` must equal the dimension). Delta
    /// potentials have no pointwise value and evaluate to zero.
    pub fn evaluate(&self, x: &[f64]) -> Complex64 {
        debug_assert_eq!(x.len(), self.dim.as_usize());
        match &self.profile {
            Profile::Gaussian { width, center } => {
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                self.amplitude * (-d2 / (width * width)).exp()
            }
            Profile::Grid { .. } if self.dim == Dim::One => self.interpolate(x[0]),
            _ => self.radial_value(x.iter().map(|a| a * a).sum::<f64>().sqrt()),
        }
    }

    /// Value at distance `r` from the origin for radial profiles.
    pub fn radial_value(&self, r: f64) -> Complex64 {
        let zero = Complex64::new(0.0, 0.0);
        match &self.profile {
            Profile::Zero | Profile::Delta => zero,
            Profile::Gaussian { width, center } => {
                let mut x = [0.0; 3];
                x[0] = r;
                let d2: f64 = x.iter().zip(center).map(|(a, c)| (a - c) * (a - c)).sum();
                self.amplitude * (-d2 / (width * width)).exp()
            }
            Profile::Well { radius } => {
                if r.abs() < *radius {
                    self.amplitude
                } else {
                    zero
                }
            }
            Profile::InverseSquare => {
                if r == 0.0 {
                    zero
                } else {
                    self.amplitude / (r * r)
                }
            }
            Profile::Grid { .. } => self.interpolate(r),
            Profile::DeltaEps { eps } => {
                let (half, height) = match self.dim {
                    Dim::One => (0.5 * eps, 1.0 / eps),
                    _ => (*eps, 3.0 / (eps * eps * eps)),
                };
                if r.abs() < half {
                    self.amplitude * height
                } else {
                    zero
                }
            }
        }
    }

    fn interpolate(&self, x: f64) -> Complex64 {
        let Profile::Grid { nodes, values } = &self.profile else {
            return Complex64::new(0.0, 0.0);
        };
        let n = nodes.len();
        if x < nodes[0] || x > nodes[n - 1] {
            return Complex64::new(0.0, 0.0);
        }
        let j = nodes.partition_point(|&p| p <= x).clamp(1, n - 1);
        let t = (x - nodes[j - 1]) / (nodes[j] - nodes[j - 1]);
        self.amplitude * (values[j - 1] * (1.0 - t) + values[j] * t)
    }

    /// `c V`.
    pub fn scaled(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.amplitude = self.amplitude * c;
        out
    }

    /// `conj(V)`.
    pub fn conj(&self) -> Self {
        let mut out = self.clone();
        out.amplitude = self.amplitude.conj();
        if let Profile::Grid { values, .. } = &mut out.profile {
            values.iter_mut().for_each(|v| *v = v.conj());
        }
        out
    }

    /// `V(x / s)` for analytic and grid profiles.
    pub fn dilated(&self, s: f64) -> Result<Self> {
        if !(s > 0.0) {
            return Err(Error::InvalidInput("dilation factor must be positive"));
        }
        let mut out = self.clone();
        out.profile = match &self.profile {
            Profile::Gaussian { width, center } => Profile::Gaussian {
                width: width * s,
                center: center.map(|c| c * s),
            },
            Profile::Well { radius } => Profile::Well { radius: radius * s },
            Profile::Grid { nodes, values } => Profile::Grid {
                nodes: nodes.iter().map(|x| x * s).collect(),
                values: values.clone(),
            },
            Profile::Zero | Profile::InverseSquare => self.profile.clone(),
            Profile::Delta | Profile::DeltaEps { .. } => {
                return Err(Error::InvalidInput("delta potentials do not dilate pointwise"))
            }
        };
        Ok(out)
    }

    /// Nyström grid matched to the potential: `[-L, L]` in 1D, `(0, L)` for
    /// radial problems, with breakpoints at discontinuities and at least four
    /// panels across every segment.
    pub fn quadrature(&self, panels: usize, order: usize) -> Result<Quadrature> {
        let domain = if self.dim == Dim::One {
            Domain::Line
        } else {
            Domain::HalfLine
        };
        if matches!(self.profile, Profile::Zero | Profile::Delta) {
            return Ok(Quadrature::empty(domain));
        }
        let lim = self.truncation_radius()?;
        let mut breaks = Vec::new();
        match (&self.profile, domain) {
            (Profile::Grid { nodes, .. }, _) => {
                if domain == Domain::HalfLine {
                    breaks.push(0.0);
                }
                breaks.extend_from_slice(nodes);
            }
            (Profile::Gaussian { width, center }, Domain::Line) => {
                let half = width * (-TAIL_LEVEL.ln()).sqrt();
                breaks.push(center[0] - half);
                breaks.push(center[0] + half);
            }
            (_, Domain::Line) => {
                breaks.push(-lim);
                breaks.extend(self.breakpoints().iter().filter(|&&b| b < lim).flat_map(|&b| [-b, b]));
                breaks.push(lim);
            }
            (_, Domain::HalfLine) => {
                breaks.push(0.0);
                breaks.extend(self.breakpoints().into_iter().filter(|&b| b < lim));
                breaks.push(lim);
            }
        }
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        // interpolated grids are smooth between nodes, one panel per cell suffices
        let min_per_segment = if matches!(self.profile, Profile::Grid { .. }) { 1 } else { 4 };
        Quadrature::from_breakpoints(&breaks, panels, min_per_segment, order, domain)
    }
}

fn require_dim(v: &Potential, dim: Dim) -> Result<()> {
    if v.dim != dim {
        return Err(Error::WrongDimension {
            expected: dim.as_usize(),
            got: v.dim.as_usize(),
        });
    }
    Ok(())
}

fn check_covers(v: &Potential, quad: &Quadrature) -> Result<()> {
    let lim = v.truncation_radius()?;
    if quad.truncation() < lim * (1.0 - 1e-12) {
        return Err(Error::UnboundedSupportWithoutTail);
    }
    Ok(())
}

/// Angular rule on the unit sphere: Gauss–Legendre in `cos θ`, trapezoid in `φ`.
fn sphere_points(n_theta: usize, n_phi: usize) -> Vec<([f64; 3], f64)> {
    let rule = Rule::new(n_theta);
    let mut out = Vec::with_capacity(n_theta * n_phi);
    let dphi = 2.0 * PI / n_phi as f64;
    for (ct, wt) in rule.nodes().iter().zip(rule.weights()) {
        let st = (1.0 - ct * ct).sqrt();
        for j in 0..n_phi {
            let phi = dphi * j as f64;
            out.push(([st * phi.cos(), st * phi.sin(), *ct], wt * dphi));
        }
    }
    out
}

const SPHERE_THETA: usize = 24;
const SPHERE_PHI: usize = 48;

/// `∫ f(|V(x)|, |x|) dx` over the domain of `quad`.
pub(crate) fn integrate_abs<F: Fn(f64, f64) -> f64>(v: &Potential, quad: &Quadrature, f: F) -> f64 {
    let nodes = quad.nodes();
    let weights = quad.weights();
    match v.dim {
        Dim::One => nodes.iter().zip(weights).map(|(&x, w)| w * f(v.evaluate(&[x]).norm(), x.abs())).sum(),
        Dim::Two => nodes
            .iter()
            .zip(weights)
            .map(|(&r, w)| 2.0 * PI * r * w * f(v.radial_value(r).norm(), r))
            .sum(),
        Dim::Three if v.is_radial() => nodes
            .iter()
            .zip(weights)
            .map(|(&r, w)| 4.0 * PI * r * r * w * f(v.radial_value(r).norm(), r))
            .sum(),
        Dim::Three => {
            let sphere = sphere_points(SPHERE_THETA, SPHERE_PHI);
            nodes
                .iter()
                .zip(weights)
                .map(|(&r, w)| {
                    let shell: f64 = sphere
                        .iter()
                        .map(|(u, wu)| wu * f(v.evaluate(&[r * u[0], r * u[1], r * u[2]]).norm(), r))
                        .sum();
                    r * r * w * shell
                })
                .sum()
        }
    }
}

/// `‖V‖_{L¹}`. For delta potentials this is `|α|` (1D) or `4π|α|` (3D).
pub fn l1_norm(v: &Potential, quad: &Quadrature) -> Result<f64> {
    match v.profile {
        Profile::Zero => return Ok(0.0),
        Profile::Delta => return Ok(delta_mass(v)),
        _ => {}
    }
    check_covers(v, quad)?;
    if v.dim == Dim::Two && !v.is_radial() {
        return Err(Error::NotRadial);
    }
    Ok(integrate_abs(v, quad, |a, _| a))
}

fn delta_mass(v: &Potential) -> f64 {
    match v.dim {
        Dim::One => v.amplitude.norm(),
        _ => 4.0 * PI * v.amplitude.norm(),
    }
}

/// `‖V‖_{L^{3/2}} = (∫|V|^{3/2})^{2/3}` in 3D.
pub fn lp32_norm(v: &Potential, quad: &Quadrature) -> Result<f64> {
    require_dim(v, Dim::Three)?;
    match v.profile {
        Profile::Zero => return Ok(0.0),
        Profile::Delta => return Err(Error::InvalidInput("a delta potential has no L^{3/2} norm")),
        _ => {}
    }
    check_covers(v, quad)?;
    Ok(integrate_abs(v, quad, |a, _| a * a.sqrt()).powf(2.0 / 3.0))
}

/// A Rollnik norm with its Monte Carlo standard error (zero for quadrature).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollnikEstimate {
    pub value: f64,
    pub stderr: f64,
}

/// Rollnik norm `(∬ |V(x)||V(y)| / |x-y|² dx dy)^{1/2}` in 3D: radial
/// quadrature for radial potentials, Monte Carlo otherwise.
pub fn rollnik_norm(v: &Potential, samples: usize, seed: u64) -> Result<RollnikEstimate> {
    rollnik_norm_with(&Sequential, v, samples, seed)
}

pub fn rollnik_norm_with<E: Executor>(exec: &E, v: &Potential, samples: usize, seed: u64) -> Result<RollnikEstimate> {
    require_dim(v, Dim::Three)?;
    if v.is_radial() {
        rollnik_radial(v, 8)
    } else {
        rollnik_monte_carlo_with(exec, v, samples, seed)
    }
}

/// Radial path: the angular integral is done in closed form,
/// `∫_{S²} dΩ_y / |x-y|² = (2π / r r') ln((r + r') / |r - r'|)`, leaving a
/// two-dimensional integral whose logarithmic diagonal singularity is
/// resolved by panels graded towards `r' = r`.
pub fn rollnik_radial(v: &Potential, panels: usize) -> Result<RollnikEstimate> {
    require_dim(v, Dim::Three)?;
    match v.profile {
        Profile::Zero => return Ok(RollnikEstimate { value: 0.0, stderr: 0.0 }),
        Profile::Delta => return Err(Error::InvalidInput("a delta potential has no Rollnik norm")),
        _ => {}
    }
    if !v.is_radial() {
        return Err(Error::NotRadial);
    }
    let lim = v.truncation_radius()?;
    let panels = panels.max(1);
    let rule = Rule::new(DEFAULT_ORDER);
    let mut cuts = alloc::vec![0.0];
    cuts.extend(v.breakpoints().into_iter().filter(|&b| b < lim));
    cuts.push(lim);
    let abs_v = |r: f64| v.radial_value(r).norm();
    let inner = |r: f64| {
        let vr = abs_v(r);
        if vr == 0.0 {
            return 0.0;
        }
        // graded panels can round a node onto the diagonal itself
        let kernel = |s: f64| if s == r { 0.0 } else { abs_v(s) * s * ((r + s) / (r - s).abs()).ln() };
        let total: f64 = cuts
            .windows(2)
            .map(|seg| {
                let (lo, hi) = (seg[0], seg[1]);
                if r > lo && r < hi {
                    resolved(&rule, lo, r, panels, &kernel) + resolved(&rule, r, hi, panels, &kernel)
                } else {
                    resolved(&rule, lo, hi, panels, &kernel)
                }
            })
            .sum();
        vr * r * total
    };
    // the inner integral has (r - b) ln|r - b| behaviour at breakpoints, so the
    // outer rule is graded too
    let total: f64 = cuts.windows(2).map(|seg| resolved(&rule, seg[0], seg[1], panels, &inner)).sum();
    let sq = 8.0 * PI * PI * total;
    Ok(RollnikEstimate {
        value: sq.max(0.0).sqrt(),
        stderr: 0.0,
    })
}

const GRADED_PANELS: usize = 30;
const GRADED_RATIO: f64 = 0.5;

/// `∫_a^b f` on `panels` uniform panels whose two end panels are graded
/// towards `a` and `b`.
fn resolved<F: Fn(f64) -> f64>(rule: &Rule, a: f64, b: f64, panels: usize, f: &F) -> f64 {
    if !(b > a) {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    if panels == 1 {
        let mid = a + 0.5 * h;
        return rule.graded(a, mid, GRADED_PANELS, GRADED_RATIO, f)
            + rule.graded(0.0, b - mid, GRADED_PANELS, GRADED_RATIO, |t| f(b - t));
    }
    let mut sum = rule.graded(a, a + h, GRADED_PANELS, GRADED_RATIO, f);
    sum += rule.graded(0.0, h, GRADED_PANELS, GRADED_RATIO, |t| f(b - t));
    for p in 1..panels - 1 {
        sum += rule.panel(a + h * p as f64, a + h * (p + 1) as f64, f);
    }
    sum
}

const MC_BLOCK: usize = 4096;

/// Importance-sampled Monte Carlo: `x` uniform in the ball `B_L` and the
/// displacement `s = y - x` drawn with density `∝ 1/|s|²` on `B_{2L}`, which
/// absorbs the singular weight and leaves a bounded estimator.
pub fn rollnik_monte_carlo(v: &Potential, samples: usize, seed: u64) -> Result<RollnikEstimate> {
    rollnik_monte_carlo_with(&Sequential, v, samples, seed)
}

pub fn rollnik_monte_carlo_with<E: Executor>(
    exec: &E,
    v: &Potential,
    samples: usize,
    seed: u64,
) -> Result<RollnikEstimate> {
    require_dim(v, Dim::Three)?;
    match v.profile {
        Profile::Zero => return Ok(RollnikEstimate { value: 0.0, stderr: 0.0 }),
        Profile::Delta => return Err(Error::InvalidInput("a delta potential has no Rollnik norm")),
        _ => {}
    }
    if samples < 2 {
        return Err(Error::InvalidInput("Monte Carlo needs at least two samples"));
    }
    let lim = v.truncation_radius()?;
    let ball = 4.0 / 3.0 * PI * lim * lim * lim;
    let scale = ball * 8.0 * PI * lim;
    let blocks = samples.div_ceil(MC_BLOCK);
    let sums = exec.map(blocks, |b| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let count = MC_BLOCK.min(samples - b * MC_BLOCK);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let x = uniform_in_ball(&mut rng, lim);
            let dir = unit_vector(&mut rng);
            let len = 2.0 * lim * rng.gen::<f64>();
            let y = [x[0] + len * dir[0], x[1] + len * dir[1], x[2] + len * dir[2]];
            let z = scale * v.evaluate(&x).norm() * v.evaluate(&y).norm();
            s1 += z;
            s2 += z * z;
        }
        (s1, s2)
    });
    let (s1, s2) = sums.iter().fold((0.0, 0.0), |acc, s| (acc.0 + s.0, acc.1 + s.1));
    let n = samples as f64;
    let mean = s1 / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    let se_sq = (var / n).sqrt();
    let value = mean.sqrt();
    let stderr = if value > 0.0 { se_sq / (2.0 * value) } else { 0.0 };
    Ok(RollnikEstimate { value, stderr })
}

fn unit_vector<R: Rng>(rng: &mut R) -> [f64; 3] {
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = 2.0 * PI * rng.gen::<f64>();
    let s = (1.0 - z * z).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

fn uniform_in_ball<R: Rng>(rng: &mut R, radius: f64) -> [f64; 3] {
    let u = unit_vector(rng);
    let r = radius * rng.gen::<f64>().cbrt();
    [r * u[0], r * u[1], r * u[2]]
}

/// Hardy norm `ess sup |x|² |V(x)|` in 3D, sampled on a log-spaced radial
/// grid (times a spherical point set for non-radial potentials) and zoomed in
/// around the maximiser.
pub fn hardy_norm(v: &Potential, sample_grid: usize) -> Result<f64> {
    require_dim(v, Dim::Three)?;
    match v.profile {
        Profile::Zero => return Ok(0.0),
        Profile::Delta => return Err(Error::InvalidInput("a delta potential has no Hardy norm")),
        Profile::InverseSquare => return Ok(v.amplitude.norm()),
        _ => {}
    }
    let n = sample_grid.max(16);
    let r_max = v.truncation_radius()?;
    let dirs: Vec<[f64; 3]> = if v.is_radial() {
        alloc::vec![[1.0, 0.0, 0.0]]
    } else {
        fibonacci_sphere(n)
    };
    let weight = |r: f64, u: &[f64; 3]| r * r * v.evaluate(&[r * u[0], r * u[1], r * u[2]]).norm();
    let r_min = r_max * 1e-8;
    let ratio = (r_max / r_min).powf(1.0 / (n - 1) as f64);
    let radii: Vec<f64> = (0..n).map(|i| r_min * ratio.powi(i as i32)).collect();
    let mut best = (0.0, r_max, 0usize);
    for (di, u) in dirs.iter().enumerate() {
        for &r in &radii {
            let w = weight(r, u);
            if w > best.0 {
                best = (w, r, di);
            }
        }
    }
    if best.0 == 0.0 {
        return Ok(0.0);
    }
    // zoom passes in r along the best direction
    let u = dirs[best.2];
    let (mut lo, mut hi) = (best.1 / ratio, (best.1 * ratio).min(r_max));
    for _ in 0..8 {
        let step = (hi - lo) / (n - 1) as f64;
        let mut local = (best.0, best.1);
        for i in 0..n {
            let r = lo + step * i as f64;
            let w = weight(r, &u);
            if w > local.0 {
                local = (w, r);
            }
        }
        best.0 = local.0;
        best.1 = local.1;
        lo = (local.1 - step).max(r_min);
        hi = (local.1 + step).min(r_max);
    }
    Ok(best.0)
}

fn fibonacci_sphere(n: usize) -> Vec<[f64; 3]> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - 2.0 * (i as f64 + 0.5) / n as f64;
            let s = (1.0 - z * z).sqrt();
            let phi = golden * i as f64;
            [s * phi.cos(), s * phi.sin(), z]
        })
        .collect()
}

/// Bracket on `sup_ψ ∫|V||ψ|² / ∫|∇ψ|²` in 3D. The lower end maximises the
/// quotient over trial functions `e^{-t|x|}`; the upper end is `4 ‖V‖_H` by
/// the Hardy inequality.
pub fn rayleigh_sup_bracket(v: &Potential, trial_family_size: usize) -> Result<(f64, f64)> {
    require_dim(v, Dim::Three)?;
    let upper = 4.0 * hardy_norm(v, 256)?;
    if upper == 0.0 {
        return Ok((0.0, 0.0));
    }
    let ell = v.truncation_radius().unwrap_or(1.0).max(1e-12);
    let n = trial_family_size.max(2);
    let (t_lo, t_hi) = (1e-3 / ell, 1e3 / ell);
    let ratio = (t_hi / t_lo).powf(1.0 / (n - 1) as f64);
    let mut lower = 0.0f64;
    for i in 0..n {
        let t = t_lo * ratio.powi(i as i32);
        lower = lower.max(trial_quotient(v, t)?);
    }
    Ok((lower, upper))
}

/// `∫|V| e^{-2t|x|} dx / ∫|∇e^{-t|x|}|² dx`; the denominator is `π / t`.
fn trial_quotient(v: &Potential, t: f64) -> Result<f64> {
    let reach = 25.0 / t;
    let lim = match v.truncation_radius() {
        Ok(l) => l.min(reach),
        Err(_) => reach,
    };
    let mut breaks = alloc::vec![0.0];
    breaks.extend(v.breakpoints().into_iter().filter(|&b| b < lim));
    breaks.push(lim);
    let quad = Quadrature::from_breakpoints(&breaks, 40, 2, DEFAULT_ORDER, Domain::HalfLine)?;
    let num = integrate_abs(v, &quad, |a, r| a * (-2.0 * t * r).exp());
    Ok(num * t / PI)
}

/// Every norm applicable to `v`; entries that do not apply are `None`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormReport {
    pub l1: f64,
    pub rollnik: Option<RollnikEstimate>,
    pub hardy: Option<f64>,
    pub l32: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NormOptions {
    pub panels: usize,
    pub order: usize,
    pub samples: usize,
    pub seed: u64,
    pub hardy_grid: usize,
}

impl Default for NormOptions {
    fn default() -> Self {
        Self {
            panels: 48,
            order: DEFAULT_ORDER,
            samples: 200_000,
            seed: 0,
            hardy_grid: 256,
        }
    }
}

pub fn norm_report(v: &Potential, opts: &NormOptions) -> Result<NormReport> {
    norm_report_with(&Sequential, v, opts)
}

pub fn norm_report_with<E: Executor>(exec: &E, v: &Potential, opts: &NormOptions) -> Result<NormReport> {
    let quad = v.quadrature(opts.panels, opts.order)?;
    let l1 = l1_norm(v, &quad)?;
    if v.dim != Dim::Three || v.kind() == Kind::Delta {
        return Ok(NormReport {
            l1,
            rollnik: None,
            hardy: None,
            l32: None,
        });
    }
    Ok(NormReport {
        l1,
        rollnik: Some(rollnik_norm_with(exec, v, opts.samples, opts.seed)?),
        hardy: Some(hardy_norm(v, opts.hardy_grid)?),
        l32: Some(lp32_norm(v, &quad)?),
    })
}
