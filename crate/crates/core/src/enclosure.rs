//! Origin-centred disks that contain the point spectrum of `Δ² + V`.

use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use num_traits::Float;

use crate::potential::{Kind, NormReport, Potential};
use crate::{Dim, Error, Result};

/// `C_1 = 1/4`.
pub const C1_DISK: f64 = 0.25;
/// Conjectured `C_2 = 1/64`; never used for hard verification.
pub const C2_CONJECTURED: f64 = 1.0 / 64.0;

/// `C_3 = ¼ (4π)^{-4}`.
pub fn c3_disk() -> f64 {
    0.25 / (4.0 * PI).powi(4)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DiskSource {
    L1,
    Rollnik,
    L32,
    /// `(lower bracket)²`: inside the true Rayleigh disk, informational only.
    RayleighLower,
    /// `(upper bracket)²`: contains the true Rayleigh disk.
    RayleighUpper,
    Hardy,
}

impl DiskSource {
    pub fn tag(self) -> &'static str {
        match self {
            DiskSource::L1 => "l1-enclosure",
            DiskSource::Rollnik => "rollnik-enclosure",
            DiskSource::L32 => "l32-enclosure",
            DiskSource::RayleighLower => "rayleigh-lower",
            DiskSource::RayleighUpper => "rayleigh-upper",
            DiskSource::Hardy => "hardy-enclosure",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnclosureDisk {
    pub radius: f64,
    pub source: DiskSource,
    pub conjectural: bool,
}

impl EnclosureDisk {
    /// Disks whose violation is a hard failure.
    pub fn is_rigorous(&self) -> bool {
        !self.conjectural && self.source != DiskSource::RayleighLower
    }

    /// `radius - |λ|`; closed disks, so zero is inside.
    pub fn margin(&self, lambda: Complex64) -> f64 {
        self.radius - lambda.norm()
    }

    pub fn contains(&self, lambda: Complex64) -> bool {
        self.margin(lambda) >= 0.0
    }
}

fn check_norm(x: f64) -> Result<()> {
    if x < 0.0 || x.is_nan() {
        return Err(Error::NegativeInput);
    }
    Ok(())
}

fn disk(radius: f64, source: DiskSource) -> EnclosureDisk {
    EnclosureDisk {
        radius,
        source,
        conjectural: false,
    }
}

/// `C_d ‖V‖₁^{4/(4-d)}`. In 2D the constant defaults to 1/64 and the disk is
/// always marked conjectural.
pub fn l1_disk(d: Dim, l1: f64, c2: Option<f64>) -> Result<EnclosureDisk> {
    check_norm(l1)?;
    let c = match d {
        Dim::One => C1_DISK,
        Dim::Two => c2.unwrap_or(C2_CONJECTURED),
        Dim::Three => c3_disk(),
    };
    Ok(EnclosureDisk {
        radius: c * l1.powf(d.coupling_exponent()),
        source: DiskSource::L1,
        conjectural: d == Dim::Two,
    })
}

/// `½ ‖V‖_R² / (4π)²`.
pub fn rollnik_disk(norm: f64) -> Result<EnclosureDisk> {
    check_norm(norm)?;
    Ok(disk(0.5 * norm * norm / (16.0 * PI * PI), DiskSource::Rollnik))
}

/// `⅛ (4π)^{-2/3} ‖V‖²_{L^{3/2}}`.
pub fn l32_disk(norm: f64) -> Result<EnclosureDisk> {
    check_norm(norm)?;
    Ok(disk(0.125 * (4.0 * PI).powf(-2.0 / 3.0) * norm * norm, DiskSource::L32))
}

/// `16 ‖V‖_H²`.
pub fn hardy_disk(norm: f64) -> Result<EnclosureDisk> {
    check_norm(norm)?;
    Ok(disk(16.0 * norm * norm, DiskSource::Hardy))
}

/// Squares of a bracket on the Rayleigh supremum.
pub fn rayleigh_disk(bracket: (f64, f64)) -> Result<(EnclosureDisk, EnclosureDisk)> {
    check_norm(bracket.0)?;
    check_norm(bracket.1)?;
    if bracket.0 > bracket.1 {
        return Err(Error::InvalidInput("rayleigh bracket must be ordered"));
    }
    Ok((
        disk(bracket.0 * bracket.0, DiskSource::RayleighLower),
        disk(bracket.1 * bracket.1, DiskSource::RayleighUpper),
    ))
}

/// Every disk applicable to `v`. Monte Carlo Rollnik norms are inflated by
/// three standard errors before use.
pub fn disks_for(
    v: &Potential,
    norms: &NormReport,
    rayleigh: Option<(f64, f64)>,
    c2: Option<f64>,
) -> Result<Vec<EnclosureDisk>> {
    let mut out = alloc::vec![l1_disk(v.dimension(), norms.l1, c2)?];
    if v.dimension() != Dim::Three || v.kind() == Kind::Delta {
        return Ok(out);
    }
    if let Some(r) = norms.rollnik {
        out.push(rollnik_disk(r.value + 3.0 * r.stderr)?);
    }
    if let Some(n) = norms.l32.filter(|n| n.is_finite()) {
        out.push(l32_disk(n)?);
    }
    if let Some(h) = norms.hardy.filter(|h| h.is_finite()) {
        out.push(hardy_disk(h)?);
    }
    if let Some(b) = rayleigh {
        let (lo, up) = rayleigh_disk(b)?;
        out.push(lo);
        out.push(up);
    }
    Ok(out)
}

/// Intersection radius of the rigorous disks.
pub fn tightest_radius(disks: &[EnclosureDisk]) -> Option<f64> {
    disks.iter().filter(|d| d.is_rigorous()).map(|d| d.radius).reduce(f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub candidate: usize,
    pub lambda: Complex64,
    pub source: DiskSource,
    pub rigorous: bool,
    pub inside: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub entries: Vec<Membership>,
    /// Entries of rigorous disks with margin below `-tol`.
    pub violations: Vec<Membership>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn verify(candidates: &[Complex64], disks: &[EnclosureDisk], tol: f64) -> VerifyReport {
    let mut entries = Vec::new();
    for (i, &lambda) in candidates.iter().enumerate() {
        for d in disks {
            let margin = d.margin(lambda);
            entries.push(Membership {
                candidate: i,
                lambda,
                source: d.source,
                rigorous: d.is_rigorous(),
                inside: margin >= 0.0,
                margin,
            });
        }
    }
    let violations = entries.iter().filter(|m| m.rigorous && m.margin < -tol).copied().collect();
    VerifyReport { entries, violations }
}
