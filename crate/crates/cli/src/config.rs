//! Run configuration: JSON schema, flag overrides and conversion to core types.

use std::path::{Path, PathBuf};

use bispec_core::locator::ScanRegion;
use bispec_core::potential::Potential;
use bispec_core::{Complex64, Dim};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::grid::read_grid;

/// Complex numbers travel as `[re, im]`.
pub type Pair = [f64; 2];

pub fn complex(p: Pair) -> Complex64 {
    Complex64::new(p[0], p[1])
}

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero,
    Gaussian {
        amplitude: Pair,
        width: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        center: Option<[f64; 3]>,
    },
    Well {
        amplitude: Pair,
        radius: f64,
    },
    InverseSquare {
        amplitude: Pair,
    },
    Delta {
        alpha: Pair,
    },
    DeltaEps {
        alpha: Pair,
        eps: f64,
    },
    /// Two-column CSV, see [`read_grid`].
    Grid {
        path: PathBuf,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSpec {
    pub panels: usize,
    pub order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { panels: 12, order: 10 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionSpec {
    pub re: [f64; 2],
    pub im: [f64; 2],
    pub grid: [usize; 2],
    #[serde(default = "default_eps_shift")]
    pub eps_shift: f64,
}

fn default_eps_shift() -> f64 {
    1e-9
}

impl RegionSpec {
    pub fn to_region(&self) -> Result<ScanRegion, CliError> {
        Ok(ScanRegion::new(
            (self.re[0], self.re[1]),
            (self.im[0], self.im[1]),
            (self.grid[0], self.grid[1]),
            self.eps_shift,
        )?)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<PotentialSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quadrature: Option<QuadratureSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<RegionSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    /// Monte Carlo samples for the Rollnik norm.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Known `‖V‖₁`, used by `enclosure` and `verify` without a potential.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l1: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Pair>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub betas: Option<Vec<f64>>,
    /// `[arg points, radius points, refinement levels]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c2_grid: Option<[usize; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub which: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampler: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmax: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub candidates: Option<Vec<Pair>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Fields set in `other` win.
    pub fn merge(self, other: RunConfig) -> RunConfig {
        macro_rules! pick {
            ($($f:ident),*) => { RunConfig { $($f: other.$f.or(self.$f)),* } };
        }
        pick!(
            dimension, potential, quadrature, region, seed, samples, l1, c2, lambda, r, alpha, eps, betas, c2_grid,
            which, sampler, n, pmax, candidates, tol, output, csv
        )
    }

    pub fn dim(&self) -> Result<Dim, CliError> {
        let d = self.dimension.ok_or_else(|| CliError::Config("missing field `dimension`".into()))?;
        Dim::from_usize(d).map_err(|_| CliError::Config(format!("dimension must be 1, 2 or 3, got {d}")))
    }

    pub fn quad(&self) -> QuadratureSpec {
        self.quadrature.unwrap_or_default()
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn require<'a, T>(&self, field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field.as_ref().ok_or_else(|| CliError::Config(format!("missing field `{name}`")))
    }

    pub fn build_potential(&self) -> Result<Potential, CliError> {
        let d = self.dim()?;
        let spec = self.require(&self.potential, "potential")?;
        Ok(match spec {
            PotentialSpec::Zero => Potential::zero(d),
            PotentialSpec::Gaussian { amplitude, width, center } => match center {
                Some(c) => Potential::shifted_gaussian(d, complex(*amplitude), *width, *c)?,
                None => Potential::gaussian(d, complex(*amplitude), *width)?,
            },
            PotentialSpec::Well { amplitude, radius } => Potential::well(d, complex(*amplitude), *radius)?,
            PotentialSpec::InverseSquare { amplitude } => Potential::inverse_square(d, complex(*amplitude)),
            PotentialSpec::Delta { alpha } => Potential::delta(d, complex(*alpha))?,
            PotentialSpec::DeltaEps { alpha, eps } => Potential::delta_eps(d, complex(*alpha), *eps)?,
            PotentialSpec::Grid { path } => {
                let (nodes, values) = read_grid(path, d)?;
                Potential::grid(d, nodes, values)?
            }
        })
    }
}
