use serde::Serialize;
use serde_json::Value;

use crate::config::RunConfig;
use crate::error::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Every provenance tag a record or disk may carry, with the statement it
/// stands for.
pub const REGISTRY: &[(&str, &str)] = &[
    ("potential-norms", "L1, Rollnik, L3/2 and Hardy norms of the potential"),
    ("enclosure-disks", "origin-centred disks containing the point spectrum"),
    ("l1-enclosure", "|λ| ≤ C_d ‖V‖₁^{4/(4-d)}"),
    ("rollnik-enclosure", "|λ| ≤ ½ ‖V‖_R² / (4π)² in three dimensions"),
    ("l32-enclosure", "|λ| ≤ ⅛ (4π)^{-2/3} ‖V‖²_{3/2} in three dimensions"),
    ("hardy-enclosure", "|λ| ≤ 16 ‖V‖_H² in three dimensions"),
    ("rayleigh-upper", "|λ| bounded by the square of the Rayleigh supremum, upper bracket"),
    ("rayleigh-lower", "square of a lower bracket on the Rayleigh supremum, informational"),
    ("green-pointwise-bound", "|G̃_λ(r)| ≤ c_d / |k|^{2-d/2}"),
    ("green-constant-d2", "existence of the two-dimensional pointwise constant"),
    ("hs-bound", "Hilbert-Schmidt bound on the Birman-Schwinger operator"),
    ("birman-schwinger-principle", "eigenvalues are zeros of det(I + K_λ)"),
    ("weak-coupling-asymptotics", "λ(β) ~ -c_d (β‖V‖₁)^{4/(4-d)} as β → 0"),
    ("delta-sharpness", "point interactions attain the L1 enclosure radius"),
    ("delta-eps-limit", "regularised point interactions converge to the delta model"),
    ("trigonometric-inequalities", "exponential-trigonometric inequalities behind the sharp constants"),
    ("enclosure-consistency", "located eigenvalues lie inside every rigorous disk"),
];

pub fn registered(tag: &str) -> bool {
    REGISTRY.iter().any(|(t, _)| *t == tag)
}

#[derive(Debug, Serialize)]
pub struct ResultRecord<'a> {
    pub command: &'a str,
    pub inputs: &'a RunConfig,
    pub outputs: Value,
    pub provenance: &'static str,
    pub version: &'static str,
    pub wall_time_s: f64,
}

#[derive(Debug, Serialize)]
pub struct ErrorRecord<'a> {
    pub command: &'a str,
    pub reason: &'static str,
    pub message: String,
    pub exit_code: i32,
    pub version: &'static str,
}

impl<'a> ErrorRecord<'a> {
    pub fn new(command: &'a str, err: &CliError) -> Self {
        Self {
            command,
            reason: err.reason(),
            message: err.to_string(),
            exit_code: err.exit_code(),
            version: VERSION,
        }
    }
}

/// Rows emitted to the optional CSV sink.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = String>>(&mut self, row: I) {
        self.rows.push(row.into_iter().collect());
    }

    pub fn write<W: std::io::Write>(&self, w: W) -> Result<(), CliError> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for r in &self.rows {
            out.write_record(r)?;
        }
        out.flush()?;
        Ok(())
    }
}
