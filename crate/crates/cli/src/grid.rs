//! Tabulated potentials: header `x,re_v,im_v` on the line, `r,re_v,im_v` for
//! radial profiles.

use std::path::Path;

use bispec_core::{Complex64, Dim};
use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Deserialize)]
struct Row {
    #[serde(alias = "x", alias = "r")]
    position: f64,
    re_v: f64,
    im_v: f64,
}

pub fn read_grid(path: &Path, dim: Dim) -> Result<(Vec<f64>, Vec<Complex64>), CliError> {
    let file = std::fs::File::open(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse_grid(file, dim).map_err(|e| match e {
        CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
        other => other,
    })
}

pub fn parse_grid<R: std::io::Read>(reader: R, dim: Dim) -> Result<(Vec<f64>, Vec<Complex64>), CliError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let want = if dim == Dim::One { "x" } else { "r" };
    let headers = rdr.headers().map_err(|e| CliError::Config(e.to_string()))?.clone();
    if headers.iter().collect::<Vec<_>>() != [want, "re_v", "im_v"] {
        return Err(CliError::Config(format!("grid header must be `{want},re_v,im_v`")));
    }
    let mut nodes = Vec::new();
    let mut values = Vec::new();
    for row in rdr.deserialize::<Row>() {
        let row = row.map_err(|e| CliError::Config(e.to_string()))?;
        nodes.push(row.position);
        values.push(Complex64::new(row.re_v, row.im_v));
    }
    Ok((nodes, values))
}
