//! Command-line driver: JSON configuration in, NDJSON records (and optional
//! CSV tables) out.

pub mod commands;
pub mod config;
pub mod error;
pub mod exec;
pub mod grid;
pub mod record;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser};

pub use commands::Command;
use config::{Pair, PotentialSpec, QuadratureSpec, RegionSpec, RunConfig};
pub use error::CliError;
use exec::Rayon;
use record::{ErrorRecord, ResultRecord};

#[derive(Debug, Parser)]
#[command(name = "bispec", version, about = "Spectral enclosures for biharmonic operators with complex potentials")]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    s.split(',').map(|t| t.trim().parse::<f64>().map_err(|e| format!("`{t}`: {e}"))).collect()
}

fn parse_pair(s: &str) -> Result<Pair, String> {
    match parse_list(s)?.as_slice() {
        [re, im] => Ok([*re, *im]),
        _ => Err(format!("expected `re,im`, got `{s}`")),
    }
}

fn parse_usize_pair(s: &str) -> Result<[usize; 2], String> {
    let v: Vec<usize> = s.split(',').map(|t| t.trim().parse().map_err(|e| format!("`{t}`: {e}"))).collect::<Result<_, _>>()?;
    v.try_into().map_err(|_| format!("expected `nx,ny`, got `{s}`"))
}

fn parse_quad(s: &str) -> Result<[f64; 4], String> {
    parse_list(s)?.try_into().map_err(|_| format!("expected `re0,re1,im0,im1`, got `{s}`"))
}

fn parse_triple(s: &str) -> Result<[f64; 3], String> {
    parse_list(s)?.try_into().map_err(|_| format!("expected `x,y,z`, got `{s}`"))
}

/// Every flag overrides the corresponding config field.
#[derive(Debug, Default, Args)]
pub struct Flags {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// NDJSON destination (stdout when absent).
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// CSV destination for the command's table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long = "dim")]
    pub dimension: Option<usize>,
    /// zero, gaussian, well, inverse_square, delta, delta_eps or grid.
    #[arg(long)]
    pub potential: Option<String>,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub amplitude: Option<Pair>,
    #[arg(long)]
    pub width: Option<f64>,
    #[arg(long, value_parser = parse_triple, allow_hyphen_values = true)]
    pub center: Option<[f64; 3]>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub grid_file: Option<PathBuf>,
    #[arg(long)]
    pub panels: Option<usize>,
    #[arg(long)]
    pub order: Option<usize>,
    /// `re0,re1,im0,im1`.
    #[arg(long, value_parser = parse_quad, allow_hyphen_values = true)]
    pub region: Option<[f64; 4]>,
    #[arg(long, value_parser = parse_usize_pair)]
    pub grid: Option<[usize; 2]>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub l1: Option<f64>,
    #[arg(long)]
    pub c2: Option<f64>,
    /// `re,im`; repeatable.
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub lambda: Vec<Pair>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub r: Option<Vec<f64>>,
    #[arg(long, value_parser = parse_pair, allow_hyphen_values = true)]
    pub alpha: Option<Pair>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub eps: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub betas: Option<Vec<f64>>,
    #[arg(long)]
    pub which: Option<String>,
    #[arg(long)]
    pub sampler: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub pmax: Option<f64>,
    /// `re,im`; repeatable.
    #[arg(long = "candidate", value_parser = parse_pair, allow_hyphen_values = true)]
    pub candidates: Vec<Pair>,
    #[arg(long)]
    pub tol: Option<f64>,
}

impl Flags {
    fn potential_spec(&self) -> Result<Option<PotentialSpec>, CliError> {
        let Some(kind) = self.potential.as_deref() else {
            return Ok(None);
        };
        let need = |x: Option<f64>, name: &str| x.ok_or_else(|| CliError::Config(format!("--potential {kind} needs --{name}")));
        let amp = || self.amplitude.ok_or_else(|| CliError::Config(format!("--potential {kind} needs --amplitude")));
        let alpha = || self.alpha.ok_or_else(|| CliError::Config(format!("--potential {kind} needs --alpha")));
        Ok(Some(match kind {
            "zero" => PotentialSpec::Zero,
            "gaussian" => PotentialSpec::Gaussian {
                amplitude: amp()?,
                width: need(self.width, "width")?,
                center: self.center,
            },
            "well" => PotentialSpec::Well {
                amplitude: amp()?,
                radius: need(self.radius, "radius")?,
            },
            "inverse_square" => PotentialSpec::InverseSquare { amplitude: amp()? },
            "delta" => PotentialSpec::Delta { alpha: alpha()? },
            "delta_eps" => PotentialSpec::DeltaEps {
                alpha: alpha()?,
                eps: self.eps.as_ref().and_then(|e| e.first().copied()).ok_or_else(|| CliError::Config("--potential delta_eps needs --eps".into()))?,
            },
            "grid" => PotentialSpec::Grid {
                path: self.grid_file.clone().ok_or_else(|| CliError::Config("--potential grid needs --grid-file".into()))?,
            },
            other => return Err(CliError::Config(format!("unknown potential `{other}`"))),
        }))
    }

    /// The flags as a partial configuration.
    pub fn to_config(&self, base: &RunConfig) -> Result<RunConfig, CliError> {
        let quadrature = match (self.panels, self.order) {
            (None, None) => None,
            (p, o) => {
                let q = base.quad();
                Some(QuadratureSpec {
                    panels: p.unwrap_or(q.panels),
                    order: o.unwrap_or(q.order),
                })
            }
        };
        let region = match (self.region, self.grid) {
            (None, None) => None,
            (Some(r), g) => Some(RegionSpec {
                re: [r[0], r[1]],
                im: [r[2], r[3]],
                grid: g.or(base.region.map(|b| b.grid)).unwrap_or([24, 24]),
                eps_shift: base.region.map_or(1e-9, |b| b.eps_shift),
            }),
            (None, Some(g)) => {
                let mut b = base.region.ok_or_else(|| CliError::Config("--grid needs a region".into()))?;
                b.grid = g;
                Some(b)
            }
        };
        Ok(RunConfig {
            dimension: self.dimension,
            potential: self.potential_spec()?,
            quadrature,
            region,
            seed: self.seed,
            samples: self.samples,
            l1: self.l1,
            c2: self.c2,
            lambda: (!self.lambda.is_empty()).then(|| self.lambda.clone()),
            r: self.r.clone(),
            alpha: self.alpha,
            eps: self.eps.clone(),
            betas: self.betas.clone(),
            c2_grid: None,
            which: self.which.clone(),
            sampler: self.sampler.clone(),
            n: self.n,
            pmax: self.pmax,
            candidates: (!self.candidates.is_empty()).then(|| self.candidates.clone()),
            tol: self.tol,
            output: self.output.clone(),
            csv: self.csv.clone(),
        })
    }
}

pub fn resolve(flags: &Flags) -> Result<RunConfig, CliError> {
    let base = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let over = flags.to_config(&base)?;
    Ok(base.merge(over))
}

fn write_line<W: Write + ?Sized, T: serde::Serialize>(out: &mut W, rec: &T) -> Result<(), CliError> {
    serde_json::to_writer(&mut *out, rec).map_err(std::io::Error::from)?;
    out.write_all(b"\n")?;
    Ok(())
}

/// Runs one command and writes its records to `stdout` or the configured
/// output. Returns the process exit code.
pub fn run<W: Write>(cli: &Cli, stdout: &mut W) -> i32 {
    let name = cli.command.name();
    let cfg = match resolve(&cli.flags) {
        Ok(c) => c,
        Err(e) => {
            let _ = write_line(stdout, &ErrorRecord::new(name, &e));
            return e.exit_code();
        }
    };
    let mut file;
    let out: &mut dyn Write = match &cfg.output {
        Some(p) => match std::fs::File::create(p) {
            Ok(f) => {
                file = std::io::BufWriter::new(f);
                &mut file
            }
            Err(e) => {
                let e = CliError::Io(e);
                let _ = write_line(stdout, &ErrorRecord::new(name, &e));
                return e.exit_code();
            }
        },
        None => stdout,
    };
    let exec = Rayon::from_env();
    let start = Instant::now();
    let result = commands::run(cli.command, &cfg, &exec).and_then(|o| {
        let rec = ResultRecord {
            command: name,
            inputs: &cfg,
            outputs: o.outputs,
            provenance: cli.command.provenance(),
            version: record::VERSION,
            wall_time_s: start.elapsed().as_secs_f64(),
        };
        write_line(out, &rec)?;
        if let (Some(table), Some(path)) = (&o.table, &cfg.csv) {
            table.write(std::fs::File::create(path)?)?;
        }
        o.failure.map_or(Ok(()), Err)
    });
    let code = match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = write_line(out, &ErrorRecord::new(name, &e));
            e.exit_code()
        }
    };
    let _ = out.flush();
    code
}
