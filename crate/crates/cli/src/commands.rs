use bispec_core::birman_schwinger::{assemble_with, fredholm_det, hs_norm, op_norm};
use bispec_core::branch::spectral_point;
use bispec_core::delta::{convergence_ladder, exact_1d, exact_3d, DeltaEpsMatching};
use bispec_core::enclosure::{disks_for, l1_disk, tightest_radius, verify as verify_disks, EnclosureDisk};
use bispec_core::green::{biharmonic_green, green_bound, estimate_c2_with, Regime};
use bispec_core::inequality::{max_residual_with, Sampler, Which};
use bispec_core::locator::{locate_with, weak_coupling_fit_with, BirmanSchwinger, EigenvalueCandidate, ScanRegion, WeakCouplingOptions};
use bispec_core::potential::{l1_norm, norm_report_with, rayleigh_sup_bracket, Kind, NormOptions, NormReport, Potential};
use bispec_core::{Complex64, Dim};
use clap::ValueEnum;
use serde_json::{json, Value};

use crate::config::{complex, pair, RunConfig};
use crate::error::CliError;
use crate::exec::Rayon;
use crate::record::Table;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Norms,
    Enclosure,
    Green,
    EstimateC2,
    BsNorm,
    Locate,
    WeakCoupling,
    Delta,
    DeltaEps,
    VerifyInequalities,
    Verify,
}

impl Command {
    pub const ALL: [Command; 11] = [
        Command::Norms,
        Command::Enclosure,
        Command::Green,
        Command::EstimateC2,
        Command::BsNorm,
        Command::Locate,
        Command::WeakCoupling,
        Command::Delta,
        Command::DeltaEps,
        Command::VerifyInequalities,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Norms => "norms",
            Command::Enclosure => "enclosure",
            Command::Green => "green",
            Command::EstimateC2 => "estimate-c2",
            Command::BsNorm => "bs-norm",
            Command::Locate => "locate",
            Command::WeakCoupling => "weak-coupling",
            Command::Delta => "delta",
            Command::DeltaEps => "delta-eps",
            Command::VerifyInequalities => "verify-inequalities",
            Command::Verify => "verify",
        }
    }

    pub fn provenance(self) -> &'static str {
        match self {
            Command::Norms => "potential-norms",
            Command::Enclosure => "enclosure-disks",
            Command::Green => "green-pointwise-bound",
            Command::EstimateC2 => "green-constant-d2",
            Command::BsNorm => "hs-bound",
            Command::Locate => "birman-schwinger-principle",
            Command::WeakCoupling => "weak-coupling-asymptotics",
            Command::Delta => "delta-sharpness",
            Command::DeltaEps => "delta-eps-limit",
            Command::VerifyInequalities => "trigonometric-inequalities",
            Command::Verify => "enclosure-consistency",
        }
    }
}

/// What a command hands back to the dispatcher. `failure` is reported after
/// the record is written.
pub struct Output {
    pub outputs: Value,
    pub table: Option<Table>,
    pub failure: Option<CliError>,
}

impl Output {
    fn plain(outputs: Value) -> Self {
        Self {
            outputs,
            table: None,
            failure: None,
        }
    }
}

pub fn run(cmd: Command, cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    match cmd {
        Command::Norms => norms(cfg, exec),
        Command::Enclosure => enclosure(cfg, exec),
        Command::Green => green(cfg),
        Command::EstimateC2 => estimate_c2(cfg, exec),
        Command::BsNorm => bs_norm(cfg, exec),
        Command::Locate => locate(cfg, exec),
        Command::WeakCoupling => weak_coupling(cfg, exec),
        Command::Delta => delta(cfg),
        Command::DeltaEps => delta_eps(cfg),
        Command::VerifyInequalities => verify_inequalities(cfg, exec),
        Command::Verify => verify(cfg, exec),
    }
}

fn norm_options(cfg: &RunConfig) -> NormOptions {
    let q = cfg.quad();
    NormOptions {
        panels: q.panels.max(NormOptions::default().panels),
        order: q.order,
        samples: cfg.samples.unwrap_or(NormOptions::default().samples),
        seed: cfg.seed(),
        ..NormOptions::default()
    }
}

struct Analysis {
    v: Potential,
    norms: NormReport,
    rayleigh: Option<(f64, f64)>,
    disks: Vec<EnclosureDisk>,
}

fn analyse(cfg: &RunConfig, exec: &Rayon) -> Result<Analysis, CliError> {
    let v = cfg.build_potential()?;
    let norms = norm_report_with(exec, &v, &norm_options(cfg))?;
    let rayleigh = if v.dimension() == Dim::Three && v.kind() != Kind::Delta {
        Some(rayleigh_sup_bracket(&v, 64)?)
    } else {
        None
    };
    let disks = disks_for(&v, &norms, rayleigh, cfg.c2)?;
    Ok(Analysis { v, norms, rayleigh, disks })
}

fn disk_json(d: &EnclosureDisk) -> Value {
    json!({
        "source": d.source.tag(),
        "radius": d.radius,
        "rigorous": d.is_rigorous(),
        "conjectural": d.conjectural,
    })
}

fn norms_json(n: &NormReport, rayleigh: Option<(f64, f64)>) -> Value {
    json!({
        "l1": n.l1,
        "rollnik": n.rollnik.map(|r| json!({"value": r.value, "stderr": r.stderr})),
        "hardy": n.hardy,
        "l32": n.l32,
        "rayleigh_bracket": rayleigh.map(|(a, b)| [a, b]),
    })
}

fn norms(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let a = analyse(cfg, exec)?;
    Ok(Output::plain(norms_json(&a.norms, a.rayleigh)))
}

fn enclosure(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let (disks, norms) = match (&cfg.potential, cfg.l1) {
        (None, Some(l1)) => (vec![l1_disk(cfg.dim()?, l1, cfg.c2)?], Value::Null),
        _ => {
            let a = analyse(cfg, exec)?;
            (a.disks, norms_json(&a.norms, a.rayleigh))
        }
    };
    let mut table = Table::new(&["source", "radius", "rigorous"]);
    for d in &disks {
        table.push([d.source.tag().to_string(), d.radius.to_string(), d.is_rigorous().to_string()]);
    }
    Ok(Output {
        outputs: json!({
            "norms": norms,
            "disks": disks.iter().map(disk_json).collect::<Vec<_>>(),
            "tightest_rigorous_radius": tightest_radius(&disks),
        }),
        table: Some(table),
        failure: None,
    })
}

fn green(cfg: &RunConfig) -> Result<Output, CliError> {
    let d = cfg.dim()?;
    let lambdas = cfg.require(&cfg.lambda, "lambda")?;
    let rs = cfg.require(&cfg.r, "r")?;
    let mut rows = Vec::new();
    let mut table = Table::new(&["re_lambda", "im_lambda", "r", "re_g", "im_g", "bound", "ratio"]);
    for &l in lambdas {
        let sp = spectral_point(complex(l))?;
        let bound = match green_bound(d, &sp, cfg.c2) {
            Ok(b) => Some(b),
            Err(bispec_core::Error::MissingC2) => None,
            Err(e) => return Err(e.into()),
        };
        for &r in rs {
            let g = biharmonic_green(d, &sp, r)?;
            let ratio = bound.map(|b| g.value.norm() / b);
            table.push([
                l[0].to_string(),
                l[1].to_string(),
                r.to_string(),
                g.value.re.to_string(),
                g.value.im.to_string(),
                bound.map_or(String::new(), |b| b.to_string()),
                ratio.map_or(String::new(), |x| x.to_string()),
            ]);
            rows.push(json!({
                "lambda": l,
                "r": r,
                "value": pair(g.value),
                "regime": if g.regime == Regime::DiagonalSeries { "diagonal_series" } else { "generic" },
                "bound": bound,
                "ratio": ratio,
            }));
        }
    }
    Ok(Output {
        outputs: json!({ "samples": rows }),
        table: Some(table),
        failure: None,
    })
}

fn estimate_c2(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let [a, r, levels] = cfg.c2_grid.unwrap_or([16, 81, 6]);
    let e = estimate_c2_with(exec, a, r, levels)?;
    Ok(Output::plain(json!({
        "c2": e.value,
        "arg_lambda": e.arg_lambda,
        "scaled_radius": e.scaled_radius,
        "levels": e.levels,
        "conjectural_radius": e.value * e.value,
        "reference_radius": 1.0 / 64.0,
    })))
}

fn bs_norm(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let v = cfg.build_potential()?;
    let q = cfg.quad();
    let quad = v.quadrature(q.panels, q.order)?;
    let l1 = l1_norm(&v, &quad)?;
    let lambdas = cfg.require(&cfg.lambda, "lambda")?;
    let mut rows = Vec::new();
    let mut table = Table::new(&["re_lambda", "im_lambda", "hs_norm", "op_norm", "hs_bound", "log_abs_det"]);
    for &l in lambdas {
        let k = assemble_with(exec, &v, complex(l), &quad)?;
        let hs = hs_norm(&k);
        let op = op_norm(&k, 1e-10, 500)?;
        let bound = match green_bound(v.dimension(), k.point(), cfg.c2) {
            Ok(b) => Some(b * l1),
            Err(bispec_core::Error::MissingC2) => None,
            Err(e) => return Err(e.into()),
        };
        let det = fredholm_det(&k);
        table.push([
            l[0].to_string(),
            l[1].to_string(),
            hs.to_string(),
            op.to_string(),
            bound.map_or(String::new(), |b| b.to_string()),
            det.log_abs.to_string(),
        ]);
        rows.push(json!({
            "lambda": l,
            "hs_norm": hs,
            "op_norm": op,
            "hs_bound": bound,
            "det": pair(det.value()),
            "log_abs_det": det.log_abs,
            "nodes": k.len(),
        }));
    }
    Ok(Output {
        outputs: json!({ "l1": l1, "points": rows }),
        table: Some(table),
        failure: None,
    })
}

fn default_region(disks: &[EnclosureDisk]) -> Result<ScanRegion, CliError> {
    let r = tightest_radius(disks)
        .or_else(|| disks.iter().map(|d| d.radius).reduce(f64::min))
        .filter(|r| *r > 0.0)
        .ok_or(bispec_core::Error::EmptySpectrum { beta: 0.0 })?;
    Ok(ScanRegion::square(1.5 * r, 24)?)
}

fn candidates(cfg: &RunConfig, exec: &Rayon, a: &Analysis) -> Result<Vec<EigenvalueCandidate>, CliError> {
    let region = match &cfg.region {
        Some(r) => r.to_region()?,
        None => default_region(&a.disks)?,
    };
    let v = &a.v;
    match v.kind() {
        Kind::Delta => {
            let alpha = v.alpha().unwrap();
            let s = if v.dimension() == Dim::One { exact_1d(alpha) } else { exact_3d(alpha) };
            Ok(s.eigenvalue
                .into_iter()
                .map(|lambda| EigenvalueCandidate {
                    lambda,
                    residual_log_abs_det: f64::NEG_INFINITY,
                    refine_iters: 0,
                    accepted: true,
                    one_sided: false,
                    enclosure_report: a.disks.iter().map(|d| (d.source, d.contains(lambda), d.margin(lambda))).collect(),
                })
                .collect())
        }
        Kind::DeltaEps => {
            let ch = DeltaEpsMatching::new(v.dimension(), v.alpha().unwrap(), v.eps().unwrap())?;
            Ok(locate_with(exec, &ch, &region, &a.disks)?)
        }
        _ => {
            let q = cfg.quad();
            let quad = v.quadrature(q.panels, q.order)?;
            let ch = BirmanSchwinger {
                potential: v,
                quad: &quad,
                exec,
            };
            Ok(locate_with(exec, &ch, &region, &a.disks)?)
        }
    }
}

fn locate(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let a = analyse(cfg, exec)?;
    let found = candidates(cfg, exec, &a)?;
    let mut table = Table::new(&["re_lambda", "im_lambda", "log_abs_det", "iterations", "one_sided"]);
    let list: Vec<Value> = found
        .iter()
        .map(|c| {
            table.push([
                c.lambda.re.to_string(),
                c.lambda.im.to_string(),
                c.residual_log_abs_det.to_string(),
                c.refine_iters.to_string(),
                c.one_sided.to_string(),
            ]);
            json!({
                "lambda": pair(c.lambda),
                "residual_log_abs_det": finite(c.residual_log_abs_det),
                "refine_iters": c.refine_iters,
                "accepted": c.accepted,
                "one_sided": c.one_sided,
                "enclosure": c.enclosure_report.iter().map(|(s, inside, margin)| json!({
                    "source": s.tag(), "inside": inside, "margin": margin,
                })).collect::<Vec<_>>(),
            })
        })
        .collect();
    Ok(Output {
        outputs: json!({
            "candidates": list,
            "disks": a.disks.iter().map(disk_json).collect::<Vec<_>>(),
        }),
        table: Some(table),
        failure: None,
    })
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

fn weak_coupling(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let v = cfg.build_potential()?;
    let betas = cfg.betas.clone().unwrap_or_else(|| vec![1e-4, 3e-4, 1e-3, 3e-3, 1e-2]);
    let q = cfg.quadrature.unwrap_or_default();
    let opts = WeakCouplingOptions {
        panels: q.panels,
        order: q.order,
        ..WeakCouplingOptions::default()
    };
    let fit = weak_coupling_fit_with(exec, &v, &betas, &opts)?;
    let mut table = Table::new(&["beta", "lambda"]);
    for (b, l) in &fit.points {
        table.push([b.to_string(), l.to_string()]);
    }
    Ok(Output {
        outputs: json!({
            "exponent": fit.exponent,
            "theoretical_exponent": v.dimension().coupling_exponent(),
            "constant": fit.constant,
            "c_d": fit.c_d,
            "l1": fit.l1,
            "points": fit.points,
        }),
        table: Some(table),
        failure: None,
    })
}

fn delta(cfg: &RunConfig) -> Result<Output, CliError> {
    let d = cfg.dim()?;
    let alpha = complex(*cfg.require(&cfg.alpha, "alpha")?);
    let s = match d {
        Dim::One => exact_1d(alpha),
        Dim::Three => exact_3d(alpha),
        Dim::Two => return Err(bispec_core::Error::DimensionUnsupported(2).into()),
    };
    let disk = l1_disk(d, s.l1(), None)?;
    Ok(Output::plain(json!({
        "alpha": pair(alpha),
        "eigenvalue": s.eigenvalue.map(pair),
        "k": s.k.map(pair),
        "l1": s.l1(),
        "disk_radius": disk.radius,
        "margin": s.disk_margin(),
    })))
}

fn delta_eps(cfg: &RunConfig) -> Result<Output, CliError> {
    let d = cfg.dim()?;
    let alpha = complex(*cfg.require(&cfg.alpha, "alpha")?);
    let eps = cfg.eps.clone().unwrap_or_else(|| vec![1e-2, 5e-3, 2.5e-3, 1.25e-3]);
    let rows = convergence_ladder(d, alpha, &eps)?;
    let mut table = Table::new(&["eps", "re_lambda", "im_lambda", "rel_error"]);
    for r in &rows {
        table.push([
            r.eps.to_string(),
            r.eigenvalue.re.to_string(),
            r.eigenvalue.im.to_string(),
            r.rel_error.map_or(String::new(), |e| e.to_string()),
        ]);
    }
    Ok(Output {
        outputs: json!({
            "alpha": pair(alpha),
            "ladder": rows.iter().map(|r| json!({
                "eps": r.eps, "eigenvalue": pair(r.eigenvalue), "rel_error": r.rel_error,
            })).collect::<Vec<_>>(),
        }),
        table: Some(table),
        failure: None,
    })
}

fn parse_which(s: &str) -> Result<Vec<Which>, CliError> {
    if s == "all" {
        return Ok(Which::ALL.to_vec());
    }
    Which::ALL
        .iter()
        .find(|w| w.name() == s)
        .map(|w| vec![*w])
        .ok_or_else(|| CliError::Config(format!("unknown inequality `{s}`")))
}

fn parse_sampler(s: &str) -> Result<Sampler, CliError> {
    match s {
        "random" => Ok(Sampler::Random),
        "grid" => Ok(Sampler::Grid),
        "log_grid" => Ok(Sampler::LogGrid),
        _ => Err(CliError::Config(format!("unknown sampler `{s}`"))),
    }
}

/// Samples of the dedicated near-equality grid run alongside the main sampler.
const NEAR_EQUALITY_SAMPLES: usize = 40_000;

fn verify_inequalities(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let which = parse_which(cfg.which.as_deref().unwrap_or("all"))?;
    let sampler = parse_sampler(cfg.sampler.as_deref().unwrap_or("random"))?;
    let n = cfg.n.unwrap_or(1_000_000);
    let pmax = cfg.pmax.unwrap_or(30.0);
    let mut table = Table::new(&["which", "p", "q", "residual"]);
    let mut rows = Vec::new();
    let mut worst = f64::NEG_INFINITY;
    for w in which {
        let main = max_residual_with(exec, w, sampler, n, pmax, cfg.seed())?;
        let near = max_residual_with(exec, w, Sampler::LogGrid, NEAR_EQUALITY_SAMPLES, pmax, cfg.seed())?;
        let top = if near.residual > main.residual { near } else { main };
        worst = worst.max(top.residual);
        table.push([w.name().to_string(), top.p.to_string(), top.q.to_string(), top.residual.to_string()]);
        rows.push(json!({
            "which": w.name(),
            "max_residual": top.residual,
            "argmax": [top.p, top.q],
            "sampled_max": main.residual,
            "near_equality_max": near.residual,
            "passed": top.residual <= 1e-12,
        }));
    }
    Ok(Output {
        outputs: json!({ "samples": n, "pmax": pmax, "results": rows }),
        table: Some(table),
        failure: (worst > 1e-12).then_some(CliError::InequalityViolation(worst)),
    })
}

fn verify(cfg: &RunConfig, exec: &Rayon) -> Result<Output, CliError> {
    let tol = cfg.tol.unwrap_or(1e-8);
    let (lambdas, disks): (Vec<Complex64>, Vec<EnclosureDisk>) = match (&cfg.potential, cfg.l1) {
        (None, Some(l1)) => {
            let c = cfg.require(&cfg.candidates, "candidates")?;
            (c.iter().map(|p| complex(*p)).collect(), vec![l1_disk(cfg.dim()?, l1, cfg.c2)?])
        }
        _ => {
            let a = analyse(cfg, exec)?;
            let lambdas = match &cfg.candidates {
                Some(c) => c.iter().map(|p| complex(*p)).collect(),
                None => candidates(cfg, exec, &a)?.iter().map(|c| c.lambda).collect(),
            };
            (lambdas, a.disks)
        }
    };
    let report = verify_disks(&lambdas, &disks, tol);
    let mut table = Table::new(&["candidate", "re_lambda", "im_lambda", "source", "rigorous", "inside", "margin"]);
    for m in &report.entries {
        table.push([
            m.candidate.to_string(),
            m.lambda.re.to_string(),
            m.lambda.im.to_string(),
            m.source.tag().to_string(),
            m.rigorous.to_string(),
            m.inside.to_string(),
            m.margin.to_string(),
        ]);
    }
    let entry = |m: &bispec_core::enclosure::Membership| {
        json!({
            "candidate": m.candidate,
            "lambda": pair(m.lambda),
            "source": m.source.tag(),
            "rigorous": m.rigorous,
            "inside": m.inside,
            "margin": m.margin,
        })
    };
    Ok(Output {
        outputs: json!({
            "passed": report.passed(),
            "tolerance": tol,
            "candidates": lambdas.iter().map(|z| pair(*z)).collect::<Vec<_>>(),
            "disks": disks.iter().map(disk_json).collect::<Vec<_>>(),
            "entries": report.entries.iter().map(entry).collect::<Vec<_>>(),
            "violations": report.violations.iter().map(entry).collect::<Vec<_>>(),
        }),
        table: Some(table),
        failure: (!report.passed()).then_some(CliError::EnclosureViolation(report.violations.len())),
    })
}
