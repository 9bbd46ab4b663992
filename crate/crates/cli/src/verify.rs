use std::path::PathBuf;

use clap::{Args, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Value};
use soliton_core::ckgeom::FDScheme;
use soliton_core::toric::RhoGraph;
use soliton_core::verify::{
    apply_affine_symmetry, check_conservation, check_growth, check_lie_derivative, check_periodic_orbit,
    check_soliton_residual, default_radii, rho_graph_from_family, rho_residual, AffineSymmetry, CheckOptions,
    GridSpec, VerificationReport,
};
use soliton_core::Error;

use crate::model::{resolve, Model, ModelArgs};
use crate::{io_error, CliError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    Conservation,
    Residual,
    Growth,
    Orbits,
    Lie,
    Rho,
    Affine,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Conservation => "conservation",
            Check::Residual => "residual",
            Check::Growth => "growth",
            Check::Orbits => "orbits",
            Check::Lie => "lie",
            Check::Rho => "rho",
            Check::Affine => "affine",
        }
    }

    fn default_tol(self, series: bool) -> f64 {
        match self {
            Check::Conservation => 1e-6,
            Check::Residual if series => 1e-6,
            Check::Residual => 1e-7,
            Check::Growth => 0.1,
            Check::Orbits => 1e-6,
            Check::Lie => 1e-5,
            Check::Rho | Check::Affine if series => 1e-6,
            Check::Rho | Check::Affine => 1e-9,
        }
    }
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "conservation,residual,lie,rho")]
    pub checks: Vec<Check>,
    /// Points per real and imaginary direction of each axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Half-width of the sampling square on each axis.
    #[arg(long)]
    pub rmax: Option<f64>,
    /// Tolerance override, e.g. `--tol residual=1e-8` (repeatable).
    #[arg(long, value_parser = parse_tol)]
    pub tol: Vec<(Check, f64)>,
    /// RK4 steps per orbit.
    #[arg(long, default_value_t = 10_000)]
    pub steps: usize,
    /// Step ε of the Lie derivative difference quotient.
    #[arg(long, default_value_t = 1e-4)]
    pub eps: f64,
    /// Affine symmetry as JSON; defaults to the translation by log 2 on every axis.
    #[arg(long)]
    pub symmetry: Option<PathBuf>,
    #[arg(short, long, default_value = "report.json")]
    pub output: PathBuf,
}

fn parse_tol(s: &str) -> Result<(Check, f64), String> {
    let (name, value) = s.split_once('=').ok_or("expected CHECK=VALUE")?;
    let check = Check::from_str(name.trim(), true)?;
    let tol: f64 = value.trim().parse().map_err(|_| format!("bad tolerance {value}"))?;
    if !(tol > 0.0) {
        return Err(format!("tolerance must be positive, got {tol}"));
    }
    Ok((check, tol))
}

fn default_grid(dim: usize) -> usize {
    match dim {
        1 => 21,
        2 => 5,
        3 => 3,
        _ => 2,
    }
}

fn default_rmax(model: &Model) -> f64 {
    match (model, model.axis_bound()) {
        (Model::Series(_), Some(b)) => (0.4 * b.sqrt()).min(0.2),
        (_, Some(b)) => (0.4 * b.sqrt()).min(1.0),
        _ => 1.0,
    }
}

fn rho_points(dim: usize, hi: f64, lo: f64) -> Vec<Vec<f64>> {
    let count = match dim {
        1 => 41,
        2 => 9,
        3 => 5,
        _ => 4,
    };
    let vals: Vec<f64> = (0..count).map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out.into_iter().flat_map(|p: Vec<f64>| vals.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
    }
    out
}

fn rho_graph(model: &Model) -> Result<RhoGraph, CliError> {
    let dim = model.as_dyn().dim();
    let bound = model.axis_bound();
    // Series stay within the same |z^i|² range as the grid checks.
    let hi = match model {
        Model::Series(s) => (0.16 * s.trust).ln(),
        _ => bound.map_or(2.0, |b| (0.5 * b).ln().min(2.0)),
    };
    Ok(match model {
        Model::Family(f) => rho_graph_from_family(f, &rho_points(dim, hi, hi - 4.0))?,
        Model::Series(s) => RhoGraph::from_series(&s.u, &rho_points(dim, hi, hi - 4.0), s.trust)?,
    })
}

struct Outcome {
    pass: bool,
    summary: String,
    report: Value,
}

fn single(r: VerificationReport) -> Outcome {
    Outcome {
        pass: r.pass,
        summary: format!("max_dev={:.3e} tol={:.1e}", r.max_dev, r.tolerance),
        report: serde_json::to_value(&r).expect("report serializes"),
    }
}

fn run_check(
    check: Check,
    model: &Model,
    args: &VerifyArgs,
    tol: f64,
    opts: &CheckOptions,
) -> Result<Outcome, CliError> {
    let m = model.as_dyn();
    let dim = m.dim();
    let rmax = args.rmax.unwrap_or_else(|| default_rmax(model));
    let grid = || GridSpec::square(dim, rmax, args.grid.unwrap_or_else(|| default_grid(dim)));
    let h = m.eigenvalues();
    Ok(match check {
        Check::Conservation => single(check_conservation(m, &grid()?, tol, opts)?),
        Check::Residual => {
            let r = check_soliton_residual(m, &grid()?, tol, opts)?;
            Outcome {
                pass: r.pass(),
                summary: format!(
                    "monge-ampere max_dev={:.3e}, y-invariance max_dev={:.3e} tol={tol:.1e}",
                    r.monge_ampere.max_dev, r.y_invariance.max_dev
                ),
                report: serde_json::to_value(&r).expect("report serializes"),
            }
        }
        Check::Growth => {
            if matches!(model, Model::Series(_)) {
                return Err(CliError::Usage("growth checks need a complete soliton, not a series".into()));
            }
            let mut dirs: Vec<Vec<Complex64>> = (0..dim)
                .map(|i| (0..dim).map(|j| Complex64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
                .collect();
            if dim > 1 {
                dirs.push(vec![Complex64::new(1.0, 0.0); dim]);
            }
            let r = check_growth(m, &dirs, &default_radii(), tol, opts)?;
            let mus: Vec<String> = r.directions.iter().map(|d| format!("{:.4}", d.mu_est)).collect();
            Outcome {
                pass: r.pass,
                summary: format!("mu=[{}] 2n={} tol={tol:.1e}", mus.join(", "), r.two_n),
                report: serde_json::to_value(&r).expect("report serializes"),
            }
        }
        Check::Orbits => {
            let radius = match model.axis_bound() {
                Some(b) => (0.5 * b.sqrt()).min(1.0),
                None => 1.0,
            };
            let mut reports = Vec::new();
            for (axis, _) in h.iter().enumerate().filter(|(_, x)| **x > 0.0) {
                reports.push(check_periodic_orbit(m, axis, Complex64::new(radius, 0.0), 1.0, args.steps, tol, opts)?);
            }
            if reports.is_empty() {
                return Err(Error::NonPositiveEigenvalue { index: 0, value: h[0] }.into());
            }
            let worst = reports.iter().map(|r| r.max_dev).fold(0.0, f64::max);
            Outcome {
                pass: reports.iter().all(|r| r.pass),
                summary: format!("{} axes, max closure error={worst:.3e} tol={tol:.1e}", reports.len()),
                report: serde_json::to_value(&reports).expect("report serializes"),
            }
        }
        Check::Lie => single(check_lie_derivative(m, &grid()?, args.eps, tol, opts)?),
        Check::Rho => single(rho_residual(&rho_graph(model)?, &h, tol)?),
        Check::Affine => {
            let sym = match &args.symmetry {
                Some(path) => {
                    let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
                    serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?
                }
                None => AffineSymmetry::translation(&h, vec![std::f64::consts::LN_2; dim]),
            };
            if let Err(e) = sym.check(&h) {
                return Ok(Outcome {
                    pass: false,
                    summary: e.to_string(),
                    report: json!({ "check": "affine", "error": e.to_string(), "symmetry": sym, "pass": false }),
                });
            }
            let moved = apply_affine_symmetry(&sym, &rho_graph(model)?, &h)?;
            let mut r = rho_residual(&moved, &h, tol)?;
            r.check = "affine".into();
            let mut out = single(r);
            out.report["symmetry"] = serde_json::to_value(&sym).expect("symmetry serializes");
            out
        }
    })
}

pub fn run(a: VerifyArgs) -> Result<(), CliError> {
    let model = resolve(&a.model)?;
    let series = matches!(model, Model::Series(_));
    let opts = CheckOptions { scheme: FDScheme::from_env()?, ..Default::default() };
    let mut checks = a.checks.clone();
    checks.dedup();
    let mut entries = Vec::new();
    let mut all_pass = true;
    for check in checks {
        let tol = a.tol.iter().rev().find(|(c, _)| *c == check).map_or(check.default_tol(series), |t| t.1);
        let out = run_check(check, &model, &a, tol, &opts)?;
        println!("{:<13} {} {}", check.name(), if out.pass { "PASS" } else { "FAIL" }, out.summary);
        all_pass &= out.pass;
        entries.push(json!({ "name": check.name(), "tolerance": tol, "pass": out.pass, "report": out.report }));
    }
    let report = json!({
        "subject": model.as_dyn().label(),
        "model": model.metadata(),
        "fd_rel_step": opts.scheme.rel_step,
        "checks": entries,
        "pass": all_pass,
    });
    let text = serde_json::to_string_pretty(&report).expect("report serializes");
    std::fs::write(&a.output, text + "\n").map_err(|e| io_error(&a.output, e))?;
    if all_pass {
        Ok(())
    } else {
        Err(CliError::ChecksFailed)
    }
}
