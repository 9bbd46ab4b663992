use std::fmt::Write as _;
use std::path::PathBuf;

use clap::Args;
use num_complex::Complex64;
use soliton_core::ckgeom::{associated_z, ricci_from_metric, FDScheme};
use soliton_core::verify::{GridSpec, ModelMetric, SolitonModel};
use soliton_core::{Error, Execution};

use crate::model::{resolve, ModelArgs};
use crate::{io_error, CliError};

#[derive(Args, Debug)]
pub struct GenArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Points per axis on the real segment [-rmax, rmax].
    #[arg(long, default_value_t = 21)]
    pub grid: usize,
    #[arg(long, default_value_t = 1.0)]
    pub rmax: f64,
    /// Output directory for table.csv and metadata.json; table to stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn header(n: usize) -> String {
    let mut cols: Vec<String> = (1..=n).flat_map(|i| [format!("re_z{i}"), format!("im_z{i}")]).collect();
    cols.extend(["phi", "f", "det_g", "R", "Z_sq"].map(String::from));
    cols.join(",")
}

fn row(model: &dyn SolitonModel, z: &[Complex64], scheme: &FDScheme) -> soliton_core::Result<Vec<f64>> {
    let metric = ModelMetric(model);
    let g = model.metric(z)?;
    let ric = ricci_from_metric(&metric, z, scheme)?;
    let zf = associated_z(&metric, z, scheme)?;
    let mut out: Vec<f64> = z.iter().flat_map(|c| [c.re, c.im]).collect();
    out.extend([
        model.potential(z)?,
        model.ricci_potential(z)?,
        g.determinant(),
        ric.scalar,
        0.5 * g.quadratic_form(&zf.components),
    ]);
    Ok(out)
}

pub fn run(a: GenArgs) -> Result<(), CliError> {
    let model = resolve(&a.model)?;
    let m = model.as_dyn();
    if !(a.rmax > 0.0) || a.grid == 0 {
        return Err(CliError::Usage("--rmax must be positive and --grid at least 1".into()));
    }
    let scheme = FDScheme::from_env()?;
    let grid = GridSpec::segment(m.dim(), a.rmax, a.grid)?;
    let points = grid.points();
    if let Some(z) = points.iter().find(|z| !m.contains(z)) {
        let coords: Vec<String> = z.iter().map(|c| format!("{}{:+}i", c.re, c.im)).collect();
        return Err(Error::OutOfDomain(format!("({}) lies outside the domain of {}", coords.join(", "), m.label())).into());
    }
    let rows = Execution::default().try_map(&points, |z| row(m, z, &scheme))?;
    let mut csv = header(m.dim());
    csv.push('\n');
    for r in &rows {
        let cells: Vec<String> = r.iter().map(|x| format!("{x:.16e}")).collect();
        writeln!(csv, "{}", cells.join(",")).unwrap();
    }
    let mut meta = model.metadata();
    meta["grid"] = serde_json::json!({ "points_per_axis": a.grid, "rmax": a.rmax, "rows": rows.len() });
    meta["fd_rel_step"] = serde_json::json!(scheme.rel_step);
    let meta = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    match a.output {
        Some(dir) => {
            std::fs::create_dir_all(&dir).map_err(|e| io_error(&dir, e))?;
            let table = dir.join("table.csv");
            std::fs::write(&table, csv).map_err(|e| io_error(&table, e))?;
            let path = dir.join("metadata.json");
            std::fs::write(&path, meta + "\n").map_err(|e| io_error(&path, e))?;
            println!("wrote {} rows to {}", rows.len(), table.display());
        }
        None => {
            print!("{csv}");
            eprintln!("{meta}");
        }
    }
    Ok(())
}
