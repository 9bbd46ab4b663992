use std::path::PathBuf;

use clap::Args;
use soliton_core::toric::{ma_residual, read_series, solve_singular_ivp, write_series, ToricInitialData};

use crate::model::parse_reals;
use crate::{io_error, CliError};

#[derive(Args, Debug)]
pub struct ToricArgs {
    /// `zero`, `flat`, or a series file holding v in n−1 variables.
    #[arg(long, default_value = "zero")]
    pub init: String,
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    #[arg(long, default_value_t = 12)]
    pub degree: usize,
    /// Series output file; stdout if absent.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

pub fn run(a: ToricArgs) -> Result<(), CliError> {
    let h = parse_reals(&a.h)?;
    let init = match a.init.as_str() {
        "zero" => ToricInitialData::zero(h.clone(), a.degree)?,
        "flat" => ToricInitialData::flat(h.clone(), a.degree)?,
        file => {
            let path = PathBuf::from(file);
            let text = std::fs::read_to_string(&path).map_err(|e| io_error(&path, e))?;
            ToricInitialData::new(read_series(&text)?, h.clone())?
        }
    };
    let u = solve_singular_ivp(&init, a.degree)?;
    let residual = ma_residual(&u, &h)?.max_abs_coeff();
    let text = write_series(&u);
    match &a.output {
        Some(path) => {
            std::fs::write(path, text + "\n").map_err(|e| io_error(path, e))?;
            println!("wrote degree {} series in {} variables to {}", u.degree(), u.nvars(), path.display());
            println!("max residual coefficient: {residual:.16e}");
        }
        None => {
            print!("{text}");
            eprintln!("max residual coefficient: {residual:.16e}");
        }
    }
    Ok(())
}
