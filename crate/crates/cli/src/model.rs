use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::{json, Value};
use soliton_core::families::{make_cao, make_cigar, make_product, AnalyticFamily, FamilyKind};
use soliton_core::holodata::EigenData;
use soliton_core::toric::{read_series, DEFAULT_TRUST};
use soliton_core::verify::{SeriesModel, SolitonModel};

use crate::{io_error, CliError};

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FamilyName {
    Cigar,
    Product,
    Cao,
}

/// Either a closed-form family or a series file.
#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long, conflicts_with = "series", required_unless_present = "series")]
    pub family: Option<FamilyName>,
    /// Toric series file written by `soliton toric`.
    #[arg(long)]
    pub series: Option<PathBuf>,
    /// Cigar/product constants c (comma-separated); default 2 per factor.
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<String>,
    /// Eigenvalues h (comma-separated; a/b and decimals accepted). For cao,
    /// the single value h_axis.
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    /// Complex dimension of Cao's soliton.
    #[arg(long)]
    pub n: Option<usize>,
    /// Trust bound on each |z^i|² for series input.
    #[arg(long, default_value_t = DEFAULT_TRUST)]
    pub trust: f64,
}

pub fn parse_reals(s: &str) -> Result<Vec<f64>, CliError> {
    Ok(EigenData::parse_list(s)?.values())
}

pub enum Model {
    Family(AnalyticFamily),
    Series(SeriesModel),
}

impl Model {
    pub fn as_dyn(&self) -> &dyn SolitonModel {
        match self {
            Model::Family(f) => f,
            Model::Series(s) => s,
        }
    }

    pub fn metadata(&self) -> Value {
        match self {
            Model::Family(f) => json!({
                "family": f.name(),
                "params": f.params(),
                "soliton_h": f.soliton_h(),
                "gauge_shift": f.gauge_shift(),
            }),
            Model::Series(s) => json!({
                "family": "series",
                "nvars": s.u.nvars(),
                "degree": s.u.degree(),
                "h": s.h,
                "trust": s.trust,
                "soliton_h": s.soliton_h(),
            }),
        }
    }

    /// Largest `|z^i|²` allowed on every axis, if bounded.
    pub fn axis_bound(&self) -> Option<f64> {
        match self {
            Model::Series(s) => Some(s.trust),
            Model::Family(f) => match f.kind() {
                FamilyKind::Cigar { c, h } => (*h < 0.0).then(|| c / -h),
                FamilyKind::Product { c, h } => c
                    .iter()
                    .zip(h)
                    .filter(|(_, h)| **h < 0.0)
                    .map(|(c, h)| c / -h)
                    .reduce(f64::min),
                FamilyKind::Cao(p) => p.r_max().is_finite().then(|| p.r_max() / p.n() as f64),
            },
        }
    }
}

pub fn resolve(a: &ModelArgs) -> Result<Model, CliError> {
    let h = parse_reals(&a.h)?;
    if let Some(path) = &a.series {
        if a.c.is_some() || a.n.is_some() {
            return Err(CliError::Usage("--c and --n do not apply to --series".into()));
        }
        let text = std::fs::read_to_string(path).map_err(|e| io_error(path, e))?;
        let u = read_series(&text)?;
        return Ok(Model::Series(SeriesModel::new(u, h, a.trust)?));
    }
    let family = a.family.expect("clap enforces --family or --series");
    let fam = match family {
        FamilyName::Cigar => {
            let c = a.c.as_deref().map(parse_reals).transpose()?.unwrap_or_else(|| vec![2.0]);
            if c.len() != 1 || h.len() != 1 {
                return Err(CliError::Usage("cigar takes a single --c and --h".into()));
            }
            make_cigar(c[0], h[0])?
        }
        FamilyName::Product => {
            let c = a.c.as_deref().map(parse_reals).transpose()?.unwrap_or_else(|| vec![2.0; h.len()]);
            make_product(&c, &h)?
        }
        FamilyName::Cao => {
            if a.c.is_some() {
                return Err(CliError::Usage("cao takes --n and --h, not --c".into()));
            }
            let n = a.n.ok_or_else(|| CliError::Usage("cao needs --n".into()))?;
            if h.len() != 1 {
                return Err(CliError::Usage("cao takes a single --h (the axis eigenvalue)".into()));
            }
            make_cao(n, h[0])?
        }
    };
    Ok(Model::Family(fam))
}
