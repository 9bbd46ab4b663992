//! Text format for series: `{"nvars", "degree", "terms": [{"exponents", "coeff"}]}`,
//! coefficients with 17 significant digits.

use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use super::TruncatedSeries;
use crate::error::{Error, Result};

#[derive(Serialize, Deserialize)]
struct Term {
    exponents: Vec<u16>,
    coeff: Box<RawValue>,
}

#[derive(Serialize, Deserialize)]
struct SeriesFile {
    nvars: usize,
    degree: usize,
    terms: Vec<Term>,
}

/// Serializes the nonzero terms in storage order.
pub fn write_series(s: &TruncatedSeries) -> String {
    let terms = s
        .terms()
        .filter(|(_, c)| *c != 0.0)
        .map(|(e, c)| Term {
            exponents: e.to_vec(),
            coeff: RawValue::from_string(format!("{c:.16e}")).expect("formatted float is valid JSON"),
        })
        .collect();
    let file = SeriesFile { nvars: s.nvars(), degree: s.degree(), terms };
    let mut out = serde_json::to_string_pretty(&file).expect("series serializes");
    out.push('\n');
    out
}

pub fn read_series(text: &str) -> Result<TruncatedSeries> {
    let file: SeriesFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let mut terms = Vec::with_capacity(file.terms.len());
    for t in &file.terms {
        // Parsed by std so the round trip is exact.
        let c: f64 = t.coeff.get().trim().parse().map_err(|_| Error::Parse(format!("bad coefficient {}", t.coeff.get())))?;
        if t.exponents.len() != file.nvars {
            return Err(Error::Parse(format!("exponent {:?} for {} variables", t.exponents, file.nvars)));
        }
        if t.exponents.iter().map(|&x| x as usize).sum::<usize>() > file.degree {
            return Err(Error::Parse(format!("exponent {:?} above degree {}", t.exponents, file.degree)));
        }
        terms.push((t.exponents.clone(), c));
    }
    TruncatedSeries::from_terms(file.nvars, file.degree, terms.iter().map(|(e, c)| (e.as_slice(), *c)))
        .map_err(|e| Error::Parse(e.to_string()))
}
