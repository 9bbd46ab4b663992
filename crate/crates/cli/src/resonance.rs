use clap::Args;
use soliton_core::holodata::{lattice_basis, resonances, EigenData};

use crate::CliError;

#[derive(Args, Debug)]
pub struct ResonanceArgs {
    /// Eigenvalues: integers, a/b, or terminating decimals.
    #[arg(long, allow_hyphen_values = true)]
    pub h: String,
    /// Also list every resonant pair (i, k).
    #[arg(long)]
    pub pairs: bool,
    /// Print one JSON document instead of text.
    #[arg(long)]
    pub json: bool,
}

fn tuple(v: &[i64]) -> String {
    let parts: Vec<String> = v.iter().map(i64::to_string).collect();
    format!("({})", parts.join(","))
}

pub fn run(a: ResonanceArgs) -> Result<(), CliError> {
    let h = EigenData::parse_list(&a.h)?;
    let lattice = lattice_basis(&h)?;
    let res = resonances(&h)?;
    if a.json {
        let doc = serde_json::json!({ "h": h.values(), "d_h": res.d_h, "lattice": lattice, "pairs": res.pairs });
        println!("{}", serde_json::to_string_pretty(&doc).expect("serializes"));
        return Ok(());
    }
    println!("d_h = {}", res.d_h);
    println!("rank = {}", lattice.rank);
    println!("q_rank = {}", lattice.q_rank);
    if lattice.basis.is_empty() {
        println!("lattice basis: none");
    } else {
        let b: Vec<String> = lattice.basis.iter().map(|v| tuple(v)).collect();
        println!("lattice basis: {}", b.join(" "));
    }
    if a.pairs {
        for p in &res.pairs {
            let k: Vec<i64> = p.k.iter().map(|&x| x as i64).collect();
            println!("h_{} = k.h for k = {}", p.index + 1, tuple(&k));
        }
    }
    Ok(())
}
