//! Per-parameter convergence summaries of a draw file.

use crate::error::{Error, Result};
use crate::samplers::drawset::DrawTable;
use crate::samplers::effective_sample_size;
use crate::text::fmt_f64;

#[derive(Debug, Clone, PartialEq)]
pub struct ParameterDiagnostic {
    pub name: String,
    pub mean: f64,
    pub chain_means: Vec<f64>,
    /// Summed over chains; `None` when it could not be estimated.
    pub ess: Option<f64>,
    /// sd / √ESS.
    pub mc_se: Option<f64>,
    /// "ok", "degenerate chain" or "chain too short".
    pub status: &'static str,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostics {
    pub side: String,
    pub draws: usize,
    pub chains: usize,
    pub parameters: Vec<ParameterDiagnostic>,
}

fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

pub fn diagnose_table(table: &DrawTable) -> Result<Diagnostics> {
    let mut parameters = Vec::with_capacity(table.columns.len());
    for (j, name) in table.columns.iter().enumerate() {
        let all = table.column(j);
        let chains = table.column_by_chain(j);
        let mut ess = Some(0.0);
        let mut status = "ok";
        for chain in &chains {
            match effective_sample_size(chain) {
                Ok(e) => ess = ess.map(|s| s + e),
                Err(Error::DegenerateChain) => {
                    ess = None;
                    status = "degenerate chain";
                }
                Err(Error::ChainTooShort { .. }) => {
                    ess = None;
                    if status == "ok" {
                        status = "chain too short";
                    }
                }
                Err(e) => return Err(e),
            }
        }
        let m = mean(&all);
        let sd = if all.len() > 1 {
            (all.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (all.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        parameters.push(ParameterDiagnostic {
            name: name.clone(),
            mean: m,
            chain_means: chains.iter().map(|c| mean(c)).collect(),
            ess,
            mc_se: ess.map(|e| sd / e.sqrt()),
            status,
        });
    }
    Ok(Diagnostics {
        side: table.side.to_string(),
        draws: table.rows.len(),
        chains: table.settings.chains,
        parameters,
    })
}

impl Diagnostics {
    /// CSV table: parameter, mean, mc_se, ess, chain means, status.
    pub fn render_csv(&self) -> String {
        let mut out = format!("# side = {}\n# draws = {}\n# chains = {}\n", self.side, self.draws, self.chains);
        let chain_cols: Vec<String> = (0..self.chains).map(|c| format!("chain_{c}_mean")).collect();
        out.push_str(&format!("parameter,mean,mc_se,ess,{},status\n", chain_cols.join(",")));
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        for p in &self.parameters {
            let means: Vec<String> = p.chain_means.iter().map(|x| fmt_f64(*x)).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                p.name,
                fmt_f64(p.mean),
                opt(p.mc_se),
                opt(p.ess),
                means.join(","),
                p.status
            ));
        }
        out
    }
}
