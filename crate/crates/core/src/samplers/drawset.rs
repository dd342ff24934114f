//! Retained posterior draws and their columnar text form.
//!
//! The file is a block of `# key = value` metadata lines followed by a CSV
//! table, one draw per row: a `chain` column, then the mean vector, then each
//! covariance as its row-major lower triangle.

use std::fmt;
use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::stats::linalg::{from_lower_triangle, lower_triangle};
use crate::stats::{MeanVector, SpdMatrix};
use crate::text::fmt_f64;

use super::settings::McmcSettings;

const MAGIC: &str = "# sourcebf drawset v1";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// Draws of θ_s given e_s.
    Prosecution,
    /// Draws of θ_a given e_a.
    Defense,
}

impl Side {
    pub fn as_str(self) -> &'static str {
        match self {
            Side::Prosecution => "prosecution",
            Side::Defense => "defense",
        }
    }

    fn parse(s: &str) -> Option<Side> {
        match s {
            "prosecution" => Some(Side::Prosecution),
            "defense" => Some(Side::Defense),
            _ => None,
        }
    }
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A single retained parameter state.
pub trait Draw: Sized + Clone + Send {
    const SIDE: Side;

    fn dim(&self) -> usize;
    fn covariances(&self) -> Vec<&SpdMatrix>;
    fn columns(k: usize) -> Vec<String>;
    fn flatten(&self) -> Vec<f64>;
    fn from_flat(values: &[f64], k: usize) -> Result<Self>;
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpecificDraw {
    pub mu: MeanVector,
    pub sigma: SpdMatrix,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AlternativeDraw {
    pub mu: MeanVector,
    pub sigma_b: SpdMatrix,
    pub sigma_w: SpdMatrix,
}

fn mean_columns(k: usize) -> impl Iterator<Item = String> {
    (1..=k).map(|i| format!("mu_{i}"))
}

fn cov_columns(name: &str, k: usize) -> impl Iterator<Item = String> + '_ {
    (1..=k).flat_map(move |i| (1..=i).map(move |j| format!("{name}_{i}_{j}")))
}

fn tri_len(k: usize) -> usize {
    k * (k + 1) / 2
}

impl Draw for SpecificDraw {
    const SIDE: Side = Side::Prosecution;

    fn dim(&self) -> usize {
        self.mu.dim()
    }

    fn covariances(&self) -> Vec<&SpdMatrix> {
        vec![&self.sigma]
    }

    fn columns(k: usize) -> Vec<String> {
        mean_columns(k).chain(cov_columns("sigma", k)).collect()
    }

    fn flatten(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.mu.iter().copied().collect();
        v.extend(lower_triangle(self.sigma.matrix()));
        v
    }

    fn from_flat(values: &[f64], k: usize) -> Result<Self> {
        if values.len() != k + tri_len(k) {
            return Err(Error::DimensionMismatch {
                expected: k + tri_len(k),
                found: values.len(),
            });
        }
        Ok(SpecificDraw {
            mu: MeanVector::from_slice(&values[..k])?,
            sigma: SpdMatrix::new(from_lower_triangle(&values[k..], k)?)?,
        })
    }
}

impl Draw for AlternativeDraw {
    const SIDE: Side = Side::Defense;

    fn dim(&self) -> usize {
        self.mu.dim()
    }

    fn covariances(&self) -> Vec<&SpdMatrix> {
        vec![&self.sigma_b, &self.sigma_w]
    }

    fn columns(k: usize) -> Vec<String> {
        mean_columns(k)
            .chain(cov_columns("sigma_b", k))
            .chain(cov_columns("sigma_w", k))
            .collect()
    }

    fn flatten(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.mu.iter().copied().collect();
        v.extend(lower_triangle(self.sigma_b.matrix()));
        v.extend(lower_triangle(self.sigma_w.matrix()));
        v
    }

    fn from_flat(values: &[f64], k: usize) -> Result<Self> {
        let t = tri_len(k);
        if values.len() != k + 2 * t {
            return Err(Error::DimensionMismatch {
                expected: k + 2 * t,
                found: values.len(),
            });
        }
        Ok(AlternativeDraw {
            mu: MeanVector::from_slice(&values[..k])?,
            sigma_b: SpdMatrix::new(from_lower_triangle(&values[k..k + t], k)?)?,
            sigma_w: SpdMatrix::new(from_lower_triangle(&values[k + t..], k)?)?,
        })
    }
}

/// Post-burn-in draws from one or more chains, stored chain by chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawSet<D> {
    k: usize,
    settings: McmcSettings,
    draws: Vec<D>,
}

pub type SpecificDrawSet = DrawSet<SpecificDraw>;
pub type AlternativeDrawSet = DrawSet<AlternativeDraw>;

impl<D: Draw> DrawSet<D> {
    /// `draws` must hold `settings.retained_total()` entries in chain order.
    pub fn new(k: usize, settings: McmcSettings, draws: Vec<D>) -> Result<Self> {
        if draws.len() != settings.retained_total() {
            return Err(Error::InvalidSettings(format!(
                "draw count {} does not match {} chains x {} retained",
                draws.len(),
                settings.chains,
                settings.retained_per_chain()
            )));
        }
        if let Some(d) = draws.iter().find(|d| d.dim() != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                found: d.dim(),
            });
        }
        Ok(DrawSet { k, settings, draws })
    }

    pub fn side(&self) -> Side {
        D::SIDE
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn settings(&self) -> &McmcSettings {
        &self.settings
    }

    pub fn draws(&self) -> &[D] {
        &self.draws
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn chains(&self) -> impl Iterator<Item = &[D]> {
        self.draws.chunks(self.settings.retained_per_chain().max(1))
    }

    pub fn write_columnar<W: Write>(&self, mut out: W) -> Result<()> {
        let io = |e| Error::io("<drawset>", e);
        let s = &self.settings;
        writeln!(out, "{MAGIC}").map_err(io)?;
        for (key, value) in [
            ("side", D::SIDE.as_str().to_string()),
            ("k", self.k.to_string()),
            ("chains", s.chains.to_string()),
            ("iterations", s.iterations.to_string()),
            ("burn_in", s.burn_in.to_string()),
            ("thin", s.thin.to_string()),
            ("seed", s.seed.to_string()),
            ("draws", self.draws.len().to_string()),
        ] {
            writeln!(out, "# {key} = {value}").map_err(io)?;
        }
        writeln!(out, "chain,{}", D::columns(self.k).join(",")).map_err(io)?;
        let per_chain = s.retained_per_chain();
        for (i, d) in self.draws.iter().enumerate() {
            let row: Vec<String> = d.flatten().into_iter().map(fmt_f64).collect();
            writeln!(out, "{},{}", i / per_chain, row.join(",")).map_err(io)?;
        }
        out.flush().map_err(io)
    }

    pub fn from_table(table: DrawTable) -> Result<Self> {
        if table.side != D::SIDE {
            return Err(Error::CorruptDrawFile {
                offset: 0,
                reason: format!("expected {} draws, file holds {}", D::SIDE, table.side),
            });
        }
        let draws = table
            .rows
            .iter()
            .map(|r| D::from_flat(r, table.k))
            .collect::<Result<Vec<_>>>()?;
        DrawSet::new(table.k, table.settings, draws)
    }
}

/// Parsed columnar draw file, before conversion to typed draws.
#[derive(Debug, Clone, PartialEq)]
pub struct DrawTable {
    pub side: Side,
    pub k: usize,
    pub settings: McmcSettings,
    pub columns: Vec<String>,
    pub chain_ids: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl DrawTable {
    pub fn column(&self, j: usize) -> Vec<f64> {
        self.rows.iter().map(|r| r[j]).collect()
    }

    /// Values of column `j` split by chain, in file order.
    pub fn column_by_chain(&self, j: usize) -> Vec<Vec<f64>> {
        let mut out: Vec<Vec<f64>> = vec![Vec::new(); self.settings.chains];
        for (row, &c) in self.rows.iter().zip(&self.chain_ids) {
            if let Some(chain) = out.get_mut(c) {
                chain.push(row[j]);
            }
        }
        out
    }
}

fn corrupt(offset: u64, reason: impl Into<String>) -> Error {
    Error::CorruptDrawFile {
        offset,
        reason: reason.into(),
    }
}

/// Reads a columnar draw file. Errors carry the byte offset of the line at
/// fault (or of end-of-file for truncation).
pub fn read_draw_table<R: BufRead>(mut input: R) -> Result<DrawTable> {
    let mut offset: u64 = 0;
    let mut line = String::new();
    let mut next_line = |line: &mut String, offset: &mut u64| -> Result<Option<u64>> {
        line.clear();
        let start = *offset;
        let n = input
            .read_line(line)
            .map_err(|e| corrupt(start, format!("read failed: {e}")))?;
        if n == 0 {
            return Ok(None);
        }
        *offset += n as u64;
        Ok(Some(start))
    };

    match next_line(&mut line, &mut offset)? {
        Some(_) if line.trim_end() == MAGIC => {}
        Some(start) => return Err(corrupt(start, "missing drawset header")),
        None => return Err(corrupt(0, "empty file")),
    }

    let mut meta = std::collections::HashMap::new();
    let header_start;
    loop {
        match next_line(&mut line, &mut offset)? {
            None => return Err(corrupt(offset, "truncated before column header")),
            Some(start) => {
                let t = line.trim_end();
                if let Some(rest) = t.strip_prefix('#') {
                    let (k, v) = rest
                        .split_once('=')
                        .ok_or_else(|| corrupt(start, "malformed metadata line"))?;
                    meta.insert(k.trim().to_string(), (v.trim().to_string(), start));
                } else {
                    header_start = start;
                    break;
                }
            }
        }
    }
    let get = |key: &str| -> Result<(String, u64)> {
        meta.get(key)
            .cloned()
            .ok_or_else(|| corrupt(header_start, format!("missing metadata `{key}`")))
    };
    let num = |key: &str| -> Result<u64> {
        let (v, at) = get(key)?;
        v.parse()
            .map_err(|_| corrupt(at, format!("metadata `{key}` is not an integer")))
    };
    let (side_str, side_at) = get("side")?;
    let side = Side::parse(&side_str).ok_or_else(|| corrupt(side_at, "unknown side"))?;
    let k = num("k")? as usize;
    let settings = McmcSettings {
        iterations: num("iterations")? as usize,
        burn_in: num("burn_in")? as usize,
        thin: num("thin")? as usize,
        seed: num("seed")?,
        chains: num("chains")? as usize,
    };
    let expected_rows = num("draws")? as usize;

    let columns: Vec<String> = line.trim_end().split(',').map(str::to_string).collect();
    if columns.first().map(String::as_str) != Some("chain") {
        return Err(corrupt(header_start, "first column must be `chain`"));
    }
    let columns: Vec<String> = columns[1..].to_vec();
    let expected_cols = match side {
        Side::Prosecution => SpecificDraw::columns(k),
        Side::Defense => AlternativeDraw::columns(k),
    };
    if columns != expected_cols {
        return Err(corrupt(header_start, "column header does not match side and k"));
    }

    let mut rows = Vec::with_capacity(expected_rows);
    let mut chain_ids = Vec::with_capacity(expected_rows);
    while let Some(start) = next_line(&mut line, &mut offset)? {
        if !line.ends_with('\n') {
            return Err(corrupt(start, "truncated row (no line terminator)"));
        }
        let t = line.trim_end();
        if t.is_empty() {
            continue;
        }
        let mut fields = t.split(',');
        let chain: usize = fields
            .next()
            .and_then(|c| c.parse().ok())
            .ok_or_else(|| corrupt(start, "bad chain id"))?;
        let values = fields
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|_| corrupt(start, "non-numeric value"))?;
        if values.len() != columns.len() {
            return Err(corrupt(
                start,
                format!("expected {} values, found {}", columns.len(), values.len()),
            ));
        }
        if chain >= settings.chains {
            return Err(corrupt(start, format!("chain id {chain} out of range")));
        }
        chain_ids.push(chain);
        rows.push(values);
    }
    if rows.len() != expected_rows {
        return Err(corrupt(
            offset,
            format!("expected {expected_rows} draws, found {}", rows.len()),
        ));
    }
    Ok(DrawTable {
        side,
        k,
        settings,
        columns,
        chain_ids,
        rows,
    })
}
