use std::collections::HashMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::MeanVector;
use crate::text::fmt_f64;

/// One measured fragment. `index` is the 1-based fragment number within its source.
#[derive(Debug, Clone, PartialEq)]
pub struct Fragment {
    pub source: String,
    pub index: usize,
    pub features: MeanVector,
}

impl Fragment {
    pub fn new(source: impl Into<String>, index: usize, features: MeanVector) -> Self {
        Fragment {
            source: source.into(),
            index,
            features,
        }
    }

    pub fn key(&self) -> (&str, usize) {
        (&self.source, self.index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SourceGroup {
    pub id: String,
    pub fragments: Vec<Fragment>,
}

impl SourceGroup {
    pub fn len(&self) -> usize {
        self.fragments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fragments.is_empty()
    }

    pub fn features(&self) -> Vec<MeanVector> {
        self.fragments.iter().map(|f| f.features.clone()).collect()
    }
}

/// Fragments grouped by source, in order of first appearance.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub groups: Vec<SourceGroup>,
}

impl Dataset {
    pub fn dim(&self) -> usize {
        self.feature_names.len()
    }

    pub fn group(&self, id: &str) -> Option<&SourceGroup> {
        self.groups.iter().find(|g| g.id == id)
    }

    pub fn fragment_count(&self) -> usize {
        self.groups.iter().map(SourceGroup::len).sum()
    }

    pub fn group_sizes(&self) -> Vec<usize> {
        self.groups.iter().map(SourceGroup::len).collect()
    }

    /// Writes the interchange format; feature values use 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header = vec!["source".to_string(), "fragment".to_string()];
        header.extend(self.feature_names.iter().cloned());
        w.write_record(&header)?;
        for g in &self.groups {
            for f in &g.fragments {
                let mut rec = vec![f.source.clone(), f.index.to_string()];
                rec.extend(f.features.iter().map(|v| fmt_f64(*v)));
                w.write_record(&rec)?;
            }
        }
        w.flush().map_err(|e| Error::io("<dataset>", e))?;
        Ok(())
    }
}

/// Maps file columns onto the data model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ColumnSchema {
    #[serde(default = "default_source_column")]
    pub source_column: String,
    #[serde(default = "default_fragment_column")]
    pub fragment_column: String,
    /// Feature columns, in order. `None` takes every other column.
    #[serde(default)]
    pub features: Option<Vec<String>>,
    /// Replace each feature by its natural log.
    #[serde(default)]
    pub log_transform: bool,
}

fn default_source_column() -> String {
    "source".into()
}

fn default_fragment_column() -> String {
    "fragment".into()
}

impl Default for ColumnSchema {
    fn default() -> Self {
        ColumnSchema {
            source_column: default_source_column(),
            fragment_column: default_fragment_column(),
            features: None,
            log_transform: false,
        }
    }
}

/// Parses `source,fragment,<features...>` text. Rows are numbered as file
/// lines (the header is row 1).
pub fn load_dataset<R: Read>(input: R, schema: &ColumnSchema) -> Result<Dataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(input);
    let headers = reader.headers()?.clone();
    let position = |name: &str| -> Result<usize> {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    };
    let source_col = position(&schema.source_column)?;
    let fragment_col = position(&schema.fragment_column)?;
    let feature_names: Vec<String> = match &schema.features {
        Some(names) => names.clone(),
        None => headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != source_col && *i != fragment_col)
            .map(|(_, h)| h.to_string())
            .collect(),
    };
    if feature_names.is_empty() {
        return Err(Error::MissingColumn("<feature>".into()));
    }
    let feature_cols = feature_names
        .iter()
        .map(|n| position(n))
        .collect::<Result<Vec<_>>>()?;

    let mut groups: Vec<SourceGroup> = Vec::new();
    let mut group_of: HashMap<String, usize> = HashMap::new();
    for (i, record) in reader.records().enumerate() {
        let record = record?;
        let row = i + 2;
        if record.len() != headers.len() {
            return Err(Error::RowWidth {
                row,
                expected: headers.len(),
                found: record.len(),
            });
        }
        let source = record[source_col].to_string();
        let raw_index = &record[fragment_col];
        let index: usize = raw_index
            .parse()
            .ok()
            .filter(|i| *i >= 1)
            .ok_or_else(|| Error::FragmentIndex {
                row,
                value: raw_index.to_string(),
            })?;
        let mut values = Vec::with_capacity(feature_cols.len());
        for (&col, name) in feature_cols.iter().zip(&feature_names) {
            let cell = &record[col];
            let parsed: f64 = cell
                .parse()
                .ok()
                .filter(|v: &f64| v.is_finite())
                .ok_or_else(|| Error::ParseNumber {
                    row,
                    column: name.clone(),
                    value: cell.to_string(),
                })?;
            let value = if schema.log_transform {
                let l = parsed.ln();
                if !l.is_finite() {
                    return Err(Error::ParseNumber {
                        row,
                        column: name.clone(),
                        value: format!("{cell} (log of non-positive value)"),
                    });
                }
                l
            } else {
                parsed
            };
            values.push(value);
        }
        let gi = *group_of.entry(source.clone()).or_insert_with(|| {
            groups.push(SourceGroup {
                id: source.clone(),
                fragments: Vec::new(),
            });
            groups.len() - 1
        });
        if groups[gi].fragments.iter().any(|f| f.index == index) {
            return Err(Error::DuplicateFragment {
                source_id: source,
                fragment: index,
            });
        }
        groups[gi]
            .fragments
            .push(Fragment::new(source, index, MeanVector::from_slice(&values)?));
    }
    if groups.is_empty() {
        return Err(Error::EmptyInput("dataset has no rows"));
    }
    Ok(Dataset {
        feature_names,
        groups,
    })
}
