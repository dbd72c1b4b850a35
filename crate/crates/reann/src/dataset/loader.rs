//! CSV loading against a column schema.
//!
//! Comma delimiter, `.` decimal point, `?` marks a missing value. Rows with
//! any missing value are dropped and counted.

use super::{
    AttrKind, AttributeMeta, AttributeRange, ColumnSpec, Dataset, DatasetConfig, Example, RawValue,
};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::path::Path;

const MISSING: &str = "?";

/// Reads a dataset from `path` using the column schema in `cfg`.
///
/// Returns an unencoded, unsplit dataset; raw class values are mapped to
/// class indices in schema order.
pub fn load_csv<F: Scalar>(path: &Path, cfg: &DatasetConfig) -> Result<Dataset<F>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(cfg.has_header)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_path(path)
        .map_err(|e| Error::Parse {
            line: 0,
            message: format!("cannot open {}: {e}", path.display()),
        })?;

    let mut meta = Vec::new();
    let mut class_names = Vec::new();
    let mut class_values = Vec::new();
    for col in &cfg.columns {
        match col {
            ColumnSpec::Attribute {
                name,
                kind,
                categories,
            } => {
                let range = match kind {
                    AttrKind::Continuous => AttributeRange::Continuous {
                        min: 0.0,
                        max: 0.0,
                        degenerate: false,
                    },
                    AttrKind::Discrete => AttributeRange::Discrete {
                        categories: categories.clone(),
                    },
                };
                meta.push(AttributeMeta {
                    name: name.clone(),
                    kind: range,
                });
            }
            ColumnSpec::Class { classes, .. } => {
                for c in classes {
                    class_names.push(c.label.clone());
                    class_values.push(c.value.clone());
                }
            }
            ColumnSpec::Id { .. } => {}
        }
    }

    let mut examples: Vec<Example<F>> = Vec::new();
    let mut dropped = 0usize;
    let mut raw_rows = 0usize;

    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map(|p| p.line()).unwrap_or(0),
            message: e.to_string(),
        })?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        raw_rows += 1;

        if record.len() != cfg.columns.len() {
            return Err(Error::Parse {
                line,
                message: format!(
                    "expected {} fields, found {}",
                    cfg.columns.len(),
                    record.len()
                ),
            });
        }

        if record.iter().any(|f| f == MISSING) {
            dropped += 1;
            continue;
        }

        let mut raw = Vec::with_capacity(meta.len());
        let mut target = None;
        let mut attr_idx = 0usize;
        for (field, col) in record.iter().zip(&cfg.columns) {
            match col {
                ColumnSpec::Id { .. } => {}
                ColumnSpec::Attribute {
                    name,
                    kind,
                    categories,
                } => {
                    match kind {
                        AttrKind::Continuous => {
                            let x: f64 = field.parse().map_err(|_| Error::Parse {
                                line,
                                message: format!("attribute {name}: `{field}` is not a number"),
                            })?;
                            raw.push(RawValue::Num(x));
                        }
                        AttrKind::Discrete => {
                            let idx =
                                categories.iter().position(|c| c == field).ok_or_else(|| {
                                    Error::Schema(format!(
                                        "line {line}: attribute {name}: unknown category `{field}`"
                                    ))
                                })?;
                            raw.push(RawValue::Cat(idx));
                        }
                    }
                    attr_idx += 1;
                }
                ColumnSpec::Class { .. } => {
                    let idx = class_values
                        .iter()
                        .position(|v| v == field)
                        .ok_or_else(|| {
                            Error::Schema(format!("line {line}: unknown class label `{field}`"))
                        })?;
                    target = Some(idx);
                }
            }
        }
        let _ = attr_idx;
        let target = target.ok_or_else(|| Error::Parse {
            line,
            message: "row has no class value".into(),
        })?;
        examples.push(Example {
            raw,
            inputs: Vec::new(),
            target,
        });
    }

    if examples.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: format!("{}: no usable data rows", path.display()),
        });
    }

    Ok(Dataset {
        meta,
        class_names,
        examples,
        split: None,
        encoded_width: 0,
        encoding: Vec::new(),
        dropped_rows: dropped,
        raw_rows,
    })
}
