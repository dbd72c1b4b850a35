//! Tabular classification data: loading, encoding, and splitting.
//!
//! A dataset is loaded from CSV against a column schema, rows with missing
//! values are dropped, a positional train/test split is fixed, and then
//! attributes are encoded: continuous values map affinely onto `[0, 1]`
//! using ranges observed on the training split, discrete values expand into
//! one-of-c indicator slots. Raw values are retained alongside the encoded
//! inputs so extracted rules can be reported in original attribute units.

mod loader;

pub use loader::load_csv;

use crate::error::{Error, Result};
use crate::scalar::{lit, to_f64, Scalar};
use serde::{Deserialize, Serialize};
use std::ops::Range;
use std::path::PathBuf;

/// Attribute kind as declared in the schema.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttrKind {
    Continuous,
    Discrete,
}

/// One column of the CSV file.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "lowercase")]
pub enum ColumnSpec {
    /// Identifier column, ignored for learning.
    Id { name: String },
    /// Input attribute.
    Attribute {
        name: String,
        kind: AttrKind,
        /// Category labels for discrete attributes, in encoding order.
        #[serde(default)]
        categories: Vec<String>,
    },
    /// Class label column.
    Class {
        name: String,
        classes: Vec<ClassSpec>,
    },
}

/// Maps a raw class value in the file to a display label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassSpec {
    pub value: String,
    pub label: String,
}

/// How the train/test split is formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitMode {
    /// First half trains, second half tests.
    Half,
    /// Train and test are both the full dataset (tiny benchmark tables).
    Full,
}

/// Sidecar schema plus file location for one dataset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub path: PathBuf,
    #[serde(default)]
    pub has_header: bool,
    pub split: SplitMode,
    pub columns: Vec<ColumnSpec>,
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<()> {
        let mut class_cols = 0usize;
        let mut attrs = 0usize;
        for col in &self.columns {
            match col {
                ColumnSpec::Class { classes, name } => {
                    class_cols += 1;
                    if classes.len() < 2 {
                        return Err(Error::Config(format!(
                            "class column {name} needs at least two classes"
                        )));
                    }
                }
                ColumnSpec::Attribute {
                    name,
                    kind,
                    categories,
                } => {
                    attrs += 1;
                    if *kind == AttrKind::Discrete {
                        if categories.len() < 2 {
                            return Err(Error::Config(format!(
                                "discrete attribute {name} needs at least two categories"
                            )));
                        }
                        let mut seen = categories.clone();
                        seen.sort();
                        seen.dedup();
                        if seen.len() != categories.len() {
                            return Err(Error::Config(format!(
                                "discrete attribute {name} has duplicate categories"
                            )));
                        }
                    } else if !categories.is_empty() {
                        return Err(Error::Config(format!(
                            "continuous attribute {name} must not list categories"
                        )));
                    }
                }
                ColumnSpec::Id { .. } => {}
            }
        }
        if class_cols != 1 {
            return Err(Error::Config(format!(
                "schema must declare exactly one class column, found {class_cols}"
            )));
        }
        if attrs == 0 {
            return Err(Error::Config("schema declares no attributes".into()));
        }
        Ok(())
    }
}

/// Metadata for one original (pre-encoding) attribute.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AttributeMeta {
    pub name: String,
    pub kind: AttributeRange,
}

/// Observed range or category list, filled in by [`encode_and_normalize`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AttributeRange {
    Continuous {
        min: f64,
        max: f64,
        /// True when min == max on the training split; the attribute encodes
        /// to a constant 0 and is a removal candidate.
        degenerate: bool,
    },
    Discrete {
        categories: Vec<String>,
    },
}

impl AttributeMeta {
    pub fn is_continuous(&self) -> bool {
        matches!(self.kind, AttributeRange::Continuous { .. })
    }
}

/// A raw attribute value as read from the file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RawValue {
    Num(f64),
    /// Index into the attribute's category list.
    Cat(usize),
}

/// One example: raw values, encoded inputs, and its class.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct Example<F: Scalar> {
    pub raw: Vec<RawValue>,
    pub inputs: Vec<F>,
    /// Class index, 0-based.
    pub target: usize,
}

impl<F: Scalar> Example<F> {
    /// One-hot target vector of length `o`.
    pub fn target_vector(&self, o: usize) -> Vec<F> {
        let mut t = vec![F::zero(); o];
        t[self.target] = F::one();
        t
    }
}

/// Where each attribute lands in the encoded input vector.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EncodedSlot {
    pub offset: usize,
    pub width: usize,
}

/// A loaded (and possibly encoded) dataset.
#[derive(Debug, Clone)]
pub struct Dataset<F: Scalar> {
    pub meta: Vec<AttributeMeta>,
    pub class_names: Vec<String>,
    pub examples: Vec<Example<F>>,
    pub split: Option<Split>,
    /// Encoded input width; 0 until encoded.
    pub encoded_width: usize,
    /// Per-attribute encoded location; empty until encoded.
    pub encoding: Vec<EncodedSlot>,
    /// Rows dropped at load time because of missing values.
    pub dropped_rows: usize,
    /// Rows present in the file, including dropped ones.
    pub raw_rows: usize,
}

/// Positional index ranges into `examples`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Range<usize>,
    pub test: Range<usize>,
}

impl<F: Scalar> Dataset<F> {
    pub fn k(&self) -> usize {
        self.examples.len()
    }

    pub fn n_classes(&self) -> usize {
        self.class_names.len()
    }

    pub fn train(&self) -> &[Example<F>] {
        let s = self.split.as_ref().expect("split not set");
        &self.examples[s.train.clone()]
    }

    pub fn test(&self) -> &[Example<F>] {
        let s = self.split.as_ref().expect("split not set");
        &self.examples[s.test.clone()]
    }

    /// Decodes one encoded slot group back to an approximate raw value.
    pub fn decode(&self, attr: usize, encoded: &[F]) -> RawValue {
        let slot = self.encoding[attr];
        let vals = &encoded[slot.offset..slot.offset + slot.width];
        match &self.meta[attr].kind {
            AttributeRange::Continuous { min, max, .. } => {
                RawValue::Num(min + to_f64(vals[0]) * (max - min))
            }
            AttributeRange::Discrete { .. } => {
                let mut best = 0usize;
                for (i, v) in vals.iter().enumerate() {
                    if *v > vals[best] {
                        best = i;
                    }
                }
                RawValue::Cat(best)
            }
        }
    }
}

/// Fixes the positional half split: first ⌈k/2⌉ rows train, the rest test.
pub fn split_half<F: Scalar>(mut data: Dataset<F>) -> Dataset<F> {
    let k = data.k();
    let mid = k.div_ceil(2);
    data.split = Some(Split {
        train: 0..mid,
        test: mid..k,
    });
    data
}

/// Train and test both cover the full dataset.
pub fn split_full<F: Scalar>(mut data: Dataset<F>) -> Dataset<F> {
    let k = data.k();
    data.split = Some(Split {
        train: 0..k,
        test: 0..k,
    });
    data
}

/// Applies the configured split mode.
pub fn apply_split<F: Scalar>(data: Dataset<F>, mode: SplitMode) -> Dataset<F> {
    match mode {
        SplitMode::Half => split_half(data),
        SplitMode::Full => split_full(data),
    }
}

/// Encodes raw values into network inputs.
///
/// Continuous attribute ranges come from the training split only and are
/// reused unchanged on the test split; encoded values are clamped to
/// `[0, 1]`. Discrete attributes expand to one-of-c indicator slots.
pub fn encode_and_normalize<F: Scalar>(mut data: Dataset<F>) -> Result<Dataset<F>> {
    let split = data
        .split
        .clone()
        .ok_or_else(|| Error::InvalidState("encode requires the split to be fixed first".into()))?;

    // Observed ranges on the training rows.
    for (a, meta) in data.meta.iter_mut().enumerate() {
        if let AttributeRange::Continuous {
            min,
            max,
            degenerate,
        } = &mut meta.kind
        {
            let mut lo = f64::INFINITY;
            let mut hi = f64::NEG_INFINITY;
            for ex in &data.examples[split.train.clone()] {
                if let RawValue::Num(x) = ex.raw[a] {
                    lo = lo.min(x);
                    hi = hi.max(x);
                }
            }
            if !lo.is_finite() || !hi.is_finite() {
                return Err(Error::Schema(format!(
                    "continuous attribute {} has no training values",
                    meta.name
                )));
            }
            *min = lo;
            *max = hi;
            *degenerate = lo == hi;
        }
    }

    // Slot layout.
    let mut encoding = Vec::with_capacity(data.meta.len());
    let mut offset = 0usize;
    for meta in &data.meta {
        let width = match &meta.kind {
            AttributeRange::Continuous { .. } => 1,
            AttributeRange::Discrete { categories } => categories.len(),
        };
        encoding.push(EncodedSlot { offset, width });
        offset += width;
    }
    data.encoding = encoding;
    data.encoded_width = offset;

    for ex in &mut data.examples {
        let mut inputs = vec![F::zero(); offset];
        for (a, meta) in data.meta.iter().enumerate() {
            let slot = data.encoding[a];
            match (&meta.kind, ex.raw[a]) {
                (
                    AttributeRange::Continuous {
                        min,
                        max,
                        degenerate,
                    },
                    RawValue::Num(x),
                ) => {
                    let enc = if *degenerate {
                        0.0
                    } else {
                        ((x - min) / (max - min)).clamp(0.0, 1.0)
                    };
                    inputs[slot.offset] = lit(enc);
                }
                (AttributeRange::Discrete { .. }, RawValue::Cat(c)) => {
                    inputs[slot.offset + c] = F::one();
                }
                _ => {
                    return Err(Error::Schema(format!(
                        "value/kind mismatch for attribute {}",
                        meta.name
                    )))
                }
            }
        }
        ex.inputs = inputs;
    }
    Ok(data)
}

/// Load, split, and encode in one step.
pub fn load_prepared<F: Scalar>(path: &std::path::Path, cfg: &DatasetConfig) -> Result<Dataset<F>> {
    cfg.validate()?;
    let raw = load_csv::<F>(path, cfg)?;
    let split = apply_split(raw, cfg.split);
    encode_and_normalize(split)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn continuous_meta(name: &str) -> AttributeMeta {
        AttributeMeta {
            name: name.into(),
            kind: AttributeRange::Continuous {
                min: 0.0,
                max: 0.0,
                degenerate: false,
            },
        }
    }

    fn dataset_from_rows(
        rows: Vec<(Vec<RawValue>, usize)>,
        meta: Vec<AttributeMeta>,
    ) -> Dataset<f64> {
        Dataset {
            meta,
            class_names: vec!["a".into(), "b".into()],
            examples: rows
                .into_iter()
                .map(|(raw, target)| Example {
                    raw,
                    inputs: vec![],
                    target,
                })
                .collect(),
            split: None,
            encoded_width: 0,
            encoding: vec![],
            dropped_rows: 0,
            raw_rows: 0,
        }
    }

    #[test]
    fn affine_encoding_of_continuous_value() {
        let rows = (1..=10)
            .map(|x| (vec![RawValue::Num(x as f64)], (x > 5) as usize))
            .collect();
        let data = dataset_from_rows(rows, vec![continuous_meta("a1")]);
        let data = encode_and_normalize(split_full(data)).unwrap();
        // raw 6 with min 1, max 10 maps to 5/9
        assert!((data.examples[5].inputs[0] - 5.0 / 9.0).abs() < 1e-12);
        // raw value equal to min maps to 0
        assert_eq!(data.examples[0].inputs[0], 0.0);
    }

    #[test]
    fn one_of_c_encoding() {
        let meta = AttributeMeta {
            name: "tree".into(),
            kind: AttributeRange::Discrete {
                categories: vec!["green".into(), "yellow".into(), "leafless".into()],
            },
        };
        let data = dataset_from_rows(vec![(vec![RawValue::Cat(1)], 0)], vec![meta]);
        let data = encode_and_normalize(split_full(data)).unwrap();
        assert_eq!(data.examples[0].inputs, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn degenerate_continuous_encodes_to_zero_and_is_flagged() {
        let rows = vec![(vec![RawValue::Num(4.0)], 0), (vec![RawValue::Num(4.0)], 1)];
        let data = dataset_from_rows(rows, vec![continuous_meta("a1")]);
        let data = encode_and_normalize(split_full(data)).unwrap();
        assert_eq!(data.examples[0].inputs[0], 0.0);
        match data.meta[0].kind {
            AttributeRange::Continuous { degenerate, .. } => assert!(degenerate),
            _ => unreachable!(),
        }
    }

    #[test]
    fn half_split_sizes() {
        let rows = (0..699)
            .map(|i| (vec![RawValue::Num(i as f64)], i % 2))
            .collect();
        let data = dataset_from_rows(rows, vec![continuous_meta("a1")]);
        let data = split_half(data);
        let s = data.split.clone().unwrap();
        assert_eq!(s.train.len(), 350);
        assert_eq!(s.test.len(), 349);

        let rows = (0..2).map(|i| (vec![RawValue::Num(i as f64)], i)).collect();
        let tiny = split_half(dataset_from_rows(rows, vec![continuous_meta("a1")]));
        let s = tiny.split.clone().unwrap();
        assert_eq!((s.train.len(), s.test.len()), (1, 1));
    }

    #[test]
    fn full_split_covers_everything_twice() {
        let rows = (0..11)
            .map(|i| (vec![RawValue::Num(i as f64)], i % 2))
            .collect();
        let data = split_full(dataset_from_rows(rows, vec![continuous_meta("a1")]));
        let s = data.split.clone().unwrap();
        assert_eq!(s.train.len(), 11);
        assert_eq!(s.test.len(), 11);
    }

    #[test]
    fn normalization_params_come_from_train_split_only() {
        // Test rows exceed the training range and must clamp.
        let rows = vec![
            (vec![RawValue::Num(0.0)], 0),
            (vec![RawValue::Num(10.0)], 1),
            (vec![RawValue::Num(20.0)], 1),
        ];
        let data = dataset_from_rows(rows, vec![continuous_meta("a1")]);
        let mut data = data;
        data.split = Some(Split {
            train: 0..2,
            test: 2..3,
        });
        let data = encode_and_normalize(data).unwrap();
        assert_eq!(data.examples[2].inputs[0], 1.0);
        match data.meta[0].kind {
            AttributeRange::Continuous { min, max, .. } => {
                assert_eq!((min, max), (0.0, 10.0));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn decode_inverts_encoding_within_quantum() {
        let rows = (1..=10)
            .map(|x| (vec![RawValue::Num(x as f64)], (x > 5) as usize))
            .collect();
        let data = dataset_from_rows(rows, vec![continuous_meta("a1")]);
        let data = encode_and_normalize(split_full(data)).unwrap();
        for ex in &data.examples {
            let RawValue::Num(orig) = ex.raw[0] else {
                unreachable!()
            };
            let RawValue::Num(dec) = data.decode(0, &ex.inputs) else {
                unreachable!()
            };
            assert!((orig - dec).abs() < 1e-9);
        }
    }
}
