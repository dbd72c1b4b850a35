//! Discrete tables that rule extraction operates on.
//!
//! A column is either categorical or continuous; continuous columns carry
//! precomputed candidate thresholds at class-boundary midpoints.

use crate::dataset::RawValue;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cell {
    Cat(usize),
    Num(f64),
}

impl Cell {
    pub fn to_raw(self) -> RawValue {
        match self {
            Cell::Cat(c) => RawValue::Cat(c),
            Cell::Num(x) => RawValue::Num(x),
        }
    }
}

#[derive(Debug, Clone)]
pub enum ColumnKind {
    Discrete { n_values: usize },
    Continuous { thresholds: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct RexColumn {
    /// Attribute identity the column stands for (original attribute index,
    /// or hidden-unit index for cluster tables).
    pub attr: usize,
    pub kind: ColumnKind,
}

/// Rows, column descriptors, and a class per row.
#[derive(Debug, Clone)]
pub struct RexTable {
    pub columns: Vec<RexColumn>,
    pub rows: Vec<Vec<Cell>>,
    pub classes: Vec<usize>,
    pub n_classes: usize,
}

impl RexTable {
    pub fn new(
        columns: Vec<RexColumn>,
        rows: Vec<Vec<Cell>>,
        classes: Vec<usize>,
        n_classes: usize,
    ) -> Self {
        debug_assert_eq!(rows.len(), classes.len());
        debug_assert!(rows.iter().all(|r| r.len() == columns.len()));
        RexTable {
            columns,
            rows,
            classes,
            n_classes,
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn col_of_attr(&self, attr: usize) -> Option<usize> {
        self.columns.iter().position(|c| c.attr == attr)
    }

    /// Converts a table row into attribute-indexed raw values so rules can
    /// be evaluated with their public semantics. Attributes not present in
    /// the table are filled with a sentinel that matches no condition.
    pub fn row_as_raw(&self, row: &[Cell], n_attrs: usize) -> Vec<RawValue> {
        let mut raw = vec![RawValue::Num(f64::NAN); n_attrs];
        for (col, cell) in self.columns.iter().zip(row) {
            raw[col.attr] = cell.to_raw();
        }
        raw
    }

    /// Largest attribute index referenced by the columns, plus one.
    pub fn attr_span(&self) -> usize {
        self.columns.iter().map(|c| c.attr + 1).max().unwrap_or(0)
    }
}

/// Candidate thresholds for one continuous column: midpoints between
/// adjacent distinct sorted values whose surrounding class sets differ.
pub fn boundary_thresholds(values: &[f64], classes: &[usize]) -> Vec<f64> {
    debug_assert_eq!(values.len(), classes.len());
    let mut pairs: Vec<(f64, usize)> = values
        .iter()
        .copied()
        .zip(classes.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)));

    // Group by distinct value, collecting the class set of each group.
    let mut groups: Vec<(f64, Vec<usize>)> = Vec::new();
    for (v, c) in pairs {
        match groups.last_mut() {
            Some((gv, set)) if *gv == v => {
                if !set.contains(&c) {
                    set.push(c);
                }
            }
            _ => groups.push((v, vec![c])),
        }
    }

    let mut thresholds = Vec::new();
    for pair in groups.windows(2) {
        let (lo, lo_classes) = &pair[0];
        let (hi, hi_classes) = &pair[1];
        let uniform_single = lo_classes.len() == 1 && hi_classes == lo_classes;
        if !uniform_single {
            thresholds.push((lo + hi) / 2.0);
        }
    }
    thresholds
}
