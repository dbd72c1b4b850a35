//! REx: induction of compact conjunctive rules from discrete tables.
//!
//! Three phases: extraction covers every pattern with shortest sufficient
//! conjunctions chosen by first-order discriminating power; clustering
//! groups rules by consequent class; pruning generalizes rules, removes
//! redundant ones, absorbs one class into a default rule, and orders the
//! result by support. A second entry point composes two rule layers:
//! output-versus-cluster rules over per-unit cluster-versus-input rules.

mod extract;
mod merge;
mod prune;
mod table;

pub use extract::{condition_score, extract_rules};
pub use merge::merge_rule_layers;
pub use prune::{choose_default, cluster_rules, prune_rules};
pub use table::{boundary_thresholds, Cell, ColumnKind, RexColumn, RexTable};

use crate::dataset::{AttributeMeta, AttributeRange, RawValue};
use serde::{Deserialize, Serialize};

/// Engine knobs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RexConfig {
    /// Rules with support at or below this are dropped (0 disables).
    #[serde(default)]
    pub noise_threshold: usize,
    /// Hard cap on intermediate rules produced by layer merging.
    #[serde(default = "default_dnf_cap")]
    pub dnf_cap: usize,
}

fn default_dnf_cap() -> usize {
    10_000
}

impl Default for RexConfig {
    fn default() -> Self {
        RexConfig {
            noise_threshold: 0,
            dnf_cap: default_dnf_cap(),
        }
    }
}

/// A single test on one attribute, in original attribute units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "test", rename_all = "lowercase")]
pub enum Test {
    /// Discrete attribute equals the category with this index.
    Equals { category: usize },
    /// Continuous attribute at or below the threshold.
    Le { threshold: f64 },
    /// Continuous attribute at or above the threshold.
    Ge { threshold: f64 },
    /// Continuous attribute within [lo, hi].
    Within { lo: f64, hi: f64 },
}

/// Condition on one original attribute.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Condition {
    /// Original (pre-encoding) attribute index.
    pub attr: usize,
    #[serde(flatten)]
    pub test: Test,
}

impl Condition {
    pub fn holds(&self, row: &[RawValue]) -> bool {
        match (&self.test, row[self.attr]) {
            (Test::Equals { category }, RawValue::Cat(c)) => c == *category,
            (Test::Le { threshold }, RawValue::Num(x)) => x <= *threshold,
            (Test::Ge { threshold }, RawValue::Num(x)) => x >= *threshold,
            (Test::Within { lo, hi }, RawValue::Num(x)) => *lo <= x && x <= *hi,
            _ => false,
        }
    }
}

/// Conjunction of conditions implying a class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub conditions: Vec<Condition>,
    pub class: usize,
    /// Training patterns matched.
    #[serde(default)]
    pub support: usize,
    /// Matched patterns of a different class.
    #[serde(default)]
    pub misfires: usize,
}

impl Rule {
    pub fn matches(&self, row: &[RawValue]) -> bool {
        self.conditions.iter().all(|c| c.holds(row))
    }
}

/// Ordered rule list with a fallback class; evaluation is first-match.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub rules: Vec<Rule>,
    /// `None` only transiently, before the default has been determined.
    pub default_class: Option<usize>,
}

impl RuleSet {
    /// First matching rule's class, or the default.
    pub fn classify(&self, row: &[RawValue]) -> usize {
        for rule in &self.rules {
            if rule.matches(row) {
                return rule.class;
            }
        }
        self.default_class.unwrap_or(0)
    }

    pub fn accuracy(&self, rows: &[Vec<RawValue>], classes: &[usize]) -> f64 {
        if rows.is_empty() {
            return 0.0;
        }
        let correct = rows
            .iter()
            .zip(classes)
            .filter(|(row, &class)| self.classify(row) == class)
            .count();
        correct as f64 / rows.len() as f64
    }
}

/// Merges two tests on the same attribute; `None` means contradiction.
pub(crate) fn conjoin_tests(a: &Test, b: &Test) -> Option<Test> {
    use Test::*;
    let interval = |t: &Test| -> Option<(f64, f64)> {
        match t {
            Le { threshold } => Some((f64::NEG_INFINITY, *threshold)),
            Ge { threshold } => Some((*threshold, f64::INFINITY)),
            Within { lo, hi } => Some((*lo, *hi)),
            Equals { .. } => None,
        }
    };
    match (a, b) {
        (Equals { category: x }, Equals { category: y }) => {
            (x == y).then_some(Equals { category: *x })
        }
        (Equals { .. }, _) | (_, Equals { .. }) => None,
        _ => {
            let (alo, ahi) = interval(a).unwrap();
            let (blo, bhi) = interval(b).unwrap();
            let lo = alo.max(blo);
            let hi = ahi.min(bhi);
            if lo > hi {
                None
            } else if lo == f64::NEG_INFINITY {
                Some(Le { threshold: hi })
            } else if hi == f64::INFINITY {
                Some(Ge { threshold: lo })
            } else {
                Some(Within { lo, hi })
            }
        }
    }
}

/// Conjoins condition lists, merging per attribute; `None` on contradiction.
pub(crate) fn conjoin_conditions(
    base: &[Condition],
    extra: &[Condition],
) -> Option<Vec<Condition>> {
    let mut out: Vec<Condition> = base.to_vec();
    for cond in extra {
        if let Some(existing) = out.iter_mut().find(|c| c.attr == cond.attr) {
            let merged = conjoin_tests(&existing.test, &cond.test)?;
            existing.test = merged;
        } else {
            out.push(cond.clone());
        }
    }
    Some(out)
}

/// Renders a rule set in the report style:
/// `Rule 1: If <attr> <op> <value> and ... then <class>` lines followed by
/// `Default Rule: <class>`.
pub fn render_text(rs: &RuleSet, meta: &[AttributeMeta], class_names: &[String]) -> String {
    let mut out = String::new();
    for (i, rule) in rs.rules.iter().enumerate() {
        out.push_str(&format!("Rule {}: If ", i + 1));
        let mut first = true;
        for cond in &rule.conditions {
            let name = &meta[cond.attr].name;
            let clauses: Vec<String> = match &cond.test {
                Test::Equals { category } => {
                    let label = match &meta[cond.attr].kind {
                        AttributeRange::Discrete { categories } => categories[*category].clone(),
                        _ => category.to_string(),
                    };
                    vec![format!("{name} = {label}")]
                }
                Test::Le { threshold } => vec![format!("{name} <= {threshold}")],
                Test::Ge { threshold } => vec![format!("{name} >= {threshold}")],
                Test::Within { lo, hi } => {
                    vec![format!("{name} >= {lo}"), format!("{name} <= {hi}")]
                }
            };
            for clause in clauses {
                if !first {
                    out.push_str(" and ");
                }
                out.push_str(&clause);
                first = false;
            }
        }
        out.push_str(&format!(" then {}\n", class_names[rule.class]));
    }
    let default = rs.default_class.unwrap_or(0);
    out.push_str(&format!("Default Rule: {}\n", class_names[default]));
    out
}
