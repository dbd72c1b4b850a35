//! Composition of the two rule layers into input-level rules.

use super::prune::prune_rules;
use super::table::RexTable;
use super::{conjoin_conditions, Rule, RuleSet, Test};
use crate::error::{Error, Result};

/// Substitutes each hidden-layer condition `unit m = cluster c` with that
/// unit's input-level rules for cluster `c`, expands the cross products to
/// plain conjunctions, and prunes the combined set against `table`.
///
/// `input_rules[m][c]` holds the rules describing when unit `m` falls in
/// cluster `c`, with conditions over original attributes. Clusters with no
/// input-level rule drop their branches. The intermediate rule count is
/// capped; beyond the cap the expansion is abandoned with an error.
pub fn merge_rule_layers(
    hidden_rules: &RuleSet,
    input_rules: &[Vec<Vec<Rule>>],
    table: &RexTable,
    noise_threshold: usize,
    dnf_cap: usize,
) -> Result<RuleSet> {
    let mut merged: Vec<Rule> = Vec::new();

    for hidden_rule in &hidden_rules.rules {
        // Each condition must name a unit and one of its clusters.
        let mut branch_sets: Vec<&[Rule]> = Vec::new();
        let mut dead_branch = false;
        for cond in &hidden_rule.conditions {
            let unit = cond.attr;
            let cluster = match cond.test {
                Test::Equals { category } => category,
                _ => {
                    return Err(Error::InvalidState(
                        "hidden-layer rules must use equality conditions".into(),
                    ))
                }
            };
            let rules = input_rules
                .get(unit)
                .and_then(|per_cluster| per_cluster.get(cluster))
                .map(|v| v.as_slice())
                .unwrap_or(&[]);
            if rules.is_empty() {
                eprintln!(
                    "warning: unit {unit} cluster {cluster} has no input-level rule; dropping branch"
                );
                dead_branch = true;
                break;
            }
            branch_sets.push(rules);
        }
        if dead_branch {
            continue;
        }

        // Cross product of the per-condition rule lists.
        let mut partials: Vec<Vec<super::Condition>> = vec![Vec::new()];
        for rules in branch_sets {
            let mut next = Vec::new();
            for partial in &partials {
                for rule in rules {
                    if let Some(conds) = conjoin_conditions(partial, &rule.conditions) {
                        next.push(conds);
                    }
                }
            }
            partials = next;
            if merged.len() + partials.len() > dnf_cap {
                return Err(Error::RuleExplosion {
                    count: merged.len() + partials.len(),
                    cap: dnf_cap,
                });
            }
        }

        for conditions in partials {
            if conditions.is_empty() {
                continue;
            }
            merged.push(Rule {
                conditions,
                class: hidden_rule.class,
                support: 0,
                misfires: 0,
            });
        }
    }

    let grouped = super::prune::cluster_rules(merged);
    Ok(prune_rules(grouped, table, noise_threshold))
}
