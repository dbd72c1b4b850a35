//! Rule clustering, pruning, and default-rule selection.

use super::extract::{cover, recount};
use super::table::RexTable;
use super::{Rule, RuleSet};

/// Stable partition of rules by consequent class, ascending class index,
/// original order preserved within each group.
pub fn cluster_rules(rules: Vec<Rule>) -> RuleSet {
    let mut classes: Vec<usize> = rules.iter().map(|r| r.class).collect();
    classes.sort_unstable();
    classes.dedup();
    let mut grouped = Vec::with_capacity(rules.len());
    for class in classes {
        for rule in rules.iter().filter(|r| r.class == class) {
            grouped.push(rule.clone());
        }
    }
    RuleSet {
        rules: grouped,
        default_class: None,
    }
}

/// Majority class among patterns matched by no rule; if every pattern is
/// matched, the majority class of the whole table. Ties break low.
pub fn choose_default(rs: &RuleSet, table: &RexTable) -> usize {
    let n_attrs = table.attr_span();
    let mut unmatched_counts = vec![0usize; table.n_classes];
    let mut total_counts = vec![0usize; table.n_classes];
    for (row, &class) in table.rows.iter().zip(&table.classes) {
        total_counts[class] += 1;
        let raw = table.row_as_raw(row, n_attrs);
        if !rs.rules.iter().any(|r| r.matches(&raw)) {
            unmatched_counts[class] += 1;
        }
    }
    let counts = if unmatched_counts.iter().any(|&c| c > 0) {
        &unmatched_counts
    } else {
        &total_counts
    };
    let mut best = 0usize;
    for (c, &count) in counts.iter().enumerate() {
        if count > counts[best] {
            best = c;
        }
    }
    best
}

fn list_accuracy(rules: &[Rule], default: usize, table: &RexTable) -> f64 {
    let n_attrs = table.attr_span();
    if table.is_empty() {
        return 0.0;
    }
    let mut correct = 0usize;
    for (row, &class) in table.rows.iter().zip(&table.classes) {
        let raw = table.row_as_raw(row, n_attrs);
        let predicted = rules
            .iter()
            .find(|r| r.matches(&raw))
            .map(|r| r.class)
            .unwrap_or(default);
        if predicted == class {
            correct += 1;
        }
    }
    correct as f64 / table.len() as f64
}

/// Generalize, deduplicate, drop noise rules, absorb one class into the
/// default, and order by descending support.
///
/// Steps, in order, each rolled back when it would cost training accuracy:
/// (a) drop any condition whose removal keeps the rule's misfires at zero;
/// (b) drop any rule whose cover is a subset of an earlier same-class
/// rule's cover; (c) drop rules at or below the noise support threshold;
/// (d) pick the class whose rules carry the most conditions among those
/// whose wholesale removal preserves accuracy, drop its rules, and make it
/// the default.
pub fn prune_rules(rs: RuleSet, table: &RexTable, noise_threshold: usize) -> RuleSet {
    let n_attrs = table.attr_span();
    let mut rules = rs.rules;

    // (a) generalization: drop conditions, and weaken interval conditions
    // to single bounds, whenever misfires stay at zero.
    let misfire_count = |trial: &Rule| {
        table
            .rows
            .iter()
            .zip(&table.classes)
            .filter(|(row, &class)| {
                class != trial.class && trial.matches(&table.row_as_raw(row, n_attrs))
            })
            .count()
    };
    for rule in rules.iter_mut() {
        let mut i = 0usize;
        while i < rule.conditions.len() {
            if rule.conditions.len() > 1 {
                let mut trial = rule.clone();
                trial.conditions.remove(i);
                if misfire_count(&trial) == 0 {
                    rule.conditions.remove(i);
                    continue;
                }
            }
            if let super::Test::Within { lo, hi } = rule.conditions[i].test {
                let mut le = rule.clone();
                le.conditions[i].test = super::Test::Le { threshold: hi };
                if misfire_count(&le) == 0 {
                    rule.conditions[i].test = super::Test::Le { threshold: hi };
                } else {
                    let mut ge = rule.clone();
                    ge.conditions[i].test = super::Test::Ge { threshold: lo };
                    if misfire_count(&ge) == 0 {
                        rule.conditions[i].test = super::Test::Ge { threshold: lo };
                    }
                }
            }
            i += 1;
        }
    }
    recount(&mut rules, table);

    // (b) same-class cover subsumption; earlier (more general after (a))
    // rules absorb later ones.
    let covers: Vec<Vec<usize>> = rules.iter().map(|r| cover(r, table)).collect();
    let mut keep = vec![true; rules.len()];
    for j in 0..rules.len() {
        for i in 0..rules.len() {
            if i == j || !keep[i] || !keep[j] || rules[i].class != rules[j].class {
                continue;
            }
            let subset = covers[j].iter().all(|r| covers[i].contains(r));
            let proper_or_earlier = covers[i].len() > covers[j].len() || i < j;
            if subset && proper_or_earlier {
                keep[j] = false;
                break;
            }
        }
    }
    let mut rules: Vec<Rule> = rules
        .into_iter()
        .zip(&keep)
        .filter_map(|(r, &k)| k.then_some(r))
        .collect();

    // (c) noise rules
    if noise_threshold > 0 {
        let baseline_default = choose_default(
            &RuleSet {
                rules: rules.clone(),
                default_class: None,
            },
            table,
        );
        let baseline = list_accuracy(&rules, baseline_default, table);
        let mut i = 0usize;
        while i < rules.len() {
            if rules[i].support <= noise_threshold {
                let mut trial = rules.clone();
                trial.remove(i);
                let default = choose_default(
                    &RuleSet {
                        rules: trial.clone(),
                        default_class: None,
                    },
                    table,
                );
                if list_accuracy(&trial, default, table) >= baseline {
                    rules = trial;
                    continue;
                }
            }
            i += 1;
        }
    }

    recount(&mut rules, table);

    // Order by descending support before fixing the default; evaluation is
    // first-match.
    rules.sort_by_key(|r| std::cmp::Reverse(r.support));

    // (d) default absorption
    let baseline_default = choose_default(
        &RuleSet {
            rules: rules.clone(),
            default_class: None,
        },
        table,
    );
    let baseline_accuracy = list_accuracy(&rules, baseline_default, table);

    let mut best: Option<(usize, usize, usize, usize)> = None;
    let mut best_candidate: Option<(Vec<Rule>, usize)> = None;
    for class in 0..table.n_classes {
        let dropped: Vec<&Rule> = rules.iter().filter(|r| r.class == class).collect();
        if dropped.is_empty() {
            continue;
        }
        let remaining: Vec<Rule> = rules.iter().filter(|r| r.class != class).cloned().collect();
        if list_accuracy(&remaining, class, table) < baseline_accuracy {
            continue;
        }
        let conds_dropped: usize = dropped.iter().map(|r| r.conditions.len()).sum();
        let support_dropped: usize = dropped.iter().map(|r| r.support).sum();
        let rules_dropped = dropped.len();
        // The default absorbs the most conditions; ties prefer absorbing
        // the most specific (least-covering) side, then fewer rules.
        let key = (
            conds_dropped,
            usize::MAX - support_dropped,
            usize::MAX - rules_dropped,
            usize::MAX - class,
        );
        if best.map(|b| key > b).unwrap_or(true) {
            best = Some(key);
            best_candidate = Some((remaining, class));
        }
    }

    let (mut rules, default_class) = match best_candidate {
        Some((remaining, class)) => (remaining, class),
        None => (rules, baseline_default),
    };

    recount(&mut rules, table);
    rules.sort_by_key(|r| std::cmp::Reverse(r.support));
    RuleSet {
        rules,
        default_class: Some(default_class),
    }
}

#[cfg(test)]
mod tests {
    use super::super::table::{Cell, ColumnKind, RexColumn, RexTable};
    use super::super::{Condition, Rule, RuleSet, Test};
    use super::*;

    fn rule(conds: Vec<Condition>, class: usize) -> Rule {
        Rule {
            conditions: conds,
            class,
            support: 0,
            misfires: 0,
        }
    }

    fn eq(attr: usize, category: usize) -> Condition {
        Condition {
            attr,
            test: Test::Equals { category },
        }
    }

    /// Two binary attributes; class = attribute 0.
    fn simple_table() -> RexTable {
        let columns = vec![
            RexColumn {
                attr: 0,
                kind: ColumnKind::Discrete { n_values: 2 },
            },
            RexColumn {
                attr: 1,
                kind: ColumnKind::Discrete { n_values: 2 },
            },
        ];
        let rows = vec![
            vec![Cell::Cat(0), Cell::Cat(0)],
            vec![Cell::Cat(0), Cell::Cat(1)],
            vec![Cell::Cat(1), Cell::Cat(0)],
            vec![Cell::Cat(1), Cell::Cat(1)],
        ];
        let classes = vec![0, 0, 1, 1];
        RexTable::new(columns, rows, classes, 2)
    }

    #[test]
    fn grouping_is_stable_by_class() {
        let rules = vec![
            rule(vec![eq(0, 0)], 0),
            rule(vec![eq(0, 1)], 1),
            rule(vec![eq(1, 0)], 0),
        ];
        let rs = cluster_rules(rules.clone());
        assert_eq!(rs.rules[0], rules[0]);
        assert_eq!(rs.rules[1], rules[2]);
        assert_eq!(rs.rules[2], rules[1]);
        assert!(rs.default_class.is_none());
    }

    #[test]
    fn empty_rule_list_clusters_to_empty() {
        let rs = cluster_rules(vec![]);
        assert!(rs.rules.is_empty());
    }

    #[test]
    fn seasonal_rules_group_by_class() {
        // The four published seasonal indicators: classes autumn (2),
        // autumn, winter (3), summer (1) in extraction order.
        let rules = vec![
            rule(vec![eq(1, 1)], 2),
            rule(vec![eq(1, 2)], 2),
            rule(vec![eq(2, 0)], 3),
            rule(vec![eq(2, 2)], 1),
        ];
        let rs = cluster_rules(rules);
        let classes: Vec<usize> = rs.rules.iter().map(|r| r.class).collect();
        assert_eq!(classes, vec![1, 2, 2, 3]);
    }

    #[test]
    fn generalization_drops_redundant_condition() {
        // Rule 0=0 AND 1=0 -> class 0; dropping the second condition keeps
        // misfires at zero on simple_table.
        let rs = RuleSet {
            rules: vec![rule(vec![eq(0, 0), eq(1, 0)], 0), rule(vec![eq(0, 1)], 1)],
            default_class: None,
        };
        let pruned = prune_rules(rs, &simple_table(), 0);
        let class0: Vec<_> = pruned.rules.iter().filter(|r| r.class == 0).collect();
        // Either class 0 got absorbed into the default or its rule was
        // generalized to one condition.
        if pruned.default_class != Some(0) {
            assert!(class0.iter().all(|r| r.conditions.len() == 1));
        }
    }

    #[test]
    fn duplicate_rules_collapse() {
        let rs = RuleSet {
            rules: vec![
                rule(vec![eq(0, 0)], 0),
                rule(vec![eq(0, 0)], 0),
                rule(vec![eq(0, 1)], 1),
            ],
            default_class: None,
        };
        let pruned = prune_rules(rs, &simple_table(), 0);
        let class0 = pruned.rules.iter().filter(|r| r.class == 0).count();
        assert!(class0 <= 1);
    }

    #[test]
    fn default_choice_prefers_unmatched_majority() {
        // Rules only cover class 0 rows; unmatched rows are class 1.
        let rs = RuleSet {
            rules: vec![rule(vec![eq(0, 0)], 0)],
            default_class: None,
        };
        assert_eq!(choose_default(&rs, &simple_table()), 1);
    }

    #[test]
    fn default_choice_falls_back_to_overall_majority_with_tie_break() {
        // Everything matched: 2 vs 2 tie goes to the lower class index.
        let rs = RuleSet {
            rules: vec![rule(vec![eq(0, 0)], 0), rule(vec![eq(0, 1)], 1)],
            default_class: None,
        };
        assert_eq!(choose_default(&rs, &simple_table()), 0);
    }

    #[test]
    fn default_choice_picks_class_with_no_extracted_rule() {
        // Mirror of the seasonal case: drop the spring rule, the uncovered
        // spring rows select spring as default.
        let table = super::super::extract::tests::season_table();
        let all = super::super::extract::extract_rules(&table);
        let without_spring: Vec<Rule> = all.into_iter().filter(|r| r.class != 0).collect();
        let rs = RuleSet {
            rules: without_spring,
            default_class: None,
        };
        assert_eq!(choose_default(&rs, &table), 0);
    }

    #[test]
    fn pruning_never_reduces_list_accuracy() {
        let table = super::super::extract::tests::golf_table();
        let rules = super::super::extract::extract_rules(&table);
        let rs = cluster_rules(rules.clone());
        let before_default = choose_default(&rs, &table);
        let before = list_accuracy(&rs.rules, before_default, &table);
        let pruned = prune_rules(rs, &table, 0);
        let after = list_accuracy(&pruned.rules, pruned.default_class.unwrap(), &table);
        assert!(after >= before);
    }

    #[test]
    fn season_absorption_keeps_four_rules_and_spring_default() {
        let table = super::super::extract::tests::season_table();
        let rules = super::super::extract::extract_rules(&table);
        let rs = cluster_rules(rules);
        let pruned = prune_rules(rs, &table, 0);
        assert_eq!(pruned.default_class, Some(0), "default should be spring");
        assert_eq!(pruned.rules.len(), 4);
        let acc = list_accuracy(&pruned.rules, 0, &table);
        assert_eq!(acc, 1.0);
        // The surviving rules are the four single-condition indicators.
        assert!(pruned.rules.iter().all(|r| r.conditions.len() == 1));
    }
}
