//! Covering extraction of shortest sufficient conjunctions.

use super::table::{Cell, ColumnKind, RexTable};
use super::{Condition, Rule, Test};

/// Discriminating power of a candidate condition for a target class over
/// the whole table: matched target-class patterns minus matched others.
pub fn condition_score(table: &RexTable, candidate: &Condition, target_class: usize) -> f64 {
    let all: Vec<usize> = (0..table.len()).collect();
    let (t, o) = score_on_rows(table, &all, candidate, target_class);
    t as f64 - o as f64
}

fn cell_satisfies(cell: &Cell, test: &Test) -> bool {
    match (cell, test) {
        (Cell::Cat(c), Test::Equals { category }) => c == category,
        (Cell::Num(x), Test::Le { threshold }) => x <= threshold,
        (Cell::Num(x), Test::Ge { threshold }) => x >= threshold,
        (Cell::Num(x), Test::Within { lo, hi }) => lo <= x && x <= hi,
        _ => false,
    }
}

fn row_matches(table: &RexTable, row: usize, conditions: &[Condition]) -> bool {
    conditions.iter().all(|cond| {
        let col = table
            .col_of_attr(cond.attr)
            .expect("condition refers to a table column");
        cell_satisfies(&table.rows[row][col], &cond.test)
    })
}

/// (target matches, other matches) of one candidate over given rows.
fn score_on_rows(
    table: &RexTable,
    rows: &[usize],
    candidate: &Condition,
    target_class: usize,
) -> (usize, usize) {
    let col = table.col_of_attr(candidate.attr).expect("column exists");
    let mut t = 0usize;
    let mut o = 0usize;
    for &r in rows {
        if cell_satisfies(&table.rows[r][col], &candidate.test) {
            if table.classes[r] == target_class {
                t += 1;
            } else {
                o += 1;
            }
        }
    }
    (t, o)
}

/// Candidate conditions satisfied by the current pattern.
fn candidates_for(table: &RexTable, row: usize) -> Vec<Condition> {
    let mut out = Vec::new();
    for (c, col) in table.columns.iter().enumerate() {
        match (&col.kind, &table.rows[row][c]) {
            (ColumnKind::Discrete { .. }, Cell::Cat(v)) => out.push(Condition {
                attr: col.attr,
                test: Test::Equals { category: *v },
            }),
            (ColumnKind::Continuous { thresholds }, Cell::Num(x)) => {
                for &t in thresholds {
                    if *x <= t {
                        out.push(Condition {
                            attr: col.attr,
                            test: Test::Le { threshold: t },
                        });
                    }
                    if *x >= t {
                        out.push(Condition {
                            attr: col.attr,
                            test: Test::Ge { threshold: t },
                        });
                    }
                }
            }
            _ => {}
        }
    }
    out
}

/// Deterministic candidate order for tie-breaking: attribute, then test
/// shape, then value.
fn candidate_rank(cond: &Condition) -> (usize, u8, f64) {
    match &cond.test {
        Test::Equals { category } => (cond.attr, 0, *category as f64),
        Test::Le { threshold } => (cond.attr, 1, *threshold),
        Test::Ge { threshold } => (cond.attr, 2, *threshold),
        Test::Within { lo, .. } => (cond.attr, 3, *lo),
    }
}

/// Iteratively covers the table with pure conjunctions.
///
/// The first unmarked pattern seeds a rule; conditions drawn from that
/// pattern's own values are added greedily by first-order score (computed
/// over the patterns still matching the partial conjunction, marked ones
/// included) until no differently-classed pattern matches. Covered patterns
/// are marked, not removed, so later scores still see them. A pattern that
/// cannot be purified (an identical pattern with a different class exists)
/// is marked as noise and left to the default rule.
pub fn extract_rules(table: &RexTable) -> Vec<Rule> {
    let mut marked = vec![false; table.len()];
    let mut rules: Vec<Rule> = Vec::new();

    while let Some(seed) = marked.iter().position(|&m| !m) {
        let target = table.classes[seed];
        let mut conditions: Vec<Condition> = Vec::new();
        let mut matching: Vec<usize> = (0..table.len()).collect();
        let candidates = candidates_for(table, seed);

        loop {
            let impure = matching.iter().any(|&r| table.classes[r] != target);
            if !impure {
                break;
            }
            // Highest (score, fewer others) among candidates that shrink
            // the current match set.
            type Ranked<'a> = (f64, usize, (usize, u8, f64), &'a Condition);
            let mut best: Option<Ranked> = None;
            for cand in &candidates {
                let (t, o) = score_on_rows(table, &matching, cand, target);
                if t + o == matching.len() {
                    continue; // no shrink: already implied by the conjunction
                }
                let score = t as f64 - o as f64;
                let rank = candidate_rank(cand);
                let better = match &best {
                    None => true,
                    Some((bs, bo, brank, _)) => {
                        score > *bs
                            || (score == *bs && o < *bo)
                            || (score == *bs && o == *bo && rank < *brank)
                    }
                };
                if better {
                    best = Some((score, o, rank, cand));
                }
            }
            match best {
                Some((_, _, _, cand)) => {
                    conditions = super::conjoin_conditions(&conditions, std::slice::from_ref(cand))
                        .expect("candidates from one pattern cannot contradict");
                    matching.retain(|&r| row_matches(table, r, &conditions));
                    debug_assert!(matching.contains(&seed));
                }
                None => {
                    // Identical patterns with conflicting classes: noise.
                    conditions.clear();
                    break;
                }
            }
        }

        if conditions.is_empty() && {
            let impure = matching.iter().any(|&r| table.classes[r] != target);
            impure || table.columns.is_empty()
        } {
            marked[seed] = true; // noise pattern, default rule handles it
            continue;
        }

        if conditions.is_empty() {
            // Whole table is one class; describe it by the seed's first
            // attribute value.
            let fallback = candidates_for(table, seed);
            if let Some(first) = fallback.first() {
                conditions.push(first.clone());
                matching.retain(|&r| row_matches(table, r, &conditions));
            }
        }

        let support = matching.len();
        let misfires = matching
            .iter()
            .filter(|&&r| table.classes[r] != target)
            .count();
        debug_assert_eq!(misfires, 0, "extracted rules are pure by construction");
        for &r in &matching {
            marked[r] = true;
        }
        rules.push(Rule {
            conditions,
            class: target,
            support,
            misfires,
        });
    }
    rules
}

/// Recomputes support and misfires of each rule against a table.
pub(crate) fn recount(rules: &mut [Rule], table: &RexTable) {
    let n_attrs = table.attr_span();
    for rule in rules.iter_mut() {
        let mut support = 0usize;
        let mut misfires = 0usize;
        for (row, &class) in table.rows.iter().zip(&table.classes) {
            let raw = table.row_as_raw(row, n_attrs);
            if rule.matches(&raw) {
                support += 1;
                if class != rule.class {
                    misfires += 1;
                }
            }
        }
        rule.support = support;
        rule.misfires = misfires;
    }
}

/// Rows matched by a rule, as a bitmask-ish sorted vector.
pub(crate) fn cover(rule: &Rule, table: &RexTable) -> Vec<usize> {
    let n_attrs = table.attr_span();
    (0..table.len())
        .filter(|&r| rule.matches(&table.row_as_raw(&table.rows[r], n_attrs)))
        .collect()
}

#[cfg(test)]
pub(crate) mod tests {
    use super::super::table::{RexColumn, RexTable};
    use super::*;

    /// The 11-row season table: weather, tree, temperature.
    pub(crate) fn season_table() -> RexTable {
        // classes: 0 spring, 1 summer, 2 autumn, 3 winter
        // weather: 0 sunny, 1 cloudy, 2 rainy
        // tree: 0 green, 1 yellow, 2 leafless
        // temperature: 0 low, 1 mild, 2 high
        let rows_spec: Vec<([usize; 3], usize)> = vec![
            ([0, 0, 1], 0),
            ([2, 0, 1], 0),
            ([1, 0, 1], 0),
            ([0, 0, 2], 1),
            ([1, 0, 2], 1),
            ([2, 0, 2], 1),
            ([0, 1, 1], 2),
            ([1, 1, 1], 2),
            ([2, 2, 1], 2),
            ([2, 0, 0], 3),
            ([1, 0, 0], 3),
        ];
        let columns = vec![
            RexColumn {
                attr: 0,
                kind: ColumnKind::Discrete { n_values: 3 },
            },
            RexColumn {
                attr: 1,
                kind: ColumnKind::Discrete { n_values: 3 },
            },
            RexColumn {
                attr: 2,
                kind: ColumnKind::Discrete { n_values: 3 },
            },
        ];
        let rows = rows_spec
            .iter()
            .map(|(vals, _)| vals.iter().map(|&v| Cell::Cat(v)).collect())
            .collect();
        let classes = rows_spec.iter().map(|&(_, c)| c).collect();
        RexTable::new(columns, rows, classes, 4)
    }

    #[test]
    fn season_extraction_matches_published_rules() {
        let table = season_table();
        let rules = extract_rules(&table);
        // Reference decision list: yellow -> autumn, leafless -> autumn,
        // low -> winter, high -> summer, else spring.
        let reference = |row: &[Cell]| -> usize {
            let tree = match row[1] {
                Cell::Cat(c) => c,
                _ => unreachable!(),
            };
            let temp = match row[2] {
                Cell::Cat(c) => c,
                _ => unreachable!(),
            };
            if tree == 1 || tree == 2 {
                2
            } else if temp == 0 {
                3
            } else if temp == 2 {
                1
            } else {
                0
            }
        };
        let rs = RuleSet {
            rules: rules.clone(),
            default_class: Some(0),
        };
        for (row, &class) in table.rows.iter().zip(&table.classes) {
            let raw = table.row_as_raw(row, 3);
            assert_eq!(rs.classify(&raw), class);
            assert_eq!(reference(row), class);
        }
        // Both autumn indicators appear as separate single-condition rules.
        let autumn_rules: Vec<_> = rules.iter().filter(|r| r.class == 2).collect();
        assert_eq!(autumn_rules.len(), 2);
        assert!(autumn_rules.iter().all(|r| r.conditions.len() == 1));
    }

    use super::super::RuleSet;

    #[test]
    fn golf_extraction_classifies_all_rows() {
        let table = golf_table();
        let rules = extract_rules(&table);
        let rs = RuleSet {
            rules,
            default_class: Some(0),
        };
        let n_attrs = table.attr_span();
        for (row, &class) in table.rows.iter().zip(&table.classes) {
            let raw = table.row_as_raw(row, n_attrs);
            assert_eq!(rs.classify(&raw), class);
        }
    }

    /// The classic 14-row weather table: outlook, temperature, humidity, wind.
    pub(crate) fn golf_table() -> RexTable {
        // classes: 0 play, 1 don't play
        // outlook: 0 sunny, 1 overcast, 2 rainy; wind: 0 weak, 1 strong
        let rows_spec: Vec<((usize, f64, f64, usize), usize)> = vec![
            ((0, 85.0, 85.0, 0), 1),
            ((0, 80.0, 90.0, 1), 1),
            ((1, 83.0, 86.0, 0), 0),
            ((2, 70.0, 96.0, 0), 0),
            ((2, 68.0, 80.0, 0), 0),
            ((2, 65.0, 70.0, 1), 1),
            ((1, 64.0, 65.0, 1), 0),
            ((0, 72.0, 95.0, 0), 1),
            ((0, 69.0, 70.0, 0), 0),
            ((2, 75.0, 80.0, 0), 0),
            ((0, 75.0, 70.0, 1), 0),
            ((1, 72.0, 90.0, 1), 0),
            ((1, 81.0, 75.0, 0), 0),
            ((2, 71.0, 91.0, 1), 1),
        ];
        let classes: Vec<usize> = rows_spec.iter().map(|&(_, c)| c).collect();
        let temps: Vec<f64> = rows_spec.iter().map(|((_, t, _, _), _)| *t).collect();
        let hums: Vec<f64> = rows_spec.iter().map(|((_, _, h, _), _)| *h).collect();
        let columns = vec![
            RexColumn {
                attr: 0,
                kind: ColumnKind::Discrete { n_values: 3 },
            },
            RexColumn {
                attr: 1,
                kind: ColumnKind::Continuous {
                    thresholds: boundary_thresholds(&temps, &classes),
                },
            },
            RexColumn {
                attr: 2,
                kind: ColumnKind::Continuous {
                    thresholds: boundary_thresholds(&hums, &classes),
                },
            },
            RexColumn {
                attr: 3,
                kind: ColumnKind::Discrete { n_values: 2 },
            },
        ];
        let rows = rows_spec
            .iter()
            .map(|((o, t, h, w), _)| {
                vec![Cell::Cat(*o), Cell::Num(*t), Cell::Num(*h), Cell::Cat(*w)]
            })
            .collect();
        RexTable::new(columns, rows, classes, 2)
    }

    use super::super::table::boundary_thresholds;

    #[test]
    fn single_class_table_yields_one_single_condition_rule() {
        // First attribute constant: one rule on it covers everything.
        let columns = vec![RexColumn {
            attr: 0,
            kind: ColumnKind::Discrete { n_values: 1 },
        }];
        let rows: Vec<Vec<Cell>> = (0..5).map(|_| vec![Cell::Cat(0)]).collect();
        let classes = vec![1; 5];
        let table = RexTable::new(columns, rows, classes, 2);
        let rules = extract_rules(&table);
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].conditions.len(), 1);
        assert_eq!(rules[0].support, 5);
    }

    #[test]
    fn conflicting_duplicates_become_noise() {
        let columns = vec![RexColumn {
            attr: 0,
            kind: ColumnKind::Discrete { n_values: 2 },
        }];
        let rows = vec![vec![Cell::Cat(0)], vec![Cell::Cat(0)], vec![Cell::Cat(1)]];
        let classes = vec![0, 1, 1];
        let table = RexTable::new(columns, rows, classes, 2);
        let rules = extract_rules(&table);
        // Rows 0 and 1 are identical with different classes; only row 2 can
        // be covered purely.
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].class, 1);
        assert_eq!(rules[0].misfires, 0);
    }

    #[test]
    fn condition_score_counts_target_minus_others() {
        let table = season_table();
        // tree = yellow for class autumn: matches 2 autumn, 0 others.
        let cand = Condition {
            attr: 1,
            test: Test::Equals { category: 1 },
        };
        assert_eq!(condition_score(&table, &cand, 2), 2.0);
        // Unmatched condition scores zero.
        let never = Condition {
            attr: 1,
            test: Test::Equals { category: 1 },
        };
        let empty_target = condition_score(&table, &never, 3);
        assert_eq!(empty_target, -2.0); // two autumn rows match, zero winter

        // Brute-force oracle over the 11 rows.
        let mut want = 0i64;
        for (row, &class) in table.rows.iter().zip(&table.classes) {
            if row[1] == Cell::Cat(1) {
                if class == 2 {
                    want += 1;
                } else {
                    want -= 1;
                }
            }
        }
        assert_eq!(condition_score(&table, &cand, 2), want as f64);
    }

    #[test]
    fn extraction_covers_every_pattern_purely() {
        let table = golf_table();
        let rules = extract_rules(&table);
        let n_attrs = table.attr_span();
        for (r, row) in table.rows.iter().enumerate() {
            let raw = table.row_as_raw(row, n_attrs);
            let covered = rules.iter().any(|rule| rule.matches(&raw));
            assert!(covered, "row {r} not covered");
        }
        assert!(rules.iter().all(|r| r.misfires == 0));
    }
}
