//! Monotone parallel segmentation by dynamic programming.
//!
//! A segmentation groups consecutive initial segments on both sides into
//! aligned groups that cover both documents completely and in order. Its
//! objective is `Σ_groups [log_c + ln max(score(group), 1e-12)]`, with at most
//! `join_limit` initial segments per side in any group. Ties are broken toward
//! fewer groups, then toward the lexicographically earliest sequence of group
//! end positions.

use std::cmp::Ordering;
use std::ops::Range;

use super::{Group, MiningConfig, Segmentation};

/// Scores below this are clamped before taking the logarithm.
pub const SCORE_FLOOR: f64 = 1e-12;

/// Contribution of one group to the objective.
pub fn group_value(score: f64, log_c: f64) -> f64 {
    log_c + score.max(SCORE_FLOOR).ln()
}

#[derive(Clone, Copy)]
struct Cell {
    total: f64,
    groups: usize,
    prev: (usize, usize),
    score: f64,
}

/// Best monotone complete segmentation of an `a × b` document pair, or
/// `None` when no legal segmentation exists (an empty side, or sides too
/// unbalanced for the join limit).
pub fn dp_segment<F>(a: usize, b: usize, scorer: F, config: &MiningConfig) -> Option<Segmentation>
where
    F: Fn(Range<usize>, Range<usize>) -> f64,
{
    if a == 0 || b == 0 {
        return None;
    }
    let limit = config.join_limit.max(1);
    let width = b + 1;
    let mut table: Vec<Option<Cell>> = vec![None; (a + 1) * width];
    table[0] = Some(Cell { total: 0.0, groups: 0, prev: (0, 0), score: 0.0 });

    for i in 1..=a {
        for j in 1..=b {
            let mut best: Option<Cell> = None;
            for di in 1..=limit.min(i) {
                for dj in 1..=limit.min(j) {
                    let (pi, pj) = (i - di, j - dj);
                    let Some(prev) = table[pi * width + pj] else { continue };
                    let score = scorer(pi..i, pj..j);
                    let cand = Cell {
                        total: prev.total + group_value(score, config.log_c),
                        groups: prev.groups + 1,
                        prev: (pi, pj),
                        score,
                    };
                    best = Some(match best {
                        None => cand,
                        Some(cur) => {
                            if better(&cand, &cur, &table, width) {
                                cand
                            } else {
                                cur
                            }
                        }
                    });
                }
            }
            table[i * width + j] = best;
        }
    }

    let end = table[a * width + b]?;
    let mut groups = Vec::with_capacity(end.groups);
    let (mut i, mut j) = (a, b);
    while (i, j) != (0, 0) {
        let cell = table[i * width + j].expect("back-pointers only visit reachable states");
        let (pi, pj) = cell.prev;
        groups.push(Group { src: pi..i, tgt: pj..j, score: cell.score });
        (i, j) = (pi, pj);
    }
    groups.reverse();
    Some(Segmentation { groups, score: end.total })
}

fn better(cand: &Cell, cur: &Cell, table: &[Option<Cell>], width: usize) -> bool {
    match cand.total.partial_cmp(&cur.total) {
        Some(Ordering::Greater) => return true,
        Some(Ordering::Less) => return false,
        _ => {}
    }
    if cand.groups != cur.groups {
        return cand.groups < cur.groups;
    }
    boundaries(cand.prev, table, width) < boundaries(cur.prev, table, width)
}

/// Group end positions from the start up to and including `state`.
fn boundaries(mut state: (usize, usize), table: &[Option<Cell>], width: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    while state != (0, 0) {
        out.push(state);
        state = table[state.0 * width + state.1].expect("reachable").prev;
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg() -> MiningConfig {
        MiningConfig::default()
    }

    #[test]
    fn two_by_two_diagonal() {
        let score = |s: Range<usize>, t: Range<usize>| {
            if s.len() == 1 && t.len() == 1 && s.start == t.start {
                0.9
            } else {
                0.1
            }
        };
        let seg = dp_segment(2, 2, score, &cfg()).unwrap();
        let spans: Vec<_> = seg.groups.iter().map(|g| (g.src.clone(), g.tgt.clone())).collect();
        assert_eq!(spans, [(0..1, 0..1), (1..2, 1..2)]);
        assert!((seg.score - 2.0 * 0.9f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn joins_source_segments() {
        let score = |s: Range<usize>, _t: Range<usize>| if s == (0..2) { 0.9 } else { 0.2 };
        let seg = dp_segment(2, 1, score, &cfg()).unwrap();
        assert_eq!(seg.groups.len(), 1);
        assert_eq!(seg.groups[0].src, 0..2);
        assert_eq!(seg.groups[0].tgt, 0..1);
    }

    #[test]
    fn single_segment_each_side() {
        let seg = dp_segment(1, 1, |_, _| 0.0, &cfg()).unwrap();
        assert_eq!(seg.groups.len(), 1);
        assert_eq!((seg.groups[0].src.clone(), seg.groups[0].tgt.clone()), (0..1, 0..1));
        assert_eq!(seg.score, SCORE_FLOOR.ln());
    }

    #[test]
    fn ties_prefer_fewer_groups() {
        // Every group scores 1 (log 0), so all segmentations tie on the objective.
        let seg = dp_segment(3, 3, |_, _| 1.0, &cfg()).unwrap();
        assert_eq!(seg.groups.len(), 1);
        assert_eq!(seg.groups[0].src, 0..3);
    }

    #[test]
    fn ties_prefer_earliest_boundaries() {
        // a = 2, b = 4, join limit 3: two groups are needed, all scoring 1.
        // Boundaries (1,1),(2,4) is lexicographically earliest.
        let seg = dp_segment(2, 4, |_, _| 1.0, &cfg()).unwrap();
        let ends: Vec<_> = seg.groups.iter().map(|g| (g.src.end, g.tgt.end)).collect();
        assert_eq!(ends, [(1, 1), (2, 4)]);
    }

    #[test]
    fn join_limit_respected() {
        let c = MiningConfig { join_limit: 1, ..cfg() };
        assert!(dp_segment(2, 3, |_, _| 0.5, &c).is_none());
        assert!(dp_segment(1, 4, |_, _| 0.5, &cfg()).is_none());
        assert!(dp_segment(0, 2, |_, _| 0.5, &cfg()).is_none());
        let seg = dp_segment(3, 3, |_, _| 0.5, &c).unwrap();
        seg.validate(3, 3, 1).unwrap();
        assert_eq!(seg.groups.len(), 3);
    }
}
