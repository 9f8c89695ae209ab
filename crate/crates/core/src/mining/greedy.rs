use std::ops::Range;

/// Greedy one-to-one matching of initial segments.
///
/// The cursor starts at the first segment of each side. A pair scoring at
/// least `threshold` is emitted and both cursors advance. Otherwise the
/// cursor moves on the side whose one-step lookahead pair scores higher:
/// `score(i + 1, j)` advances the source, `score(i, j + 1)` the target, and
/// ties advance the source. Returns `(src, tgt, score)` with 0-based indexes.
pub fn greedy_extract<F>(a: usize, b: usize, scorer: F, threshold: f64) -> Vec<(usize, usize, f64)>
where
    F: Fn(Range<usize>, Range<usize>) -> f64,
{
    let one = |i: usize, j: usize| scorer(i..i + 1, j..j + 1);
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a && j < b {
        let s = one(i, j);
        if s >= threshold {
            out.push((i, j, s));
            i += 1;
            j += 1;
            continue;
        }
        let next_src = if i + 1 < a { one(i + 1, j) } else { f64::NEG_INFINITY };
        let next_tgt = if j + 1 < b { one(i, j + 1) } else { f64::NEG_INFINITY };
        if next_tgt > next_src {
            j += 1;
        } else {
            i += 1;
        }
    }
    out
}
