//! Lexical translation-quality score for sentence pairs.
//!
//! Each token carries an IDF weight; each cross-lingual token pair carries a
//! similarity derived from the translation tables (row-max normalized
//! probability, best of both directions). Precision is the weighted mean, over
//! target tokens, of their best similarity to any source token; recall is the
//! same over source tokens; the score is their balanced harmonic mean.

use std::fmt::Write as _;
use std::io::BufRead;
use std::ops::Range;
use std::path::Path;

use rustc_hash::{FxHashMap, FxHashSet};

use crate::word_align::TranslationTable;
use crate::{Error, Result};

const DOC_COUNT_KEY: &str = "<doc_count>";

#[derive(Debug, Clone, PartialEq)]
pub struct IdfWeights {
    weights: FxHashMap<String, f64>,
    doc_count: usize,
    default_weight: f64,
}

fn idf(doc_count: usize, df: usize) -> f64 {
    (1.0 + (doc_count as f64 + 1.0) / (df as f64 + 1.0)).ln()
}

impl IdfWeights {
    /// `weight(u) = ln(1 + (D + 1) / (df(u) + 1))` with sentence-level
    /// document frequencies. Unseen tokens use `df = 0`.
    pub fn compute<I, S>(corpus: I) -> Result<Self>
    where
        I: IntoIterator,
        I::Item: AsRef<[S]>,
        S: AsRef<str>,
    {
        let mut df: FxHashMap<String, usize> = FxHashMap::default();
        let mut doc_count = 0usize;
        let mut seen: FxHashSet<String> = FxHashSet::default();
        for sentence in corpus {
            doc_count += 1;
            let sentence = sentence.as_ref();
            seen.clear();
            for tok in sentence {
                let tok = tok.as_ref();
                if !seen.contains(tok) {
                    seen.insert(tok.to_string());
                    match df.get_mut(tok) {
                        Some(c) => *c += 1,
                        None => {
                            df.insert(tok.to_string(), 1);
                        }
                    }
                }
            }
        }
        if doc_count == 0 {
            return Err(Error::InvalidInput("cannot compute IDF weights from an empty corpus".into()));
        }
        let weights = df.into_iter().map(|(t, c)| (t, idf(doc_count, c))).collect();
        Ok(Self { weights, doc_count, default_weight: idf(doc_count, 0) })
    }

    pub fn weight(&self, token: &str) -> f64 {
        self.weights.get(token).copied().unwrap_or(self.default_weight)
    }

    pub fn doc_count(&self) -> usize {
        self.doc_count
    }

    pub fn default_weight(&self) -> f64 {
        self.default_weight
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// `token<TAB>weight` lines, sorted by token, after a `<doc_count>` line.
    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let mut entries: Vec<_> = self.weights.iter().collect();
        entries.sort_by(|a, b| a.0.cmp(b.0));
        let mut buf = format!("{DOC_COUNT_KEY}\t{}\n", self.doc_count);
        for (t, w) in entries {
            let _ = writeln!(buf, "{t}\t{w}");
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load_tsv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut weights = FxHashMap::default();
        let mut doc_count = None;
        for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('\t') else {
                return Err(Error::parse(path, idx + 1, "expected `token<TAB>weight`"));
            };
            if key == DOC_COUNT_KEY {
                doc_count = Some(
                    value.parse::<usize>().map_err(|_| Error::parse(path, idx + 1, "invalid document count"))?,
                );
                continue;
            }
            let w: f64 = value
                .parse()
                .map_err(|_| Error::parse(path, idx + 1, format!("invalid weight `{value}`")))?;
            if !(w >= 0.0 && w.is_finite()) {
                return Err(Error::parse(path, idx + 1, "weights must be finite and nonnegative"));
            }
            weights.insert(key.to_string(), w);
        }
        let doc_count = doc_count.ok_or_else(|| Error::parse(path, 1, format!("missing {DOC_COUNT_KEY} line")))?;
        Ok(Self { weights, doc_count, default_weight: idf(doc_count, 0) })
    }
}

/// Similarity of source token `e` and target token `f`:
/// `max(t_fwd(f|e) / max_row_fwd(e), t_rev(e|f) / max_row_rev(f))`, falling
/// back to exact string match when neither token has a row.
pub fn lexical_sim(forward: &TranslationTable, reverse: &TranslationTable, e: &str, f: &str) -> f64 {
    let tables = Tables { forward, reverse };
    tables.sim(&tables.src_token(e), &tables.tgt_token(f))
}

#[derive(Clone, Copy)]
struct Tables<'a> {
    forward: &'a TranslationTable,
    reverse: &'a TranslationTable,
}

/// Table ids of a source-side token, resolved once.
struct SrcToken<'t> {
    text: &'t str,
    fwd_src: Option<u32>,
    fwd_has_row: bool,
    fwd_row_max: f64,
    rev_tgt: Option<u32>,
}

/// Table ids of a target-side token, resolved once.
struct TgtToken<'t> {
    text: &'t str,
    rev_src: Option<u32>,
    rev_has_row: bool,
    rev_row_max: f64,
    fwd_tgt: Option<u32>,
}

impl Tables<'_> {
    fn src_token<'t>(&self, text: &'t str) -> SrcToken<'t> {
        let fwd_src = self.forward.src_id(text);
        SrcToken {
            text,
            fwd_src,
            fwd_has_row: self.forward.has_row_id(fwd_src),
            fwd_row_max: self.forward.row_max_id(fwd_src),
            rev_tgt: self.reverse.tgt_id(text),
        }
    }

    fn tgt_token<'t>(&self, text: &'t str) -> TgtToken<'t> {
        let rev_src = self.reverse.src_id(text);
        TgtToken {
            text,
            rev_src,
            rev_has_row: self.reverse.has_row_id(rev_src),
            rev_row_max: self.reverse.row_max_id(rev_src),
            fwd_tgt: self.forward.tgt_id(text),
        }
    }

    fn sim(&self, e: &SrcToken<'_>, f: &TgtToken<'_>) -> f64 {
        if !e.fwd_has_row && !f.rev_has_row {
            return if e.text == f.text { 1.0 } else { 0.0 };
        }
        let fwd = if e.fwd_has_row {
            self.forward.prob_by_id(e.fwd_src, f.fwd_tgt) / e.fwd_row_max
        } else {
            0.0
        };
        let rev = if f.rev_has_row {
            self.reverse.prob_by_id(f.rev_src, e.rev_tgt) / f.rev_row_max
        } else {
            0.0
        };
        fwd.max(rev)
    }
}

/// Tables and weights used for scoring. `forward` is `P(tgt | src)`.
#[derive(Debug, Clone, Copy)]
pub struct LexicalSimilarity<'a> {
    pub forward: &'a TranslationTable,
    pub reverse: &'a TranslationTable,
    pub idf_src: &'a IdfWeights,
    pub idf_tgt: &'a IdfWeights,
}

/// Balanced F-measure of precision and recall; 0 when both are 0.
pub fn f_measure(precision: f64, recall: f64) -> f64 {
    if precision == 0.0 && recall == 0.0 {
        return 0.0;
    }
    precision * recall / (0.5 * precision + 0.5 * recall)
}

/// Weighted mean of best similarities; 0 for zero total weight.
fn weighted_mean(weights: &[f64], best: impl Iterator<Item = f64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for (w, b) in weights.iter().zip(best) {
        num += w * b;
        den += w;
    }
    if den > 0.0 {
        num / den
    } else {
        0.0
    }
}

impl<'a> LexicalSimilarity<'a> {
    fn tables(&self) -> Tables<'a> {
        Tables { forward: self.forward, reverse: self.reverse }
    }

    /// Similarity matrix `[src][tgt]`.
    fn sim_matrix<S: AsRef<str>, T: AsRef<str>>(&self, src: &[S], tgt: &[T]) -> Vec<Vec<f64>> {
        let tables = self.tables();
        let e: Vec<SrcToken> = src.iter().map(|s| tables.src_token(s.as_ref())).collect();
        let f: Vec<TgtToken> = tgt.iter().map(|t| tables.tgt_token(t.as_ref())).collect();
        e.iter().map(|ei| f.iter().map(|fj| tables.sim(ei, fj)).collect()).collect()
    }

    /// Precision, recall and score of one pair.
    pub fn score_parts<S: AsRef<str>, T: AsRef<str>>(&self, src: &[S], tgt: &[T]) -> Result<(f64, f64, f64)> {
        if src.is_empty() || tgt.is_empty() {
            return Err(Error::InvalidInput("cannot score a pair with an empty side".into()));
        }
        let m = self.sim_matrix(src, tgt);
        let w_src: Vec<f64> = src.iter().map(|s| self.idf_src.weight(s.as_ref())).collect();
        let w_tgt: Vec<f64> = tgt.iter().map(|t| self.idf_tgt.weight(t.as_ref())).collect();
        let precision = weighted_mean(&w_tgt, (0..tgt.len()).map(|j| m.iter().map(|row| row[j]).fold(0.0, f64::max)));
        let recall = weighted_mean(&w_src, m.iter().map(|row| row.iter().copied().fold(0.0, f64::max)));
        Ok((precision, recall, f_measure(precision, recall)))
    }

    /// Translation-quality score in `[0, 1]`.
    pub fn score<S: AsRef<str>, T: AsRef<str>>(&self, src: &[S], tgt: &[T]) -> Result<f64> {
        self.score_parts(src, tgt).map(|(_, _, f)| f)
    }

    /// Same as [`score`](Self::score) but 0 for pairs with an empty side.
    pub fn score_or_zero<S: AsRef<str>, T: AsRef<str>>(&self, src: &[S], tgt: &[T]) -> f64 {
        self.score(src, tgt).unwrap_or(0.0)
    }
}

/// Scores arbitrary groups of consecutive segments of one document pair.
///
/// Best similarities are precomputed per (segment, token), so scoring a group
/// costs one pass over its tokens. The result equals
/// [`LexicalSimilarity::score`] on the concatenated tokens of the group.
#[derive(Debug, Clone)]
pub struct SegmentScorer {
    src_offsets: Vec<usize>,
    tgt_offsets: Vec<usize>,
    w_src: Vec<f64>,
    w_tgt: Vec<f64>,
    /// `[src segment][tgt token]`: best similarity of the tgt token to any token of the segment.
    best_for_tgt: Vec<Vec<f64>>,
    /// `[tgt segment][src token]`.
    best_for_src: Vec<Vec<f64>>,
}

impl SegmentScorer {
    pub fn new<S: AsRef<str>, T: AsRef<str>>(sim: &LexicalSimilarity<'_>, src: &[Vec<S>], tgt: &[Vec<T>]) -> Self {
        let offsets = |segs: &[usize]| {
            let mut o = vec![0];
            for len in segs {
                o.push(o.last().unwrap() + len);
            }
            o
        };
        let src_offsets = offsets(&src.iter().map(Vec::len).collect::<Vec<_>>());
        let tgt_offsets = offsets(&tgt.iter().map(Vec::len).collect::<Vec<_>>());
        let src_flat: Vec<&str> = src.iter().flatten().map(AsRef::as_ref).collect();
        let tgt_flat: Vec<&str> = tgt.iter().flatten().map(AsRef::as_ref).collect();
        let m = sim.sim_matrix(&src_flat, &tgt_flat);

        let best_for_tgt = (0..src.len())
            .map(|k| {
                (0..tgt_flat.len())
                    .map(|j| m[src_offsets[k]..src_offsets[k + 1]].iter().map(|row| row[j]).fold(0.0, f64::max))
                    .collect()
            })
            .collect();
        let best_for_src = (0..tgt.len())
            .map(|l| {
                m.iter()
                    .map(|row| row[tgt_offsets[l]..tgt_offsets[l + 1]].iter().copied().fold(0.0, f64::max))
                    .collect()
            })
            .collect();
        Self {
            w_src: src_flat.iter().map(|t| sim.idf_src.weight(t)).collect(),
            w_tgt: tgt_flat.iter().map(|t| sim.idf_tgt.weight(t)).collect(),
            src_offsets,
            tgt_offsets,
            best_for_tgt,
            best_for_src,
        }
    }

    pub fn src_segments(&self) -> usize {
        self.src_offsets.len() - 1
    }

    pub fn tgt_segments(&self) -> usize {
        self.tgt_offsets.len() - 1
    }

    /// Score of the group joining source segments `src` with target segments
    /// `tgt` (0-based, half-open). Empty token spans score 0.
    pub fn score(&self, src: Range<usize>, tgt: Range<usize>) -> f64 {
        let src_tokens = self.src_offsets[src.start]..self.src_offsets[src.end];
        let tgt_tokens = self.tgt_offsets[tgt.start]..self.tgt_offsets[tgt.end];
        if src_tokens.is_empty() || tgt_tokens.is_empty() {
            return 0.0;
        }
        let precision = weighted_mean(
            &self.w_tgt[tgt_tokens.clone()],
            tgt_tokens.clone().map(|j| src.clone().map(|k| self.best_for_tgt[k][j]).fold(0.0, f64::max)),
        );
        let recall = weighted_mean(
            &self.w_src[src_tokens.clone()],
            src_tokens.map(|i| tgt.clone().map(|l| self.best_for_src[l][i]).fold(0.0, f64::max)),
        );
        f_measure(precision, recall)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word_align::{Direction, TranslationTable};

    fn table(dir: Direction, entries: &[(&str, &str, f64)]) -> TranslationTable {
        TranslationTable::from_entries(dir, entries.iter().copied())
    }

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn idf_formula() {
        let corpus = vec![toks("a b"), toks("a"), toks("a c c")];
        let idf = IdfWeights::compute(&corpus).unwrap();
        assert_eq!(idf.doc_count(), 3);
        assert!((idf.weight("a") - 2f64.ln()).abs() < 1e-15);
        assert!((idf.weight("c") - (1.0 + 4.0 / 2.0f64).ln()).abs() < 1e-15);
        assert!((idf.weight("zzz") - 5f64.ln()).abs() < 1e-15);
        let empty: Vec<Vec<String>> = Vec::new();
        assert!(IdfWeights::compute(&empty).is_err());
    }

    #[test]
    fn idf_tsv_roundtrip() {
        let idf = IdfWeights::compute(&[toks("x y"), toks("y z")]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("idf.tsv");
        idf.save_tsv(&p).unwrap();
        assert_eq!(IdfWeights::load_tsv(&p).unwrap(), idf);
    }

    #[test]
    fn lexical_sim_cases() {
        let fwd = table(Direction::Forward, &[("e", "f", 0.6), ("e", "g", 0.3), ("e", "h", 0.1)]);
        let rev = table(Direction::Reverse, &[("g", "e", 1.0)]);
        assert_eq!(lexical_sim(&fwd, &rev, "e", "f"), 1.0);
        assert_eq!(lexical_sim(&fwd, &rev, "e", "g"), 1.0); // reverse row is peaked on e
        assert!((lexical_sim(&fwd, &rev, "e", "h") - 0.1 / 0.6).abs() < 1e-15);
        assert_eq!(lexical_sim(&fwd, &rev, "p", "q"), 0.0);
        assert_eq!(lexical_sim(&fwd, &rev, "2020", "2020"), 1.0);
        // A row exists for "e", so no exact-match fallback.
        assert_eq!(lexical_sim(&fwd, &rev, "e", "e"), 0.0);
    }

    #[test]
    fn yisi_hand_example() {
        // sim(a,x)=1, sim(b,y)=0.5, other sims 0, uniform weights: P = R = 0.75.
        let fwd = table(Direction::Forward, &[("a", "x", 1.0), ("b", "z", 0.5), ("b", "y", 0.25)]);
        let rev = table(Direction::Reverse, &[]);
        let idf = IdfWeights::compute(&[toks("a b x y")]).unwrap();
        let s = LexicalSimilarity { forward: &fwd, reverse: &rev, idf_src: &idf, idf_tgt: &idf };
        let (p, r, f) = s.score_parts(&toks("a b"), &toks("x y")).unwrap();
        assert!((p - 0.75).abs() < 1e-15);
        assert!((r - 0.75).abs() < 1e-15);
        assert!((f - 0.75).abs() < 1e-15);
        assert!(s.score(&toks(""), &toks("x")).is_err());
    }

    #[test]
    fn identical_and_unrelated() {
        let fwd = table(Direction::Forward, &[("a", "a", 1.0), ("b", "b", 1.0)]);
        let rev = table(Direction::Reverse, &[("a", "a", 1.0), ("b", "b", 1.0)]);
        let idf = IdfWeights::compute(&[toks("a b")]).unwrap();
        let s = LexicalSimilarity { forward: &fwd, reverse: &rev, idf_src: &idf, idf_tgt: &idf };
        assert_eq!(s.score(&toks("a b"), &toks("a b")).unwrap(), 1.0);
        let empty_f = table(Direction::Forward, &[]);
        let empty_r = table(Direction::Reverse, &[]);
        let s = LexicalSimilarity { forward: &empty_f, reverse: &empty_r, idf_src: &idf, idf_tgt: &idf };
        assert_eq!(s.score(&toks("a b"), &toks("c d")).unwrap(), 0.0);
    }

    #[test]
    fn segment_scorer_matches_joined_scoring() {
        let fwd = table(Direction::Forward, &[("a", "x", 0.9), ("a", "y", 0.1), ("b", "y", 0.7), ("c", "z", 1.0)]);
        let rev = table(Direction::Reverse, &[("x", "a", 1.0), ("y", "b", 0.8), ("y", "c", 0.2)]);
        let idf = IdfWeights::compute(&[toks("a b"), toks("c a"), toks("x y"), toks("z")]).unwrap();
        let s = LexicalSimilarity { forward: &fwd, reverse: &rev, idf_src: &idf, idf_tgt: &idf };
        let src = vec![toks("a b"), toks("c"), toks("b q a")];
        let tgt = vec![toks("x"), toks("y z"), toks("w")];
        let seg = SegmentScorer::new(&s, &src, &tgt);
        for ks in 0..3 {
            for ke in ks + 1..=3 {
                for ls in 0..3 {
                    for le in ls + 1..=3 {
                        let e: Vec<String> = src[ks..ke].concat();
                        let f: Vec<String> = tgt[ls..le].concat();
                        assert_eq!(seg.score(ks..ke, ls..le), s.score(&e, &f).unwrap());
                    }
                }
            }
        }
    }
}
