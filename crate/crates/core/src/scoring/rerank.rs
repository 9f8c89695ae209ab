//! Rank normalization, reranking discounts and ensembling.

use std::io::BufRead;
use std::path::Path;

use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::text_prep::LangIdModel;
use crate::{Error, Lang, LangPair, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub src: String,
    pub tgt: String,
    pub raw_score: f64,
    pub norm_score: f64,
    pub final_score: f64,
}

/// Pair texts with raw scores and rank-normalize; `final_score` starts at
/// the normalized score.
pub fn scored_pairs(pairs: &[(String, String)], raw: &[f64]) -> Result<Vec<ScoredPair>> {
    if pairs.len() != raw.len() {
        return Err(Error::InvalidInput(format!("{} pairs but {} scores", pairs.len(), raw.len())));
    }
    let norm = rank_normalize(raw);
    Ok(pairs
        .iter()
        .zip(raw)
        .zip(norm)
        .map(|(((src, tgt), &raw_score), norm_score)| ScoredPair {
            src: src.clone(),
            tgt: tgt.clone(),
            raw_score,
            norm_score,
            final_score: norm_score,
        })
        .collect())
}

/// Indices sorted by descending score; ties keep input order.
pub fn descending_order(scores: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..scores.len()).collect();
    idx.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));
    idx
}

/// `1 - rank / N` with 1-based ranks in descending, stable order.
pub fn rank_normalize(raw: &[f64]) -> Vec<f64> {
    let n = raw.len();
    let mut out = vec![0.0; n];
    for (r, i) in descending_order(raw).into_iter().enumerate() {
        out[i] = 1.0 - (r + 1) as f64 / n as f64;
    }
    out
}

/// Which sides must pass language identification.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct LidSides {
    pub src: bool,
    pub tgt: bool,
}

impl Default for LidSides {
    fn default() -> Self {
        Self { src: true, tgt: true }
    }
}

/// Multiply `final_score` by `1 - alpha` for pairs whose checked sides are
/// not identified as the expected language. Returns the discounted count.
pub fn rerank_langid(
    scored: &mut [ScoredPair],
    model: &LangIdModel,
    expected: (Lang, Lang),
    alpha: f64,
    sides: LidSides,
) -> usize {
    if alpha == 0.0 {
        return 0;
    }
    let fails = |text: &str, lang: Lang| model.identify(text).lang != Some(lang);
    let mut count = 0;
    for p in scored.iter_mut() {
        let failed = (sides.src && fails(&p.src, expected.0)) || (sides.tgt && fails(&p.tgt, expected.1));
        if failed {
            p.final_score *= 1.0 - alpha;
            count += 1;
        }
    }
    count
}

/// Pool of source-side n-grams seen so far in a scan.
#[derive(Debug, Clone)]
pub struct NgramPool {
    n: usize,
    seen: FxHashSet<String>,
}

impl NgramPool {
    pub fn new(n: usize) -> Self {
        Self { n: n.max(1), seen: FxHashSet::default() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The n-grams of `tokens`; a sequence shorter than `n` is one gram.
    pub fn grams<S: AsRef<str>>(&self, tokens: &[S]) -> Vec<String> {
        let join = |w: &[S]| w.iter().map(AsRef::as_ref).collect::<Vec<_>>().join("\u{1f}");
        if tokens.len() < self.n {
            return vec![join(tokens)];
        }
        tokens.windows(self.n).map(join).collect()
    }

    pub fn all_seen(&self, grams: &[String]) -> bool {
        grams.iter().all(|g| self.seen.contains(g))
    }

    pub fn insert(&mut self, grams: Vec<String>) {
        self.seen.extend(grams);
    }

    pub fn contains(&self, gram: &str) -> bool {
        self.seen.contains(gram)
    }

    pub fn len(&self) -> usize {
        self.seen.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seen.is_empty()
    }
}

/// Scan pairs by descending `final_score`; a pair whose source n-grams are
/// all already pooled is multiplied by `1 - beta`. Returns the discounted count.
pub fn rerank_ngram_coverage<F>(scored: &mut [ScoredPair], tokenize: F, n: usize, beta: f64) -> usize
where
    F: Fn(&str) -> Vec<String>,
{
    if beta == 0.0 {
        return 0;
    }
    let finals: Vec<f64> = scored.iter().map(|p| p.final_score).collect();
    let mut pool = NgramPool::new(n);
    let mut count = 0;
    for i in descending_order(&finals) {
        let grams = pool.grams(&tokenize(&scored[i].src));
        if pool.all_seen(&grams) {
            scored[i].final_score *= 1.0 - beta;
            count += 1;
        }
        pool.insert(grams);
    }
    count
}

/// Elementwise mean of K score lists. Each element's values are summed in
/// sorted order, so the result does not depend on list order.
pub fn ensemble(lists: &[Vec<f64>]) -> Result<Vec<f64>> {
    let Some(first) = lists.first() else {
        return Err(Error::InvalidInput("ensemble needs at least one score list".into()));
    };
    if let Some(bad) = lists.iter().find(|l| l.len() != first.len()) {
        return Err(Error::InvalidInput(format!("score list lengths differ: {} vs {}", first.len(), bad.len())));
    }
    let mut vals = Vec::with_capacity(lists.len());
    Ok((0..first.len())
        .map(|i| {
            vals.clear();
            vals.extend(lists.iter().map(|l| l[i]));
            vals.sort_by(f64::total_cmp);
            // Running mean: exact when all values are equal.
            let mut mean = 0.0;
            for (k, v) in vals.iter().enumerate() {
                mean += (v - mean) / (k + 1) as f64;
            }
            mean
        })
        .collect())
}

/// Read one real per line. With `expected`, the count must match.
pub fn load_external_scores(path: &Path, expected: Option<usize>) -> Result<Vec<f64>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let text = line.trim();
        let v: f64 = text.parse().map_err(|_| Error::parse(path, k + 1, format!("not a number: {text:?}")))?;
        if !v.is_finite() {
            return Err(Error::parse(path, k + 1, format!("score must be finite: {text:?}")));
        }
        out.push(v);
    }
    if let Some(n) = expected {
        if out.len() != n {
            return Err(Error::parse(path, out.len() + 1, format!("expected {n} scores, found {}", out.len())));
        }
    }
    Ok(out)
}

/// One score per line, shortest round-trip decimal.
pub fn write_scores(path: &Path, scores: &[f64]) -> Result<()> {
    let mut s = String::with_capacity(scores.len() * 20);
    for v in scores {
        s.push_str(&format!("{v}\n"));
    }
    std::fs::write(path, s).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RerankPreset {
    pub alpha: f64,
    pub n: usize,
    pub beta: f64,
    pub lid_sides: LidSides,
}

impl Default for RerankPreset {
    fn default() -> Self {
        Self::km_en()
    }
}

impl RerankPreset {
    pub fn km_en() -> Self {
        Self { alpha: 0.2, n: 2, beta: 0.2, lid_sides: LidSides::default() }
    }

    pub fn ps_en() -> Self {
        Self { alpha: 0.0, n: 1, beta: 0.1, lid_sides: LidSides::default() }
    }

    pub fn for_pair(pair: LangPair) -> Self {
        match pair {
            LangPair::KmEn => Self::km_en(),
            LangPair::PsEn => Self::ps_en(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) || !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config("rerank alpha and beta must lie in [0, 1]".into()));
        }
        if self.n == 0 {
            return Err(Error::Config("rerank n must be >= 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sp(src: &str, score: f64) -> ScoredPair {
        ScoredPair { src: src.into(), tgt: "t".into(), raw_score: score, norm_score: score, final_score: score }
    }

    fn ws(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn rank_normalize_examples() {
        assert_eq!(rank_normalize(&[0.3, 0.9, 0.1, 0.5]), [0.25, 0.75, 0.0, 0.5]);
        assert_eq!(rank_normalize(&[42.0]), [0.0]);
        let tie = rank_normalize(&[0.5, 0.2, 0.5]);
        assert!(tie[0] > tie[2]);
    }

    #[test]
    fn coverage_discounts_repeats() {
        let mut s = vec![sp("a b c", 0.9), sp("a b c", 0.5), sp("x y", 0.7)];
        assert_eq!(rerank_ngram_coverage(&mut s, ws, 2, 0.2), 1);
        assert_eq!(s[0].final_score, 0.9);
        assert_eq!(s[1].final_score, 0.5 * 0.8);
        assert_eq!(s[2].final_score, 0.7);

        let mut s = vec![sp("a", 0.9), sp("b", 0.5), sp("c", 0.7)];
        assert_eq!(rerank_ngram_coverage(&mut s, ws, 2, 0.2), 0);
        let before = s.clone();
        let mut dup = vec![sp("a b", 0.9), sp("a b", 0.5)];
        assert_eq!(rerank_ngram_coverage(&mut dup, ws, 2, 0.0), 0);
        assert_eq!(s, before);
    }

    #[test]
    fn short_sentence_is_one_gram() {
        let pool = NgramPool::new(3);
        assert_eq!(pool.grams(&ws("a b")), ["a\u{1f}b"]);
        assert_eq!(pool.grams(&ws("a b c d")).len(), 2);
    }

    #[test]
    fn ensemble_algebra() {
        let a = vec![0.75, 0.5, 0.25, 0.0];
        assert_eq!(ensemble(&[a.clone(), a.clone(), a.clone()]).unwrap(), a);
        assert_eq!(ensemble(std::slice::from_ref(&a)).unwrap(), a);
        let rev: Vec<f64> = a.iter().rev().copied().collect();
        for v in ensemble(&[a.clone(), rev]).unwrap() {
            assert!((v - 3.0 / 8.0).abs() < 1e-12);
        }
        assert!(ensemble(&[a, vec![0.1]]).is_err());
        assert!(ensemble(&[]).is_err());
    }

    #[test]
    fn external_scores() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.txt");
        std::fs::write(&p, "0.1\n0.9\n0.5\n").unwrap();
        assert_eq!(load_external_scores(&p, Some(3)).unwrap(), [0.1, 0.9, 0.5]);
        std::fs::write(&p, "").unwrap();
        assert!(load_external_scores(&p, Some(3)).is_err());
        std::fs::write(&p, "0.1\nabc\n").unwrap();
        match load_external_scores(&p, None) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        write_scores(&p, &[0.1, 1.0 / 3.0]).unwrap();
        assert_eq!(load_external_scores(&p, Some(2)).unwrap(), [0.1, 1.0 / 3.0]);
    }

    #[test]
    fn presets() {
        assert_eq!(RerankPreset::for_pair(LangPair::KmEn), RerankPreset::km_en());
        let ps = RerankPreset::ps_en();
        assert_eq!((ps.alpha, ps.n, ps.beta), (0.0, 1, 0.1));
        assert!(RerankPreset { n: 0, ..ps }.validate().is_err());
    }
}
