//! Word-translation tables trained by EM.
//!
//! The model is IBM Model 1 with an optional fixed diagonal prior: target
//! position `j` of `n` links to source position `i` of `m` with prior
//! `(1 - p0) * exp(-λ |i/m - j/n|) / Z_j`, or to the null word with prior `p0`.
//! With `λ = 0` this is Model 1 with a null word.
//!
//! The E-step runs over a fixed number of corpus shards in parallel; shard
//! counts are merged in shard order, so results do not depend on the thread
//! count.

use std::fmt::Write as _;
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const NULL_TOKEN: &str = "<null>";
const NULL_ID: u32 = 0;
const SHARDS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlignerConfig {
    pub em_iterations: usize,
    /// Diagonal tension λ; 0 disables the positional prior.
    pub diagonal_tension: f64,
    /// Prior probability of linking a target word to the null word.
    pub null_prob: f64,
    /// Entries below this are pruned after the final iteration.
    pub prob_floor: f64,
}

impl Default for AlignerConfig {
    fn default() -> Self {
        Self { em_iterations: 5, diagonal_tension: 4.0, null_prob: 0.08, prob_floor: 1e-9 }
    }
}

impl AlignerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.em_iterations == 0 {
            return Err(Error::Config("em_iterations must be >= 1".into()));
        }
        if !(self.diagonal_tension >= 0.0 && self.diagonal_tension.is_finite()) {
            return Err(Error::Config("diagonal_tension must be a nonnegative number".into()));
        }
        if !(0.0..1.0).contains(&self.null_prob) {
            return Err(Error::Config("null_prob must lie in [0, 1)".into()));
        }
        if !(0.0..1.0).contains(&self.prob_floor) {
            return Err(Error::Config("prob_floor must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainingStats {
    /// Corpus log-likelihood computed in each E-step (under the parameters
    /// entering that iteration).
    pub log_likelihood: Vec<f64>,
    /// Per-target-token perplexity of the last E-step.
    pub perplexity: f64,
    /// Number of stored (source, target) entries after pruning.
    pub table_size: usize,
    /// Pairs skipped because one side was empty.
    pub skipped_pairs: usize,
}

/// Sparse conditional distribution `P(target | source)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TranslationTable {
    direction: Direction,
    src_vocab: Vec<String>,
    src_index: FxHashMap<String, u32>,
    tgt_vocab: Vec<String>,
    tgt_index: FxHashMap<String, u32>,
    /// Per source id, entries sorted by target id.
    rows: Vec<Vec<(u32, f64)>>,
    row_max: Vec<f64>,
}

#[derive(Debug, Default)]
struct Vocab {
    words: Vec<String>,
    index: FxHashMap<String, u32>,
}

impl Vocab {
    fn with_null() -> Self {
        let mut v = Self::default();
        v.intern(NULL_TOKEN);
        v
    }

    fn intern(&mut self, w: &str) -> u32 {
        if let Some(&id) = self.index.get(w) {
            return id;
        }
        let id = self.words.len() as u32;
        self.words.push(w.to_string());
        self.index.insert(w.to_string(), id);
        id
    }
}

impl TranslationTable {
    /// Build from explicit `(source, target, prob)` entries. The null token is
    /// always present in the source vocabulary.
    pub fn from_entries<S: AsRef<str>, T: AsRef<str>>(
        direction: Direction,
        entries: impl IntoIterator<Item = (S, T, f64)>,
    ) -> Self {
        let mut src = Vocab::with_null();
        let mut tgt = Vocab::default();
        let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new()];
        for (s, t, p) in entries {
            let si = src.intern(s.as_ref()) as usize;
            let ti = tgt.intern(t.as_ref());
            if rows.len() <= si {
                rows.resize(si + 1, Vec::new());
            }
            match rows[si].iter_mut().find(|(id, _)| *id == ti) {
                Some(e) => e.1 = p,
                None => rows[si].push((ti, p)),
            }
        }
        rows.resize(src.words.len(), Vec::new());
        Self::assemble(direction, src, tgt, rows)
    }

    fn assemble(direction: Direction, src: Vocab, tgt: Vocab, mut rows: Vec<Vec<(u32, f64)>>) -> Self {
        for row in &mut rows {
            row.sort_by_key(|(t, _)| *t);
        }
        let row_max = rows.iter().map(|r| r.iter().map(|(_, p)| *p).fold(0.0, f64::max)).collect();
        Self {
            direction,
            src_vocab: src.words,
            src_index: src.index,
            tgt_vocab: tgt.words,
            tgt_index: tgt.index,
            rows,
            row_max,
        }
    }

    pub fn direction(&self) -> Direction {
        self.direction
    }

    /// Stored probability of `t` given `s`, or 0 for absent pairs.
    pub fn lookup(&self, s: &str, t: &str) -> f64 {
        match (self.src_index.get(s), self.tgt_index.get(t)) {
            (Some(&si), Some(&ti)) => self.lookup_ids(si, ti),
            _ => 0.0,
        }
    }

    pub fn lookup_null(&self, t: &str) -> f64 {
        self.lookup(NULL_TOKEN, t)
    }

    fn lookup_ids(&self, si: u32, ti: u32) -> f64 {
        let row = &self.rows[si as usize];
        match row.binary_search_by_key(&ti, |(t, _)| *t) {
            Ok(k) => row[k].1,
            Err(_) => 0.0,
        }
    }

    pub fn src_id(&self, s: &str) -> Option<u32> {
        self.src_index.get(s).copied()
    }

    pub fn tgt_id(&self, t: &str) -> Option<u32> {
        self.tgt_index.get(t).copied()
    }

    /// Probability by ids; `None` ids (out-of-vocabulary tokens) give 0.
    pub fn prob_by_id(&self, s: Option<u32>, t: Option<u32>) -> f64 {
        match (s, t) {
            (Some(s), Some(t)) => self.lookup_ids(s, t),
            _ => 0.0,
        }
    }

    /// True when `s` has at least one stored entry.
    pub fn has_row(&self, s: &str) -> bool {
        self.src_id(s).is_some_and(|i| !self.rows[i as usize].is_empty())
    }

    pub fn has_row_id(&self, s: Option<u32>) -> bool {
        s.is_some_and(|i| !self.rows[i as usize].is_empty())
    }

    /// Largest probability in the row of `s` (0 when absent).
    pub fn row_max_id(&self, s: Option<u32>) -> f64 {
        s.map_or(0.0, |i| self.row_max[i as usize])
    }

    pub fn row(&self, s: &str) -> Vec<(&str, f64)> {
        self.src_id(s)
            .map(|i| self.rows[i as usize].iter().map(|&(t, p)| (self.tgt_vocab[t as usize].as_str(), p)).collect())
            .unwrap_or_default()
    }

    /// Sum of the row of `s` (1 up to rounding for every trained row).
    pub fn row_sum(&self, s: &str) -> f64 {
        self.row(s).iter().map(|(_, p)| p).sum()
    }

    pub fn source_tokens(&self) -> impl Iterator<Item = &str> {
        self.src_vocab
            .iter()
            .zip(&self.rows)
            .filter(|(_, r)| !r.is_empty())
            .map(|(w, _)| w.as_str())
    }

    pub fn len(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All entries sorted by (source, descending probability, target).
    pub fn sorted_entries(&self) -> Vec<(&str, &str, f64)> {
        let mut out: Vec<(&str, &str, f64)> = Vec::with_capacity(self.len());
        for (si, row) in self.rows.iter().enumerate() {
            for &(ti, p) in row {
                out.push((&self.src_vocab[si], &self.tgt_vocab[ti as usize], p));
            }
        }
        out.sort_by(|a, b| a.0.cmp(b.0).then(b.2.total_cmp(&a.2)).then(a.1.cmp(b.1)));
        out
    }

    /// Write as `src<TAB>tgt<TAB>prob`, sorted by (src, -prob).
    pub fn save_tsv(&self, path: &Path) -> Result<()> {
        let mut buf = String::new();
        for (s, t, p) in self.sorted_entries() {
            let _ = writeln!(buf, "{s}\t{t}\t{p}");
        }
        std::fs::write(path, buf).map_err(|e| Error::io(path, e))
    }

    pub fn load_tsv(path: &Path, direction: Direction) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut entries = Vec::new();
        for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let mut cols = line.split('\t');
            let (Some(s), Some(t), Some(p), None) = (cols.next(), cols.next(), cols.next(), cols.next()) else {
                return Err(Error::parse(path, idx + 1, "expected 3 tab-separated columns"));
            };
            let p: f64 = p
                .parse()
                .map_err(|_| Error::parse(path, idx + 1, format!("invalid probability `{p}`")))?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::parse(path, idx + 1, format!("probability {p} outside (0, 1]")));
            }
            entries.push((s.to_string(), t.to_string(), p));
        }
        Ok(Self::from_entries(direction, entries))
    }

    /// Per-target-word log-probability of `tgt` given `src` under the
    /// diagonal-prior model, averaged over target tokens. Per-token
    /// probabilities are floored at `floor` to stay finite.
    pub fn sentence_log_prob<S: AsRef<str>, T: AsRef<str>>(
        &self,
        src: &[S],
        tgt: &[T],
        tension: f64,
        null_prob: f64,
        floor: f64,
    ) -> f64 {
        if src.is_empty() || tgt.is_empty() {
            return floor.ln();
        }
        let src_ids: Vec<Option<u32>> = src.iter().map(|s| self.src_id(s.as_ref())).collect();
        let m = src.len();
        let n = tgt.len();
        let mut prior = vec![0.0; m];
        let mut total = 0.0;
        for (j, t) in tgt.iter().enumerate() {
            let ti = self.tgt_id(t.as_ref());
            diagonal_prior(j, m, n, tension, null_prob, &mut prior);
            let mut p = null_prob * self.prob_by_id(Some(NULL_ID), ti);
            for (i, si) in src_ids.iter().enumerate() {
                p += prior[i] * self.prob_by_id(*si, ti);
            }
            total += p.max(floor).ln();
        }
        total / n as f64
    }
}

/// Fill `out[i]` with the prior of linking target position `j` (0-based) to
/// source position `i` (0-based): `(1 - p0) exp(-λ|(i+1)/m - (j+1)/n|) / Z`.
fn diagonal_prior(j: usize, m: usize, n: usize, tension: f64, null_prob: f64, out: &mut [f64]) {
    let jj = (j + 1) as f64 / n as f64;
    if tension == 0.0 {
        out.fill((1.0 - null_prob) / m as f64);
        return;
    }
    let mut z = 0.0;
    for (i, o) in out.iter_mut().enumerate() {
        let w = (-tension * ((i + 1) as f64 / m as f64 - jj).abs()).exp();
        *o = w;
        z += w;
    }
    let scale = (1.0 - null_prob) / z;
    for o in out.iter_mut() {
        *o *= scale;
    }
}

/// Forward and reverse tables plus their training statistics.
#[derive(Debug, Clone)]
pub struct AlignerOutput {
    pub forward: TranslationTable,
    pub reverse: TranslationTable,
    pub forward_stats: TrainingStats,
    pub reverse_stats: TrainingStats,
}

/// Train `P(tgt | src)` (forward) and `P(src | tgt)` (reverse) on tokenized
/// sentence pairs. Pairs with an empty side are skipped and counted.
pub fn train_aligner<S: AsRef<str> + Sync>(
    pairs: &[(Vec<S>, Vec<S>)],
    config: &AlignerConfig,
) -> Result<AlignerOutput> {
    config.validate()?;
    if pairs.is_empty() {
        return Err(Error::InvalidInput("cannot train an aligner on an empty corpus".into()));
    }
    let fwd_view: Vec<(&[S], &[S])> = pairs.iter().map(|(s, t)| (s.as_slice(), t.as_slice())).collect();
    let rev_view: Vec<(&[S], &[S])> = pairs.iter().map(|(s, t)| (t.as_slice(), s.as_slice())).collect();
    let ((forward, forward_stats), (reverse, reverse_stats)) = rayon::join(
        || train_direction(&fwd_view, config, Direction::Forward),
        || train_direction(&rev_view, config, Direction::Reverse),
    );
    let (forward, forward_stats) = (forward?, forward_stats);
    let (reverse, reverse_stats) = (reverse?, reverse_stats);
    Ok(AlignerOutput { forward, reverse, forward_stats, reverse_stats })
}

type Encoded = (Vec<u32>, Vec<u32>);

fn train_direction<S: AsRef<str> + Sync>(
    pairs: &[(&[S], &[S])],
    config: &AlignerConfig,
    direction: Direction,
) -> (Result<TranslationTable>, TrainingStats) {
    let mut stats = TrainingStats::default();
    let mut src = Vocab::with_null();
    let mut tgt = Vocab::default();
    let mut corpus: Vec<Encoded> = Vec::with_capacity(pairs.len());
    for (s, t) in pairs {
        if s.is_empty() || t.is_empty() {
            stats.skipped_pairs += 1;
            continue;
        }
        let mut e = Vec::with_capacity(s.len() + 1);
        e.push(NULL_ID);
        e.extend(s.iter().map(|w| src.intern(w.as_ref())));
        let f = t.iter().map(|w| tgt.intern(w.as_ref())).collect();
        corpus.push((e, f));
    }
    if corpus.is_empty() {
        return (Err(Error::InvalidInput("every pair has an empty side".into())), stats);
    }

    // Cell ids for every co-occurring (source, target) pair.
    let mut cells: FxHashMap<(u32, u32), u32> = FxHashMap::default();
    let mut cell_src: Vec<u32> = Vec::new();
    let mut cell_tgt: Vec<u32> = Vec::new();
    for (e, f) in &corpus {
        for &fj in f {
            for &ei in e {
                cells.entry((ei, fj)).or_insert_with(|| {
                    cell_src.push(ei);
                    cell_tgt.push(fj);
                    (cell_src.len() - 1) as u32
                });
            }
        }
    }
    let n_cells = cell_src.len();
    let n_src = src.words.len();
    let mut params = vec![1.0 / tgt.words.len() as f64; n_cells];
    let tgt_tokens: usize = corpus.iter().map(|(_, f)| f.len()).sum();
    let chunk = corpus.len().div_ceil(SHARDS).max(1);

    for _ in 0..config.em_iterations {
        let shard_results: Vec<(FxHashMap<u32, f64>, f64)> = corpus
            .par_chunks(chunk)
            .map(|shard| e_step(shard, &cells, &params, config))
            .collect();
        let mut counts = vec![0.0; n_cells];
        let mut ll = 0.0;
        for (shard_counts, shard_ll) in &shard_results {
            ll += shard_ll;
            for (&cell, &c) in shard_counts {
                counts[cell as usize] += c;
            }
        }
        stats.log_likelihood.push(ll);

        let mut row_totals = vec![0.0; n_src];
        for (cell, &c) in counts.iter().enumerate() {
            row_totals[cell_src[cell] as usize] += c;
        }
        for (cell, p) in params.iter_mut().enumerate() {
            let total = row_totals[cell_src[cell] as usize];
            // Rows that received no mass (null with p0 = 0) keep their values.
            if total > 0.0 {
                *p = counts[cell] / total;
            }
        }
    }
    stats.perplexity = (-stats.log_likelihood.last().copied().unwrap_or(0.0) / tgt_tokens as f64).exp();

    // Prune, then renormalize surviving rows.
    let mut rows: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n_src];
    for cell in 0..n_cells {
        let p = params[cell];
        if p >= config.prob_floor && p > 0.0 {
            rows[cell_src[cell] as usize].push((cell_tgt[cell], p));
        }
    }
    for row in &mut rows {
        let sum: f64 = row.iter().map(|(_, p)| p).sum();
        if sum > 0.0 {
            for e in row.iter_mut() {
                e.1 /= sum;
            }
        }
    }
    let table = TranslationTable::assemble(direction, src, tgt, rows);
    stats.table_size = table.len();
    (Ok(table), stats)
}

fn e_step(
    shard: &[Encoded],
    cells: &FxHashMap<(u32, u32), u32>,
    params: &[f64],
    config: &AlignerConfig,
) -> (FxHashMap<u32, f64>, f64) {
    let mut counts: FxHashMap<u32, f64> = FxHashMap::default();
    let mut ll = 0.0;
    let mut prior = Vec::new();
    let mut post = Vec::new();
    let mut ids = Vec::new();
    for (e, f) in shard {
        let m = e.len() - 1;
        let n = f.len();
        prior.resize(m, 0.0);
        for (j, &fj) in f.iter().enumerate() {
            diagonal_prior(j, m, n, config.diagonal_tension, config.null_prob, &mut prior);
            post.clear();
            ids.clear();
            let mut total = 0.0;
            for (i, &ei) in e.iter().enumerate() {
                let cell = cells[&(ei, fj)];
                let a = if i == 0 { config.null_prob } else { prior[i - 1] };
                let v = a * params[cell as usize];
                post.push(v);
                ids.push(cell);
                total += v;
            }
            if total <= 0.0 {
                continue;
            }
            ll += total.ln();
            for (&cell, &v) in ids.iter().zip(&post) {
                if v > 0.0 {
                    *counts.entry(cell).or_default() += v / total;
                }
            }
        }
    }
    (counts, ll)
}

/// Viterbi word links: for each target position the most probable source
/// position under `t(f|e) * prior`. Positions are 1-based; source index 0 is
/// the null word. Ties go to the smaller source index.
pub fn align_pair<S: AsRef<str>, T: AsRef<str>>(
    table: &TranslationTable,
    src: &[S],
    tgt: &[T],
    config: &AlignerConfig,
) -> Vec<(usize, usize)> {
    let m = src.len();
    let n = tgt.len();
    let src_ids: Vec<Option<u32>> = src.iter().map(|s| table.src_id(s.as_ref())).collect();
    let mut prior = vec![0.0; m];
    let mut links = Vec::with_capacity(n);
    for (j, t) in tgt.iter().enumerate() {
        let ti = table.tgt_id(t.as_ref());
        if m > 0 {
            diagonal_prior(j, m, n, config.diagonal_tension, config.null_prob, &mut prior);
        }
        let mut best = (0usize, config.null_prob * table.prob_by_id(Some(NULL_ID), ti));
        for (i, si) in src_ids.iter().enumerate() {
            let v = prior[i] * table.prob_by_id(*si, ti);
            if v > best.1 {
                best = (i + 1, v);
            }
        }
        links.push((best.0, j + 1));
    }
    links
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    fn corpus(pairs: &[(&str, &str)]) -> Vec<(Vec<String>, Vec<String>)> {
        pairs.iter().map(|(a, b)| (toks(a), toks(b))).collect()
    }

    #[test]
    fn lookup_present_absent_null() {
        let t = TranslationTable::from_entries(
            Direction::Forward,
            [("a", "x", 0.7), ("a", "y", 0.3), (NULL_TOKEN, "x", 0.4), (NULL_TOKEN, "z", 0.6)],
        );
        assert_eq!(t.lookup("a", "x"), 0.7);
        assert_eq!(t.lookup("a", "z"), 0.0);
        assert_eq!(t.lookup("b", "x"), 0.0);
        assert_eq!(t.lookup_null("x"), 0.4);
    }

    #[test]
    fn single_pair_forces_mass() {
        let cfg = AlignerConfig { diagonal_tension: 0.0, null_prob: 0.0, ..Default::default() };
        let out = train_aligner(&corpus(&[("a", "x")]), &cfg).unwrap();
        assert_eq!(out.forward.lookup("a", "x"), 1.0);
        let cfg = AlignerConfig { diagonal_tension: 0.0, ..Default::default() };
        let out = train_aligner(&corpus(&[("a", "x")]), &cfg).unwrap();
        assert_eq!(out.forward.lookup("a", "x"), 1.0);
    }

    #[test]
    fn empty_inputs() {
        let cfg = AlignerConfig::default();
        let empty: Vec<(Vec<String>, Vec<String>)> = Vec::new();
        assert!(train_aligner(&empty, &cfg).is_err());
        let out = train_aligner(&corpus(&[("a", "x"), ("", "y"), ("b", "")]), &cfg).unwrap();
        assert_eq!(out.forward_stats.skipped_pairs, 2);
        assert_eq!(out.reverse_stats.skipped_pairs, 2);
    }

    #[test]
    fn invalid_config() {
        let c = corpus(&[("a", "x")]);
        assert!(train_aligner(&c, &AlignerConfig { em_iterations: 0, ..Default::default() }).is_err());
        assert!(train_aligner(&c, &AlignerConfig { null_prob: 1.0, ..Default::default() }).is_err());
    }

    #[test]
    fn peaked_table_links_diagonally() {
        let t = TranslationTable::from_entries(Direction::Forward, [("a", "x", 1.0), ("b", "y", 1.0)]);
        let links = align_pair(&t, &["a", "b"], &["x", "y"], &AlignerConfig::default());
        assert_eq!(links, [(1, 1), (2, 2)]);
    }

    #[test]
    fn unseen_target_links_to_null() {
        let t = TranslationTable::from_entries(Direction::Forward, [("a", "x", 1.0)]);
        let links = align_pair(&t, &["a"], &["x", "q"], &AlignerConfig::default());
        assert_eq!(links, [(1, 1), (0, 2)]);
    }

    #[test]
    fn uniform_table_with_tension_is_diagonal() {
        // m = n = 2, λ = 4: prior(i=1 | j=1) ∝ 1, prior(i=2 | j=1) ∝ e^{-2}; mirrored for j = 2.
        let t = TranslationTable::from_entries(
            Direction::Forward,
            [("a", "x", 0.5), ("a", "y", 0.5), ("b", "x", 0.5), ("b", "y", 0.5)],
        );
        let links = align_pair(&t, &["a", "b"], &["x", "y"], &AlignerConfig::default());
        assert_eq!(links, [(1, 1), (2, 2)]);
        let flat = AlignerConfig { diagonal_tension: 0.0, ..Default::default() };
        // Without tension all sources tie and the smaller index wins.
        assert_eq!(align_pair(&t, &["a", "b"], &["x", "y"], &flat), [(1, 1), (1, 2)]);
    }

    #[test]
    fn rows_are_stochastic_and_tsv_roundtrips() {
        let c = corpus(&[("a b c", "x y z"), ("a b", "x y"), ("c a", "z x w"), ("b", "y")]);
        let out = train_aligner(&c, &AlignerConfig::default()).unwrap();
        for table in [&out.forward, &out.reverse] {
            for s in table.source_tokens() {
                assert!((table.row_sum(s) - 1.0).abs() < 1e-12, "{s}");
            }
        }
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("fwd.tsv");
        out.forward.save_tsv(&path).unwrap();
        let loaded = TranslationTable::load_tsv(&path, Direction::Forward).unwrap();
        assert_eq!(loaded.sorted_entries(), out.forward.sorted_entries());
        let text = std::fs::read_to_string(&path).unwrap();
        let first: Vec<&str> = text.lines().next().unwrap().split('\t').collect();
        assert_eq!(first[0], NULL_TOKEN);
    }

    #[test]
    fn load_rejects_bad_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.tsv");
        std::fs::write(&path, "a\tx\t0.5\nb\ty\n").unwrap();
        match TranslationTable::load_tsv(&path, Direction::Forward) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
        std::fs::write(&path, "a\tx\tnope\n").unwrap();
        assert!(TranslationTable::load_tsv(&path, Direction::Forward).is_err());
    }
}
