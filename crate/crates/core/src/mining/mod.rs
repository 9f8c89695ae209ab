//! Sentence-pair mining from document pairs.
//!
//! Each document side is split into initial segments. Two passes propose
//! pairs: a greedy one-to-one scan ([`greedy_extract`]) and a monotone
//! many-to-many segmentation ([`dp_segment`]). Their union is deduplicated
//! across the whole collection. [`iterative_mine`] alternates table training
//! and mining, feeding confident pairs back into the training pool.

mod dedup;
mod dp;
mod greedy;
mod iterate;

use std::fmt;
use std::io::{BufRead, Write};
use std::ops::Range;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use dedup::{dedup, dedup_key, Deduper};
pub use dp::{dp_segment, group_value, SCORE_FLOOR};
pub use greedy::greedy_extract;
pub use iterate::{iterative_mine, IterationReport, IterativeOutcome, SeedPair};

use crate::similarity::{LexicalSimilarity, SegmentScorer};
use crate::text_prep::{split_sentences, Tokenizer};
use crate::{Error, Lang, Result};

/// A document pair split into initial segments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DocumentPair {
    pub doc_id: String,
    pub src_segments: Vec<String>,
    pub tgt_segments: Vec<String>,
}

impl DocumentPair {
    pub fn from_text(doc_id: impl Into<String>, src_text: &str, tgt_text: &str, src: Lang, tgt: Lang) -> Self {
        Self {
            doc_id: doc_id.into(),
            src_segments: split_sentences(src_text, src),
            tgt_segments: split_sentences(tgt_text, tgt),
        }
    }
}

/// One aligned group: half-open, 0-based ranges of initial segments.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub src: Range<usize>,
    pub tgt: Range<usize>,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Segmentation {
    pub groups: Vec<Group>,
    /// Total objective (sum of per-group log values).
    pub score: f64,
}

impl Segmentation {
    /// Check monotonicity, completeness and the join limit.
    pub fn validate(&self, a: usize, b: usize, join_limit: usize) -> Result<(), String> {
        let (mut i, mut j) = (0, 0);
        for (n, g) in self.groups.iter().enumerate() {
            if g.src.start != i || g.tgt.start != j {
                return Err(format!("group {n} does not start where the previous ended"));
            }
            if g.src.is_empty() || g.tgt.is_empty() {
                return Err(format!("group {n} is empty on one side"));
            }
            if g.src.len() > join_limit || g.tgt.len() > join_limit {
                return Err(format!("group {n} exceeds the join limit {join_limit}"));
            }
            i = g.src.end;
            j = g.tgt.end;
        }
        if (i, j) != (a, b) {
            return Err(format!("segmentation covers ({i}, {j}) of ({a}, {b})"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MiningConfig {
    /// Greedy acceptance threshold.
    pub sim_threshold: f64,
    /// Maximum initial segments per side in a DP group.
    pub join_limit: usize,
    /// Per-group log prior added to the DP objective.
    pub log_c: f64,
    /// Minimum score for a DP group to be emitted; `None` uses `sim_threshold`.
    pub dp_min_pair_score: Option<f64>,
    /// Minimum similarity for a mined pair to join the next training pool.
    pub quality_threshold: f64,
    pub iterations: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        Self {
            sim_threshold: 0.5,
            join_limit: 3,
            log_c: 0.0,
            dp_min_pair_score: None,
            quality_threshold: 0.6,
            iterations: 3,
        }
    }
}

impl MiningConfig {
    pub fn validate(&self) -> Result<()> {
        let unit = |name: &str, v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(())
            } else {
                Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")))
            }
        };
        unit("sim_threshold", self.sim_threshold)?;
        if let Some(v) = self.dp_min_pair_score {
            unit("dp_min_pair_score", v)?;
        }
        if self.quality_threshold.is_nan() || self.quality_threshold < 0.0 {
            return Err(Error::Config("quality_threshold must be nonnegative".into()));
        }
        if self.join_limit == 0 {
            return Err(Error::Config("join_limit must be >= 1".into()));
        }
        if !self.log_c.is_finite() {
            return Err(Error::Config("log_c must be finite".into()));
        }
        Ok(())
    }

    pub fn dp_threshold(&self) -> f64 {
        self.dp_min_pair_score.unwrap_or(self.sim_threshold)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Greedy,
    Dp,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Greedy => "greedy",
            Provenance::Dp => "dp",
        })
    }
}

impl FromStr for Provenance {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "greedy" => Ok(Provenance::Greedy),
            "dp" => Ok(Provenance::Dp),
            other => Err(format!("unknown provenance `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedPair {
    pub src: String,
    pub tgt: String,
    pub similarity: f64,
    pub provenance: Provenance,
    /// 1-based mining iteration that first produced the pair.
    pub iteration: usize,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct MinedCorpus {
    pub pairs: Vec<MinedPair>,
    /// Pairs first found in each iteration (index 0 = iteration 1).
    pub per_iteration: Vec<usize>,
    /// Documents with an empty side.
    pub skipped_documents: usize,
}

impl MinedCorpus {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// `src<TAB>tgt<TAB>similarity<TAB>provenance<TAB>iteration`.
    pub fn write_tsv(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let mut write = || -> std::io::Result<()> {
            for p in &self.pairs {
                writeln!(
                    w,
                    "{}\t{}\t{}\t{}\t{}",
                    clean_field(&p.src),
                    clean_field(&p.tgt),
                    p.similarity,
                    p.provenance,
                    p.iteration
                )?;
            }
            w.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }

    pub fn read_tsv(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut pairs = Vec::new();
        for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            let line = line.trim_end_matches('\r');
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 5 {
                return Err(Error::parse(path, idx + 1, format!("expected 5 columns, found {}", cols.len())));
            }
            let bad = |what: &str| Error::parse(path, idx + 1, format!("invalid {what}"));
            pairs.push(MinedPair {
                src: cols[0].to_string(),
                tgt: cols[1].to_string(),
                similarity: cols[2].parse().map_err(|_| bad("similarity"))?,
                provenance: cols[3].parse().map_err(|_| bad("provenance"))?,
                iteration: cols[4].parse().map_err(|_| bad("iteration"))?,
            });
        }
        let mut per_iteration = Vec::new();
        for p in &pairs {
            if p.iteration > per_iteration.len() {
                per_iteration.resize(p.iteration, 0);
            }
            if p.iteration > 0 {
                per_iteration[p.iteration - 1] += 1;
            }
        }
        Ok(Self { pairs, per_iteration, skipped_documents: 0 })
    }
}

/// Replace characters that would break a TSV row.
pub(crate) fn clean_field(s: &str) -> std::borrow::Cow<'_, str> {
    if s.contains(['\t', '\n', '\r']) {
        s.replace(['\t', '\n', '\r'], " ").into()
    } else {
        s.into()
    }
}

#[derive(Deserialize)]
struct DocumentRecord {
    doc_id: String,
    src_text: String,
    tgt_text: String,
}

/// Documents read from JSON lines, plus the number of unreadable lines.
#[derive(Debug, Clone, Default)]
pub struct DocumentSet {
    pub docs: Vec<DocumentPair>,
    pub skipped: usize,
}

/// Read `{"doc_id", "src_text", "tgt_text"}` JSON lines. Lines that fail to
/// parse are skipped and counted.
pub fn read_documents(path: &Path, src: Lang, tgt: Lang) -> Result<DocumentSet> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut set = DocumentSet::default();
    for line in std::io::BufReader::new(file).lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<DocumentRecord>(&line) {
            Ok(r) => set.docs.push(DocumentPair::from_text(r.doc_id, &r.src_text, &r.tgt_text, src, tgt)),
            Err(_) => set.skipped += 1,
        }
    }
    Ok(set)
}

/// Write documents as JSON lines (segments rejoined with newlines).
pub fn write_documents(path: &Path, docs: &[(String, String, String)]) -> Result<()> {
    #[derive(Serialize)]
    struct Out<'a> {
        doc_id: &'a str,
        src_text: &'a str,
        tgt_text: &'a str,
    }
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        for (doc_id, src_text, tgt_text) in docs {
            serde_json::to_writer(&mut w, &Out { doc_id, src_text, tgt_text })?;
            w.write_all(b"\n")?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// Alignment keys of every segment of a document.
#[derive(Debug, Clone)]
pub(crate) struct TokenizedDoc {
    src: Vec<Vec<String>>,
    tgt: Vec<Vec<String>>,
}

pub(crate) fn tokenize_docs(docs: &[DocumentPair], src_tok: &Tokenizer, tgt_tok: &Tokenizer) -> Vec<TokenizedDoc> {
    docs.par_iter()
        .map(|d| TokenizedDoc {
            src: d.src_segments.iter().map(|s| src_tok.keys(s)).collect(),
            tgt: d.tgt_segments.iter().map(|s| tgt_tok.keys(s)).collect(),
        })
        .collect()
}

/// Candidate pairs of one document: greedy matches first, then emitted DP groups.
fn mine_one(
    doc: &DocumentPair,
    toks: &TokenizedDoc,
    sim: &LexicalSimilarity<'_>,
    config: &MiningConfig,
    iteration: usize,
) -> Vec<MinedPair> {
    let a = doc.src_segments.len();
    let b = doc.tgt_segments.len();
    let scorer = SegmentScorer::new(sim, &toks.src, &toks.tgt);
    let score = |s: Range<usize>, t: Range<usize>| scorer.score(s, t);

    let mut out: Vec<MinedPair> = greedy_extract(a, b, score, config.sim_threshold)
        .into_iter()
        .map(|(i, j, s)| MinedPair {
            src: doc.src_segments[i].clone(),
            tgt: doc.tgt_segments[j].clone(),
            similarity: s,
            provenance: Provenance::Greedy,
            iteration,
        })
        .collect();

    if let Some(seg) = dp_segment(a, b, score, config) {
        let min = config.dp_threshold();
        out.extend(seg.groups.into_iter().filter(|g| g.score >= min).map(|g| MinedPair {
            src: doc.src_segments[g.src].join(" "),
            tgt: doc.tgt_segments[g.tgt].join(" "),
            similarity: g.score,
            provenance: Provenance::Dp,
            iteration,
        }));
    }
    out
}

pub(crate) fn mine_tokenized(
    docs: &[DocumentPair],
    toks: &[TokenizedDoc],
    sim: &LexicalSimilarity<'_>,
    config: &MiningConfig,
    iteration: usize,
) -> MinedCorpus {
    let per_doc: Vec<Vec<MinedPair>> = docs
        .par_iter()
        .zip(toks.par_iter())
        .map(|(d, t)| mine_one(d, t, sim, config, iteration))
        .collect();
    let skipped_documents = docs.iter().filter(|d| d.src_segments.is_empty() || d.tgt_segments.is_empty()).count();
    let mut seen = Deduper::new();
    let pairs: Vec<MinedPair> = per_doc.into_iter().flatten().filter(|p| seen.insert(&p.src, &p.tgt)).collect();
    let mut per_iteration = vec![0; iteration.max(1)];
    per_iteration[iteration.max(1) - 1] = pairs.len();
    MinedCorpus { pairs, per_iteration, skipped_documents }
}

/// Tables, weights and tokenizers used to mine one collection.
#[derive(Debug, Clone, Copy)]
pub struct MiningContext<'a> {
    pub sim: LexicalSimilarity<'a>,
    pub src_tokenizer: &'a Tokenizer,
    pub tgt_tokenizer: &'a Tokenizer,
}

/// Mine every document (in parallel) and deduplicate globally, keeping the
/// first occurrence in document order.
pub fn mine_documents(
    docs: &[DocumentPair],
    ctx: &MiningContext<'_>,
    config: &MiningConfig,
    iteration: usize,
) -> MinedCorpus {
    let toks = tokenize_docs(docs, ctx.src_tokenizer, ctx.tgt_tokenizer);
    mine_tokenized(docs, &toks, &ctx.sim, config, iteration)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_detects_gaps_and_overlong_groups() {
        let g = |s: Range<usize>, t: Range<usize>| Group { src: s, tgt: t, score: 0.5 };
        let ok = Segmentation { groups: vec![g(0..1, 0..2), g(1..3, 2..3)], score: 0.0 };
        assert!(ok.validate(3, 3, 3).is_ok());
        assert!(ok.validate(3, 3, 1).is_err());
        assert!(ok.validate(4, 3, 3).is_err());
        let gap = Segmentation { groups: vec![g(0..1, 0..1), g(2..3, 1..3)], score: 0.0 };
        assert!(gap.validate(3, 3, 3).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(MiningConfig::default().validate().is_ok());
        assert!(MiningConfig { sim_threshold: 1.5, ..Default::default() }.validate().is_err());
        assert!(MiningConfig { join_limit: 0, ..Default::default() }.validate().is_err());
        assert_eq!(MiningConfig { dp_min_pair_score: Some(0.7), ..Default::default() }.dp_threshold(), 0.7);
    }

    #[test]
    fn documents_jsonl_skips_bad_lines() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("docs.jsonl");
        std::fs::write(
            &p,
            "{\"doc_id\":\"d1\",\"src_text\":\"a. b.\",\"tgt_text\":\"x.\\ny.\"}\nnot json\n{\"doc_id\":\"d2\"}\n",
        )
        .unwrap();
        let set = read_documents(&p, Lang::Ps, Lang::En).unwrap();
        assert_eq!(set.docs.len(), 1);
        assert_eq!(set.skipped, 2);
        assert_eq!(set.docs[0].src_segments, ["a.", "b."]);
        assert_eq!(set.docs[0].tgt_segments, ["x.", "y."]);
    }

    #[test]
    fn mined_tsv_roundtrip() {
        let corpus = MinedCorpus {
            pairs: vec![
                MinedPair { src: "a".into(), tgt: "b".into(), similarity: 0.75, provenance: Provenance::Greedy, iteration: 1 },
                MinedPair { src: "c d".into(), tgt: "e".into(), similarity: 0.5, provenance: Provenance::Dp, iteration: 2 },
            ],
            per_iteration: vec![1, 1],
            skipped_documents: 0,
        };
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mined.tsv");
        corpus.write_tsv(&p).unwrap();
        assert_eq!(std::fs::read_to_string(&p).unwrap(), "a\tb\t0.75\tgreedy\t1\nc d\te\t0.5\tdp\t2\n");
        assert_eq!(MinedCorpus::read_tsv(&p).unwrap(), corpus);
    }
}
