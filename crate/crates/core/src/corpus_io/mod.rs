//! Corpus files, merging, statistics, subsampling and the end-to-end pipeline.

mod config;
mod pipeline;

use std::fmt;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

pub use config::{PipelineConfig, PipelinePaths, SubsampleOptions};
pub use pipeline::{run_pipeline, Manifest, StageRecord, STAGES};

use crate::mining::{clean_field, Deduper, MinedCorpus, Provenance, SeedPair};
use crate::scoring::{descending_order, ScoredPair};
use crate::text_prep::{is_separator, Tokenizer};
use crate::{Error, Lang, Result};

/// Read a TSV of sentence pairs; the first two columns are used. CRLF line
/// endings are accepted.
pub fn read_pairs(path: &Path) -> Result<Vec<SeedPair>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let mut cols = line.split('\t');
        match (cols.next(), cols.next()) {
            (Some(s), Some(t)) => out.push((s.to_string(), t.to_string())),
            _ => return Err(Error::parse(path, k + 1, "expected at least 2 tab-separated columns")),
        }
    }
    Ok(out)
}

fn write_lines<T>(path: &Path, items: &[T], mut line: impl FnMut(&mut dyn Write, &T) -> std::io::Result<()>) -> Result<()> {
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    let mut write = || -> std::io::Result<()> {
        for item in items {
            line(&mut w, item)?;
        }
        w.flush()
    };
    write().map_err(|e| Error::io(path, e))
}

/// `src<TAB>tgt`, LF-terminated; tabs and line breaks inside fields become spaces.
pub fn write_pairs(path: &Path, pairs: &[SeedPair]) -> Result<()> {
    write_lines(path, pairs, |w, (s, t)| writeln!(w, "{}\t{}", clean_field(s), clean_field(t)))
}

/// Submission format: `src<TAB>tgt<TAB>final_score`.
pub fn write_scored(path: &Path, scored: &[ScoredPair]) -> Result<()> {
    write_lines(path, scored, |w, p| writeln!(w, "{}\t{}\t{}", clean_field(&p.src), clean_field(&p.tgt), p.final_score))
}

/// `src<TAB>tgt<TAB>raw<TAB>norm<TAB>final`.
pub fn write_scored_detail(path: &Path, scored: &[ScoredPair]) -> Result<()> {
    write_lines(path, scored, |w, p| {
        writeln!(w, "{}\t{}\t{}\t{}\t{}", clean_field(&p.src), clean_field(&p.tgt), p.raw_score, p.norm_score, p.final_score)
    })
}

/// Read either the 3-column submission format (the score fills all three
/// score fields) or the 5-column detail format.
pub fn read_scored(path: &Path) -> Result<Vec<ScoredPair>> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (k, line) in std::io::BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        let line = line.strip_suffix('\r').unwrap_or(&line);
        let cols: Vec<&str> = line.split('\t').collect();
        let num = |s: &str| -> Result<f64> {
            s.trim().parse::<f64>().map_err(|_| Error::parse(path, k + 1, format!("invalid score {s:?}")))
        };
        let (raw, norm, fin) = match cols.len() {
            3 => {
                let v = num(cols[2])?;
                (v, v, v)
            }
            5 => (num(cols[2])?, num(cols[3])?, num(cols[4])?),
            n => return Err(Error::parse(path, k + 1, format!("expected 3 or 5 columns, found {n}"))),
        };
        out.push(ScoredPair { src: cols[0].into(), tgt: cols[1].into(), raw_score: raw, norm_score: norm, final_score: fin });
    }
    Ok(out)
}

/// Where a merged pair came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Origin {
    Provided,
    Mined { provenance: Provenance, iteration: usize },
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Provided => f.write_str("provided"),
            Origin::Mined { provenance, iteration } => write!(f, "mined:{provenance}:{iteration}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergedPair {
    pub src: String,
    pub tgt: String,
    pub origin: Origin,
}

/// Provided pairs followed by mined pairs, deduplicated with the mining key;
/// the first occurrence and its origin are kept.
pub fn merge_corpora(provided: &[SeedPair], mined: &[&MinedCorpus]) -> Vec<MergedPair> {
    let mut seen = Deduper::new();
    let mut out = Vec::new();
    for (s, t) in provided {
        if seen.insert(s, t) {
            out.push(MergedPair { src: s.clone(), tgt: t.clone(), origin: Origin::Provided });
        }
    }
    for corpus in mined {
        for p in &corpus.pairs {
            if seen.insert(&p.src, &p.tgt) {
                out.push(MergedPair {
                    src: p.src.clone(),
                    tgt: p.tgt.clone(),
                    origin: Origin::Mined { provenance: p.provenance, iteration: p.iteration },
                });
            }
        }
    }
    out
}

/// `src<TAB>tgt<TAB>origin`.
pub fn write_merged(path: &Path, merged: &[MergedPair]) -> Result<()> {
    write_lines(path, merged, |w, p| writeln!(w, "{}\t{}\t{}", clean_field(&p.src), clean_field(&p.tgt), p.origin))
}

/// How the budget boundary is handled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Keep the pair that crosses the budget.
    #[default]
    Inclusive,
    /// Stop before any pair that would exceed the budget.
    Exclusive,
}

/// How English words are counted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WordCount {
    /// Whitespace tokens of the raw text.
    #[default]
    Raw,
    /// Tokens from the English tokenizer.
    Tokenized,
}

pub fn english_words(text: &str, mode: WordCount) -> usize {
    match mode {
        WordCount::Raw => text.split_whitespace().count(),
        WordCount::Tokenized => Tokenizer::new(Lang::En, None).expect("English needs no lexicon").tokenize(text).len(),
    }
}

/// Take pairs in descending `final_score` order (stable) until the English
/// word count reaches `target_en_words`.
pub fn subsample(scored: &[ScoredPair], target_en_words: usize, boundary: Boundary, count: WordCount) -> Vec<ScoredPair> {
    let finals: Vec<f64> = scored.iter().map(|p| p.final_score).collect();
    let mut out = Vec::new();
    let mut total = 0usize;
    for i in descending_order(&finals) {
        if total >= target_en_words {
            break;
        }
        let words = english_words(&scored[i].tgt, count);
        if boundary == Boundary::Exclusive && total + words > target_en_words {
            break;
        }
        total += words;
        out.push(scored[i].clone());
    }
    out
}

pub const HISTOGRAM_BINS: usize = 20;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub pairs: usize,
    pub en_words: usize,
    pub src_words: usize,
    /// Share of pairs that repeat an earlier pair under the dedup key.
    pub duplicate_rate: f64,
    /// Counts of final scores in 20 equal bins over [0, 1]; out-of-range
    /// scores go to the nearest end bin.
    pub histogram: Option<Vec<usize>>,
}

/// Statistics over pairs whose target side is English. Source words are
/// separator-delimited tokens (whitespace or zero-width space).
pub fn compute_stats(pairs: &[SeedPair], scores: Option<&[f64]>) -> CorpusStats {
    if pairs.is_empty() {
        return CorpusStats { histogram: scores.map(|_| vec![0; HISTOGRAM_BINS]), ..CorpusStats::default() };
    }
    let mut seen = Deduper::new();
    let mut dups = 0usize;
    let mut stats = CorpusStats { pairs: pairs.len(), ..CorpusStats::default() };
    for (s, t) in pairs {
        stats.en_words += t.split_whitespace().count();
        stats.src_words += s.split(is_separator).filter(|w| !w.is_empty()).count();
        if !seen.insert(s, t) {
            dups += 1;
        }
    }
    stats.duplicate_rate = dups as f64 / pairs.len() as f64;
    stats.histogram = scores.map(|scores| {
        let mut bins = vec![0; HISTOGRAM_BINS];
        for &v in scores {
            let b = if v.is_nan() { 0 } else { ((v * HISTOGRAM_BINS as f64).floor().max(0.0) as usize).min(HISTOGRAM_BINS - 1) };
            bins[b] += 1;
        }
        bins
    });
    stats
}
