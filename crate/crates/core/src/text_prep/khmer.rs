//! Khmer word segmentation.
//!
//! Text that carries U+200B is split on it. Otherwise each Khmer-script run is
//! segmented by Viterbi search maximizing the summed unigram log-probability of
//! the words, with dictionary entries taken from a [`KhmerLexicon`] and every
//! out-of-vocabulary character cluster scored at the lexicon's OOV log-probability.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};
use std::path::Path;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use super::tokenize::{is_punct, is_separator, split_chunk};
use crate::{Error, Result};

pub const ZWSP: char = '\u{200B}';

const LEXICON_FORMAT: &str = "khmer-lexicon";
const LEXICON_VERSION: u32 = 1;

/// Relative tolerance under which two path scores count as tied.
const TIE_EPS: f64 = 1e-9;

pub fn is_khmer(c: char) -> bool {
    matches!(c, '\u{1780}'..='\u{17FF}' | '\u{19E0}'..='\u{19FF}')
}

fn is_khmer_combining(c: char) -> bool {
    matches!(c, '\u{17B4}'..='\u{17D3}' | '\u{17DD}')
}

const COENG: char = '\u{17D2}';

/// Split a string into character clusters: a base character followed by any
/// combining signs, with a consonant after COENG attached as a subscript.
/// Segmentation boundaries may only fall between clusters.
pub fn clusters(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut prev: Option<char> = None;
    for (i, c) in s.char_indices() {
        let attaches = is_khmer_combining(c) || prev == Some(COENG);
        if i > 0 && !attaches {
            out.push(&s[start..i]);
            start = i;
        }
        prev = Some(c);
    }
    if start < s.len() {
        out.push(&s[start..]);
    }
    out
}

/// Unigram word model for Khmer segmentation.
#[derive(Debug, Clone, PartialEq)]
pub struct KhmerLexicon {
    entries: FxHashMap<String, f64>,
    oov_log_prob: f64,
    total_count: u64,
    max_word_clusters: usize,
}

#[derive(Serialize, Deserialize)]
struct LexiconHeader {
    format: String,
    version: u32,
    oov_log_prob: f64,
    total_count: u64,
}

#[derive(Serialize, Deserialize)]
struct LexiconLine {
    key: String,
    log_prob: f64,
}

impl KhmerLexicon {
    /// Build from explicit log-probabilities. Used for hand-made lexicons.
    pub fn from_log_probs(
        entries: impl IntoIterator<Item = (String, f64)>,
        oov_log_prob: f64,
        total_count: u64,
    ) -> Result<Self> {
        let entries: FxHashMap<String, f64> = entries.into_iter().collect();
        if entries.keys().any(|k| k.is_empty()) {
            return Err(Error::InvalidInput("lexicon entry with empty key".into()));
        }
        if entries.values().chain([&oov_log_prob]).any(|p| !p.is_finite() || *p > 0.0) {
            return Err(Error::InvalidInput("lexicon log-probabilities must be finite and <= 0".into()));
        }
        let max_word_clusters = entries.keys().map(|k| clusters(k).len()).max().unwrap_or(1);
        Ok(Self { entries, oov_log_prob, total_count, max_word_clusters })
    }

    /// Harvest words from ZWSP-delimited sentences and estimate add-one
    /// smoothed unigram probabilities `(c + 1) / (N + V + 1)`; the remaining
    /// `1 / (N + V + 1)` is the per-cluster OOV probability.
    pub fn build<'a>(corpus: impl IntoIterator<Item = &'a str>) -> Result<Self> {
        let mut counts: BTreeMap<String, u64> = BTreeMap::new();
        let mut sentences = 0usize;
        for sentence in corpus {
            sentences += 1;
            if !sentence.contains(ZWSP) {
                continue;
            }
            let mut toks = Vec::new();
            for piece in sentence.split(is_separator) {
                split_chunk(piece, &mut toks);
            }
            for tok in toks {
                if tok.chars().any(is_khmer) && !tok.chars().all(is_punct) {
                    *counts.entry(tok).or_default() += 1;
                }
            }
        }
        if sentences == 0 {
            return Err(Error::InvalidInput("cannot build a Khmer lexicon from an empty corpus".into()));
        }
        if counts.is_empty() {
            return Err(Error::InvalidInput(
                "corpus contains no ZWSP-delimited Khmer words; cannot build lexicon".into(),
            ));
        }
        let total: u64 = counts.values().sum();
        let denom = (total + counts.len() as u64 + 1) as f64;
        let entries = counts
            .into_iter()
            .map(|(w, c)| (w, ((c + 1) as f64 / denom).ln()));
        Self::from_log_probs(entries, (1.0 / denom).ln(), total)
    }

    /// Override the OOV log-probability (smoothing knob for text whose
    /// vocabulary differs from the ZWSP-delimited training text).
    pub fn with_oov_log_prob(mut self, oov_log_prob: f64) -> Result<Self> {
        if !oov_log_prob.is_finite() || oov_log_prob > 0.0 {
            return Err(Error::Config("oov_log_prob must be finite and <= 0".into()));
        }
        self.oov_log_prob = oov_log_prob;
        Ok(self)
    }

    pub fn log_prob(&self, word: &str) -> Option<f64> {
        self.entries.get(word).copied()
    }

    pub fn oov_log_prob(&self) -> f64 {
        self.oov_log_prob
    }

    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Score of one candidate word spanning `pieces`; `None` when the piece
    /// is neither a lexicon entry nor a single OOV cluster.
    pub fn piece_score(&self, pieces: &[&str]) -> Option<f64> {
        let word: String = pieces.concat();
        match self.entries.get(&word) {
            Some(&lp) => Some(lp),
            None if pieces.len() == 1 => Some(self.oov_log_prob),
            None => None,
        }
    }

    /// Viterbi segmentation of a run of Khmer text.
    ///
    /// Maximizes the summed log-probability; ties go to fewer tokens, then to
    /// the segmentation whose token lengths are lexicographically longest from
    /// the left.
    pub fn segment(&self, text: &str) -> Vec<String> {
        let units = clusters(text);
        let len = units.len();
        if len == 0 {
            return Vec::new();
        }
        // best[i]: best segmentation of units[i..] as (score, tokens, first piece end).
        let mut best: Vec<Option<(f64, usize, usize)>> = vec![None; len + 1];
        best[len] = Some((0.0, 0, len));
        for i in (0..len).rev() {
            let max_end = (i + self.max_word_clusters.max(1)).min(len);
            let mut chosen: Option<(f64, usize, usize)> = None;
            for end in (i + 1)..=max_end {
                let Some(piece) = self.piece_score(&units[i..end]) else { continue };
                let Some((rest, rest_tokens, _)) = best[end] else { continue };
                let cand = (piece + rest, rest_tokens + 1, end);
                chosen = match chosen {
                    None => Some(cand),
                    Some(cur) if path_better((cand.0, cand.1, cand.2 - i), (cur.0, cur.1, cur.2 - i)) => {
                        Some(cand)
                    }
                    keep => keep,
                };
            }
            best[i] = chosen;
        }
        let mut out = Vec::new();
        let mut i = 0;
        while i < len {
            let (_, _, end) = best[i].expect("single clusters are always scorable");
            out.push(units[i..end].concat());
            i = end;
        }
        out
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let header = LexiconHeader {
            format: LEXICON_FORMAT.into(),
            version: LEXICON_VERSION,
            oov_log_prob: self.oov_log_prob,
            total_count: self.total_count,
        };
        let mut sorted: Vec<_> = self.entries.iter().collect();
        sorted.sort_by(|a, b| a.0.cmp(b.0));
        let write = || -> std::io::Result<()> {
            serde_json::to_writer(&mut w, &header)?;
            w.write_all(b"\n")?;
            for (key, &log_prob) in sorted {
                serde_json::to_writer(&mut w, &LexiconLine { key: key.clone(), log_prob })?;
                w.write_all(b"\n")?;
            }
            w.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = std::io::BufReader::new(file).lines();
        let header_line = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing header"))?
            .map_err(|e| Error::io(path, e))?;
        let header: LexiconHeader =
            serde_json::from_str(&header_line).map_err(|e| Error::parse(path, 1, e.to_string()))?;
        if header.format != LEXICON_FORMAT || header.version != LEXICON_VERSION {
            return Err(Error::parse(
                path,
                1,
                format!("expected {LEXICON_FORMAT} v{LEXICON_VERSION}, found {} v{}", header.format, header.version),
            ));
        }
        let mut entries = Vec::new();
        for (idx, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let entry: LexiconLine =
                serde_json::from_str(&line).map_err(|e| Error::parse(path, idx + 2, e.to_string()))?;
            entries.push((entry.key, entry.log_prob));
        }
        Self::from_log_probs(entries, header.oov_log_prob, header.total_count)
    }
}

/// Path ordering shared by the Viterbi search and its brute-force checks:
/// `(score, token count, first token length in clusters)`.
pub fn path_better(a: (f64, usize, usize), b: (f64, usize, usize)) -> bool {
    let tol = TIE_EPS * a.0.abs().max(b.0.abs()).max(1.0);
    if (a.0 - b.0).abs() > tol {
        return a.0 > b.0;
    }
    if a.1 != b.1 {
        return a.1 < b.1;
    }
    a.2 > b.2
}

/// Tokenize Khmer text.
pub(crate) fn tokenize_khmer(text: &str, lexicon: &KhmerLexicon) -> Vec<String> {
    let mut out = Vec::new();
    if text.contains(ZWSP) {
        for piece in text.split(is_separator) {
            split_chunk(piece, &mut out);
        }
        return out;
    }
    let mut chunk_tokens = Vec::new();
    for chunk in text.split(is_separator) {
        chunk_tokens.clear();
        split_chunk(chunk, &mut chunk_tokens);
        for tok in chunk_tokens.drain(..) {
            if tok.chars().any(is_khmer) {
                segment_mixed(&tok, lexicon, &mut out);
            } else {
                out.push(tok);
            }
        }
    }
    out
}

/// Viterbi on Khmer-script runs; other runs (digits, Latin names) stay whole.
fn segment_mixed(tok: &str, lexicon: &KhmerLexicon, out: &mut Vec<String>) {
    let mut run_start = 0;
    let mut run_is_khmer: Option<bool> = None;
    let flush = |s: &str, khmer: bool, out: &mut Vec<String>| {
        if s.is_empty() {
            return;
        }
        if khmer {
            out.extend(lexicon.segment(s));
        } else {
            out.push(s.to_string());
        }
    };
    for (i, c) in tok.char_indices() {
        let k = is_khmer(c);
        match run_is_khmer {
            Some(prev) if prev != k => {
                flush(&tok[run_start..i], prev, out);
                run_start = i;
                run_is_khmer = Some(k);
            }
            None => run_is_khmer = Some(k),
            _ => {}
        }
    }
    if let Some(k) = run_is_khmer {
        flush(&tok[run_start..], k, out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toy() -> KhmerLexicon {
        KhmerLexicon::from_log_probs(
            [("កក".to_string(), -1.0), ("ខ".to_string(), -1.5), ("កកខ".to_string(), -2.0)],
            -10.0,
            10,
        )
        .unwrap()
    }

    #[test]
    fn clusters_attach_signs_and_subscripts() {
        // ក + vowel sign ា, then ស + coeng + ត (subscript), then រ
        assert_eq!(clusters("កាស្តរ"), ["កា", "ស្ត", "រ"]);
        assert_eq!(clusters("ab"), ["a", "b"]);
        assert!(clusters("").is_empty());
    }

    #[test]
    fn zwsp_splits_words() {
        let lex = toy();
        assert_eq!(tokenize_khmer("សួស្តី\u{200B}ពិភពលោក", &lex), ["សួស្តី", "ពិភពលោក"]);
    }

    #[test]
    fn viterbi_prefers_higher_probability() {
        let lex = toy();
        // "កកខ" alone (-2.0) beats "កក"+"ខ" (-2.5).
        assert_eq!(lex.segment("កកខ"), ["កកខ"]);
        // Unknown cluster becomes its own token.
        assert_eq!(lex.segment("គកក"), ["គ", "កក"]);
    }

    #[test]
    fn mixed_runs_keep_digits_whole() {
        let lex = toy();
        assert_eq!(tokenize_khmer("កក2020ខ។", &lex), ["កក", "2020", "ខ", "។"]);
    }

    #[test]
    fn build_applies_add_one_smoothing() {
        let lex = KhmerLexicon::build(["ក\u{200B}ខ"]).unwrap();
        assert_eq!(lex.len(), 2);
        // N = 2 tokens, V = 2 types: (1 + 1) / (2 + 2 + 1)
        let expected = (2.0f64 / 5.0).ln();
        assert!((lex.log_prob("ក").unwrap() - expected).abs() < 1e-15);
        assert!((lex.log_prob("ខ").unwrap() - expected).abs() < 1e-15);
        assert!((lex.oov_log_prob() - (1.0f64 / 5.0).ln()).abs() < 1e-15);
        let mass: f64 = lex.entries().map(|(_, lp)| lp.exp()).sum();
        assert!(mass <= 1.0);
    }

    #[test]
    fn build_frequency_ordering() {
        let lex = KhmerLexicon::build(["ក\u{200B}ក\u{200B}ក\u{200B}ខ"]).unwrap();
        assert!(lex.log_prob("ក").unwrap() > lex.log_prob("ខ").unwrap());
    }

    #[test]
    fn build_errors() {
        assert!(KhmerLexicon::build(std::iter::empty()).is_err());
        assert!(KhmerLexicon::build(["កខគ no separators"]).is_err());
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("lex.jsonl");
        let lex = KhmerLexicon::build(["ក\u{200B}ខ\u{200B}ក", "គ\u{200B}ក"]).unwrap();
        lex.save(&path).unwrap();
        assert_eq!(KhmerLexicon::load(&path).unwrap(), lex);
    }
}
