//! Lexical features of a sentence pair.

use rustc_hash::FxHashSet;

use crate::similarity::LexicalSimilarity;
use crate::text_prep::{LangIdModel, Tokenizer};
use crate::word_align::{align_pair, AlignerConfig};
use crate::Lang;

/// Maximum tokens per side considered when scoring.
pub const MAX_TOKENS: usize = 128;

pub const FEATURE_NAMES: [&str; 10] = [
    "yisi2",
    "fwd_log_prob",
    "rev_log_prob",
    "length_ratio",
    "src_lid",
    "tgt_lid",
    "jaccard",
    "src_coverage",
    "tgt_coverage",
    "diagonal",
];

pub const NUM_FEATURES: usize = FEATURE_NAMES.len();

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Features {
    pub values: [f64; NUM_FEATURES],
    /// False when either side tokenizes to nothing; `values` are then zero.
    pub valid: bool,
}

impl Features {
    pub fn invalid() -> Self {
        Self { values: [0.0; NUM_FEATURES], valid: false }
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        FEATURE_NAMES.iter().position(|n| *n == name).map(|i| self.values[i])
    }
}

/// Everything feature extraction reads.
#[derive(Clone, Copy)]
pub struct FeatureContext<'a> {
    pub sim: LexicalSimilarity<'a>,
    pub langid: &'a LangIdModel,
    pub src_tok: &'a Tokenizer,
    pub tgt_tok: &'a Tokenizer,
    pub aligner: &'a AlignerConfig,
}

impl FeatureContext<'_> {
    pub fn expected(&self) -> (Lang, Lang) {
        (self.src_tok.lang(), self.tgt_tok.lang())
    }

    /// Features on the full pair.
    pub fn extract(&self, src: &str, tgt: &str) -> Features {
        self.extract_limited(src, tgt, usize::MAX)
    }

    /// Features with each side cut to its first `max_tokens` tokens.
    pub fn extract_limited(&self, src: &str, tgt: &str, max_tokens: usize) -> Features {
        let (src_text, src_keys) = limit(self.src_tok, src, max_tokens);
        let (tgt_text, tgt_keys) = limit(self.tgt_tok, tgt, max_tokens);
        if src_keys.is_empty() || tgt_keys.is_empty() {
            return Features::invalid();
        }
        let (src_lang, tgt_lang) = self.expected();
        let fwd = self.sim.forward;
        let rev = self.sim.reverse;
        let a = self.aligner;
        let (m, n) = (src_keys.len() as f64, tgt_keys.len() as f64);

        let src_set: FxHashSet<&str> = src_keys.iter().map(String::as_str).collect();
        let tgt_set: FxHashSet<&str> = tgt_keys.iter().map(String::as_str).collect();
        let inter = src_set.intersection(&tgt_set).count() as f64;
        let union = (src_set.len() + tgt_set.len()) as f64 - inter;

        let values = [
            self.sim.score_or_zero(&src_keys, &tgt_keys),
            fwd.sentence_log_prob(&src_keys, &tgt_keys, a.diagonal_tension, a.null_prob, a.prob_floor),
            rev.sentence_log_prob(&tgt_keys, &src_keys, a.diagonal_tension, a.null_prob, a.prob_floor),
            m.min(n) / m.max(n),
            self.langid.confidence_for(&src_text, src_lang),
            self.langid.confidence_for(&tgt_text, tgt_lang),
            inter / union,
            src_keys.iter().filter(|k| fwd.has_row(k)).count() as f64 / m,
            tgt_keys.iter().filter(|k| rev.has_row(k)).count() as f64 / n,
            diagonal(self, &src_keys, &tgt_keys),
        ];
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Features { values, valid: true }
    }
}

fn limit(tok: &Tokenizer, text: &str, max_tokens: usize) -> (String, Vec<String>) {
    let mut keys = tok.keys(text);
    if keys.len() <= max_tokens {
        return (text.to_string(), keys);
    }
    let tokens = tok.tokenize(text).tokens;
    keys.truncate(max_tokens);
    (tok.join(&tokens[..max_tokens]), keys)
}

/// One minus the mean relative-position distance of non-null Viterbi links
/// (both directions); 0 when nothing links.
fn diagonal(ctx: &FeatureContext<'_>, src: &[String], tgt: &[String]) -> f64 {
    let mut dist = 0.0;
    let mut count = 0usize;
    let mut add = |links: Vec<(usize, usize)>, m: usize, n: usize| {
        for (i, j) in links {
            if i > 0 {
                dist += (i as f64 / m as f64 - j as f64 / n as f64).abs();
                count += 1;
            }
        }
    };
    add(align_pair(ctx.sim.forward, src, tgt, ctx.aligner), src.len(), tgt.len());
    add(align_pair(ctx.sim.reverse, tgt, src, ctx.aligner), tgt.len(), src.len());
    if count == 0 {
        0.0
    } else {
        1.0 - dist / count as f64
    }
}
