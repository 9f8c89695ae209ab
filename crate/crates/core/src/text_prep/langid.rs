//! Character n-gram language identification (multinomial naive Bayes over
//! n = 1..3 with add-one smoothing).

use std::io::{BufRead, Write};
use std::path::Path;

use rustc_hash::{FxHashMap, FxHashSet};
use serde::{Deserialize, Serialize};

use crate::{Error, Lang, Result};

pub const MAX_ORDER: usize = 3;
pub const MIN_SAMPLES_PER_LANG: usize = 100;
/// Only the first characters of a text are used for identification.
const MAX_CHARS: usize = 1000;

const MODEL_FORMAT: &str = "langid";
const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
struct LangTable {
    lang: Lang,
    log_prior: f64,
    /// Per order (index 0 = unigrams).
    grams: [FxHashMap<String, f64>; MAX_ORDER],
    unseen: [f64; MAX_ORDER],
}

/// N-gram counts per order.
type OrderCounts = [FxHashMap<String, u64>; MAX_ORDER];

#[derive(Debug, Clone, PartialEq)]
pub struct LangIdModel {
    tables: Vec<LangTable>,
    /// Number of distinct grams per order across all languages.
    vocab_sizes: [usize; MAX_ORDER],
}

/// Result of identification: `lang` is `None` ("und") for empty text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LangGuess {
    pub lang: Option<Lang>,
    pub confidence: f64,
}

impl LangGuess {
    pub fn code(&self) -> &'static str {
        self.lang.map_or("und", Lang::code)
    }
}

fn normalize(text: &str) -> Option<Vec<char>> {
    let mut chars = vec![' '];
    let mut last_space = true;
    for c in text.chars().flat_map(char::to_lowercase).take(MAX_CHARS) {
        if c.is_whitespace() || c == '\u{200B}' {
            if !last_space {
                chars.push(' ');
                last_space = true;
            }
        } else {
            chars.push(c);
            last_space = false;
        }
    }
    if chars.len() == 1 {
        return None;
    }
    if !last_space {
        chars.push(' ');
    }
    Some(chars)
}

fn for_each_gram(chars: &[char], mut f: impl FnMut(usize, String)) {
    for order in 1..=MAX_ORDER {
        for window in chars.windows(order) {
            if order == 1 && window[0] == ' ' {
                continue;
            }
            f(order - 1, window.iter().collect());
        }
    }
}

impl LangIdModel {
    /// Train from per-language sentence samples; priors are proportional to
    /// the number of sentences per language.
    pub fn train<S: AsRef<str>>(samples: &[(Lang, Vec<S>)]) -> Result<Self> {
        let mut langs: Vec<Lang> = samples.iter().map(|(l, _)| *l).collect();
        langs.sort();
        langs.dedup();
        if langs.len() < 2 {
            return Err(Error::Config("language ID needs samples for at least two languages".into()));
        }
        if langs.len() != samples.len() {
            return Err(Error::Config("duplicate language in language-ID samples".into()));
        }

        let mut counts: Vec<(Lang, usize, OrderCounts)> = Vec::new();
        let mut vocab: [FxHashSet<String>; MAX_ORDER] = Default::default();
        for (lang, sentences) in samples {
            if sentences.len() < MIN_SAMPLES_PER_LANG {
                return Err(Error::Config(format!(
                    "language ID needs at least {MIN_SAMPLES_PER_LANG} sentences for {lang}, got {}",
                    sentences.len()
                )));
            }
            let mut grams: [FxHashMap<String, u64>; MAX_ORDER] = Default::default();
            for s in sentences {
                if let Some(chars) = normalize(s.as_ref()) {
                    for_each_gram(&chars, |o, g| *grams[o].entry(g).or_default() += 1);
                }
            }
            for o in 0..MAX_ORDER {
                vocab[o].extend(grams[o].keys().cloned());
            }
            counts.push((*lang, sentences.len(), grams));
        }
        counts.sort_by_key(|(l, _, _)| *l);

        let total_sentences: usize = counts.iter().map(|(_, n, _)| n).sum();
        let vocab_sizes = [vocab[0].len(), vocab[1].len(), vocab[2].len()];
        let tables = counts
            .into_iter()
            .map(|(lang, n, grams)| {
                let mut unseen = [0.0; MAX_ORDER];
                let grams = std::array::from_fn(|o| {
                    let tokens: u64 = grams[o].values().sum();
                    let denom = (tokens + vocab_sizes[o] as u64 + 1) as f64;
                    unseen[o] = (1.0 / denom).ln();
                    grams[o].iter().map(|(g, &c)| (g.clone(), ((c + 1) as f64 / denom).ln())).collect()
                });
                LangTable { lang, log_prior: (n as f64 / total_sentences as f64).ln(), grams, unseen }
            })
            .collect();
        Ok(Self { tables, vocab_sizes })
    }

    pub fn languages(&self) -> Vec<Lang> {
        self.tables.iter().map(|t| t.lang).collect()
    }

    /// Normalized posterior for every language, in model order. `None` for
    /// text with no non-whitespace characters.
    pub fn posteriors(&self, text: &str) -> Option<Vec<(Lang, f64)>> {
        let chars = normalize(text)?;
        let mut scores: Vec<f64> = self.tables.iter().map(|t| t.log_prior).collect();
        for_each_gram(&chars, |o, g| {
            for (score, table) in scores.iter_mut().zip(&self.tables) {
                *score += table.grams[o].get(&g).copied().unwrap_or(table.unseen[o]);
            }
        });
        let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let z: f64 = scores.iter().map(|s| (s - max).exp()).sum();
        Some(self.tables.iter().zip(scores).map(|(t, s)| (t.lang, (s - max).exp() / z)).collect())
    }

    pub fn identify(&self, text: &str) -> LangGuess {
        match self.posteriors(text) {
            None => LangGuess { lang: None, confidence: 0.0 },
            Some(post) => {
                let mut best = post[0];
                for &p in &post[1..] {
                    if p.1 > best.1 {
                        best = p;
                    }
                }
                LangGuess { lang: Some(best.0), confidence: best.1 }
            }
        }
    }

    /// Posterior of a specific language (0 for empty text or unknown language).
    pub fn confidence_for(&self, text: &str, lang: Lang) -> f64 {
        self.posteriors(text)
            .and_then(|p| p.into_iter().find(|(l, _)| *l == lang).map(|(_, p)| p))
            .unwrap_or(0.0)
    }

    /// Probability mass per language and order over the shared vocabulary
    /// plus the unseen slot; 1 up to rounding.
    pub fn order_mass(&self, lang: Lang, order: usize) -> Option<f64> {
        let t = self.tables.iter().find(|t| t.lang == lang)?;
        let o = order.checked_sub(1)?;
        let seen: f64 = t.grams[o].values().map(|lp| lp.exp()).sum();
        let missing = (self.vocab_sizes[o] - t.grams[o].len() + 1) as f64;
        Some(seen + missing * t.unseen[o].exp())
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
        let mut w = std::io::BufWriter::new(file);
        let header = ModelHeader {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            languages: self.tables.iter().map(|t| t.lang).collect(),
            log_priors: self.tables.iter().map(|t| t.log_prior).collect(),
            unseen: self.tables.iter().map(|t| t.unseen).collect(),
            vocab_sizes: self.vocab_sizes,
        };
        let mut write = || -> std::io::Result<()> {
            serde_json::to_writer(&mut w, &header)?;
            w.write_all(b"\n")?;
            for t in &self.tables {
                for (o, grams) in t.grams.iter().enumerate() {
                    let mut sorted: Vec<_> = grams.iter().collect();
                    sorted.sort_by(|a, b| a.0.cmp(b.0));
                    for (key, &log_prob) in sorted {
                        let line = GramLine { lang: t.lang, order: o + 1, key: key.clone(), log_prob };
                        serde_json::to_writer(&mut w, &line)?;
                        w.write_all(b"\n")?;
                    }
                }
            }
            w.flush()
        };
        write().map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
        let mut lines = std::io::BufReader::new(file).lines();
        let first = lines
            .next()
            .ok_or_else(|| Error::parse(path, 1, "missing header"))?
            .map_err(|e| Error::io(path, e))?;
        let header: ModelHeader = serde_json::from_str(&first).map_err(|e| Error::parse(path, 1, e.to_string()))?;
        if header.format != MODEL_FORMAT || header.version != MODEL_VERSION {
            return Err(Error::parse(path, 1, format!("expected {MODEL_FORMAT} v{MODEL_VERSION}")));
        }
        if header.log_priors.len() != header.languages.len() || header.unseen.len() != header.languages.len() {
            return Err(Error::parse(path, 1, "header arrays disagree in length"));
        }
        let mut tables: Vec<LangTable> = header
            .languages
            .iter()
            .zip(&header.log_priors)
            .zip(&header.unseen)
            .map(|((&lang, &log_prior), &unseen)| LangTable { lang, log_prior, grams: Default::default(), unseen })
            .collect();
        for (idx, line) in lines.enumerate() {
            let line = line.map_err(|e| Error::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let g: GramLine = serde_json::from_str(&line).map_err(|e| Error::parse(path, idx + 2, e.to_string()))?;
            let table = tables
                .iter_mut()
                .find(|t| t.lang == g.lang)
                .ok_or_else(|| Error::parse(path, idx + 2, format!("language {} not in header", g.lang)))?;
            if g.order == 0 || g.order > MAX_ORDER {
                return Err(Error::parse(path, idx + 2, format!("invalid order {}", g.order)));
            }
            table.grams[g.order - 1].insert(g.key, g.log_prob);
        }
        Ok(Self { tables, vocab_sizes: header.vocab_sizes })
    }
}

#[derive(Serialize, Deserialize)]
struct ModelHeader {
    format: String,
    version: u32,
    languages: Vec<Lang>,
    log_priors: Vec<f64>,
    unseen: Vec<[f64; MAX_ORDER]>,
    vocab_sizes: [usize; MAX_ORDER],
}

#[derive(Serialize, Deserialize)]
struct GramLine {
    lang: Lang,
    order: usize,
    key: String,
    log_prob: f64,
}
