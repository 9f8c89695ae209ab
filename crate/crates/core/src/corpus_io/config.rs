use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{Boundary, WordCount};
use crate::mining::MiningConfig;
use crate::scoring::{NegativeSamplingConfig, RerankPreset, TrainHyper};
use crate::word_align::AlignerConfig;
use crate::{Error, LangPair, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelinePaths {
    /// Sentence-aligned seed corpus (TSV). Also the provided corpus for merging.
    pub seed_corpus: PathBuf,
    /// Document pairs (JSON lines).
    pub documents: PathBuf,
    /// Additional sentence-aligned pairs merged with the mined corpus.
    #[serde(default)]
    pub provided: Option<PathBuf>,
    /// Khmer lexicon; built from the seed corpus when absent.
    #[serde(default)]
    pub khmer_lexicon: Option<PathBuf>,
    /// Score files produced elsewhere, aligned to the merged corpus.
    #[serde(default)]
    pub external_scores: Vec<PathBuf>,
    pub output_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SubsampleOptions {
    pub target_en_words: usize,
    pub boundary: Boundary,
    pub word_count: WordCount,
}

impl Default for SubsampleOptions {
    fn default() -> Self {
        Self { target_en_words: 5_000_000, boundary: Boundary::Inclusive, word_count: WordCount::Raw }
    }
}

/// Declarative description of one pipeline run. Relative paths are resolved
/// against the directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub pair: LangPair,
    /// Drives negative sampling and classifier training.
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub paths: PipelinePaths,
    #[serde(default)]
    pub aligner: AlignerConfig,
    #[serde(default)]
    pub mining: MiningConfig,
    #[serde(default)]
    pub negatives: NegativeSamplingConfig,
    #[serde(default)]
    pub scorer: TrainHyper,
    /// Defaults to the preset of the language pair.
    #[serde(default)]
    pub rerank: Option<RerankPreset>,
    #[serde(default)]
    pub subsample: SubsampleOptions,
}

fn default_seed() -> u64 {
    1
}

impl PipelineConfig {
    pub fn new(pair: LangPair, paths: PipelinePaths) -> Self {
        Self {
            pair,
            seed: default_seed(),
            paths,
            aligner: AlignerConfig::default(),
            mining: MiningConfig::default(),
            negatives: NegativeSamplingConfig::default(),
            scorer: TrainHyper::default(),
            rerank: None,
            subsample: SubsampleOptions::default(),
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config: Self = serde_json::from_str(&text).map_err(|e| Error::parse(path, e.line(), e.to_string()))?;
        if let Some(base) = path.parent() {
            config.resolve_paths(base);
        }
        Ok(config)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_json().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        let paths = &mut self.paths;
        fix(&mut paths.seed_corpus);
        fix(&mut paths.documents);
        fix(&mut paths.output_dir);
        paths.provided.iter_mut().for_each(fix);
        paths.khmer_lexicon.iter_mut().for_each(fix);
        paths.external_scores.iter_mut().for_each(fix);
    }

    pub fn rerank_preset(&self) -> RerankPreset {
        self.rerank.unwrap_or_else(|| RerankPreset::for_pair(self.pair))
    }

    /// Seeds actually used: negative sampling, then classifier training.
    pub fn stage_seeds(&self) -> (u64, u64) {
        (self.seed, self.seed.wrapping_add(1))
    }

    /// Check module configs and that every input path exists.
    pub fn validate(&self) -> Result<()> {
        self.aligner.validate()?;
        self.mining.validate()?;
        self.negatives.validate()?;
        self.scorer.validate()?;
        self.rerank_preset().validate()?;
        let p = &self.paths;
        let inputs = [Some(&p.seed_corpus), Some(&p.documents), p.provided.as_ref(), p.khmer_lexicon.as_ref()];
        for path in inputs.into_iter().flatten().chain(&p.external_scores) {
            if !path.is_file() {
                return Err(Error::Config(format!("input file does not exist: {}", path.display())));
            }
        }
        if self.pair != LangPair::KmEn && p.khmer_lexicon.is_some() {
            return Err(Error::Config(format!("a Khmer lexicon was given for {}", self.pair)));
        }
        Ok(())
    }
}
