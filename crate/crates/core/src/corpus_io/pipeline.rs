use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{
    compute_stats, merge_corpora, read_pairs, subsample, write_merged, write_pairs, write_scored, write_scored_detail,
    PipelineConfig,
};
use crate::mining::{iterative_mine, read_documents, SeedPair};
use crate::scoring::{
    ensemble, load_external_scores, rank_normalize, rerank_langid, rerank_ngram_coverage, score_pairs, scored_pairs,
    train_from_pairs, write_scores, FeatureContext, NegativeSamplingConfig, ScoredPair, TrainHyper,
};
use crate::similarity::LexicalSimilarity;
use crate::text_prep::{KhmerLexicon, LangIdModel, Tokenizer};
use crate::{Error, Lang, Result};

/// Stage names, in execution order.
pub const STAGES: [&str; 8] = ["tokenize", "mine", "merge", "train_scorer", "score", "normalize", "rerank", "subsample"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub seconds: f64,
    /// Files written by the stage, relative to the output directory.
    pub artifacts: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub version: String,
    pub config_hash: String,
    pub pair: String,
    pub seed: u64,
    pub negative_seed: u64,
    pub scorer_seed: u64,
    pub stages: Vec<StageRecord>,
    pub counts: serde_json::Value,
}

struct Runner {
    out: PathBuf,
    records: Vec<StageRecord>,
}

impl Runner {
    fn stage<T>(&mut self, name: &'static str, f: impl FnOnce(&Path, &mut Vec<String>) -> Result<T>) -> Result<T> {
        let start = Instant::now();
        let mut artifacts = Vec::new();
        let value = f(&self.out, &mut artifacts).map_err(|e| Error::Stage { stage: name, source: Box::new(e) })?;
        self.records.push(StageRecord { name: name.into(), seconds: start.elapsed().as_secs_f64(), artifacts });
        Ok(value)
    }
}

fn json_file(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    std::fs::write(path, text + "\n").map_err(|e| Error::io(path, e))
}

/// Artifact path helper: records the file name and returns its full path.
fn artifact(dir: &Path, list: &mut Vec<String>, name: &str) -> PathBuf {
    list.push(name.to_string());
    dir.join(name)
}

/// Run every stage and write artifacts plus `manifest.json` to the output
/// directory. The config is validated before any stage runs.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Manifest> {
    config.validate()?;
    let out = config.paths.output_dir.clone();
    std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
    let (src_lang, tgt_lang) = (config.pair.src(), config.pair.tgt());
    let (negative_seed, scorer_seed) = config.stage_seeds();
    let mut run = Runner { out: out.clone(), records: Vec::new() };

    let (seed, docs, src_tok, tgt_tok, langid) = run.stage("tokenize", |dir, arts| {
        let seed = read_pairs(&config.paths.seed_corpus)?;
        if seed.is_empty() {
            return Err(Error::InvalidInput("seed corpus is empty".into()));
        }
        let docs = read_documents(&config.paths.documents, src_lang, tgt_lang)?;
        let lexicon = match (src_lang, &config.paths.khmer_lexicon) {
            (Lang::Km, Some(path)) => Some(Arc::new(KhmerLexicon::load(path)?)),
            (Lang::Km, None) => {
                let lex = KhmerLexicon::build(seed.iter().map(|(s, _)| s.as_str()))?;
                lex.save(&artifact(dir, arts, "khmer_lexicon.jsonl"))?;
                Some(Arc::new(lex))
            }
            _ => None,
        };
        let src_tok = Tokenizer::new(src_lang, lexicon)?;
        let tgt_tok = Tokenizer::new(tgt_lang, None)?;
        let langid = LangIdModel::train(&[
            (src_lang, seed.iter().map(|(s, _)| s.as_str()).collect::<Vec<_>>()),
            (tgt_lang, seed.iter().map(|(_, t)| t.as_str()).collect::<Vec<_>>()),
        ])?;
        langid.save(&artifact(dir, arts, "langid.jsonl"))?;
        let tokenized: Vec<SeedPair> =
            seed.iter().map(|(s, t)| (src_tok.tokenize(s).tokens.join(" "), tgt_tok.tokenize(t).tokens.join(" "))).collect();
        write_pairs(&artifact(dir, arts, "seed.tok.tsv"), &tokenized)?;
        Ok((seed, docs, src_tok, tgt_tok, langid))
    })?;

    let outcome = run.stage("mine", |dir, arts| {
        let outcome = iterative_mine(&seed, &docs.docs, &src_tok, &tgt_tok, &config.aligner, &config.mining)?;
        outcome.corpus.write_tsv(&artifact(dir, arts, "mined.tsv"))?;
        outcome.aligner.forward.save_tsv(&artifact(dir, arts, "table.forward.tsv"))?;
        outcome.aligner.reverse.save_tsv(&artifact(dir, arts, "table.reverse.tsv"))?;
        outcome.idf_src.save_tsv(&artifact(dir, arts, "idf.src.tsv"))?;
        outcome.idf_tgt.save_tsv(&artifact(dir, arts, "idf.tgt.tsv"))?;
        let reports: Vec<_> = outcome
            .reports
            .iter()
            .map(|r| {
                json!({
                    "iteration": r.iteration,
                    "pool_size": r.pool_size,
                    "mined": r.mined,
                    "new_pairs": r.new_pairs,
                    "accepted": r.accepted,
                    "forward_log_likelihood": r.forward_stats.log_likelihood,
                    "reverse_log_likelihood": r.reverse_stats.log_likelihood,
                })
            })
            .collect();
        json_file(&artifact(dir, arts, "iterations.json"), &json!({ "skipped_documents": docs.skipped, "iterations": reports }))?;
        Ok(outcome)
    })?;

    let merged = run.stage("merge", |dir, arts| {
        let mut provided = seed.clone();
        if let Some(path) = &config.paths.provided {
            provided.extend(read_pairs(path)?);
        }
        let merged = merge_corpora(&provided, &[&outcome.corpus]);
        write_merged(&artifact(dir, arts, "merged.tsv"), &merged)?;
        Ok(merged.into_iter().map(|p| (p.src, p.tgt)).collect::<Vec<SeedPair>>())
    })?;

    let sim = LexicalSimilarity {
        forward: &outcome.aligner.forward,
        reverse: &outcome.aligner.reverse,
        idf_src: &outcome.idf_src,
        idf_tgt: &outcome.idf_tgt,
    };
    let ctx = FeatureContext { sim, langid: &langid, src_tok: &src_tok, tgt_tok: &tgt_tok, aligner: &config.aligner };

    let model = run.stage("train_scorer", |dir, arts| {
        let sampling = NegativeSamplingConfig { seed: negative_seed, ..config.negatives };
        let hyper = TrainHyper { seed: scorer_seed, ..config.scorer };
        let trained = train_from_pairs(&ctx, &seed, &sampling, &hyper)?;
        trained.model.save(&artifact(dir, arts, "scorer.json"))?;
        json_file(
            &artifact(dir, arts, "scorer_report.json"),
            &json!({ "report": trained.report, "negatives": trained.negatives.len() }),
        )?;
        Ok(trained.model)
    })?;

    let raw = run.stage("score", |dir, arts| {
        let raw = score_pairs(&model, &ctx, &merged);
        write_scores(&artifact(dir, arts, "scores.raw.txt"), &raw)?;
        Ok(raw)
    })?;

    let mut scored: Vec<ScoredPair> = run.stage("normalize", |dir, arts| {
        let combined = if config.paths.external_scores.is_empty() {
            raw.clone()
        } else {
            let mut lists = vec![rank_normalize(&raw)];
            for path in &config.paths.external_scores {
                lists.push(rank_normalize(&load_external_scores(path, Some(merged.len()))?));
            }
            let mean = ensemble(&lists)?;
            write_scores(&artifact(dir, arts, "scores.ensemble.txt"), &mean)?;
            mean
        };
        let scored = scored_pairs(&merged, &combined)?;
        let norm: Vec<f64> = scored.iter().map(|p| p.norm_score).collect();
        write_scores(&artifact(dir, arts, "scores.norm.txt"), &norm)?;
        Ok(scored)
    })?;

    let preset = config.rerank_preset();
    let (lid_discounted, coverage_discounted) = run.stage("rerank", |dir, arts| {
        let lid = rerank_langid(&mut scored, &langid, (src_lang, tgt_lang), preset.alpha, preset.lid_sides);
        let cov = rerank_ngram_coverage(&mut scored, |s| src_tok.tokenize(s).tokens, preset.n, preset.beta);
        write_scored_detail(&artifact(dir, arts, "scored.detail.tsv"), &scored)?;
        write_scored(&artifact(dir, arts, "scored.tsv"), &scored)?;
        Ok((lid, cov))
    })?;

    let selected = run.stage("subsample", |dir, arts| {
        let opts = &config.subsample;
        let selected = subsample(&scored, opts.target_en_words, opts.boundary, opts.word_count);
        write_scored(&artifact(dir, arts, "subsample.tsv"), &selected)?;
        let finals: Vec<f64> = scored.iter().map(|p| p.final_score).collect();
        let sel_pairs: Vec<SeedPair> = selected.iter().map(|p| (p.src.clone(), p.tgt.clone())).collect();
        json_file(
            &artifact(dir, arts, "stats.json"),
            &json!({
                "merged": compute_stats(&merged, Some(&finals)),
                "subsample": compute_stats(&sel_pairs, None),
            }),
        )?;
        Ok(selected.len())
    })?;

    let manifest = Manifest {
        version: env!("CARGO_PKG_VERSION").to_string(),
        config_hash: config.hash(),
        pair: config.pair.to_string(),
        seed: config.seed,
        negative_seed,
        scorer_seed,
        stages: run.records,
        counts: json!({
            "seed_pairs": seed.len(),
            "documents": docs.docs.len(),
            "skipped_documents": docs.skipped,
            "mined_per_iteration": outcome.corpus.per_iteration,
            "accepted_per_iteration": outcome.reports.iter().map(|r| r.accepted).collect::<Vec<_>>(),
            "merged_pairs": merged.len(),
            "lid_discounted": lid_discounted,
            "coverage_discounted": coverage_discounted,
            "subsampled_pairs": selected,
        }),
    };
    json_file(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}
