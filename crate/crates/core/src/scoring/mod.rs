//! Pair scoring: classifier, rank normalization, reranking and ensembling.

mod classifier;
mod features;
mod negatives;
mod rerank;

use rayon::prelude::*;

pub use classifier::{auc, sigmoid, train_scorer, ScorerModel, TrainHyper, TrainReport};
pub use features::{FeatureContext, Features, FEATURE_NAMES, MAX_TOKENS, NUM_FEATURES};
pub use negatives::{generate_negatives, Negative, NegativeMode, NegativeSamplingConfig, TRUNCATE_TO};
pub use rerank::{
    descending_order, ensemble, load_external_scores, rank_normalize, rerank_langid, rerank_ngram_coverage, scored_pairs,
    write_scores, LidSides, NgramPool, RerankPreset, ScoredPair,
};

use crate::mining::SeedPair;
use crate::Result;

/// Features of each pair, computed in parallel on sides cut to
/// [`MAX_TOKENS`] tokens.
pub fn extract_all(ctx: &FeatureContext<'_>, pairs: &[SeedPair]) -> Vec<Features> {
    pairs.par_iter().map(|(s, t)| ctx.extract_limited(s, t, MAX_TOKENS)).collect()
}

/// Classifier probability for each pair; invalid pairs score 0.
pub fn score_pairs(model: &ScorerModel, ctx: &FeatureContext<'_>, pairs: &[SeedPair]) -> Vec<f64> {
    pairs
        .par_iter()
        .map(|(s, t)| {
            let f = ctx.extract_limited(s, t, MAX_TOKENS);
            if f.valid {
                model.predict(&f.values)
            } else {
                0.0
            }
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ScorerTraining {
    pub model: ScorerModel,
    pub report: TrainReport,
    pub negatives: Vec<Negative>,
}

/// Generate negatives from `positives`, extract features for both classes
/// and train the classifier. Pairs with an empty side are left out.
pub fn train_from_pairs(
    ctx: &FeatureContext<'_>,
    positives: &[SeedPair],
    sampling: &NegativeSamplingConfig,
    hyper: &TrainHyper,
) -> Result<ScorerTraining> {
    let negatives = generate_negatives(positives, ctx.src_tok, ctx.tgt_tok, sampling)?;
    let neg_pairs: Vec<SeedPair> = negatives.iter().map(|n| (n.src.clone(), n.tgt.clone())).collect();
    let keep = |f: Features| f.valid.then(|| f.values.to_vec());
    let pos: Vec<Vec<f64>> = extract_all(ctx, positives).into_iter().filter_map(keep).collect();
    let neg: Vec<Vec<f64>> = extract_all(ctx, &neg_pairs).into_iter().filter_map(keep).collect();
    let (model, report) = train_scorer(&FEATURE_NAMES, &pos, &neg, hyper)?;
    Ok(ScorerTraining { model, report, negatives })
}
