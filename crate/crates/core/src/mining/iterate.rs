use rayon::prelude::*;

use super::{mine_tokenized, tokenize_docs, Deduper, DocumentPair, MinedCorpus, MiningConfig};
use crate::similarity::{IdfWeights, LexicalSimilarity};
use crate::text_prep::Tokenizer;
use crate::word_align::{train_aligner, AlignerConfig, AlignerOutput, TrainingStats};
use crate::{Error, Result};

/// A raw `(source, target)` sentence pair.
pub type SeedPair = (String, String);

#[derive(Debug, Clone, PartialEq)]
pub struct IterationReport {
    pub iteration: usize,
    /// Pairs mined in this iteration (after dedup within the iteration).
    pub mined: usize,
    /// Mined pairs not produced by any earlier iteration.
    pub new_pairs: usize,
    /// Pairs added to the training pool after this iteration.
    pub accepted: usize,
    /// Training pool size used for this iteration's tables.
    pub pool_size: usize,
    pub forward_stats: TrainingStats,
    pub reverse_stats: TrainingStats,
}

#[derive(Debug, Clone)]
pub struct IterativeOutcome {
    /// Union of all iterations, deduplicated; each pair tagged with the
    /// iteration that first produced it.
    pub corpus: MinedCorpus,
    /// Full mining output of each iteration.
    pub rounds: Vec<MinedCorpus>,
    pub reports: Vec<IterationReport>,
    /// Tables and weights of the last iteration.
    pub aligner: AlignerOutput,
    pub idf_src: IdfWeights,
    pub idf_tgt: IdfWeights,
    /// Pairs accepted into the training pool, in acceptance order.
    pub accepted: Vec<SeedPair>,
}

/// Alternate table training and mining.
///
/// Each iteration trains tables on the seed corpus plus every pair accepted
/// so far, recomputes IDF weights over the pool and the document segments,
/// mines all documents, and accepts mined pairs whose similarity reaches
/// `quality_threshold`.
pub fn iterative_mine(
    seed: &[SeedPair],
    docs: &[DocumentPair],
    src_tok: &Tokenizer,
    tgt_tok: &Tokenizer,
    aligner_config: &AlignerConfig,
    config: &MiningConfig,
) -> Result<IterativeOutcome> {
    config.validate()?;
    if seed.is_empty() {
        return Err(Error::InvalidInput("iterative mining needs a nonempty seed corpus".into()));
    }
    if config.iterations == 0 {
        return Err(Error::Config("mining iterations must be >= 1".into()));
    }

    let doc_toks = tokenize_docs(docs, src_tok, tgt_tok);
    let mut pool: Vec<(Vec<String>, Vec<String>)> =
        seed.par_iter().map(|(s, t)| (src_tok.keys(s), tgt_tok.keys(t))).collect();
    let mut in_pool = Deduper::new();
    for (s, t) in seed {
        in_pool.insert(s, t);
    }

    let mut accepted_pairs: Vec<SeedPair> = Vec::new();
    let mut rounds = Vec::with_capacity(config.iterations);
    let mut reports = Vec::with_capacity(config.iterations);
    let mut union = MinedCorpus::default();
    let mut union_seen = Deduper::new();
    let mut last = None;

    for iteration in 1..=config.iterations {
        let pool_size = pool.len();
        let aligner = train_aligner(&pool, aligner_config)?;
        let idf_src = IdfWeights::compute(
            pool.iter().map(|(s, _)| s.as_slice()).chain(doc_toks.iter().flat_map(|d| d.src.iter().map(Vec::as_slice))),
        )?;
        let idf_tgt = IdfWeights::compute(
            pool.iter().map(|(_, t)| t.as_slice()).chain(doc_toks.iter().flat_map(|d| d.tgt.iter().map(Vec::as_slice))),
        )?;
        let sim = LexicalSimilarity {
            forward: &aligner.forward,
            reverse: &aligner.reverse,
            idf_src: &idf_src,
            idf_tgt: &idf_tgt,
        };
        let mined = mine_tokenized(docs, &doc_toks, &sim, config, iteration);

        let mut new_pairs = 0;
        for p in &mined.pairs {
            if union_seen.insert(&p.src, &p.tgt) {
                union.pairs.push(p.clone());
                new_pairs += 1;
            }
        }
        union.per_iteration.push(new_pairs);
        union.skipped_documents = mined.skipped_documents;

        let mut accepted = 0;
        for p in &mined.pairs {
            if p.similarity >= config.quality_threshold && in_pool.insert(&p.src, &p.tgt) {
                pool.push((src_tok.keys(&p.src), tgt_tok.keys(&p.tgt)));
                accepted_pairs.push((p.src.clone(), p.tgt.clone()));
                accepted += 1;
            }
        }

        reports.push(IterationReport {
            iteration,
            mined: mined.len(),
            new_pairs,
            accepted,
            pool_size,
            forward_stats: aligner.forward_stats.clone(),
            reverse_stats: aligner.reverse_stats.clone(),
        });
        rounds.push(mined);
        last = Some((aligner, idf_src, idf_tgt));
    }

    let (aligner, idf_src, idf_tgt) = last.expect("at least one iteration ran");
    Ok(IterativeOutcome { corpus: union, rounds, reports, aligner, idf_src, idf_tgt, accepted: accepted_pairs })
}
