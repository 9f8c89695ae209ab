mod common;

use std::collections::BTreeSet;
use std::ops::Range;

use bitext_core::mining::{
    dedup, dedup_key, dp_segment, greedy_extract, mine_documents, DocumentPair, MiningConfig, MiningContext,
};
use bitext_core::similarity::LexicalSimilarity;
use bitext_core::synth::{build_documents, DocLayout, Generator, SynthConfig};
use bitext_core::LangPair;
use proptest::prelude::*;

/// Score table for every group of up to `limit` segments per side.
fn score_grid(a: usize, b: usize, limit: usize) -> impl Strategy<Value = Vec<f64>> {
    let cells = (0..a).map(|i| limit.min(a - i)).sum::<usize>() * (0..b).map(|j| limit.min(b - j)).sum::<usize>();
    prop::collection::vec(prop_oneof![Just(0.0), Just(1.0), 0.0f64..=1.0], cells)
}

fn lookup(values: &[f64], a: usize, b: usize, limit: usize) -> impl Fn(Range<usize>, Range<usize>) -> f64 + '_ {
    let src_spans: Vec<(usize, usize)> = (0..a).flat_map(|i| (1..=limit.min(a - i)).map(move |l| (i, i + l))).collect();
    let tgt_spans: Vec<(usize, usize)> = (0..b).flat_map(|j| (1..=limit.min(b - j)).map(move |l| (j, j + l))).collect();
    move |s: Range<usize>, t: Range<usize>| {
        let si = src_spans.iter().position(|&x| x == (s.start, s.end)).expect("span within join limit");
        let ti = tgt_spans.iter().position(|&x| x == (t.start, t.end)).expect("span within join limit");
        values[si * tgt_spans.len() + ti]
    }
}

fn dims() -> impl Strategy<Value = (usize, usize, Vec<f64>)> {
    (1usize..=7, 1usize..=7).prop_flat_map(|(a, b)| (Just(a), Just(b), score_grid(a, b, 3)))
}

proptest! {
    #[test]
    fn dp_output_is_a_legal_segmentation((a, b, values) in dims(), log_c in prop::sample::select(vec![0.0, 0.5, -0.5])) {
        let config = MiningConfig { log_c, ..MiningConfig::default() };
        let scorer = lookup(&values, a, b, 3);
        let got = dp_segment(a, b, &scorer, &config);
        // A complete segmentation exists iff neither side needs more than
        // `limit` segments per group given the other side's count.
        let feasible = a <= 3 * b && b <= 3 * a;
        prop_assert_eq!(got.is_some(), feasible);
        if let Some(seg) = got {
            prop_assert!(seg.validate(a, b, 3).is_ok(), "{:?}", seg);
            if a + b <= 8 {
                prop_assert_eq!(Some(seg), common::enumerate_best(a, b, &scorer, &config));
            }
        }
    }

    #[test]
    fn greedy_pairs_strictly_increase((a, b, values) in dims(), threshold in 0.05f64..0.95) {
        let scorer = lookup(&values, a, b, 3);
        let pairs = greedy_extract(a, b, &scorer, threshold);
        for w in pairs.windows(2) {
            prop_assert!(w[1].0 > w[0].0 && w[1].1 > w[0].1);
        }
        for &(i, j, s) in &pairs {
            prop_assert!(i < a && j < b && s >= threshold);
            prop_assert_eq!(s, scorer(i..i + 1, j..j + 1));
        }
    }

    #[test]
    fn dedup_is_idempotent(items in prop::collection::vec(("[aAb ]{0,4}", "[xXy ]{0,4}"), 0..30)) {
        let once = dedup(items, |p: &(String, String)| (p.0.as_str(), p.1.as_str()));
        let twice = dedup(once.clone(), |p: &(String, String)| (p.0.as_str(), p.1.as_str()));
        prop_assert_eq!(&once, &twice);
        let keys: BTreeSet<_> = once.iter().map(|p| dedup_key(&p.0, &p.1)).collect();
        prop_assert_eq!(keys.len(), once.len());
    }
}

#[test]
fn mining_is_independent_of_document_order() {
    let pair = LangPair::KmEn;
    let seed = common::seed_pairs(pair);
    let held = common::heldout_pairs(pair);
    let mut gen = Generator::new(SynthConfig { pair, seed: 77, ..SynthConfig::default() });
    let planted = build_documents(&mut gen, &held[..300], &DocLayout::default(), "d");
    let docs: Vec<DocumentPair> =
        planted.docs.iter().map(|(id, s, t)| DocumentPair::from_text(id.clone(), s, t, pair.src(), pair.tgt())).collect();
    let t = common::train(pair, &seed, &[], &[]);
    let sim = LexicalSimilarity { forward: &t.tables.forward, reverse: &t.tables.reverse, idf_src: &t.idf_src, idf_tgt: &t.idf_tgt };
    let ctx = MiningContext { sim, src_tokenizer: &t.src_tok, tgt_tokenizer: &t.tgt_tok };
    let config = MiningConfig::default();

    let canon = |docs: &[DocumentPair]| {
        let mined = mine_documents(docs, &ctx, &config, 1);
        mined.pairs.iter().map(|p| dedup_key(&p.src, &p.tgt)).collect::<BTreeSet<_>>()
    };
    let forward = canon(&docs);
    let mut reversed = docs.clone();
    reversed.reverse();
    assert_eq!(forward, canon(&reversed));
    assert!(forward.len() >= 250, "{} pairs", forward.len());
}
