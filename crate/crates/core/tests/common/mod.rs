#![allow(dead_code)]

use std::ops::Range;
use std::path::PathBuf;
use std::sync::Arc;

use bitext_core::corpus_io::read_pairs;
use bitext_core::mining::{group_value, Group, MiningConfig, SeedPair, Segmentation};
use bitext_core::similarity::IdfWeights;
use bitext_core::text_prep::{KhmerLexicon, Tokenizer};
use bitext_core::word_align::{train_aligner, AlignerConfig, AlignerOutput};
use bitext_core::LangPair;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn seed_pairs(pair: LangPair) -> Vec<SeedPair> {
    read_pairs(&fixture(&format!("seed_{pair}.tsv"))).expect("bundled seed corpus")
}

pub fn heldout_pairs(pair: LangPair) -> Vec<SeedPair> {
    read_pairs(&fixture(&format!("heldout_{pair}.tsv"))).expect("bundled held-out corpus")
}

pub fn tokenizers(pair: LangPair, seed: &[SeedPair]) -> (Tokenizer, Tokenizer) {
    let lexicon = match pair {
        LangPair::KmEn => Some(Arc::new(KhmerLexicon::build(seed.iter().map(|(s, _)| s.as_str())).unwrap())),
        LangPair::PsEn => None,
    };
    (Tokenizer::new(pair.src(), lexicon).unwrap(), Tokenizer::new(pair.tgt(), None).unwrap())
}

pub fn keyed(pairs: &[SeedPair], src: &Tokenizer, tgt: &Tokenizer) -> Vec<(Vec<String>, Vec<String>)> {
    pairs.iter().map(|(s, t)| (src.keys(s), tgt.keys(t))).collect()
}

pub struct Trained {
    pub src_tok: Tokenizer,
    pub tgt_tok: Tokenizer,
    pub tables: AlignerOutput,
    pub idf_src: IdfWeights,
    pub idf_tgt: IdfWeights,
}

/// Tables and IDF weights trained on `pairs`; IDF also counts `extra` segments.
pub fn train(pair: LangPair, pairs: &[SeedPair], extra_src: &[Vec<String>], extra_tgt: &[Vec<String>]) -> Trained {
    let (src_tok, tgt_tok) = tokenizers(pair, pairs);
    let keys = keyed(pairs, &src_tok, &tgt_tok);
    let tables = train_aligner(&keys, &AlignerConfig::default()).unwrap();
    let idf_src = IdfWeights::compute(keys.iter().map(|(s, _)| s.as_slice()).chain(extra_src.iter().map(Vec::as_slice))).unwrap();
    let idf_tgt = IdfWeights::compute(keys.iter().map(|(_, t)| t.as_slice()).chain(extra_tgt.iter().map(Vec::as_slice))).unwrap();
    Trained { src_tok, tgt_tok, tables, idf_src, idf_tgt }
}

/// Exhaustive search over monotone complete segmentations. Objective terms
/// are summed left to right, as a forward recursion would.
pub fn enumerate_best<F>(a: usize, b: usize, scorer: F, config: &MiningConfig) -> Option<Segmentation>
where
    F: Fn(Range<usize>, Range<usize>) -> f64,
{
    #[allow(clippy::too_many_arguments)]
    fn walk<F: Fn(Range<usize>, Range<usize>) -> f64>(
        i: usize,
        j: usize,
        a: usize,
        b: usize,
        limit: usize,
        log_c: f64,
        scorer: &F,
        path: &mut Vec<Group>,
        total: f64,
        best: &mut Option<(f64, Vec<Group>)>,
    ) {
        if i == a && j == b {
            let better = match best {
                None => true,
                Some((bt, bg)) => {
                    if total != *bt {
                        total > *bt
                    } else if path.len() != bg.len() {
                        path.len() < bg.len()
                    } else {
                        let ends = |g: &[Group]| g.iter().map(|x| (x.src.end, x.tgt.end)).collect::<Vec<_>>();
                        ends(path) < ends(bg)
                    }
                }
            };
            if better {
                *best = Some((total, path.clone()));
            }
            return;
        }
        for di in 1..=limit.min(a - i) {
            for dj in 1..=limit.min(b - j) {
                let score = scorer(i..i + di, j..j + dj);
                path.push(Group { src: i..i + di, tgt: j..j + dj, score });
                walk(i + di, j + dj, a, b, limit, log_c, scorer, path, total + group_value(score, log_c), best);
                path.pop();
            }
        }
    }
    if a == 0 || b == 0 {
        return None;
    }
    let mut best = None;
    walk(0, 0, a, b, config.join_limit, config.log_c, &scorer, &mut Vec::new(), 0.0, &mut best);
    best.map(|(score, groups)| Segmentation { groups, score })
}

/// Khmer clusters computed independently of the library: a cluster starts at
/// any character that is not a combining sign and does not follow COENG.
pub fn oracle_clusters(s: &str) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut prev = None;
    for c in s.chars() {
        let combining = ('\u{17B4}'..='\u{17D3}').contains(&c) || c == '\u{17DD}';
        if out.is_empty() || !(combining || prev == Some('\u{17D2}')) {
            out.push(c.to_string());
        } else {
            out.last_mut().unwrap().push(c);
        }
        prev = Some(c);
    }
    out
}

/// Brute-force segmentation over every split point between clusters. A piece
/// is a lexicon word or a single cluster scored with the OOV log-probability.
/// Best: highest score (relative tolerance 1e-9), then fewest tokens, then
/// token lengths (in clusters) lexicographically longest from the left.
pub fn brute_force_segment(text: &str, lexicon: &[(String, f64)], oov: f64) -> Vec<String> {
    let units = oracle_clusters(text);
    let n = units.len();
    if n == 0 {
        return Vec::new();
    }
    let lookup = |w: &str| lexicon.iter().find(|(k, _)| k == w).map(|(_, p)| *p);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for mask in 0u32..(1 << (n - 1)) {
        let mut lens = Vec::new();
        let mut start = 0;
        for k in 1..=n {
            if k == n || mask & (1 << (k - 1)) != 0 {
                lens.push(k - start);
                start = k;
            }
        }
        let mut score = 0.0;
        let mut pos = 0;
        let mut ok = true;
        for &l in &lens {
            let word: String = units[pos..pos + l].concat();
            match lookup(&word) {
                Some(p) => score += p,
                None if l == 1 => score += oov,
                None => {
                    ok = false;
                    break;
                }
            }
            pos += l;
        }
        if !ok {
            continue;
        }
        let better = match &best {
            None => true,
            Some((bs, bl)) => {
                let tol = 1e-9 * score.abs().max(bs.abs()).max(1.0);
                if (score - bs).abs() > tol {
                    score > *bs
                } else if lens.len() != bl.len() {
                    lens.len() < bl.len()
                } else {
                    lens > *bl
                }
            }
        };
        if better {
            best = Some((score, lens));
        }
    }
    let (_, lens) = best.expect("single clusters always segment");
    let mut out = Vec::new();
    let mut pos = 0;
    for l in lens {
        out.push(units[pos..pos + l].concat());
        pos += l;
    }
    out
}
