//! Synthetic non-parallel pairs built from parallel ones.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::mining::SeedPair;
use crate::text_prep::Tokenizer;
use crate::{Error, Result};

/// Length, in tokens, that truncated sides are cut to.
pub const TRUNCATE_TO: usize = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NegativeMode {
    /// Sources paired with the target of a different positive.
    ShuffleMisalign,
    /// Source and/or target cut to their first three tokens.
    TruncateTo3,
    /// Source and/or target with shuffled token order.
    ShuffleOrder,
    /// Swapped sides, or one side copied onto the other.
    SwapOrCopy,
}

impl fmt::Display for NegativeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NegativeMode::ShuffleMisalign => "shuffle_misalign",
            NegativeMode::TruncateTo3 => "truncate_to_3",
            NegativeMode::ShuffleOrder => "shuffle_order",
            NegativeMode::SwapOrCopy => "swap_or_copy",
        })
    }
}

/// Per-mode multipliers. A multiplier `m` runs `floor(m)` passes over the
/// positives plus one pass in which each positive is used with probability
/// `m - floor(m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct NegativeSamplingConfig {
    pub shuffle_misalign: f64,
    pub truncate_to_3: f64,
    pub shuffle_order: f64,
    pub swap_or_copy: f64,
    pub seed: u64,
}

impl Default for NegativeSamplingConfig {
    fn default() -> Self {
        Self { shuffle_misalign: 1.0, truncate_to_3: 0.5, shuffle_order: 0.5, swap_or_copy: 0.25, seed: 17 }
    }
}

impl NegativeSamplingConfig {
    pub fn only(mode: NegativeMode, multiplier: f64, seed: u64) -> Self {
        let mut c = Self { shuffle_misalign: 0.0, truncate_to_3: 0.0, shuffle_order: 0.0, swap_or_copy: 0.0, seed };
        match mode {
            NegativeMode::ShuffleMisalign => c.shuffle_misalign = multiplier,
            NegativeMode::TruncateTo3 => c.truncate_to_3 = multiplier,
            NegativeMode::ShuffleOrder => c.shuffle_order = multiplier,
            NegativeMode::SwapOrCopy => c.swap_or_copy = multiplier,
        }
        c
    }

    fn modes(&self) -> [(NegativeMode, f64); 4] {
        [
            (NegativeMode::ShuffleMisalign, self.shuffle_misalign),
            (NegativeMode::TruncateTo3, self.truncate_to_3),
            (NegativeMode::ShuffleOrder, self.shuffle_order),
            (NegativeMode::SwapOrCopy, self.swap_or_copy),
        ]
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes().iter().any(|(_, m)| !(m.is_finite() && *m >= 0.0)) {
            return Err(Error::Config("negative sampling multipliers must be finite and >= 0".into()));
        }
        if self.modes().iter().all(|(_, m)| *m == 0.0) {
            return Err(Error::Config("at least one negative sampling mode must be active".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Negative {
    pub src: String,
    pub tgt: String,
    pub mode: NegativeMode,
}

#[derive(Clone, Copy)]
enum Side {
    Src,
    Tgt,
    Both,
}

fn pick_side(rng: &mut ChaCha8Rng) -> Side {
    match rng.random_range(0..3) {
        0 => Side::Src,
        1 => Side::Tgt,
        _ => Side::Both,
    }
}

/// Generate negatives for every active mode, in mode order. Deterministic
/// for a fixed seed. Negatives identical to their positive are dropped.
pub fn generate_negatives(
    positives: &[SeedPair],
    src_tok: &Tokenizer,
    tgt_tok: &Tokenizer,
    config: &NegativeSamplingConfig,
) -> Result<Vec<Negative>> {
    config.validate()?;
    if config.shuffle_misalign > 0.0 && positives.len() < 2 {
        return Err(Error::InvalidInput("misaligned negatives need at least two positives".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut out = Vec::new();
    for (mode, multiplier) in config.modes() {
        let full = multiplier.floor() as usize;
        let frac = multiplier - multiplier.floor();
        for pass in 0..=full {
            let keep_prob = if pass < full { 1.0 } else { frac };
            if keep_prob == 0.0 {
                continue;
            }
            let partner = if mode == NegativeMode::ShuffleMisalign { derangement(positives.len(), &mut rng) } else { Vec::new() };
            for (k, (s, t)) in positives.iter().enumerate() {
                if keep_prob < 1.0 && !rng.random_bool(keep_prob) {
                    continue;
                }
                let before = out.len();
                match mode {
                    NegativeMode::ShuffleMisalign => {
                        out.push(Negative { src: s.clone(), tgt: positives[partner[k]].1.clone(), mode });
                    }
                    NegativeMode::TruncateTo3 => {
                        let side = pick_side(&mut rng);
                        let src = match side {
                            Side::Src | Side::Both => truncate(s, src_tok),
                            Side::Tgt => s.clone(),
                        };
                        let tgt = match side {
                            Side::Tgt | Side::Both => truncate(t, tgt_tok),
                            Side::Src => t.clone(),
                        };
                        out.push(Negative { src, tgt, mode });
                    }
                    NegativeMode::ShuffleOrder => {
                        let side = pick_side(&mut rng);
                        let src = match side {
                            Side::Src | Side::Both => shuffle_tokens(s, src_tok, &mut rng),
                            Side::Tgt => s.clone(),
                        };
                        let tgt = match side {
                            Side::Tgt | Side::Both => shuffle_tokens(t, tgt_tok, &mut rng),
                            Side::Src => t.clone(),
                        };
                        out.push(Negative { src, tgt, mode });
                    }
                    NegativeMode::SwapOrCopy => {
                        out.push(Negative { src: t.clone(), tgt: s.clone(), mode });
                        out.push(Negative { src: s.clone(), tgt: s.clone(), mode });
                        out.push(Negative { src: t.clone(), tgt: t.clone(), mode });
                    }
                }
                let mut i = before;
                while i < out.len() {
                    if out[i].src == *s && out[i].tgt == *t {
                        out.remove(i);
                    } else {
                        i += 1;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Uniform random cyclic permutation (Sattolo); no element maps to itself.
fn derangement(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        let j = rng.random_range(0..i);
        p.swap(i, j);
    }
    p
}

fn truncate(text: &str, tok: &Tokenizer) -> String {
    let tokens = tok.tokenize(text).tokens;
    tok.join(&tokens[..tokens.len().min(TRUNCATE_TO)])
}

fn shuffle_tokens(text: &str, tok: &Tokenizer, rng: &mut ChaCha8Rng) -> String {
    let mut tokens = tok.tokenize(text).tokens;
    tokens.shuffle(rng);
    tok.join(&tokens)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Lang;

    fn en() -> Tokenizer {
        Tokenizer::new(Lang::En, None).unwrap()
    }

    fn pair(s: &str, t: &str) -> SeedPair {
        (s.to_string(), t.to_string())
    }

    #[test]
    fn two_positives_cross_pair() {
        let pos = vec![pair("a b", "x y"), pair("c d", "z w")];
        let cfg = NegativeSamplingConfig::only(NegativeMode::ShuffleMisalign, 1.0, 3);
        let neg = generate_negatives(&pos, &en(), &en(), &cfg).unwrap();
        let got: Vec<_> = neg.iter().map(|n| (n.src.as_str(), n.tgt.as_str())).collect();
        assert_eq!(got, [("a b", "z w"), ("c d", "x y")]);
    }

    #[test]
    fn swap_and_copy_variants() {
        let pos = vec![pair("s1 s2", "t1 t2")];
        let cfg = NegativeSamplingConfig::only(NegativeMode::SwapOrCopy, 1.0, 3);
        let neg = generate_negatives(&pos, &en(), &en(), &cfg).unwrap();
        let got: Vec<_> = neg.iter().map(|n| (n.src.as_str(), n.tgt.as_str())).collect();
        assert!(got.contains(&("t1 t2", "s1 s2")));
        assert!(got.contains(&("s1 s2", "s1 s2")));
        assert!(got.contains(&("t1 t2", "t1 t2")));
    }

    #[test]
    fn truncation_keeps_three_tokens() {
        let long = "one two three four five six seven eight nine ten";
        let pos = vec![pair(long, long)];
        let cfg = NegativeSamplingConfig::only(NegativeMode::TruncateTo3, 4.0, 9);
        let neg = generate_negatives(&pos, &en(), &en(), &cfg).unwrap();
        assert!(!neg.is_empty());
        for n in &neg {
            let src_len = n.src.split_whitespace().count();
            let tgt_len = n.tgt.split_whitespace().count();
            assert!(src_len == 3 || tgt_len == 3);
            assert!(src_len == 3 || src_len == 10);
            assert!(tgt_len == 3 || tgt_len == 10);
        }
    }

    #[test]
    fn shuffle_preserves_token_multiset() {
        let pos = vec![pair("a b c d e f", "u v w x y z")];
        let cfg = NegativeSamplingConfig::only(NegativeMode::ShuffleOrder, 3.0, 1);
        for n in generate_negatives(&pos, &en(), &en(), &cfg).unwrap() {
            let mut s: Vec<_> = n.src.split(' ').collect();
            s.sort();
            assert_eq!(s, ["a", "b", "c", "d", "e", "f"]);
            assert!(n.src != pos[0].0 || n.tgt != pos[0].1);
        }
    }

    #[test]
    fn errors_and_determinism() {
        let one = vec![pair("a", "b")];
        assert!(generate_negatives(&one, &en(), &en(), &NegativeSamplingConfig::default()).is_err());
        let none = NegativeSamplingConfig { shuffle_misalign: 0.0, truncate_to_3: 0.0, shuffle_order: 0.0, swap_or_copy: 0.0, seed: 1 };
        assert!(generate_negatives(&one, &en(), &en(), &none).is_err());

        let pos: Vec<_> = (0..20).map(|i| pair(&format!("s{i} a b c d"), &format!("t{i} x y z w"))).collect();
        let cfg = NegativeSamplingConfig { shuffle_misalign: 1.5, truncate_to_3: 0.7, shuffle_order: 0.7, swap_or_copy: 0.3, seed: 5 };
        let a = generate_negatives(&pos, &en(), &en(), &cfg).unwrap();
        let b = generate_negatives(&pos, &en(), &en(), &cfg).unwrap();
        assert_eq!(a, b);
        for n in a.iter().filter(|n| n.mode == NegativeMode::ShuffleMisalign) {
            let si: String = n.src.split(' ').next().unwrap()[1..].to_string();
            let ti: String = n.tgt.split(' ').next().unwrap()[1..].to_string();
            assert_ne!(si, ti);
        }
    }
}
