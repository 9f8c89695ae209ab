//! Synthetic bilingual corpora for fixtures and tests.
//!
//! A shared concept inventory is rendered into English and into Khmer or
//! Pashto surface words. Sentences are Zipf-distributed concept sequences;
//! translations are mostly monotone with local swaps, dropped words and
//! inserted words. Khmer sentences are usually zero-width-space delimited.

use std::path::Path;

use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rustc_hash::FxHashSet;
use serde::{Deserialize, Serialize};

use crate::mining::{write_documents, SeedPair};
use crate::text_prep::ZWSP;
use crate::{Error, LangPair, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthConfig {
    pub pair: LangPair,
    pub concepts: usize,
    pub zipf_exponent: f64,
    pub min_len: usize,
    pub max_len: usize,
    /// Probability of swapping each adjacent target pair.
    pub swap_prob: f64,
    pub drop_prob: f64,
    pub insert_prob: f64,
    /// Fraction of concepts with a second English rendering.
    pub synonym_rate: f64,
    /// Fraction of Khmer sentences written without zero-width spaces.
    pub unsegmented_rate: f64,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            pair: LangPair::KmEn,
            concepts: 2000,
            zipf_exponent: 1.0,
            min_len: 6,
            max_len: 16,
            swap_prob: 0.08,
            drop_prob: 0.04,
            insert_prob: 0.04,
            synonym_rate: 0.1,
            unsegmented_rate: 0.1,
            seed: 2020,
        }
    }
}

/// Surface forms of every concept.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    pub en: Vec<String>,
    pub en_synonym: Vec<Option<String>>,
    pub src: Vec<String>,
}

const EN_ONSETS: &[&str] = &["b", "c", "d", "f", "g", "h", "j", "k", "l", "m", "n", "p", "r", "s", "t", "v", "w", "z", "br", "st", "tr", "pl"];
const EN_VOWELS: &[&str] = &["a", "e", "i", "o", "u", "ai", "ou", "ee"];
const EN_CODAS: &[&str] = &["", "", "n", "r", "s", "t", "l", "m", "nd", "ck"];
const PS_LETTERS: &[char] = &[
    'ا', 'ب', 'پ', 'ت', 'ټ', 'ث', 'ج', 'چ', 'ح', 'خ', 'ځ', 'څ', 'د', 'ډ', 'ذ', 'ر', 'ړ', 'ز', 'ژ', 'ږ', 'س', 'ش', 'ښ', 'ص', 'ض', 'ط',
    'ظ', 'ع', 'غ', 'ف', 'ق', 'ک', 'ګ', 'ل', 'م', 'ن', 'ڼ', 'و', 'ه', 'ي', 'ې',
];

fn en_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(1..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push_str(EN_ONSETS[rng.random_range(0..EN_ONSETS.len())]);
        w.push_str(EN_VOWELS[rng.random_range(0..EN_VOWELS.len())]);
        w.push_str(EN_CODAS[rng.random_range(0..EN_CODAS.len())]);
    }
    w
}

fn km_word(rng: &mut ChaCha8Rng) -> String {
    let syllables = rng.random_range(1..=3);
    let mut w = String::new();
    for _ in 0..syllables {
        w.push(char::from_u32(0x1780 + rng.random_range(0..35)).expect("Khmer consonant"));
        if rng.random_bool(0.7) {
            w.push(char::from_u32(0x17B6 + rng.random_range(0..16)).expect("Khmer vowel sign"));
        }
    }
    w
}

fn ps_word(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(2..=6);
    (0..len).map(|_| PS_LETTERS[rng.random_range(0..PS_LETTERS.len())]).collect()
}

fn unique(seen: &mut FxHashSet<String>, rng: &mut ChaCha8Rng, gen: fn(&mut ChaCha8Rng) -> String, ok: fn(&str) -> bool) -> String {
    loop {
        let w = gen(rng);
        if ok(&w) && seen.insert(w.clone()) {
            return w;
        }
    }
}

fn en_ok(w: &str) -> bool {
    let mut cap = w.to_string();
    cap[..1].make_ascii_uppercase();
    w.len() >= 3 && !crate::text_prep::is_abbreviation(&format!("{w}.")) && !crate::text_prep::is_abbreviation(&format!("{cap}."))
}

impl Vocabulary {
    pub fn generate(config: &SynthConfig, rng: &mut ChaCha8Rng) -> Self {
        let mut seen_en = FxHashSet::default();
        let mut seen_src = FxHashSet::default();
        let src_gen: fn(&mut ChaCha8Rng) -> String = match config.pair {
            LangPair::KmEn => km_word,
            LangPair::PsEn => ps_word,
        };
        let mut v = Vocabulary { en: Vec::new(), en_synonym: Vec::new(), src: Vec::new() };
        for _ in 0..config.concepts {
            v.en.push(unique(&mut seen_en, rng, en_word, en_ok));
            v.src.push(unique(&mut seen_src, rng, src_gen, |_| true));
        }
        for _ in 0..config.concepts {
            let syn = rng.random_bool(config.synonym_rate).then(|| unique(&mut seen_en, rng, en_word, en_ok));
            v.en_synonym.push(syn);
        }
        v
    }
}

/// Draws concept indices from a Zipf distribution over a subset of concepts.
#[derive(Debug, Clone)]
pub struct ConceptSampler {
    ids: Vec<usize>,
    cumulative: Vec<f64>,
}

impl ConceptSampler {
    /// Zipf weights by position in `ids`.
    pub fn zipf(ids: Vec<usize>, exponent: f64) -> Self {
        let mut acc = 0.0;
        let cumulative = (0..ids.len())
            .map(|r| {
                acc += 1.0 / ((r + 1) as f64).powf(exponent);
                acc
            })
            .collect();
        Self { ids, cumulative }
    }

    pub fn uniform(ids: Vec<usize>) -> Self {
        Self::zipf(ids, 0.0)
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let total = *self.cumulative.last().expect("nonempty sampler");
        let x = rng.random_range(0.0..total);
        let k = self.cumulative.partition_point(|&c| c <= x).min(self.ids.len() - 1);
        self.ids[k]
    }
}

/// Sentence-pair generator.
#[derive(Debug, Clone)]
pub struct Generator {
    pub config: SynthConfig,
    pub vocab: Vocabulary,
    pub sampler: ConceptSampler,
    rng: ChaCha8Rng,
}

impl Generator {
    pub fn new(config: SynthConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let vocab = Vocabulary::generate(&config, &mut rng);
        let sampler = ConceptSampler::zipf((0..config.concepts).collect(), config.zipf_exponent);
        Self { config, vocab, sampler, rng }
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    pub fn sentence_len(&mut self) -> usize {
        self.rng.random_range(self.config.min_len..=self.config.max_len)
    }

    /// A concept sequence drawn from `sampler`.
    pub fn concepts(&mut self, sampler: &ConceptSampler, len: usize) -> Vec<usize> {
        (0..len).map(|_| sampler.sample(&mut self.rng)).collect()
    }

    /// A pair over the default sampler.
    pub fn pair(&mut self) -> SeedPair {
        let len = self.sentence_len();
        let c: Vec<usize> = (0..len).map(|_| self.sampler.sample(&mut self.rng)).collect();
        self.render_pair(&c)
    }

    /// Render a concept sequence as a translation pair.
    pub fn render_pair(&mut self, concepts: &[usize]) -> SeedPair {
        let src = self.render_src(concepts);
        let mut tgt: Vec<usize> = Vec::with_capacity(concepts.len() + 2);
        for &c in concepts {
            if !self.rng.random_bool(self.config.drop_prob) {
                tgt.push(c);
            }
            if self.rng.random_bool(self.config.insert_prob) {
                let extra = self.sampler.sample(&mut self.rng);
                tgt.push(extra);
            }
        }
        if tgt.is_empty() {
            tgt.push(concepts[0]);
        }
        let mut k = 0;
        while k + 1 < tgt.len() {
            if self.rng.random_bool(self.config.swap_prob) {
                tgt.swap(k, k + 1);
                k += 2;
            } else {
                k += 1;
            }
        }
        (src, self.render_en(&tgt))
    }

    pub fn render_en(&mut self, concepts: &[usize]) -> String {
        let mut words: Vec<String> = concepts
            .iter()
            .map(|&c| match &self.vocab.en_synonym[c] {
                Some(s) if self.rng.random_bool(0.3) => s.clone(),
                _ => self.vocab.en[c].clone(),
            })
            .collect();
        words[0][..1].make_ascii_uppercase();
        format!("{}.", words.join(" "))
    }

    pub fn render_src(&mut self, concepts: &[usize]) -> String {
        let words: Vec<&str> = concepts.iter().map(|&c| self.vocab.src[c].as_str()).collect();
        match self.config.pair {
            LangPair::KmEn => {
                let sep = if self.rng.random_bool(self.config.unsegmented_rate) { String::new() } else { ZWSP.to_string() };
                format!("{}។", words.join(&sep))
            }
            LangPair::PsEn => format!("{}.", words.join(" ")),
        }
    }

    /// A source-language sentence with no counterpart.
    pub fn noise_src(&mut self) -> String {
        let len = self.sentence_len();
        let c: Vec<usize> = (0..len).map(|_| self.sampler.sample(&mut self.rng)).collect();
        self.render_src(&c)
    }

    /// An English sentence with no counterpart.
    pub fn noise_en(&mut self) -> String {
        let len = self.sentence_len();
        let c: Vec<usize> = (0..len).map(|_| self.sampler.sample(&mut self.rng)).collect();
        self.render_en(&c)
    }

    pub fn pairs(&mut self, n: usize) -> Vec<SeedPair> {
        (0..n).map(|_| self.pair()).collect()
    }
}

/// Document pairs assembled from consecutive sentence pairs.
#[derive(Debug, Clone, Default)]
pub struct PlantedDocs {
    /// `(doc_id, src_text, tgt_text)`.
    pub docs: Vec<(String, String, String)>,
    /// The parallel pairs placed in the documents.
    pub planted: Vec<SeedPair>,
    pub noise_sentences: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DocLayout {
    pub min_pairs: usize,
    pub max_pairs: usize,
    /// Expected noise sentences per planted pair.
    pub noise_rate: f64,
}

impl Default for DocLayout {
    fn default() -> Self {
        Self { min_pairs: 6, max_pairs: 14, noise_rate: 0.1 }
    }
}

/// Split `pairs` into documents of consecutive sentences. Each noise
/// sentence goes to one randomly chosen side at a random position.
pub fn build_documents(gen: &mut Generator, pairs: &[SeedPair], layout: &DocLayout, id_prefix: &str) -> PlantedDocs {
    let mut out = PlantedDocs::default();
    let mut k = 0;
    while k < pairs.len() {
        let size = gen.rng().random_range(layout.min_pairs..=layout.max_pairs).min(pairs.len() - k);
        let chunk = &pairs[k..k + size];
        k += size;
        let mut src: Vec<String> = chunk.iter().map(|p| p.0.clone()).collect();
        let mut tgt: Vec<String> = chunk.iter().map(|p| p.1.clone()).collect();
        let expected = layout.noise_rate * size as f64;
        let mut noise = expected.floor() as usize;
        if gen.rng().random_bool(expected - expected.floor()) {
            noise += 1;
        }
        for _ in 0..noise {
            if gen.rng().random_bool(0.5) {
                let at = gen.rng().random_range(0..=src.len());
                let s = gen.noise_src();
                src.insert(at, s);
            } else {
                let at = gen.rng().random_range(0..=tgt.len());
                let s = gen.noise_en();
                tgt.insert(at, s);
            }
        }
        out.noise_sentences += noise;
        out.planted.extend_from_slice(chunk);
        let src_sep = match gen.config.pair {
            LangPair::KmEn => "\n",
            LangPair::PsEn => " ",
        };
        out.docs.push((format!("{id_prefix}{:04}", out.docs.len()), src.join(src_sep), tgt.join(" ")));
    }
    out
}

/// A corpus for checking that retraining on mined pairs helps.
#[derive(Debug, Clone)]
pub struct GainCorpus {
    pub seed: Vec<SeedPair>,
    pub docs: Vec<(String, String, String)>,
    /// Pairs mostly in seed vocabulary with a few new words.
    pub bridge: Vec<SeedPair>,
    /// Pairs dominated by new vocabulary.
    pub hard: Vec<SeedPair>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GainLayout {
    pub seed_pairs: usize,
    pub new_concepts: usize,
    pub bridge_pairs: usize,
    pub new_per_bridge: usize,
    pub hard_pairs: usize,
    pub hard_new_fraction: f64,
}

impl Default for GainLayout {
    fn default() -> Self {
        Self {
            seed_pairs: 3000,
            new_concepts: 150,
            bridge_pairs: 600,
            new_per_bridge: 2,
            hard_pairs: 150,
            hard_new_fraction: 0.6,
        }
    }
}

/// Seed pairs use the first `concepts - new_concepts` concepts only. Bridge
/// pairs add `new_per_bridge` new concepts each; hard pairs draw about
/// `hard_new_fraction` of their words from the new concepts.
pub fn gain_corpus(config: SynthConfig, layout: &GainLayout) -> Result<GainCorpus> {
    if layout.new_concepts == 0 || layout.new_concepts >= config.concepts {
        return Err(Error::Config("new_concepts must be in 1..concepts".into()));
    }
    let mut gen = Generator::new(config);
    let known = config.concepts - layout.new_concepts;
    let old = ConceptSampler::zipf((0..known).collect(), config.zipf_exponent);
    let new = ConceptSampler::uniform((known..config.concepts).collect());

    let mut seed = Vec::with_capacity(layout.seed_pairs);
    for _ in 0..layout.seed_pairs {
        let len = gen.sentence_len();
        let c = gen.concepts(&old, len);
        seed.push(gen.render_pair(&c));
    }
    // Inserted words in translations must not leak new vocabulary either.
    gen.sampler = old.clone();

    let mut bridge = Vec::with_capacity(layout.bridge_pairs);
    for _ in 0..layout.bridge_pairs {
        let len = gen.sentence_len();
        let mut c = gen.concepts(&old, len);
        for _ in 0..layout.new_per_bridge.min(len) {
            let at = gen.rng().random_range(0..c.len());
            c[at] = new.sample(gen.rng());
        }
        bridge.push(gen.render_pair(&c));
    }
    let mut hard = Vec::with_capacity(layout.hard_pairs);
    for _ in 0..layout.hard_pairs {
        let len = gen.sentence_len();
        let c: Vec<usize> = (0..len)
            .map(|_| {
                let use_new = gen.rng().random_bool(layout.hard_new_fraction);
                if use_new {
                    new.sample(gen.rng())
                } else {
                    old.sample(gen.rng())
                }
            })
            .collect();
        hard.push(gen.render_pair(&c));
    }

    // Interleave: hard pairs spread between bridge pairs.
    let mut planted: Vec<SeedPair> = Vec::with_capacity(bridge.len() + hard.len());
    let stride = (bridge.len() / hard.len().max(1)).max(1);
    let mut h = hard.iter();
    for (k, b) in bridge.iter().enumerate() {
        planted.push(b.clone());
        if (k + 1) % stride == 0 {
            if let Some(p) = h.next() {
                planted.push(p.clone());
            }
        }
    }
    planted.extend(h.cloned());
    let layout_docs = DocLayout { noise_rate: 0.0, ..DocLayout::default() };
    let docs = build_documents(&mut gen, &planted, &layout_docs, "gain-").docs;
    Ok(GainCorpus { seed, docs, bridge, hard })
}

/// Sizes of the bundled fixture set.
#[derive(Debug, Clone, Copy)]
pub struct FixtureSizes {
    pub seed_pairs: usize,
    pub heldout_pairs: usize,
    pub mini_docs: usize,
}

impl Default for FixtureSizes {
    fn default() -> Self {
        Self { seed_pairs: 5000, heldout_pairs: 2000, mini_docs: 200 }
    }
}

/// Write `seed_<pair>.tsv`, `heldout_<pair>.tsv` and, for km-en,
/// `mini_docs_km-en.jsonl` into `dir`.
pub fn write_fixtures(dir: &Path, seed: u64, sizes: &FixtureSizes) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for pair in [LangPair::KmEn, LangPair::PsEn] {
        let salt = match pair {
            LangPair::KmEn => 0,
            LangPair::PsEn => 1,
        };
        let mut gen = Generator::new(SynthConfig { pair, seed: seed.wrapping_mul(31).wrapping_add(salt), ..SynthConfig::default() });
        let seed_pairs = gen.pairs(sizes.seed_pairs);
        let heldout = gen.pairs(sizes.heldout_pairs);
        crate::corpus_io::write_pairs(&dir.join(format!("seed_{pair}.tsv")), &seed_pairs)?;
        crate::corpus_io::write_pairs(&dir.join(format!("heldout_{pair}.tsv")), &heldout)?;
        if pair == LangPair::KmEn {
            let mut docs = PlantedDocs::default();
            let layout = DocLayout::default();
            while docs.docs.len() < sizes.mini_docs {
                let chunk = gen.pairs(layout.max_pairs);
                let mut one = build_documents(&mut gen, &chunk, &layout, "");
                let (_, s, t) = one.docs.remove(0);
                docs.docs.push((format!("mini-{:04}", docs.docs.len()), s, t));
            }
            write_documents(&dir.join(format!("mini_docs_{pair}.jsonl")), &docs.docs)?;
        }
    }
    Ok(())
}
