use std::io::{BufRead, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context, Result};
use bitext_core::corpus_io::{
    compute_stats, read_pairs, read_scored, run_pipeline, subsample, write_scored, write_scored_detail, Boundary,
    PipelineConfig, WordCount,
};
use bitext_core::mining::{iterative_mine, read_documents, MiningConfig};
use bitext_core::scoring::{
    ensemble, load_external_scores, rank_normalize, rerank_langid, rerank_ngram_coverage, score_pairs, scored_pairs,
    train_from_pairs, write_scores, FeatureContext, LidSides, NegativeSamplingConfig, ScorerModel, TrainHyper,
};
use bitext_core::similarity::{IdfWeights, LexicalSimilarity};
use bitext_core::synth::{write_fixtures, FixtureSizes};
use bitext_core::text_prep::{split_sentences, KhmerLexicon, LangIdModel, Tokenizer};
use bitext_core::word_align::{train_aligner, AlignerConfig, Direction, TranslationTable};
use bitext_core::{Lang, LangPair};
use clap::{Args, Parser, Subcommand};

/// Environment variable holding the worker-thread count.
const WORKERS_ENV: &str = "VOLCTRANS_WORKERS";

#[derive(Parser)]
#[command(name = "volctrans-miner", version, about = "Parallel-corpus mining and filtering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tokenization, sentence splitting, lexicons and language ID.
    #[command(subcommand)]
    Textprep(Textprep),
    /// Train word-translation tables.
    #[command(subcommand)]
    Align(Align),
    /// IDF weights and lexical similarity.
    #[command(subcommand)]
    Sim(Sim),
    /// Mine sentence pairs from document pairs.
    #[command(subcommand)]
    Mine(Mine),
    /// Train and apply the pair scorer; normalize, rerank and ensemble scores.
    #[command(subcommand)]
    Score(Score),
    /// Keep the best pairs up to an English word budget.
    Subsample(SubsampleArgs),
    /// Run every stage from a config file.
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Corpus statistics as JSON.
    Stats {
        /// Pair TSV; a third column is read as the score.
        #[arg(long)]
        pairs: PathBuf,
    },
    /// Write the synthetic fixture set.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2020)]
        seed: u64,
        #[arg(long, default_value_t = 5000)]
        seed_pairs: usize,
        #[arg(long, default_value_t = 2000)]
        heldout_pairs: usize,
        #[arg(long, default_value_t = 200)]
        docs: usize,
    },
}

#[derive(Args, Clone)]
struct LangArgs {
    /// Language pair; the non-English side is the source.
    #[arg(long, default_value = "km-en")]
    pair: LangPair,
    /// Khmer lexicon (JSON lines); built from the input when omitted.
    #[arg(long)]
    lexicon: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct TableArgs {
    #[arg(long)]
    fwd: PathBuf,
    #[arg(long)]
    rev: PathBuf,
    #[arg(long)]
    idf_src: PathBuf,
    #[arg(long)]
    idf_tgt: PathBuf,
}

#[derive(Args, Clone)]
struct AlignerArgs {
    #[arg(long, default_value_t = 5)]
    em_iterations: usize,
    #[arg(long, default_value_t = 4.0)]
    diagonal_tension: f64,
    #[arg(long, default_value_t = 0.08)]
    null_prob: f64,
    #[arg(long, default_value_t = 1e-9)]
    prob_floor: f64,
}

impl AlignerArgs {
    fn config(&self) -> AlignerConfig {
        AlignerConfig {
            em_iterations: self.em_iterations,
            diagonal_tension: self.diagonal_tension,
            null_prob: self.null_prob,
            prob_floor: self.prob_floor,
        }
    }
}

#[derive(Subcommand)]
enum Textprep {
    /// Tokenize stdin line by line; tokens are joined by single spaces.
    Tokenize {
        #[arg(long)]
        lang: Lang,
        #[arg(long)]
        lexicon: Option<PathBuf>,
    },
    /// Split the document on stdin into one segment per line.
    Split {
        #[arg(long)]
        lang: Lang,
    },
    /// Build a Khmer lexicon from zero-width-space delimited text (one sentence per line).
    LexiconBuild {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train a language-ID model from `LANG=FILE` samples (one sentence per line).
    LangidTrain {
        #[arg(long = "sample", required = true)]
        samples: Vec<String>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Identify the language of each stdin line: `code<TAB>confidence`.
    LangidClassify {
        #[arg(long)]
        model: PathBuf,
    },
}

#[derive(Subcommand)]
enum Align {
    /// Train forward and reverse tables on a pair TSV.
    Train {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        lang: LangArgs,
        #[command(flatten)]
        aligner: AlignerArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Sim {
    /// IDF weights of both sides of a pair TSV.
    Idf {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Similarity of each pair, one score per line on stdout.
    Score {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        lang: LangArgs,
        #[command(flatten)]
        tables: TableArgs,
    },
}

#[derive(Subcommand)]
enum Mine {
    /// Iterative mining from a seed corpus and document pairs.
    Run {
        #[arg(long)]
        docs: PathBuf,
        #[arg(long)]
        seed: PathBuf,
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long, default_value_t = 3)]
        iterations: usize,
        #[arg(long, default_value_t = 0.5)]
        threshold: f64,
        #[arg(long, default_value_t = 0.6)]
        quality_threshold: f64,
        #[command(flatten)]
        aligner: AlignerArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Subcommand)]
enum Score {
    /// Train the classifier on positive pairs plus generated negatives.
    Train {
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        lang: LangArgs,
        #[command(flatten)]
        tables: TableArgs,
        #[arg(long)]
        langid: PathBuf,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Raw classifier scores for a pair TSV.
    Run {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        #[command(flatten)]
        lang: LangArgs,
        #[command(flatten)]
        tables: TableArgs,
        #[arg(long)]
        langid: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rank-normalize a score file.
    Normalize {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply language-ID and n-gram coverage discounts; writes the submission TSV.
    Rerank {
        #[arg(long)]
        pairs: PathBuf,
        /// Raw scores; they are rank-normalized first.
        #[arg(long)]
        scores: PathBuf,
        #[command(flatten)]
        lang: LangArgs,
        #[arg(long)]
        langid: PathBuf,
        #[arg(long)]
        alpha: Option<f64>,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        beta: Option<f64>,
        /// Only check the source side for the language-ID discount.
        #[arg(long)]
        src_only: bool,
        #[arg(long)]
        out: PathBuf,
        /// Also write raw, normalized and final scores.
        #[arg(long)]
        detail: Option<PathBuf>,
    },
    /// Average rank-normalized score lists.
    Ensemble {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Validate an external score file against a pair TSV and rank-normalize it.
    LoadExternal {
        #[arg(long)]
        scores: PathBuf,
        #[arg(long)]
        pairs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct SubsampleArgs {
    /// Scored TSV (3 or 5 columns).
    #[arg(long)]
    scored: PathBuf,
    #[arg(long)]
    target: usize,
    /// Stop before the pair that would cross the budget.
    #[arg(long)]
    exclusive: bool,
    /// Count English tokens instead of whitespace words.
    #[arg(long)]
    tokenized: bool,
    #[arg(long)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_workers() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    let (stage, result) = dispatch(cli.command);
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error [{stage}]: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn configure_workers() -> Result<()> {
    let Ok(value) = std::env::var(WORKERS_ENV) else { return Ok(()) };
    let n: usize = value.trim().parse().with_context(|| format!("{WORKERS_ENV} must be a positive integer, got {value:?}"))?;
    if n == 0 {
        bail!("{WORKERS_ENV} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().context("configuring worker threads")?;
    Ok(())
}

fn dispatch(command: Command) -> (&'static str, Result<()>) {
    match command {
        Command::Textprep(c) => ("textprep", textprep(c)),
        Command::Align(c) => ("align", align(c)),
        Command::Sim(c) => ("sim", sim(c)),
        Command::Mine(c) => ("mine", mine(c)),
        Command::Score(c) => ("score", score(c)),
        Command::Subsample(a) => ("subsample", subsample_cmd(a)),
        Command::Pipeline { config } => ("pipeline", pipeline(&config)),
        Command::Stats { pairs } => ("stats", stats(&pairs)),
        Command::Synth { out, seed, seed_pairs, heldout_pairs, docs } => (
            "synth",
            write_fixtures(&out, seed, &FixtureSizes { seed_pairs, heldout_pairs, mini_docs: docs }).map_err(Into::into),
        ),
    }
}

fn stdin_lines() -> Result<Vec<String>> {
    std::io::stdin().lock().lines().collect::<std::io::Result<_>>().context("reading stdin")
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(text.lines().map(String::from).collect())
}

fn tokenizers(lang: &LangArgs, pairs: &[(String, String)]) -> Result<(Tokenizer, Tokenizer)> {
    let src = lang.pair.src();
    let lexicon = match (src, &lang.lexicon) {
        (Lang::Km, Some(path)) => Some(Arc::new(KhmerLexicon::load(path)?)),
        (Lang::Km, None) => Some(Arc::new(KhmerLexicon::build(pairs.iter().map(|(s, _)| s.as_str()))?)),
        _ => None,
    };
    Ok((Tokenizer::new(src, lexicon)?, Tokenizer::new(lang.pair.tgt(), None)?))
}

struct Loaded {
    forward: TranslationTable,
    reverse: TranslationTable,
    idf_src: IdfWeights,
    idf_tgt: IdfWeights,
}

impl Loaded {
    fn read(t: &TableArgs) -> Result<Self> {
        Ok(Self {
            forward: TranslationTable::load_tsv(&t.fwd, Direction::Forward)?,
            reverse: TranslationTable::load_tsv(&t.rev, Direction::Reverse)?,
            idf_src: IdfWeights::load_tsv(&t.idf_src)?,
            idf_tgt: IdfWeights::load_tsv(&t.idf_tgt)?,
        })
    }

    fn sim(&self) -> LexicalSimilarity<'_> {
        LexicalSimilarity { forward: &self.forward, reverse: &self.reverse, idf_src: &self.idf_src, idf_tgt: &self.idf_tgt }
    }
}

fn textprep(c: Textprep) -> Result<()> {
    let mut out = std::io::BufWriter::new(std::io::stdout().lock());
    match c {
        Textprep::Tokenize { lang, lexicon } => {
            let lexicon = lexicon.map(|p| KhmerLexicon::load(&p)).transpose()?.map(Arc::new);
            let tok = Tokenizer::new(lang, lexicon)?;
            for line in stdin_lines()? {
                writeln!(out, "{}", tok.tokenize(&line).tokens.join(" "))?;
            }
        }
        Textprep::Split { lang } => {
            let mut doc = String::new();
            std::io::stdin().read_to_string(&mut doc).context("reading stdin")?;
            for seg in split_sentences(&doc, lang) {
                writeln!(out, "{seg}")?;
            }
        }
        Textprep::LexiconBuild { input, out: path } => {
            let lines = read_lines(&input)?;
            let lex = KhmerLexicon::build(lines.iter().map(String::as_str))?;
            lex.save(&path)?;
            eprintln!("{} entries", lex.len());
        }
        Textprep::LangidTrain { samples, out: path } => {
            let mut data = Vec::new();
            for spec in &samples {
                let (lang, file) = spec.split_once('=').with_context(|| format!("expected LANG=FILE, got {spec:?}"))?;
                let lang: Lang = lang.parse().map_err(|e| anyhow::anyhow!("{e}"))?;
                data.push((lang, read_lines(Path::new(file))?));
            }
            LangIdModel::train(&data)?.save(&path)?;
        }
        Textprep::LangidClassify { model } => {
            let model = LangIdModel::load(&model)?;
            for line in stdin_lines()? {
                let guess = model.identify(&line);
                writeln!(out, "{}\t{}", guess.code(), guess.confidence)?;
            }
        }
    }
    out.flush()?;
    Ok(())
}

fn align(c: Align) -> Result<()> {
    let Align::Train { pairs, lang, aligner, out } = c;
    let pairs = read_pairs(&pairs)?;
    let (src_tok, tgt_tok) = tokenizers(&lang, &pairs)?;
    let toks: Vec<(Vec<String>, Vec<String>)> = pairs.iter().map(|(s, t)| (src_tok.keys(s), tgt_tok.keys(t))).collect();
    let trained = train_aligner(&toks, &aligner.config())?;
    std::fs::create_dir_all(&out)?;
    trained.forward.save_tsv(&out.join("table.forward.tsv"))?;
    trained.reverse.save_tsv(&out.join("table.reverse.tsv"))?;
    let stats = serde_json::json!({ "forward": trained.forward_stats, "reverse": trained.reverse_stats });
    std::fs::write(out.join("align_stats.json"), serde_json::to_string_pretty(&stats)? + "\n")?;
    Ok(())
}

fn sim(c: Sim) -> Result<()> {
    match c {
        Sim::Idf { pairs, lang, out } => {
            let pairs = read_pairs(&pairs)?;
            let (src_tok, tgt_tok) = tokenizers(&lang, &pairs)?;
            std::fs::create_dir_all(&out)?;
            IdfWeights::compute(pairs.iter().map(|(s, _)| src_tok.keys(s)))?.save_tsv(&out.join("idf.src.tsv"))?;
            IdfWeights::compute(pairs.iter().map(|(_, t)| tgt_tok.keys(t)))?.save_tsv(&out.join("idf.tgt.tsv"))?;
        }
        Sim::Score { pairs, lang, tables } => {
            let pairs = read_pairs(&pairs)?;
            let (src_tok, tgt_tok) = tokenizers(&lang, &pairs)?;
            let loaded = Loaded::read(&tables)?;
            let sim = loaded.sim();
            let mut out = std::io::BufWriter::new(std::io::stdout().lock());
            for (s, t) in &pairs {
                writeln!(out, "{}", sim.score_or_zero(&src_tok.keys(s), &tgt_tok.keys(t)))?;
            }
            out.flush()?;
        }
    }
    Ok(())
}

fn mine(c: Mine) -> Result<()> {
    let Mine::Run { docs, seed, lang, iterations, threshold, quality_threshold, aligner, out } = c;
    let seed = read_pairs(&seed)?;
    let (src_tok, tgt_tok) = tokenizers(&lang, &seed)?;
    let docs = read_documents(&docs, lang.pair.src(), lang.pair.tgt())?;
    let config = MiningConfig { sim_threshold: threshold, quality_threshold, iterations, ..MiningConfig::default() };
    let outcome = iterative_mine(&seed, &docs.docs, &src_tok, &tgt_tok, &aligner.config(), &config)?;
    std::fs::create_dir_all(&out)?;
    outcome.corpus.write_tsv(&out.join("mined.tsv"))?;
    outcome.aligner.forward.save_tsv(&out.join("table.forward.tsv"))?;
    outcome.aligner.reverse.save_tsv(&out.join("table.reverse.tsv"))?;
    outcome.idf_src.save_tsv(&out.join("idf.src.tsv"))?;
    outcome.idf_tgt.save_tsv(&out.join("idf.tgt.tsv"))?;
    for r in &outcome.reports {
        eprintln!("iteration {}: pool {} mined {} new {} accepted {}", r.iteration, r.pool_size, r.mined, r.new_pairs, r.accepted);
    }
    if docs.skipped > 0 {
        eprintln!("skipped {} unreadable document lines", docs.skipped);
    }
    Ok(())
}

fn score(c: Score) -> Result<()> {
    match c {
        Score::Train { pairs, lang, tables, langid, seed, out } => {
            let pairs = read_pairs(&pairs)?;
            let (src_tok, tgt_tok) = tokenizers(&lang, &pairs)?;
            let loaded = Loaded::read(&tables)?;
            let langid = LangIdModel::load(&langid)?;
            let aligner = AlignerConfig::default();
            let ctx = FeatureContext { sim: loaded.sim(), langid: &langid, src_tok: &src_tok, tgt_tok: &tgt_tok, aligner: &aligner };
            let sampling = NegativeSamplingConfig { seed, ..NegativeSamplingConfig::default() };
            let hyper = TrainHyper { seed: seed.wrapping_add(1), ..TrainHyper::default() };
            let trained = train_from_pairs(&ctx, &pairs, &sampling, &hyper)?;
            trained.model.save(&out)?;
            eprintln!("{}", serde_json::to_string(&trained.report)?);
        }
        Score::Run { model, pairs, lang, tables, langid, out } => {
            let model = ScorerModel::load(&model)?;
            let pairs = read_pairs(&pairs)?;
            let (src_tok, tgt_tok) = tokenizers(&lang, &pairs)?;
            let loaded = Loaded::read(&tables)?;
            let langid = LangIdModel::load(&langid)?;
            let aligner = AlignerConfig::default();
            let ctx = FeatureContext { sim: loaded.sim(), langid: &langid, src_tok: &src_tok, tgt_tok: &tgt_tok, aligner: &aligner };
            write_scores(&out, &score_pairs(&model, &ctx, &pairs))?;
        }
        Score::Normalize { scores, out } => {
            write_scores(&out, &rank_normalize(&load_external_scores(&scores, None)?))?;
        }
        Score::Rerank { pairs, scores, lang, langid, alpha, n, beta, src_only, out, detail } => {
            let pairs = read_pairs(&pairs)?;
            let raw = load_external_scores(&scores, Some(pairs.len()))?;
            let (src_tok, _) = tokenizers(&lang, &pairs)?;
            let langid = LangIdModel::load(&langid)?;
            let mut preset = bitext_core::scoring::RerankPreset::for_pair(lang.pair);
            preset.alpha = alpha.unwrap_or(preset.alpha);
            preset.n = n.unwrap_or(preset.n);
            preset.beta = beta.unwrap_or(preset.beta);
            if src_only {
                preset.lid_sides = LidSides { src: true, tgt: false };
            }
            preset.validate()?;
            let mut scored = scored_pairs(&pairs, &raw)?;
            let lid = rerank_langid(&mut scored, &langid, (lang.pair.src(), lang.pair.tgt()), preset.alpha, preset.lid_sides);
            let cov = rerank_ngram_coverage(&mut scored, |s| src_tok.tokenize(s).tokens, preset.n, preset.beta);
            write_scored(&out, &scored)?;
            if let Some(path) = detail {
                write_scored_detail(&path, &scored)?;
            }
            eprintln!("language-ID discounts: {lid}, coverage discounts: {cov}");
        }
        Score::Ensemble { inputs, out } => {
            let lists = inputs.iter().map(|p| load_external_scores(p, None)).collect::<Result<Vec<_>, _>>()?;
            write_scores(&out, &ensemble(&lists)?)?;
        }
        Score::LoadExternal { scores, pairs, out } => {
            let n = read_pairs(&pairs)?.len();
            write_scores(&out, &rank_normalize(&load_external_scores(&scores, Some(n))?))?;
        }
    }
    Ok(())
}

fn subsample_cmd(a: SubsampleArgs) -> Result<()> {
    let scored = read_scored(&a.scored)?;
    let boundary = if a.exclusive { Boundary::Exclusive } else { Boundary::Inclusive };
    let count = if a.tokenized { WordCount::Tokenized } else { WordCount::Raw };
    let selected = subsample(&scored, a.target, boundary, count);
    write_scored(&a.out, &selected)?;
    eprintln!("kept {} of {} pairs", selected.len(), scored.len());
    Ok(())
}

fn pipeline(config: &Path) -> Result<()> {
    let config = PipelineConfig::load(config)?;
    let manifest = run_pipeline(&config)?;
    for s in &manifest.stages {
        eprintln!("{:<13} {:>8.2}s", s.name, s.seconds);
    }
    eprintln!("outputs in {}", config.paths.output_dir.display());
    Ok(())
}

fn stats(pairs: &Path) -> Result<()> {
    let text = std::fs::read_to_string(pairs).with_context(|| format!("reading {}", pairs.display()))?;
    let has_scores = text.lines().next().is_some_and(|l| l.split('\t').count() >= 3);
    let (list, scores) = if has_scores {
        let scored = read_scored(pairs)?;
        let scores: Vec<f64> = scored.iter().map(|p| p.final_score).collect();
        (scored.into_iter().map(|p| (p.src, p.tgt)).collect::<Vec<_>>(), Some(scores))
    } else {
        (read_pairs(pairs)?, None)
    };
    println!("{}", serde_json::to_string_pretty(&compute_stats(&list, scores.as_deref()))?);
    Ok(())
}
