//! Command-line entry points.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 missing
//! resource, 3 unreadable input, 4 training record without a human score,
//! 5 unknown record id or lemma.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use crate::config::RunConfig;
use crate::corpus::{load_dataset, SentencePairRecord};
use crate::error::Error;
use crate::lexicon::LexiconBundle;
use crate::pipeline::{classify_record, score_record};
use crate::relation::RelationCategory;
use crate::score::{
    feature_importances, normalize_labels, render_importances, system_level_report, train_gbr, train_linear,
    FeatureVector, LabelBounds, Mode, Model, ScoredItem, FEATURE_NAMES,
};
use crate::sense::{shortest_sense_path, GraphSenseScorer, NodeKind, SenseCache, SenseGraphStore, SenseNode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_MISSING_RESOURCE: i32 = 2;
pub const EXIT_PARSE: i32 = 3;
pub const EXIT_MISSING_LABEL: i32 = 4;
pub const EXIT_UNKNOWN: i32 = 5;

/// Directory for the persistent sense-cost memo.
pub const CACHE_DIR_ENV: &str = "BIVERT_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(
    name = "bivert",
    version,
    about = "Reference-less MT evaluation from back-translations"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every record of a dataset with a trained model.
    Score,
    /// Train a model on a labelled dataset.
    Train,
    /// Show the word alignment and relation costs of one record.
    Align { id: String },
    /// Show the shortest sense path between two lemmas.
    SensePath { lemma_a: String, lemma_b: String },
    /// Print the feature importances of a trained model.
    Importances,
}

#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub dataset: Option<PathBuf>,
    /// Sense-graph snapshot. Without one, sense costs fall back to embeddings.
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Lexicon directory. Defaults to the bundled lexicons.
    #[arg(long, global = true)]
    pub lexicons: Option<PathBuf>,
    /// Model file to read (score, importances) or write (train).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Language pair tag such as eng-deu; selects presets and the source language.
    #[arg(long, global = true)]
    pub lang_pair: Option<String>,
    /// Deepest search level for sense paths [default: 7].
    #[arg(long, global = true)]
    pub max_depth: Option<usize>,
    /// Comma-separated relations to expand [default: hypernym].
    #[arg(long, global = true)]
    pub relations: Option<String>,
    /// gbr or linear [default: gbr].
    #[arg(long, global = true)]
    pub mode: Option<Mode>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for sentence scoring [default: all cores].
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[arg(long, global = true)]
    pub n_estimators: Option<usize>,
    #[arg(long, global = true)]
    pub tree_depth: Option<usize>,
    #[arg(long, global = true)]
    pub learning_rate: Option<f64>,
    #[arg(long, global = true)]
    pub min_samples_leaf: Option<usize>,
    /// Leave this system out of the system-level report.
    #[arg(long, global = true)]
    pub exclude_system: Option<String>,
    /// Write per-sentence scores here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Write the system-level report here instead of stdout.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

type CmdResult = std::result::Result<(), Failure>;

fn fail(code: i32, message: impl Into<String>) -> Failure {
    Failure {
        code,
        message: message.into(),
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Io { .. } => EXIT_MISSING_RESOURCE,
            Error::MissingLabel(_) => EXIT_MISSING_LABEL,
            _ => EXIT_PARSE,
        };
        fail(code, e.to_string())
    }
}

fn output_error(path: &Path, e: std::io::Error) -> Failure {
    fail(EXIT_MISSING_RESOURCE, format!("cannot write {}: {e}", path.display()))
}

/// Merges the config file, if any, with the flags. Flags win.
pub fn resolve_config(args: &CommonArgs) -> crate::Result<RunConfig> {
    let mut c = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    macro_rules! set {
        ($($flag:ident => $($field:ident).+),* $(,)?) => {
            $(if let Some(v) = &args.$flag { c.$($field).+ = Some(v.clone()); })*
        };
    }
    set!(
        dataset => dataset,
        graph => graph,
        lexicons => lexicons,
        model => model,
        lang_pair => lang_pair,
        jobs => jobs,
        exclude_system => exclude_system,
        out => out,
        report => report,
        n_estimators => hyperparams.n_estimators,
        tree_depth => hyperparams.max_depth,
        learning_rate => hyperparams.learning_rate,
        min_samples_leaf => hyperparams.min_samples_leaf,
    );
    if let Some(d) = args.max_depth {
        c.sense.max_depth = d;
    }
    if let Some(r) = &args.relations {
        c.sense.relations = r
            .split(',')
            .map(|s| s.trim().to_string())
            .filter(|s| !s.is_empty())
            .collect();
    }
    if let Some(m) = args.mode {
        c.mode = m;
    }
    if let Some(s) = args.seed {
        c.seed = s;
    }
    Ok(c)
}

struct Resources {
    lexicon: LexiconBundle,
    graph: SenseGraphStore,
}

fn required<'a>(path: &'a Option<PathBuf>, what: &str, flag: &str) -> std::result::Result<&'a Path, Failure> {
    path.as_deref().ok_or_else(|| {
        fail(
            EXIT_MISSING_RESOURCE,
            format!("no {what} given (use {flag} or the config file)"),
        )
    })
}

fn load_resources(c: &RunConfig) -> std::result::Result<Resources, Failure> {
    let lexicon = match &c.lexicons {
        Some(dir) => LexiconBundle::load_dir(dir)?,
        None => LexiconBundle::bundled(),
    };
    let graph = match &c.graph {
        Some(path) => SenseGraphStore::load(path)?,
        None => SenseGraphStore::empty(),
    };
    Ok(Resources { lexicon, graph })
}

fn load_records(c: &RunConfig) -> std::result::Result<Vec<SentencePairRecord>, Failure> {
    let path = required(&c.dataset, "dataset", "--dataset")?;
    load_dataset(path).map_err(|e| {
        let mut f = Failure::from(e);
        f.message = format!("{}: {}", path.display(), f.message);
        f
    })
}

fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

/// Featurizes all records on a pool of `jobs` threads, keeping input order.
fn featurize_all(
    c: &RunConfig,
    records: &[SentencePairRecord],
    res: &Resources,
) -> std::result::Result<Vec<FeatureVector>, Failure> {
    let search = c.search_config().map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let cache = match cache_dir() {
        Some(dir) => SenseCache::load(&dir, GraphSenseScorer::fingerprint_for(&res.graph, &search))?,
        None => SenseCache::new(GraphSenseScorer::fingerprint_for(&res.graph, &search)),
    };
    let scorer = GraphSenseScorer::with_cache(&res.graph, &res.lexicon, search, cache);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(c.jobs.unwrap_or(0))
        .build()
        .map_err(|e| fail(EXIT_USAGE, format!("cannot start worker pool: {e}")))?;
    let scored: Vec<_> = pool.install(|| {
        records
            .par_iter()
            .map(|r| score_record(r, &res.lexicon, &scorer).map(|s| s.features))
            .collect()
    });
    let mut features = Vec::with_capacity(records.len());
    for (record, s) in records.iter().zip(scored) {
        features.push(s.map_err(|e| fail(EXIT_PARSE, format!("record {}: {e}", record.id)))?);
    }
    if let Some(dir) = cache_dir() {
        scorer.cache().save(&dir)?;
    }
    Ok(features)
}

fn emit(path: Option<&Path>, text: &str, stdout: &mut dyn Write) -> CmdResult {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| output_error(p, e)),
        None => stdout
            .write_all(text.as_bytes())
            .map_err(|e| fail(EXIT_MISSING_RESOURCE, format!("cannot write output: {e}"))),
    }
}

fn cmd_score(c: &RunConfig, stdout: &mut dyn Write) -> CmdResult {
    let model_path = required(&c.model, "model", "--model")?;
    let records = load_records(c)?;
    let model = Model::load(model_path)?;
    let res = load_resources(c)?;
    let features = featurize_all(c, &records, &res)?;

    let mut scores = String::new();
    let mut items = Vec::new();
    for (r, f) in records.iter().zip(&features) {
        let p = model.predict(f);
        let _ = writeln!(scores, "{}\t{p}", r.id);
        if let Some(h) = r.human_score {
            items.push(ScoredItem {
                system: r.system.clone(),
                human: h,
                predicted: p,
            });
        }
    }
    emit(c.out.as_deref(), &scores, stdout)?;
    let report = system_level_report(&items, c.exclude_system.as_deref()).render();
    emit(c.report.as_deref(), &report, stdout)
}

fn cmd_train(c: &RunConfig, stdout: &mut dyn Write) -> CmdResult {
    let model_path = required(&c.model, "model output path", "--model")?;
    let hp = c.hyperparams();
    hp.validate().map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let records = load_records(c)?;
    let mut labels = Vec::with_capacity(records.len());
    for r in &records {
        labels.push(
            r.human_score
                .ok_or_else(|| Failure::from(Error::MissingLabel(r.id.clone())))?,
        );
    }
    let res = load_resources(c)?;
    let features = featurize_all(c, &records, &res)?;
    let y = normalize_labels(&labels);

    let mut model = match c.mode {
        Mode::Gbr => train_gbr(&features, &y, &hp)?,
        Mode::Linear => train_linear(&features, &y, c.seed)?,
    };
    model.train_meta.label_bounds = LabelBounds::fit(&labels);
    model.train_meta.lang_pair = c.lang_pair.clone();
    model.save(model_path).map_err(|e| match e {
        Error::Io { path, source } => output_error(&path, source),
        other => other.into(),
    })?;
    emit(
        c.out.as_deref(),
        &render_importances(&feature_importances(&model)),
        stdout,
    )
}

fn cmd_importances(c: &RunConfig, stdout: &mut dyn Write) -> CmdResult {
    let model = Model::load(required(&c.model, "model", "--model")?)?;
    let imp = feature_importances(&model);
    let mut out = String::new();
    for (name, v) in FEATURE_NAMES.iter().zip(imp) {
        let _ = writeln!(out, "{name}\t{v:.6}");
    }
    emit(c.out.as_deref(), &out, stdout)
}

fn cmd_align(c: &RunConfig, id: &str, stdout: &mut dyn Write) -> CmdResult {
    let records = load_records(c)?;
    let record = records
        .iter()
        .find(|r| r.id == id)
        .ok_or_else(|| fail(EXIT_UNKNOWN, format!("no record with id {id:?}")))?;
    let res = load_resources(c)?;
    let search = c.search_config().map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let scorer = GraphSenseScorer::new(&res.graph, &res.lexicon, search);
    let (pairing, relations) = classify_record(record, &res.lexicon, &scorer)?;

    let mut out = String::new();
    for (p, rel) in pairing.pairs.iter().zip(&relations) {
        let _ = writeln!(
            out,
            "{}\t↔\t{}\t{:.6}\t{}\t{:.6}",
            record.source.words()[p.src].surface,
            record.back.words()[p.back].surface,
            p.similarity,
            rel.category,
            rel.cost
        );
    }
    for rel in &relations[pairing.pairs.len()..] {
        let (tag, word) = match rel.category {
            RelationCategory::Missing => ("MISSING", rel.src_word.as_deref()),
            _ => ("EXTRA", rel.back_word.as_deref()),
        };
        let _ = writeln!(out, "{tag}\t{}\t{:.6}", word.unwrap_or_default(), rel.cost);
    }
    let features = crate::score::featurize(&relations);
    let values: Vec<String> = features.to_array().iter().map(|v| format!("{v:.6}")).collect();
    let _ = writeln!(out, "FEATURES\t{}", values.join("\t"));
    emit(c.out.as_deref(), &out, stdout)
}

fn node_label(n: &SenseNode) -> String {
    match (n.kind, &n.lemma) {
        (NodeKind::Root, _) => format!("<{}>", n.id),
        (NodeKind::Synset, Some(lemma)) => format!("{}:{lemma}", n.id),
        (NodeKind::Synset, None) => n.id.clone(),
    }
}

fn cmd_sense_path(c: &RunConfig, a: &str, b: &str, stdout: &mut dyn Write) -> CmdResult {
    required(&c.graph, "sense graph", "--graph")?;
    let res = load_resources(c)?;
    let search = c.search_config().map_err(|e| fail(EXIT_USAGE, e.to_string()))?;
    let lang = c.source_lang();
    for lemma in [a, b] {
        let known = [crate::sense::Pos::Noun, crate::sense::Pos::Verb]
            .into_iter()
            .any(|pos| !res.graph.senses_of(lemma, lang, pos).is_empty());
        if !known {
            return Err(fail(
                EXIT_UNKNOWN,
                format!("lemma {lemma:?} has no {lang} noun or verb senses in the graph"),
            ));
        }
    }
    let path = shortest_sense_path(a, b, lang, &res.graph, &search);
    let mut out = String::new();
    match path.score() {
        Some(score) => {
            if let Some(pos) = path.pos {
                let _ = writeln!(out, "POS\t{pos}");
            }
            for e in &path.edges {
                let _ = writeln!(
                    out,
                    "{}\t{}\t{}\tdepth={}\tweight={:.6}",
                    node_label(&e.from),
                    e.relation,
                    node_label(&e.to),
                    e.depth,
                    e.weight
                );
            }
            let _ = writeln!(out, "TOTAL\t{:.6}", path.total_weight);
            let _ = writeln!(out, "SCORE\t{score:.6}");
        }
        None => {
            let _ = writeln!(out, "NO PATH\tdepth={}", path.depth_reached);
        }
    }
    emit(c.out.as_deref(), &out, stdout)
}

/// Parses `args` (program name first) and runs the command. Returns the
/// process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { stderr } else { stdout };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    let result = resolve_config(&cli.common)
        .map_err(|e| match e {
            Error::Io { .. } => Failure::from(e),
            other => fail(EXIT_USAGE, other.to_string()),
        })
        .and_then(|c| match &cli.command {
            Command::Score => cmd_score(&c, stdout),
            Command::Train => cmd_train(&c, stdout),
            Command::Align { id } => cmd_align(&c, id, stdout),
            Command::SensePath { lemma_a, lemma_b } => cmd_sense_path(&c, lemma_a, lemma_b, stdout),
            Command::Importances => cmd_importances(&c, stdout),
        });
    match result {
        Ok(()) => EXIT_OK,
        Err(f) => {
            let _ = writeln!(stderr, "bivert: {}", f.message);
            f.code
        }
    }
}
