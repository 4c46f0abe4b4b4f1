//! The `qjet` subcommands as library functions.

use std::fmt::Write as _;
use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, DataSource, ExperimentConfig};
use crate::data::{
    build_dataset, featurize_jet, read_cache, read_jsonl, split_featured, synth_jets, write_cache, write_jsonl, DataError, DatasetConfig, DatasetSplit,
    FeaturedJet, JetRecord, CACHE_MAGIC, NUM_FEATURES,
};
use crate::metrics::RocCurve;
use crate::model::{Model, ModelKind, ModelSpec};
use crate::train::{evaluate, load_checkpoint, train_model_with, SplitMetrics, TrainError, TrainReport};

#[derive(Debug, Error)]
pub enum RunError {
    /// Bad user input: configuration, arguments or malformed files.
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Runtime(String),
}

impl RunError {
    /// 2 for input validation failures, 1 for anything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Validation(_) => 2,
            RunError::Runtime(_) => 1,
        }
    }
}

impl From<ConfigError> for RunError {
    fn from(e: ConfigError) -> Self {
        RunError::Validation(e.to_string())
    }
}

impl From<DataError> for RunError {
    fn from(e: DataError) -> Self {
        match e {
            DataError::Io(e) => RunError::Runtime(e.to_string()),
            other => RunError::Validation(other.to_string()),
        }
    }
}

impl From<TrainError> for RunError {
    fn from(e: TrainError) -> Self {
        match e {
            TrainError::Config(_) => RunError::Validation(e.to_string()),
            other => RunError::Runtime(other.to_string()),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Runtime(e.to_string())
    }
}

/// Doubles in CSV output: 17 significant digits, so values re-parse exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IngestSummary {
    pub input_jets: usize,
    pub excluded: usize,
    pub written: usize,
    pub quarks: usize,
    pub gluons: usize,
}

/// Warnings printed individually before summarizing the rest.
const MAX_WARNINGS: usize = 10;

/// Validates a JSONL file, drops short jets, and writes a featurized cache.
pub fn cmd_ingest(input: &Path, output: &Path, cfg: &DatasetConfig) -> Result<IngestSummary, RunError> {
    let jets = read_jsonl(input)?;
    let short: Vec<(usize, usize)> =
        jets.iter().enumerate().filter(|(_, j)| j.particles.len() < cfg.min_particles.max(cfg.nodes)).map(|(k, j)| (k + 1, j.particles.len())).collect();
    for (record, n) in short.iter().take(MAX_WARNINGS) {
        eprintln!("warning: jet {record} has {n} particles (minimum {}); excluded", cfg.min_particles);
    }
    if short.len() > MAX_WARNINGS {
        eprintln!("warning: {} more short jets excluded", short.len() - MAX_WARNINGS);
    }
    let (featured, stats, scale) = crate::data::featurize_all(&jets, cfg)?;
    write_cache(output, &featured, &scale)?;
    let summary = IngestSummary {
        input_jets: stats.input_jets,
        excluded: stats.excluded,
        written: stats.selected,
        quarks: stats.quarks_selected,
        gluons: stats.selected - stats.quarks_selected,
    };
    println!(
        "ingested {} jets: {} written ({} quark, {} gluon), {} excluded -> {}",
        summary.input_jets,
        summary.written,
        summary.quarks,
        summary.gluons,
        summary.excluded,
        output.display()
    );
    Ok(summary)
}

/// Writes synthetic jets as JSONL, or as a cache when `output` ends in `.cache`.
pub fn cmd_synth(n: usize, seed: u64, output: &Path) -> Result<usize, RunError> {
    if n == 0 {
        return Err(RunError::Validation("--n must be positive".into()));
    }
    let jets = synth_jets(n, seed);
    if output.extension().is_some_and(|e| e == "cache") {
        let (featured, _, scale) = crate::data::featurize_all(&jets, &DatasetConfig::default())?;
        write_cache(output, &featured, &scale)?;
    } else {
        write_jsonl(output, &jets)?;
    }
    let quarks = jets.iter().filter(|j| j.label == 1).count();
    println!("wrote {n} synthetic jets ({quarks} quark, {} gluon) -> {}", n - quarks, output.display());
    Ok(n)
}

fn is_cache(path: &Path) -> Result<bool, RunError> {
    let mut head = [0u8; 5];
    let mut f = fs::File::open(path).map_err(|e| RunError::Validation(format!("cannot open {}: {e}", path.display())))?;
    let n = f.read(&mut head)?;
    Ok(n == 5 && &head == CACHE_MAGIC)
}

/// Raw jets or featurized cache records from a file.
pub enum LoadedJets {
    Raw(Vec<JetRecord>),
    Cached { jets: Vec<FeaturedJet>, scale: [f64; NUM_FEATURES] },
}

pub fn load_jets(path: &Path) -> Result<LoadedJets, RunError> {
    if is_cache(path)? {
        let (jets, scale) = read_cache(path)?;
        Ok(LoadedJets::Cached { jets, scale })
    } else {
        Ok(LoadedJets::Raw(read_jsonl(path)?))
    }
}

/// Train/val/test splits for an experiment.
pub fn load_dataset(cfg: &ExperimentConfig) -> Result<DatasetSplit, RunError> {
    let loaded = match &cfg.source {
        DataSource::Synth { n, seed } => LoadedJets::Raw(synth_jets(*n, *seed)),
        DataSource::File(path) => load_jets(path)?,
    };
    match loaded {
        LoadedJets::Raw(jets) => Ok(build_dataset(&jets, &cfg.dataset)?.0),
        LoadedJets::Cached { jets, scale } => {
            if let Some(bad) = jets.iter().find(|j| j.n_nodes() != cfg.dataset.nodes) {
                return Err(RunError::Validation(format!("cache holds {}-node jets but the config asks for {}", bad.n_nodes(), cfg.dataset.nodes)));
            }
            Ok(split_featured(jets, &cfg.dataset, scale)?)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub run_dir: PathBuf,
    pub report: TrainReport,
}

pub fn write_history_csv(path: &Path, report: &TrainReport) -> Result<(), RunError> {
    let mut s = String::from("epoch,train_loss,val_loss,train_acc,val_acc,val_auc\n");
    for e in &report.history {
        writeln!(s, "{},{},{},{},{},{}", e.epoch, fmt_f64(e.train_loss), fmt_f64(e.val_loss), fmt_f64(e.train_acc), fmt_f64(e.val_acc), fmt_opt(e.val_auc))
            .expect("write to string");
    }
    fs::write(path, s)?;
    Ok(())
}

pub fn write_roc_csv(path: &Path, roc: Option<&RocCurve>) -> Result<(), RunError> {
    let mut s = String::from("fpr,tpr\n");
    if let Some(roc) = roc {
        for (f, t) in roc.fpr.iter().zip(&roc.tpr) {
            writeln!(s, "{},{}", fmt_f64(*f), fmt_f64(*t)).expect("write to string");
        }
    }
    fs::write(path, s)?;
    Ok(())
}

fn unique_run_dir(root: &Path, name: &str) -> Result<PathBuf, RunError> {
    let stamp = chrono::Local::now().format("%Y%m%d-%H%M%S");
    for k in 0.. {
        let dir = if k == 0 { root.join(format!("{name}-{stamp}")) } else { root.join(format!("{name}-{stamp}-{k}")) };
        if !dir.exists() {
            fs::create_dir_all(&dir)?;
            return Ok(dir);
        }
    }
    unreachable!("the loop returns once a free name is found")
}

/// Trains one configuration into a fresh timestamped directory under
/// `cfg.output`.
pub fn run_experiment(cfg: &ExperimentConfig, verbose: bool) -> Result<TrainOutcome, RunError> {
    cfg.validate()?;
    let data = load_dataset(cfg)?;
    let mut model = Model::new(cfg.model, cfg.seed).map_err(RunError::Validation)?;
    let run_dir = unique_run_dir(&cfg.output, cfg.model.kind.as_str())?;
    fs::write(run_dir.join("config.txt"), cfg.to_text())?;
    fs::write(run_dir.join("scale.json"), serde_json::to_string(&data.scale).expect("array serializes"))?;
    if verbose {
        eprintln!(
            "{}: |Θ| = {}, {} train / {} val / {} test jets -> {}",
            cfg.model.kind,
            model.param_count(),
            data.train.len(),
            data.val.len(),
            data.test.len(),
            run_dir.display()
        );
    }
    let ckpt = run_dir.join("checkpoint.qjck");
    let mut progress = |e: &crate::train::EpochRecord| {
        if verbose {
            eprintln!(
                "epoch {:>3}  train loss {:.4} acc {:.4}  val loss {:.4} acc {:.4} auc {}  ({:.1}s)",
                e.epoch,
                e.train_loss,
                e.train_acc,
                e.val_loss,
                e.val_acc,
                e.val_auc.map_or("n/a".into(), |a| format!("{a:.4}")),
                e.seconds
            );
        }
    };
    let report = train_model_with(&mut model, &data, &cfg.train, Some(&ckpt), &mut progress)?;
    fs::write(run_dir.join("report.json"), serde_json::to_string_pretty(&report).expect("report serializes"))?;
    write_history_csv(&run_dir.join("history.csv"), &report)?;
    write_roc_csv(&run_dir.join("roc.csv"), report.test_roc.as_ref())?;
    Ok(TrainOutcome { run_dir, report })
}

pub fn cmd_train(config: &Path) -> Result<TrainOutcome, RunError> {
    let mut cfg = ExperimentConfig::load(config)?;
    cfg.resolve_paths(config.parent().unwrap_or(Path::new(".")));
    let outcome = run_experiment(&cfg, true)?;
    println!(
        "test AUC {}  accuracy {:.4}  (best epoch {}) -> {}",
        outcome.report.test.auc.map_or("n/a".into(), |a| format!("{a:.4}")),
        outcome.report.test.accuracy,
        outcome.report.best_epoch,
        outcome.run_dir.display()
    );
    Ok(outcome)
}

/// Evaluates a checkpoint on every eligible jet of `data`. The model
/// configuration comes from `config`, or `config.txt` beside the checkpoint.
/// Features are scaled with the training run's `scale.json` when present.
pub fn cmd_eval(checkpoint: &Path, data: &Path, config: Option<&Path>) -> Result<(SplitMetrics, usize), RunError> {
    let dir = checkpoint.parent().unwrap_or(Path::new("."));
    let cfg_path = config.map(Path::to_path_buf).unwrap_or_else(|| dir.join("config.txt"));
    let cfg = ExperimentConfig::load(&cfg_path)?;
    let mut model = Model::new(cfg.model, cfg.seed).map_err(RunError::Validation)?;
    load_checkpoint(checkpoint, &mut model).map_err(|e| RunError::Validation(e.to_string()))?;

    let train_scale: Option<[f64; NUM_FEATURES]> = match fs::read_to_string(dir.join("scale.json")) {
        Ok(text) => Some(serde_json::from_str(&text).map_err(|e| RunError::Validation(format!("scale.json: {e}")))?),
        Err(_) => None,
    };
    let jets = match load_jets(data)? {
        LoadedJets::Raw(raw) => {
            let min = cfg.dataset.min_particles.max(cfg.dataset.nodes);
            let mut jets = raw
                .iter()
                .filter(|j| j.particles.len() >= min)
                .map(|j| featurize_jet(j, cfg.dataset.nodes, cfg.dataset.wrap_phi))
                .collect::<Result<Vec<_>, _>>()?;
            match train_scale {
                Some(scale) => rescale(&mut jets, &[1.0; NUM_FEATURES], &scale),
                None => {
                    let n = jets.len();
                    crate::data::max_scale(&mut jets, 0..n);
                }
            }
            jets
        }
        LoadedJets::Cached { mut jets, scale } => {
            if let Some(train) = train_scale {
                rescale(&mut jets, &scale, &train);
            }
            jets
        }
    };
    if jets.is_empty() {
        return Err(RunError::Validation("no eligible jets to evaluate".into()));
    }
    let (metrics, _) = evaluate(&model, &jets)?;
    println!(
        "{} jets: loss {:.6}  accuracy {:.4}  AUC {}",
        jets.len(),
        metrics.loss,
        metrics.accuracy,
        metrics.auc.map_or("n/a".into(), |a| format!("{a:.4}"))
    );
    Ok((metrics, jets.len()))
}

/// Re-expresses features scaled by `from` as if scaled by `to`.
fn rescale(jets: &mut [FeaturedJet], from: &[f64; NUM_FEATURES], to: &[f64; NUM_FEATURES]) {
    for jet in jets {
        for row in &mut jet.h {
            for c in 0..NUM_FEATURES {
                row[c] = row[c] * from[c] / to[c];
            }
        }
    }
}

/// Target sizes of the parameter sweep.
pub const SWEEP_TARGETS: [usize; 6] = [500, 1200, 1600, 2800, 3500, 5100];

/// Resizes `base` to the |Θ| nearest `target`: hidden width and depth for
/// classical models, encoder and decoder widths for quantum ones. Ties go to
/// the shallower classical model or the more balanced quantum widths.
pub fn nearest_spec(base: &ModelSpec, target: usize) -> ModelSpec {
    let dist = |s: &ModelSpec| s.param_count().abs_diff(target);
    let mut best = *base;
    let mut best_key = (usize::MAX, usize::MAX);
    if base.kind.is_quantum() {
        for enc in 1..=1000 {
            for dec in 1..=1000 {
                let s = ModelSpec { encoder_hidden: enc, decoder_hidden: dec, ..*base };
                let key = (dist(&s), enc.abs_diff(dec));
                if key < best_key {
                    best_key = key;
                    best = s;
                }
            }
        }
    } else {
        for layers in 1..=8 {
            for hidden in 1..=128 {
                let s = ModelSpec { hidden, layers, ..*base };
                let key = (dist(&s), layers);
                if key < best_key {
                    best_key = key;
                    best = s;
                }
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub config: PathBuf,
    pub model: ModelKind,
    pub target_params: Option<usize>,
    pub spec: ModelSpec,
    pub test_auc: Option<f64>,
    pub test_acc: Option<f64>,
    pub status: String,
}

pub const SWEEP_HEADER: &str = "model,target_params,params,hidden,layers,encoder_hidden,decoder_hidden,test_auc,test_acc,status";

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = format!("{SWEEP_HEADER}\n");
    for r in rows {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{}",
            r.model,
            r.target_params.map(|t| t.to_string()).unwrap_or_default(),
            r.spec.param_count(),
            r.spec.hidden,
            r.spec.layers,
            r.spec.encoder_hidden,
            r.spec.decoder_hidden,
            fmt_opt(r.test_auc),
            fmt_opt(r.test_acc),
            r.status.replace(',', ";").replace('\n', " ")
        )
        .expect("write to string");
    }
    s
}

/// Config files (`*.txt`, `*.cfg`, `*.conf`) directly inside `dir`, sorted.
pub fn sweep_configs(dir: &Path) -> Result<Vec<PathBuf>, RunError> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| RunError::Validation(format!("cannot read {}: {e}", dir.display())))? {
        let path = entry?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt" || e == "cfg" || e == "conf") {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

/// Writes one config per model and sweep target into `dir`.
pub fn generate_sweep_configs(dir: &Path, base: &str) -> Result<Vec<PathBuf>, RunError> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::new();
    for kind in ModelKind::ALL {
        for target in SWEEP_TARGETS {
            let path = dir.join(format!("{kind}-{target:05}.txt"));
            fs::write(&path, format!("model = {kind}\ntarget_params = {target}\n{base}"))?;
            paths.push(path);
        }
    }
    Ok(paths)
}

/// Trains every config in `dir`, continuing past failures, and writes
/// `auc_vs_params.csv` to `output` (default: inside `dir`).
pub fn cmd_sweep(dir: &Path, output: Option<&Path>, parallel: bool) -> Result<Vec<SweepRow>, RunError> {
    let configs = sweep_configs(dir)?;
    let run = |path: &PathBuf| -> SweepRow {
        let parsed = ExperimentConfig::load(path).map(|mut c| {
            c.resolve_paths(dir);
            if let Some(t) = c.target_params {
                c.model = nearest_spec(&c.model, t);
            }
            c
        });
        match parsed {
            Err(e) => SweepRow {
                config: path.clone(),
                model: ModelKind::Gnn,
                target_params: None,
                spec: ModelSpec::default_for(ModelKind::Gnn),
                test_auc: None,
                test_acc: None,
                status: format!("invalid config: {e}"),
            },
            Ok(cfg) => {
                let (test_auc, test_acc, status) = match run_experiment(&cfg, !parallel) {
                    Ok(o) => (o.report.test.auc, Some(o.report.test.accuracy), "ok".to_string()),
                    Err(e) => (None, None, format!("failed: {e}")),
                };
                SweepRow { config: path.clone(), model: cfg.model.kind, target_params: cfg.target_params, spec: cfg.model, test_auc, test_acc, status }
            }
        }
    };
    let rows: Vec<SweepRow> = if parallel { configs.par_iter().map(run).collect() } else { configs.iter().map(run).collect() };
    let out = output.map(Path::to_path_buf).unwrap_or_else(|| dir.join("auc_vs_params.csv"));
    fs::write(&out, sweep_csv(&rows))?;
    println!("{} runs -> {}", rows.len(), out.display());
    Ok(rows)
}
