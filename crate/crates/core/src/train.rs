//! Adam, the epoch loop with best-validation-AUC checkpointing, and the
//! binary checkpoint format.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::data::{DatasetSplit, FeaturedJet};
use crate::metrics::{accuracy, roc_auc, MetricsError, RocCurve};
use crate::model::{cross_entropy, Model, ModelKind, ModelSpec};
use crate::tensor::TensorError;

/// Leading bytes of a checkpoint file.
pub const CHECKPOINT_MAGIC: &[u8; 5] = b"QJCK1";

#[derive(Debug, Error)]
pub enum TrainError {
    #[error(transparent)]
    Tensor(#[from] TensorError),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
    #[error("training diverged at epoch {epoch}, batch {batch}: loss {loss}")]
    Diverged { epoch: usize, batch: usize, loss: f64 },
    #[error("{0} split is empty")]
    EmptySplit(&'static str),
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdamState {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
    pub t: u64,
}

impl AdamState {
    pub fn new(n: usize, lr: f64) -> Self {
        Self { lr, beta1: 0.9, beta2: 0.999, eps: 1e-8, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    /// One bias-corrected update of `params` in place.
    pub fn step(&mut self, params: &mut [f64], grads: &[f64]) -> Result<(), TrainError> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(TensorError::ShapeMismatch { op: "adam_step", lhs: vec![params.len()], rhs: vec![grads.len(), self.m.len()] }.into());
        }
        self.t += 1;
        let c1 = 1.0 - self.beta1.powf(self.t as f64);
        let c2 = 1.0 - self.beta2.powf(self.t as f64);
        for k in 0..params.len() {
            let g = grads[k];
            self.m[k] = self.beta1 * self.m[k] + (1.0 - self.beta1) * g;
            self.v[k] = self.beta2 * self.v[k] + (1.0 - self.beta2) * g * g;
            params[k] -= self.lr * (self.m[k] / c1) / ((self.v[k] / c2).sqrt() + self.eps);
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub lr: f64,
    /// First epoch whose weights may be kept as the best.
    pub checkpoint_start: usize,
    /// Seed of the per-epoch shuffle stream.
    pub shuffle_seed: u64,
    /// Abort when a batch loss exceeds this or is not finite.
    pub divergence_limit: f64,
}

impl TrainConfig {
    /// Learning rate 1e-3, 20 epochs, checkpointing from epoch 15, batch 64
    /// for classical models and 1 for quantum ones.
    pub fn default_for(kind: ModelKind) -> Self {
        Self {
            epochs: 20,
            batch_size: if kind.is_quantum() { 1 } else { 64 },
            lr: 1e-3,
            checkpoint_start: 15,
            shuffle_seed: 0,
            divergence_limit: 1e6,
        }
    }

    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size == 0 {
            return Err(TrainError::Config("batch_size must be positive".into()));
        }
        if !(self.lr.is_finite() && self.lr > 0.0) {
            return Err(TrainError::Config(format!("lr must be positive, got {}", self.lr)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochRecord {
    pub epoch: usize,
    pub train_loss: f64,
    pub val_loss: f64,
    pub train_acc: f64,
    pub val_acc: f64,
    /// `None` when the validation split holds a single class.
    pub val_auc: Option<f64>,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitMetrics {
    /// NaN when the split is empty.
    #[serde(with = "crate::metrics::nonfinite")]
    pub loss: f64,
    #[serde(with = "crate::metrics::nonfinite")]
    pub accuracy: f64,
    pub auc: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainReport {
    pub model: ModelSpec,
    pub param_count: usize,
    pub train: TrainConfig,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    /// Epoch 0 is the untrained model; later rows use running averages over
    /// the epoch's batches for the training columns.
    pub history: Vec<EpochRecord>,
    pub best_epoch: usize,
    pub test: SplitMetrics,
    pub test_roc: Option<RocCurve>,
}

impl TrainReport {
    /// Copy with wall-clock times zeroed, for run-to-run comparison.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for e in &mut r.history {
            e.seconds = 0.0;
        }
        r
    }

    pub fn best(&self) -> &EpochRecord {
        &self.history[self.best_epoch]
    }
}

/// Scores, loss, accuracy and (if both classes are present) AUC and ROC.
pub fn evaluate(model: &Model, jets: &[FeaturedJet]) -> Result<(SplitMetrics, Option<RocCurve>), TrainError> {
    let logits = model.predict(jets)?;
    metrics_from_logits(model.kind(), &logits, jets)
}

fn metrics_from_logits(kind: ModelKind, logits: &[[f64; 2]], jets: &[FeaturedJet]) -> Result<(SplitMetrics, Option<RocCurve>), TrainError> {
    let labels: Vec<u8> = jets.iter().map(|j| j.label).collect();
    metrics_from_labels(kind, logits, &labels)
}

fn metrics_from_labels(kind: ModelKind, logits: &[[f64; 2]], labels: &[u8]) -> Result<(SplitMetrics, Option<RocCurve>), TrainError> {
    let scores: Vec<f64> = logits.iter().map(|&l| crate::model::score(kind, l)).collect();
    let acc = accuracy(&scores, labels)?;
    let (roc, auc) = match roc_auc(&scores, labels) {
        Ok((roc, auc)) => (Some(roc), Some(auc)),
        Err(MetricsError::SingleClass(_)) => (None, None),
        Err(e) => return Err(e.into()),
    };
    Ok((SplitMetrics { loss: cross_entropy(logits, labels), accuracy: acc, auc }, roc))
}

fn improves(candidate: Option<f64>, best: Option<f64>) -> bool {
    match (candidate, best) {
        (Some(c), Some(b)) => c > b,
        (Some(_), None) => true,
        (None, _) => false,
    }
}

pub fn train_model(model: &mut Model, data: &DatasetSplit, cfg: &TrainConfig) -> Result<TrainReport, TrainError> {
    train_model_with(model, data, cfg, None, &mut |_| {})
}

/// Runs `cfg.epochs` epochs and restores the best weights before testing.
///
/// Weights from epoch `min(checkpoint_start, epochs)` onward are eligible;
/// the first eligible epoch is always kept and later epochs replace it when
/// validation AUC strictly improves. With `checkpoint`, the kept weights are
/// also written there each time they change.
pub fn train_model_with(
    model: &mut Model,
    data: &DatasetSplit,
    cfg: &TrainConfig,
    checkpoint: Option<&Path>,
    on_epoch: &mut dyn FnMut(&EpochRecord),
) -> Result<TrainReport, TrainError> {
    cfg.validate()?;
    if data.train.is_empty() {
        return Err(TrainError::EmptySplit("train"));
    }
    if data.val.is_empty() {
        return Err(TrainError::EmptySplit("validation"));
    }
    let start = cfg.checkpoint_start.min(cfg.epochs);
    let mut adam = AdamState::new(model.param_count(), cfg.lr);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.shuffle_seed);
    let mut order: Vec<usize> = (0..data.train.len()).collect();
    let mut history = Vec::with_capacity(cfg.epochs + 1);
    let mut best: Option<(usize, Option<f64>, Vec<f64>)> = None;

    for epoch in 0..=cfg.epochs {
        let t0 = Instant::now();
        let (train_loss, train_acc) = if epoch == 0 {
            let (m, _) = evaluate(model, &data.train)?;
            (m.loss, m.accuracy)
        } else {
            order.shuffle(&mut rng);
            let mut flat = model.params.flat();
            let (mut loss_sum, mut logits, mut labels) = (0.0, Vec::with_capacity(order.len()), Vec::with_capacity(order.len()));
            for (b, idx) in order.chunks(cfg.batch_size).enumerate() {
                let batch: Vec<&FeaturedJet> = idx.iter().map(|&i| &data.train[i]).collect();
                let out = model.loss_and_grad(&batch)?;
                if !out.loss.is_finite() || out.loss > cfg.divergence_limit || out.grad.iter().any(|g| !g.is_finite()) {
                    return Err(TrainError::Diverged { epoch, batch: b, loss: out.loss });
                }
                loss_sum += out.loss * batch.len() as f64;
                logits.extend(out.logits);
                labels.extend(batch.iter().map(|j| j.label));
                adam.step(&mut flat, &out.grad)?;
                model.params.set_flat(&flat)?;
            }
            let (m, _) = metrics_from_labels(model.kind(), &logits, &labels)?;
            (loss_sum / order.len() as f64, m.accuracy)
        };
        let (val, _) = evaluate(model, &data.val)?;
        let record = EpochRecord {
            epoch,
            train_loss,
            val_loss: val.loss,
            train_acc,
            val_acc: val.accuracy,
            val_auc: val.auc,
            seconds: t0.elapsed().as_secs_f64(),
        };
        on_epoch(&record);
        history.push(record);

        if epoch >= start && best.as_ref().is_none_or(|(_, auc, _)| improves(val.auc, *auc)) {
            best = Some((epoch, val.auc, model.params.flat()));
            if let Some(path) = checkpoint {
                save_checkpoint(path, model, epoch)?;
            }
        }
    }

    let (best_epoch, _, weights) = best.expect("the final epoch is always eligible");
    model.params.set_flat(&weights)?;
    let (test, test_roc) = if data.test.is_empty() {
        (SplitMetrics { loss: f64::NAN, accuracy: f64::NAN, auc: None }, None)
    } else {
        evaluate(model, &data.test)?
    };
    Ok(TrainReport {
        model: model.spec,
        param_count: model.param_count(),
        train: cfg.clone(),
        adam_beta1: adam.beta1,
        adam_beta2: adam.beta2,
        adam_eps: adam.eps,
        history,
        best_epoch,
        test,
        test_roc,
    })
}

/// First eight bytes of SHA-256 over the JSON form of the spec.
pub fn spec_hash(spec: &ModelSpec) -> u64 {
    let json = serde_json::to_vec(spec).expect("spec serializes");
    let digest = Sha256::digest(&json);
    u64::from_le_bytes(digest[..8].try_into().expect("digest has 32 bytes"))
}

/// Layout: magic, `u64` spec hash, `u64` epoch, `u64` parameter count, then
/// the parameters in declaration order. All little-endian.
pub fn save_checkpoint(path: &Path, model: &Model, epoch: usize) -> Result<(), TrainError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(CHECKPOINT_MAGIC)?;
    w.write_all(&spec_hash(&model.spec).to_le_bytes())?;
    w.write_all(&(epoch as u64).to_le_bytes())?;
    let flat = model.params.flat();
    w.write_all(&(flat.len() as u64).to_le_bytes())?;
    for v in flat {
        w.write_all(&v.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

/// Loads weights into `model`, whose spec must match the one saved.
/// Returns the saved epoch.
pub fn load_checkpoint(path: &Path, model: &mut Model) -> Result<usize, TrainError> {
    let mut bytes = Vec::new();
    BufReader::new(File::open(path)?).read_to_end(&mut bytes)?;
    let header = 5 + 24;
    if bytes.len() < header || &bytes[..5] != CHECKPOINT_MAGIC {
        return Err(TrainError::Checkpoint("not a QJCK1 checkpoint".into()));
    }
    let word = |k: usize| u64::from_le_bytes(bytes[5 + 8 * k..13 + 8 * k].try_into().expect("8 bytes"));
    let (hash, epoch, count) = (word(0), word(1) as usize, word(2) as usize);
    if hash != spec_hash(&model.spec) {
        return Err(TrainError::Checkpoint("model configuration does not match the checkpoint".into()));
    }
    if count != model.param_count() || bytes.len() != header + 8 * count {
        return Err(TrainError::Checkpoint(format!("expected {} parameters, file holds {count} ({} bytes)", model.param_count(), bytes.len())));
    }
    let flat: Vec<f64> = bytes[header..].chunks_exact(8).map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes"))).collect();
    model.params.set_flat(&flat)?;
    Ok(epoch)
}
