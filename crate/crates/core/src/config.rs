//! Flat `key = value` experiment configuration.
//!
//! Blank lines and anything after `#` are ignored. Unspecified keys take the
//! defaults of the chosen model; `to_text` writes every resolved key so a
//! run directory records exactly what was used.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::data::DatasetConfig;
use crate::model::{ModelKind, ModelSpec};
use crate::train::TrainConfig;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unknown key '{0}'")]
    UnknownKey(String),
    #[error("key '{key}': {message}")]
    Value { key: String, message: String },
    #[error("{0}")]
    Invalid(String),
}

/// Where the jets come from.
#[derive(Debug, Clone, PartialEq)]
pub enum DataSource {
    /// A JSONL file or a QJET1 cache, told apart by the file's leading bytes.
    File(PathBuf),
    Synth { n: usize, seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub model: ModelSpec,
    pub train: TrainConfig,
    pub dataset: DatasetConfig,
    pub source: DataSource,
    /// Seed for weight initialization. The shuffle stream is derived from it.
    pub seed: u64,
    pub output: PathBuf,
    /// When set, the sweep resizes the model to the nearest |Θ|.
    pub target_params: Option<usize>,
}

const KEYS: &[&str] = &[
    "model",
    "hidden",
    "layers",
    "nodes",
    "encoder_hidden",
    "decoder_hidden",
    "activation",
    "squared_modulus",
    "lr",
    "epochs",
    "batch",
    "checkpoint_start",
    "divergence_limit",
    "seed",
    "split_seed",
    "n_train",
    "n_val",
    "n_test",
    "min_particles",
    "scale_train_only",
    "wrap_phi",
    "data",
    "synth_n",
    "synth_seed",
    "output",
    "target_params",
];

/// Offsets the shuffle seed from the initialization seed.
const SHUFFLE_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

fn parse_pairs(text: &str) -> Result<BTreeMap<String, (usize, String)>, ConfigError> {
    let mut map = BTreeMap::new();
    for (k, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or(ConfigError::Syntax { line: k + 1, message: format!("expected key = value, got '{line}'") })?;
        let key = key.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(key));
        }
        if map.insert(key.clone(), (k + 1, value.trim().to_string())).is_some() {
            return Err(ConfigError::Syntax { line: k + 1, message: format!("duplicate key '{key}'") });
        }
    }
    Ok(map)
}

struct Reader {
    map: BTreeMap<String, (usize, String)>,
}

impl Reader {
    fn get<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        self.map
            .get(key)
            .map(|(_, v)| v.parse::<T>().map_err(|e| ConfigError::Value { key: key.into(), message: format!("'{v}': {e}") }))
            .transpose()
    }

    fn or<T: std::str::FromStr>(&self, key: &str, default: T) -> Result<T, ConfigError>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.get(key)?.unwrap_or(default))
    }
}

impl ExperimentConfig {
    /// Reference defaults for `kind` on 2,000 synthetic jets.
    pub fn default_for(kind: ModelKind) -> Self {
        let seed = 0;
        let mut train = TrainConfig::default_for(kind);
        train.shuffle_seed = seed ^ SHUFFLE_STREAM;
        Self {
            model: ModelSpec::default_for(kind),
            train,
            dataset: DatasetConfig::default(),
            source: DataSource::Synth { n: 2000, seed: 0 },
            seed,
            output: PathBuf::from("runs"),
            target_params: None,
        }
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let r = Reader { map: parse_pairs(text)? };
        let kind: ModelKind = r.get("model")?.ok_or(ConfigError::Invalid("missing required key 'model'".into()))?;
        let mut cfg = Self::default_for(kind);
        let m = &mut cfg.model;
        m.hidden = r.or("hidden", m.hidden)?;
        m.layers = r.or("layers", m.layers)?;
        m.nodes = r.or("nodes", m.nodes)?;
        m.encoder_hidden = r.or("encoder_hidden", m.encoder_hidden)?;
        m.decoder_hidden = r.or("decoder_hidden", m.decoder_hidden)?;
        m.activation = r.or("activation", m.activation)?;
        m.squared_modulus = r.or("squared_modulus", m.squared_modulus)?;

        cfg.seed = r.or("seed", cfg.seed)?;
        let t = &mut cfg.train;
        t.lr = r.or("lr", t.lr)?;
        t.epochs = r.or("epochs", t.epochs)?;
        t.batch_size = r.or("batch", t.batch_size)?;
        t.checkpoint_start = r.or("checkpoint_start", t.checkpoint_start)?;
        t.divergence_limit = r.or("divergence_limit", t.divergence_limit)?;
        t.shuffle_seed = cfg.seed ^ SHUFFLE_STREAM;

        let d = &mut cfg.dataset;
        d.nodes = cfg.model.nodes;
        d.seed = r.or("split_seed", d.seed)?;
        d.n_train = r.or("n_train", d.n_train)?;
        d.n_val = r.or("n_val", d.n_val)?;
        d.n_test = r.or("n_test", d.n_test)?;
        d.min_particles = r.or("min_particles", d.min_particles)?;
        d.scale_over_train_only = r.or("scale_train_only", d.scale_over_train_only)?;
        d.wrap_phi = r.or("wrap_phi", d.wrap_phi)?;

        let file: Option<PathBuf> = r.get("data")?;
        let synth_n: Option<usize> = r.get("synth_n")?;
        let synth_seed: u64 = r.or("synth_seed", 0)?;
        cfg.source = match (file, synth_n) {
            (Some(_), Some(_)) => return Err(ConfigError::Invalid("set either 'data' or 'synth_n', not both".into())),
            (Some(path), None) => DataSource::File(path),
            (None, Some(n)) => DataSource::Synth { n, seed: synth_seed },
            (None, None) => return Err(ConfigError::Invalid("no data source: set 'data' or 'synth_n'".into())),
        };
        cfg.output = r.or("output", cfg.output)?;
        cfg.target_params = r.get("target_params")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Invalid(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Paths in `data` and `output` become relative to `base` unless absolute.
    pub fn resolve_paths(&mut self, base: &Path) {
        if let DataSource::File(p) = &mut self.source {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        if self.output.is_relative() {
            self.output = base.join(&self.output);
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.model.validate().map_err(ConfigError::Invalid)?;
        self.train.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        if self.dataset.n_train == 0 || self.dataset.n_val == 0 {
            return Err(ConfigError::Invalid("n_train and n_val must be positive".into()));
        }
        if let DataSource::Synth { n, .. } = self.source {
            if n == 0 {
                return Err(ConfigError::Invalid("synth_n must be positive".into()));
            }
        }
        if self.dataset.nodes != self.model.nodes {
            return Err(ConfigError::Invalid("dataset and model node counts differ".into()));
        }
        Ok(())
    }

    /// Every key with its resolved value; parses back to `self`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let m = &self.model;
        let t = &self.train;
        let d = &self.dataset;
        let mut put = |k: &str, v: String| writeln!(s, "{k} = {v}").expect("write to string");
        put("model", m.kind.to_string());
        put("hidden", m.hidden.to_string());
        put("layers", m.layers.to_string());
        put("nodes", m.nodes.to_string());
        put("encoder_hidden", m.encoder_hidden.to_string());
        put("decoder_hidden", m.decoder_hidden.to_string());
        put("activation", m.activation.to_string());
        put("squared_modulus", m.squared_modulus.to_string());
        put("lr", format!("{:e}", t.lr));
        put("epochs", t.epochs.to_string());
        put("batch", t.batch_size.to_string());
        put("checkpoint_start", t.checkpoint_start.to_string());
        put("divergence_limit", format!("{:e}", t.divergence_limit));
        put("seed", self.seed.to_string());
        put("split_seed", d.seed.to_string());
        put("n_train", d.n_train.to_string());
        put("n_val", d.n_val.to_string());
        put("n_test", d.n_test.to_string());
        put("min_particles", d.min_particles.to_string());
        put("scale_train_only", d.scale_over_train_only.to_string());
        put("wrap_phi", d.wrap_phi.to_string());
        match &self.source {
            DataSource::File(p) => put("data", p.display().to_string()),
            DataSource::Synth { n, seed } => {
                put("synth_n", n.to_string());
                put("synth_seed", seed.to_string());
            }
        }
        put("output", self.output.display().to_string());
        if let Some(p) = self.target_params {
            put("target_params", p.to_string());
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_model() {
        let gnn = ExperimentConfig::parse("model = gnn\nsynth_n = 100").unwrap();
        assert_eq!((gnn.model.hidden, gnn.model.layers, gnn.train.batch_size), (10, 5, 64));
        let eq = ExperimentConfig::parse("model = eqgnn # quantum\n\nsynth_n=100").unwrap();
        assert_eq!((eq.model.hidden, eq.model.layers, eq.train.batch_size), (8, 6, 1));
        assert_eq!((eq.train.epochs, eq.train.checkpoint_start, eq.train.lr), (20, 15, 1e-3));
        assert_eq!((eq.dataset.n_train, eq.dataset.n_val, eq.dataset.n_test), (10_000, 1_250, 1_250));
    }

    #[test]
    fn quantum_hidden_must_be_eight() {
        let err = ExperimentConfig::parse("model = qgnn\nhidden = 10\nsynth_n = 10").unwrap_err();
        assert!(matches!(err, ConfigError::Invalid(_)), "{err}");
    }

    #[test]
    fn errors_name_the_problem() {
        assert!(matches!(ExperimentConfig::parse("model = gnn\nbogus = 1"), Err(ConfigError::UnknownKey(k)) if k == "bogus"));
        assert!(matches!(ExperimentConfig::parse("model = gnn\nsynth_n = 5\nlayers"), Err(ConfigError::Syntax { line: 3, .. })));
        assert!(matches!(ExperimentConfig::parse("model = gnn\nsynth_n = 5\nlr = fast"), Err(ConfigError::Value { .. })));
        assert!(matches!(ExperimentConfig::parse("model = gnn"), Err(ConfigError::Invalid(_))));
        assert!(matches!(ExperimentConfig::parse("model = gnn\nsynth_n = 1\nseed = 1\nseed = 2"), Err(ConfigError::Syntax { line: 4, .. })));
    }

    #[test]
    fn text_round_trip() {
        let cfg = ExperimentConfig::parse("model = egnn\nlr = 0.003\ndata = jets.jsonl\ntarget_params = 1200\nwrap_phi = true\nactivation = tanh").unwrap();
        assert_eq!(ExperimentConfig::parse(&cfg.to_text()).unwrap(), cfg);
    }
}
