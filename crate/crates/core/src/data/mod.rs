//! Jet ingestion, feature engineering and dataset assembly.

mod dataset;
mod io;
mod physics;
mod synth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use dataset::{build_dataset, edge_matrix, featurize_all, featurize_jet, max_scale, split_featured, top_pt_indices, BuildStats, DatasetConfig};
pub use io::{read_cache, read_jsonl, write_cache, write_jsonl, CACHE_MAGIC};
pub use physics::{delta_r, engineer_features, kinematics, particle_mass, wrap_angle};
pub use synth::{synth_jets, synth_jets_with, SynthConfig};

/// Node features per particle: `pT, y, φ, m_T, E, p_x, p_y, p_z`.
pub const NUM_FEATURES: usize = 8;
pub const FEATURE_NAMES: [&str; NUM_FEATURES] = ["pt", "y", "phi", "mt", "e", "px", "py", "pz"];

#[derive(Debug, Error)]
pub enum DataError {
    #[error("unknown PDG id {0}: not in the embedded mass table")]
    UnknownPdgId(i32),
    #[error("invalid particle: {0}")]
    InvalidParticle(String),
    #[error("invalid jet: {0}")]
    InvalidJet(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("not enough jets: need {needed} ({n_train} train + {n_val} val + {n_test} test), have {available} after filtering")]
    InsufficientJets { needed: usize, available: usize, n_train: usize, n_val: usize, n_test: usize },
    #[error("cache format error: {0}")]
    Cache(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RawParticle {
    pub pt: f64,
    pub y: f64,
    pub phi: f64,
    #[serde(rename = "pdgid")]
    pub pdg_id: i32,
}

impl RawParticle {
    pub fn validate(&self) -> Result<(), DataError> {
        use std::f64::consts::PI;
        if !(self.pt.is_finite() && self.pt > 0.0) {
            return Err(DataError::InvalidParticle(format!("pt must be positive and finite, got {}", self.pt)));
        }
        if !self.y.is_finite() {
            return Err(DataError::InvalidParticle(format!("rapidity must be finite, got {}", self.y)));
        }
        if !(self.phi > -PI && self.phi <= PI) {
            return Err(DataError::InvalidParticle(format!("phi must lie in (-pi, pi], got {}", self.phi)));
        }
        Ok(())
    }
}

/// One raw jet: its constituents and the label (0 = gluon, 1 = quark).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JetRecord {
    pub label: u8,
    pub particles: Vec<RawParticle>,
}

impl JetRecord {
    pub fn validate(&self) -> Result<(), DataError> {
        if self.label > 1 {
            return Err(DataError::InvalidJet(format!("label must be 0 or 1, got {}", self.label)));
        }
        if self.particles.is_empty() {
            return Err(DataError::InvalidJet("jet has no particles".into()));
        }
        self.particles.iter().try_for_each(RawParticle::validate)
    }
}

/// A jet reduced to a small complete graph.
///
/// `h` holds scaled node features in descending pre-scaling pT order, `x` the
/// raw `(φ, y)` coordinates, and `a` the row-major `n x n` ΔR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FeaturedJet {
    pub h: Vec<[f64; NUM_FEATURES]>,
    pub x: Vec<[f64; 2]>,
    pub a: Vec<f64>,
    pub label: u8,
}

impl FeaturedJet {
    pub fn n_nodes(&self) -> usize {
        self.h.len()
    }

    pub fn edge(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.n_nodes() + j]
    }

    pub fn h_flat(&self) -> Vec<f64> {
        self.h.iter().flatten().copied().collect()
    }

    pub fn x_flat(&self) -> Vec<f64> {
        self.x.iter().flatten().copied().collect()
    }

    /// Relabels nodes so that new node `k` is old node `perm[k]`.
    pub fn permuted(&self, perm: &[usize]) -> FeaturedJet {
        let n = self.n_nodes();
        assert_eq!(perm.len(), n, "permutation length");
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = self.edge(perm[i], perm[j]);
            }
        }
        FeaturedJet {
            h: perm.iter().map(|&p| self.h[p]).collect(),
            x: perm.iter().map(|&p| self.x[p]).collect(),
            a,
            label: self.label,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetSplit {
    pub train: Vec<FeaturedJet>,
    pub val: Vec<FeaturedJet>,
    pub test: Vec<FeaturedJet>,
    /// Per-column divisors applied to `h`.
    pub scale: [f64; NUM_FEATURES],
}

impl DatasetSplit {
    pub fn len(&self) -> usize {
        self.train.len() + self.val.len() + self.test.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Number of quark (label 1) jets.
pub fn count_quarks(jets: &[FeaturedJet]) -> usize {
    jets.iter().filter(|j| j.label == 1).count()
}
