use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::physics::{delta_r, engineer_features};
use super::{DataError, DatasetSplit, FeaturedJet, JetRecord, NUM_FEATURES};

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetConfig {
    /// Jets with fewer constituents are dropped.
    pub min_particles: usize,
    /// Leading-pT particles kept per jet (graph nodes).
    pub nodes: usize,
    pub n_train: usize,
    pub n_val: usize,
    pub n_test: usize,
    /// Seed of the shuffle that precedes the sequential split.
    pub seed: u64,
    /// Compute the max-scaling divisors on the training split only.
    pub scale_over_train_only: bool,
    /// Map Δφ into (−π, π] before computing ΔR.
    pub wrap_phi: bool,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            min_particles: 10,
            nodes: 3,
            n_train: 10_000,
            n_val: 1_250,
            n_test: 1_250,
            seed: 0,
            scale_over_train_only: false,
            wrap_phi: false,
        }
    }
}

impl DatasetConfig {
    pub fn total(&self) -> usize {
        self.n_train + self.n_val + self.n_test
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BuildStats {
    pub input_jets: usize,
    /// Dropped for having fewer than `min_particles` (or `nodes`) constituents.
    pub excluded: usize,
    pub selected: usize,
    pub quarks_selected: usize,
}

/// Indices of the `k` highest-pT particles, highest first. Ties keep the
/// original order.
pub fn top_pt_indices(jet: &JetRecord, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..jet.particles.len()).collect();
    idx.sort_by(|&a, &b| jet.particles[b].pt.total_cmp(&jet.particles[a].pt));
    idx.truncate(k);
    idx
}

/// Symmetric, zero-diagonal ΔR matrix over `(φ, y)` coordinates.
pub fn edge_matrix(x: &[[f64; 2]], wrap_phi: bool) -> Vec<f64> {
    let n = x.len();
    let mut a = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = delta_r(x[i], x[j], wrap_phi);
            a[i * n + j] = d;
            a[j * n + i] = d;
        }
    }
    a
}

/// Unscaled graph of the `nodes` leading particles.
pub fn featurize_jet(jet: &JetRecord, nodes: usize, wrap_phi: bool) -> Result<FeaturedJet, DataError> {
    if jet.particles.len() < nodes {
        return Err(DataError::InvalidJet(format!("{} particles, need at least {nodes}", jet.particles.len())));
    }
    let top = top_pt_indices(jet, nodes);
    let h = top.iter().map(|&i| engineer_features(&jet.particles[i])).collect::<Result<Vec<_>, _>>()?;
    let x: Vec<[f64; 2]> = top.iter().map(|&i| [jet.particles[i].phi, jet.particles[i].y]).collect();
    let a = edge_matrix(&x, wrap_phi);
    Ok(FeaturedJet { h, x, a, label: jet.label })
}

/// Divides each feature column by its maximum over `reference`, and returns
/// the divisors. A column whose maximum is not positive falls back to its
/// largest magnitude (or 1 when identically zero) so signs are preserved.
pub fn max_scale(jets: &mut [FeaturedJet], reference: std::ops::Range<usize>) -> [f64; NUM_FEATURES] {
    let mut max = [f64::NEG_INFINITY; NUM_FEATURES];
    let mut max_abs = [0.0f64; NUM_FEATURES];
    for jet in &jets[reference] {
        for row in &jet.h {
            for (c, &v) in row.iter().enumerate() {
                max[c] = max[c].max(v);
                max_abs[c] = max_abs[c].max(v.abs());
            }
        }
    }
    let mut scale = [1.0; NUM_FEATURES];
    for c in 0..NUM_FEATURES {
        scale[c] = if max[c] > 0.0 {
            max[c]
        } else if max_abs[c] > 0.0 {
            max_abs[c]
        } else {
            1.0
        };
    }
    for jet in jets.iter_mut() {
        for row in jet.h.iter_mut() {
            for (v, s) in row.iter_mut().zip(&scale) {
                *v /= s;
            }
        }
    }
    scale
}

fn eligible(jet: &JetRecord, cfg: &DatasetConfig) -> bool {
    jet.particles.len() >= cfg.min_particles.max(cfg.nodes)
}

/// Filters, truncates, engineers and max-scales every eligible jet, in input
/// order. Used for building caches.
pub fn featurize_all(jets: &[JetRecord], cfg: &DatasetConfig) -> Result<(Vec<FeaturedJet>, BuildStats, [f64; NUM_FEATURES]), DataError> {
    let kept: Vec<&JetRecord> = jets.iter().filter(|j| eligible(j, cfg)).collect();
    let mut featured = kept
        .par_iter()
        .map(|j| featurize_jet(j, cfg.nodes, cfg.wrap_phi))
        .collect::<Result<Vec<_>, _>>()?;
    let n = featured.len();
    let scale = max_scale(&mut featured, 0..n);
    let stats = BuildStats {
        input_jets: jets.len(),
        excluded: jets.len() - kept.len(),
        selected: n,
        quarks_selected: super::count_quarks(&featured),
    };
    Ok((featured, stats, scale))
}

fn insufficient(available: usize, cfg: &DatasetConfig) -> DataError {
    DataError::InsufficientJets {
        needed: cfg.total(),
        available,
        n_train: cfg.n_train,
        n_val: cfg.n_val,
        n_test: cfg.n_test,
    }
}

fn split_sequential(mut jets: Vec<FeaturedJet>, cfg: &DatasetConfig, scale: [f64; NUM_FEATURES]) -> DatasetSplit {
    let test = jets.split_off(cfg.n_train + cfg.n_val);
    let val = jets.split_off(cfg.n_train);
    DatasetSplit { train: jets, val, test, scale }
}

/// Filter, seeded shuffle, take the first `n_train + n_val + n_test`,
/// featurize, max-scale and split sequentially.
pub fn build_dataset(jets: &[JetRecord], cfg: &DatasetConfig) -> Result<(DatasetSplit, BuildStats), DataError> {
    let mut kept: Vec<&JetRecord> = jets.iter().filter(|j| eligible(j, cfg)).collect();
    if kept.len() < cfg.total() {
        return Err(insufficient(kept.len(), cfg));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    kept.shuffle(&mut rng);
    kept.truncate(cfg.total());

    let mut featured = kept
        .par_iter()
        .map(|j| featurize_jet(j, cfg.nodes, cfg.wrap_phi))
        .collect::<Result<Vec<_>, _>>()?;
    let reference = if cfg.scale_over_train_only { 0..cfg.n_train } else { 0..featured.len() };
    let scale = max_scale(&mut featured, reference);
    let stats = BuildStats {
        input_jets: jets.len(),
        excluded: jets.len() - jets.iter().filter(|j| eligible(j, cfg)).count(),
        selected: featured.len(),
        quarks_selected: super::count_quarks(&featured),
    };
    Ok((split_sequential(featured, cfg, scale), stats))
}

/// Shuffle and split jets that were already featurized (e.g. from a cache).
pub fn split_featured(jets: Vec<FeaturedJet>, cfg: &DatasetConfig, scale: [f64; NUM_FEATURES]) -> Result<DatasetSplit, DataError> {
    if jets.len() < cfg.total() {
        return Err(insufficient(jets.len(), cfg));
    }
    let mut order: Vec<usize> = (0..jets.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    order.shuffle(&mut rng);
    order.truncate(cfg.total());
    let mut slots: Vec<Option<FeaturedJet>> = jets.into_iter().map(Some).collect();
    let picked = order.iter().map(|&i| slots[i].take().expect("indices are unique")).collect();
    Ok(split_sequential(picked, cfg, scale))
}
