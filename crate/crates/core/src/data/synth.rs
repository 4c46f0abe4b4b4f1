//! Toy quark/gluon jet generator.
//!
//! Quark-like jets (label 1) are narrow with a hard leading constituent;
//! gluon-like jets (label 0) have more constituents, a wider angular spread
//! and a softer pT spectrum. Constituent angles are drawn independently of
//! their pT, so the mean pairwise ΔR of any fixed subset of constituents is
//! `√π · spread` for each class.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::physics::wrap_angle;
use super::{JetRecord, RawParticle};

#[derive(Debug, Clone, PartialEq)]
pub struct SynthConfig {
    /// Standard deviation of constituent (φ, y) offsets from the jet axis.
    pub quark_spread: f64,
    pub gluon_spread: f64,
    /// Exponent applied to uniform draws before normalizing into pT
    /// fractions; larger values concentrate pT in fewer constituents.
    pub quark_hardness: f64,
    pub gluon_hardness: f64,
    /// Inclusive constituent-count ranges.
    pub quark_multiplicity: (usize, usize),
    pub gluon_multiplicity: (usize, usize),
    pub jet_pt: (f64, f64),
    pub max_abs_rapidity: f64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        Self {
            quark_spread: 0.05,
            gluon_spread: 0.15,
            quark_hardness: 4.0,
            gluon_hardness: 1.5,
            quark_multiplicity: (10, 30),
            gluon_multiplicity: (15, 45),
            jet_pt: (500.0, 550.0),
            max_abs_rapidity: 1.7,
        }
    }
}

impl SynthConfig {
    /// Expected gap between gluon and quark mean pairwise ΔR.
    pub fn expected_delta_r_margin(&self) -> f64 {
        std::f64::consts::PI.sqrt() * (self.gluon_spread - self.quark_spread)
    }
}

/// Species drawn for constituents, with relative weights.
const SPECIES: &[(i32, f64)] = &[(211, 0.60), (22, 0.25), (321, 0.07), (130, 0.03), (2212, 0.03), (2112, 0.02)];
const CHARGED: &[i32] = &[211, 321, 2212];

pub fn synth_jets(n: usize, seed: u64) -> Vec<JetRecord> {
    synth_jets_with(n, seed, &SynthConfig::default())
}

pub fn synth_jets_with(n: usize, seed: u64, cfg: &SynthConfig) -> Vec<JetRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| one_jet(&mut rng, cfg)).collect()
}

fn draw_species(rng: &mut ChaCha8Rng) -> i32 {
    let total: f64 = SPECIES.iter().map(|s| s.1).sum();
    let mut u = rng.random::<f64>() * total;
    let mut id = SPECIES[0].0;
    for &(pid, w) in SPECIES {
        id = pid;
        if u < w {
            break;
        }
        u -= w;
    }
    if CHARGED.contains(&id) && rng.random_bool(0.5) {
        -id
    } else {
        id
    }
}

fn one_jet(rng: &mut ChaCha8Rng, cfg: &SynthConfig) -> JetRecord {
    let quark = rng.random_bool(0.5);
    let (spread, hardness, (lo, hi)) = if quark {
        (cfg.quark_spread, cfg.quark_hardness, cfg.quark_multiplicity)
    } else {
        (cfg.gluon_spread, cfg.gluon_hardness, cfg.gluon_multiplicity)
    };
    let multiplicity = rng.random_range(lo..=hi);
    let jet_pt = rng.random_range(cfg.jet_pt.0..cfg.jet_pt.1);
    let axis_y = rng.random_range(-cfg.max_abs_rapidity..cfg.max_abs_rapidity);
    // keep the axis away from ±π so constituents rarely straddle the seam
    let axis_phi = rng.random_range(-std::f64::consts::PI + 1.0..std::f64::consts::PI - 1.0);
    let offset = Normal::new(0.0, spread).expect("positive spread");

    let weights: Vec<f64> = (0..multiplicity).map(|_| rng.random::<f64>().powf(hardness) + 1e-9).collect();
    let total: f64 = weights.iter().sum();
    let particles = weights
        .iter()
        .map(|w| RawParticle {
            pt: jet_pt * w / total,
            y: axis_y + offset.sample(rng),
            phi: wrap_angle(axis_phi + offset.sample(rng)),
            pdg_id: draw_species(rng),
        })
        .collect();
    JetRecord { label: u8::from(quark), particles }
}
