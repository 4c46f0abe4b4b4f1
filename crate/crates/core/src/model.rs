//! The four tagger architectures behind one interface.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classical::{ClassicalConfig, ClassicalGnn, GraphBatch};
use crate::data::FeaturedJet;
use crate::nn::{Bound, ParamStore};
use crate::quantum::{QuantumConfig, QuantumGnn};
use crate::tensor::{Activation, Graph, Tensor, TensorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Gnn,
    Egnn,
    Qgnn,
    Eqgnn,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Gnn, ModelKind::Egnn, ModelKind::Qgnn, ModelKind::Eqgnn];

    pub fn is_quantum(self) -> bool {
        matches!(self, ModelKind::Qgnn | ModelKind::Eqgnn)
    }

    pub fn is_equivariant(self) -> bool {
        matches!(self, ModelKind::Egnn | ModelKind::Eqgnn)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ModelKind::Gnn => "gnn",
            ModelKind::Egnn => "egnn",
            ModelKind::Qgnn => "qgnn",
            ModelKind::Eqgnn => "eqgnn",
        }
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ModelKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown model '{s}' (expected gnn, egnn, qgnn or eqgnn)"))
    }
}

/// Architecture hyperparameters. Classical models use `hidden` and
/// `layers`; quantum models use `layers`, `nodes` (= qubits) and the
/// encoder/decoder widths.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub hidden: usize,
    pub layers: usize,
    pub nodes: usize,
    pub encoder_hidden: usize,
    pub decoder_hidden: usize,
    #[serde(with = "activation_serde")]
    pub activation: Activation,
    pub squared_modulus: bool,
}

mod activation_serde {
    use super::Activation;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(a: &Activation, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&a.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Activation, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl ModelSpec {
    /// Reference defaults: GNN 10/5, EGNN 10/4, QGNN 8/6, EQGNN 8/6. Quantum
    /// encoder and decoder widths bring |Θ| near 5100.
    pub fn default_for(kind: ModelKind) -> Self {
        let (hidden, layers, enc, dec) = match kind {
            ModelKind::Gnn => (10, 5, 0, 0),
            ModelKind::Egnn => (10, 4, 0, 0),
            ModelKind::Qgnn => (8, 6, 125, 125),
            ModelKind::Eqgnn => (8, 6, 207, 207),
        };
        Self {
            kind,
            hidden,
            layers,
            nodes: 3,
            encoder_hidden: enc,
            decoder_hidden: dec,
            activation: Activation::Softplus,
            squared_modulus: false,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.nodes == 0 {
            return Err("nodes must be at least 1".into());
        }
        if self.kind.is_quantum() {
            if self.nodes > 10 {
                return Err(format!("{} qubits is beyond the dense simulator (max 10)", self.nodes));
            }
            let dim = 1usize << self.nodes;
            if self.hidden != dim {
                return Err(format!("{} requires hidden = 2^nodes = {dim}, got {}", self.kind, self.hidden));
            }
            if self.encoder_hidden == 0 || self.decoder_hidden == 0 {
                return Err("encoder_hidden and decoder_hidden must be positive".into());
            }
        } else if self.hidden == 0 {
            return Err("hidden must be positive".into());
        }
        Ok(())
    }

    fn classical(&self) -> ClassicalConfig {
        ClassicalConfig { hidden: self.hidden, layers: self.layers, equivariant: self.kind.is_equivariant(), activation: self.activation }
    }

    fn quantum(&self) -> QuantumConfig {
        QuantumConfig {
            qubits: self.nodes,
            layers: self.layers,
            encoder_hidden: self.encoder_hidden,
            decoder_hidden: self.decoder_hidden,
            equivariant: self.kind.is_equivariant(),
            squared_modulus: self.squared_modulus,
            activation: self.activation,
        }
    }

    /// Exact |Θ| without building the model.
    pub fn param_count(&self) -> usize {
        if self.kind.is_quantum() {
            QuantumGnn::param_count(&self.quantum())
        } else {
            ClassicalGnn::param_count(&self.classical())
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchOutput {
    pub loss: f64,
    pub grad: Vec<f64>,
    pub logits: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
enum Arch {
    Classical(ClassicalGnn),
    Quantum(QuantumGnn),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Model {
    pub spec: ModelSpec,
    pub params: ParamStore,
    arch: Arch,
}

/// Jets per tape for classical models. Fixed so gradient reduction order
/// does not depend on the thread count.
const CLASSICAL_CHUNK: usize = 16;

impl Model {
    pub fn new(spec: ModelSpec, seed: u64) -> Result<Self, String> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut params = ParamStore::new();
        let arch = if spec.kind.is_quantum() {
            Arch::Quantum(QuantumGnn::new(spec.quantum(), &mut params, &mut rng))
        } else {
            Arch::Classical(ClassicalGnn::new(spec.classical(), &mut params, &mut rng))
        };
        Ok(Self { spec, params, arch })
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn param_count(&self) -> usize {
        self.params.count()
    }

    pub fn classical(&self) -> Option<&ClassicalGnn> {
        match &self.arch {
            Arch::Classical(m) => Some(m),
            Arch::Quantum(_) => None,
        }
    }

    pub fn quantum(&self) -> Option<&QuantumGnn> {
        match &self.arch {
            Arch::Quantum(m) => Some(m),
            Arch::Classical(_) => None,
        }
    }

    fn chunk(&self) -> usize {
        if self.spec.kind.is_quantum() {
            1
        } else {
            CLASSICAL_CHUNK
        }
    }

    /// `B x 2` logits for `jets`, built on `p`'s graph.
    pub fn logits(&self, p: &Bound, graph: &Graph, jets: &[&FeaturedJet]) -> Result<Tensor, TensorError> {
        match &self.arch {
            Arch::Classical(m) => m.logits(p, &GraphBatch::new(graph, jets)?),
            Arch::Quantum(m) => m.logits(p, jets),
        }
    }

    /// Mean cross-entropy over `jets`, its gradient (flattened in parameter
    /// declaration order) and the logits.
    pub fn loss_and_grad(&self, jets: &[&FeaturedJet]) -> Result<BatchOutput, TensorError> {
        if jets.is_empty() {
            return Err(TensorError::Contract { op: "loss_and_grad", detail: "empty batch".into() });
        }
        let total = jets.len() as f64;
        let parts = jets
            .par_chunks(self.chunk())
            .map(|chunk| {
                let g = Graph::new();
                let p = self.params.bind(&g);
                let labels: Vec<usize> = chunk.iter().map(|j| j.label as usize).collect();
                let logits = self.logits(&p, &g, chunk)?;
                let loss = logits.softmax_cross_entropy(&labels)?.scale(chunk.len() as f64 / total);
                loss.backward()?;
                Ok((loss.item(), p.grads(), logits.values()))
            })
            .collect::<Result<Vec<_>, TensorError>>()?;
        let mut out = BatchOutput { loss: 0.0, grad: vec![0.0; self.params.count()], logits: Vec::with_capacity(jets.len()) };
        for (l, g, v) in parts {
            out.loss += l;
            for (acc, x) in out.grad.iter_mut().zip(g) {
                *acc += x;
            }
            out.logits.extend(v.chunks_exact(2).map(|r| [r[0], r[1]]));
        }
        Ok(out)
    }

    /// Logits per jet without building gradients.
    pub fn predict(&self, jets: &[FeaturedJet]) -> Result<Vec<[f64; 2]>, TensorError> {
        let chunk = if self.spec.kind.is_quantum() { 1 } else { 64 };
        let parts = jets
            .par_chunks(chunk)
            .map(|chunk| {
                let g = Graph::new();
                let p = self.params.bind(&g);
                let refs: Vec<&FeaturedJet> = chunk.iter().collect();
                let v = self.logits(&p, &g, &refs)?.values();
                Ok(v.chunks_exact(2).map(|r| [r[0], r[1]]).collect::<Vec<_>>())
            })
            .collect::<Result<Vec<_>, TensorError>>()?;
        Ok(parts.into_iter().flatten().collect())
    }

    /// Class-1 score from a pair of logits.
    pub fn score(&self, logits: [f64; 2]) -> f64 {
        score(self.spec.kind, logits)
    }
}

/// Softmax probability of class 1 for classical models; for quantum models
/// the normalized modulus logit `l1 / (l0 + l1)` (0.5 when both vanish).
pub fn score(kind: ModelKind, logits: [f64; 2]) -> f64 {
    if kind.is_quantum() {
        let s = logits[0] + logits[1];
        if s > 0.0 {
            logits[1] / s
        } else {
            0.5
        }
    } else {
        1.0 / (1.0 + (logits[0] - logits[1]).exp())
    }
}

/// Mean cross-entropy of logit pairs against labels.
pub fn cross_entropy(logits: &[[f64; 2]], labels: &[u8]) -> f64 {
    let total: f64 = logits
        .iter()
        .zip(labels)
        .map(|(l, &y)| {
            let m = l[0].max(l[1]);
            let lse = m + ((l[0] - m).exp() + (l[1] - m).exp()).ln();
            lse - l[y as usize]
        })
        .sum();
    total / logits.len().max(1) as f64
}
