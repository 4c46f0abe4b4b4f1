//! Message-passing GNN and its SE(2)-equivariant variant.
//!
//! A batch of jets is flattened into one disjoint union of complete graphs:
//! node rows are stacked, and every ordered pair `(i, j)` with `i != j`
//! inside a jet becomes an edge. Messages are summed into the source node.

use rand::Rng;

use crate::data::{FeaturedJet, NUM_FEATURES};
use crate::nn::{Bound, Mlp, ParamStore};
use crate::tensor::{Activation, Graph, Tensor, TensorError};

/// Constants describing a batch of jets inside one graph.
#[derive(Debug, Clone)]
pub struct GraphBatch {
    /// Stacked node features, `N x k`.
    pub h: Tensor,
    /// Stacked `(φ, y)` coordinates, `N x 2`.
    pub x: Tensor,
    /// Edge attribute `a_ij` per ordered edge, `E x 1`.
    pub edge_attr: Tensor,
    pub src: Vec<usize>,
    pub dst: Vec<usize>,
    /// Jet index of each node row.
    pub jet_of_node: Vec<usize>,
    pub n_jets: usize,
    /// `1 / n_jet` per jet, `n_jets x 1`.
    pub inv_nodes: Tensor,
    /// Coordinate-update weight `C = 1 / ln(2 n_jet)` per node, `N x 1`.
    pub coord_weight: Tensor,
}

/// Equivariant coordinate-update weight for a graph with `n` nodes.
pub fn coord_weight(n: usize) -> f64 {
    1.0 / (2.0 * n as f64).ln()
}

impl GraphBatch {
    pub fn new(graph: &Graph, jets: &[&FeaturedJet]) -> Result<Self, TensorError> {
        let total: usize = jets.iter().map(|j| j.n_nodes()).sum();
        let mut h = Vec::with_capacity(total * NUM_FEATURES);
        let mut x = Vec::with_capacity(total * 2);
        let (mut src, mut dst, mut attr) = (Vec::new(), Vec::new(), Vec::new());
        let mut jet_of_node = Vec::with_capacity(total);
        let mut inv_nodes = Vec::with_capacity(jets.len());
        let mut coord = Vec::with_capacity(total);
        let mut offset = 0;
        for (b, jet) in jets.iter().enumerate() {
            let n = jet.n_nodes();
            if n == 0 {
                return Err(TensorError::Contract { op: "graph_batch", detail: format!("jet {b} has no nodes") });
            }
            h.extend(jet.h_flat());
            x.extend(jet.x_flat());
            for i in 0..n {
                for j in 0..n {
                    if i != j {
                        src.push(offset + i);
                        dst.push(offset + j);
                        attr.push(jet.edge(i, j));
                    }
                }
            }
            jet_of_node.extend(std::iter::repeat_n(b, n));
            coord.extend(std::iter::repeat_n(coord_weight(n), n));
            inv_nodes.push(1.0 / n as f64);
            offset += n;
        }
        let edges = attr.len();
        Ok(Self {
            h: graph.constant(&[total, NUM_FEATURES], h)?,
            x: graph.constant(&[total, 2], x)?,
            edge_attr: graph.constant(&[edges, 1], attr)?,
            src,
            dst,
            jet_of_node,
            n_jets: jets.len(),
            inv_nodes: graph.constant(&[jets.len(), 1], inv_nodes)?,
            coord_weight: graph.constant(&[total, 1], coord)?,
        })
    }

    pub fn n_nodes(&self) -> usize {
        self.jet_of_node.len()
    }
}

/// One message-passing layer. `coord` is present for the equivariant variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GraphLayer {
    /// `φ_e(h_i, h_j, a_ij[, |x_i − x_j|])`.
    pub edge: Mlp,
    /// `φ_h(h_i, m_i)`.
    pub node: Mlp,
    /// `φ_x(m_ij)`, a scalar per edge.
    pub coord: Option<Mlp>,
}

impl GraphLayer {
    pub fn new(store: &mut ParamStore, rng: &mut impl Rng, name: &str, fan_in: usize, hidden: usize, equivariant: bool, act: Activation) -> Self {
        let edge_in = 2 * fan_in + 1 + usize::from(equivariant);
        let edge = Mlp::new(store, rng, &format!("{name}.edge"), [edge_in, hidden, hidden], act);
        let node = Mlp::new(store, rng, &format!("{name}.node"), [fan_in + hidden, hidden, hidden], act);
        let coord = equivariant.then(|| Mlp::new(store, rng, &format!("{name}.coord"), [hidden, hidden, 1], act));
        Self { edge, node, coord }
    }

    pub fn param_count(fan_in: usize, hidden: usize, equivariant: bool) -> usize {
        let edge_in = 2 * fan_in + 1 + usize::from(equivariant);
        Mlp::param_count([edge_in, hidden, hidden])
            + Mlp::param_count([fan_in + hidden, hidden, hidden])
            + if equivariant { Mlp::param_count([hidden, hidden, 1]) } else { 0 }
    }

    fn check_width(&self, h: &Tensor) -> Result<(), TensorError> {
        let fan_in = self.node.first.fan_in - self.node.first.fan_out;
        let shape = h.shape();
        if shape.len() != 2 || shape[1] != fan_in {
            return Err(TensorError::ShapeMismatch { op: "graph_layer", lhs: shape, rhs: vec![fan_in] });
        }
        Ok(())
    }
}

fn aggregate_and_update(p: &Bound, layer: &GraphLayer, h: &Tensor, m: &Tensor, batch: &GraphBatch) -> Result<Tensor, TensorError> {
    let m_i = m.scatter_add_rows(&batch.src, batch.n_nodes())?;
    layer.node.forward(p, &Tensor::concat(&[h.clone(), m_i], 1)?)
}

/// `m_ij = φ_e(h_i, h_j, a_ij)`, `m_i = Σ_{j≠i} m_ij`, `h_i' = φ_h(h_i, m_i)`.
pub fn gnn_layer(p: &Bound, layer: &GraphLayer, h: &Tensor, batch: &GraphBatch) -> Result<Tensor, TensorError> {
    layer.check_width(h)?;
    let e_in = Tensor::concat(&[h.gather_rows(&batch.src)?, h.gather_rows(&batch.dst)?, batch.edge_attr.clone()], 1)?;
    let m = layer.edge.forward(p, &e_in)?;
    aggregate_and_update(p, layer, h, &m, batch)
}

/// As [`gnn_layer`] with `|x_i − x_j|` appended to the edge input, plus
/// `x_i' = x_i + C Σ_{j≠i} (x_i − x_j) φ_x(m_ij)`.
pub fn egnn_layer(p: &Bound, layer: &GraphLayer, h: &Tensor, x: &Tensor, batch: &GraphBatch) -> Result<(Tensor, Tensor), TensorError> {
    layer.check_width(h)?;
    let coord = layer.coord.as_ref().ok_or(TensorError::Contract { op: "egnn_layer", detail: "layer has no coordinate network".into() })?;
    let diff = x.gather_rows(&batch.src)?.sub(&x.gather_rows(&batch.dst)?)?;
    let e_in = Tensor::concat(
        &[h.gather_rows(&batch.src)?, h.gather_rows(&batch.dst)?, batch.edge_attr.clone(), diff.row_norm()?],
        1,
    )?;
    let m = layer.edge.forward(p, &e_in)?;
    let shift = diff.scale_rows(&coord.forward(p, &m)?)?.scatter_add_rows(&batch.src, batch.n_nodes())?;
    let x_new = x.add(&shift.scale_rows(&batch.coord_weight)?)?;
    Ok((aggregate_and_update(p, layer, h, &m, batch)?, x_new))
}

/// Per-jet column means of the node rows.
pub fn mean_pool(h: &Tensor, batch: &GraphBatch) -> Result<Tensor, TensorError> {
    h.scatter_add_rows(&batch.jet_of_node, batch.n_jets)?.scale_rows(&batch.inv_nodes)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ClassicalConfig {
    pub hidden: usize,
    pub layers: usize,
    pub equivariant: bool,
    pub activation: Activation,
}

/// Stacked graph layers, mean pooling of the final node features and a
/// two-logit head.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalGnn {
    pub config: ClassicalConfig,
    pub layers: Vec<GraphLayer>,
    pub head: Mlp,
}

impl ClassicalGnn {
    pub fn new(config: ClassicalConfig, store: &mut ParamStore, rng: &mut impl Rng) -> Self {
        let layers = (0..config.layers)
            .map(|l| {
                let fan_in = if l == 0 { NUM_FEATURES } else { config.hidden };
                GraphLayer::new(store, rng, &format!("layer{l}"), fan_in, config.hidden, config.equivariant, config.activation)
            })
            .collect();
        let head_in = if config.layers == 0 { NUM_FEATURES } else { config.hidden };
        let head = Mlp::new(store, rng, "head", [head_in, config.hidden, 2], config.activation);
        Self { config, layers, head }
    }

    pub fn param_count(config: &ClassicalConfig) -> usize {
        let layers: usize = (0..config.layers)
            .map(|l| GraphLayer::param_count(if l == 0 { NUM_FEATURES } else { config.hidden }, config.hidden, config.equivariant))
            .sum();
        let head_in = if config.layers == 0 { NUM_FEATURES } else { config.hidden };
        layers + Mlp::param_count([head_in, config.hidden, 2])
    }

    /// Final node features and coordinates.
    pub fn embed(&self, p: &Bound, batch: &GraphBatch) -> Result<(Tensor, Tensor), TensorError> {
        let (mut h, mut x) = (batch.h.clone(), batch.x.clone());
        for layer in &self.layers {
            if self.config.equivariant {
                (h, x) = egnn_layer(p, layer, &h, &x, batch)?;
            } else {
                h = gnn_layer(p, layer, &h, batch)?;
            }
        }
        Ok((h, x))
    }

    /// `B x 2` logits.
    pub fn logits(&self, p: &Bound, batch: &GraphBatch) -> Result<Tensor, TensorError> {
        let (h, _) = self.embed(p, batch)?;
        classify_head(p, &self.head, &mean_pool(&h, batch)?)
    }
}

/// Affine, nonlinearity, affine to two logits per row.
pub fn classify_head(p: &Bound, head: &Mlp, pooled: &Tensor) -> Result<Tensor, TensorError> {
    head.forward(p, pooled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn jet(h: Vec<[f64; NUM_FEATURES]>, x: Vec<[f64; 2]>, a: Vec<f64>) -> FeaturedJet {
        FeaturedJet { h, x, a, label: 0 }
    }

    #[test]
    fn coordinate_weight_for_three_nodes() {
        assert!((coord_weight(3) - 1.0 / 6f64.ln()).abs() < 1e-15);
        assert!((coord_weight(3) - 0.5581).abs() < 5e-5);
    }

    #[test]
    fn mean_pool_cases() {
        let g = Graph::new();
        let j = jet(vec![[1.0; NUM_FEATURES], [5.0; NUM_FEATURES]], vec![[0.0; 2]; 2], vec![0.0; 4]);
        let batch = GraphBatch::new(&g, &[&j]).unwrap();
        let h = g.constant(&[2, 2], vec![1.0, 3.0, 5.0, 7.0]).unwrap();
        assert_eq!(mean_pool(&h, &batch).unwrap().values(), vec![3.0, 5.0]);

        let single = jet(vec![[2.0; NUM_FEATURES]], vec![[0.0; 2]], vec![0.0]);
        let batch = GraphBatch::new(&g, &[&single]).unwrap();
        let h = g.constant(&[1, 3], vec![4.0, -1.0, 2.0]).unwrap();
        assert_eq!(mean_pool(&h, &batch).unwrap().values(), vec![4.0, -1.0, 2.0]);
    }

    /// Every weight 1x1 with a hand-chosen value and identity activation.
    #[test]
    fn two_node_forward_by_hand() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let layer = GraphLayer::new(&mut store, &mut rng, "l", 1, 1, false, Activation::Identity);
        // edge: [w_hi, w_hj, w_a] then 1x1; node: [w_h, w_m] then 1x1
        store.get_mut(layer.edge.first.weight).re = vec![1.0, 2.0, 3.0];
        store.get_mut(layer.edge.first.bias).re = vec![0.5];
        store.get_mut(layer.edge.second.weight).re = vec![2.0];
        store.get_mut(layer.edge.second.bias).re = vec![0.0];
        store.get_mut(layer.node.first.weight).re = vec![1.0, -1.0];
        store.get_mut(layer.node.first.bias).re = vec![0.0];
        store.get_mut(layer.node.second.weight).re = vec![1.0];
        store.get_mut(layer.node.second.bias).re = vec![1.0];

        let g = Graph::new();
        let p = store.bind(&g);
        let h = g.constant(&[2, 1], vec![1.0, 2.0]).unwrap();
        let batch = GraphBatch {
            h: h.clone(),
            x: g.constant(&[2, 2], vec![0.0; 4]).unwrap(),
            edge_attr: g.constant(&[2, 1], vec![0.1, 0.1]).unwrap(),
            src: vec![0, 1],
            dst: vec![1, 0],
            jet_of_node: vec![0, 0],
            n_jets: 1,
            inv_nodes: g.constant(&[1, 1], vec![0.5]).unwrap(),
            coord_weight: g.constant(&[2, 1], vec![coord_weight(2); 2]).unwrap(),
        };
        // m_01 = 2(1 + 4 + 0.3 + 0.5) = 11.6, m_10 = 2(2 + 2 + 0.3 + 0.5) = 9.6
        // h0' = 1 - 11.6 + 1 = -9.6, h1' = 2 - 9.6 + 1 = -6.6
        let out = gnn_layer(&p, &layer, &h, &batch).unwrap().values();
        assert!((out[0] + 9.6).abs() < 1e-12 && (out[1] + 6.6).abs() < 1e-12, "{out:?}");
    }

    #[test]
    fn identical_nodes_give_identical_rows_and_static_coordinates() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let layer = GraphLayer::new(&mut store, &mut rng, "l", NUM_FEATURES, 4, true, Activation::Softplus);
        let j = jet(vec![[0.3; NUM_FEATURES]; 3], vec![[0.2, -0.4]; 3], vec![0.0, 0.7, 0.7, 0.7, 0.0, 0.7, 0.7, 0.7, 0.0]);
        let g = Graph::new();
        let p = store.bind(&g);
        let batch = GraphBatch::new(&g, &[&j]).unwrap();
        let (h, x) = egnn_layer(&p, &layer, &batch.h, &batch.x, &batch).unwrap();
        let h = h.values();
        for r in 1..3 {
            assert_eq!(&h[r * 4..r * 4 + 4], &h[..4]);
        }
        assert_eq!(x.values(), batch.x.values());
    }

    #[test]
    fn parameter_counter_matches_store() {
        for equivariant in [false, true] {
            for (hidden, layers) in [(10, 5), (3, 1), (4, 0)] {
                let cfg = ClassicalConfig { hidden, layers, equivariant, activation: Activation::Softplus };
                let mut store = ParamStore::new();
                let mut rng = ChaCha8Rng::seed_from_u64(4);
                ClassicalGnn::new(cfg, &mut store, &mut rng);
                assert_eq!(store.count(), ClassicalGnn::param_count(&cfg));
            }
        }
    }

    #[test]
    fn width_mismatch_is_rejected() {
        let mut store = ParamStore::new();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let layer = GraphLayer::new(&mut store, &mut rng, "l", 4, 4, false, Activation::Softplus);
        let j = jet(vec![[0.3; NUM_FEATURES]; 2], vec![[0.0; 2]; 2], vec![0.0; 4]);
        let g = Graph::new();
        let p = store.bind(&g);
        let batch = GraphBatch::new(&g, &[&j]).unwrap();
        assert!(matches!(gnn_layer(&p, &layer, &batch.h, &batch), Err(TensorError::ShapeMismatch { .. })));
    }
}
