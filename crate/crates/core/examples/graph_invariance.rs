//! Classical graph models ignore node order, and the equivariant one also
//! ignores rotations and translations of the (φ, y) plane.

use qjet::data::{build_dataset, synth_jets, DatasetConfig};
use qjet::model::{Model, ModelKind, ModelSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = DatasetConfig { n_train: 4, n_val: 1, n_test: 1, ..DatasetConfig::default() };
    let jets = build_dataset(&synth_jets(10, 1), &cfg)?.0.train;

    for kind in [ModelKind::Gnn, ModelKind::Egnn] {
        let model = Model::new(ModelSpec::default_for(kind), 3)?;
        let base = model.predict(&jets)?;
        let permuted: Vec<_> = jets.iter().map(|j| j.permuted(&[2, 0, 1])).collect();
        let moved: Vec<_> = jets
            .iter()
            .map(|j| {
                let mut j = j.clone();
                let (c, s) = (0.7f64.cos(), 0.7f64.sin());
                for p in &mut j.x {
                    *p = [c * p[0] - s * p[1] + 0.4, s * p[0] + c * p[1] - 1.1];
                }
                j
            })
            .collect();
        let diff = |other: &[[f64; 2]]| base.iter().zip(other).map(|(a, b)| (a[0] - b[0]).abs().max((a[1] - b[1]).abs())).fold(0.0, f64::max);
        println!("{kind}: |Θ| = {}", model.param_count());
        println!("  node permutation changes logits by {:.1e}", diff(&model.predict(&permuted)?));
        println!("  rotation + translation changes logits by {:.1e}", diff(&model.predict(&moved)?));
    }
    Ok(())
}
