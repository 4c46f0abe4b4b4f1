//! Follow one jet's state through the layers of a quantum graph model.

use qjet::data::{build_dataset, synth_jets, DatasetConfig};
use qjet::model::{Model, ModelKind, ModelSpec};
use qjet::tensor::Graph;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = DatasetConfig { n_train: 8, n_val: 1, n_test: 1, ..DatasetConfig::default() };
    let (split, _) = build_dataset(&synth_jets(12, 5), &cfg)?;
    let jet = &split.train[0];

    for kind in [ModelKind::Qgnn, ModelKind::Eqgnn] {
        let model = Model::new(ModelSpec::default_for(kind), 0)?;
        let q = model.quantum().expect("quantum model");
        let g = Graph::new();
        let p = model.params.bind(&g);
        println!("{kind} (|Θ| = {}), jet label {}", model.param_count(), jet.label);
        for (l, psi) in q.evolve(&p, jet)?.iter().enumerate() {
            let amps = psi.values();
            let norm: f64 = amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            let probs: Vec<String> = amps.iter().map(|z| format!("{:.3}", z.norm_sqr())).collect();
            println!("  layer {l}: ‖ψ‖ = {norm:.12}  |ψ|² = [{}]", probs.join(" "));
        }
        let logits = model.predict(std::slice::from_ref(jet))?[0];
        println!("  logits {:.4?}  quark score {:.4}", logits, model.score(logits));
    }
    Ok(())
}
