use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use proptest::prelude::*;
use qjet::data::{FeaturedJet, NUM_FEATURES};
use qjet::model::{Model, ModelKind, ModelSpec};
use qjet::quantum::{coupling_diagonal, coupling_hamiltonian_literal, layer_unitary, transverse_hamiltonian};
use qjet::tensor::{CMatrix, Graph};

fn jet_from(values: &[f64], label: u8) -> FeaturedJet {
    let h = (0..3).map(|i| std::array::from_fn(|c| values[i * NUM_FEATURES + c])).collect();
    let x: Vec<[f64; 2]> = (0..3).map(|i| [values[24 + 2 * i], values[25 + 2 * i]]).collect();
    let a = (0..9).map(|k| (x[k / 3][0] - x[k % 3][0]).hypot(x[k / 3][1] - x[k % 3][1])).collect();
    FeaturedJet { h, x, a, label }
}

fn jet_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 30)
}

fn real_sym_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let n = m.rows();
    let mat = DMatrix::from_fn(n, n, |i, j| {
        assert!(m.get(i, j).im.abs() < 1e-15);
        m.get(i, j).re
    });
    let mut ev: Vec<f64> = SymmetricEigen::new(mat).eigenvalues.iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

#[test]
fn transverse_spectrum_is_binomial() {
    // Σ σx has eigenvalue n − 2k with multiplicity C(n, k).
    let ev = real_sym_eigenvalues(&transverse_hamiltonian(3));
    let want = [-3.0, -1.0, -1.0, -1.0, 1.0, 1.0, 1.0, 3.0];
    for (a, b) in ev.iter().zip(want) {
        assert!((a - b).abs() < 1e-12, "{ev:?}");
    }
}

#[test]
fn coupling_spectrum_is_its_diagonal() {
    let a = [0.0, 0.4, 1.3, 0.4, 0.0, 0.7, 1.3, 0.7, 0.0];
    let ev = real_sym_eigenvalues(&coupling_hamiltonian_literal(&a, 3).unwrap());
    let mut diag = coupling_diagonal(&a, 3).unwrap();
    diag.sort_by(f64::total_cmp);
    for (x, y) in ev.iter().zip(&diag) {
        assert!((x - y).abs() < 1e-12);
    }
    // the all-equal basis states cost nothing; a lone flipped qubit pays its two edges / 2
    assert_eq!(diag[0], 0.0);
    assert!(ev.iter().any(|&e| (e - (0.4 + 1.3) / 2.0).abs() < 1e-12));
}

#[test]
fn diagonal_layer_is_elementwise_phase() {
    let a = [0.0, 0.9, 0.2, 0.9, 0.0, 0.5, 0.2, 0.5, 0.0];
    let g = Graph::new();
    let diag = coupling_diagonal(&a, 3).unwrap();
    let h_c = g.matrix_constant(&CMatrix::diag(&diag.iter().map(|&d| Complex64::new(d, 0.0)).collect::<Vec<_>>()));
    let h_t = g.matrix_constant(&transverse_hamiltonian(3));
    let u = layer_unitary(&g.scalar(1.7), &g.scalar(0.0), &h_c, &h_t).unwrap().to_matrix();
    for (k, d) in diag.iter().enumerate() {
        let want = Complex64::new(0.0, -1.7 * d).exp();
        assert!((u.get(k, k) - want).norm() < 1e-12);
    }
}

#[test]
fn default_configurations_and_counts() {
    let gnn = ModelSpec::default_for(ModelKind::Gnn);
    assert_eq!((gnn.hidden, gnn.layers), (10, 5));
    let egnn = ModelSpec::default_for(ModelKind::Egnn);
    assert_eq!((egnn.hidden, egnn.layers), (10, 4));
    for kind in [ModelKind::Qgnn, ModelKind::Eqgnn] {
        let s = ModelSpec::default_for(kind);
        assert_eq!((s.hidden, s.layers), (8, 6));
        let m = Model::new(s, 0).unwrap();
        assert_eq!(m.param_count(), s.param_count());
        assert!((5000..=5300).contains(&m.param_count()), "{kind}: {}", m.param_count());
    }
    for kind in ModelKind::ALL {
        let s = ModelSpec::default_for(kind);
        let by_params: usize = Model::new(s, 1).unwrap().params.params().iter().map(|p| p.len()).sum();
        assert_eq!(by_params, s.param_count());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn classical_logits_ignore_node_order(v in jet_values(), seed in 0u64..1000) {
        for kind in [ModelKind::Gnn, ModelKind::Egnn] {
            let model = Model::new(ModelSpec::default_for(kind), seed).unwrap();
            let jet = jet_from(&v, 0);
            let base = model.predict(std::slice::from_ref(&jet)).unwrap()[0];
            for perm in [[1, 0, 2], [2, 1, 0], [1, 2, 0]] {
                let moved = model.predict(&[jet.permuted(&perm)]).unwrap()[0];
                prop_assert!((base[0] - moved[0]).abs() <= 1e-12 && (base[1] - moved[1]).abs() <= 1e-12);
            }
        }
    }

    #[test]
    fn egnn_logits_ignore_rigid_motion(v in jet_values(), t in -PI..PI, dx in -4.0f64..4.0, dy in -4.0f64..4.0) {
        let model = Model::new(ModelSpec::default_for(ModelKind::Egnn), 3).unwrap();
        let jet = jet_from(&v, 1);
        let mut moved = jet.clone();
        for p in &mut moved.x {
            *p = [t.cos() * p[0] - t.sin() * p[1] + dx, t.sin() * p[0] + t.cos() * p[1] + dy];
        }
        let (a, b) = (model.predict(&[jet]).unwrap()[0], model.predict(&[moved]).unwrap()[0]);
        prop_assert!((a[0] - b[0]).abs() <= 1e-9 && (a[1] - b[1]).abs() <= 1e-9);
    }

    #[test]
    fn quantum_states_stay_normalized(v in jet_values(), seed in 0u64..1000) {
        for kind in [ModelKind::Qgnn, ModelKind::Eqgnn] {
            let model = Model::new(ModelSpec::default_for(kind), seed).unwrap();
            let g = Graph::new();
            let p = model.params.bind(&g);
            for psi in model.quantum().unwrap().evolve(&p, &jet_from(&v, 0)).unwrap() {
                let n2: f64 = psi.values().iter().map(|z| z.norm_sqr()).sum();
                prop_assert!((n2 - 1.0).abs() <= 1e-10);
            }
        }
    }
}

#[test]
fn quantum_scores_are_normalized_moduli() {
    let jet = jet_from(&(0..30).map(|k| ((k * 37) % 11) as f64 / 11.0 - 0.5).collect::<Vec<_>>(), 0);
    for kind in [ModelKind::Qgnn, ModelKind::Eqgnn] {
        let model = Model::new(ModelSpec::default_for(kind), 4).unwrap();
        let l = model.predict(std::slice::from_ref(&jet)).unwrap()[0];
        assert!(l[0] >= 0.0 && l[1] >= 0.0);
        assert!((model.score(l) - l[1] / (l[0] + l[1])).abs() < 1e-15);
    }
}
