//! Graph Hamiltonians for a three-node jet and the unitaries they generate.

use qjet::quantum::{cayley, coupling_diagonal, coupling_hamiltonian, coupling_hamiltonian_literal, coupling_hamiltonian_reduced, layer_unitary, transverse_hamiltonian};
use qjet::tensor::{Graph, TensorError};

fn main() -> Result<(), TensorError> {
    // ΔR between the three leading constituents
    let a = [0.0, 0.12, 0.30, 0.12, 0.0, 0.21, 0.30, 0.21, 0.0];

    let literal = coupling_hamiltonian_literal(&a, 3)?;
    let reduced = coupling_hamiltonian_reduced(&a, 3)?;
    println!("literal vs Z-Z form: max |Δ| = {:.1e}", literal.max_abs_diff(&reduced));
    println!("diagonal of H_C by basis state:");
    for (k, e) in coupling_diagonal(&a, 3)?.iter().enumerate() {
        println!("  |{k:03b}>  {e:.4}");
    }

    let g = Graph::new();
    let h_c = g.matrix_constant(&coupling_hamiltonian(&a, 3)?);
    let h_t = g.matrix_constant(&transverse_hamiltonian(3));
    for (gc, gt) in [(0.1, 0.0), (0.5, 0.5), (2.0, -1.3)] {
        let u = layer_unitary(&g.scalar(gc), &g.scalar(gt), &h_c, &h_t)?;
        println!("γ = ({gc:>4}, {gt:>4}): ‖U†U − I‖_F = {:.1e}", u.to_matrix().unitarity_defect());
    }

    let re: Vec<f64> = (0..64).map(|k| ((k * 29) % 17) as f64 / 17.0 - 0.5).collect();
    let im: Vec<f64> = (0..64).map(|k| ((k * 13) % 11) as f64 / 11.0 - 0.5).collect();
    let c = cayley(&g.complex_constant(&[8, 8], re, im)?)?;
    println!("cayley transform: ‖U†U − I‖_F = {:.1e}", c.to_matrix().unitarity_defect());
    Ok(())
}
