//! Statevector QGNN and EQGNN.
//!
//! Qubit `i` corresponds to node `i` and to Kronecker factor `i`, so node 0
//! is the most significant bit of a basis index.

use num_complex::Complex64;
use rand::Rng;

use crate::data::{FeaturedJet, NUM_FEATURES};
use crate::nn::{small_complex, Bound, ComplexMlp, Mlp, ParamId, ParamStore};
use crate::tensor::{Activation, CMatrix, ComplexTensor, Tensor, TensorError};

const ONE: Complex64 = Complex64::new(1.0, 0.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn pauli_x() -> CMatrix {
    CMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2")
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0]).expect("2x2")
}

/// `I ⊗ … ⊗ op ⊗ … ⊗ I` with `op` at position `site` of `n`.
pub fn lift(op: &CMatrix, site: usize, n: usize) -> CMatrix {
    (0..n).fold(CMatrix::identity(1), |acc, k| {
        if k == site {
            acc.kron(op)
        } else {
            acc.kron(&CMatrix::identity(op.rows()))
        }
    })
}

fn check_edges(a: &[f64], n: usize) -> Result<(), TensorError> {
    if a.len() != n * n {
        return Err(TensorError::DataLength { len: a.len(), shape: vec![n, n] });
    }
    let scale = a.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    for i in 0..n {
        if a[i * n + i] != 0.0 {
            return Err(TensorError::Contract { op: "coupling_hamiltonian", detail: format!("a[{i}][{i}] = {} is not zero", a[i * n + i]) });
        }
        for j in (i + 1)..n {
            if (a[i * n + j] - a[j * n + i]).abs() > 1e-12 * scale || !a[i * n + j].is_finite() {
                return Err(TensorError::Contract {
                    op: "coupling_hamiltonian",
                    detail: format!("a[{i}][{j}] = {} but a[{j}][{i}] = {}", a[i * n + j], a[j * n + i]),
                });
            }
        }
    }
    Ok(())
}

/// `(1/2) Σ_{i<j} a_ij ((I − σ_i^z)/2 − (I − σ_j^z)/2)²` assembled from dense
/// Kronecker products.
pub fn coupling_hamiltonian_literal(a: &[f64], n: usize) -> Result<CMatrix, TensorError> {
    check_edges(a, n)?;
    let dim = 1 << n;
    let id = CMatrix::identity(dim);
    let proj: Vec<CMatrix> = (0..n)
        .map(|i| id.sub(&lift(&pauli_z(), i, n)).expect("same shape").scale(Complex64::new(0.5, 0.0)))
        .collect();
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in (i + 1)..n {
            let d = proj[i].sub(&proj[j])?;
            h = h.add(&d.matmul(&d)?.scale(Complex64::new(0.5 * a[i * n + j], 0.0)))?;
        }
    }
    Ok(h)
}

/// `(1/4) Σ_{i<j} a_ij (I − σ_i^z σ_j^z)` assembled from dense Kronecker
/// products.
pub fn coupling_hamiltonian_reduced(a: &[f64], n: usize) -> Result<CMatrix, TensorError> {
    check_edges(a, n)?;
    let dim = 1 << n;
    let id = CMatrix::identity(dim);
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..n {
        for j in (i + 1)..n {
            let zz = lift(&pauli_z(), i, n).matmul(&lift(&pauli_z(), j, n))?;
            h = h.add(&id.sub(&zz)?.scale(Complex64::new(0.25 * a[i * n + j], 0.0)))?;
        }
    }
    Ok(h)
}

/// Diagonal of the coupling Hamiltonian by enumerating basis states: entry
/// `k` is `(1/4) Σ_{i<j} a_ij (1 − z_i z_j)` with `z_i = ±1` read from bit
/// `n − 1 − i` of `k`.
pub fn coupling_diagonal(a: &[f64], n: usize) -> Result<Vec<f64>, TensorError> {
    check_edges(a, n)?;
    Ok((0..1usize << n)
        .map(|k| {
            let z = |i: usize| if (k >> (n - 1 - i)) & 1 == 0 { 1.0 } else { -1.0 };
            let mut e = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    e += 0.25 * a[i * n + j] * (1.0 - z(i) * z(j));
                }
            }
            e
        })
        .collect())
}

pub fn coupling_hamiltonian(a: &[f64], n: usize) -> Result<CMatrix, TensorError> {
    let d = coupling_diagonal(a, n)?;
    Ok(CMatrix::diag(&d.iter().map(|&v| Complex64::new(v, 0.0)).collect::<Vec<_>>()))
}

/// `Σ_i σ_i^x`.
pub fn transverse_hamiltonian(n: usize) -> CMatrix {
    let dim = 1 << n;
    (0..n).fold(CMatrix::zeros(dim, dim), |acc, i| acc.add(&lift(&pauli_x(), i, n)).expect("same shape"))
}

/// `ψ = ⊗_i v_i` for single-qubit amplitude pairs, in factor order.
pub fn product_state(factors: &[[Complex64; 2]]) -> Vec<Complex64> {
    factors.iter().fold(vec![ONE], |acc, v| acc.iter().flat_map(|&x| [x * v[0], x * v[1]]).collect())
}

/// Per-node `(Re a0, Im a0, Re a1, Im a1)` rows (`n x 4`) to the normalized
/// product state, a `2^n x 1` column.
pub fn encode_state(amplitudes: &Tensor) -> Result<ComplexTensor, TensorError> {
    let shape = amplitudes.shape();
    if shape.len() != 2 || shape[1] != 4 {
        return Err(TensorError::ShapeMismatch { op: "encode_state", lhs: shape, rhs: vec![0, 4] });
    }
    let mut psi: Option<ComplexTensor> = None;
    for i in 0..shape[0] {
        let row = amplitudes.gather_rows(&[i])?.reshape(&[4, 1])?;
        let qubit = ComplexTensor::from_parts(&row.gather_rows(&[0, 2])?, &row.gather_rows(&[1, 3])?)?;
        psi = Some(match psi {
            None => qubit,
            Some(acc) => acc.kron(&qubit)?,
        });
    }
    let psi = psi.ok_or(TensorError::Contract { op: "encode_state", detail: "no nodes".into() })?;
    let norm2 = psi.abs2().sum();
    let n2 = norm2.item();
    if n2.is_nan() || n2 <= 0.0 || n2.is_infinite() {
        return Err(TensorError::Contract { op: "encode_state", detail: format!("degenerate encoding: product-state norm² is {n2}") });
    }
    psi.scale_by(&norm2.powf(-0.5))
}

/// `exp(−i (γ1 h_c + γ2 h_t))`.
pub fn layer_unitary(gamma_c: &Tensor, gamma_t: &Tensor, h_c: &ComplexTensor, h_t: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
    let h = h_c.scale_by(gamma_c)?.add(&h_t.scale_by(gamma_t)?)?;
    h.expm_minus_i(&gamma_c.graph().scalar(1.0))
}

/// `(θ' − iI)(θ' + iI)⁻¹` with `θ' = θ + θ†`.
pub fn cayley(theta: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
    let shape = theta.shape();
    if shape.len() != 2 || shape[0] != shape[1] {
        return Err(TensorError::Rank { op: "cayley", expected: 2, shape });
    }
    let herm = theta.add(&theta.adjoint()?)?;
    let i_eye = theta.graph().identity(shape[0]).scale(Complex64::new(0.0, 1.0));
    herm.sub(&i_eye)?.matmul(&herm.add(&i_eye)?.inverse()?)
}

/// Mean of the amplitudes of a `2^n x 1` state, as a `1 x 1` tensor.
pub fn eqgnn_pool(psi: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
    psi.mean().reshape(&[1, 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantumConfig {
    /// Qubits, one per graph node.
    pub qubits: usize,
    pub layers: usize,
    pub encoder_hidden: usize,
    pub decoder_hidden: usize,
    /// Pool the amplitudes before the head (EQGNN) instead of feeding all of them (QGNN).
    pub equivariant: bool,
    /// Use `|z|²` rather than `|z|` as logits.
    pub squared_modulus: bool,
    pub activation: Activation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumGnn {
    pub config: QuantumConfig,
    pub encoder: Mlp,
    /// `P x 2` Hamiltonian coefficients.
    pub gamma: ParamId,
    pub theta: Vec<ParamId>,
    pub decoder: ComplexMlp,
    transverse: CMatrix,
}

/// θ entries start uniform in `±THETA_INIT` (real and imaginary parts).
pub const THETA_INIT: f64 = 0.01;
/// γ starts uniform in `[0, GAMMA_INIT]`.
pub const GAMMA_INIT: f64 = 0.1;

impl QuantumGnn {
    pub fn new(config: QuantumConfig, store: &mut ParamStore, rng: &mut impl Rng) -> Self {
        let dim = 1 << config.qubits;
        let encoder = Mlp::new(store, rng, "encoder", [NUM_FEATURES, config.encoder_hidden, 4], config.activation);
        let gamma_init = (0..2 * config.layers).map(|_| rng.random_range(0.0..=GAMMA_INIT)).collect();
        let gamma = store.add_real("gamma", &[config.layers, 2], gamma_init);
        let theta = (0..config.layers)
            .map(|l| {
                let (re, im) = small_complex(rng, dim * dim, THETA_INIT);
                store.add_complex(format!("theta{l}"), &[dim, dim], re, im)
            })
            .collect();
        let head_in = if config.equivariant { 1 } else { dim };
        let decoder = ComplexMlp::new(store, rng, "decoder", [head_in, config.decoder_hidden, 2], config.activation);
        Self { config, encoder, gamma, theta, decoder, transverse: transverse_hamiltonian(config.qubits) }
    }

    pub fn param_count(config: &QuantumConfig) -> usize {
        let dim = 1 << config.qubits;
        let head_in = if config.equivariant { 1 } else { dim };
        Mlp::param_count([NUM_FEATURES, config.encoder_hidden, 4])
            + 2 * config.layers
            + config.layers * 2 * dim * dim
            + ComplexMlp::param_count([head_in, config.decoder_hidden, 2])
    }

    fn check_jet(&self, jet: &FeaturedJet) -> Result<(), TensorError> {
        if jet.n_nodes() != self.config.qubits {
            return Err(TensorError::ShapeMismatch { op: "quantum_forward", lhs: vec![jet.n_nodes()], rhs: vec![self.config.qubits] });
        }
        Ok(())
    }

    /// `ψ^0, ψ^1, …, ψ^P` for one jet.
    pub fn evolve(&self, p: &Bound, jet: &FeaturedJet) -> Result<Vec<ComplexTensor>, TensorError> {
        self.check_jet(jet)?;
        let g = p.real(self.gamma).graph().clone();
        let h = g.constant(&[jet.n_nodes(), NUM_FEATURES], jet.h_flat())?;
        let mut psi = encode_state(&self.encoder.forward(p, &h)?)?;
        let mut states = vec![psi.clone()];
        if self.config.layers == 0 {
            return Ok(states);
        }
        let h_c = g.matrix_constant(&coupling_hamiltonian(&jet.a, jet.n_nodes())?);
        let h_t = g.matrix_constant(&self.transverse);
        let gamma = p.real(self.gamma);
        for (l, &theta) in self.theta.iter().enumerate() {
            let u = layer_unitary(&gamma.element(2 * l)?, &gamma.element(2 * l + 1)?, &h_c, &h_t)?;
            let u_theta = cayley(p.complex(theta))?;
            psi = u_theta.matmul(&u.matmul(&u_theta.adjoint()?.matmul(&psi)?)?)?;
            states.push(psi.clone());
        }
        Ok(states)
    }

    /// Head applied to a final state; `1 x 2` logits.
    pub fn head(&self, p: &Bound, psi: &ComplexTensor) -> Result<Tensor, TensorError> {
        let input = if self.config.equivariant { eqgnn_pool(psi)? } else { psi.transpose()? };
        let z = self.decoder.forward(p, &input)?;
        Ok(if self.config.squared_modulus { z.abs2() } else { z.abs() })
    }

    /// `B x 2` logits.
    pub fn logits(&self, p: &Bound, jets: &[&FeaturedJet]) -> Result<Tensor, TensorError> {
        let rows = jets
            .iter()
            .map(|jet| {
                let states = self.evolve(p, jet)?;
                self.head(p, states.last().expect("at least the initial state"))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Tensor::concat(&rows, 0)
    }
}

/// Sum of the amplitudes of a state.
pub fn amplitude_sum(psi: &[Complex64]) -> Complex64 {
    psi.iter().fold(ZERO, |acc, &z| acc + z)
}
