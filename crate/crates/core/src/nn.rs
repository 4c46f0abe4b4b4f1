//! Parameter storage and the small perceptrons the models are built from.
//!
//! Parameters live outside any tape in a [`ParamStore`]. Each forward pass
//! binds them into a fresh [`Graph`] as leaves, and gradients are read back
//! as one flat vector in declaration order (complex blocks contribute their
//! real parts followed by their imaginary parts).

use rand::Rng;

use crate::tensor::{Activation, ComplexTensor, Graph, Tensor, TensorError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ParamId(usize);

#[derive(Debug, Clone, PartialEq)]
pub struct Param {
    pub name: String,
    pub shape: Vec<usize>,
    pub re: Vec<f64>,
    pub im: Option<Vec<f64>>,
}

impl Param {
    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    /// Number of real scalars.
    pub fn len(&self) -> usize {
        self.re.len() * if self.is_complex() { 2 } else { 1 }
    }

    pub fn is_empty(&self) -> bool {
        self.re.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParamStore {
    params: Vec<Param>,
}

impl ParamStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_real(&mut self, name: impl Into<String>, shape: &[usize], values: Vec<f64>) -> ParamId {
        assert_eq!(values.len(), shape.iter().product::<usize>(), "parameter length");
        self.params.push(Param { name: name.into(), shape: shape.to_vec(), re: values, im: None });
        ParamId(self.params.len() - 1)
    }

    pub fn add_complex(&mut self, name: impl Into<String>, shape: &[usize], re: Vec<f64>, im: Vec<f64>) -> ParamId {
        assert_eq!(re.len(), shape.iter().product::<usize>(), "parameter length");
        assert_eq!(re.len(), im.len(), "parameter length");
        self.params.push(Param { name: name.into(), shape: shape.to_vec(), re, im: Some(im) });
        ParamId(self.params.len() - 1)
    }

    pub fn get(&self, id: ParamId) -> &Param {
        &self.params[id.0]
    }

    pub fn get_mut(&mut self, id: ParamId) -> &mut Param {
        &mut self.params[id.0]
    }

    pub fn params(&self) -> &[Param] {
        &self.params
    }

    /// Total number of trainable real scalars, |Θ|.
    pub fn count(&self) -> usize {
        self.params.iter().map(Param::len).sum()
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.count());
        for p in &self.params {
            out.extend_from_slice(&p.re);
            if let Some(im) = &p.im {
                out.extend_from_slice(im);
            }
        }
        out
    }

    pub fn set_flat(&mut self, values: &[f64]) -> Result<(), TensorError> {
        if values.len() != self.count() {
            return Err(TensorError::DataLength { len: values.len(), shape: vec![self.count()] });
        }
        let mut off = 0;
        for p in &mut self.params {
            let n = p.re.len();
            p.re.copy_from_slice(&values[off..off + n]);
            off += n;
            if let Some(im) = &mut p.im {
                im.copy_from_slice(&values[off..off + n]);
                off += n;
            }
        }
        Ok(())
    }

    /// Registers every parameter as a leaf of `graph`.
    pub fn bind(&self, graph: &Graph) -> Bound {
        let leaves = self
            .params
            .iter()
            .map(|p| match &p.im {
                None => BoundParam::Real(graph.param(&p.shape, p.re.clone()).expect("shape checked on insert")),
                Some(im) => BoundParam::Complex(graph.complex_param(&p.shape, p.re.clone(), im.clone()).expect("shape checked on insert")),
            })
            .collect();
        Bound { leaves }
    }
}

#[derive(Debug, Clone)]
pub enum BoundParam {
    Real(Tensor),
    Complex(ComplexTensor),
}

/// Parameters bound into one graph.
#[derive(Debug, Clone)]
pub struct Bound {
    leaves: Vec<BoundParam>,
}

impl Bound {
    pub fn real(&self, id: ParamId) -> &Tensor {
        match &self.leaves[id.0] {
            BoundParam::Real(t) => t,
            BoundParam::Complex(_) => panic!("parameter {} is complex", id.0),
        }
    }

    pub fn complex(&self, id: ParamId) -> &ComplexTensor {
        match &self.leaves[id.0] {
            BoundParam::Complex(t) => t,
            BoundParam::Real(_) => panic!("parameter {} is real", id.0),
        }
    }

    /// Gradients after `backward`, flattened like [`ParamStore::flat`].
    /// Parameters the loss does not depend on get zeros.
    pub fn grads(&self) -> Vec<f64> {
        let mut out = Vec::new();
        for leaf in &self.leaves {
            match leaf {
                BoundParam::Real(t) => out.extend(t.grad().unwrap_or_else(|| vec![0.0; t.numel()])),
                BoundParam::Complex(t) => {
                    let n = t.shape().iter().product();
                    out.extend(t.grad_re().unwrap_or_else(|| vec![0.0; n]));
                    out.extend(t.grad_im().unwrap_or_else(|| vec![0.0; n]));
                }
            }
        }
        out
    }
}

/// Uniform in `±√(6 / (fan_in + fan_out))`.
pub fn glorot_uniform(rng: &mut impl Rng, fan_in: usize, fan_out: usize) -> Vec<f64> {
    let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
    (0..fan_in * fan_out).map(|_| rng.random_range(-limit..=limit)).collect()
}

/// `y = x W + b` on row vectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Linear {
    pub weight: ParamId,
    pub bias: ParamId,
    pub fan_in: usize,
    pub fan_out: usize,
}

impl Linear {
    pub fn new(store: &mut ParamStore, rng: &mut impl Rng, name: &str, fan_in: usize, fan_out: usize) -> Self {
        let weight = store.add_real(format!("{name}.weight"), &[fan_in, fan_out], glorot_uniform(rng, fan_in, fan_out));
        let bias = store.add_real(format!("{name}.bias"), &[1, fan_out], vec![0.0; fan_out]);
        Self { weight, bias, fan_in, fan_out }
    }

    pub fn param_count(fan_in: usize, fan_out: usize) -> usize {
        fan_in * fan_out + fan_out
    }

    pub fn forward(&self, p: &Bound, x: &Tensor) -> Result<Tensor, TensorError> {
        x.matmul(p.real(self.weight))?.add_row(p.real(self.bias))
    }
}

/// Two affine maps with a nonlinearity between them.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mlp {
    pub first: Linear,
    pub second: Linear,
    pub activation: Activation,
}

impl Mlp {
    pub fn new(store: &mut ParamStore, rng: &mut impl Rng, name: &str, sizes: [usize; 3], activation: Activation) -> Self {
        let first = Linear::new(store, rng, &format!("{name}.0"), sizes[0], sizes[1]);
        let second = Linear::new(store, rng, &format!("{name}.1"), sizes[1], sizes[2]);
        Self { first, second, activation }
    }

    pub fn param_count(sizes: [usize; 3]) -> usize {
        Linear::param_count(sizes[0], sizes[1]) + Linear::param_count(sizes[1], sizes[2])
    }

    pub fn forward(&self, p: &Bound, x: &Tensor) -> Result<Tensor, TensorError> {
        let hidden = self.first.forward(p, x)?.activate(self.activation);
        self.second.forward(p, &hidden)
    }
}

/// Complex `y = x W + b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexLinear {
    pub weight: ParamId,
    pub bias: ParamId,
}

impl ComplexLinear {
    /// Real and imaginary weight parts are each Glorot-uniform.
    pub fn new(store: &mut ParamStore, rng: &mut impl Rng, name: &str, fan_in: usize, fan_out: usize) -> Self {
        let re = glorot_uniform(rng, fan_in, fan_out);
        let im = glorot_uniform(rng, fan_in, fan_out);
        let weight = store.add_complex(format!("{name}.weight"), &[fan_in, fan_out], re, im);
        let bias = store.add_complex(format!("{name}.bias"), &[1, fan_out], vec![0.0; fan_out], vec![0.0; fan_out]);
        Self { weight, bias }
    }

    pub fn param_count(fan_in: usize, fan_out: usize) -> usize {
        2 * Linear::param_count(fan_in, fan_out)
    }

    pub fn forward(&self, p: &Bound, x: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
        x.matmul(p.complex(self.weight))?.add_row(p.complex(self.bias))
    }
}

/// Applies `act` to the real and imaginary parts separately.
pub fn split_activation(z: &ComplexTensor, act: Activation) -> Result<ComplexTensor, TensorError> {
    ComplexTensor::from_parts(&z.re().activate(act), &z.im().activate(act))
}

/// Complex counterpart of [`Mlp`] with a split activation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexMlp {
    pub first: ComplexLinear,
    pub second: ComplexLinear,
    pub activation: Activation,
}

impl ComplexMlp {
    pub fn new(store: &mut ParamStore, rng: &mut impl Rng, name: &str, sizes: [usize; 3], activation: Activation) -> Self {
        let first = ComplexLinear::new(store, rng, &format!("{name}.0"), sizes[0], sizes[1]);
        let second = ComplexLinear::new(store, rng, &format!("{name}.1"), sizes[1], sizes[2]);
        Self { first, second, activation }
    }

    pub fn param_count(sizes: [usize; 3]) -> usize {
        ComplexLinear::param_count(sizes[0], sizes[1]) + ComplexLinear::param_count(sizes[1], sizes[2])
    }

    pub fn forward(&self, p: &Bound, x: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
        let hidden = split_activation(&self.first.forward(p, x)?, self.activation)?;
        self.second.forward(p, &hidden)
    }
}

/// Uniform complex entries with real and imaginary parts in `±scale`.
pub fn small_complex(rng: &mut impl Rng, n: usize, scale: f64) -> (Vec<f64>, Vec<f64>) {
    let re = (0..n).map(|_| rng.random_range(-scale..=scale)).collect();
    let im = (0..n).map(|_| rng.random_range(-scale..=scale)).collect();
    (re, im)
}
