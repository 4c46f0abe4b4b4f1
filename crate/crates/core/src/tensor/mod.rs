//! Dense real and complex tensors with tape-based reverse-mode
//! differentiation.
//!
//! A [`Graph`] is a tape. Leaves and constants are pushed onto it, every op
//! appends a node, and [`Tensor::backward`] walks the tape in reverse. Handles
//! ([`Tensor`], [`ComplexTensor`]) are cheap to clone and only valid on the
//! graph that created them. A graph is single-threaded (`Rc`); independent
//! graphs can live on different threads.
//!
//! Complex values are differentiated with the real-composition convention:
//! the real and imaginary parts of a complex leaf are independent real
//! parameters, and the stored adjoints are `∂L/∂Re` and `∂L/∂Im`.

mod backward;
mod cmatrix;
mod kernels;
mod matfun;
mod ops;

use std::cell::RefCell;
use std::fmt;
use std::rc::Rc;

use num_complex::Complex64;
use thiserror::Error;

pub use cmatrix::{CMatrix, MAX_CONDITION};
pub use matfun::{taylor_order, EXPM_HERMITIAN_TOL};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TensorError {
    #[error("shape mismatch in {op}: {lhs:?} vs {rhs:?}")]
    ShapeMismatch { op: &'static str, lhs: Vec<usize>, rhs: Vec<usize> },
    #[error("{op} expects a rank-{expected} tensor, got shape {shape:?}")]
    Rank { op: &'static str, expected: usize, shape: Vec<usize> },
    #[error("data length {len} does not match shape {shape:?}")]
    DataLength { len: usize, shape: Vec<usize> },
    #[error("matrix is singular or ill-conditioned (condition estimate {condition:e})")]
    Singular { condition: f64 },
    #[error("contract violation in {op}: {detail}")]
    Contract { op: &'static str, detail: String },
    #[error("index {index} out of bounds for length {len}")]
    Index { index: usize, len: usize },
    #[error("tensors belong to different graphs")]
    GraphMismatch,
}

/// Pointwise nonlinearity used by the perceptrons.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Activation {
    /// `ln(1 + e^x)`.
    #[default]
    Softplus,
    Silu,
    Tanh,
    Relu,
    Identity,
}

impl Activation {
    pub fn apply(self, x: f64) -> f64 {
        match self {
            Activation::Softplus => x.max(0.0) + (-x.abs()).exp().ln_1p(),
            Activation::Silu => x * sigmoid(x),
            Activation::Tanh => x.tanh(),
            Activation::Relu => x.max(0.0),
            Activation::Identity => x,
        }
    }

    pub fn derivative(self, x: f64) -> f64 {
        match self {
            Activation::Softplus => sigmoid(x),
            Activation::Silu => {
                let s = sigmoid(x);
                s * (1.0 + x * (1.0 - s))
            }
            Activation::Tanh => 1.0 - x.tanh().powi(2),
            Activation::Relu => {
                if x > 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
            Activation::Identity => 1.0,
        }
    }
}

impl std::str::FromStr for Activation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "softplus" => Ok(Activation::Softplus),
            "silu" | "swish" => Ok(Activation::Silu),
            "tanh" => Ok(Activation::Tanh),
            "relu" => Ok(Activation::Relu),
            "identity" | "linear" => Ok(Activation::Identity),
            other => Err(format!("unknown activation `{other}`")),
        }
    }
}

impl fmt::Display for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Activation::Softplus => "softplus",
            Activation::Silu => "silu",
            Activation::Tanh => "tanh",
            Activation::Relu => "relu",
            Activation::Identity => "identity",
        };
        f.write_str(s)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone)]
pub(crate) enum Op {
    Leaf,
    Add(usize, usize),
    Sub(usize, usize),
    Mul(usize, usize),
    AddScalar(usize),
    Scale(usize, f64),
    ScaleBy(usize, usize),
    CScale(usize, Complex64),
    Pow(usize, f64),
    Act(usize, Activation),
    MatMul(usize, usize),
    Transpose(usize),
    Adjoint(usize),
    Reshape(usize),
    SumAll(usize),
    SumAxis(usize, usize),
    Concat(Vec<usize>, usize),
    GatherRows(usize, Vec<usize>),
    ScatterAddRows(usize, Vec<usize>),
    AddRow(usize, usize),
    ScaleRows(usize, usize),
    RowNorm(usize),
    SoftmaxCrossEntropy(usize, Vec<usize>),
    FromParts(usize, usize),
    RealPart(usize),
    ImagPart(usize),
    Abs(usize),
    Abs2(usize),
    Kron(usize, usize),
    Inverse(usize),
}

pub(crate) struct Node {
    pub(crate) shape: Vec<usize>,
    pub(crate) re: Vec<f64>,
    pub(crate) im: Option<Vec<f64>>,
    pub(crate) op: Op,
    pub(crate) requires_grad: bool,
    pub(crate) grad_re: Option<Vec<f64>>,
    pub(crate) grad_im: Option<Vec<f64>>,
}

#[derive(Default)]
pub(crate) struct Tape {
    pub(crate) nodes: Vec<Node>,
}

/// A computation tape.
#[derive(Clone, Default)]
pub struct Graph {
    tape: Rc<RefCell<Tape>>,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Graph").field("nodes", &self.len()).finish()
    }
}

/// Real tensor handle.
#[derive(Clone)]
pub struct Tensor {
    graph: Graph,
    id: usize,
}

/// Complex tensor handle.
#[derive(Clone)]
pub struct ComplexTensor {
    graph: Graph,
    id: usize,
}

fn numel(shape: &[usize]) -> usize {
    shape.iter().product()
}

impl Graph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.tape.borrow().nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn same(&self, other: &Graph) -> Result<(), TensorError> {
        if Rc::ptr_eq(&self.tape, &other.tape) {
            Ok(())
        } else {
            Err(TensorError::GraphMismatch)
        }
    }

    pub(crate) fn push(&self, shape: Vec<usize>, re: Vec<f64>, im: Option<Vec<f64>>, op: Op) -> usize {
        let mut tape = self.tape.borrow_mut();
        let requires_grad = match &op {
            Op::Leaf => false,
            op => backward::inputs(op).iter().any(|&i| tape.nodes[i].requires_grad),
        };
        debug_assert_eq!(re.len(), numel(&shape));
        tape.nodes.push(Node { shape, re, im, op, requires_grad, grad_re: None, grad_im: None });
        tape.nodes.len() - 1
    }

    fn push_leaf(
        &self,
        shape: Vec<usize>,
        re: Vec<f64>,
        im: Option<Vec<f64>>,
        requires_grad: bool,
    ) -> Result<usize, TensorError> {
        if re.len() != numel(&shape) || im.as_ref().is_some_and(|im| im.len() != re.len()) {
            return Err(TensorError::DataLength { len: re.len(), shape });
        }
        let id = self.push(shape, re, im, Op::Leaf);
        self.tape.borrow_mut().nodes[id].requires_grad = requires_grad;
        Ok(id)
    }

    /// Trainable real leaf.
    pub fn param(&self, shape: &[usize], values: Vec<f64>) -> Result<Tensor, TensorError> {
        let id = self.push_leaf(shape.to_vec(), values, None, true)?;
        Ok(Tensor { graph: self.clone(), id })
    }

    /// Real constant (no gradient).
    pub fn constant(&self, shape: &[usize], values: Vec<f64>) -> Result<Tensor, TensorError> {
        let id = self.push_leaf(shape.to_vec(), values, None, false)?;
        Ok(Tensor { graph: self.clone(), id })
    }

    /// Rank-0 constant.
    pub fn scalar(&self, value: f64) -> Tensor {
        self.constant(&[], vec![value]).expect("scalar shape")
    }

    /// Trainable complex leaf.
    pub fn complex_param(&self, shape: &[usize], re: Vec<f64>, im: Vec<f64>) -> Result<ComplexTensor, TensorError> {
        let id = self.push_leaf(shape.to_vec(), re, Some(im), true)?;
        Ok(ComplexTensor { graph: self.clone(), id })
    }

    pub fn complex_constant(&self, shape: &[usize], re: Vec<f64>, im: Vec<f64>) -> Result<ComplexTensor, TensorError> {
        let id = self.push_leaf(shape.to_vec(), re, Some(im), false)?;
        Ok(ComplexTensor { graph: self.clone(), id })
    }

    pub fn matrix_constant(&self, m: &CMatrix) -> ComplexTensor {
        let (re, im) = m.split();
        self.complex_constant(&[m.rows(), m.cols()], re, im).expect("consistent CMatrix")
    }

    pub fn matrix_param(&self, m: &CMatrix) -> ComplexTensor {
        let (re, im) = m.split();
        self.complex_param(&[m.rows(), m.cols()], re, im).expect("consistent CMatrix")
    }

    pub fn identity(&self, n: usize) -> ComplexTensor {
        self.matrix_constant(&CMatrix::identity(n))
    }

    /// Clears accumulated gradients on every leaf.
    pub fn zero_grad(&self) {
        for node in self.tape.borrow_mut().nodes.iter_mut() {
            node.grad_re = None;
            node.grad_im = None;
        }
    }

    pub(crate) fn with_node<R>(&self, id: usize, f: impl FnOnce(&Node) -> R) -> R {
        f(&self.tape.borrow().nodes[id])
    }
}

impl Tensor {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shape(&self) -> Vec<usize> {
        self.graph.with_node(self.id, |n| n.shape.clone())
    }

    pub fn numel(&self) -> usize {
        self.graph.with_node(self.id, |n| n.re.len())
    }

    pub fn values(&self) -> Vec<f64> {
        self.graph.with_node(self.id, |n| n.re.clone())
    }

    /// The single value of a one-element tensor.
    pub fn item(&self) -> f64 {
        self.graph.with_node(self.id, |n| n.re[0])
    }

    pub fn requires_grad(&self) -> bool {
        self.graph.with_node(self.id, |n| n.requires_grad)
    }

    /// Accumulated adjoint of a leaf, populated by [`Tensor::backward`].
    pub fn grad(&self) -> Option<Vec<f64>> {
        self.graph.with_node(self.id, |n| n.grad_re.clone())
    }

    pub fn backward(&self) -> Result<(), TensorError> {
        backward::run(&self.graph, self.id)
    }
}

impl fmt::Debug for Tensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Tensor").field("shape", &self.shape()).field("values", &self.values()).finish()
    }
}

impl ComplexTensor {
    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn shape(&self) -> Vec<usize> {
        self.graph.with_node(self.id, |n| n.shape.clone())
    }

    pub fn re_values(&self) -> Vec<f64> {
        self.graph.with_node(self.id, |n| n.re.clone())
    }

    pub fn im_values(&self) -> Vec<f64> {
        self.graph.with_node(self.id, |n| n.im.clone().unwrap_or_else(|| vec![0.0; n.re.len()]))
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.graph.with_node(self.id, |n| match &n.im {
            Some(im) => n.re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
            None => n.re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        })
    }

    /// Value as a matrix; rank-1 tensors become column vectors.
    pub fn to_matrix(&self) -> CMatrix {
        let shape = self.shape();
        let (r, c) = match shape.as_slice() {
            [] => (1, 1),
            [n] => (*n, 1),
            [r, c] => (*r, *c),
            _ => (numel(&shape), 1),
        };
        self.graph.with_node(self.id, |n| CMatrix::from_parts(r, c, &n.re, n.im.as_deref()))
    }

    pub fn requires_grad(&self) -> bool {
        self.graph.with_node(self.id, |n| n.requires_grad)
    }

    pub fn grad_re(&self) -> Option<Vec<f64>> {
        self.graph.with_node(self.id, |n| n.grad_re.clone())
    }

    pub fn grad_im(&self) -> Option<Vec<f64>> {
        self.graph.with_node(self.id, |n| n.grad_im.clone())
    }
}

impl fmt::Debug for ComplexTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ComplexTensor").field("shape", &self.shape()).finish()
    }
}
