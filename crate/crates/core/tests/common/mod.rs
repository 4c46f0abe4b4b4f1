#![allow(dead_code)]

use qjet::tensor::{ComplexTensor, Graph, Tensor, TensorError};

/// Central-difference step.
pub const FD_STEP: f64 = 1e-6;
pub const FD_REL_TOL: f64 = 1e-4;
pub const FD_ABS_FLOOR: f64 = 1e-7;

/// A leaf handed to the function under test.
pub enum Leaf {
    Real(Tensor),
    Complex(ComplexTensor),
}

impl Leaf {
    pub fn real(&self) -> &Tensor {
        match self {
            Leaf::Real(t) => t,
            Leaf::Complex(_) => panic!("expected a real leaf"),
        }
    }

    pub fn complex(&self) -> &ComplexTensor {
        match self {
            Leaf::Complex(t) => t,
            Leaf::Real(_) => panic!("expected a complex leaf"),
        }
    }
}

#[derive(Clone)]
pub struct LeafSpec {
    pub shape: Vec<usize>,
    pub complex: bool,
}

impl LeafSpec {
    pub fn real(shape: &[usize]) -> Self {
        Self { shape: shape.to_vec(), complex: false }
    }

    pub fn complex(shape: &[usize]) -> Self {
        Self { shape: shape.to_vec(), complex: true }
    }

    /// Scalars stored for this leaf in the flat parameter vector.
    pub fn width(&self) -> usize {
        let n: usize = self.shape.iter().product();
        if self.complex {
            2 * n
        } else {
            n
        }
    }
}

fn build(g: &Graph, specs: &[LeafSpec], flat: &[f64]) -> Vec<Leaf> {
    let mut off = 0;
    specs
        .iter()
        .map(|s| {
            let n: usize = s.shape.iter().product();
            let leaf = if s.complex {
                let re = flat[off..off + n].to_vec();
                let im = flat[off + n..off + 2 * n].to_vec();
                Leaf::Complex(g.complex_param(&s.shape, re, im).unwrap())
            } else {
                Leaf::Real(g.param(&s.shape, flat[off..off + n].to_vec()).unwrap())
            };
            off += s.width();
            leaf
        })
        .collect()
}

/// Autodiff gradient of `f` at `flat`, laid out like `flat` (re then im for
/// complex leaves).
pub fn autodiff_grad<F>(specs: &[LeafSpec], flat: &[f64], f: &F) -> (f64, Vec<f64>)
where
    F: Fn(&[Leaf]) -> Result<Tensor, TensorError>,
{
    let g = Graph::new();
    let leaves = build(&g, specs, flat);
    let loss = f(&leaves).expect("forward");
    loss.backward().expect("backward");
    let mut out = Vec::with_capacity(flat.len());
    for (leaf, s) in leaves.iter().zip(specs) {
        let n: usize = s.shape.iter().product();
        match leaf {
            Leaf::Real(t) => out.extend(t.grad().unwrap_or_else(|| vec![0.0; n])),
            Leaf::Complex(t) => {
                out.extend(t.grad_re().unwrap_or_else(|| vec![0.0; n]));
                out.extend(t.grad_im().unwrap_or_else(|| vec![0.0; n]));
            }
        }
    }
    (loss.item(), out)
}

pub fn eval<F>(specs: &[LeafSpec], flat: &[f64], f: &F) -> f64
where
    F: Fn(&[Leaf]) -> Result<Tensor, TensorError>,
{
    let g = Graph::new();
    let leaves = build(&g, specs, flat);
    f(&leaves).expect("forward").item()
}

/// Central differences with step [`FD_STEP`].
pub fn finite_difference_grad<F>(specs: &[LeafSpec], flat: &[f64], f: &F) -> Vec<f64>
where
    F: Fn(&[Leaf]) -> Result<Tensor, TensorError>,
{
    (0..flat.len())
        .map(|k| {
            let mut plus = flat.to_vec();
            let mut minus = flat.to_vec();
            plus[k] += FD_STEP;
            minus[k] -= FD_STEP;
            (eval(specs, &plus, f) - eval(specs, &minus, f)) / (2.0 * FD_STEP)
        })
        .collect()
}

pub fn grads_agree(analytic: f64, numeric: f64) -> bool {
    let err = (analytic - numeric).abs();
    err <= (FD_REL_TOL * analytic.abs().max(numeric.abs())).max(FD_ABS_FLOOR)
}

/// Panics with the first disagreeing coordinate.
pub fn assert_fd_agrees<F>(specs: &[LeafSpec], flat: &[f64], f: F)
where
    F: Fn(&[Leaf]) -> Result<Tensor, TensorError>,
{
    let (_, analytic) = autodiff_grad(specs, flat, &f);
    let numeric = finite_difference_grad(specs, flat, &f);
    for (k, (a, n)) in analytic.iter().zip(&numeric).enumerate() {
        assert!(grads_agree(*a, *n), "coordinate {k}: autodiff {a:e} vs finite difference {n:e}");
    }
}

/// Reduces any real tensor to a scalar through fixed pseudo-random weights so
/// every output entry contributes a distinct adjoint.
pub fn project(t: &Tensor) -> Result<Tensor, TensorError> {
    let n = t.numel();
    let w: Vec<f64> = (0..n).map(|k| 0.3 + ((k * 7919) % 13) as f64 / 10.0).collect();
    let w = t.graph().constant(&t.shape(), w)?;
    Ok(t.mul(&w)?.sum())
}

pub fn project_complex(z: &ComplexTensor) -> Result<Tensor, TensorError> {
    let a = project(&z.re())?;
    let b = project(&z.im().scale(-0.7))?;
    a.add(&b)
}

/// Small deterministic pseudo-random values in `[-scale, scale]`.
pub fn lcg_values(seed: u64, n: usize, scale: f64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
    (0..n)
        .map(|_| {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let u = (s >> 11) as f64 / (1u64 << 53) as f64;
            scale * (2.0 * u - 1.0)
        })
        .collect()
}
