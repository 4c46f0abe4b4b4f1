use num_complex::Complex64;

use super::kernels;
use super::{numel, Activation, ComplexTensor, Graph, Node, Op, Tensor, TensorError};

type Forward = (Vec<usize>, Vec<f64>, Option<Vec<f64>>);

fn matrix_dims(op: &'static str, shape: &[usize]) -> Result<(usize, usize), TensorError> {
    match shape {
        [r, c] => Ok((*r, *c)),
        _ => Err(TensorError::Rank { op, expected: 2, shape: shape.to_vec() }),
    }
}

fn same_shape(op: &'static str, a: &Node, b: &Node) -> Result<(), TensorError> {
    if a.shape != b.shape {
        return Err(TensorError::ShapeMismatch { op, lhs: a.shape.clone(), rhs: b.shape.clone() });
    }
    Ok(())
}

fn zip(a: &[f64], b: &[f64], f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// Combines optional imaginary parts elementwise, treating `None` as zero.
fn zip_im(a: Option<&Vec<f64>>, b: Option<&Vec<f64>>, len: usize, f: impl Fn(f64, f64) -> f64) -> Option<Vec<f64>> {
    match (a, b) {
        (None, None) => None,
        (a, b) => {
            let zeros = vec![0.0; len];
            Some(zip(a.unwrap_or(&zeros), b.unwrap_or(&zeros), f))
        }
    }
}

impl Graph {
    fn unary(&self, a: usize, op: Op, f: impl FnOnce(&Node) -> Result<Forward, TensorError>) -> Result<usize, TensorError> {
        let (shape, re, im) = self.with_node(a, f)?;
        Ok(self.push(shape, re, im, op))
    }

    fn binary(
        &self,
        a: usize,
        b: usize,
        op: Op,
        f: impl FnOnce(&Node, &Node) -> Result<Forward, TensorError>,
    ) -> Result<usize, TensorError> {
        let (shape, re, im) = {
            let tape = self.tape.borrow();
            f(&tape.nodes[a], &tape.nodes[b])?
        };
        Ok(self.push(shape, re, im, op))
    }

    fn add_nodes(&self, a: usize, b: usize) -> Result<usize, TensorError> {
        self.binary(a, b, Op::Add(a, b), |x, y| {
            same_shape("add", x, y)?;
            Ok((x.shape.clone(), zip(&x.re, &y.re, |p, q| p + q), zip_im(x.im.as_ref(), y.im.as_ref(), x.re.len(), |p, q| p + q)))
        })
    }

    fn sub_nodes(&self, a: usize, b: usize) -> Result<usize, TensorError> {
        self.binary(a, b, Op::Sub(a, b), |x, y| {
            same_shape("sub", x, y)?;
            Ok((x.shape.clone(), zip(&x.re, &y.re, |p, q| p - q), zip_im(x.im.as_ref(), y.im.as_ref(), x.re.len(), |p, q| p - q)))
        })
    }

    fn matmul_nodes(&self, a: usize, b: usize) -> Result<usize, TensorError> {
        self.binary(a, b, Op::MatMul(a, b), |x, y| {
            let (m, k) = matrix_dims("matmul", &x.shape)?;
            let (k2, n) = matrix_dims("matmul", &y.shape)?;
            if k != k2 {
                return Err(TensorError::ShapeMismatch { op: "matmul", lhs: x.shape.clone(), rhs: y.shape.clone() });
            }
            let (re, im) = kernels::cmatmul(&x.re, x.im.as_deref(), &y.re, y.im.as_deref(), m, k, n);
            Ok((vec![m, n], re, im))
        })
    }

    fn scale_by_nodes(&self, a: usize, s: usize) -> Result<usize, TensorError> {
        self.binary(a, s, Op::ScaleBy(a, s), |x, sc| {
            if sc.re.len() != 1 || sc.im.is_some() {
                return Err(TensorError::Contract {
                    op: "scale_by",
                    detail: format!("scale must be a real one-element tensor, got shape {:?}", sc.shape),
                });
            }
            let s = sc.re[0];
            Ok((x.shape.clone(), x.re.iter().map(|v| v * s).collect(), x.im.as_ref().map(|im| im.iter().map(|v| v * s).collect())))
        })
    }

    fn transpose_node(&self, a: usize, conjugate: bool) -> Result<usize, TensorError> {
        let op = if conjugate { Op::Adjoint(a) } else { Op::Transpose(a) };
        self.unary(a, op, |x| {
            let (m, n) = matrix_dims(if conjugate { "adjoint" } else { "transpose" }, &x.shape)?;
            let re = kernels::transpose(&x.re, m, n);
            let im = x.im.as_ref().map(|im| {
                let mut t = kernels::transpose(im, m, n);
                if conjugate {
                    t.iter_mut().for_each(|v| *v = -*v);
                }
                t
            });
            Ok((vec![n, m], re, im))
        })
    }

    fn reshape_node(&self, a: usize, shape: &[usize]) -> Result<usize, TensorError> {
        self.unary(a, Op::Reshape(a), |x| {
            if numel(shape) != x.re.len() {
                return Err(TensorError::ShapeMismatch { op: "reshape", lhs: x.shape.clone(), rhs: shape.to_vec() });
            }
            Ok((shape.to_vec(), x.re.clone(), x.im.clone()))
        })
    }

    fn sum_all_node(&self, a: usize) -> usize {
        self.unary(a, Op::SumAll(a), |x| Ok((vec![], vec![x.re.iter().sum()], x.im.as_ref().map(|im| vec![im.iter().sum()]))))
            .expect("sum of any tensor")
    }

    fn add_row_nodes(&self, a: usize, row: usize) -> Result<usize, TensorError> {
        self.binary(a, row, Op::AddRow(a, row), |x, r| {
            let (m, n) = matrix_dims("add_row", &x.shape)?;
            if r.re.len() != n {
                return Err(TensorError::ShapeMismatch { op: "add_row", lhs: x.shape.clone(), rhs: r.shape.clone() });
            }
            let bcast = |v: &[f64], b: &[f64]| -> Vec<f64> { (0..m * n).map(|k| v[k] + b[k % n]).collect() };
            let re = bcast(&x.re, &r.re);
            let im = match (&x.im, &r.im) {
                (None, None) => None,
                (xi, ri) => {
                    let zx = vec![0.0; m * n];
                    let zr = vec![0.0; n];
                    Some(bcast(xi.as_deref().unwrap_or(&zx), ri.as_deref().unwrap_or(&zr)))
                }
            };
            Ok((x.shape.clone(), re, im))
        })
    }

    fn gather_rows_node(&self, a: usize, idx: &[usize]) -> Result<usize, TensorError> {
        self.unary(a, Op::GatherRows(a, idx.to_vec()), |x| {
            let (m, n) = matrix_dims("gather_rows", &x.shape)?;
            let pick = |v: &[f64]| -> Result<Vec<f64>, TensorError> {
                let mut out = Vec::with_capacity(idx.len() * n);
                for &r in idx {
                    if r >= m {
                        return Err(TensorError::Index { index: r, len: m });
                    }
                    out.extend_from_slice(&v[r * n..(r + 1) * n]);
                }
                Ok(out)
            };
            let re = pick(&x.re)?;
            let im = x.im.as_deref().map(pick).transpose()?;
            Ok((vec![idx.len(), n], re, im))
        })
    }

    fn scatter_add_rows_node(&self, a: usize, idx: &[usize], rows_out: usize) -> Result<usize, TensorError> {
        self.unary(a, Op::ScatterAddRows(a, idx.to_vec()), |x| {
            let (m, n) = matrix_dims("scatter_add_rows", &x.shape)?;
            if idx.len() != m {
                return Err(TensorError::Contract {
                    op: "scatter_add_rows",
                    detail: format!("{} target indices for {} rows", idx.len(), m),
                });
            }
            let spread = |v: &[f64]| -> Result<Vec<f64>, TensorError> {
                let mut out = vec![0.0; rows_out * n];
                for (src, &dst) in idx.iter().enumerate() {
                    if dst >= rows_out {
                        return Err(TensorError::Index { index: dst, len: rows_out });
                    }
                    kernels::add_assign(&mut out[dst * n..(dst + 1) * n], &v[src * n..(src + 1) * n]);
                }
                Ok(out)
            };
            let re = spread(&x.re)?;
            let im = x.im.as_deref().map(spread).transpose()?;
            Ok((vec![rows_out, n], re, im))
        })
    }

    fn concat_nodes(&self, ids: &[usize], axis: usize) -> Result<usize, TensorError> {
        if ids.is_empty() {
            return Err(TensorError::Contract { op: "concat", detail: "nothing to concatenate".into() });
        }
        let (shape, re, im) = {
            let tape = self.tape.borrow();
            let nodes: Vec<&Node> = ids.iter().map(|&i| &tape.nodes[i]).collect();
            let dims = nodes.iter().map(|n| matrix_dims("concat", &n.shape)).collect::<Result<Vec<_>, _>>()?;
            let complex = nodes.iter().any(|n| n.im.is_some());
            let part = |n: &Node, imag: bool| -> Vec<f64> {
                if imag {
                    n.im.clone().unwrap_or_else(|| vec![0.0; n.re.len()])
                } else {
                    n.re.clone()
                }
            };
            match axis {
                0 => {
                    let cols = dims[0].1;
                    if let Some(bad) = nodes.iter().zip(&dims).find(|(_, d)| d.1 != cols) {
                        return Err(TensorError::ShapeMismatch { op: "concat", lhs: nodes[0].shape.clone(), rhs: bad.0.shape.clone() });
                    }
                    let rows = dims.iter().map(|d| d.0).sum::<usize>();
                    let cat = |imag: bool| nodes.iter().flat_map(|n| part(n, imag)).collect::<Vec<f64>>();
                    (vec![rows, cols], cat(false), complex.then(|| cat(true)))
                }
                1 => {
                    let rows = dims[0].0;
                    if let Some(bad) = nodes.iter().zip(&dims).find(|(_, d)| d.0 != rows) {
                        return Err(TensorError::ShapeMismatch { op: "concat", lhs: nodes[0].shape.clone(), rhs: bad.0.shape.clone() });
                    }
                    let cols = dims.iter().map(|d| d.1).sum::<usize>();
                    let cat = |imag: bool| {
                        let parts: Vec<Vec<f64>> = nodes.iter().map(|n| part(n, imag)).collect();
                        let mut out = Vec::with_capacity(rows * cols);
                        for r in 0..rows {
                            for (p, d) in parts.iter().zip(&dims) {
                                out.extend_from_slice(&p[r * d.1..(r + 1) * d.1]);
                            }
                        }
                        out
                    };
                    (vec![rows, cols], cat(false), complex.then(|| cat(true)))
                }
                _ => return Err(TensorError::Contract { op: "concat", detail: format!("axis {axis} not in {{0, 1}}") }),
            }
        };
        Ok(self.push(shape, re, im, Op::Concat(ids.to_vec(), axis)))
    }
}

impl Tensor {
    fn wrap(&self, id: usize) -> Tensor {
        Tensor { graph: self.graph.clone(), id }
    }

    fn check(&self, other: &Tensor) -> Result<(), TensorError> {
        self.graph.same(&other.graph)
    }

    pub fn add(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.check(other)?;
        Ok(self.wrap(self.graph.add_nodes(self.id, other.id)?))
    }

    pub fn sub(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.check(other)?;
        Ok(self.wrap(self.graph.sub_nodes(self.id, other.id)?))
    }

    /// Elementwise product.
    pub fn mul(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.check(other)?;
        let id = self.graph.binary(self.id, other.id, Op::Mul(self.id, other.id), |x, y| {
            same_shape("mul", x, y)?;
            Ok((x.shape.clone(), zip(&x.re, &y.re, |p, q| p * q), None))
        })?;
        Ok(self.wrap(id))
    }

    pub fn add_scalar(&self, c: f64) -> Tensor {
        let id = self
            .graph
            .unary(self.id, Op::AddScalar(self.id), |x| Ok((x.shape.clone(), x.re.iter().map(|v| v + c).collect(), None)))
            .expect("infallible");
        self.wrap(id)
    }

    pub fn scale(&self, c: f64) -> Tensor {
        let id = self
            .graph
            .unary(self.id, Op::Scale(self.id, c), |x| Ok((x.shape.clone(), x.re.iter().map(|v| v * c).collect(), None)))
            .expect("infallible");
        self.wrap(id)
    }

    pub fn neg(&self) -> Tensor {
        self.scale(-1.0)
    }

    /// Multiplies every element by a one-element tensor.
    pub fn scale_by(&self, s: &Tensor) -> Result<Tensor, TensorError> {
        self.check(s)?;
        Ok(self.wrap(self.graph.scale_by_nodes(self.id, s.id)?))
    }

    /// Elementwise power `x^p`.
    pub fn powf(&self, p: f64) -> Tensor {
        let id = self
            .graph
            .unary(self.id, Op::Pow(self.id, p), |x| Ok((x.shape.clone(), x.re.iter().map(|v| v.powf(p)).collect(), None)))
            .expect("infallible");
        self.wrap(id)
    }

    pub fn activate(&self, act: Activation) -> Tensor {
        if act == Activation::Identity {
            return self.clone();
        }
        let id = self
            .graph
            .unary(self.id, Op::Act(self.id, act), |x| Ok((x.shape.clone(), x.re.iter().map(|&v| act.apply(v)).collect(), None)))
            .expect("infallible");
        self.wrap(id)
    }

    pub fn matmul(&self, other: &Tensor) -> Result<Tensor, TensorError> {
        self.check(other)?;
        Ok(self.wrap(self.graph.matmul_nodes(self.id, other.id)?))
    }

    pub fn transpose(&self) -> Result<Tensor, TensorError> {
        Ok(self.wrap(self.graph.transpose_node(self.id, false)?))
    }

    pub fn reshape(&self, shape: &[usize]) -> Result<Tensor, TensorError> {
        Ok(self.wrap(self.graph.reshape_node(self.id, shape)?))
    }

    /// Sum of all elements (rank 0).
    pub fn sum(&self) -> Tensor {
        self.wrap(self.graph.sum_all_node(self.id))
    }

    pub fn mean(&self) -> Tensor {
        let n = self.numel().max(1) as f64;
        self.sum().scale(1.0 / n)
    }

    /// Sum along `axis` of a matrix, keeping the reduced dimension as 1.
    pub fn sum_axis(&self, axis: usize) -> Result<Tensor, TensorError> {
        let id = self.graph.unary(self.id, Op::SumAxis(self.id, axis), |x| {
            let (m, n) = matrix_dims("sum_axis", &x.shape)?;
            match axis {
                0 => {
                    let mut out = vec![0.0; n];
                    for r in 0..m {
                        kernels::add_assign(&mut out, &x.re[r * n..(r + 1) * n]);
                    }
                    Ok((vec![1, n], out, None))
                }
                1 => Ok((vec![m, 1], (0..m).map(|r| x.re[r * n..(r + 1) * n].iter().sum()).collect(), None)),
                _ => Err(TensorError::Contract { op: "sum_axis", detail: format!("axis {axis} not in {{0, 1}}") }),
            }
        })?;
        Ok(self.wrap(id))
    }

    pub fn mean_axis(&self, axis: usize) -> Result<Tensor, TensorError> {
        let shape = self.shape();
        let len = *shape.get(axis).ok_or(TensorError::Rank { op: "mean_axis", expected: 2, shape: shape.clone() })?;
        Ok(self.sum_axis(axis)?.scale(1.0 / len.max(1) as f64))
    }

    /// Concatenates matrices along `axis` (0 stacks rows, 1 stacks columns).
    pub fn concat(parts: &[Tensor], axis: usize) -> Result<Tensor, TensorError> {
        let first = parts.first().ok_or(TensorError::Contract { op: "concat", detail: "nothing to concatenate".into() })?;
        for p in parts {
            first.check(p)?;
        }
        let ids: Vec<usize> = parts.iter().map(|p| p.id).collect();
        Ok(first.wrap(first.graph.concat_nodes(&ids, axis)?))
    }

    pub fn gather_rows(&self, idx: &[usize]) -> Result<Tensor, TensorError> {
        Ok(self.wrap(self.graph.gather_rows_node(self.id, idx)?))
    }

    /// Row `k` of the input is added into row `idx[k]` of a `rows_out`-row result.
    pub fn scatter_add_rows(&self, idx: &[usize], rows_out: usize) -> Result<Tensor, TensorError> {
        Ok(self.wrap(self.graph.scatter_add_rows_node(self.id, idx, rows_out)?))
    }

    /// Adds a row vector (any shape with `cols` elements) to every row.
    pub fn add_row(&self, row: &Tensor) -> Result<Tensor, TensorError> {
        self.check(row)?;
        Ok(self.wrap(self.graph.add_row_nodes(self.id, row.id)?))
    }

    /// Multiplies row `i` by `col[i]`.
    pub fn scale_rows(&self, col: &Tensor) -> Result<Tensor, TensorError> {
        self.check(col)?;
        let id = self.graph.binary(self.id, col.id, Op::ScaleRows(self.id, col.id), |x, c| {
            let (m, n) = matrix_dims("scale_rows", &x.shape)?;
            if c.re.len() != m {
                return Err(TensorError::ShapeMismatch { op: "scale_rows", lhs: x.shape.clone(), rhs: c.shape.clone() });
            }
            Ok((x.shape.clone(), (0..m * n).map(|k| x.re[k] * c.re[k / n]).collect(), None))
        })?;
        Ok(self.wrap(id))
    }

    /// Euclidean norm of each row, as an `m x 1` column.
    pub fn row_norm(&self) -> Result<Tensor, TensorError> {
        let id = self.graph.unary(self.id, Op::RowNorm(self.id), |x| {
            let (m, n) = matrix_dims("row_norm", &x.shape)?;
            Ok((vec![m, 1], (0..m).map(|r| x.re[r * n..(r + 1) * n].iter().map(|v| v * v).sum::<f64>().sqrt()).collect(), None))
        })?;
        Ok(self.wrap(id))
    }

    /// Flat element `index` as a rank-0 tensor.
    pub fn element(&self, index: usize) -> Result<Tensor, TensorError> {
        self.reshape(&[self.numel(), 1])?.gather_rows(&[index])?.reshape(&[])
    }

    /// Mean over rows of `-log softmax(logits)[label]` for a `batch x classes`
    /// logit matrix. Max-subtraction keeps large logits finite.
    pub fn softmax_cross_entropy(&self, labels: &[usize]) -> Result<Tensor, TensorError> {
        let id = self.graph.unary(self.id, Op::SoftmaxCrossEntropy(self.id, labels.to_vec()), |x| {
            let (b, c) = matrix_dims("softmax_cross_entropy", &x.shape)?;
            if labels.len() != b || b == 0 {
                return Err(TensorError::Contract {
                    op: "softmax_cross_entropy",
                    detail: format!("{} labels for {} rows", labels.len(), b),
                });
            }
            let mut total = 0.0;
            for (r, &y) in labels.iter().enumerate() {
                if y >= c {
                    return Err(TensorError::Index { index: y, len: c });
                }
                let row = &x.re[r * c..(r + 1) * c];
                let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let lse = mx + row.iter().map(|v| (v - mx).exp()).sum::<f64>().ln();
                total += lse - row[y];
            }
            Ok((vec![], vec![total / b as f64], None))
        })?;
        Ok(self.wrap(id))
    }

    /// Lifts to a complex tensor with zero imaginary part.
    pub fn to_complex(&self) -> ComplexTensor {
        let zeros = self.graph.constant(&self.shape(), vec![0.0; self.numel()]).expect("same shape");
        ComplexTensor::from_parts(self, &zeros).expect("same shape")
    }
}

impl ComplexTensor {
    fn wrap(&self, id: usize) -> ComplexTensor {
        ComplexTensor { graph: self.graph.clone(), id }
    }

    fn check(&self, other: &ComplexTensor) -> Result<(), TensorError> {
        self.graph.same(&other.graph)
    }

    pub fn from_parts(re: &Tensor, im: &Tensor) -> Result<ComplexTensor, TensorError> {
        re.check(im)?;
        let id = re.graph.binary(re.id, im.id, Op::FromParts(re.id, im.id), |r, i| {
            same_shape("from_parts", r, i)?;
            Ok((r.shape.clone(), r.re.clone(), Some(i.re.clone())))
        })?;
        Ok(ComplexTensor { graph: re.graph.clone(), id })
    }

    fn real_out(&self, op: Op, f: impl FnOnce(&Node) -> Vec<f64>) -> Tensor {
        let id = self.graph.unary(self.id, op, |x| Ok((x.shape.clone(), f(x), None))).expect("infallible");
        Tensor { graph: self.graph.clone(), id }
    }

    pub fn re(&self) -> Tensor {
        self.real_out(Op::RealPart(self.id), |x| x.re.clone())
    }

    pub fn im(&self) -> Tensor {
        self.real_out(Op::ImagPart(self.id), |x| x.im.clone().unwrap_or_else(|| vec![0.0; x.re.len()]))
    }

    /// Elementwise modulus `|z|`.
    pub fn abs(&self) -> Tensor {
        self.real_out(Op::Abs(self.id), |x| match &x.im {
            Some(im) => zip(&x.re, im, f64::hypot),
            None => x.re.iter().map(|v| v.abs()).collect(),
        })
    }

    /// Elementwise squared modulus `|z|²`.
    pub fn abs2(&self) -> Tensor {
        self.real_out(Op::Abs2(self.id), |x| match &x.im {
            Some(im) => zip(&x.re, im, |r, i| r * r + i * i),
            None => x.re.iter().map(|v| v * v).collect(),
        })
    }

    pub fn add(&self, other: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
        self.check(other)?;
        Ok(self.wrap(self.graph.add_nodes(self.id, other.id)?))
    }

    pub fn sub(&self, other: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
        self.check(other)?;
        Ok(self.wrap(self.graph.sub_nodes(self.id, other.id)?))
    }

    pub fn scale(&self, c: Complex64) -> ComplexTensor {
        let id = self
            .graph
            .unary(self.id, Op::CScale(self.id, c), |x| {
                let zeros;
                let im = match &x.im {
                    Some(im) => im,
                    None => {
                        zeros = vec![0.0; x.re.len()];
                        &zeros
                    }
                };
                let re = zip(&x.re, im, |r, i| c.re * r - c.im * i);
                let im = zip(&x.re, im, |r, i| c.re * i + c.im * r);
                Ok((x.shape.clone(), re, Some(im)))
            })
            .expect("infallible");
        self.wrap(id)
    }

    /// Multiplies by a real one-element tensor.
    pub fn scale_by(&self, s: &Tensor) -> Result<ComplexTensor, TensorError> {
        self.graph.same(&s.graph)?;
        Ok(self.wrap(self.graph.scale_by_nodes(self.id, s.id)?))
    }

    pub fn matmul(&self, other: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
        self.check(other)?;
        Ok(self.wrap(self.graph.matmul_nodes(self.id, other.id)?))
    }

    /// Kronecker product `self ⊗ other` of two matrices.
    pub fn kron(&self, other: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
        self.check(other)?;
        let id = self.graph.binary(self.id, other.id, Op::Kron(self.id, other.id), |a, b| {
            let da = matrix_dims("kron", &a.shape)?;
            let db = matrix_dims("kron", &b.shape)?;
            let (re, im) = kernels::kron(&a.re, a.im.as_deref(), da, &b.re, b.im.as_deref(), db);
            Ok((vec![da.0 * db.0, da.1 * db.1], re, im))
        })?;
        Ok(self.wrap(id))
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Result<ComplexTensor, TensorError> {
        Ok(self.wrap(self.graph.transpose_node(self.id, true)?))
    }

    pub fn transpose(&self) -> Result<ComplexTensor, TensorError> {
        Ok(self.wrap(self.graph.transpose_node(self.id, false)?))
    }

    pub fn reshape(&self, shape: &[usize]) -> Result<ComplexTensor, TensorError> {
        Ok(self.wrap(self.graph.reshape_node(self.id, shape)?))
    }

    pub fn sum(&self) -> ComplexTensor {
        self.wrap(self.graph.sum_all_node(self.id))
    }

    pub fn mean(&self) -> ComplexTensor {
        let n = self.shape().iter().product::<usize>().max(1) as f64;
        self.sum().scale(Complex64::new(1.0 / n, 0.0))
    }

    pub fn add_row(&self, row: &ComplexTensor) -> Result<ComplexTensor, TensorError> {
        self.check(row)?;
        Ok(self.wrap(self.graph.add_row_nodes(self.id, row.id)?))
    }

    /// Matrix inverse. The backward pass uses `d(A⁻¹) = −A⁻¹ dA A⁻¹`.
    pub fn inverse(&self) -> Result<ComplexTensor, TensorError> {
        let id = self.graph.unary(self.id, Op::Inverse(self.id), |x| {
            let (m, n) = matrix_dims("inverse", &x.shape)?;
            let inv = super::CMatrix::from_parts(m, n, &x.re, x.im.as_deref()).inverse()?;
            let (re, im) = inv.split();
            Ok((vec![m, n], re, Some(im)))
        })?;
        Ok(self.wrap(id))
    }
}
