use num_complex::Complex64;

use super::kernels;
use super::TensorError;

/// Condition estimates above this are rejected by [`CMatrix::inverse`].
pub const MAX_CONDITION: f64 = 1e12;

/// Plain dense complex matrix (row-major), without gradient tracking.
///
/// Used for constant operators (Pauli strings, Hamiltonians) and as the
/// exchange type for reading values out of a tape.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![Complex64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self, TensorError> {
        if data.len() != rows * cols {
            return Err(TensorError::DataLength { len: data.len(), shape: vec![rows, cols] });
        }
        Ok(Self { rows, cols, data })
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Result<Self, TensorError> {
        Self::from_vec(rows, cols, values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn diag(entries: &[Complex64]) -> Self {
        let n = entries.len();
        let mut m = Self::zeros(n, n);
        for (i, &e) in entries.iter().enumerate() {
            m.data[i * n + i] = e;
        }
        m
    }

    pub(crate) fn from_parts(rows: usize, cols: usize, re: &[f64], im: Option<&[f64]>) -> Self {
        let data = match im {
            Some(im) => re.iter().zip(im).map(|(&r, &i)| Complex64::new(r, i)).collect(),
            None => re.iter().map(|&r| Complex64::new(r, 0.0)).collect(),
        };
        Self { rows, cols, data }
    }

    pub(crate) fn split(&self) -> (Vec<f64>, Vec<f64>) {
        (self.data.iter().map(|z| z.re).collect(), self.data.iter().map(|z| z.im).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix, TensorError> {
        if self.cols != other.rows {
            return Err(TensorError::ShapeMismatch {
                op: "matmul",
                lhs: vec![self.rows, self.cols],
                rhs: vec![other.rows, other.cols],
            });
        }
        let (ar, ai) = self.split();
        let (br, bi) = other.split();
        let (re, im) = kernels::cmatmul(&ar, Some(&ai), &br, Some(&bi), self.rows, self.cols, other.cols);
        Ok(Self::from_parts(self.rows, other.cols, &re, im.as_deref()))
    }

    pub fn kron(&self, other: &CMatrix) -> CMatrix {
        let (ar, ai) = self.split();
        let (br, bi) = other.split();
        let (re, im) = kernels::kron(
            &ar,
            Some(&ai),
            (self.rows, self.cols),
            &br,
            Some(&bi),
            (other.rows, other.cols),
        );
        Self::from_parts(self.rows * other.rows, self.cols * other.cols, &re, im.as_deref())
    }

    pub fn adjoint(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i).conj())
    }

    pub fn transpose(&self) -> CMatrix {
        Self::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    pub fn add(&self, other: &CMatrix) -> Result<CMatrix, TensorError> {
        self.zip_with(other, "add", |a, b| a + b)
    }

    pub fn sub(&self, other: &CMatrix) -> Result<CMatrix, TensorError> {
        self.zip_with(other, "sub", |a, b| a - b)
    }

    fn zip_with(
        &self,
        other: &CMatrix,
        op: &'static str,
        f: impl Fn(Complex64, Complex64) -> Complex64,
    ) -> Result<CMatrix, TensorError> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(TensorError::ShapeMismatch {
                op,
                lhs: vec![self.rows, self.cols],
                rhs: vec![other.rows, other.cols],
            });
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(Self { rows: self.rows, cols: self.cols, data })
    }

    pub fn scale(&self, c: Complex64) -> CMatrix {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|&z| z * c).collect() }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Maximum absolute column sum.
    pub fn norm1(&self) -> f64 {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j).norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &CMatrix) -> f64 {
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| (i..self.cols).all(|j| (self.get(i, j) - self.get(j, i).conj()).norm() <= tol))
    }

    /// `‖U†U − I‖_F`.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.adjoint().matmul(self).expect("square by construction");
        p.sub(&CMatrix::identity(self.cols)).expect("same shape").frobenius_norm()
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    ///
    /// Fails with [`TensorError::Singular`] when a pivot vanishes or the
    /// 1-norm condition estimate exceeds [`MAX_CONDITION`].
    pub fn inverse(&self) -> Result<CMatrix, TensorError> {
        if !self.is_square() {
            return Err(TensorError::Contract {
                op: "inverse",
                detail: format!("matrix is {}x{}, not square", self.rows, self.cols),
            });
        }
        let n = self.rows;
        let mut a = self.data.clone();
        let mut inv = CMatrix::identity(n).data;
        let scale = self.norm1();
        if scale == 0.0 {
            return Err(TensorError::Singular { condition: f64::INFINITY });
        }
        for col in 0..n {
            let (pivot_row, pivot_abs) = (col..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if pivot_abs <= f64::EPSILON * scale * 1e-4 {
                return Err(TensorError::Singular { condition: f64::INFINITY });
            }
            if pivot_row != col {
                for j in 0..n {
                    a.swap(pivot_row * n + j, col * n + j);
                    inv.swap(pivot_row * n + j, col * n + j);
                }
            }
            let p = a[col * n + col].inv();
            for j in 0..n {
                a[col * n + j] *= p;
                inv[col * n + j] *= p;
            }
            for r in 0..n {
                if r == col {
                    continue;
                }
                let f = a[r * n + col];
                if f.norm() == 0.0 {
                    continue;
                }
                for j in 0..n {
                    let (av, iv) = (a[col * n + j], inv[col * n + j]);
                    a[r * n + j] -= f * av;
                    inv[r * n + j] -= f * iv;
                }
            }
        }
        let mut inv = CMatrix { rows: n, cols: n, data: inv };
        // one step of iterative refinement: X <- X + X (I - A X)
        let residual = CMatrix::identity(n).sub(&self.matmul(&inv)?)?;
        inv = inv.add(&inv.matmul(&residual)?)?;
        let condition = scale * inv.norm1();
        if !condition.is_finite() || condition > MAX_CONDITION {
            return Err(TensorError::Singular { condition });
        }
        Ok(inv)
    }
}
