use num_complex::Complex64;

use super::{ComplexTensor, Tensor, TensorError};

/// Entrywise tolerance (relative to the largest entry, floor 1) for the
/// Hermitian precondition of [`ComplexTensor::expm_minus_i`].
pub const EXPM_HERMITIAN_TOL: f64 = 1e-10;

/// Squaring brings the 1-norm of the exponent below this.
const SCALED_NORM: f64 = 0.5;
const TRUNCATION_TOL: f64 = 1e-12;

/// Smallest Taylor order whose remainder bound `r^(m+1)/(m+1)! · e^r` at
/// `r = 0.5` is below `1e-12`.
pub fn taylor_order() -> usize {
    let mut term = SCALED_NORM; // r^(m+1)/(m+1)! for m = 0
    let mut m = 0;
    while term * SCALED_NORM.exp() >= TRUNCATION_TOL {
        m += 1;
        term *= SCALED_NORM / (m + 1) as f64;
    }
    m
}

impl ComplexTensor {
    /// `exp(−i · scale · self)` for a Hermitian matrix.
    ///
    /// Evaluated by scaling and squaring over a Horner-form Taylor polynomial,
    /// entirely out of tape ops, so gradients reach both `scale` and the
    /// matrix entries. The number of squarings is picked from the current
    /// value of `‖scale · self‖₁` and is treated as a constant.
    pub fn expm_minus_i(&self, scale: &Tensor) -> Result<ComplexTensor, TensorError> {
        let h = self.to_matrix();
        if self.shape().len() != 2 || !h.is_square() {
            return Err(TensorError::Rank { op: "expm_minus_i", expected: 2, shape: self.shape() });
        }
        let biggest = h.data().iter().map(|z| z.norm()).fold(1.0, f64::max);
        if !h.is_hermitian(EXPM_HERMITIAN_TOL * biggest) {
            return Err(TensorError::Contract { op: "expm_minus_i", detail: "input is not Hermitian".into() });
        }
        if scale.numel() != 1 {
            return Err(TensorError::Contract {
                op: "expm_minus_i",
                detail: format!("scale must have one element, got shape {:?}", scale.shape()),
            });
        }
        let n = h.rows();
        let norm = h.norm1() * scale.item().abs();
        let squarings = if norm <= SCALED_NORM { 0 } else { (norm / SCALED_NORM).log2().ceil() as i32 };
        let shrink = 0.5f64.powi(squarings);

        let x = self.scale_by(scale)?.scale(Complex64::new(0.0, -shrink));
        let identity = self.graph().identity(n);
        let order = taylor_order();
        let mut acc = identity.add(&x.scale(Complex64::new(1.0 / order as f64, 0.0)))?;
        for k in (1..order).rev() {
            acc = identity.add(&x.matmul(&acc)?.scale(Complex64::new(1.0 / k as f64, 0.0)))?;
        }
        for _ in 0..squarings {
            acc = acc.matmul(&acc)?;
        }
        Ok(acc)
    }
}
