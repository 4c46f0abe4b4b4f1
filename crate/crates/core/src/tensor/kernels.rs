//! Dense row-major kernels shared by the tape ops and `CMatrix`.
//!
//! Complex buffers are passed as split real/imaginary slices. A missing
//! imaginary part means the operand is real.

pub(crate) fn matmul(a: &[f64], b: &[f64], m: usize, k: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        let row = &mut out[i * n..(i + 1) * n];
        for p in 0..k {
            let aip = a[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let brow = &b[p * n..(p + 1) * n];
            for (o, &bv) in row.iter_mut().zip(brow) {
                *o += aip * bv;
            }
        }
    }
    out
}

/// Complex product. Returns `None` for the imaginary part when both operands
/// are real.
pub(crate) fn cmatmul(
    ar: &[f64],
    ai: Option<&[f64]>,
    br: &[f64],
    bi: Option<&[f64]>,
    m: usize,
    k: usize,
    n: usize,
) -> (Vec<f64>, Option<Vec<f64>>) {
    let mut re = matmul(ar, br, m, k, n);
    match (ai, bi) {
        (None, None) => (re, None),
        (Some(ai), None) => (re, Some(matmul(ai, br, m, k, n))),
        (None, Some(bi)) => (re, Some(matmul(ar, bi, m, k, n))),
        (Some(ai), Some(bi)) => {
            let t = matmul(ai, bi, m, k, n);
            for (r, t) in re.iter_mut().zip(&t) {
                *r -= t;
            }
            let mut im = matmul(ar, bi, m, k, n);
            let u = matmul(ai, br, m, k, n);
            for (v, u) in im.iter_mut().zip(&u) {
                *v += u;
            }
            (re, Some(im))
        }
    }
}

pub(crate) fn transpose(a: &[f64], m: usize, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for j in 0..n {
            out[j * m + i] = a[i * n + j];
        }
    }
    out
}

/// Conjugate transpose of a split complex `m x n` matrix.
pub(crate) fn adjoint(re: &[f64], im: Option<&[f64]>, m: usize, n: usize) -> (Vec<f64>, Option<Vec<f64>>) {
    let tr = transpose(re, m, n);
    let ti = im.map(|im| {
        let mut t = transpose(im, m, n);
        t.iter_mut().for_each(|v| *v = -*v);
        t
    });
    (tr, ti)
}

/// Kronecker product of `ra x ca` and `rb x cb` complex matrices.
#[allow(clippy::too_many_arguments)]
pub(crate) fn kron(
    ar: &[f64],
    ai: Option<&[f64]>,
    (ra, ca): (usize, usize),
    br: &[f64],
    bi: Option<&[f64]>,
    (rb, cb): (usize, usize),
) -> (Vec<f64>, Option<Vec<f64>>) {
    let rows = ra * rb;
    let cols = ca * cb;
    let complex = ai.is_some() || bi.is_some();
    let mut re = vec![0.0; rows * cols];
    let mut im = if complex { Some(vec![0.0; rows * cols]) } else { None };
    for i1 in 0..ra {
        for j1 in 0..ca {
            let xr = ar[i1 * ca + j1];
            let xi = ai.map_or(0.0, |v| v[i1 * ca + j1]);
            for i2 in 0..rb {
                for j2 in 0..cb {
                    let yr = br[i2 * cb + j2];
                    let yi = bi.map_or(0.0, |v| v[i2 * cb + j2]);
                    let idx = (i1 * rb + i2) * cols + j1 * cb + j2;
                    re[idx] = xr * yr - xi * yi;
                    if let Some(im) = im.as_mut() {
                        im[idx] = xr * yi + xi * yr;
                    }
                }
            }
        }
    }
    (re, im)
}

pub(crate) fn add_assign(dst: &mut [f64], src: &[f64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d += s;
    }
}
