use super::kernels;
use super::{Graph, Node, Op, TensorError};

/// Adjoint of one node: `∂L/∂Re` and, for complex nodes, `∂L/∂Im`.
type Grad = (Vec<f64>, Option<Vec<f64>>);

pub(crate) fn inputs(op: &Op) -> Vec<usize> {
    match op {
        Op::Leaf => vec![],
        Op::Add(a, b)
        | Op::Sub(a, b)
        | Op::Mul(a, b)
        | Op::ScaleBy(a, b)
        | Op::MatMul(a, b)
        | Op::AddRow(a, b)
        | Op::ScaleRows(a, b)
        | Op::FromParts(a, b)
        | Op::Kron(a, b) => vec![*a, *b],
        Op::AddScalar(a)
        | Op::Scale(a, _)
        | Op::CScale(a, _)
        | Op::Pow(a, _)
        | Op::Act(a, _)
        | Op::Transpose(a)
        | Op::Adjoint(a)
        | Op::Reshape(a)
        | Op::SumAll(a)
        | Op::SumAxis(a, _)
        | Op::GatherRows(a, _)
        | Op::ScatterAddRows(a, _)
        | Op::RowNorm(a)
        | Op::SoftmaxCrossEntropy(a, _)
        | Op::RealPart(a)
        | Op::ImagPart(a)
        | Op::Abs(a)
        | Op::Abs2(a)
        | Op::Inverse(a) => vec![*a],
        Op::Concat(ids, _) => ids.clone(),
    }
}

pub(crate) fn run(graph: &Graph, root: usize) -> Result<(), TensorError> {
    let mut tape = graph.tape.borrow_mut();
    {
        let node = &tape.nodes[root];
        if node.re.len() != 1 || node.im.is_some() {
            return Err(TensorError::Contract {
                op: "backward",
                detail: format!("loss must be a real scalar, got shape {:?}", node.shape),
            });
        }
    }
    let mut grads: Vec<Option<Grad>> = vec![None; root + 1];
    grads[root] = Some((vec![1.0], None));

    for id in (0..=root).rev() {
        let Some(g) = grads[id].take() else { continue };
        if !tape.nodes[id].requires_grad {
            continue;
        }
        if matches!(tape.nodes[id].op, Op::Leaf) {
            let node = &mut tape.nodes[id];
            accumulate_into(&mut node.grad_re, &g.0);
            if node.im.is_some() {
                let gi = g.1.unwrap_or_else(|| vec![0.0; g.0.len()]);
                accumulate_into(&mut node.grad_im, &gi);
            }
            continue;
        }
        for (input, contrib) in local_grads(&tape.nodes, id, &g) {
            let node = &tape.nodes[input];
            if !node.requires_grad {
                continue;
            }
            let contrib = if node.im.is_none() { (contrib.0, None) } else { contrib };
            match &mut grads[input] {
                slot @ None => *slot = Some(contrib),
                Some(acc) => {
                    kernels::add_assign(&mut acc.0, &contrib.0);
                    match (&mut acc.1, contrib.1) {
                        (Some(a), Some(c)) => kernels::add_assign(a, &c),
                        (a @ None, Some(c)) => *a = Some(c),
                        _ => {}
                    }
                }
            }
        }
    }
    Ok(())
}

fn accumulate_into(slot: &mut Option<Vec<f64>>, g: &[f64]) {
    match slot {
        Some(acc) => kernels::add_assign(acc, g),
        None => *slot = Some(g.to_vec()),
    }
}

fn dims(node: &Node) -> (usize, usize) {
    match node.shape.as_slice() {
        [r, c] => (*r, *c),
        _ => (node.re.len(), 1),
    }
}

fn neg(v: &[f64]) -> Vec<f64> {
    v.iter().map(|x| -x).collect()
}

fn map_grad(g: &Grad, f: impl Fn(&[f64]) -> Vec<f64>) -> Grad {
    (f(&g.0), g.1.as_deref().map(f))
}

/// Gradient contributions of node `id` to each of its inputs.
fn local_grads(nodes: &[Node], id: usize, g: &Grad) -> Vec<(usize, Grad)> {
    let node = &nodes[id];
    let gr = &g.0;
    let gi = g.1.as_deref();
    match &node.op {
        Op::Leaf => vec![],
        Op::Add(a, b) => vec![(*a, g.clone()), (*b, g.clone())],
        Op::Sub(a, b) => vec![(*a, g.clone()), (*b, map_grad(g, neg))],
        Op::Mul(a, b) => {
            let (x, y) = (&nodes[*a].re, &nodes[*b].re);
            vec![
                (*a, (gr.iter().zip(y).map(|(g, y)| g * y).collect(), None)),
                (*b, (gr.iter().zip(x).map(|(g, x)| g * x).collect(), None)),
            ]
        }
        Op::AddScalar(a) => vec![(*a, g.clone())],
        Op::Scale(a, c) => vec![(*a, map_grad(g, |v| v.iter().map(|x| x * c).collect()))],
        Op::ScaleBy(a, s) => {
            let sv = nodes[*s].re[0];
            let x = &nodes[*a];
            let mut ds: f64 = gr.iter().zip(&x.re).map(|(g, v)| g * v).sum();
            if let (Some(gi), Some(xi)) = (gi, &x.im) {
                ds += gi.iter().zip(xi).map(|(g, v)| g * v).sum::<f64>();
            }
            vec![(*a, map_grad(g, |v| v.iter().map(|x| x * sv).collect())), (*s, (vec![ds], None))]
        }
        Op::CScale(a, c) => {
            // conj(c) * G
            let zeros = vec![0.0; gr.len()];
            let gi = gi.unwrap_or(&zeros);
            let re = gr.iter().zip(gi).map(|(r, i)| c.re * r + c.im * i).collect();
            let im = gr.iter().zip(gi).map(|(r, i)| c.re * i - c.im * r).collect();
            vec![(*a, (re, Some(im)))]
        }
        Op::Pow(a, p) => {
            let x = &nodes[*a].re;
            vec![(*a, (gr.iter().zip(x).map(|(g, x)| g * p * x.powf(p - 1.0)).collect(), None))]
        }
        Op::Act(a, act) => {
            let x = &nodes[*a].re;
            vec![(*a, (gr.iter().zip(x).map(|(g, &x)| g * act.derivative(x)).collect(), None))]
        }
        Op::MatMul(a, b) => {
            let (na, nb) = (&nodes[*a], &nodes[*b]);
            let (m, k) = dims(na);
            let n = dims(nb).1;
            // dA = G B^H, dB = A^H G
            let (bhr, bhi) = kernels::adjoint(&nb.re, nb.im.as_deref(), k, n);
            let ga = kernels::cmatmul(gr, gi, &bhr, bhi.as_deref(), m, n, k);
            let (ahr, ahi) = kernels::adjoint(&na.re, na.im.as_deref(), m, k);
            let gb = kernels::cmatmul(&ahr, ahi.as_deref(), gr, gi, k, m, n);
            vec![(*a, ga), (*b, gb)]
        }
        Op::Transpose(a) => {
            let (m, n) = dims(&nodes[*a]);
            vec![(*a, map_grad(g, |v| kernels::transpose(v, n, m)))]
        }
        Op::Adjoint(a) => {
            let (m, n) = dims(&nodes[*a]);
            vec![(*a, kernels::adjoint(gr, gi, n, m))]
        }
        Op::Reshape(a) => vec![(*a, g.clone())],
        Op::SumAll(a) => {
            let len = nodes[*a].re.len();
            vec![(*a, map_grad(g, |v| vec![v[0]; len]))]
        }
        Op::SumAxis(a, axis) => {
            let (m, n) = dims(&nodes[*a]);
            let out: Vec<f64> = if *axis == 0 { (0..m * n).map(|k| gr[k % n]).collect() } else { (0..m * n).map(|k| gr[k / n]).collect() };
            vec![(*a, (out, None))]
        }
        Op::Concat(ids, axis) => {
            let (_, total_cols) = dims(node);
            let mut out = Vec::with_capacity(ids.len());
            let mut offset = 0;
            for &i in ids {
                let (r, c) = dims(&nodes[i]);
                let take = |v: &[f64]| -> Vec<f64> {
                    if *axis == 0 {
                        v[offset * c..(offset + r) * c].to_vec()
                    } else {
                        (0..r).flat_map(|row| v[row * total_cols + offset..row * total_cols + offset + c].iter().copied()).collect()
                    }
                };
                out.push((i, map_grad(g, take)));
                offset += if *axis == 0 { r } else { c };
            }
            out
        }
        Op::GatherRows(a, idx) => {
            let (m, n) = dims(&nodes[*a]);
            let spread = |v: &[f64]| {
                let mut out = vec![0.0; m * n];
                for (k, &r) in idx.iter().enumerate() {
                    kernels::add_assign(&mut out[r * n..(r + 1) * n], &v[k * n..(k + 1) * n]);
                }
                out
            };
            vec![(*a, map_grad(g, spread))]
        }
        Op::ScatterAddRows(a, idx) => {
            let n = dims(&nodes[*a]).1;
            let pick = |v: &[f64]| idx.iter().flat_map(|&r| v[r * n..(r + 1) * n].iter().copied()).collect::<Vec<f64>>();
            vec![(*a, map_grad(g, pick))]
        }
        Op::AddRow(a, row) => {
            let (m, n) = dims(&nodes[*a]);
            let colsum = |v: &[f64]| {
                let mut out = vec![0.0; n];
                for r in 0..m {
                    kernels::add_assign(&mut out, &v[r * n..(r + 1) * n]);
                }
                out
            };
            vec![(*a, g.clone()), (*row, map_grad(g, colsum))]
        }
        Op::ScaleRows(a, col) => {
            let (m, n) = dims(&nodes[*a]);
            let (x, c) = (&nodes[*a].re, &nodes[*col].re);
            let ga = (0..m * n).map(|k| gr[k] * c[k / n]).collect();
            let gc = (0..m).map(|r| (0..n).map(|j| gr[r * n + j] * x[r * n + j]).sum()).collect();
            vec![(*a, (ga, None)), (*col, (gc, None))]
        }
        Op::RowNorm(a) => {
            let (m, n) = dims(&nodes[*a]);
            let x = &nodes[*a].re;
            let norms = &node.re;
            let ga = (0..m * n)
                .map(|k| {
                    let r = k / n;
                    if norms[r] > 0.0 {
                        gr[r] * x[k] / norms[r]
                    } else {
                        0.0
                    }
                })
                .collect();
            vec![(*a, (ga, None))]
        }
        Op::SoftmaxCrossEntropy(a, labels) => {
            let (b, c) = dims(&nodes[*a]);
            let x = &nodes[*a].re;
            let scale = gr[0] / b as f64;
            let mut out = vec![0.0; b * c];
            for (r, &y) in labels.iter().enumerate() {
                let row = &x[r * c..(r + 1) * c];
                let mx = row.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let z: f64 = row.iter().map(|v| (v - mx).exp()).sum();
                for j in 0..c {
                    let p = (row[j] - mx).exp() / z;
                    out[r * c + j] = scale * (p - if j == y { 1.0 } else { 0.0 });
                }
            }
            vec![(*a, (out, None))]
        }
        Op::FromParts(re, im) => {
            let gi = gi.map(|v| v.to_vec()).unwrap_or_else(|| vec![0.0; gr.len()]);
            vec![(*re, (gr.clone(), None)), (*im, (gi, None))]
        }
        Op::RealPart(a) => vec![(*a, (gr.clone(), Some(vec![0.0; gr.len()])))],
        Op::ImagPart(a) => vec![(*a, (vec![0.0; gr.len()], Some(gr.clone())))],
        Op::Abs(a) => {
            let x = &nodes[*a];
            let xi = x.im.clone().unwrap_or_else(|| vec![0.0; x.re.len()]);
            let modulus = &node.re;
            let unit = |k: usize, part: f64| if modulus[k] > 0.0 { gr[k] * part / modulus[k] } else { 0.0 };
            let re = (0..gr.len()).map(|k| unit(k, x.re[k])).collect();
            let im = (0..gr.len()).map(|k| unit(k, xi[k])).collect();
            vec![(*a, (re, Some(im)))]
        }
        Op::Abs2(a) => {
            let x = &nodes[*a];
            let xi = x.im.clone().unwrap_or_else(|| vec![0.0; x.re.len()]);
            let re = gr.iter().zip(&x.re).map(|(g, v)| 2.0 * g * v).collect();
            let im = gr.iter().zip(&xi).map(|(g, v)| 2.0 * g * v).collect();
            vec![(*a, (re, Some(im)))]
        }
        Op::Kron(a, b) => {
            let (na, nb) = (&nodes[*a], &nodes[*b]);
            let (ra, ca) = dims(na);
            let (rb, cb) = dims(nb);
            let cols = ca * cb;
            let zeros_g = vec![0.0; gr.len()];
            let gi = gi.unwrap_or(&zeros_g);
            let part = |n: &Node, k: usize| (n.re[k], n.im.as_ref().map_or(0.0, |v| v[k]));
            // dA[i1,j1] = Σ conj(B[i2,j2]) G[...], dB likewise with conj(A).
            let mut ga = (vec![0.0; ra * ca], vec![0.0; ra * ca]);
            let mut gb = (vec![0.0; rb * cb], vec![0.0; rb * cb]);
            for i1 in 0..ra {
                for j1 in 0..ca {
                    let (xr, xi) = part(na, i1 * ca + j1);
                    for i2 in 0..rb {
                        for j2 in 0..cb {
                            let (yr, yi) = part(nb, i2 * cb + j2);
                            let idx = (i1 * rb + i2) * cols + j1 * cb + j2;
                            let (g_r, g_i) = (gr[idx], gi[idx]);
                            ga.0[i1 * ca + j1] += yr * g_r + yi * g_i;
                            ga.1[i1 * ca + j1] += yr * g_i - yi * g_r;
                            gb.0[i2 * cb + j2] += xr * g_r + xi * g_i;
                            gb.1[i2 * cb + j2] += xr * g_i - xi * g_r;
                        }
                    }
                }
            }
            vec![(*a, (ga.0, Some(ga.1))), (*b, (gb.0, Some(gb.1)))]
        }
        Op::Inverse(a) => {
            // dA = -B^H G B^H with B = A^{-1}
            let (n, _) = dims(node);
            let (bhr, bhi) = kernels::adjoint(&node.re, node.im.as_deref(), n, n);
            let (tr, ti) = kernels::cmatmul(&bhr, bhi.as_deref(), gr, gi, n, n, n);
            let (rr, ri) = kernels::cmatmul(&tr, ti.as_deref(), &bhr, bhi.as_deref(), n, n, n);
            vec![(*a, (neg(&rr), ri.as_deref().map(neg)))]
        }
    }
}
