//! Fit a tiny logistic model with the tape autodiff and compare one gradient
//! with a finite difference.

use qjet::tensor::{Activation, Graph, Tensor, TensorError};

const X: [f64; 8] = [0.1, 0.9, 0.8, 0.2, 0.7, 0.6, 0.3, 0.1];
const LABELS: [usize; 4] = [1, 0, 0, 1];

fn loss(g: &Graph, w: &[f64], b: &[f64]) -> Result<(Tensor, Tensor, Tensor), TensorError> {
    let x = g.constant(&[4, 2], X.to_vec())?;
    let w = g.param(&[2, 2], w.to_vec())?;
    let b = g.param(&[1, 2], b.to_vec())?;
    let logits = x.matmul(&w)?.activate(Activation::Tanh).scale(3.0).add_row(&b)?;
    Ok((logits.softmax_cross_entropy(&LABELS)?, w, b))
}

fn main() -> Result<(), TensorError> {
    let mut w = vec![0.3, -0.2, 0.1, 0.4];
    let mut b = vec![0.0, 0.0];

    for step in 0..50 {
        let g = Graph::new();
        let (l, wt, bt) = loss(&g, &w, &b)?;
        l.backward()?;
        let (gw, gb) = (wt.grad().unwrap(), bt.grad().unwrap());
        if step % 10 == 0 {
            println!("step {step:>2}  loss {:.5}", l.item());
        }
        for (p, d) in w.iter_mut().zip(&gw) {
            *p -= 0.5 * d;
        }
        for (p, d) in b.iter_mut().zip(&gb) {
            *p -= 0.5 * d;
        }
    }

    // d loss / d w[0,0], both ways
    let g = Graph::new();
    let (l, wt, _) = loss(&g, &w, &b)?;
    l.backward()?;
    let h = 1e-6;
    let at = |delta: f64| {
        let mut v = w.clone();
        v[0] += delta;
        loss(&Graph::new(), &v, &b).map(|(l, _, _)| l.item())
    };
    let fd = (at(h)? - at(-h)?) / (2.0 * h);
    println!("final loss {:.5}", l.item());
    println!("dL/dw00 autodiff {:.10e}  finite difference {:.10e}", wt.grad().unwrap()[0], fd);
    Ok(())
}
