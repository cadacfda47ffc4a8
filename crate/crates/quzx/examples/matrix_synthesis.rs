//! Synthesizes diagrams for two matrices and composes them.

use quzx::io::Matrix;
use quzx::normal_form::matrix_normal_form;
use quzx::tensor::max_deviation;
use quzx::{interpret, C64};

fn main() -> quzx::Result<()> {
    let c = |re: f64, im: f64| C64::new(re, im);
    // M is 2x3 and N is 3x2; neither side is a power of a qudit dimension.
    let m = Matrix::new(2, 3, vec![c(1., 0.), c(0., 1.), c(2., 0.), c(0., 0.), c(-1., 0.), c(0.5, 0.5)])?;
    let n = Matrix::new(3, 2, vec![c(1., 0.), c(1., 0.), c(0., -1.), c(0., 0.), c(3., 0.), c(-2., 0.)])?;

    let md = matrix_normal_form(&m)?;
    println!("M: {} nodes, {} edges, inputs {:?}, outputs {:?}", md.node_count(), md.edge_count(), md.inputs(), md.outputs());
    let err = max_deviation(&interpret(&md)?, &m.to_tensor()).unwrap();
    println!("M round trip deviation {err:.1e}");

    let mut prod = Vec::new();
    for i in 0..2 {
        for k in 0..2 {
            prod.push((0..3).map(|j| m.get(i, j) * n.get(j, k)).sum());
        }
    }
    let mn = Matrix::new(2, 2, prod)?;
    let composed = matrix_normal_form(&n)?.compose_seq(&md)?;
    let got = interpret(&composed)?;
    println!("M.N by composition:");
    for i in 0..2 {
        println!("  {:.3}  {:.3}", got.data[2 * i], got.data[2 * i + 1]);
    }
    println!("deviation from M.N {:.1e}", max_deviation(&got, &mn.to_tensor()).unwrap());
    Ok(())
}
