//! Sequential and parallel composition, transpose and adjoint.

use quzx::tensor::approx_eq;
use quzx::{interpret, Diagram, C64};

fn main() -> quzx::Result<()> {
    let d = 4;
    let h = Diagram::h(d)?;
    let hh = h.compose_seq(&Diagram::h_dagger(d)?)?;
    let scaled_id = Diagram::identity(&[d]).with_scalar(C64::new(d as f64, 0.0));
    println!("H then H dagger equals d * I: {}", approx_eq(&interpret(&hh)?, &interpret(&scaled_id)?, 1e-12));

    let t = Diagram::triangle(3)?;
    let tt = interpret(&t.transpose())?;
    println!("triangle transpose at d = 3:");
    for r in 0..3 {
        let row: Vec<f64> = (0..3).map(|c| tt.data[r * 3 + c].re).collect();
        println!("  {row:?}");
    }

    let pair = h.compose_par(&Diagram::triangle(d)?);
    println!("H (x) triangle has axes {:?}", interpret(&pair)?.axis_dims);
    let back = pair.adjoint().adjoint();
    println!("adjoint is an involution: {}", approx_eq(&interpret(&back)?, &interpret(&pair)?, 1e-12));
    Ok(())
}
