//! Prints the tensors of the single generators at d = 3.

use quzx::eval::interpret_kind;
use quzx::{DenseTensor, GeneratorKind, PhaseVector};

fn show(name: &str, t: &DenseTensor) {
    let (rows, cols) = t.matrix_shape(1.min(t.rank()));
    println!("{name}  axes {:?}", t.axis_dims);
    for r in 0..rows {
        let row: Vec<String> = (0..cols)
            .map(|c| {
                let z = t.data[r * cols + c];
                format!("{:>6.3}{:+.3}i", z.re, z.im)
            })
            .collect();
        println!("  {}", row.join("  "));
    }
}

fn main() -> quzx::Result<()> {
    let d = 3;
    let kinds = [
        ("Z(K_1) 1->1", GeneratorKind::z(PhaseVector::k(d, 1)), 1, 1),
        ("X_1 1->1", GeneratorKind::x(1), 1, 1),
        ("X_2 0->1", GeneratorKind::x(2), 0, 1),
        ("H", GeneratorKind::H, 1, 1),
        ("H dagger", GeneratorKind::HDagger, 1, 1),
        ("triangle", GeneratorKind::Triangle, 1, 1),
        ("triangle inverse", GeneratorKind::TriangleInv, 1, 1),
        ("W 1->2", GeneratorKind::WSpider, 1, 2),
    ];
    for (name, kind, n_in, n_out) in kinds {
        show(name, &interpret_kind(&kind, d, n_in, n_out)?);
    }
    // Qufinite: the binder takes a 2-wire and a 3-wire to a 6-wire.
    show("binder(2,3)", &interpret_kind(&GeneratorKind::DimBinder { s: 2, t: 3 }, 6, 2, 1)?);
    Ok(())
}
