//! Builds both normal forms of a two-qutrit vector and reads them back.

use quzx::normal_form::{count_row_additions, digits_of, vector_normal_form, w_normal_form};
use quzx::{interpret, C64};

fn main() -> quzx::Result<()> {
    let (d, m) = (3, 2);
    let v: Vec<C64> = (0..9).map(|k| C64::new(k as f64 - 4.0, (k % 3) as f64 * 0.5)).collect();

    let rows = vector_normal_form(&v, d, m)?;
    let w = w_normal_form(&v, d, m)?;
    println!("row-addition form: {} nodes, {} row additions", rows.node_count(), count_row_additions(&rows));
    println!("W form: {} nodes", w.node_count());

    let (a, b) = (interpret(&rows)?, interpret(&w)?);
    for (k, want) in v.iter().enumerate() {
        let digits = digits_of(k, d, m)?.digits;
        println!(
            "  |{digits:?}>  want {want:.2}  rows {:.2}  W {:.2}",
            a.data[k], b.data[k]
        );
    }
    Ok(())
}
