//! Dimension binders and splitters: a qubit and a qutrit as one 6-dim wire.

use quzx::tensor::approx_eq;
use quzx::{interpret, Diagram};

fn main() -> quzx::Result<()> {
    let (s, t) = (2, 3);
    let bind = Diagram::binder(s, t)?;
    let split = Diagram::splitter(s, t)?;

    let b = interpret(&bind)?;
    for k in 0..s {
        for l in 0..t {
            let target = (0..s * t).find(|&o| b.get(&[o, k, l]).re == 1.0).unwrap();
            println!("|{k}>|{l}> -> |{target}>");
        }
    }
    let round = interpret(&split.compose_seq(&bind)?)?;
    println!("binder after splitter is the 6-dim identity: {}", approx_eq(&round, &interpret(&Diagram::identity(&[s * t]))?, 1e-12));
    let other = interpret(&bind.compose_seq(&split)?)?;
    println!("splitter after binder is I_2 (x) I_3: {}", approx_eq(&other, &interpret(&Diagram::identity(&[s, t]))?, 1e-12));

    // A 6-dim H between the two conversions acts on the pair as one system.
    let mixed = bind.compose_seq(&Diagram::h(s * t)?)?.compose_seq(&split)?;
    println!("binder . H_6 . splitter axes {:?}", interpret(&mixed)?.axis_dims);
    Ok(())
}
