//! Writes a diagram and its tensor as JSON and parses them back.

use quzx::io::{diagram_from_json, diagram_to_json, tensor_from_json, tensor_to_json};
use quzx::{interpret, Diagram, PhaseVector};

fn main() -> quzx::Result<()> {
    let d = 3;
    let dg = Diagram::z(PhaseVector::k(d, 1), 1, 2)?.compose_seq(&Diagram::h(d)?.compose_par(&Diagram::triangle(d)?))?;
    let text = diagram_to_json(&dg);
    println!("{text}");
    let back = diagram_from_json(&text)?;
    println!("diagram round trip identical: {}", back == dg);

    let t = interpret(&dg)?;
    let dump = tensor_to_json(&t);
    println!("tensor dump is {} bytes, round trip identical: {}", dump.len(), tensor_from_json(&dump)? == t);

    match diagram_from_json("{\"version\": \"1\", \"nodes\": [{\"id\": 0, \"kind\": \"q\"}]}") {
        Err(e) => println!("bad input rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
