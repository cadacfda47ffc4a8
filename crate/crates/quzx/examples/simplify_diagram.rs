//! Runs the core rewrite rules on a small diagram and replays the trace.

use quzx::io::diagram_to_json;
use quzx::rewrite::{replay, simplify};
use quzx::tensor::approx_eq;
use quzx::{interpret, Diagram, PhaseVector, C64};

fn main() -> quzx::Result<()> {
    let d = 3;
    let a = PhaseVector::new(vec![C64::new(2.0, 0.0), C64::new(0.0, 1.0)]);
    let b = PhaseVector::new(vec![C64::new(1.0, 0.0), C64::new(-1.0, 0.0)]);
    // Z(a) . H . H' . Z(b) . X_1 . X_2, next to a closed s-gadget worth 1/d.
    let dg = Diagram::z(a, 1, 1)?
        .compose_seq(&Diagram::h(d)?)?
        .compose_seq(&Diagram::h_dagger(d)?)?
        .compose_seq(&Diagram::z(b, 1, 1)?)?
        .compose_seq(&Diagram::x(d, 1, 1, 1)?)?
        .compose_seq(&Diagram::x(d, 2, 1, 1)?)?
        .compose_par(&Diagram::z(PhaseVector::s(d), 0, 0)?);

    let (s, trace) = simplify(&dg, 1000)?;
    println!("{} nodes, {} edges before", dg.node_count(), dg.edge_count());
    for step in &trace.steps {
        println!("  {:<20} on {:?}  scalar {:.4}", step.rule.name(), step.matched, step.scalar);
    }
    println!("{} nodes, {} edges after, scalar {:.4}", s.node_count(), s.edge_count(), s.scalar());
    println!("same interpretation: {}", approx_eq(&interpret(&dg)?, &interpret(&s)?, 1e-9));
    let again = replay(&dg, &trace.steps)?;
    println!("replay is byte-exact: {}", diagram_to_json(&again) == diagram_to_json(&s));
    Ok(())
}
