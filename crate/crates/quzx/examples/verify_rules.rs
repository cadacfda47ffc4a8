//! Checks the rule catalog and the lemma suite, then prints the tables.
//!
//! `cargo run --example verify_rules -- 2 3 4 5`

use quzx::rules::{verify_all, verify_lemmas};

fn main() {
    let mut ds: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    if ds.is_empty() {
        ds = vec![2, 3];
    }
    let rules = verify_all(&ds, 7, 3);
    print!("{}", rules.to_table());
    let lemmas = verify_lemmas(&ds, 7, 3);
    print!("{}", lemmas.to_table());
    if !(rules.all_passed() && lemmas.all_passed()) {
        std::process::exit(1);
    }
}
