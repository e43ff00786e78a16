//! Eager choice: entering a substructure immediately picks an initial
//! location consistent with the post-reset valuation, so the branch guarded
//! by the stale value is never taken.
//!
//! Run with `cargo run --example eager_choice`.

use hcif::sos::{explore, Semantics};
use hcif::{models, DEFAULT_DELTA, DEFAULT_DURATIONS};

fn main() {
    let (decls, comp) = models::eager_choice();
    let sem = Semantics::new(&decls);
    let sigma0 = decls.zero_valuation();

    let ex = explore(&sem, &comp, &sigma0, &DEFAULT_DURATIONS, DEFAULT_DELTA, 500)
        .expect("exploration runs");
    println!(
        "explored {} states, action labels seen: {:?}",
        ex.states.len(),
        ex.action_labels()
    );

    let mut state = (comp, sigma0);
    loop {
        let actions = sem.action_successors(&state.0, &state.1).expect("well-formed");
        if actions.is_empty() {
            println!("no further actions from {}", state.0.tree_label());
            break;
        }
        println!(
            "from {:<28} offered: {:?}",
            state.0.tree_label(),
            actions.iter().map(|a| a.action.as_str()).collect::<Vec<_>>()
        );
        state = (actions[0].target.clone(), actions[0].valuation.clone());
    }
    println!("the c branch (initial predicate x = 0) is unreachable: a sets x to 1");
}
