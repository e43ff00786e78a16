//! Parallel composition: synchronized handover between a producer and a
//! consumer, the interleaving of non-synchronized actions, and the product
//! automaton that eliminates the parallel operator.
//!
//! Run with `cargo run --example parallel_composition`.

use hcif::bisim::{bounded_bisim, GameConfig};
use hcif::flatten::eliminate;
use hcif::loader::initial_valuation;
use hcif::model::Composition;
use hcif::sos::{explore, Semantics};
use hcif::syntax::parse;
use hcif::{models, DEFAULT_DELTA};

fn main() {
    let file = parse(models::HANDOVER).expect("bundled model parses");
    let decls = file.declarations();
    let sigma0 = initial_valuation(&file, &decls);
    let sem = Semantics::new(&decls);

    let ex = explore(&sem, &file.comp, &sigma0, &[0.5, 1.0], DEFAULT_DELTA, 300)
        .expect("exploration runs");
    println!(
        "explored {} states; actions seen: {:?}",
        ex.states.len(),
        ex.action_labels()
    );
    println!("(hand fires only when both sides offer it; rest interleaves freely)");

    // The parallel operator can itself be eliminated: the product automaton
    // is stateless-bisimilar to the composition.
    let product = Composition::Atomic(eliminate(&file.comp).expect("well-founded"));
    println!(
        "\nproduct automaton has {} locations",
        match &product {
            Composition::Atomic(a) => a.locations.len(),
            _ => unreachable!(),
        }
    );
    let cfg = GameConfig {
        depth: 5,
        durations: vec![0.5, 1.0],
        delta: DEFAULT_DELTA,
        initial_valuations: vec![sigma0],
        tolerance: 1e-9,
    };
    let verdict = bounded_bisim(&decls, &file.comp, &product, &cfg).expect("game runs");
    println!("composition vs product: {}", verdict);
}
