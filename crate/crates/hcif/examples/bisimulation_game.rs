//! Bounded stateless-bisimulation games: the hierarchical thermostat against
//! its flattening, then against a mutated flattening with the distinguishing
//! trace replayed.
//!
//! Run with `cargo run --example bisimulation_game`.

use hcif::bisim::{bounded_bisim, replay, GameConfig, Verdict};
use hcif::flatten::eliminate;
use hcif::loader::{augment_entry_resets, initial_valuation};
use hcif::model::Composition;
use hcif::syntax::parse;
use hcif::models;

fn main() {
    let file = parse(models::THERMOSTAT_HIER).expect("bundled model parses");
    let decls = file.declarations();
    let hier = augment_entry_resets(&file).comp;
    let flat = Composition::Atomic(eliminate(&file.comp).expect("well-founded"));
    let sigma0 = initial_valuation(&file, &decls);

    let cfg = GameConfig::new(6, vec![sigma0]);

    let verdict = bounded_bisim(&decls, &hier, &flat, &cfg).expect("game runs");
    println!("hierarchical vs flattened: {}", verdict);

    // Delete the done edge from the flat model and play again.
    let mutated = match &flat {
        Composition::Atomic(a) => {
            let mut m = a.clone();
            m.edges.retain(|e| e.action != "done");
            Composition::Atomic(m)
        }
        _ => unreachable!(),
    };
    let verdict = bounded_bisim(&decls, &hier, &mutated, &cfg).expect("game runs");
    println!("\nhierarchical vs mutated (done edge removed): ");
    match verdict {
        Verdict::Distinguished(trace) => {
            println!("{}", Verdict::Distinguished(trace.clone()));
            let ok = replay(&decls, &hier, &mutated, &trace, &cfg).expect("replay runs");
            println!("trace replays deterministically: {}", ok);
        }
        Verdict::EquivalentUpToBound => println!("unexpectedly equivalent"),
    }
}
