//! Seeded random hierarchical models: print/parse round trips and the
//! equivalence of each model with its elimination.
//!
//! Run with `cargo run --example random_models`.

use hcif::bisim::{bounded_bisim, GameConfig};
use hcif::flatten::eliminate;
use hcif::generate::ModelGen;
use hcif::loader::{augment_entry_resets, initial_valuation};
use hcif::model::Composition;
use hcif::printer::print;
use hcif::syntax::parse;

fn main() {
    for seed in 0..5u64 {
        let mut gen = ModelGen::new(seed);
        let file = gen.hierarchical_model();
        let decls = file.declarations();

        let printed = print(&file);
        assert_eq!(parse(&printed).expect("round trip parses"), file);

        let flat = Composition::Atomic(eliminate(&file.comp).expect("well-founded"));
        let augmented = augment_entry_resets(&file);
        let sigma0 = initial_valuation(&file, &decls);
        let cfg = GameConfig::new(5, vec![sigma0]);
        let verdict =
            bounded_bisim(&decls, &augmented.comp, &flat, &cfg).expect("game runs");

        let locations = match &flat {
            Composition::Atomic(a) => a.locations.len(),
            _ => unreachable!(),
        };
        println!(
            "seed {}: round trip ok, flattening has {} locations, {}",
            seed, locations, verdict
        );
    }
}
