//! Hierarchy elimination: the clocked thermostat collapses to three flat
//! locations, with the clock initialization folded into the entering reset.
//!
//! Run with `cargo run --example flatten_hierarchy`.

use hcif::flatten::eliminate;
use hcif::model::Composition;
use hcif::printer::print;
use hcif::syntax::{parse, ModelFile};
use hcif::models;

fn main() {
    let file = parse(models::THERMOSTAT_HIER).expect("bundled model parses");

    println!("== hierarchical source ==");
    println!("{}", print(&file));

    let flat = eliminate(&file.comp).expect("well-founded model");
    let flat_file = ModelFile { decls: file.decls, comp: Composition::Atomic(flat) };

    println!("== eliminated ==");
    println!("{}", print(&flat_file));
}
