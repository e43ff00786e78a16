//! Graphviz export of a hierarchical model, one cluster per level.
//!
//! Run with `cargo run --example export_dot | dot -Tsvg > thermostat.svg`.

use hcif::dot::export_dot;
use hcif::syntax::parse;
use hcif::models;

fn main() {
    let file = parse(models::THERMOSTAT_HIER).expect("bundled model parses");
    print!("{}", export_dot(&file));
}
