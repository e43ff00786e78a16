//! Random simulation of the hierarchical thermostat.
//!
//! Run with `cargo run --example simulate_thermostat`.

use hcif::loader::initial_valuation;
use hcif::sos::{Semantics, TransitionLabel};
use hcif::syntax::parse;
use hcif::trace::TraceRecord;
use hcif::{models, DEFAULT_DELTA, DEFAULT_DURATIONS};

use rand::Rng;
use rand::SeedableRng;

fn main() {
    let file = parse(models::THERMOSTAT_HIER).expect("bundled model parses");
    let decls = file.declarations();
    let file = hcif::augment_entry_resets(&file);
    let sigma0 = initial_valuation(&file, &decls);

    let sem = Semantics::new(&decls);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
    let mut state = (file.comp.clone(), sigma0);

    println!("# one JSON record per step; `tree` is the active-location tree");
    for step in 0..16 {
        let successors = sem
            .successors(&state.0, &state.1, &DEFAULT_DURATIONS, DEFAULT_DELTA)
            .expect("well-formed model");
        if successors.is_empty() {
            eprintln!("deadlock after {} steps", step);
            break;
        }
        let tr = &successors[rng.gen_range(0..successors.len())];
        let record =
            TraceRecord::new(step, &tr.label, &state.1, &tr.target.1, tr.target.0.tree_label());
        // Time records carry full trajectories; summarize them here.
        match &tr.label {
            TransitionLabel::Time(bundle) => println!(
                "{{\"step\":{},\"kind\":\"time\",\"duration\":{},\"tree\":\"{}\"}}",
                step,
                bundle.duration(),
                tr.target.0.tree_label()
            ),
            _ => println!("{}", record.to_json_line()),
        }
        state = tr.target.clone();
    }
}
