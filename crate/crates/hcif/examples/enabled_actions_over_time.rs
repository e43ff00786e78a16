//! Guard and termination trajectories over a single delay: the inner action
//! is always offered while the outer one switches on and off as exp(x)
//! crosses its thresholds.
//!
//! Run with `cargo run --example enabled_actions_over_time`.

use hcif::sos::Semantics;
use hcif::{models, DEFAULT_DELTA};

fn main() {
    let (decls, comp) = models::enabled_over_time();
    let sem = Semantics::new(&decls);
    let sigma0 = decls.zero_valuation();

    let successors = sem
        .time_successors(&comp, &sigma0, 2.0, DEFAULT_DELTA)
        .expect("delay admitted");
    let bundle = &successors[0].bundle;

    println!("s        enabled        terminable");
    for (k, theta) in bundle.theta.iter().enumerate() {
        let s = k as f64 * DEFAULT_DELTA;
        let actions: Vec<&str> = theta.iter().map(|a| a.as_str()).collect();
        println!("{:<8} {{{:<10}}}   {}", s, actions.join(", "), bundle.omega[k]);
    }
    println!();
    println!("b is offered exactly while ln 2 < x < ln 4 (x grows at rate 1):");
    println!("  ln 2 = {:.5}, ln 4 = {:.5}", 2.0f64.ln(), 4.0f64.ln());
}
