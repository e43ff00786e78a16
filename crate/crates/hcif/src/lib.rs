//! Executable semantics for hierarchical hybrid automata.
//!
//! The crate parses `.hcif` models, enumerates the action, environment and
//! time transitions of the induced hybrid transition system, eliminates
//! hierarchy by flattening, and plays bounded stateless-bisimulation games
//! between models — in particular between a hierarchical model and its
//! flattened form:
//!
//! ```
//! use hcif::bisim::GameConfig;
//! use hcif::{augment_entry_resets, bounded_bisim, eliminate, initial_valuation, parse};
//! use hcif::Composition;
//!
//! let src = "
//!     cont t
//!     automaton Stopwatch {
//!       location Idle {
//!         init t = 0
//!         edge true : start : t+ = 0 -> Running
//!       }
//!       location Running {
//!         sub automaton Phase {
//!           location Low { init t = 0  tcp t' = 1  term 1 <= t }
//!         }
//!         edge 1 <= t : stop : true -> Idle
//!       }
//!     }
//! ";
//! let file = parse(src)?;
//! let decls = file.declarations();
//!
//! // Eliminate the hierarchy, then check the two models bisimilar from the
//! // model's initial valuation. Entry resets are augmented so entering
//! // `Running` re-establishes the phase clock, as the flattening does.
//! let flat = Composition::Atomic(eliminate(&file.comp)?);
//! let hier = augment_entry_resets(&file).comp;
//! let sigma0 = initial_valuation(&file, &decls);
//!
//! let cfg = GameConfig::new(5, vec![sigma0]);
//! let verdict = bounded_bisim(&decls, &hier, &flat, &cfg)?;
//! assert!(verdict.is_equivalent());
//! # Ok::<(), Box<dyn std::error::Error>>(())
//! ```
//!
//! See the `examples/` directory for one runnable walkthrough per
//! capability; the `hcif` binary exposes the same functionality as
//! subcommands.

pub mod bisim;
pub mod cli;
pub mod dot;
pub mod flatten;
pub mod flow;
pub mod generate;
pub mod loader;
pub mod model;
pub mod models;
pub mod predicate;
pub mod printer;
pub mod sos;
pub mod syntax;
pub mod trace;

pub use bisim::{bounded_bisim, check_congruence_sample, Context, GameConfig, Verdict};
pub use flatten::{eliminate, flatten_depth2, product, prune_false_edges};
pub use flow::{flow, FlowOutcome, FlowSpec, VarFlow, VarTrajectory};
pub use loader::{augment_entry_resets, initial_valuation, load, LoadedModel};
pub use model::{
    depth, pin, validate, AtomicAutomaton, Composition, Declarations, Diagnostic, Edge,
    LocationId, VarDecl, VarKind,
};
pub use predicate::{
    satisfies, stepped, CmpOp, EvalEnv, EvalError, Expr, Predicate, SteppedValuation, Valuation,
    Value, Var, VarRef,
};
pub use sos::{
    explore, ActionSuccessor, EnvSuccessor, Exploration, RuleTag, SemError, Semantics,
    TimeSuccessor, Transition, TransitionLabel, TrajectoryBundle,
};
pub use syntax::{parse, ModelFile, ParseError};

/// Default sample step for trajectory discretization (2^-5).
pub const DEFAULT_DELTA: f64 = 0.03125;

/// Default duration menu for time transitions: {2^-3, 2^-1, 1, 2}.
pub const DEFAULT_DURATIONS: [f64; 4] = [0.125, 0.5, 1.0, 2.0];

/// Solves a reset predicate in the functional fragment: the set of
/// post-valuations (empty when the reset is unsatisfiable, a singleton
/// otherwise). Unassigned variables inherit their values.
pub fn solve_reset(
    decls: &Declarations,
    sigma: &Valuation,
    reset: &Predicate,
) -> Result<Vec<Valuation>, EvalError> {
    let kinds = |name: &str| decls.kind_of(name);
    Ok(predicate::solve_reset_core(&kinds, sigma, reset)?
        .map(|sol| vec![sol.valuation])
        .unwrap_or_default())
}
