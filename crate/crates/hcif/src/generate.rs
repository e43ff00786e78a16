//! Seeded random models and mutations for differential testing.
//!
//! The generator produces small hierarchical models in the fragment the
//! flattener's correctness argument covers: root initializations are
//! conjunctions of `var = constant`, and every substructure automaton has at
//! most one possibly-initial location (or only unconstrained ones), so entry
//! resets can establish the initialization the way flattening does.
//! Dynamics favor unit-rate clocks from integer starts, which puts guard
//! boundaries exactly on the sample grid.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::model::{AtomicAutomaton, Composition, Edge, LocationId, VarDecl, VarKind};
use crate::predicate::{CmpOp, Expr, Predicate, VarRef};
use crate::syntax::ModelFile;

/// Variables every generated model declares.
pub fn generator_decls() -> Vec<VarDecl> {
    vec![
        VarDecl { name: "x".into(), kind: VarKind::Continuous },
        VarDecl { name: "y".into(), kind: VarKind::Continuous },
        VarDecl { name: "z".into(), kind: VarKind::Continuous },
        VarDecl { name: "n".into(), kind: VarKind::Discrete },
    ]
}

pub struct ModelGen {
    rng: ChaCha8Rng,
}

impl ModelGen {
    pub fn new(seed: u64) -> Self {
        use rand::SeedableRng;
        ModelGen { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    fn int_const(&mut self) -> f64 {
        self.rng.gen_range(0..3) as f64
    }

    fn guard(&mut self, vars: &[&str]) -> Predicate {
        if self.rng.gen_bool(0.3) {
            return Predicate::TRUE;
        }
        let var = vars[self.rng.gen_range(0..vars.len())];
        let op = match self.rng.gen_range(0..4) {
            0 => CmpOp::Lt,
            1 => CmpOp::Le,
            2 => CmpOp::Gt,
            _ => CmpOp::Ge,
        };
        Predicate::Cmp(op, Expr::Var(VarRef::plain(var)), Expr::Const(self.int_const()))
    }

    fn reset(&mut self, vars: &[&str]) -> Predicate {
        match self.rng.gen_range(0..4) {
            0 => Predicate::TRUE,
            1 => Predicate::Cmp(
                CmpOp::Eq,
                Expr::Var(VarRef::stepped("n")),
                Expr::Add(
                    Box::new(Expr::Var(VarRef::plain("n"))),
                    Box::new(Expr::Const(1.0)),
                ),
            ),
            _ => {
                let var = vars[self.rng.gen_range(0..vars.len())];
                Predicate::Cmp(
                    CmpOp::Eq,
                    Expr::Var(VarRef::stepped(var)),
                    Expr::Const(self.int_const()),
                )
            }
        }
    }

    fn tcp(&mut self, dyn_vars: &[&str]) -> Predicate {
        let mut out = Predicate::TRUE;
        for var in dyn_vars {
            let ode = match self.rng.gen_range(0..5) {
                0 | 1 => Some((0.0, 1.0)),
                2 => Some((0.0, 2.0)),
                3 => Some((-1.0, 2.0)),
                _ => None,
            };
            if let Some((a, b)) = ode {
                // var' = a * var + b, written in the simplest shape.
                let rhs = if a == 0.0 {
                    Expr::constant(b)
                } else {
                    Expr::Add(
                        Box::new(Expr::Mul(
                            Box::new(Expr::constant(a)),
                            Box::new(Expr::Var(VarRef::plain(*var))),
                        )),
                        Box::new(Expr::constant(b)),
                    )
                };
                out = Predicate::conj(
                    out,
                    Predicate::Cmp(CmpOp::Eq, Expr::Var(VarRef::dotted(*var)), rhs),
                );
            }
        }
        out
    }

    fn term(&mut self, vars: &[&str]) -> Predicate {
        match self.rng.gen_range(0..4) {
            0 | 1 => Predicate::FALSE,
            2 => Predicate::TRUE,
            _ => {
                let var = vars[self.rng.gen_range(0..vars.len())];
                Predicate::Cmp(CmpOp::Ge, Expr::Var(VarRef::plain(var)), Expr::Const(self.int_const()))
            }
        }
    }

    /// A flat automaton with the given action pool for its edges; dynamics
    /// are restricted to `dyn_vars` so parallel components stay consistent.
    pub fn flat_automaton(
        &mut self,
        name: &str,
        actions: &[&str],
        dyn_vars: &[&str],
        constant_init: bool,
    ) -> AtomicAutomaton {
        let all_vars = ["x", "y", "z", "n"];
        let n_locs = self.rng.gen_range(2..4);
        let locations: Vec<LocationId> =
            (0..n_locs).map(|i| LocationId::new(format!("{}{}", name, i))).collect();

        let mut init = BTreeMap::new();
        let mut tcp = BTreeMap::new();
        let mut term = BTreeMap::new();
        for (i, v) in locations.iter().enumerate() {
            let p = if i == 0 {
                if constant_init {
                    let mut p = Predicate::TRUE;
                    for var in dyn_vars {
                        p = Predicate::conj(p, Predicate::var_eq_const(var, self.int_const()));
                    }
                    if p == Predicate::TRUE {
                        Predicate::var_eq_const(dyn_vars[0], 0.0)
                    } else {
                        p
                    }
                } else {
                    Predicate::TRUE
                }
            } else {
                Predicate::FALSE
            };
            init.insert(v.clone(), p);
            tcp.insert(v.clone(), self.tcp(dyn_vars));
            term.insert(v.clone(), self.term(&all_vars));
        }

        let mut edges = Vec::new();
        let n_edges = self.rng.gen_range(1..=actions.len().min(3));
        let mut pool: Vec<&str> = actions.to_vec();
        for _ in 0..n_edges {
            if pool.is_empty() {
                break;
            }
            let action = pool.remove(self.rng.gen_range(0..pool.len()));
            let source = locations[self.rng.gen_range(0..locations.len())].clone();
            let target = locations[self.rng.gen_range(0..locations.len())].clone();
            edges.push(Edge {
                source,
                guard: self.guard(&all_vars),
                action: action.to_string(),
                reset: self.reset(dyn_vars),
                target,
            });
        }

        // The grammar writes edges inside their source location, so keep
        // them grouped to survive print/parse round trips.
        let index_of = |loc: &LocationId| locations.iter().position(|l| l == loc).unwrap_or(0);
        edges.sort_by_key(|e| index_of(&e.source));

        AtomicAutomaton {
            name: name.to_string(),
            locations,
            init,
            tcp,
            edges,
            term,
            hierarchy: BTreeMap::new(),
            pinned: None,
        }
    }

    /// A depth-2 model: a root automaton over `x` whose first one or two
    /// locations contain flat substructures over `y`.
    pub fn hierarchical_model(&mut self) -> ModelFile {
        let mut root = self.flat_automaton("R", &["a", "b", "c"], &["x"], true);
        // Make the root initialization bind every generated variable so the
        // extracted initial valuation satisfies it.
        let first = root.locations[0].clone();
        let mut p = Predicate::TRUE;
        for var in ["x", "y", "n"] {
            p = Predicate::conj(p, Predicate::var_eq_const(var, self.int_const()));
        }
        root.init.insert(first, p);

        let n_subs = if self.rng.gen_bool(0.4) && root.locations.len() > 2 { 2 } else { 1 };
        for i in 0..n_subs {
            let sub_name = format!("S{}", i);
            let constant_init = self.rng.gen_bool(0.7);
            let mut sub = self.flat_automaton(&sub_name, &["u", "v"], &["y"], constant_init);
            if !constant_init {
                // Leave the single candidate location unconstrained.
                let first = sub.locations[0].clone();
                sub.init.insert(first, Predicate::TRUE);
            }
            // Substructures sit on non-initial locations so entering them
            // exercises the eager choice.
            let loc = root.locations[1 + i].clone();
            root.hierarchy.insert(loc, Composition::Atomic(sub));
        }
        // Guarantee an edge into each hierarchical location.
        let hier_locs: Vec<LocationId> = root.hierarchy.keys().cloned().collect();
        for (i, loc) in hier_locs.iter().enumerate() {
            if !root.edges.iter().any(|e| &e.target == loc) {
                let action = format!("enter{}", i);
                root.edges.push(Edge {
                    source: root.locations[0].clone(),
                    guard: Predicate::TRUE,
                    action,
                    reset: self.reset(&["x"]),
                    target: loc.clone(),
                });
            }
        }
        let order: Vec<LocationId> = root.locations.clone();
        root.edges
            .sort_by_key(|e| order.iter().position(|l| l == &e.source).unwrap_or(0));

        ModelFile { decls: generator_decls(), comp: Composition::Atomic(root) }
    }

    /// An automaton with dynamics only over `z`, safe to run in parallel
    /// with any generated model.
    pub fn observer(&mut self, actions: &[&str]) -> AtomicAutomaton {
        self.flat_automaton("O", actions, &["z"], false)
    }

    /// A random subset of the action pool.
    pub fn sync_set(&mut self, actions: &[&str]) -> BTreeSet<String> {
        actions
            .iter()
            .filter(|_| self.rng.gen_bool(0.4))
            .map(|s| s.to_string())
            .collect()
    }

    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }
}

/// The kind of model edit applied by a mutation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MutationKind {
    DropEdge,
    FlipGuardStrictness,
    BumpResetConstant,
}

/// A mutation applied to a flat automaton.
#[derive(Debug, Clone)]
pub struct Mutation {
    pub kind: MutationKind,
    pub description: String,
}

fn flip_strictness(p: &Predicate) -> Option<Predicate> {
    match p {
        Predicate::Cmp(op, a, b) => {
            let flipped = match op {
                CmpOp::Lt => CmpOp::Le,
                CmpOp::Le => CmpOp::Lt,
                CmpOp::Gt => CmpOp::Ge,
                CmpOp::Ge => CmpOp::Gt,
                _ => return None,
            };
            Some(Predicate::Cmp(flipped, a.clone(), b.clone()))
        }
        Predicate::And(l, r) => {
            if let Some(fl) = flip_strictness(l) {
                Some(Predicate::And(Box::new(fl), r.clone()))
            } else {
                flip_strictness(r).map(|fr| Predicate::And(l.clone(), Box::new(fr)))
            }
        }
        Predicate::Or(l, r) => {
            if let Some(fl) = flip_strictness(l) {
                Some(Predicate::Or(Box::new(fl), r.clone()))
            } else {
                flip_strictness(r).map(|fr| Predicate::Or(l.clone(), Box::new(fr)))
            }
        }
        Predicate::Not(inner) => flip_strictness(inner).map(|fi| Predicate::Not(Box::new(fi))),
        _ => None,
    }
}

/// The comparison `flip_strictness` would flip, in traversal order.
fn first_flippable(p: &Predicate) -> Option<(&Expr, &Expr)> {
    match p {
        Predicate::Cmp(CmpOp::Lt | CmpOp::Le | CmpOp::Gt | CmpOp::Ge, a, b) => Some((a, b)),
        Predicate::And(l, r) | Predicate::Or(l, r) => {
            first_flippable(l).or_else(|| first_flippable(r))
        }
        Predicate::Not(inner) => first_flippable(inner),
        _ => None,
    }
}

/// Edges whose strictness flip is observable: the flipped comparison goes
/// exactly tight at some reached state pinned at the edge's source, so the
/// two variants enable different behavior there.
pub fn tight_flip_edges(
    a: &AtomicAutomaton,
    reached: &[(LocationId, crate::predicate::Valuation)],
) -> BTreeSet<usize> {
    use crate::predicate::EvalEnv;
    let mut out = BTreeSet::new();
    for (i, e) in a.edges.iter().enumerate() {
        let Some((lhs, rhs)) = first_flippable(&e.guard) else { continue };
        for (loc, sigma) in reached {
            if loc != &e.source {
                continue;
            }
            let env = EvalEnv::new(sigma);
            if let (Ok(l), Ok(r)) = (env.eval(lhs), env.eval(rhs)) {
                if l == r {
                    out.insert(i);
                    break;
                }
            }
        }
    }
    out
}

fn bump_reset_constant(p: &Predicate) -> Option<Predicate> {
    match p {
        Predicate::Cmp(CmpOp::Eq, lhs @ Expr::Var(v), Expr::Const(c)) if v.stepped => {
            Some(Predicate::Cmp(CmpOp::Eq, lhs.clone(), Expr::Const(c + 1.0)))
        }
        Predicate::And(l, r) => {
            if let Some(bl) = bump_reset_constant(l) {
                Some(Predicate::And(Box::new(bl), r.clone()))
            } else {
                bump_reset_constant(r).map(|br| Predicate::And(l.clone(), Box::new(br)))
            }
        }
        _ => None,
    }
}

/// Picks a seeded mutation of a flat automaton, restricted to parts the
/// bounded exploration showed observable: `live_actions` are labels that
/// fired, and `tight_flips` are edges whose guard strictness matters at a
/// reached state (see [`tight_flip_edges`]).
pub fn mutate_flat(
    rng: &mut ChaCha8Rng,
    a: &AtomicAutomaton,
    live_actions: &BTreeSet<String>,
    tight_flips: &BTreeSet<usize>,
) -> Option<(Mutation, AtomicAutomaton)> {
    let unique_action = |e: &Edge| {
        a.edges
            .iter()
            .filter(|o| o.source == e.source && o.action == e.action)
            .count()
            == 1
    };

    let drops: Vec<usize> = a
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| live_actions.contains(&e.action) && unique_action(e))
        .map(|(i, _)| i)
        .collect();
    let bumps: Vec<usize> = a
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| live_actions.contains(&e.action) && bump_reset_constant(&e.reset).is_some())
        .map(|(i, _)| i)
        .collect();
    let flips: Vec<usize> = tight_flips
        .iter()
        .copied()
        .filter(|i| a.edges.get(*i).map(|e| flip_strictness(&e.guard).is_some()).unwrap_or(false))
        .collect();

    let mut kinds = Vec::new();
    if !drops.is_empty() {
        kinds.push(MutationKind::DropEdge);
    }
    if !flips.is_empty() {
        kinds.push(MutationKind::FlipGuardStrictness);
    }
    if !bumps.is_empty() {
        kinds.push(MutationKind::BumpResetConstant);
    }
    if kinds.is_empty() {
        return None;
    }
    let kind = kinds[rng.gen_range(0..kinds.len())];

    let mut mutated = a.clone();
    let mutation = match kind {
        MutationKind::DropEdge => {
            let i = drops[rng.gen_range(0..drops.len())];
            let e = mutated.edges.remove(i);
            Mutation {
                kind,
                description: format!("drop edge {} -> {} ({})", e.source, e.target, e.action),
            }
        }
        MutationKind::FlipGuardStrictness => {
            let i = flips[rng.gen_range(0..flips.len())];
            let e = &mut mutated.edges[i];
            e.guard = flip_strictness(&e.guard).expect("candidate has a strict comparison");
            Mutation {
                kind,
                description: format!(
                    "flip guard strictness on {} -> {} ({})",
                    e.source, e.target, e.action
                ),
            }
        }
        MutationKind::BumpResetConstant => {
            let i = bumps[rng.gen_range(0..bumps.len())];
            let e = &mut mutated.edges[i];
            e.reset = bump_reset_constant(&e.reset).expect("candidate has a constant assignment");
            Mutation {
                kind,
                description: format!(
                    "alter reset constant on {} -> {} ({})",
                    e.source, e.target, e.action
                ),
            }
        }
    };
    Some((mutation, mutated))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    #[test]
    fn generated_models_are_well_formed_and_deterministic() {
        for seed in 0..20 {
            let mut gen = ModelGen::new(seed);
            let file = gen.hierarchical_model();
            let decls = file.declarations();
            let diags = validate(&file.comp, &decls);
            assert!(diags.is_empty(), "seed {}: {:?}", seed, diags);
            assert_eq!(crate::model::depth(&file.comp), 2);

            let mut gen2 = ModelGen::new(seed);
            assert_eq!(file, gen2.hierarchical_model());
        }
    }

    #[test]
    fn generated_models_round_trip_through_the_printer() {
        for seed in 0..20 {
            let mut gen = ModelGen::new(seed);
            let file = gen.hierarchical_model();
            let printed = crate::printer::print(&file);
            let reparsed = crate::syntax::parse(&printed)
                .unwrap_or_else(|e| panic!("seed {}: {}\n{}", seed, e, printed));
            assert_eq!(file, reparsed, "seed {} changed shape:\n{}", seed, printed);
        }
    }

    #[test]
    fn mutations_edit_the_intended_part() {
        let mut gen = ModelGen::new(42);
        let a = gen.flat_automaton("F", &["a", "b"], &["x"], true);
        let live_actions: BTreeSet<String> = a.edges.iter().map(|e| e.action.clone()).collect();
        let tight: BTreeSet<usize> = (0..a.edges.len()).collect();
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut seen = BTreeSet::new();
        for _ in 0..30 {
            if let Some((m, mutated)) = mutate_flat(&mut rng, &a, &live_actions, &tight) {
                assert_ne!(a, mutated, "{:?} changed nothing", m);
                seen.insert(m.kind as u8);
            }
        }
        assert!(!seen.is_empty());
    }

    #[test]
    fn tight_flip_detection_requires_exact_boundary_contact() {
        use crate::predicate::{Value, Var};
        let mut gen = ModelGen::new(7);
        let mut a = gen.flat_automaton("F", &["a"], &["x"], true);
        a.edges[0].guard = Predicate::Cmp(
            CmpOp::Lt,
            Expr::Var(VarRef::plain("x")),
            Expr::Const(1.0),
        );
        let source = a.edges[0].source.clone();
        let at = |v: f64| {
            let mut sigma = crate::predicate::Valuation::new();
            sigma.set(Var::plain("x"), Value::Real(v));
            sigma
        };
        assert!(tight_flip_edges(&a, &[(source.clone(), at(1.0))]).contains(&0));
        assert!(tight_flip_edges(&a, &[(source, at(0.5))]).is_empty());
    }
}
