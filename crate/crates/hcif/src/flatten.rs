//! Hierarchy elimination.
//!
//! A depth-2 automaton flattens into one whose locations pair an outer
//! location with an inner one (or with nothing). Cross edges pick up the
//! inner termination predicate as a guard conjunct and the entered inner
//! initialization, in stepped form, as a reset conjunct. Parallel
//! compositions of flat automata collapse into a product automaton, and
//! `eliminate` lifts both steps to arbitrary well-founded compositions.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::model::{AtomicAutomaton, Composition, Edge, LocationId};
use crate::predicate::Predicate;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum FlattenError {
    #[error("not depth-2 atomic: substructure of `{0}` is not a flat atomic automaton")]
    NotDepth2Atomic(String),
    #[error("auxiliary operator in source model: postfix terms cannot be flattened")]
    PostfixInSource,
    #[error("automaton `{0}` is not flat")]
    NotFlat(String),
}

/// A location of a flattened automaton: the outer location paired with the
/// inner one, when the outer location had a substructure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct FlatLocation {
    pub outer: LocationId,
    pub inner: Option<LocationId>,
}

impl FlatLocation {
    /// Serialized name: `outer.inner`, with the absent inner part omitted.
    pub fn name(&self) -> LocationId {
        match &self.inner {
            Some(inner) => LocationId::new(format!("{}.{}", self.outer, inner)),
            None => self.outer.clone(),
        }
    }
}

fn inner_automaton<'a>(
    a: &'a AtomicAutomaton,
    v: &LocationId,
) -> Result<Option<&'a AtomicAutomaton>, FlattenError> {
    match a.hierarchy.get(v) {
        None => Ok(None),
        Some(Composition::Atomic(inner)) if inner.is_flat() => Ok(Some(inner)),
        Some(_) => Err(FlattenError::NotDepth2Atomic(a.name.clone())),
    }
}

/// An outer location paired with one inner candidate: the inner automaton
/// and location, or `None` for a substructure-free location.
type Pairing<'a> = (Option<&'a AtomicAutomaton>, Option<LocationId>);

/// The inner pairings of an outer location.
fn pairings<'a>(
    a: &'a AtomicAutomaton,
    v: &LocationId,
) -> Result<Vec<Pairing<'a>>, FlattenError> {
    match inner_automaton(a, v)? {
        None => Ok(vec![(None, None)]),
        Some(inner) => Ok(inner
            .locations
            .iter()
            .map(|w| (Some(inner), Some(w.clone())))
            .collect()),
    }
}

/// Flattens an automaton whose substructures are all flat atomic automata.
///
/// Cross edges to a hierarchical location are emitted once per inner target
/// whose initialization is not the literal `false`; when every inner target
/// is so excluded the whole family is kept, since the guards still
/// contribute to guard trajectories.
pub fn flatten_depth2(a: &AtomicAutomaton) -> Result<AtomicAutomaton, FlattenError> {
    let mut locations = Vec::new();
    let mut init = BTreeMap::new();
    let mut tcp = BTreeMap::new();
    let mut term = BTreeMap::new();

    for v in &a.locations {
        for (inner, w) in pairings(a, v)? {
            let flat = FlatLocation { outer: v.clone(), inner: w.clone() };
            let name = flat.name();
            let (i, t, f) = match (inner, &w) {
                (Some(inner), Some(w)) => (
                    Predicate::conj(a.effective_init(v), inner.effective_init(w)),
                    Predicate::conj(a.tcp_of(v).clone(), inner.tcp_of(w).clone()),
                    Predicate::conj(a.term_of(v).clone(), inner.term_of(w).clone()),
                ),
                _ => (a.effective_init(v), a.tcp_of(v).clone(), a.term_of(v).clone()),
            };
            init.insert(name.clone(), i);
            tcp.insert(name.clone(), t);
            term.insert(name.clone(), f);
            locations.push(name);
        }
    }

    let mut edges = Vec::new();
    // Cross edges: every inner pairing of the source, paired with the inner
    // targets the edge can initialize.
    for e in &a.edges {
        for (source_inner, w0) in pairings(a, &e.source)? {
            let source_term = match (&source_inner, &w0) {
                (Some(inner), Some(w0)) => inner.term_of(w0).clone(),
                _ => Predicate::TRUE,
            };
            let guard = Predicate::conj(source_term, e.guard.clone());
            let source = FlatLocation { outer: e.source.clone(), inner: w0 }.name();

            let targets = pairings(a, &e.target)?;
            let live: Vec<_> = targets
                .iter()
                .filter(|(inner, w1)| match (inner, w1) {
                    (Some(inner), Some(w1)) => inner.effective_init(w1) != Predicate::FALSE,
                    _ => true,
                })
                .cloned()
                .collect();
            let family = if live.is_empty() { targets } else { live };

            for (target_inner, w1) in family {
                let entered_init = match (&target_inner, &w1) {
                    (Some(inner), Some(w1)) => inner.effective_init(w1).stepped_form(),
                    _ => Predicate::TRUE,
                };
                let reset = Predicate::conj(e.reset.clone(), entered_init);
                let target = FlatLocation { outer: e.target.clone(), inner: w1 }.name();
                edges.push(Edge {
                    source: source.clone(),
                    guard: guard.clone(),
                    action: e.action.clone(),
                    reset,
                    target,
                });
            }
        }
    }
    // Inner edges, lifted unchanged within their outer location.
    for v in a.hierarchy.keys() {
        let inner = inner_automaton(a, v)?.expect("hierarchy entries have inner automata");
        for e in &inner.edges {
            edges.push(Edge {
                source: FlatLocation { outer: v.clone(), inner: Some(e.source.clone()) }.name(),
                guard: e.guard.clone(),
                action: e.action.clone(),
                reset: e.reset.clone(),
                target: FlatLocation { outer: v.clone(), inner: Some(e.target.clone()) }.name(),
            });
        }
    }

    Ok(AtomicAutomaton {
        name: a.name.clone(),
        locations,
        init,
        tcp,
        edges,
        term,
        hierarchy: BTreeMap::new(),
        pinned: None,
    })
}

/// Product of two flat automata, stateless-bisimilar to their parallel
/// composition: synchronized actions pair edges and conjoin guards and
/// resets, other actions interleave. Edges whose paired resets assign the
/// same variable differently are emitted with their unsatisfiable reset.
pub fn product(
    a: &AtomicAutomaton,
    sync: &BTreeSet<String>,
    b: &AtomicAutomaton,
) -> Result<AtomicAutomaton, FlattenError> {
    if !a.is_flat() {
        return Err(FlattenError::NotFlat(a.name.clone()));
    }
    if !b.is_flat() {
        return Err(FlattenError::NotFlat(b.name.clone()));
    }
    let pair_name =
        |u: &LocationId, v: &LocationId| LocationId::new(format!("{}.{}", u, v));

    let mut locations = Vec::new();
    let mut init = BTreeMap::new();
    let mut tcp = BTreeMap::new();
    let mut term = BTreeMap::new();
    for u in &a.locations {
        for v in &b.locations {
            let name = pair_name(u, v);
            init.insert(name.clone(), Predicate::conj(a.effective_init(u), b.effective_init(v)));
            tcp.insert(name.clone(), Predicate::conj(a.tcp_of(u).clone(), b.tcp_of(v).clone()));
            term.insert(name.clone(), Predicate::conj(a.term_of(u).clone(), b.term_of(v).clone()));
            locations.push(name);
        }
    }

    let mut edges = Vec::new();
    for ea in &a.edges {
        if !sync.contains(&ea.action) {
            continue;
        }
        for eb in &b.edges {
            if eb.action != ea.action {
                continue;
            }
            edges.push(Edge {
                source: pair_name(&ea.source, &eb.source),
                guard: Predicate::conj(ea.guard.clone(), eb.guard.clone()),
                action: ea.action.clone(),
                reset: Predicate::conj(ea.reset.clone(), eb.reset.clone()),
                target: pair_name(&ea.target, &eb.target),
            });
        }
    }
    for ea in &a.edges {
        if sync.contains(&ea.action) {
            continue;
        }
        for v in &b.locations {
            edges.push(Edge {
                source: pair_name(&ea.source, v),
                guard: ea.guard.clone(),
                action: ea.action.clone(),
                reset: ea.reset.clone(),
                target: pair_name(&ea.target, v),
            });
        }
    }
    for eb in &b.edges {
        if sync.contains(&eb.action) {
            continue;
        }
        for u in &a.locations {
            edges.push(Edge {
                source: pair_name(u, &eb.source),
                guard: eb.guard.clone(),
                action: eb.action.clone(),
                reset: eb.reset.clone(),
                target: pair_name(u, &eb.target),
            });
        }
    }

    Ok(AtomicAutomaton {
        name: format!("{}_{}", a.name, b.name),
        locations,
        init,
        tcp,
        edges,
        term,
        hierarchy: BTreeMap::new(),
        pinned: None,
    })
}

/// Drops edges whose guard contains a literal `false` conjunct. Such edges
/// can never fire and never contribute to a guard trajectory.
pub fn prune_false_edges(a: &AtomicAutomaton) -> AtomicAutomaton {
    let edges = a
        .edges
        .iter()
        .filter(|e| !e.guard.has_false_conjunct())
        .cloned()
        .collect();
    AtomicAutomaton { edges, ..a.clone() }
}

/// Eliminates all hierarchy from a well-founded composition, producing a
/// flat automaton: substructures are eliminated first, then the enclosing
/// automaton is flattened, then statically dead cross edges are pruned.
/// Flat atomic inputs are returned unchanged.
pub fn eliminate(p: &Composition) -> Result<AtomicAutomaton, FlattenError> {
    match p {
        Composition::Postfix { .. } => Err(FlattenError::PostfixInSource),
        Composition::Parallel { left, sync, right } => {
            let l = eliminate(left)?;
            let r = eliminate(right)?;
            product(&l, sync, &r)
        }
        Composition::Atomic(a) => {
            if a.is_flat() {
                return Ok(a.clone());
            }
            let mut lowered = a.clone();
            lowered.hierarchy = a
                .hierarchy
                .iter()
                .map(|(v, sub)| Ok((v.clone(), Composition::Atomic(eliminate(sub)?))))
                .collect::<Result<BTreeMap<_, _>, FlattenError>>()?;
            Ok(prune_false_edges(&flatten_depth2(&lowered)?))
        }
    }
}
