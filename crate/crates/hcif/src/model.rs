//! Syntax of hierarchical hybrid automata and compositions.
//!
//! An atomic automaton is a tuple of locations, initialization /
//! time-can-progress / termination predicates, edges and a partial hierarchy
//! map assigning substructure compositions to locations. Compositions are
//! built from atomic automata with the auxiliary postfix operator `p : a`
//! (the active-substructure marker) and synchronized parallel composition.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::fmt::Write as _;

use thiserror::Error;

use crate::predicate::{Predicate, Valuation, Value, Var, VarRef};

/// How a variable evolves during time delays.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    /// Constant during delays; its dotted version is identically zero.
    Discrete,
    /// Evolves continuously; its dotted version is the derivative.
    Continuous,
}

/// A declared model variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
}

/// Declaration table with name lookup.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Declarations {
    decls: Vec<VarDecl>,
    by_name: BTreeMap<String, VarKind>,
}

impl Declarations {
    pub fn new(decls: Vec<VarDecl>) -> Self {
        let by_name = decls.iter().map(|d| (d.name.clone(), d.kind)).collect();
        Declarations { decls, by_name }
    }

    pub fn kind_of(&self, name: &str) -> Option<VarKind> {
        self.by_name.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = &VarDecl> {
        self.decls.iter()
    }

    pub fn len(&self) -> usize {
        self.decls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.decls.is_empty()
    }

    /// The total valuation binding every plain and dotted variable to zero.
    pub fn zero_valuation(&self) -> Valuation {
        let mut sigma = Valuation::new();
        for d in &self.decls {
            sigma.set(Var::plain(&d.name), Value::Real(0.0));
            sigma.set(Var::dotted(&d.name), Value::Real(0.0));
        }
        sigma
    }

    /// Extends a partial assignment of plain variables into a total
    /// valuation, defaulting missing entries to zero.
    pub fn valuation_from(&self, plain: &[(&str, f64)]) -> Valuation {
        let mut sigma = self.zero_valuation();
        for (name, value) in plain {
            sigma.set(Var::plain(*name), Value::Real(*value));
        }
        sigma
    }
}

/// Identifier of a location.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LocationId(pub String);

impl LocationId {
    pub fn new(s: impl Into<String>) -> Self {
        LocationId(s.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for LocationId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A guarded, labeled edge with a reset predicate.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub source: LocationId,
    pub guard: Predicate,
    pub action: String,
    pub reset: Predicate,
    pub target: LocationId,
}

/// An atomic hierarchical hybrid automaton.
///
/// `pinned` is the semantic device written `a[v]` in transition targets: it
/// replaces the initialization map so only `v` is initial. Source models are
/// unpinned; pinned forms arise during exploration.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicAutomaton {
    pub name: String,
    pub locations: Vec<LocationId>,
    pub init: BTreeMap<LocationId, Predicate>,
    pub tcp: BTreeMap<LocationId, Predicate>,
    pub edges: Vec<Edge>,
    pub term: BTreeMap<LocationId, Predicate>,
    pub hierarchy: BTreeMap<LocationId, Composition>,
    pub pinned: Option<LocationId>,
}

impl AtomicAutomaton {
    /// A flat automaton skeleton with the default predicates
    /// (init `false`, tcp `true`, term `false`) on every location.
    pub fn new(name: impl Into<String>, locations: Vec<LocationId>) -> Self {
        let init = locations.iter().map(|l| (l.clone(), Predicate::FALSE)).collect();
        let tcp = locations.iter().map(|l| (l.clone(), Predicate::TRUE)).collect();
        let term = locations.iter().map(|l| (l.clone(), Predicate::FALSE)).collect();
        AtomicAutomaton {
            name: name.into(),
            locations,
            init,
            tcp,
            edges: Vec::new(),
            term,
            hierarchy: BTreeMap::new(),
            pinned: None,
        }
    }

    pub fn has_location(&self, v: &LocationId) -> bool {
        self.locations.contains(v)
    }

    /// The initialization predicate in effect for `v`: the declared one, or
    /// the truth value of `v = pinned` when the automaton is pinned.
    pub fn effective_init(&self, v: &LocationId) -> Predicate {
        match &self.pinned {
            Some(p) => Predicate::Lit(p == v),
            None => self.init.get(v).cloned().unwrap_or(Predicate::FALSE),
        }
    }

    pub fn init_of(&self, v: &LocationId) -> &Predicate {
        self.init.get(v).expect("location has an init predicate")
    }

    pub fn tcp_of(&self, v: &LocationId) -> &Predicate {
        self.tcp.get(v).expect("location has a tcp predicate")
    }

    pub fn term_of(&self, v: &LocationId) -> &Predicate {
        self.term.get(v).expect("location has a term predicate")
    }

    /// The automaton pinned at `v` (`a[v]`): only `v` is initial, all other
    /// fields are unchanged.
    pub fn pin(&self, v: &LocationId) -> Result<AtomicAutomaton, ModelError> {
        if !self.has_location(v) {
            return Err(ModelError::UnknownLocation {
                automaton: self.name.clone(),
                location: v.clone(),
            });
        }
        let mut out = self.clone();
        out.pinned = Some(v.clone());
        Ok(out)
    }

    pub fn edges_from<'a>(&'a self, v: &'a LocationId) -> impl Iterator<Item = &'a Edge> + 'a {
        self.edges.iter().filter(move |e| &e.source == v)
    }

    pub fn is_flat(&self) -> bool {
        self.hierarchy.is_empty()
    }
}

/// A composition term: an atomic automaton, an automaton postfix `p : a`, or
/// a synchronized parallel composition.
#[derive(Debug, Clone, PartialEq)]
pub enum Composition {
    Atomic(AtomicAutomaton),
    Postfix {
        child: Box<Composition>,
        parent: AtomicAutomaton,
    },
    Parallel {
        left: Box<Composition>,
        sync: BTreeSet<String>,
        right: Box<Composition>,
    },
}

impl Composition {
    pub fn atomic(a: AtomicAutomaton) -> Self {
        Composition::Atomic(a)
    }

    pub fn postfix(child: Composition, parent: AtomicAutomaton) -> Self {
        Composition::Postfix { child: Box::new(child), parent }
    }

    pub fn parallel(left: Composition, sync: BTreeSet<String>, right: Composition) -> Self {
        Composition::Parallel { left: Box::new(left), sync, right: Box::new(right) }
    }

    /// The atomic automata reachable without crossing a postfix child:
    /// the components a fresh initialization would activate.
    pub fn spine(&self) -> Vec<&AtomicAutomaton> {
        match self {
            Composition::Atomic(a) => vec![a],
            Composition::Postfix { parent, .. } => vec![parent],
            Composition::Parallel { left, right, .. } => {
                let mut out = left.spine();
                out.extend(right.spine());
                out
            }
        }
    }

    /// Whether every atomic node on the spine is pinned and every postfix
    /// child is itself initialized. Holds for the target of every
    /// environment and time transition.
    pub fn is_initialized(&self) -> bool {
        match self {
            Composition::Atomic(a) => a.pinned.is_some(),
            Composition::Postfix { child, parent } => {
                parent.pinned.is_some() && child.is_initialized()
            }
            Composition::Parallel { left, right, .. } => {
                left.is_initialized() && right.is_initialized()
            }
        }
    }

    /// Compact rendering of the pinned-location tree, e.g.
    /// `Clock[Cold]:Thermostat[On]`.
    pub fn tree_label(&self) -> String {
        match self {
            Composition::Atomic(a) => match &a.pinned {
                Some(v) => format!("{}[{}]", a.name, v),
                None => a.name.clone(),
            },
            Composition::Postfix { child, parent } => {
                let parent_label = match &parent.pinned {
                    Some(v) => format!("{}[{}]", parent.name, v),
                    None => parent.name.clone(),
                };
                format!("{}:{}", child.tree_label(), parent_label)
            }
            Composition::Parallel { left, sync, right } => {
                let actions: Vec<&str> = sync.iter().map(|s| s.as_str()).collect();
                format!("({} ||{{{}}} {})", left.tree_label(), actions.join(","), right.tree_label())
            }
        }
    }

    /// Deterministic structural fingerprint, used as a memoization key.
    /// Distinct terms produce distinct strings.
    pub fn fingerprint(&self) -> String {
        let mut out = String::new();
        self.write_fingerprint(&mut out);
        out
    }

    fn write_fingerprint(&self, out: &mut String) {
        match self {
            Composition::Atomic(a) => write_automaton_fingerprint(a, out),
            Composition::Postfix { child, parent } => {
                out.push_str("P(");
                child.write_fingerprint(out);
                out.push(':');
                write_automaton_fingerprint(parent, out);
                out.push(')');
            }
            Composition::Parallel { left, sync, right } => {
                out.push_str("||{");
                for a in sync {
                    out.push_str(a);
                    out.push(',');
                }
                out.push_str("}(");
                left.write_fingerprint(out);
                out.push('|');
                right.write_fingerprint(out);
                out.push(')');
            }
        }
    }
}

fn write_automaton_fingerprint(a: &AtomicAutomaton, out: &mut String) {
    let _ = write!(out, "A[{}", a.name);
    if let Some(p) = &a.pinned {
        let _ = write!(out, "@{}", p);
    }
    out.push(';');
    for v in &a.locations {
        let _ = write!(
            out,
            "{}:{:?}/{:?}/{:?}",
            v,
            a.init.get(v),
            a.tcp.get(v),
            a.term.get(v)
        );
        if let Some(sub) = a.hierarchy.get(v) {
            out.push_str("sub(");
            sub.write_fingerprint(out);
            out.push(')');
        }
        out.push(';');
    }
    for e in &a.edges {
        let _ = write!(out, "E{}-{:?}-{}-{:?}->{};", e.source, e.guard, e.action, e.reset, e.target);
    }
    out.push(']');
}

/// Errors raised by model-level operations.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum ModelError {
    #[error("unknown location `{location}` in automaton `{automaton}`")]
    UnknownLocation { automaton: String, location: LocationId },
    #[error("postfix parent `{0}` is not pinned")]
    UnpinnedPostfix(String),
}

/// The automaton pinned at `v`; errors when `v` is not a location.
pub fn pin(automaton: &AtomicAutomaton, v: &LocationId) -> Result<AtomicAutomaton, ModelError> {
    automaton.pin(v)
}

/// Nesting depth of a composition. Flat automata have depth 1; the depth of
/// a parallel composition is the maximum of its components. Postfix terms
/// arise only semantically; their depth is `max(depth(child) + 1,
/// atomic depth of parent)` so exploration bookkeeping stays total.
pub fn depth(p: &Composition) -> usize {
    match p {
        Composition::Atomic(a) => atomic_depth(a),
        Composition::Parallel { left, right, .. } => depth(left).max(depth(right)),
        Composition::Postfix { child, parent } => (depth(child) + 1).max(atomic_depth(parent)),
    }
}

fn atomic_depth(a: &AtomicAutomaton) -> usize {
    1 + a.hierarchy.values().map(depth).max().unwrap_or(0)
}

/// A well-formedness violation, naming the invariant and where it fails.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub context: String,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.context, self.message)
    }
}

/// Checks every structural invariant of the model; the empty list means the
/// model is well-formed.
pub fn validate(model: &Composition, decls: &Declarations) -> Vec<Diagnostic> {
    let mut out = Vec::new();

    let mut seen = BTreeSet::new();
    for d in decls.iter() {
        if !seen.insert(d.name.clone()) {
            out.push(Diagnostic {
                context: "declarations".into(),
                message: format!("duplicate variable name `{}`", d.name),
            });
        }
    }

    validate_comp(model, decls, &mut out);
    out
}

fn validate_comp(comp: &Composition, decls: &Declarations, out: &mut Vec<Diagnostic>) {
    match comp {
        Composition::Atomic(a) => validate_automaton(a, decls, out),
        Composition::Postfix { child, parent } => {
            if parent.pinned.is_none() {
                out.push(Diagnostic {
                    context: format!("automaton `{}`", parent.name),
                    message: "postfix parent must be pinned".into(),
                });
            }
            validate_automaton(parent, decls, out);
            validate_comp(child, decls, out);
        }
        Composition::Parallel { left, right, .. } => {
            validate_comp(left, decls, out);
            validate_comp(right, decls, out);
        }
    }
}

fn validate_automaton(a: &AtomicAutomaton, decls: &Declarations, out: &mut Vec<Diagnostic>) {
    let ctx = |msg: String| Diagnostic { context: format!("automaton `{}`", a.name), message: msg };

    let mut seen = BTreeSet::new();
    for v in &a.locations {
        if !seen.insert(v.clone()) {
            out.push(ctx(format!("duplicate location `{}`", v)));
        }
    }

    for (map, what, allow_stepped) in [
        (&a.init, "init", false),
        (&a.tcp, "tcp", false),
        (&a.term, "term", false),
    ] {
        for v in &a.locations {
            match map.get(v) {
                None => out.push(ctx(format!("location `{}` has no {} predicate", v, what))),
                Some(p) => check_vars(p, decls, allow_stepped, &format!("{} of `{}`", what, v), &a.name, out),
            }
        }
        for v in map.keys() {
            if !a.has_location(v) {
                out.push(ctx(format!("{} predicate for unknown location `{}`", what, v)));
            }
        }
    }

    for v in a.hierarchy.keys() {
        if !a.has_location(v) {
            out.push(ctx(format!("hierarchy entry for unknown location `{}`", v)));
        }
    }

    if let Some(p) = &a.pinned {
        if !a.has_location(p) {
            out.push(ctx(format!("pinned at unknown location `{}`", p)));
        }
    }

    for (i, e) in a.edges.iter().enumerate() {
        if !a.has_location(&e.source) {
            out.push(ctx(format!("edge {} has unknown source `{}`", i, e.source)));
        }
        if !a.has_location(&e.target) {
            out.push(ctx(format!("edge {} has unknown target `{}`", i, e.target)));
        }
        if e.guard.uses_stepped() {
            out.push(ctx(format!("edge {} ({}): stepped variable in guard", i, e.action)));
        }
        check_vars(&e.guard, decls, false, &format!("guard of edge {}", i), &a.name, out);
        check_vars(&e.reset, decls, true, &format!("reset of edge {}", i), &a.name, out);
    }

    for sub in a.hierarchy.values() {
        validate_comp(sub, decls, out);
    }
}

fn check_vars(
    p: &Predicate,
    decls: &Declarations,
    allow_stepped: bool,
    what: &str,
    automaton: &str,
    out: &mut Vec<Diagnostic>,
) {
    let mut refs: Vec<VarRef> = Vec::new();
    p.visit_vars(&mut |v| refs.push(v.clone()));
    for v in refs {
        if decls.kind_of(&v.name).is_none() {
            out.push(Diagnostic {
                context: format!("automaton `{}`", automaton),
                message: format!("{}: undeclared variable `{}`", what, v),
            });
        }
        if v.stepped && !allow_stepped {
            out.push(Diagnostic {
                context: format!("automaton `{}`", automaton),
                message: format!("{}: stepped variable `{}` not allowed here", what, v),
            });
        }
    }
}
