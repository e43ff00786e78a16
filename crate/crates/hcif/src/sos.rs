//! Transition rules of the induced hybrid transition system.
//!
//! A state pairs a composition term with a valuation. Three transition
//! relations are produced: action transitions (edge execution, with eager
//! initialization of entered substructures), environment transitions
//! (initialization, labeled with a termination boolean) and time transitions
//! (synchronized delays carrying variable, guard and termination
//! trajectories). Environment transitions preserve the valuation.

use std::cell::Cell;
use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use thiserror::Error;

use crate::flow::{extract_flow_spec, sample_count, sample_flow, FlowError, FlowSpec};
use crate::model::{AtomicAutomaton, Composition, Declarations, Edge, LocationId, ModelError};
use crate::predicate::{solve_reset_core, EvalError, Valuation, Value, Var};

/// Errors raised while computing successors.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum SemError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// One rule family of the transition system, for coverage instrumentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleTag {
    AtomicActionToSub,
    AtomicActionToFlat,
    AtomicActionInner,
    AtomicTimeNested,
    AtomicTimeLeaf,
    AtomicEnvNested,
    AtomicEnvLeaf,
    PostfixActionToSub,
    PostfixActionToFlat,
    PostfixActionInner,
    PostfixTime,
    PostfixEnv,
    ParallelActionSync,
    ParallelActionInterleave,
    ParallelTime,
    ParallelEnv,
}

impl RuleTag {
    pub const ALL: [RuleTag; 16] = [
        RuleTag::AtomicActionToSub,
        RuleTag::AtomicActionToFlat,
        RuleTag::AtomicActionInner,
        RuleTag::AtomicTimeNested,
        RuleTag::AtomicTimeLeaf,
        RuleTag::AtomicEnvNested,
        RuleTag::AtomicEnvLeaf,
        RuleTag::PostfixActionToSub,
        RuleTag::PostfixActionToFlat,
        RuleTag::PostfixActionInner,
        RuleTag::PostfixTime,
        RuleTag::PostfixEnv,
        RuleTag::ParallelActionSync,
        RuleTag::ParallelActionInterleave,
        RuleTag::ParallelTime,
        RuleTag::ParallelEnv,
    ];

    fn bit(self) -> u32 {
        1 << (Self::ALL.iter().position(|t| *t == self).unwrap() as u32)
    }

    pub fn name(self) -> &'static str {
        match self {
            RuleTag::AtomicActionToSub => "atomic action (target with substructure)",
            RuleTag::AtomicActionToFlat => "atomic action (flat target)",
            RuleTag::AtomicActionInner => "atomic action (lifted from substructure)",
            RuleTag::AtomicTimeNested => "atomic time (with substructure)",
            RuleTag::AtomicTimeLeaf => "atomic time (leaf)",
            RuleTag::AtomicEnvNested => "atomic env (with substructure)",
            RuleTag::AtomicEnvLeaf => "atomic env (leaf)",
            RuleTag::PostfixActionToSub => "postfix action (target with substructure)",
            RuleTag::PostfixActionToFlat => "postfix action (flat target)",
            RuleTag::PostfixActionInner => "postfix action (lifted)",
            RuleTag::PostfixTime => "postfix time",
            RuleTag::PostfixEnv => "postfix env",
            RuleTag::ParallelActionSync => "parallel action (synchronized)",
            RuleTag::ParallelActionInterleave => "parallel action (interleaved)",
            RuleTag::ParallelTime => "parallel time",
            RuleTag::ParallelEnv => "parallel env",
        }
    }
}

/// Sampled variable, guard and termination trajectories of a delay.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryBundle {
    pub delta: f64,
    pub rho: Vec<Valuation>,
    pub theta: Vec<BTreeSet<String>>,
    pub omega: Vec<bool>,
}

impl TrajectoryBundle {
    pub fn duration(&self) -> f64 {
        (self.rho.len() - 1) as f64 * self.delta
    }

    pub fn samples(&self) -> usize {
        self.rho.len()
    }

    /// Pointwise match: valuations within `tol`, guard sets equal, booleans
    /// equal, sample for sample.
    pub fn matches(&self, other: &TrajectoryBundle, tol: f64) -> bool {
        self.rho.len() == other.rho.len()
            && self.rho.iter().zip(&other.rho).all(|(a, b)| a.approx_eq(b, tol))
            && self.theta == other.theta
            && self.omega == other.omega
    }
}

/// An action transition: label, target state and the set of variables the
/// reset chain pinned (the rest of the valuation is frame-inherited).
#[derive(Debug, Clone)]
pub struct ActionSuccessor {
    pub action: String,
    pub target: Composition,
    pub valuation: Valuation,
    pub assigned: BTreeSet<Var>,
}

/// An environment transition: the initialized composition and whether it can
/// terminate. The valuation is preserved.
#[derive(Debug, Clone)]
pub struct EnvSuccessor {
    pub terminating: bool,
    pub target: Composition,
}

/// A time transition over a fixed duration.
#[derive(Debug, Clone)]
pub struct TimeSuccessor {
    pub bundle: TrajectoryBundle,
    pub target: Composition,
    pub valuation: Valuation,
}

/// Label of a transition of the induced hybrid transition system.
#[derive(Debug, Clone)]
pub enum TransitionLabel {
    Action(String),
    Env(bool),
    Time(TrajectoryBundle),
}

/// A labeled step to a target state.
#[derive(Debug, Clone)]
pub struct Transition {
    pub label: TransitionLabel,
    pub target: (Composition, Valuation),
}

/// Guard trajectory of a parallel composition at one sample: actions enabled
/// in both components, or enabled in one and not synchronizing.
pub fn combine_parallel_theta(
    theta0: &BTreeSet<String>,
    theta1: &BTreeSet<String>,
    sync: &BTreeSet<String>,
) -> BTreeSet<String> {
    let mut out: BTreeSet<String> = theta0.intersection(theta1).cloned().collect();
    out.extend(theta0.difference(sync).cloned());
    out.extend(theta1.difference(sync).cloned());
    out
}

/// Termination trajectory of a parallel composition at one sample.
pub fn combine_parallel_omega(omega0: bool, omega1: bool) -> bool {
    omega0 && omega1
}

/// Successor computation engine. Pure with respect to its inputs; the only
/// internal state is the record of which rule families have fired.
pub struct Semantics<'d> {
    decls: &'d Declarations,
    fired: Cell<u32>,
}

/// One initialization choice of a composition: the tree of active locations
/// with the per-level flow specifications of their tcp predicates.
enum ActiveNode {
    Leaf {
        aut: AtomicAutomaton,
        loc: LocationId,
        spec: FlowSpec,
    },
    Nested {
        aut: AtomicAutomaton,
        loc: LocationId,
        via_postfix: bool,
        spec: FlowSpec,
        sub: Box<ActiveNode>,
    },
    Par {
        left: Box<ActiveNode>,
        sync: BTreeSet<String>,
        right: Box<ActiveNode>,
    },
}

/// Target of an action transition before the final valuation is known.
/// Entering a location initializes its substructure under the post-reset
/// valuation, so construction is deferred until resets are merged.
#[derive(Clone)]
enum Deferred {
    Enter { aut: AtomicAutomaton, loc: LocationId },
    Wrap { child: Box<Deferred>, parent: AtomicAutomaton },
    Pair { left: Box<DeferredSide>, sync: BTreeSet<String>, right: Box<DeferredSide> },
}

#[derive(Clone)]
enum DeferredSide {
    Deferred(Deferred),
    Concrete(Composition),
}

#[derive(Clone)]
struct Offer {
    action: String,
    assignments: BTreeMap<Var, Value>,
    target: Deferred,
    tags: u32,
}

/// Guard trajectory, termination trajectory and rebuilt target of one
/// assembled time transition.
type AssembledTime = (Vec<BTreeSet<String>>, Vec<bool>, Composition);

impl<'d> Semantics<'d> {
    pub fn new(decls: &'d Declarations) -> Self {
        Semantics { decls, fired: Cell::new(0) }
    }

    pub fn declarations(&self) -> &Declarations {
        self.decls
    }

    fn fire(&self, tag: RuleTag) {
        self.fired.set(self.fired.get() | tag.bit());
    }

    fn fire_mask(&self, mask: u32) {
        self.fired.set(self.fired.get() | mask);
    }

    /// Rule families that have fired in some derivation since construction.
    pub fn fired_rules(&self) -> Vec<RuleTag> {
        let mask = self.fired.get();
        RuleTag::ALL.iter().copied().filter(|t| mask & t.bit() != 0).collect()
    }

    pub fn reset_fired_rules(&self) {
        self.fired.set(0);
    }

    fn holds(&self, sigma: &Valuation, p: &crate::predicate::Predicate) -> Result<bool, SemError> {
        Ok(sigma.satisfies(p)?)
    }

    /// Edges of `a` whose source is effectively initial under `sigma`, whose
    /// guard holds and whose reset is solvable; paired with the post-reset
    /// valuation.
    pub fn enabled_edges(
        &self,
        a: &AtomicAutomaton,
        sigma: &Valuation,
    ) -> Result<Vec<(Edge, Valuation)>, SemError> {
        let mut out = Vec::new();
        for edge in &a.edges {
            if !self.holds(sigma, &a.effective_init(&edge.source))? {
                continue;
            }
            if !self.holds(sigma, &edge.guard)? {
                continue;
            }
            let kinds = |name: &str| self.decls.kind_of(name);
            if let Some(sol) = solve_reset_core(&kinds, sigma, &edge.reset)? {
                out.push((edge.clone(), sol.valuation));
            }
        }
        Ok(out)
    }

    // ----- initialization ---------------------------------------------------

    fn init_configs(&self, p: &Composition, sigma: &Valuation) -> Result<Vec<ActiveNode>, SemError> {
        match p {
            Composition::Atomic(a) => {
                let mut out = Vec::new();
                for v in &a.locations {
                    if !self.holds(sigma, &a.effective_init(v))? {
                        continue;
                    }
                    let spec = extract_flow_spec(self.decls, a.tcp_of(v))?;
                    let pinned = a.pin(v)?;
                    match a.hierarchy.get(v) {
                        None => out.push(ActiveNode::Leaf { aut: pinned, loc: v.clone(), spec }),
                        Some(sub) => {
                            for node in self.init_configs(sub, sigma)? {
                                out.push(ActiveNode::Nested {
                                    aut: pinned.clone(),
                                    loc: v.clone(),
                                    via_postfix: false,
                                    spec: spec.clone(),
                                    sub: Box::new(node),
                                });
                            }
                        }
                    }
                }
                Ok(out)
            }
            Composition::Postfix { child, parent } => {
                let v = parent
                    .pinned
                    .clone()
                    .ok_or(ModelError::UnpinnedPostfix(parent.name.clone()))?;
                let spec = extract_flow_spec(self.decls, parent.tcp_of(&v))?;
                let mut out = Vec::new();
                for node in self.init_configs(child, sigma)? {
                    out.push(ActiveNode::Nested {
                        aut: parent.clone(),
                        loc: v.clone(),
                        via_postfix: true,
                        spec: spec.clone(),
                        sub: Box::new(node),
                    });
                }
                Ok(out)
            }
            Composition::Parallel { left, sync, right } => {
                let ls = self.init_configs(left, sigma)?;
                let rs = self.init_configs(right, sigma)?;
                let mut out = Vec::new();
                for l in &ls {
                    for r in &rs {
                        out.push(ActiveNode::Par {
                            left: Box::new(l.clone_node()),
                            sync: sync.clone(),
                            right: Box::new(r.clone_node()),
                        });
                    }
                }
                Ok(out)
            }
        }
    }

    // ----- environment transitions -------------------------------------------

    /// Environment transitions of `p` under `sigma`: one per initialization
    /// choice, labeled with the termination boolean. The valuation is
    /// preserved.
    pub fn env_successors(
        &self,
        p: &Composition,
        sigma: &Valuation,
    ) -> Result<Vec<EnvSuccessor>, SemError> {
        let mut out = Vec::new();
        for node in self.init_configs(p, sigma)? {
            let (terminating, target) = self.env_of(&node, sigma)?;
            out.push(EnvSuccessor { terminating, target });
        }
        Ok(out)
    }

    fn env_of(&self, node: &ActiveNode, sigma: &Valuation) -> Result<(bool, Composition), SemError> {
        match node {
            ActiveNode::Leaf { aut, loc, .. } => {
                self.fire(RuleTag::AtomicEnvLeaf);
                let b = self.holds(sigma, aut.term_of(loc))?;
                Ok((b, Composition::Atomic(aut.clone())))
            }
            ActiveNode::Nested { aut, loc, via_postfix, sub, .. } => {
                let (sub_b, sub_comp) = self.env_of(sub, sigma)?;
                self.fire(if *via_postfix { RuleTag::PostfixEnv } else { RuleTag::AtomicEnvNested });
                let b = self.holds(sigma, aut.term_of(loc))? && sub_b;
                Ok((b, Composition::postfix(sub_comp, aut.clone())))
            }
            ActiveNode::Par { left, sync, right } => {
                let (bl, cl) = self.env_of(left, sigma)?;
                let (br, cr) = self.env_of(right, sigma)?;
                self.fire(RuleTag::ParallelEnv);
                Ok((combine_parallel_omega(bl, br), Composition::parallel(cl, sync.clone(), cr)))
            }
        }
    }

    // ----- action transitions -------------------------------------------------

    /// Action transitions of `p` under `sigma`.
    pub fn action_successors(
        &self,
        p: &Composition,
        sigma: &Valuation,
    ) -> Result<Vec<ActionSuccessor>, SemError> {
        let mut out: Vec<ActionSuccessor> = Vec::new();
        let mut seen: BTreeSet<String> = BTreeSet::new();
        for offer in self.offers(p, sigma)? {
            let mut next = sigma.clone();
            for (var, value) in &offer.assignments {
                next.set(var.clone(), *value);
            }
            let targets = self.resolve(&offer.target, &next)?;
            if !targets.is_empty() {
                self.fire_mask(offer.tags);
            }
            for target in targets {
                let key = format!(
                    "{}|{}|{}",
                    offer.action,
                    target.fingerprint(),
                    next.quantized_key(1e-9)
                );
                if seen.insert(key) {
                    out.push(ActionSuccessor {
                        action: offer.action.clone(),
                        target,
                        valuation: next.clone(),
                        assigned: offer.assignments.keys().cloned().collect(),
                    });
                }
            }
        }
        Ok(out)
    }

    fn offers(&self, p: &Composition, sigma: &Valuation) -> Result<Vec<Offer>, SemError> {
        match p {
            Composition::Atomic(a) => {
                let mut out = Vec::new();
                // Outer edges, with the eager-choice premise: the source's
                // substructure (if any) must be able to terminate now.
                for edge in &a.edges {
                    if !self.holds(sigma, &a.effective_init(&edge.source))? {
                        continue;
                    }
                    if let Some(offer) = self.edge_offer(a, edge, sigma, false)? {
                        out.push(offer);
                    }
                }
                // Actions generated by the substructure of an initial location.
                for (v, sub) in &a.hierarchy {
                    if !self.holds(sigma, &a.effective_init(v))? {
                        continue;
                    }
                    let pinned = a.pin(v)?;
                    for o in self.offers(sub, sigma)? {
                        out.push(Offer {
                            action: o.action,
                            assignments: o.assignments,
                            target: Deferred::Wrap {
                                child: Box::new(o.target),
                                parent: pinned.clone(),
                            },
                            tags: o.tags | RuleTag::AtomicActionInner.bit(),
                        });
                    }
                }
                Ok(out)
            }
            Composition::Postfix { child, parent } => {
                let v = parent
                    .pinned
                    .clone()
                    .ok_or(ModelError::UnpinnedPostfix(parent.name.clone()))?;
                let mut out = Vec::new();
                // Actions of the active substructure.
                for o in self.offers(child, sigma)? {
                    out.push(Offer {
                        action: o.action,
                        assignments: o.assignments,
                        target: Deferred::Wrap { child: Box::new(o.target), parent: parent.clone() },
                        tags: o.tags | RuleTag::PostfixActionInner.bit(),
                    });
                }
                // Outer edges from the pinned location, once the active
                // substructure is terminating.
                let terminable =
                    self.env_successors(child, sigma)?.iter().any(|e| e.terminating);
                if terminable {
                    for edge in parent.edges_from(&v) {
                        if let Some(offer) = self.edge_offer(parent, edge, sigma, true)? {
                            out.push(offer);
                        }
                    }
                }
                Ok(out)
            }
            Composition::Parallel { left, sync, right } => {
                let lo = self.offers(left, sigma)?;
                let ro = self.offers(right, sigma)?;
                let mut out = Vec::new();
                // Synchronized actions: both components step, with one joint
                // valuation satisfying both resets.
                for ol in &lo {
                    if !sync.contains(&ol.action) {
                        continue;
                    }
                    for or in &ro {
                        if or.action != ol.action {
                            continue;
                        }
                        if let Some(merged) = merge_assignments(&ol.assignments, &or.assignments) {
                            out.push(Offer {
                                action: ol.action.clone(),
                                assignments: merged,
                                target: Deferred::Pair {
                                    left: Box::new(DeferredSide::Deferred(ol.target.clone())),
                                    sync: sync.clone(),
                                    right: Box::new(DeferredSide::Deferred(or.target.clone())),
                                },
                                tags: ol.tags | or.tags | RuleTag::ParallelActionSync.bit(),
                            });
                        }
                    }
                }
                // Interleaved actions: the other component initializes.
                let renvs = self.env_successors(right, sigma)?;
                for ol in &lo {
                    if sync.contains(&ol.action) {
                        continue;
                    }
                    for re in &renvs {
                        out.push(Offer {
                            action: ol.action.clone(),
                            assignments: ol.assignments.clone(),
                            target: Deferred::Pair {
                                left: Box::new(DeferredSide::Deferred(ol.target.clone())),
                                sync: sync.clone(),
                                right: Box::new(DeferredSide::Concrete(re.target.clone())),
                            },
                            tags: ol.tags | RuleTag::ParallelActionInterleave.bit(),
                        });
                    }
                }
                let lenvs = self.env_successors(left, sigma)?;
                for or in &ro {
                    if sync.contains(&or.action) {
                        continue;
                    }
                    for le in &lenvs {
                        out.push(Offer {
                            action: or.action.clone(),
                            assignments: or.assignments.clone(),
                            target: Deferred::Pair {
                                left: Box::new(DeferredSide::Concrete(le.target.clone())),
                                sync: sync.clone(),
                                right: Box::new(DeferredSide::Deferred(or.target.clone())),
                            },
                            tags: or.tags | RuleTag::ParallelActionInterleave.bit(),
                        });
                    }
                }
                Ok(out)
            }
        }
    }

    fn edge_offer(
        &self,
        a: &AtomicAutomaton,
        edge: &Edge,
        sigma: &Valuation,
        via_postfix: bool,
    ) -> Result<Option<Offer>, SemError> {
        if !self.holds(sigma, &edge.guard)? {
            return Ok(None);
        }
        let kinds = |name: &str| self.decls.kind_of(name);
        let sol = match solve_reset_core(&kinds, sigma, &edge.reset)? {
            Some(sol) => sol,
            None => return Ok(None),
        };
        // For an atomic term the source's substructure, if any, must be able
        // to terminate. (In a postfix term the active substructure is the
        // child; the caller checks it.)
        if !via_postfix {
            if let Some(sub) = a.hierarchy.get(&edge.source) {
                if !self.env_successors(sub, sigma)?.iter().any(|e| e.terminating) {
                    return Ok(None);
                }
            }
        }
        let to_sub = a.hierarchy.contains_key(&edge.target);
        let tag = match (via_postfix, to_sub) {
            (false, true) => RuleTag::AtomicActionToSub,
            (false, false) => RuleTag::AtomicActionToFlat,
            (true, true) => RuleTag::PostfixActionToSub,
            (true, false) => RuleTag::PostfixActionToFlat,
        };
        let assignments: BTreeMap<Var, Value> = sol
            .assigned
            .iter()
            .map(|v| (v.clone(), *sol.valuation.get(v).expect("assigned var is bound")))
            .collect();
        Ok(Some(Offer {
            action: edge.action.clone(),
            assignments,
            target: Deferred::Enter { aut: a.clone(), loc: edge.target.clone() },
            tags: tag.bit(),
        }))
    }

    fn resolve(&self, d: &Deferred, next: &Valuation) -> Result<Vec<Composition>, SemError> {
        match d {
            Deferred::Enter { aut, loc } => {
                let pinned = aut.pin(loc)?;
                match aut.hierarchy.get(loc) {
                    None => Ok(vec![Composition::Atomic(pinned)]),
                    Some(sub) => Ok(self
                        .env_successors(sub, next)?
                        .into_iter()
                        .map(|e| Composition::postfix(e.target, pinned.clone()))
                        .collect()),
                }
            }
            Deferred::Wrap { child, parent } => Ok(self
                .resolve(child, next)?
                .into_iter()
                .map(|c| Composition::postfix(c, parent.clone()))
                .collect()),
            Deferred::Pair { left, sync, right } => {
                let ls = self.resolve_side(left, next)?;
                let rs = self.resolve_side(right, next)?;
                let mut out = Vec::new();
                for l in &ls {
                    for r in &rs {
                        out.push(Composition::parallel(l.clone(), sync.clone(), r.clone()));
                    }
                }
                Ok(out)
            }
        }
    }

    fn resolve_side(&self, side: &DeferredSide, next: &Valuation) -> Result<Vec<Composition>, SemError> {
        match side {
            DeferredSide::Deferred(d) => self.resolve(d, next),
            DeferredSide::Concrete(c) => Ok(vec![c.clone()]),
        }
    }

    // ----- time transitions -----------------------------------------------------

    /// Time transitions of duration `t` sampled every `delta`, one per
    /// initialization choice that admits the delay. All active levels
    /// synchronize on a single variable trajectory driven by the merged
    /// dynamics of their tcp predicates.
    pub fn time_successors(
        &self,
        p: &Composition,
        sigma: &Valuation,
        t: f64,
        delta: f64,
    ) -> Result<Vec<TimeSuccessor>, SemError> {
        sample_count(t, delta)?;
        let mut out = Vec::new();
        for node in self.init_configs(p, sigma)? {
            let mut merged = FlowSpec::default();
            node.merge_flow_into(&mut merged)?;
            let rho = sample_flow(self.decls, &merged, sigma, t, delta)?;
            if let Some((theta, omega, target)) = self.assemble_time(&node, &rho)? {
                let valuation = rho.last().expect("at least one sample").clone();
                out.push(TimeSuccessor {
                    bundle: TrajectoryBundle { delta, rho, theta, omega },
                    target,
                    valuation,
                });
            }
        }
        Ok(out)
    }

    /// Builds the guard and termination trajectories of one active
    /// configuration over a shared variable trajectory, refusing when a
    /// pointwise tcp conjunct fails on the half-open interval.
    fn assemble_time(
        &self,
        node: &ActiveNode,
        rho: &[Valuation],
    ) -> Result<Option<AssembledTime>, SemError> {
        let n = rho.len() - 1;
        match node {
            ActiveNode::Leaf { aut, loc, spec } => {
                if !self.pointwise_holds(spec, rho, n)? {
                    return Ok(None);
                }
                let mut theta = Vec::with_capacity(n + 1);
                let mut omega = Vec::with_capacity(n + 1);
                for sample in rho {
                    let mut enabled = BTreeSet::new();
                    for e in aut.edges_from(loc) {
                        if self.holds(sample, &e.guard)? {
                            enabled.insert(e.action.clone());
                        }
                    }
                    theta.push(enabled);
                    omega.push(self.holds(sample, aut.term_of(loc))?);
                }
                self.fire(RuleTag::AtomicTimeLeaf);
                Ok(Some((theta, omega, Composition::Atomic(aut.clone()))))
            }
            ActiveNode::Nested { aut, loc, via_postfix, spec, sub } => {
                let inner = match self.assemble_time(sub, rho)? {
                    Some(inner) => inner,
                    None => return Ok(None),
                };
                if !self.pointwise_holds(spec, rho, n)? {
                    return Ok(None);
                }
                let (theta0, omega0, sub_comp) = inner;
                let mut theta = Vec::with_capacity(n + 1);
                let mut omega = Vec::with_capacity(n + 1);
                for (k, sample) in rho.iter().enumerate() {
                    let mut enabled = theta0[k].clone();
                    if omega0[k] {
                        for e in aut.edges_from(loc) {
                            if self.holds(sample, &e.guard)? {
                                enabled.insert(e.action.clone());
                            }
                        }
                    }
                    theta.push(enabled);
                    omega.push(omega0[k] && self.holds(sample, aut.term_of(loc))?);
                }
                self.fire(if *via_postfix { RuleTag::PostfixTime } else { RuleTag::AtomicTimeNested });
                Ok(Some((theta, omega, Composition::postfix(sub_comp, aut.clone()))))
            }
            ActiveNode::Par { left, sync, right } => {
                let l = match self.assemble_time(left, rho)? {
                    Some(l) => l,
                    None => return Ok(None),
                };
                let r = match self.assemble_time(right, rho)? {
                    Some(r) => r,
                    None => return Ok(None),
                };
                let (theta0, omega0, cl) = l;
                let (theta1, omega1, cr) = r;
                let theta = theta0
                    .iter()
                    .zip(&theta1)
                    .map(|(a, b)| combine_parallel_theta(a, b, sync))
                    .collect();
                let omega = omega0
                    .iter()
                    .zip(&omega1)
                    .map(|(a, b)| combine_parallel_omega(*a, *b))
                    .collect();
                self.fire(RuleTag::ParallelTime);
                Ok(Some((theta, omega, Composition::parallel(cl, sync.clone(), cr))))
            }
        }
    }

    fn pointwise_holds(&self, spec: &FlowSpec, rho: &[Valuation], n: usize) -> Result<bool, SemError> {
        for sample in rho.iter().take(n) {
            for p in spec.pointwise() {
                if !self.holds(sample, p)? {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    // ----- combined successor menu ------------------------------------------------

    /// All transitions from a state: actions, environment steps and one time
    /// transition family per menu duration.
    pub fn successors(
        &self,
        p: &Composition,
        sigma: &Valuation,
        durations: &[f64],
        delta: f64,
    ) -> Result<Vec<Transition>, SemError> {
        let mut out = Vec::new();
        for a in self.action_successors(p, sigma)? {
            out.push(Transition {
                label: TransitionLabel::Action(a.action),
                target: (a.target, a.valuation),
            });
        }
        for e in self.env_successors(p, sigma)? {
            out.push(Transition {
                label: TransitionLabel::Env(e.terminating),
                target: (e.target, sigma.clone()),
            });
        }
        for t in durations {
            for ts in self.time_successors(p, sigma, *t, delta)? {
                out.push(Transition {
                    label: TransitionLabel::Time(ts.bundle),
                    target: (ts.target, ts.valuation),
                });
            }
        }
        Ok(out)
    }
}

impl ActiveNode {
    fn clone_node(&self) -> ActiveNode {
        match self {
            ActiveNode::Leaf { aut, loc, spec } => ActiveNode::Leaf {
                aut: aut.clone(),
                loc: loc.clone(),
                spec: spec.clone(),
            },
            ActiveNode::Nested { aut, loc, via_postfix, spec, sub } => ActiveNode::Nested {
                aut: aut.clone(),
                loc: loc.clone(),
                via_postfix: *via_postfix,
                spec: spec.clone(),
                sub: Box::new(sub.clone_node()),
            },
            ActiveNode::Par { left, sync, right } => ActiveNode::Par {
                left: Box::new(left.clone_node()),
                sync: sync.clone(),
                right: Box::new(right.clone_node()),
            },
        }
    }

    fn merge_flow_into(&self, merged: &mut FlowSpec) -> Result<(), FlowError> {
        match self {
            ActiveNode::Leaf { spec, .. } => merged.merge(spec),
            ActiveNode::Nested { spec, sub, .. } => {
                merged.merge(spec)?;
                sub.merge_flow_into(merged)
            }
            ActiveNode::Par { left, right, .. } => {
                left.merge_flow_into(merged)?;
                right.merge_flow_into(merged)
            }
        }
    }
}

fn merge_assignments(
    a: &BTreeMap<Var, Value>,
    b: &BTreeMap<Var, Value>,
) -> Option<BTreeMap<Var, Value>> {
    let mut out = a.clone();
    for (var, value) in b {
        match out.get(var) {
            Some(prev) if !prev.same(value) => return None,
            _ => {
                out.insert(var.clone(), *value);
            }
        }
    }
    Some(out)
}

/// Simplified transition label kept by the state-space explorer.
#[derive(Debug, Clone, PartialEq)]
pub enum ExploreLabel {
    Action(String),
    Env(bool),
    Time(f64),
}

/// Bounded breadth-first exploration of the reachable state space.
#[derive(Debug, Clone)]
pub struct Exploration {
    pub states: Vec<(Composition, Valuation)>,
    /// BFS depth of each state: transitions taken from the initial state.
    pub depths: Vec<usize>,
    pub transitions: Vec<(usize, ExploreLabel, usize)>,
    pub truncated: bool,
}

impl Exploration {
    pub fn action_labels(&self) -> BTreeSet<String> {
        self.transitions
            .iter()
            .filter_map(|(_, l, _)| match l {
                ExploreLabel::Action(a) => Some(a.clone()),
                _ => None,
            })
            .collect()
    }
}

/// Explores states reachable through action, environment and menu time
/// transitions, deduplicating on term structure and quantized valuation.
pub fn explore(
    sem: &Semantics<'_>,
    p: &Composition,
    sigma0: &Valuation,
    durations: &[f64],
    delta: f64,
    max_states: usize,
) -> Result<Exploration, SemError> {
    let mut states: Vec<(Composition, Valuation)> = Vec::new();
    let mut depths: Vec<usize> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut transitions = Vec::new();
    let mut queue = VecDeque::new();
    let mut truncated = false;

    let key = |c: &Composition, v: &Valuation| format!("{}|{}", c.fingerprint(), v.quantized_key(1e-9));

    states.push((p.clone(), sigma0.clone()));
    depths.push(0);
    index.insert(key(p, sigma0), 0);
    queue.push_back(0usize);

    while let Some(i) = queue.pop_front() {
        let (comp, sigma) = states[i].clone();
        let depth = depths[i];
        for tr in sem.successors(&comp, &sigma, durations, delta)? {
            let label = match &tr.label {
                TransitionLabel::Action(a) => ExploreLabel::Action(a.clone()),
                TransitionLabel::Env(b) => ExploreLabel::Env(*b),
                TransitionLabel::Time(bundle) => ExploreLabel::Time(bundle.duration()),
            };
            let (tc, tv) = tr.target;
            let k = key(&tc, &tv);
            let j = match index.get(&k) {
                Some(j) => *j,
                None => {
                    if states.len() >= max_states {
                        truncated = true;
                        continue;
                    }
                    let j = states.len();
                    states.push((tc, tv));
                    depths.push(depth + 1);
                    index.insert(k, j);
                    queue.push_back(j);
                    j
                }
            };
            transitions.push((i, label, j));
        }
    }
    Ok(Exploration { states, depths, transitions, truncated })
}
