//! Bounded stateless-bisimulation games.
//!
//! The game plays the transfer conditions from a set of initial valuations:
//! every action move must be matched with the same label and post-valuation,
//! every environment move with the same termination boolean, and every time
//! move (one family per menu duration) with pointwise equal variable, guard
//! and termination trajectories. Visited pairs are assumed related while
//! they are being explored, which is the coinductive reading; assumptions
//! made inside a failed subtree are rolled back.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::rc::Rc;

use crate::model::{AtomicAutomaton, Composition, Declarations};
use crate::predicate::Valuation;
use crate::sos::{ActionSuccessor, EnvSuccessor, SemError, Semantics, TimeSuccessor};

/// Parameters of the bounded game.
#[derive(Debug, Clone)]
pub struct GameConfig {
    /// Maximum number of alternations explored from each initial valuation.
    pub depth: usize,
    /// Durations offered for time moves; multiples of `delta`.
    pub durations: Vec<f64>,
    /// Sample step for trajectories.
    pub delta: f64,
    /// Initial valuations the game starts from.
    pub initial_valuations: Vec<Valuation>,
    /// Absolute tolerance for matching real values.
    pub tolerance: f64,
}

impl GameConfig {
    pub fn new(depth: usize, initial_valuations: Vec<Valuation>) -> Self {
        GameConfig {
            depth,
            durations: crate::DEFAULT_DURATIONS.to_vec(),
            delta: crate::DEFAULT_DELTA,
            initial_valuations,
            tolerance: 1e-9,
        }
    }
}

/// Which model owns the unmatched move.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Side::Left => write!(f, "left"),
            Side::Right => write!(f, "right"),
        }
    }
}

/// Label of one game step, with time moves summarized by their duration.
#[derive(Debug, Clone, PartialEq)]
pub enum StepLabel {
    Action(String),
    Env(bool),
    Time { duration: f64 },
}

impl fmt::Display for StepLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StepLabel::Action(a) => write!(f, "action {}", a),
            StepLabel::Env(b) => write!(f, "env {}", b),
            StepLabel::Time { duration } => write!(f, "time {}", duration),
        }
    }
}

/// A state of the game: a composition term with a valuation.
pub type GameState = (Composition, Valuation);

/// One matched move on the path to the failing pair.
#[derive(Debug, Clone)]
pub struct GameStep {
    pub label: StepLabel,
    pub left: GameState,
    pub right: GameState,
}

/// A replayable witness that the two models are not bisimilar.
#[derive(Debug, Clone)]
pub struct DistinguishedTrace {
    pub initial_valuation: Valuation,
    pub steps: Vec<GameStep>,
    pub side: Side,
    pub label: StepLabel,
    pub condition: String,
}

impl fmt::Display for DistinguishedTrace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, step) in self.steps.iter().enumerate() {
            writeln!(f, "  step {}: {}", i, step.label)?;
        }
        write!(
            f,
            "  the {} model offers `{}` which the other cannot match: {}",
            self.side, self.label, self.condition
        )
    }
}

/// Outcome of a bounded game.
#[derive(Debug, Clone)]
pub enum Verdict {
    EquivalentUpToBound,
    Distinguished(Box<DistinguishedTrace>),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::EquivalentUpToBound)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::EquivalentUpToBound => write!(f, "equivalent up to the bound"),
            Verdict::Distinguished(trace) => {
                writeln!(f, "distinguished:")?;
                write!(f, "{}", trace)
            }
        }
    }
}

struct StateSuccessors {
    actions: Vec<ActionSuccessor>,
    envs: Vec<EnvSuccessor>,
    times: Vec<Vec<TimeSuccessor>>,
}

struct Failure {
    steps: Vec<GameStep>,
    side: Side,
    label: StepLabel,
    condition: String,
}

struct Game<'a, 'd> {
    sem: &'a Semantics<'d>,
    cfg: &'a GameConfig,
    visited: HashSet<(String, String)>,
    journal: Vec<(String, String)>,
    cache: HashMap<String, Rc<StateSuccessors>>,
}

impl<'a, 'd> Game<'a, 'd> {
    fn state_key(&self, s: &GameState) -> String {
        format!("{}|{}", s.0.fingerprint(), s.1.quantized_key(self.cfg.tolerance))
    }

    fn successors(&mut self, s: &GameState) -> Result<Rc<StateSuccessors>, SemError> {
        let key = self.state_key(s);
        if let Some(cached) = self.cache.get(&key) {
            return Ok(cached.clone());
        }
        let actions = self.sem.action_successors(&s.0, &s.1)?;
        let envs = self.sem.env_successors(&s.0, &s.1)?;
        let mut times = Vec::with_capacity(self.cfg.durations.len());
        for t in &self.cfg.durations {
            times.push(self.sem.time_successors(&s.0, &s.1, *t, self.cfg.delta)?);
        }
        let out = Rc::new(StateSuccessors { actions, envs, times });
        self.cache.insert(key, out.clone());
        Ok(out)
    }

    fn rollback(&mut self, mark: usize) {
        while self.journal.len() > mark {
            let key = self.journal.pop().expect("journal entry");
            self.visited.remove(&key);
        }
    }

    /// Plays the pair; `Ok(Ok(()))` means related up to the bound.
    fn play(
        &mut self,
        left: &GameState,
        right: &GameState,
        depth: usize,
    ) -> Result<Result<(), Failure>, SemError> {
        if depth == 0 {
            return Ok(Ok(()));
        }
        let pair = (self.state_key(left), self.state_key(right));
        if self.visited.contains(&pair) {
            return Ok(Ok(()));
        }
        let mark = self.journal.len();
        self.visited.insert(pair.clone());
        self.journal.push(pair);

        let ls = self.successors(left)?;
        let rs = self.successors(right)?;

        // Both sides of a pair always carry the same valuation.
        let sigma = &left.1;
        for (side, mover, other) in [(Side::Left, &ls, &rs), (Side::Right, &rs, &ls)] {
            if let Err(fail) = self.transfer(side, mover, other, sigma, depth)? {
                self.rollback(mark);
                return Ok(Err(fail));
            }
        }
        Ok(Ok(()))
    }

    /// Checks that every move of `mover` is matched by `other`.
    fn transfer(
        &mut self,
        side: Side,
        mover: &Rc<StateSuccessors>,
        other: &Rc<StateSuccessors>,
        sigma: &Valuation,
        depth: usize,
    ) -> Result<Result<(), Failure>, SemError> {
        let tol = self.cfg.tolerance;

        for a in &mover.actions {
            let label = StepLabel::Action(a.action.clone());
            let candidates: Vec<&ActionSuccessor> = other
                .actions
                .iter()
                .filter(|c| c.action == a.action && c.valuation.approx_eq(&a.valuation, tol))
                .collect();
            let mover_target = (a.target.clone(), a.valuation.clone());
            let cand_targets: Vec<GameState> = candidates
                .iter()
                .map(|c| (c.target.clone(), a.valuation.clone()))
                .collect();
            if let Err(fail) = self.match_move(
                side,
                label,
                mover_target,
                cand_targets,
                depth,
                "no action transition with this label and post-valuation",
            )? {
                return Ok(Err(fail));
            }
        }

        for e in &mover.envs {
            // Environment transitions preserve the source valuation.
            let label = StepLabel::Env(e.terminating);
            let candidates: Vec<GameState> = other
                .envs
                .iter()
                .filter(|c| c.terminating == e.terminating)
                .map(|c| (c.target.clone(), sigma.clone()))
                .collect();
            let mover_target = (e.target.clone(), sigma.clone());
            if let Err(fail) = self.match_move(
                side,
                label,
                mover_target,
                candidates,
                depth,
                "no environment transition with this termination flag",
            )? {
                return Ok(Err(fail));
            }
        }

        for (di, family) in mover.times.iter().enumerate() {
            for ts in family {
                let label = StepLabel::Time { duration: ts.bundle.duration() };
                let candidates: Vec<GameState> = other.times[di]
                    .iter()
                    .filter(|c| c.bundle.matches(&ts.bundle, tol))
                    .map(|c| (c.target.clone(), ts.valuation.clone()))
                    .collect();
                let mover_target = (ts.target.clone(), ts.valuation.clone());
                if let Err(fail) = self.match_move(
                    side,
                    label,
                    mover_target,
                    candidates,
                    depth,
                    "no time transition with matching variable, guard and termination trajectories",
                )? {
                    return Ok(Err(fail));
                }
            }
        }
        Ok(Ok(()))
    }

    fn match_move(
        &mut self,
        side: Side,
        label: StepLabel,
        mover_target: GameState,
        candidates: Vec<GameState>,
        depth: usize,
        condition: &str,
    ) -> Result<Result<(), Failure>, SemError> {
        if candidates.is_empty() {
            return Ok(Err(Failure {
                steps: Vec::new(),
                side,
                label,
                condition: condition.to_string(),
            }));
        }
        let mut first_failure: Option<Failure> = None;
        for cand in &candidates {
            let (l, r) = match side {
                Side::Left => (&mover_target, cand),
                Side::Right => (cand, &mover_target),
            };
            match self.play(l, r, depth - 1)? {
                Ok(()) => return Ok(Ok(())),
                Err(mut fail) => {
                    if first_failure.is_none() {
                        let (left, right) = match side {
                            Side::Left => (mover_target.clone(), cand.clone()),
                            Side::Right => (cand.clone(), mover_target.clone()),
                        };
                        fail.steps.insert(0, GameStep { label: label.clone(), left, right });
                        first_failure = Some(fail);
                    }
                }
            }
        }
        Ok(Err(first_failure.expect("at least one candidate failed")))
    }
}

/// Plays the bounded game between `p` and `q` on an existing engine, so rule
/// firings accumulate there.
pub fn bounded_bisim_with(
    sem: &Semantics<'_>,
    p: &Composition,
    q: &Composition,
    cfg: &GameConfig,
) -> Result<Verdict, SemError> {
    for t in &cfg.durations {
        crate::flow::sample_count(*t, cfg.delta)?;
    }
    for sigma0 in &cfg.initial_valuations {
        let mut game = Game {
            sem,
            cfg,
            visited: HashSet::new(),
            journal: Vec::new(),
            cache: HashMap::new(),
        };
        let left = (p.clone(), sigma0.clone());
        let right = (q.clone(), sigma0.clone());
        if let Err(fail) = game.play(&left, &right, cfg.depth)? {
            return Ok(Verdict::Distinguished(Box::new(DistinguishedTrace {
                initial_valuation: sigma0.clone(),
                steps: fail.steps,
                side: fail.side,
                label: fail.label,
                condition: fail.condition,
            })));
        }
    }
    Ok(Verdict::EquivalentUpToBound)
}

/// Plays the coinductive matching game between two compositions from each
/// configured initial valuation, alternating over action, environment and
/// menu time moves up to the depth bound.
pub fn bounded_bisim(
    decls: &Declarations,
    p: &Composition,
    q: &Composition,
    cfg: &GameConfig,
) -> Result<Verdict, SemError> {
    let sem = Semantics::new(decls);
    bounded_bisim_with(&sem, p, q, cfg)
}

/// Re-executes a distinguishing trace and checks that it ends in a pair
/// where the recorded side offers a move with the recorded label that the
/// other side cannot match.
pub fn replay(
    decls: &Declarations,
    p: &Composition,
    q: &Composition,
    trace: &DistinguishedTrace,
    cfg: &GameConfig,
) -> Result<bool, SemError> {
    let sem = Semantics::new(decls);
    let tol = cfg.tolerance;
    let key = |s: &GameState| format!("{}|{}", s.0.fingerprint(), s.1.quantized_key(tol));

    let mut left = (p.clone(), trace.initial_valuation.clone());
    let mut right = (q.clone(), trace.initial_valuation.clone());
    for step in &trace.steps {
        let lnext = find_step_target(&sem, &left, &step.label, &step.left, cfg)?;
        let rnext = find_step_target(&sem, &right, &step.label, &step.right, cfg)?;
        match (lnext, rnext) {
            (Some(l), Some(r)) => {
                debug_assert_eq!(key(&l), key(&step.left));
                debug_assert_eq!(key(&r), key(&step.right));
                left = l;
                right = r;
            }
            _ => return Ok(false),
        }
    }

    // At the final pair the recorded mover must own an unmatched move.
    let (mover, other) = match trace.side {
        Side::Left => (&left, &right),
        Side::Right => (&right, &left),
    };
    unmatched_move_exists(&sem, mover, other, &trace.label, cfg)
}

fn find_step_target(
    sem: &Semantics<'_>,
    state: &GameState,
    label: &StepLabel,
    recorded: &GameState,
    cfg: &GameConfig,
) -> Result<Option<GameState>, SemError> {
    let tol = cfg.tolerance;
    let key = |s: &GameState| format!("{}|{}", s.0.fingerprint(), s.1.quantized_key(tol));
    let want = key(recorded);
    match label {
        StepLabel::Action(a) => {
            for s in sem.action_successors(&state.0, &state.1)? {
                if &s.action == a {
                    let target = (s.target, s.valuation);
                    if key(&target) == want {
                        return Ok(Some(target));
                    }
                }
            }
        }
        StepLabel::Env(b) => {
            for s in sem.env_successors(&state.0, &state.1)? {
                if s.terminating == *b {
                    let target = (s.target, state.1.clone());
                    if key(&target) == want {
                        return Ok(Some(target));
                    }
                }
            }
        }
        StepLabel::Time { duration } => {
            for s in sem.time_successors(&state.0, &state.1, *duration, cfg.delta)? {
                let target = (s.target, s.valuation);
                if key(&target) == want {
                    return Ok(Some(target));
                }
            }
        }
    }
    Ok(None)
}

fn unmatched_move_exists(
    sem: &Semantics<'_>,
    mover: &GameState,
    other: &GameState,
    label: &StepLabel,
    cfg: &GameConfig,
) -> Result<bool, SemError> {
    let tol = cfg.tolerance;
    match label {
        StepLabel::Action(a) => {
            let mine: Vec<_> = sem
                .action_successors(&mover.0, &mover.1)?
                .into_iter()
                .filter(|s| &s.action == a)
                .collect();
            let theirs = sem.action_successors(&other.0, &other.1)?;
            Ok(mine.iter().any(|m| {
                !theirs
                    .iter()
                    .any(|t| t.action == m.action && t.valuation.approx_eq(&m.valuation, tol))
            }))
        }
        StepLabel::Env(b) => {
            let mine = sem.env_successors(&mover.0, &mover.1)?;
            let theirs = sem.env_successors(&other.0, &other.1)?;
            Ok(mine
                .iter()
                .filter(|m| m.terminating == *b)
                .any(|m| !theirs.iter().any(|t| t.terminating == m.terminating)))
        }
        StepLabel::Time { duration } => {
            let mine = sem.time_successors(&mover.0, &mover.1, *duration, cfg.delta)?;
            let theirs = sem.time_successors(&other.0, &other.1, *duration, cfg.delta)?;
            Ok(mine
                .iter()
                .any(|m| !theirs.iter().any(|t| t.bundle.matches(&m.bundle, tol))))
        }
    }
}

/// A context a pair of equivalent compositions can be plugged into.
#[derive(Debug, Clone)]
pub enum Context {
    /// `C[x] = x ||_S other`
    ParallelLeft { sync: BTreeSet<String>, other: Composition },
    /// `C[x] = other ||_S x`
    ParallelRight { sync: BTreeSet<String>, other: Composition },
    /// `C[x] = x : parent`, for a pinned parent automaton.
    PostfixUnder { parent: AtomicAutomaton },
}

impl Context {
    pub fn apply(&self, x: &Composition) -> Composition {
        match self {
            Context::ParallelLeft { sync, other } => {
                Composition::parallel(x.clone(), sync.clone(), other.clone())
            }
            Context::ParallelRight { sync, other } => {
                Composition::parallel(other.clone(), sync.clone(), x.clone())
            }
            Context::PostfixUnder { parent } => Composition::postfix(x.clone(), parent.clone()),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Context::ParallelLeft { sync, .. } => {
                format!("_ ||{{{}}} r", sync.iter().cloned().collect::<Vec<_>>().join(","))
            }
            Context::ParallelRight { sync, .. } => {
                format!("r ||{{{}}} _", sync.iter().cloned().collect::<Vec<_>>().join(","))
            }
            Context::PostfixUnder { parent } => format!("_ : {}", parent.name),
        }
    }
}

/// Result of sampling the congruence property.
#[derive(Debug)]
pub struct CongruenceReport {
    /// Verdict for the bare pair; contexts are only sampled when it is
    /// equivalent.
    pub base: Verdict,
    pub contexts: Vec<(String, Verdict)>,
}

/// Checks that plugging an equivalent pair into each context preserves the
/// verdict, which the congruence property of the rule format predicts.
pub fn check_congruence_sample(
    decls: &Declarations,
    p: &Composition,
    q: &Composition,
    contexts: &[Context],
    cfg: &GameConfig,
) -> Result<CongruenceReport, SemError> {
    let base = bounded_bisim(decls, p, q, cfg)?;
    if !base.is_equivalent() {
        return Ok(CongruenceReport { base, contexts: Vec::new() });
    }
    let mut out = Vec::new();
    for ctx in contexts {
        let verdict = bounded_bisim(decls, &ctx.apply(p), &ctx.apply(q), cfg)?;
        out.push((ctx.describe(), verdict));
    }
    Ok(CongruenceReport { base, contexts: out })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatten::eliminate;
    use crate::loader::initial_valuation;
    use crate::models;
    use crate::syntax::parse;

    fn thermostat_cfg() -> (Declarations, Composition, Composition, GameConfig) {
        let (decls, hier) = models::thermostat_hier_augmented();
        let (_, raw) = models::thermostat_hier();
        let flat = Composition::Atomic(eliminate(&raw).unwrap());
        let file = parse(models::THERMOSTAT_HIER).unwrap();
        let sigma0 = initial_valuation(&file, &decls);
        let cfg = GameConfig::new(6, vec![sigma0]);
        (decls, hier, flat, cfg)
    }

    #[test]
    fn reflexivity() {
        let (decls, hier) = models::thermostat_hier_augmented();
        let file = parse(models::THERMOSTAT_HIER).unwrap();
        let sigma0 = initial_valuation(&file, &decls);
        let mut cfg = GameConfig::new(4, vec![sigma0]);
        cfg.durations = vec![0.5, 1.0];
        let verdict = bounded_bisim(&decls, &hier, &hier, &cfg).unwrap();
        assert!(verdict.is_equivalent());
    }

    #[test]
    fn hierarchical_thermostat_matches_its_flattening() {
        let (decls, hier, flat, cfg) = thermostat_cfg();
        let verdict = bounded_bisim(&decls, &hier, &flat, &cfg).unwrap();
        match &verdict {
            Verdict::EquivalentUpToBound => {}
            Verdict::Distinguished(trace) => panic!("distinguished:\n{}", trace),
        }
    }

    #[test]
    fn deleting_the_done_edge_is_distinguished_with_a_replayable_trace() {
        let (decls, hier, flat, cfg) = thermostat_cfg();
        let mutated = match &flat {
            Composition::Atomic(a) => {
                let mut m = a.clone();
                m.edges.retain(|e| e.action != "done");
                Composition::Atomic(m)
            }
            _ => unreachable!(),
        };
        let verdict = bounded_bisim(&decls, &hier, &mutated, &cfg).unwrap();
        let trace = match verdict {
            Verdict::Distinguished(trace) => trace,
            Verdict::EquivalentUpToBound => panic!("mutation not detected"),
        };
        assert!(replay(&decls, &hier, &mutated, &trace, &cfg).unwrap());
    }

    #[test]
    fn verdicts_are_symmetric() {
        let (decls, hier, flat, cfg) = thermostat_cfg();
        let v1 = bounded_bisim(&decls, &hier, &flat, &cfg).unwrap();
        let v2 = bounded_bisim(&decls, &flat, &hier, &cfg).unwrap();
        assert_eq!(v1.is_equivalent(), v2.is_equivalent());

        let mutated = match &flat {
            Composition::Atomic(a) => {
                let mut m = a.clone();
                m.edges.retain(|e| e.action != "done");
                Composition::Atomic(m)
            }
            _ => unreachable!(),
        };
        let v1 = bounded_bisim(&decls, &hier, &mutated, &cfg).unwrap();
        let v2 = bounded_bisim(&decls, &mutated, &hier, &cfg).unwrap();
        assert_eq!(v1.is_equivalent(), v2.is_equivalent());
        assert!(!v1.is_equivalent());
    }

    #[test]
    fn congruence_under_a_disjoint_parallel_context() {
        let (decls_all, hier, flat, mut cfg) = thermostat_cfg();
        cfg.depth = 4;
        cfg.durations = vec![0.5, 1.0];
        // A fresh observer over its own variable, sharing no dynamics.
        let src = "
            cont T
            disc n
            cont c
            disc Delta
            automaton Observer {
              location Watch {
                init true
                edge T < 50 : ping : true -> Watch
              }
            }
        ";
        let observer = parse(src).unwrap().comp;
        let contexts = vec![
            Context::ParallelLeft { sync: BTreeSet::new(), other: observer.clone() },
            Context::ParallelRight {
                sync: ["switch_on".to_string()].into(),
                other: observer,
            },
        ];
        let report = check_congruence_sample(&decls_all, &hier, &flat, &contexts, &cfg).unwrap();
        assert!(report.base.is_equivalent());
        assert_eq!(report.contexts.len(), 2);
        for (desc, verdict) in &report.contexts {
            assert!(verdict.is_equivalent(), "context {} broke equivalence", desc);
        }
    }

    #[test]
    fn distinguished_base_pairs_skip_context_sampling() {
        let (decls, hier, flat, cfg) = thermostat_cfg();
        let mutated = match &flat {
            Composition::Atomic(a) => {
                let mut m = a.clone();
                m.edges.retain(|e| e.action != "done");
                Composition::Atomic(m)
            }
            _ => unreachable!(),
        };
        let report =
            check_congruence_sample(&decls, &hier, &mutated, &[], &cfg).unwrap();
        assert!(!report.base.is_equivalent());
        assert!(report.contexts.is_empty());
    }
}
